//! Zeros of an analytic function inside a rectangle, located by repeated
//! subdivision using the argument principle. Independent of any Newton
//! iteration.

use num_complex::Complex64;

fn arg_step(fa: Complex64, fb: Complex64) -> f64 {
    (fb / fa).arg()
}

fn edge<F: Fn(Complex64) -> Complex64>(
    f: &F,
    a: Complex64,
    fa: Complex64,
    b: Complex64,
    fb: Complex64,
    depth: u32,
) -> f64 {
    let d = arg_step(fa, fb);
    if d.abs() < std::f64::consts::FRAC_PI_8 || depth > 40 {
        return d;
    }
    let m = (a + b) * 0.5;
    let fm = f(m);
    edge(f, a, fa, m, fm, depth + 1) + edge(f, m, fm, b, fb, depth + 1)
}

/// Number of zeros enclosed by the counter-clockwise rectangle.
pub fn winding<F: Fn(Complex64) -> Complex64>(f: &F, lo: Complex64, hi: Complex64) -> i64 {
    let corners = [
        lo,
        Complex64::new(hi.re, lo.im),
        hi,
        Complex64::new(lo.re, hi.im),
    ];
    let mut total = 0.0;
    for i in 0..4 {
        let a = corners[i];
        let b = corners[(i + 1) % 4];
        // start each edge with a few samples so large smooth phase turns are resolved
        let pieces = 16;
        let mut prev = a;
        let mut fprev = f(a);
        for j in 1..=pieces {
            let p = a + (b - a) * (j as f64 / pieces as f64);
            let fp = f(p);
            total += edge(f, prev, fprev, p, fp, 0);
            prev = p;
            fprev = fp;
        }
    }
    (total / std::f64::consts::TAU).round() as i64
}

/// Zeros inside [lo, hi], each located to within `tol` (absolute).
pub fn zeros<F: Fn(Complex64) -> Complex64>(
    f: &F,
    lo: Complex64,
    hi: Complex64,
    tol: f64,
) -> Vec<Complex64> {
    let mut out = Vec::new();
    let count = winding(f, lo, hi);
    collect(f, lo, hi, count, tol, &mut out);
    out
}

fn collect<F: Fn(Complex64) -> Complex64>(
    f: &F,
    lo: Complex64,
    hi: Complex64,
    count: i64,
    tol: f64,
    out: &mut Vec<Complex64>,
) {
    if count <= 0 {
        return;
    }
    let w = hi.re - lo.re;
    let h = hi.im - lo.im;
    if w.max(h) < tol {
        for _ in 0..count {
            out.push((lo + hi) * 0.5);
        }
        return;
    }
    // split the longer side, nudged off-centre to avoid landing on a zero
    let (a_hi, b_lo) = if w >= h {
        let cut = lo.re + w * 0.5004;
        (Complex64::new(cut, hi.im), Complex64::new(cut, lo.im))
    } else {
        let cut = lo.im + h * 0.5004;
        (Complex64::new(hi.re, cut), Complex64::new(lo.re, cut))
    };
    let first = winding(f, lo, a_hi);
    collect(f, lo, a_hi, first, tol, out);
    collect(f, b_lo, hi, count - first, tol, out);
}
