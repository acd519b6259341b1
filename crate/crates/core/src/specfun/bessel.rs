use num_complex::Complex64;

use super::{Result, SpecFunError, MAX_ORDER, VALIDATED_ABS_ARG, VALIDATED_ORDER};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Below this modulus j_l is summed from its power series.
const SERIES_RADIUS: f64 = 1.0;
const RESCALE_ABOVE: f64 = 1e100;
const OVERFLOW_ABOVE: f64 = 1e300;
/// Beyond this |Im z| the Hankel functions are not assembled from an
/// upward recurrence of y.
const OFF_AXIS_IM: f64 = 0.5;

/// Whether an evaluation falls inside the range where the tight error
/// contract (1e-10 relative) has been verified.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum Accuracy {
    Validated,
    Relaxed,
}

pub fn accuracy(l: u32, z: Complex64) -> Accuracy {
    if l <= VALIDATED_ORDER && z.norm() <= VALIDATED_ABS_ARG {
        Accuracy::Validated
    } else {
        Accuracy::Relaxed
    }
}

fn check_inputs(lmax: u32, z: Complex64) -> Result<()> {
    if lmax > MAX_ORDER {
        return Err(SpecFunError::OrderOutOfRange {
            l: lmax,
            max: MAX_ORDER,
        });
    }
    if !z.re.is_finite() || !z.im.is_finite() {
        return Err(SpecFunError::NonFiniteArgument { re: z.re, im: z.im });
    }
    Ok(())
}

fn finite(v: Complex64) -> bool {
    v.re.is_finite() && v.im.is_finite()
}

/// Complex division that stays finite when |b|^2 would overflow (Smith).
pub(crate) fn cdiv(a: Complex64, b: Complex64) -> Complex64 {
    if b.re.abs() >= b.im.abs() {
        let r = b.im / b.re;
        let d = b.re + b.im * r;
        Complex64::new((a.re + a.im * r) / d, (a.im - a.re * r) / d)
    } else {
        let r = b.re / b.im;
        let d = b.re * r + b.im;
        Complex64::new((a.re * r + a.im) / d, (a.im * r - a.re) / d)
    }
}

fn overflow(function: &'static str, l: u32, z: Complex64) -> SpecFunError {
    SpecFunError::Overflow {
        function,
        l,
        abs_x: z.norm(),
    }
}

/// j_l(z) by the ascending series; used only for |z| <= 1 where every
/// term is smaller than the previous one.
fn j_series(l: u32, z: Complex64) -> Complex64 {
    let mut lead = Complex64::new(1.0, 0.0);
    for k in 0..l {
        lead *= z / (2 * k + 3) as f64;
    }
    // lead = z^l / (2l+1)!!
    let w = -z * z * 0.5;
    let mut term = Complex64::new(1.0, 0.0);
    let mut sum = term;
    for k in 0..200u32 {
        term *= w / ((k + 1) as f64 * (2 * l + 2 * k + 3) as f64);
        sum += term;
        if term.norm() <= 1e-17 * sum.norm() {
            break;
        }
    }
    lead * sum
}

/// j_0..=j_lmax at `z` by Miller's backward recurrence, normalised against
/// the closed form of whichever of j_0, j_1 is larger in modulus.
pub fn spherical_bessel_j_array(lmax: u32, z: Complex64) -> Result<Vec<Complex64>> {
    check_inputs(lmax, z)?;
    let n = lmax as usize;
    if z.norm() == 0.0 {
        let mut out = vec![Complex64::new(0.0, 0.0); n + 1];
        out[0] = Complex64::new(1.0, 0.0);
        return Ok(out);
    }
    if z.norm() <= SERIES_RADIUS {
        return Ok((0..=lmax).map(|l| j_series(l, z)).collect());
    }

    let reach = (lmax as f64).max(z.norm());
    let start = (reach + (40.0 * reach).sqrt()).ceil() as usize + 20;

    // Stored values keep the rescale count at the time they were written,
    // so orders far below the normalisation index do not underflow early.
    let mut out = vec![Complex64::new(0.0, 0.0); n + 1];
    let mut stored_at = vec![0i32; n + 1];
    let mut rescales = 0i32;
    let mut upper = Complex64::new(0.0, 0.0);
    let mut current = Complex64::new(1e-30, 0.0);
    // (current, upper) = (f_k, f_{k+1}), walking k downward from `start`.
    for k in (1..=start).rev() {
        let lower = current * ((2 * k + 1) as f64) / z - upper;
        upper = current;
        current = lower;
        if current.norm() > RESCALE_ABOVE {
            current /= RESCALE_ABOVE;
            upper /= RESCALE_ABOVE;
            rescales += 1;
        }
        if k - 1 <= n {
            out[k - 1] = current;
            stored_at[k - 1] = rescales;
        }
    }
    // f_1 is `upper` once the loop has reached k = 1
    let f1 = upper;

    let (sin, cos) = (z.sin(), z.cos());
    let j0 = sin / z;
    let j1 = sin / (z * z) - cos / z;
    if !finite(j0) || !finite(j1) {
        return Err(overflow("spherical_bessel_j", lmax, z));
    }
    let scale = if j0.norm() >= j1.norm() {
        cdiv(j0, out[0])
    } else {
        cdiv(j1, f1)
    };
    for (v, at) in out.iter_mut().zip(stored_at) {
        *v *= scale;
        for _ in 0..(rescales - at) {
            *v /= RESCALE_ABOVE;
        }
    }
    if out.iter().any(|v| !finite(*v)) {
        return Err(overflow("spherical_bessel_j", lmax, z));
    }
    Ok(out)
}

pub fn spherical_bessel_j(l: u32, z: Complex64) -> Result<Complex64> {
    Ok(spherical_bessel_j_array(l, z)?[l as usize])
}

/// y_0..=y_lmax.
///
/// Close to the real axis this is the upward recurrence. Further out the
/// two Hankel components of y grow at different rates in l, and the upward
/// recurrence amplifies rounding by up to e^{2|Im z|}; there y is taken
/// from (h^(1) - j)/i, which has no cancellation on either side.
pub fn spherical_bessel_y_array(lmax: u32, z: Complex64) -> Result<Vec<Complex64>> {
    check_inputs(lmax, z)?;
    if z.norm() == 0.0 {
        return Err(SpecFunError::ZeroArgument {
            function: "spherical_bessel_y",
        });
    }
    if z.im.abs() > OFF_AXIS_IM {
        let j = spherical_bessel_j_array(lmax, z)?;
        let h = off_axis_hankel1(lmax, z, &j)?;
        return Ok(h.into_iter().zip(j).map(|(h, j)| (h - j) / I).collect());
    }
    y_upward(lmax, z)
}

fn y_upward(lmax: u32, z: Complex64) -> Result<Vec<Complex64>> {
    let (sin, cos) = (z.sin(), z.cos());
    let mut out = Vec::with_capacity(lmax as usize + 1);
    out.push(-cos / z);
    if lmax >= 1 {
        out.push(-cos / (z * z) - sin / z);
    }
    for k in 1..lmax as usize {
        let next = out[k] * ((2 * k + 1) as f64) / z - out[k - 1];
        out.push(next);
    }
    if out.iter().any(|v| !finite(*v) || v.norm() > OVERFLOW_ABOVE) {
        return Err(overflow("spherical_bessel_y", lmax, z));
    }
    Ok(out)
}

pub fn spherical_bessel_y(l: u32, z: Complex64) -> Result<Complex64> {
    Ok(spherical_bessel_y_array(l, z)?[l as usize])
}

/// Upward recurrence of h^(1) from its closed forms. Stable only in the
/// upper half plane, where h^(1) outgrows h^(2) as l increases.
fn hankel1_upward(lmax: u32, z: Complex64) -> Result<Vec<Complex64>> {
    let e = (I * z).exp();
    let mut out = Vec::with_capacity(lmax as usize + 1);
    out.push(-I * e / z);
    if lmax >= 1 {
        out.push(-e * (z + I) / (z * z));
    }
    for k in 1..lmax as usize {
        let next = out[k] * ((2 * k + 1) as f64) / z - out[k - 1];
        out.push(next);
    }
    if out.iter().any(|v| !finite(*v) || v.norm() > OVERFLOW_ABOVE) {
        return Err(overflow("spherical_hankel1", lmax, z));
    }
    Ok(out)
}

fn off_axis_hankel1(lmax: u32, z: Complex64, j: &[Complex64]) -> Result<Vec<Complex64>> {
    if z.im > 0.0 {
        return hankel1_upward(lmax, z);
    }
    // h^(2)(z) = conj h^(1)(conj z) is the small one below the axis
    let h2 = hankel1_upward(lmax, z.conj())?;
    Ok(j.iter()
        .zip(h2)
        .map(|(j, h2)| 2.0 * j - h2.conj())
        .collect())
}

/// h^(1)_0..=h^(1)_lmax.
///
/// Near the real axis the outgoing function is assembled as j + i y so that
/// its real part keeps the full accuracy of j (that part is tiny next to y
/// inside a whispering-gallery caustic).
pub fn spherical_hankel1_array(lmax: u32, z: Complex64) -> Result<Vec<Complex64>> {
    check_inputs(lmax, z)?;
    if z.norm() == 0.0 {
        return Err(SpecFunError::ZeroArgument {
            function: "spherical_hankel1",
        });
    }
    if z.im > OFF_AXIS_IM {
        return hankel1_upward(lmax, z);
    }
    let j = spherical_bessel_j_array(lmax, z)?;
    if z.im < -OFF_AXIS_IM {
        return off_axis_hankel1(lmax, z, &j);
    }
    let y = y_upward(lmax, z)?;
    Ok(j.into_iter().zip(y).map(|(j, y)| j + I * y).collect())
}

pub fn spherical_hankel1(l: u32, z: Complex64) -> Result<Complex64> {
    Ok(spherical_hankel1_array(l, z)?[l as usize])
}

/// Riccati–Bessel functions ψ_l = x j_l, ξ_l = x h_l^(1) and their
/// derivatives with respect to the argument.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RiccatiBessel {
    pub psi: Complex64,
    pub dpsi: Complex64,
    pub xi: Complex64,
    pub dxi: Complex64,
    pub accuracy: Accuracy,
}

impl RiccatiBessel {
    /// χ_l = x y_l, recovered from ξ = ψ + iχ.
    pub fn chi(&self) -> Complex64 {
        (self.xi - self.psi) / I
    }

    pub fn dchi(&self) -> Complex64 {
        (self.dxi - self.dpsi) / I
    }
}

/// Only the interior function (ψ, ψ') at `z`; usable at z = 0.
pub(crate) fn riccati_psi(l: u32, z: Complex64) -> Result<(Complex64, Complex64)> {
    let j = spherical_bessel_j_array(l, z)?;
    let lu = l as usize;
    let psi = z * j[lu];
    let dpsi = if l == 0 {
        z.cos()
    } else {
        z * j[lu - 1] - (l as f64) * j[lu]
    };
    Ok((psi, dpsi))
}

pub fn riccati_bessel(l: u32, z: Complex64) -> Result<RiccatiBessel> {
    if z.norm() == 0.0 {
        return Err(SpecFunError::ZeroArgument {
            function: "riccati_bessel",
        });
    }
    let (psi, dpsi) = riccati_psi(l, z)?;
    let h = spherical_hankel1_array(l, z)?;
    let lu = l as usize;
    let xi = z * h[lu];
    let dxi = if l == 0 {
        (I * z).exp()
    } else {
        z * h[lu - 1] - (l as f64) * h[lu]
    };
    Ok(RiccatiBessel {
        psi,
        dpsi,
        xi,
        dxi,
        accuracy: accuracy(l, z),
    })
}
