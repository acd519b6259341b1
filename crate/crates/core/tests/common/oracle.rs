//! Arbitrary-precision reference values for spherical Bessel functions.
//!
//! Values are summed from the power series in binary fixed point with
//! `FRAC_BITS` fractional bits (about 480 decimal digits below the point),
//! which leaves well over 50 significant digits for every result that is
//! representable as an `f64`. Only ring operations and exact integer
//! divisions are used, so nothing here shares code with the crate's
//! recurrence-based evaluators.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::{Float, Signed, ToPrimitive, Zero};

pub const FRAC_BITS: u64 = 1600;

#[derive(Clone, Debug)]
pub struct BigComplex {
    pub re: BigInt,
    pub im: BigInt,
}

fn fixed_from_f64(x: f64) -> BigInt {
    if x == 0.0 {
        return BigInt::zero();
    }
    let (mantissa, exponent, sign) = x.integer_decode();
    let shift = exponent as i64 + FRAC_BITS as i64;
    assert!(shift >= 0, "value below fixed-point resolution");
    let mut v = BigInt::from(mantissa) << (shift as usize);
    if sign < 0 {
        v = -v;
    }
    v
}

fn ldexp(mut m: f64, mut e: i64) -> f64 {
    while e > 1000 {
        m *= 2f64.powi(1000);
        e -= 1000;
    }
    while e < -1000 {
        m *= 2f64.powi(-1000);
        e += 1000;
    }
    m * 2f64.powi(e as i32)
}

fn fixed_to_f64(x: &BigInt) -> f64 {
    if x.is_zero() {
        return 0.0;
    }
    let bits = x.bits() as i64;
    let shift = (bits - 64).max(0);
    let top = (x >> (shift as usize)).to_f64().unwrap();
    ldexp(top, shift - FRAC_BITS as i64)
}

impl BigComplex {
    pub fn zero() -> Self {
        Self {
            re: BigInt::zero(),
            im: BigInt::zero(),
        }
    }

    pub fn from_c64(z: Complex64) -> Self {
        Self {
            re: fixed_from_f64(z.re),
            im: fixed_from_f64(z.im),
        }
    }

    pub fn from_integer(v: &BigInt) -> Self {
        Self {
            re: v << (FRAC_BITS as usize),
            im: BigInt::zero(),
        }
    }

    pub fn to_c64(&self) -> Complex64 {
        Complex64::new(fixed_to_f64(&self.re), fixed_to_f64(&self.im))
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn add(&self, o: &Self) -> Self {
        Self {
            re: &self.re + &o.re,
            im: &self.im + &o.im,
        }
    }

    pub fn mul(&self, o: &Self) -> Self {
        let re = (&self.re * &o.re - &self.im * &o.im) >> (FRAC_BITS as usize);
        let im = (&self.re * &o.im + &self.im * &o.re) >> (FRAC_BITS as usize);
        Self { re, im }
    }

    pub fn div_int(&self, d: i64) -> Self {
        let d = BigInt::from(d);
        Self {
            re: &self.re / &d,
            im: &self.im / &d,
        }
    }

    pub fn div(&self, o: &Self) -> Self {
        let norm = (&o.re * &o.re + &o.im * &o.im) >> (FRAC_BITS as usize);
        let re = (&self.re * &o.re + &self.im * &o.im) / &norm;
        let im = (&self.im * &o.re - &self.re * &o.im) / &norm;
        Self { re, im }
    }

    pub fn scale_neg_half(&self) -> Self {
        Self {
            re: -(&self.re) / 2,
            im: -(&self.im) / 2,
        }
    }

    pub fn times_i(&self) -> Self {
        Self {
            re: -(&self.im),
            im: self.re.clone(),
        }
    }

    fn magnitude_bits(&self) -> u64 {
        self.re.abs().bits().max(self.im.abs().bits())
    }
}

fn powi(z: &BigComplex, p: u32) -> BigComplex {
    let mut acc = BigComplex::from_integer(&BigInt::from(1));
    for _ in 0..p {
        acc = acc.mul(z);
    }
    acc
}

fn double_factorial(n: i64) -> BigInt {
    let mut acc = BigInt::from(1);
    let mut k = n;
    while k > 1 {
        acc *= k;
        k -= 2;
    }
    acc
}

fn sum_series(
    first: BigComplex,
    w: &BigComplex,
    denom: impl Fn(i64) -> i64,
    min_terms: i64,
) -> BigComplex {
    let mut term = first;
    let mut sum = term.clone();
    let mut k = 0i64;
    loop {
        term = term.mul(w).div_int(denom(k));
        sum = sum.add(&term);
        k += 1;
        if k > min_terms && (term.is_zero() || term.magnitude_bits() < 8) {
            break;
        }
    }
    sum
}

fn bessel_j_big(l: u32, z: &BigComplex, abs_z: f64) -> BigComplex {
    let w = z.mul(z).scale_neg_half();
    let l = l as i64;
    let first = powi(z, l as u32);
    let df = double_factorial(2 * l + 1);
    let first = BigComplex {
        re: first.re / &df,
        im: first.im / &df,
    };
    sum_series(
        first,
        &w,
        |k| (k + 1) * (2 * l + 2 * k + 3),
        abs_z as i64 + l + 4,
    )
}

fn bessel_y_big(l: u32, z: &BigComplex, abs_z: f64) -> BigComplex {
    let w = z.mul(z).scale_neg_half();
    let l = l as i64;
    let zpow = powi(z, (l + 1) as u32);
    let numer = BigComplex::from_integer(&-double_factorial(2 * l - 1));
    let first = numer.div(&zpow);
    sum_series(
        first,
        &w,
        |k| (k + 1) * (2 * k + 1 - 2 * l),
        abs_z as i64 + l + 4,
    )
}

/// j_l(z) to far beyond double precision.
pub fn spherical_j(l: u32, z: Complex64) -> Complex64 {
    let zb = BigComplex::from_c64(z);
    bessel_j_big(l, &zb, z.norm()).to_c64()
}

/// y_l(z) to far beyond double precision.
pub fn spherical_y(l: u32, z: Complex64) -> Complex64 {
    let zb = BigComplex::from_c64(z);
    bessel_y_big(l, &zb, z.norm()).to_c64()
}

/// h_l^(1)(z) = j_l(z) + i y_l(z), combined before rounding.
pub fn spherical_h1(l: u32, z: Complex64) -> Complex64 {
    let zb = BigComplex::from_c64(z);
    let j = bessel_j_big(l, &zb, z.norm());
    let y = bessel_y_big(l, &zb, z.norm());
    j.add(&y.times_i()).to_c64()
}
