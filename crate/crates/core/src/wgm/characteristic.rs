use num_complex::Complex64;

use super::{Polarization, Result, SphereParams, WgmError};
use crate::specfun::{riccati_bessel, riccati_psi, SpecFunError};

/// Boundary-matching data at size parameter x for the reduced function
/// D_s(x) = s ψ'(nx) ξ(x) - ψ(nx) ξ'(x), with s = n for TE and 1/n for TM.
/// D_s has the same zeros as the polarization's characteristic function and
/// directly gives the interior amplitude of the continuum solution.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Boundary {
    pub d: Complex64,
    pub d1: Complex64,
    pub d2: Complex64,
    /// |s ψ'(nx) ξ(x)| + |ψ(nx) ξ'(x)|
    pub scale: f64,
}

pub(crate) fn derivative_weight(pol: Polarization, n: f64) -> f64 {
    match pol {
        Polarization::TE => n,
        Polarization::TM => 1.0 / n,
    }
}

pub(crate) fn boundary(pol: Polarization, l: u32, x: Complex64, n: f64) -> Result<Boundary> {
    let s = derivative_weight(pol, n);
    let (p, dp) = riccati_psi(l, x * n)?;
    let out = riccati_bessel(l, x)?;
    let (xi, dxi) = (out.xi, out.dxi);

    let big_l = (l as f64) * (l as f64 + 1.0);
    let c1 = big_l * (s / n - 1.0);
    let c0 = 1.0 - s * n;
    let x2 = x * x;
    let g = c1 / x2 + c0;
    let dg = -2.0 * c1 / (x2 * x);
    let ddp = (big_l / (n * n * x2) - 1.0) * p;
    let ddxi = (big_l / x2 - 1.0) * xi;

    let d = s * dp * xi - p * dxi;
    let d1 = g * p * xi + (s - n) * dp * dxi;
    let d2 = dg * p * xi + g * (n * dp * xi + p * dxi) + (s - n) * (n * ddp * dxi + dp * ddxi);
    let scale = (s * dp * xi).norm() + (p * dxi).norm();
    Ok(Boundary { d, d1, d2, scale })
}

fn size_parameter(k: Complex64, params: &SphereParams) -> Result<Complex64> {
    params.validate()?;
    if k.norm() == 0.0 {
        return Err(SpecFunError::ZeroArgument {
            function: "characteristic",
        }
        .into());
    }
    if !(k.re.is_finite() && k.im.is_finite()) {
        return Err(SpecFunError::NonFiniteArgument { re: k.re, im: k.im }.into());
    }
    Ok(k * params.radius)
}

/// TE residual n ψ'(nkR) ξ(kR) - ψ(nkR) ξ'(kR).
pub fn te_characteristic(l: u32, k: Complex64, params: &SphereParams) -> Result<Complex64> {
    characteristic(Polarization::TE, l, k, params)
}

/// TM residual ψ'(nkR) ξ(kR) - n ψ(nkR) ξ'(kR).
pub fn tm_characteristic(l: u32, k: Complex64, params: &SphereParams) -> Result<Complex64> {
    characteristic(Polarization::TM, l, k, params)
}

pub fn characteristic(
    pol: Polarization,
    l: u32,
    k: Complex64,
    params: &SphereParams,
) -> Result<Complex64> {
    let x = size_parameter(k, params)?;
    let b = boundary(pol, l, x, params.n)?;
    Ok(match pol {
        Polarization::TE => b.d,
        Polarization::TM => b.d * params.n,
    })
}

/// |D| relative to the magnitude of its two terms, the scale on which pole
/// tolerances are stated.
pub fn normalized_residual(
    pol: Polarization,
    l: u32,
    k: Complex64,
    params: &SphereParams,
) -> Result<f64> {
    let x = size_parameter(k, params)?;
    let b = boundary(pol, l, x, params.n)?;
    if b.scale == 0.0 {
        return Err(WgmError::InvalidParameter {
            field: "k",
            reason: "both boundary terms vanish".into(),
        });
    }
    Ok(b.d.norm() / b.scale)
}
