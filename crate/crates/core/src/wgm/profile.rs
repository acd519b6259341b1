use std::f64::consts::{FRAC_2_PI, PI};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::characteristic::boundary;
use super::{ModeRecord, Polarization, Result, SphereParams, WgmError};
use crate::specfun::{riccati_bessel, spherical_bessel_j};

/// Grid density used when find_resonance tabulates a profile.
pub const DEFAULT_POINTS_PER_WAVELENGTH: usize = 256;
/// Coarsest density accepted for quadrature over the interior.
pub const MIN_POINTS_PER_WAVELENGTH: usize = 40;
/// Outer edge of the default grid in units of R.
pub const DEFAULT_EXTENT: f64 = 3.0;

// below this γ/x the line is too narrow to sample at real x in f64
const NARROW_LINE: f64 = 1e-5;

/// Real-k continuum solution u(k, r), normalized so that
/// r u(r) → √(2/π) sin(kr - lπ/2 + δ) far from the sphere.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct RadialProfile {
    pub k: f64,
    pub r: Vec<f64>,
    pub u: Vec<f64>,
    /// Interior solution is √(2/π) A ψ_l(n k r) / r with A = `interior_amplitude`.
    pub interior_amplitude: f64,
    /// Scattering phase δ_l.
    pub phase_shift: f64,
}

/// Uniform grid on [0, extent R] with R on a node and a multiple of four
/// intervals inside the sphere.
pub fn default_grid(k0: f64, params: &SphereParams, points_per_wavelength: usize) -> Vec<f64> {
    let wavelengths = params.n * k0 * params.radius / (2.0 * PI);
    let wanted = (wavelengths * points_per_wavelength as f64).ceil() as usize;
    let intervals = wanted.max(64).div_ceil(4) * 4;
    let h = params.radius / intervals as f64;
    let total = (DEFAULT_EXTENT * intervals as f64).round() as usize;
    (0..=total)
        .map(|i| {
            if i == intervals {
                params.radius
            } else {
                i as f64 * h
            }
        })
        .collect()
}

struct Matching {
    amplitude: f64,
    cos_delta: f64,
    sin_delta: f64,
}

fn matching(pol: Polarization, l: u32, x0: f64, n: f64, gamma: f64) -> Result<Matching> {
    let d = if gamma > 0.0 && gamma < NARROW_LINE * x0 {
        // Taylor expansion about the pole x0 - iγ, where D vanishes
        let b = boundary(pol, l, Complex64::new(x0, -gamma), n)?;
        let step = Complex64::new(0.0, gamma);
        b.d1 * step + 0.5 * b.d2 * step * step
    } else {
        boundary(pol, l, Complex64::new(x0, 0.0), n)?.d
    };
    let norm = d.norm();
    if !(norm.is_finite() && norm > 0.0) {
        return Err(WgmError::InvalidParameter {
            field: "k",
            reason: format!("degenerate boundary matching at x = {x0}"),
        });
    }
    // exterior f = a ψ + b χ with a = -Im D / |D| = cos δ, b = Re D / |D| = -sin δ
    Ok(Matching {
        amplitude: 1.0 / norm,
        cos_delta: -d.im / norm,
        sin_delta: -d.re / norm,
    })
}

fn check_grid(grid: &[f64], radius: f64) -> Result<()> {
    let r_max = grid.last().copied().unwrap_or(f64::NAN);
    let ascending = grid.windows(2).all(|w| w[0] < w[1]);
    if grid.is_empty()
        || !ascending
        || grid[0] < 0.0
        || r_max.is_nan()
        || r_max < radius
        || !r_max.is_finite()
    {
        return Err(WgmError::InvalidGrid { radius, r_max });
    }
    Ok(())
}

fn tabulate(
    pol: Polarization,
    l: u32,
    k: f64,
    gamma: f64,
    params: &SphereParams,
    grid: &[f64],
) -> Result<RadialProfile> {
    params.validate()?;
    check_grid(grid, params.radius)?;
    if !(k.is_finite() && k > 0.0) {
        return Err(WgmError::InvalidParameter {
            field: "k",
            reason: format!("must be positive, got {k}"),
        });
    }
    let n = params.n;
    let m = matching(pol, l, k * params.radius, n, gamma)?;
    let norm = FRAC_2_PI.sqrt();
    let interior = norm * m.amplitude * n * k;
    let mut u = Vec::with_capacity(grid.len());
    for &r in grid {
        let v = if r <= params.radius {
            interior * spherical_bessel_j(l, Complex64::new(n * k * r, 0.0))?.re
        } else {
            let rb = riccati_bessel(l, Complex64::new(k * r, 0.0))?;
            norm * (m.cos_delta * rb.psi.re - m.sin_delta * rb.chi().re) / r
        };
        u.push(v);
    }
    Ok(RadialProfile {
        k,
        r: grid.to_vec(),
        u,
        interior_amplitude: m.amplitude,
        phase_shift: m.sin_delta.atan2(m.cos_delta),
    })
}

/// Continuum mode at the real part of a resonance.
///
/// For narrow lines the boundary value at real k0 is obtained from the
/// expansion of D about the pole, so the result reflects the resonant
/// enhancement rather than rounding in k0.
pub fn radial_profile(
    mode: &ModeRecord,
    params: &SphereParams,
    grid: &[f64],
) -> Result<RadialProfile> {
    let gamma = 0.5 * mode.kappa_c * params.radius;
    tabulate(mode.polarization, mode.l, mode.k0, gamma, params, grid)
}

/// Continuum mode at an arbitrary real wavenumber, matched directly.
pub fn continuum_profile(
    pol: Polarization,
    l: u32,
    k: f64,
    params: &SphereParams,
    grid: &[f64],
) -> Result<RadialProfile> {
    tabulate(pol, l, k, 0.0, params, grid)
}
