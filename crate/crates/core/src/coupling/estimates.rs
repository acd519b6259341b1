use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::{CouplingError, Result, Units};
use crate::wgm::SphereParams;

/// Zeeman-type shift m Λ ω_z of the azimuthal level m, rad/s.
pub fn zeeman_shift(m: i32, lambda: f64, omega_z: f64) -> f64 {
    m as f64 * lambda * omega_z
}

/// Smallest spin rate ω_z (rad/s) at which |m| Λ ω_z reaches the line
/// width c k0 / Q.
pub fn resolvability_threshold(lambda: f64, m: i32, q: f64, k0: f64, units: Units) -> Result<f64> {
    if m == 0 {
        return Err(CouplingError::InvalidArgument {
            field: "m",
            reason: "m = 0 has no shift".into(),
        });
    }
    if !(q > 0.0 && q.is_finite()) {
        return Err(CouplingError::InvalidArgument {
            field: "Q",
            reason: format!("must be positive, got {q}"),
        });
    }
    if !(k0 > 0.0 && k0.is_finite()) {
        return Err(CouplingError::InvalidArgument {
            field: "k0",
            reason: format!("must be positive, got {k0}"),
        });
    }
    if lambda.is_nan() || lambda <= 0.0 {
        return Err(CouplingError::InvalidArgument {
            field: "lambda",
            reason: "no shift without coupling".into(),
        });
    }
    Ok(units.c * k0 / q / (m.unsigned_abs() as f64 * lambda))
}

/// Precession rate of the rotor driven by N photons in the highest-weight
/// state, in Hz.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PrecessionEstimate {
    /// Λ(Λ - 1) N l ħ / I
    pub exact_hz: f64,
    /// (n² - 1) N ħ l / (ρ R⁵)
    pub simplified_hz: f64,
}

pub fn precession_rate_estimate(
    params: &SphereParams,
    photons: f64,
    l: u32,
    lambda: f64,
    units: Units,
) -> Result<PrecessionEstimate> {
    if !(photons >= 0.0 && photons.is_finite()) {
        return Err(CouplingError::InvalidArgument {
            field: "N",
            reason: format!("must be non-negative, got {photons}"),
        });
    }
    let s = photons * l as f64 * units.hbar;
    let exact = lambda * (lambda - 1.0) * s / params.inertia;
    let simplified = (params.permittivity() - 1.0) * s / (params.rho * params.radius.powi(5));
    Ok(PrecessionEstimate {
        exact_hz: exact / (2.0 * PI),
        simplified_hz: simplified / (2.0 * PI),
    })
}
