use std::f64::consts::PI;

use super::{CouplingConstants, CouplingError, Result, HBAR};
use crate::wgm::{ModeRecord, Polarization, SphereParams};

/// Largest accepted relative error estimate of the Λ quadrature.
pub const QUADRATURE_TOLERANCE: f64 = 1e-4;

fn simpson(f: &[f64], h: f64) -> f64 {
    let n = f.len() - 1;
    let mut s = f[0] + f[n];
    for (i, v) in f.iter().enumerate().take(n).skip(1) {
        s += if i % 2 == 1 { 4.0 * v } else { 2.0 * v };
    }
    s * h / 3.0
}

/// Λ = π κ_c ∫_0^R (ε - 1) r² u(r)² dr over the mode's tabulated profile.
///
/// The interior part of the profile must be a uniform grid starting at 0
/// with R on a node and a multiple of four intervals, so that Simpson's
/// rule can be compared against itself at twice the spacing.
pub fn compute_lambda(mode: &ModeRecord, params: &SphereParams) -> Result<CouplingConstants> {
    params.validate()?;
    if mode.polarization != Polarization::TE {
        return Err(CouplingError::NotTe);
    }
    let profile = &mode.radial_profile;
    let radius = params.radius;
    let inside = profile
        .r
        .iter()
        .take_while(|&&r| r <= radius * (1.0 + 1e-12))
        .count();
    if inside < 5 || profile.u.len() != profile.r.len() {
        return Err(CouplingError::ProfileLayout(
            "fewer than five nodes inside the sphere".into(),
        ));
    }
    let r = &profile.r[..inside];
    let intervals = inside - 1;
    let h = radius / intervals as f64;
    if r[0] != 0.0 || (r[intervals] - radius).abs() > 1e-12 * radius {
        return Err(CouplingError::ProfileLayout(
            "interior grid must span [0, R] with R on a node".into(),
        ));
    }
    if r.iter()
        .enumerate()
        .any(|(i, &ri)| (ri - i as f64 * h).abs() > 1e-9 * h)
    {
        return Err(CouplingError::ProfileLayout(
            "interior grid is not uniform".into(),
        ));
    }
    if intervals % 4 != 0 {
        return Err(CouplingError::ProfileLayout(format!(
            "{intervals} interior intervals; a multiple of four is required"
        )));
    }

    let f: Vec<f64> = r
        .iter()
        .zip(&profile.u)
        .map(|(r, u)| r * r * u * u)
        .collect();
    let fine = simpson(&f, h);
    let coarse_f: Vec<f64> = f.iter().step_by(2).copied().collect();
    let coarse = simpson(&coarse_f, 2.0 * h);
    let estimate = if fine == 0.0 {
        0.0
    } else {
        ((fine - coarse) / 15.0 / fine).abs()
    };
    if estimate > QUADRATURE_TOLERANCE {
        let refinement = (estimate / QUADRATURE_TOLERANCE).powf(0.25).ceil() as u32;
        return Err(CouplingError::QuadratureTooCoarse {
            estimate,
            tolerance: QUADRATURE_TOLERANCE,
            refinement: refinement.max(2),
        });
    }

    let lambda = PI * mode.kappa_c * (params.permittivity() - 1.0) * fine;
    Ok(CouplingConstants {
        lambda,
        inertia: params.inertia,
        l: mode.l,
        hbar: HBAR,
        quadrature_error: estimate,
        mode: Some(mode.clone()),
    })
}
