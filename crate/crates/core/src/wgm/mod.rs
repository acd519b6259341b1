//! Whispering-gallery resonances of a homogeneous dielectric sphere in vacuum.
//!
//! Lengths are in meters and wavenumbers in 1/m. Internally the boundary
//! problem is solved in the size parameter x = kR.

mod characteristic;
mod profile;
mod search;
mod table;

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::specfun::SpecFunError;

pub use characteristic::{
    characteristic, normalized_residual, te_characteristic, tm_characteristic,
};
pub use profile::{
    continuum_profile, default_grid, radial_profile, RadialProfile, DEFAULT_EXTENT,
    DEFAULT_POINTS_PER_WAVELENGTH, MIN_POINTS_PER_WAVELENGTH,
};
pub use search::{
    find_resonance, nearest_pole, search_resonances, SearchOptions, SearchReport, SeedDiagnostic,
    SeedOutcome,
};
pub use table::{mode_table_json, write_mode_csv, ModeRow, MODE_CSV_HEADER};

/// Mass density used when none is given, kg/m³ (a glass-like value).
pub const DEFAULT_DENSITY: f64 = 2000.0;

#[derive(Debug, Error)]
pub enum WgmError {
    #[error("invalid {field}: {reason}")]
    InvalidParameter { field: &'static str, reason: String },
    #[error("invalid wavenumber window [{lo}, {hi}]")]
    InvalidWindow { lo: f64, hi: f64 },
    #[error(
        "radial grid must be ascending, non-negative and reach r = {radius} (got max {r_max})"
    )]
    InvalidGrid { radius: f64, r_max: f64 },
    #[error(transparent)]
    SpecFun(#[from] SpecFunError),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, WgmError>;

/// Geometry and material of the sphere.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SphereParams {
    #[serde(rename = "R")]
    pub radius: f64,
    pub n: f64,
    pub rho: f64,
    #[serde(rename = "I")]
    pub inertia: f64,
}

impl SphereParams {
    /// Solid sphere with the moment of inertia of a uniform ball.
    ///
    /// `n = 1` is accepted and describes a sphere indistinguishable from
    /// the surrounding vacuum.
    pub fn new(radius: f64, n: f64, rho: f64) -> Result<Self> {
        let p = Self {
            radius,
            n,
            rho,
            inertia: Self::ball_inertia(radius, rho),
        };
        p.validate()?;
        Ok(p)
    }

    pub fn from_permittivity(radius: f64, epsilon: f64, rho: f64) -> Result<Self> {
        if !(epsilon.is_finite() && epsilon >= 1.0) {
            return Err(invalid("epsilon", format!("must be >= 1, got {epsilon}")));
        }
        Self::new(radius, epsilon.sqrt(), rho)
    }

    pub fn with_inertia(self, inertia: f64) -> Result<Self> {
        let p = Self { inertia, ..self };
        p.validate()?;
        Ok(p)
    }

    /// (2/5) M R² with M = (4/3)πR³ρ.
    pub fn ball_inertia(radius: f64, rho: f64) -> f64 {
        let mass = 4.0 / 3.0 * PI * radius.powi(3) * rho;
        0.4 * mass * radius * radius
    }

    pub fn permittivity(&self) -> f64 {
        self.n * self.n
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |field, v: f64| {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(invalid(
                    field,
                    format!("must be positive and finite, got {v}"),
                ))
            }
        };
        positive("R", self.radius)?;
        positive("rho", self.rho)?;
        positive("I", self.inertia)?;
        if !(self.n.is_finite() && self.n >= 1.0) {
            return Err(invalid("n", format!("must be >= 1, got {}", self.n)));
        }
        Ok(())
    }
}

fn invalid(field: &'static str, reason: String) -> WgmError {
    WgmError::InvalidParameter { field, reason }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Polarization {
    TE,
    TM,
}

impl fmt::Display for Polarization {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Polarization::TE => "TE",
            Polarization::TM => "TM",
        })
    }
}

impl FromStr for Polarization {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.to_ascii_uppercase().as_str() {
            "TE" => Ok(Polarization::TE),
            "TM" => Ok(Polarization::TM),
            _ => Err(format!("unknown polarization '{s}', expected TE or TM")),
        }
    }
}

/// One quasinormal resonance.
///
/// The pole of the characteristic function sits at k0 - i kappa_c / 2:
/// `kappa_c` is the full width of the resonance line and `q` is the
/// usual quality factor k0 / kappa_c.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModeRecord {
    pub polarization: Polarization,
    pub l: u32,
    pub k0: f64,
    pub kappa_c: f64,
    #[serde(rename = "Q")]
    pub q: f64,
    pub radial_profile: RadialProfile,
}

impl ModeRecord {
    /// Complex pole k0 - i kappa_c/2 in 1/m.
    pub fn pole(&self) -> Complex64 {
        Complex64::new(self.k0, -0.5 * self.kappa_c)
    }

    pub fn lambda_vac(&self) -> f64 {
        2.0 * PI / self.k0
    }
}
