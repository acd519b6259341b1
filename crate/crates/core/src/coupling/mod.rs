//! Rotational coupling between the sphere and the optical angular momentum
//! of a whispering-gallery multiplet.

mod estimates;
mod lambda;
mod spin;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::specfun::SpecFunError;
use crate::wgm::{ModeRecord, WgmError};

pub use estimates::{
    precession_rate_estimate, resolvability_threshold, zeeman_shift, PrecessionEstimate,
};
pub use lambda::{compute_lambda, QUADRATURE_TOLERANCE};
pub use spin::{angular_momentum_matrices, optical_s_from_amplitudes, OpticalAngularMomentum};

/// Reduced Planck constant, J s.
pub const HBAR: f64 = 1.054_571_817e-34;
/// Speed of light in vacuum, m/s.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// Values of ħ and c used to convert between photon counts and SI.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Units {
    pub hbar: f64,
    pub c: f64,
}

impl Units {
    pub const SI: Units = Units {
        hbar: HBAR,
        c: SPEED_OF_LIGHT,
    };
    /// ħ = c = 1.
    pub const NATURAL: Units = Units { hbar: 1.0, c: 1.0 };
}

impl Default for Units {
    fn default() -> Self {
        Units::SI
    }
}

#[derive(Debug, Error)]
pub enum CouplingError {
    #[error("coupling is defined for TE modes only")]
    NotTe,
    #[error("radial profile unusable for quadrature: {0}")]
    ProfileLayout(String),
    #[error("quadrature error estimate {estimate:.3e} exceeds {tolerance:.0e}; refine the grid by a factor of {refinement}")]
    QuadratureTooCoarse {
        estimate: f64,
        tolerance: f64,
        refinement: u32,
    },
    #[error("expected {expected} amplitudes for l = {l}, got {got}")]
    LengthMismatch { l: u32, expected: usize, got: usize },
    #[error("invalid {field}: {reason}")]
    InvalidArgument { field: &'static str, reason: String },
    #[error(transparent)]
    SpecFun(#[from] SpecFunError),
    #[error(transparent)]
    Wgm(#[from] WgmError),
}

pub type Result<T> = std::result::Result<T, CouplingError>;

/// Λ together with the rotor it couples to.
///
/// `hbar` sets the unit of the optical angular momentum S used by the
/// dynamics (S is counted in units of ħ).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CouplingConstants {
    pub lambda: f64,
    #[serde(rename = "I")]
    pub inertia: f64,
    pub l: u32,
    pub hbar: f64,
    /// Relative error estimate of the Λ quadrature.
    pub quadrature_error: f64,
    pub mode: Option<ModeRecord>,
}

impl CouplingConstants {
    /// Constants not tied to a computed mode, for direct use in the dynamics.
    pub fn new(lambda: f64, inertia: f64, hbar: f64) -> Self {
        Self {
            lambda,
            inertia,
            l: 0,
            hbar,
            quadrature_error: 0.0,
            mode: None,
        }
    }

    pub fn export(&self) -> CouplingExport {
        CouplingExport {
            lambda: self.lambda,
            inertia: self.inertia,
            l: self.l,
            k0: self.mode.as_ref().map(|m| m.k0),
            kappa_c: self.mode.as_ref().map(|m| m.kappa_c),
            q: self.mode.as_ref().map(|m| m.q),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.export()).expect("coupling export always serializes")
    }
}

/// Flat record written by the JSON export.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CouplingExport {
    pub lambda: f64,
    #[serde(rename = "I")]
    pub inertia: f64,
    pub l: u32,
    pub k0: Option<f64>,
    pub kappa_c: Option<f64>,
    #[serde(rename = "Q")]
    pub q: Option<f64>,
}
