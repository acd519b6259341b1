//! Coupled precession of the sphere's spin and the optical angular momentum,
//! general field torques, and Euler-angle kinematics.

mod integrate;
mod kinematics;
mod trajectory;

use nalgebra::{UnitQuaternion, Vector3};
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use integrate::{
    rotating_frame_energy, step_general, step_wgm, ConstantGamma, GammaProvider, LinearGamma,
};
pub use kinematics::{
    canonical_j, euler_from_orientation, euler_rates_to_omega, orientation_from_euler,
};
pub use trajectory::{
    measured_precession_hz, predicted_precession_hz, simulate, simulate_with, write_trajectory_csv,
    Monitors, SimulationSummary, Trajectory, DEFAULT_DRIFT_TOLERANCE, TRAJECTORY_CSV_HEADER,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DynamicsError {
    #[error("time step must be positive and finite, got {0}")]
    InvalidStep(f64),
    #[error("n_steps must be at least 1")]
    NoSteps,
    #[error("sample_every must be at least 1")]
    NoSampling,
    #[error("Euler angles are degenerate at sin(beta) = 0 (beta = {beta})")]
    GimbalLock { beta: f64 },
    #[error("torque provider failed at t = {t}: {message}")]
    Provider { t: f64, message: String },
    #[error("{monitor} drifted by {drift:.3e} (limit {tolerance:.1e}) at step {step}; the time step is probably too large")]
    Drift {
        monitor: &'static str,
        drift: f64,
        tolerance: f64,
        step: u64,
    },
    #[error("state became non-finite at step {step}")]
    NonFinite { step: u64 },
    #[error("writing output failed: {0}")]
    Output(String),
}

pub type Result<T> = std::result::Result<T, DynamicsError>;

/// Mechanical angular velocity (rad/s), optical angular momentum in units
/// of ħ, body orientation and time.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpinState {
    pub omega: Vector3<f64>,
    #[serde(rename = "S")]
    pub s: Vector3<f64>,
    pub orientation: UnitQuaternion<f64>,
    pub t: f64,
}

impl SpinState {
    pub fn new(omega: Vector3<f64>, s: Vector3<f64>) -> Self {
        Self {
            omega,
            s,
            orientation: UnitQuaternion::identity(),
            t: 0.0,
        }
    }

    /// Same state with ω and S reversed, which runs the precession backwards.
    pub fn time_reversed(&self) -> Self {
        Self {
            omega: -self.omega,
            s: -self.s,
            ..*self
        }
    }

    pub fn is_finite(&self) -> bool {
        self.omega
            .iter()
            .chain(self.s.iter())
            .chain(self.orientation.coords.iter())
            .all(|v| v.is_finite())
            && self.t.is_finite()
    }
}
