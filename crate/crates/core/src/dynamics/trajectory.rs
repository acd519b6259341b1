use std::f64::consts::PI;
use std::io::Write;

use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

use super::integrate::{
    advance_orientation, precession_axis, rotating_frame_energy, RigidPrecession,
};
use super::{DynamicsError, Result, SpinState};
use crate::coupling::CouplingConstants;

/// Relative monitor drift at which `simulate` gives up.
pub const DEFAULT_DRIFT_TOLERANCE: f64 = 1e-6;

pub const TRAJECTORY_CSV_HEADER: [&str; 13] = [
    "t",
    "omega_x",
    "omega_y",
    "omega_z",
    "S_x",
    "S_y",
    "S_z",
    "abs_omega",
    "abs_S",
    "K_x",
    "K_y",
    "K_z",
    "H_r",
];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Monitors {
    pub abs_omega: f64,
    #[serde(rename = "abs_S")]
    pub abs_s: f64,
    #[serde(rename = "K")]
    pub k: Vector3<f64>,
    #[serde(rename = "H_r")]
    pub h_r: f64,
}

impl Monitors {
    pub fn of(state: &SpinState, c: &CouplingConstants) -> Self {
        Self {
            abs_omega: state.omega.norm(),
            abs_s: state.s.norm(),
            k: precession_axis(state, c),
            h_r: rotating_frame_energy(state, c),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub samples: Vec<SpinState>,
    pub monitors: Vec<Monitors>,
}

/// Largest relative departure of each monitor from its initial value.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
struct Drift {
    abs_s: f64,
    abs_omega: f64,
    k: f64,
    h_r: f64,
}

fn relative(now: f64, start: f64) -> f64 {
    let d = (now - start).abs();
    if start != 0.0 {
        d / start.abs()
    } else {
        d
    }
}

impl Drift {
    fn between(first: &Monitors, m: &Monitors) -> Self {
        let k_scale = first.k.norm();
        let dk = (m.k - first.k).amax();
        Drift {
            abs_s: relative(m.abs_s, first.abs_s),
            abs_omega: relative(m.abs_omega, first.abs_omega),
            k: if k_scale > 0.0 { dk / k_scale } else { dk },
            h_r: relative(m.h_r, first.h_r),
        }
    }

    fn max(self, o: Drift) -> Drift {
        Drift {
            abs_s: self.abs_s.max(o.abs_s),
            abs_omega: self.abs_omega.max(o.abs_omega),
            k: self.k.max(o.k),
            h_r: self.h_r.max(o.h_r),
        }
    }

    fn worst(&self) -> (&'static str, f64) {
        [
            ("|S|", self.abs_s),
            ("|omega|", self.abs_omega),
            ("K", self.k),
            ("H_r", self.h_r),
        ]
        .into_iter()
        .fold(("|S|", 0.0), |a, b| if b.1 > a.1 { b } else { a })
    }
}

pub fn simulate(
    initial: &SpinState,
    c: &CouplingConstants,
    dt: f64,
    n_steps: u64,
    sample_every: u64,
) -> Result<Trajectory> {
    simulate_with(
        initial,
        c,
        dt,
        n_steps,
        sample_every,
        DEFAULT_DRIFT_TOLERANCE,
    )
}

/// Runs `n_steps` of [`step_wgm`] about the initial K, keeping the initial state, every
/// `sample_every`-th state and the final state. Every step is checked
/// against `tolerance` for relative drift of the conserved monitors.
pub fn simulate_with(
    initial: &SpinState,
    c: &CouplingConstants,
    dt: f64,
    n_steps: u64,
    sample_every: u64,
    tolerance: f64,
) -> Result<Trajectory> {
    if n_steps == 0 {
        return Err(DynamicsError::NoSteps);
    }
    if sample_every == 0 {
        return Err(DynamicsError::NoSampling);
    }
    if !(dt.is_finite() && dt > 0.0) {
        return Err(DynamicsError::InvalidStep(dt));
    }
    let first = Monitors::of(initial, c);
    let mut samples = vec![*initial];
    let mut monitors = vec![first];
    let mut state = *initial;
    let flow = RigidPrecession::new(initial, c);
    for step in 1..=n_steps {
        let elapsed = step as f64 * dt;
        let (omega, s) = flow.at(flow.rate * elapsed);
        let orientation = advance_orientation(&state.orientation, &state.omega, &flow.spin, dt);
        state = SpinState {
            omega,
            s,
            orientation,
            t: initial.t + elapsed,
        };
        if !state.is_finite() {
            return Err(DynamicsError::NonFinite { step });
        }
        let m = Monitors::of(&state, c);
        let (monitor, drift) = Drift::between(&first, &m).worst();
        if drift > tolerance {
            return Err(DynamicsError::Drift {
                monitor,
                drift,
                tolerance,
                step,
            });
        }
        if step % sample_every == 0 || step == n_steps {
            samples.push(state);
            monitors.push(m);
        }
    }
    Ok(Trajectory { samples, monitors })
}

/// Λ|K|/(2πI), the rate at which ω and S turn about K.
pub fn predicted_precession_hz(state: &SpinState, c: &CouplingConstants) -> f64 {
    c.lambda * precession_axis(state, c).norm() / (c.inertia * 2.0 * PI)
}

/// Mean rate (Hz) at which the component of S normal to K turns about K,
/// from the accumulated angle between consecutive samples. None when S
/// has no such component or the trajectory spans no time. Samples must be
/// closer than half a precession period.
pub fn measured_precession_hz(traj: &Trajectory) -> Option<f64> {
    let first = traj.monitors.first()?;
    let axis = first.k.try_normalize(0.0)?;
    let perp = |s: &Vector3<f64>| s - axis * axis.dot(s);
    let scale = traj.samples[0].s.norm();
    let mut prev = perp(&traj.samples[0].s);
    if prev.norm().is_nan() || prev.norm() <= 1e-9 * scale {
        return None;
    }
    let mut angle = 0.0;
    for sample in &traj.samples[1..] {
        let cur = perp(&sample.s);
        angle += axis.dot(&prev.cross(&cur)).atan2(prev.dot(&cur));
        prev = cur;
    }
    let span = traj.samples.last()?.t - traj.samples[0].t;
    if span > 0.0 {
        Some(angle / (2.0 * PI * span))
    } else {
        None
    }
}

/// Summary of a run, as written next to the trajectory.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimulationSummary {
    pub precession_hz_measured: Option<f64>,
    pub precession_hz_predicted: f64,
    #[serde(rename = "drift_abs_S")]
    pub drift_abs_s: f64,
    pub drift_abs_omega: f64,
    #[serde(rename = "drift_K")]
    pub drift_k: f64,
    #[serde(rename = "drift_Hr")]
    pub drift_hr: f64,
}

impl Trajectory {
    pub fn summary(&self, c: &CouplingConstants) -> SimulationSummary {
        let first = self.monitors[0];
        let drift = self.monitors.iter().fold(Drift::default(), |acc, m| {
            acc.max(Drift::between(&first, m))
        });
        SimulationSummary {
            precession_hz_measured: measured_precession_hz(self),
            precession_hz_predicted: predicted_precession_hz(&self.samples[0], c),
            drift_abs_s: drift.abs_s,
            drift_abs_omega: drift.abs_omega,
            drift_k: drift.k,
            drift_hr: drift.h_r,
        }
    }
}

/// CSV with one row per sample. S is in units of ħ; K and H_r use the
/// value of ħ carried by `c`, which is recorded in the leading comment.
pub fn write_trajectory_csv<W: Write>(
    traj: &Trajectory,
    c: &CouplingConstants,
    mut out: W,
) -> Result<()> {
    let io = |e: std::io::Error| DynamicsError::Output(e.to_string());
    writeln!(
        out,
        "# S_x,S_y,S_z,abs_S in units of hbar = {:e} J s; t in s; omega in rad/s; K in J s; H_r in J",
        c.hbar
    )
    .map_err(io)?;
    let mut w = csv::WriterBuilder::new()
        .has_headers(false)
        .from_writer(out);
    let csv_err = |e: csv::Error| DynamicsError::Output(e.to_string());
    w.write_record(TRAJECTORY_CSV_HEADER).map_err(csv_err)?;
    for (s, m) in traj.samples.iter().zip(&traj.monitors) {
        let row = [
            s.t,
            s.omega.x,
            s.omega.y,
            s.omega.z,
            s.s.x,
            s.s.y,
            s.s.z,
            m.abs_omega,
            m.abs_s,
            m.k.x,
            m.k.y,
            m.k.z,
            m.h_r,
        ];
        w.serialize(row).map_err(csv_err)?;
    }
    w.flush().map_err(io)?;
    Ok(())
}
