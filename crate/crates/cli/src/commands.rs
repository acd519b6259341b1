use std::fmt::Write as _;
use std::fs::{self, File};
use std::io::BufWriter;
use std::path::Path;

use serde::Serialize;
use wgm_rotor::coupling::{
    compute_lambda, precession_rate_estimate, resolvability_threshold, CouplingConstants,
    CouplingError, Units, HBAR, SPEED_OF_LIGHT,
};
use wgm_rotor::dynamics::{simulate, write_trajectory_csv, DynamicsError, SpinState};
use wgm_rotor::wgm::{
    mode_table_json, search_resonances, write_mode_csv, ModeRecord, SearchOptions, SeedOutcome,
    SphereParams, WgmError,
};

use crate::config::{Format, RunConfig};
use crate::CliError;

pub const NO_RESONANCE: &str = "no resonance in window";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Modes,
    Lambda,
    Simulate,
    Estimate,
}

#[derive(Debug, Clone, Copy, Default)]
pub struct Options {
    pub natural_units: bool,
    pub verbose: bool,
}

/// What a command printed. Kept in memory so that concurrent runs can be
/// reported in a fixed order.
#[derive(Debug, Default)]
pub struct Report {
    pub stdout: String,
    pub log: String,
    /// The command ran but found nothing to report.
    pub empty: bool,
}

fn from_wgm(e: WgmError) -> CliError {
    match e {
        WgmError::InvalidParameter { field, reason } => CliError::Invalid {
            field: field.to_string(),
            reason,
        },
        WgmError::InvalidWindow { .. } => CliError::Invalid {
            field: "mode_search.wavelength".into(),
            reason: e.to_string(),
        },
        WgmError::Io(e) => CliError::Io(e.to_string()),
        WgmError::Csv(e) => CliError::Io(e.to_string()),
        other => CliError::Numerical(other.to_string()),
    }
}

fn from_coupling(e: CouplingError) -> CliError {
    match e {
        CouplingError::InvalidArgument { field, reason } => CliError::Invalid {
            field: field.to_string(),
            reason,
        },
        CouplingError::Wgm(e) => from_wgm(e),
        other => CliError::Numerical(other.to_string()),
    }
}

fn from_dynamics(e: DynamicsError) -> CliError {
    match e {
        DynamicsError::InvalidStep(_) => CliError::Invalid {
            field: "simulation.dt".into(),
            reason: e.to_string(),
        },
        DynamicsError::NoSteps => CliError::Invalid {
            field: "simulation.n_steps".into(),
            reason: e.to_string(),
        },
        DynamicsError::NoSampling => CliError::Invalid {
            field: "simulation.sample_every".into(),
            reason: e.to_string(),
        },
        DynamicsError::Output(msg) => CliError::Io(msg),
        other => CliError::Numerical(other.to_string()),
    }
}

fn io(e: impl std::fmt::Display) -> CliError {
    CliError::Io(e.to_string())
}

struct Show {
    natural: bool,
}

impl Show {
    fn hz(&self, f: f64) -> String {
        if self.natural {
            format!("{:.6e} 1/m", f / SPEED_OF_LIGHT)
        } else {
            format!("{f:.6e} Hz")
        }
    }

    fn inertia(&self, i: f64) -> String {
        if self.natural {
            format!("{:.6e} m", i * SPEED_OF_LIGHT / HBAR)
        } else {
            format!("{i:.6e} kg m^2")
        }
    }
}

pub fn run(
    command: Command,
    config: &RunConfig,
    out: &Path,
    opts: Options,
) -> Result<Report, CliError> {
    fs::create_dir_all(out)
        .map_err(|e| CliError::Io(format!("cannot create {}: {e}", out.display())))?;
    let echo = format!(
        "# {} {}\n{}",
        env!("CARGO_PKG_NAME"),
        env!("CARGO_PKG_VERSION"),
        config.to_canonical()
    );
    fs::write(out.join("run.toml"), echo).map_err(io)?;
    let mut report = Report::default();
    let show = Show {
        natural: opts.natural_units,
    };
    match command {
        Command::Modes => modes(config, out, opts, &mut report)?,
        Command::Lambda => lambda(config, out, opts, &show, &mut report)?,
        Command::Estimate => estimate(config, out, opts, &show, &mut report)?,
        Command::Simulate => run_simulation(config, out, opts, &show, &mut report)?,
    }
    Ok(report)
}

fn search(
    config: &RunConfig,
    params: &SphereParams,
    opts: Options,
    report: &mut Report,
) -> Result<Vec<ModeRecord>, CliError> {
    let ms = &config.mode_search;
    let found = search_resonances(
        ms.polarization,
        ms.l,
        config.k_window(),
        params,
        &SearchOptions::default(),
    )
    .map_err(from_wgm)?;
    if opts.verbose {
        let count =
            |f: fn(&SeedOutcome) -> bool| found.seeds.iter().filter(|s| f(&s.outcome)).count();
        let _ = writeln!(
            report.log,
            "search {} l={}: {} seeds, {} accepted, {} duplicate, {} rejected, {} not converged, {} failed",
            ms.polarization,
            ms.l,
            found.seeds.len(),
            count(|o| matches!(o, SeedOutcome::Accepted { .. })),
            count(|o| matches!(o, SeedOutcome::Duplicate { .. })),
            count(|o| matches!(o, SeedOutcome::Rejected { .. })),
            count(|o| matches!(o, SeedOutcome::NotConverged { .. })),
            count(|o| matches!(o, SeedOutcome::Failed { .. })),
        );
    }
    Ok(found.modes)
}

fn modes(
    config: &RunConfig,
    out: &Path,
    opts: Options,
    report: &mut Report,
) -> Result<(), CliError> {
    let params = config.sphere_params()?;
    let found = search(config, &params, opts, report)?;
    if config.wants(Format::Csv) {
        let file = File::create(out.join("modes.csv")).map_err(io)?;
        write_mode_csv(&found, BufWriter::new(file)).map_err(from_wgm)?;
    }
    if config.wants(Format::Json) {
        fs::write(out.join("modes.json"), mode_table_json(&found) + "\n").map_err(io)?;
    }
    if found.is_empty() {
        report.empty = true;
        let _ = writeln!(report.stdout, "{NO_RESONANCE}");
    }
    for m in &found {
        let _ = writeln!(
            report.stdout,
            "{} l={} k0={:.10e} lambda_vac={:.6e} kappa_c={:.6e} Q={:.6e}",
            m.polarization,
            m.l,
            m.k0,
            m.lambda_vac(),
            m.kappa_c,
            m.q
        );
    }
    Ok(())
}

/// Λ for the configured mode: the highest-Q resonance in the window, or
/// zero without a search when the sphere is index matched.
pub fn coupling_for(
    config: &RunConfig,
    opts: Options,
    report: &mut Report,
) -> Result<Option<CouplingConstants>, CliError> {
    let params = config.sphere_params()?;
    if params.n == 1.0 {
        let mut c = CouplingConstants::new(0.0, params.inertia, HBAR);
        c.l = config.mode_search.l;
        if opts.verbose {
            let _ = writeln!(
                report.log,
                "n = 1: no confinement, Lambda = 0 without a mode search"
            );
        }
        return Ok(Some(c));
    }
    let found = search(config, &params, opts, report)?;
    let Some(best) = found.into_iter().max_by(|a, b| a.q.total_cmp(&b.q)) else {
        return Ok(None);
    };
    let mut c = compute_lambda(&best, &params).map_err(from_coupling)?;
    c.hbar = HBAR;
    if opts.verbose {
        let _ = writeln!(
            report.log,
            "quadrature error estimate {:.3e}",
            c.quadrature_error
        );
    }
    Ok(Some(c))
}

fn no_resonance(report: &mut Report) {
    report.empty = true;
    let _ = writeln!(report.stdout, "{NO_RESONANCE}");
}

fn lambda(
    config: &RunConfig,
    out: &Path,
    opts: Options,
    show: &Show,
    report: &mut Report,
) -> Result<(), CliError> {
    let Some(c) = coupling_for(config, opts, report)? else {
        no_resonance(report);
        return Ok(());
    };
    fs::write(out.join("coupling.json"), c.to_json() + "\n").map_err(io)?;
    let _ = writeln!(report.stdout, "Lambda = {}", c.lambda);
    let _ = writeln!(report.stdout, "I = {}", show.inertia(c.inertia));
    match &c.mode {
        Some(m) => {
            let _ = writeln!(report.stdout, "Q = {:.6e}", m.q);
        }
        None => {
            let _ = writeln!(report.stdout, "Q = none (no resonance)");
        }
    }
    Ok(())
}

#[derive(Serialize)]
struct Threshold {
    m: i32,
    /// ω_z in rad/s
    omega_z: Option<f64>,
    spin_hz: Option<f64>,
}

#[derive(Serialize)]
struct EstimateReport {
    lambda: f64,
    #[serde(rename = "N")]
    photons: f64,
    l: u32,
    precession_hz_exact: f64,
    precession_hz_simplified: f64,
    #[serde(rename = "Q")]
    q: f64,
    thresholds: Vec<Threshold>,
}

fn estimate(
    config: &RunConfig,
    out: &Path,
    opts: Options,
    show: &Show,
    report: &mut Report,
) -> Result<(), CliError> {
    let Some(c) = coupling_for(config, opts, report)? else {
        no_resonance(report);
        return Ok(());
    };
    let params = config.sphere_params()?;
    let cs = &config.coupling;
    let l = config.mode_search.l;
    let rate = precession_rate_estimate(&params, cs.photons, l, c.lambda, Units::SI)
        .map_err(from_coupling)?;
    let mut thresholds = Vec::new();
    for m in config.m_values() {
        let omega_z = match &c.mode {
            Some(mode) if c.lambda > 0.0 => Some(
                resolvability_threshold(c.lambda, m, cs.q, mode.k0, Units::SI)
                    .map_err(from_coupling)?,
            ),
            _ => None,
        };
        thresholds.push(Threshold {
            m,
            omega_z,
            spin_hz: omega_z.map(|w| w / (2.0 * std::f64::consts::PI)),
        });
    }
    let _ = writeln!(report.stdout, "Lambda = {}", c.lambda);
    let _ = writeln!(
        report.stdout,
        "precession (exact) = {}",
        show.hz(rate.exact_hz)
    );
    let _ = writeln!(
        report.stdout,
        "precession (simplified) = {}",
        show.hz(rate.simplified_hz)
    );
    let _ = writeln!(
        report.stdout,
        "spin rate resolving the m-splitting at Q = {:.3e}:",
        cs.q
    );
    for t in &thresholds {
        match t.spin_hz {
            Some(f) => {
                let _ = writeln!(report.stdout, "  m = {:>4}: {}", t.m, show.hz(f));
            }
            None => {
                let _ = writeln!(report.stdout, "  m = {:>4}: none (no coupling)", t.m);
            }
        }
    }
    let doc = EstimateReport {
        lambda: c.lambda,
        photons: cs.photons,
        l,
        precession_hz_exact: rate.exact_hz,
        precession_hz_simplified: rate.simplified_hz,
        q: cs.q,
        thresholds,
    };
    let json = serde_json::to_string_pretty(&doc).map_err(io)?;
    fs::write(out.join("estimate.json"), json + "\n").map_err(io)?;
    Ok(())
}

fn run_simulation(
    config: &RunConfig,
    out: &Path,
    opts: Options,
    show: &Show,
    report: &mut Report,
) -> Result<(), CliError> {
    let sim = config.simulation()?.clone();
    let Some(c) = coupling_for(config, opts, report)? else {
        no_resonance(report);
        return Ok(());
    };
    let s = config.optical_momentum()?;
    let start = SpinState::new(config.initial_omega()?, s.s);
    let traj =
        simulate(&start, &c, sim.dt, sim.n_steps, sim.sample_every).map_err(from_dynamics)?;
    let summary = traj.summary(&c);
    if config.wants(Format::Csv) {
        let file = File::create(out.join("trajectory.csv")).map_err(io)?;
        write_trajectory_csv(&traj, &c, BufWriter::new(file)).map_err(from_dynamics)?;
    }
    if config.wants(Format::Json) {
        let json = serde_json::to_string_pretty(&summary).map_err(io)?;
        fs::write(out.join("summary.json"), json + "\n").map_err(io)?;
    }
    let _ = writeln!(report.stdout, "Lambda = {}", c.lambda);
    let _ = writeln!(report.stdout, "samples = {}", traj.samples.len());
    let _ = writeln!(
        report.stdout,
        "precession predicted = {}",
        show.hz(summary.precession_hz_predicted)
    );
    match summary.precession_hz_measured {
        Some(f) => {
            let _ = writeln!(report.stdout, "precession measured = {}", show.hz(f));
        }
        None => {
            let _ = writeln!(
                report.stdout,
                "precession measured = undefined (S has no component normal to K)"
            );
        }
    }
    let _ = writeln!(
        report.stdout,
        "drift |S| {:.3e}, |omega| {:.3e}, K {:.3e}, H_r {:.3e}",
        summary.drift_abs_s, summary.drift_abs_omega, summary.drift_k, summary.drift_hr
    );
    Ok(())
}
