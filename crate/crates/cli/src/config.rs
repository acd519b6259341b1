use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use nalgebra::Vector3;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use wgm_rotor::coupling::{optical_s_from_amplitudes, OpticalAngularMomentum};
use wgm_rotor::wgm::{Polarization, SphereParams, DEFAULT_DENSITY};

use crate::CliError;

/// A complete run description as read from a config file.
///
/// Serializing with [`RunConfig::to_canonical`] always yields the same bytes
/// for the same values, in field declaration order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub sphere: SphereSection,
    pub mode_search: ModeSearchSection,
    #[serde(default)]
    pub coupling: CouplingSection,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub simulation: Option<SimulationSection>,
    #[serde(default)]
    pub output: OutputSection,
    /// Dotted field paths mapped to the values to run them at.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub sweep: BTreeMap<String, Vec<toml::Value>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SphereSection {
    #[serde(rename = "R")]
    pub radius: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    #[serde(default = "default_rho")]
    pub rho: f64,
    /// Moment of inertia; a uniform ball of density rho when absent.
    #[serde(rename = "I", default, skip_serializing_if = "Option::is_none")]
    pub inertia: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModeSearchSection {
    pub polarization: Polarization,
    pub l: u32,
    /// Vacuum wavelength window [min, max] in metres.
    pub wavelength: [f64; 2],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CouplingSection {
    #[serde(rename = "N", default = "default_photons")]
    pub photons: f64,
    /// Relative amplitudes of the azimuthal modes, rescaled to N photons.
    /// All photons go into m = l when empty.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub amplitudes: Vec<Amplitude>,
    /// Optical quality factor used for the rotational line splitting.
    #[serde(rename = "Q", default = "default_q")]
    pub q: f64,
    /// Azimuthal numbers for the threshold table; 1, 10 and l when empty.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub m: Vec<i32>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Amplitude {
    pub m: i32,
    pub re: f64,
    #[serde(default)]
    pub im: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulationSection {
    /// Time step in seconds.
    pub dt: f64,
    pub n_steps: u64,
    #[serde(default = "default_sample_every")]
    pub sample_every: u64,
    /// Initial angular velocity in rad/s.
    pub omega: [f64; 3],
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    #[serde(default = "default_directory")]
    pub directory: PathBuf,
    #[serde(default = "default_formats")]
    pub formats: Vec<Format>,
}

fn default_rho() -> f64 {
    DEFAULT_DENSITY
}

fn default_photons() -> f64 {
    1e5
}

fn default_q() -> f64 {
    1e10
}

fn default_sample_every() -> u64 {
    1
}

fn default_directory() -> PathBuf {
    PathBuf::from("out")
}

fn default_formats() -> Vec<Format> {
    vec![Format::Csv, Format::Json]
}

impl Default for CouplingSection {
    fn default() -> Self {
        CouplingSection {
            photons: default_photons(),
            amplitudes: Vec::new(),
            q: default_q(),
            m: Vec::new(),
        }
    }
}

impl Default for OutputSection {
    fn default() -> Self {
        OutputSection {
            directory: default_directory(),
            formats: default_formats(),
        }
    }
}

fn invalid(field: &str, reason: impl Into<String>) -> CliError {
    CliError::Invalid {
        field: field.to_string(),
        reason: reason.into(),
    }
}

fn positive(field: &str, v: f64) -> Result<(), CliError> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(invalid(
            field,
            format!("must be positive and finite, got {v}"),
        ))
    }
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<RunConfig, CliError> {
        let config: RunConfig = toml::from_str(text).map_err(|e| CliError::Parse(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<RunConfig, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Parse(format!("cannot read {}: {e}", path.display())))?;
        RunConfig::parse(&text)
    }

    pub fn to_canonical(&self) -> String {
        toml::to_string(self).expect("config values are always representable")
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let s = &self.sphere;
        positive("sphere.R", s.radius)?;
        match (s.n, s.epsilon) {
            (Some(_), Some(_)) => {
                return Err(invalid(
                    "sphere.epsilon",
                    "give either sphere.n or sphere.epsilon, not both",
                ))
            }
            (None, None) => {
                return Err(invalid(
                    "sphere.n",
                    "one of sphere.n or sphere.epsilon is required",
                ))
            }
            (Some(n), None) if !(n.is_finite() && n >= 1.0) => {
                return Err(invalid("sphere.n", format!("must be at least 1, got {n}")))
            }
            (None, Some(e)) if !(e.is_finite() && e >= 1.0) => {
                return Err(invalid(
                    "sphere.epsilon",
                    format!("must be at least 1, got {e}"),
                ))
            }
            _ => {}
        }
        positive("sphere.rho", s.rho)?;
        if let Some(i) = s.inertia {
            positive("sphere.I", i)?;
        }

        let m = &self.mode_search;
        if m.l == 0 {
            return Err(invalid("mode_search.l", "must be at least 1"));
        }
        let [lo, hi] = m.wavelength;
        if !(lo.is_finite() && hi.is_finite() && lo > 0.0 && lo < hi) {
            return Err(invalid(
                "mode_search.wavelength",
                format!("need 0 < min < max, got [{lo}, {hi}]"),
            ));
        }

        let c = &self.coupling;
        if !(c.photons.is_finite() && c.photons >= 0.0) {
            return Err(invalid(
                "coupling.N",
                format!("must be non-negative, got {}", c.photons),
            ));
        }
        positive("coupling.Q", c.q)?;
        let l = m.l as i32;
        if let Some(bad) = c.m.iter().find(|&&v| v == 0 || v.abs() > l) {
            return Err(invalid(
                "coupling.m",
                format!("entries must satisfy 0 < |m| <= l = {l}, got {bad}"),
            ));
        }
        let mut seen = Vec::new();
        for a in &c.amplitudes {
            if a.m.abs() > l {
                return Err(invalid(
                    "coupling.amplitudes",
                    format!("m = {} outside -{l}..{l}", a.m),
                ));
            }
            if seen.contains(&a.m) {
                return Err(invalid(
                    "coupling.amplitudes",
                    format!("m = {} listed twice", a.m),
                ));
            }
            if !(a.re.is_finite() && a.im.is_finite()) {
                return Err(invalid(
                    "coupling.amplitudes",
                    format!("amplitude for m = {} is not finite", a.m),
                ));
            }
            seen.push(a.m);
        }
        if !c.amplitudes.is_empty() && c.amplitudes.iter().all(|a| a.re == 0.0 && a.im == 0.0) {
            return Err(invalid(
                "coupling.amplitudes",
                "at least one amplitude must be nonzero",
            ));
        }

        if let Some(sim) = &self.simulation {
            positive("simulation.dt", sim.dt)?;
            if sim.n_steps == 0 {
                return Err(invalid("simulation.n_steps", "must be at least 1"));
            }
            if sim.sample_every == 0 {
                return Err(invalid("simulation.sample_every", "must be at least 1"));
            }
            if sim.omega.iter().any(|w| !w.is_finite()) {
                return Err(invalid("simulation.omega", "components must be finite"));
            }
        }

        if self.output.formats.is_empty() {
            return Err(invalid(
                "output.formats",
                "list at least one of \"csv\", \"json\"",
            ));
        }
        for (key, values) in &self.sweep {
            if values.is_empty() {
                return Err(invalid(&format!("sweep.{key}"), "needs at least one value"));
            }
        }
        Ok(())
    }

    pub fn sphere_params(&self) -> Result<SphereParams, CliError> {
        let s = &self.sphere;
        let built = match (s.n, s.epsilon) {
            (Some(n), _) => SphereParams::new(s.radius, n, s.rho),
            (None, Some(e)) => SphereParams::from_permittivity(s.radius, e, s.rho),
            (None, None) => {
                return Err(invalid(
                    "sphere.n",
                    "one of sphere.n or sphere.epsilon is required",
                ))
            }
        };
        let params = built.map_err(|e| invalid("sphere", e.to_string()))?;
        match s.inertia {
            Some(i) => params
                .with_inertia(i)
                .map_err(|e| invalid("sphere.I", e.to_string())),
            None => Ok(params),
        }
    }

    /// Search window as wavenumbers, ascending.
    pub fn k_window(&self) -> (f64, f64) {
        let [lo, hi] = self.mode_search.wavelength;
        let tau = 2.0 * std::f64::consts::PI;
        (tau / hi, tau / lo)
    }

    /// Optical angular momentum of N photons distributed per `amplitudes`.
    pub fn optical_momentum(&self) -> Result<OpticalAngularMomentum, CliError> {
        let l = self.mode_search.l;
        let c = &self.coupling;
        let mut alpha = vec![Complex64::new(0.0, 0.0); 2 * l as usize + 1];
        if c.amplitudes.is_empty() {
            alpha[2 * l as usize] = Complex64::new(1.0, 0.0);
        } else {
            for a in &c.amplitudes {
                alpha[(a.m + l as i32) as usize] = Complex64::new(a.re, a.im);
            }
        }
        let norm = alpha.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        let scale = c.photons.sqrt() / norm;
        for a in &mut alpha {
            *a *= scale;
        }
        optical_s_from_amplitudes(l, &alpha)
            .map_err(|e| invalid("coupling.amplitudes", e.to_string()))
    }

    pub fn simulation(&self) -> Result<&SimulationSection, CliError> {
        self.simulation
            .as_ref()
            .ok_or_else(|| invalid("simulation", "section is required for this command"))
    }

    pub fn initial_omega(&self) -> Result<Vector3<f64>, CliError> {
        Ok(Vector3::from(self.simulation()?.omega))
    }

    pub fn m_values(&self) -> Vec<i32> {
        if !self.coupling.m.is_empty() {
            return self.coupling.m.clone();
        }
        let l = self.mode_search.l as i32;
        let mut ms: Vec<i32> = [1, 10, l].into_iter().filter(|&m| m <= l).collect();
        ms.dedup();
        ms
    }

    pub fn wants(&self, format: Format) -> bool {
        self.output.formats.contains(&format)
    }
}
