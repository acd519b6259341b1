use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::characteristic::boundary;
use super::profile::{default_grid, radial_profile, DEFAULT_POINTS_PER_WAVELENGTH};
use super::{ModeRecord, Polarization, Result, SphereParams, WgmError};
use crate::specfun::cdiv;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SearchOptions {
    /// Number of real-axis samples used to seed Newton.
    pub scan_points: usize,
    pub max_iterations: usize,
    /// Bound on |D| / (|s ψ'(nx) ξ(x)| + |ψ(nx) ξ'(x)|) at an accepted pole.
    pub tolerance: f64,
    /// Largest accepted kappa_c / k0.
    pub max_relative_width: f64,
    /// Density of the tabulated profile attached to each mode.
    pub points_per_wavelength: usize,
}

impl Default for SearchOptions {
    fn default() -> Self {
        Self {
            scan_points: 4000,
            max_iterations: 100,
            tolerance: 1e-10,
            max_relative_width: 0.5,
            points_per_wavelength: DEFAULT_POINTS_PER_WAVELENGTH,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum SeedOutcome {
    Accepted {
        k0: f64,
        kappa_c: f64,
        iterations: usize,
    },
    Duplicate {
        k0: f64,
    },
    Rejected {
        k: Complex64,
        reason: String,
    },
    NotConverged {
        iterations: usize,
        residual: f64,
    },
    Failed {
        message: String,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeedDiagnostic {
    pub seed_k: f64,
    pub outcome: SeedOutcome,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchReport {
    pub modes: Vec<ModeRecord>,
    pub seeds: Vec<SeedDiagnostic>,
}

/// All resonances with k0 inside `window` (1/m), sorted by k0.
pub fn find_resonance(
    pol: Polarization,
    l: u32,
    window: (f64, f64),
    params: &SphereParams,
) -> Result<Vec<ModeRecord>> {
    Ok(search_resonances(pol, l, window, params, &SearchOptions::default())?.modes)
}

enum Newton {
    Converged { x: Complex64, iterations: usize },
    Stalled { iterations: usize, residual: f64 },
    Failed(String),
}

fn newton(
    pol: Polarization,
    l: u32,
    seed: f64,
    n: f64,
    opts: &SearchOptions,
    limit: f64,
) -> Newton {
    let eps = f64::EPSILON;
    let mut x = Complex64::new(seed, 0.0);
    let mut residual = f64::INFINITY;
    for it in 1..=opts.max_iterations {
        let b = match boundary(pol, l, x, n) {
            Ok(b) => b,
            Err(e) => return Newton::Failed(e.to_string()),
        };
        residual = b.d.norm() / b.scale;
        if b.d1.norm() == 0.0 || !b.d1.norm().is_finite() {
            return Newton::Failed(format!("derivative vanishes at x = {x}"));
        }
        let step = cdiv(b.d, b.d1);
        let next = x - step;
        if !(next.re.is_finite() && next.im.is_finite()) || next.re <= 0.0 || next.norm() > limit {
            return Newton::Failed(format!("iterate left the search region at x = {next}"));
        }
        x = next;
        let re_done = step.re.abs() <= 8.0 * eps * x.norm();
        let im_done = step.im.abs() <= (1e-9 * x.im.abs()).max(eps * eps * x.norm());
        if re_done && im_done {
            let b = match boundary(pol, l, x, n) {
                Ok(b) => b,
                Err(e) => return Newton::Failed(e.to_string()),
            };
            residual = b.d.norm() / b.scale;
            if residual <= opts.tolerance {
                return Newton::Converged { x, iterations: it };
            }
        }
    }
    if residual <= opts.tolerance {
        return Newton::Converged {
            x,
            iterations: opts.max_iterations,
        };
    }
    Newton::Stalled {
        iterations: opts.max_iterations,
        residual,
    }
}

fn real_axis_seeds(
    pol: Polarization,
    l: u32,
    lo: f64,
    hi: f64,
    n: f64,
    count: usize,
) -> Result<Vec<f64>> {
    let count = count.max(3);
    let h = (hi - lo) / (count - 1) as f64;
    let mut xs = Vec::with_capacity(count);
    let mut rs = Vec::with_capacity(count);
    for i in 0..count {
        let x = if i + 1 == count {
            hi
        } else {
            lo + i as f64 * h
        };
        let b = boundary(pol, l, Complex64::new(x, 0.0), n)?;
        xs.push(x);
        rs.push(if b.scale > 0.0 {
            b.d.norm() / b.scale
        } else {
            f64::INFINITY
        });
    }
    let mut seeds = Vec::new();
    for i in 0..count {
        let left = if i == 0 { f64::INFINITY } else { rs[i - 1] };
        let right = if i + 1 == count {
            f64::INFINITY
        } else {
            rs[i + 1]
        };
        if rs[i] < left && rs[i] <= right {
            seeds.push(xs[i]);
        }
    }
    Ok(seeds)
}

/// Resonance search with per-seed diagnostics.
///
/// Seeds are local minima of the normalized residual along real k; each is
/// refined by complex Newton iteration. Poles are kept when k0 lies in the
/// window, the line width is positive and kappa_c / k0 is below
/// `max_relative_width`.
pub fn search_resonances(
    pol: Polarization,
    l: u32,
    window: (f64, f64),
    params: &SphereParams,
    opts: &SearchOptions,
) -> Result<SearchReport> {
    params.validate()?;
    let (lo, hi) = window;
    if !(lo.is_finite() && hi.is_finite() && lo > 0.0 && hi > lo) {
        return Err(WgmError::InvalidWindow { lo, hi });
    }
    if l == 0 {
        return Err(WgmError::InvalidParameter {
            field: "l",
            reason: "must be at least 1".into(),
        });
    }
    let radius = params.radius;
    let n = params.n;
    let (x_lo, x_hi) = (lo * radius, hi * radius);

    let mut poles: Vec<(Complex64, usize)> = Vec::new();
    let mut seeds = Vec::new();
    for seed in real_axis_seeds(pol, l, x_lo, x_hi, n, opts.scan_points)? {
        let outcome = match newton(pol, l, seed, n, opts, 10.0 * x_hi) {
            Newton::Failed(message) => SeedOutcome::Failed { message },
            Newton::Stalled {
                iterations,
                residual,
            } => SeedOutcome::NotConverged {
                iterations,
                residual,
            },
            Newton::Converged { x, iterations } => {
                let k = x / radius;
                let kappa_c = -2.0 * k.im;
                if !(x.re >= x_lo && x.re <= x_hi) {
                    SeedOutcome::Rejected {
                        k,
                        reason: "outside window".into(),
                    }
                } else if kappa_c.is_nan() || kappa_c <= 0.0 {
                    SeedOutcome::Rejected {
                        k,
                        reason: "not a decaying mode".into(),
                    }
                } else if kappa_c / k.re >= opts.max_relative_width {
                    SeedOutcome::Rejected {
                        k,
                        reason: "line too broad".into(),
                    }
                } else if poles.iter().any(|(p, _)| (p - x).norm() <= 1e-8 * x.norm()) {
                    SeedOutcome::Duplicate { k0: k.re }
                } else {
                    poles.push((x, iterations));
                    SeedOutcome::Accepted {
                        k0: k.re,
                        kappa_c,
                        iterations,
                    }
                }
            }
        };
        seeds.push(SeedDiagnostic {
            seed_k: seed / radius,
            outcome,
        });
    }

    poles.sort_by(|a, b| a.0.re.total_cmp(&b.0.re));
    let mut modes = Vec::with_capacity(poles.len());
    for (x, _) in poles {
        let k0 = x.re / radius;
        let kappa_c = -2.0 * x.im / radius;
        let mut mode = ModeRecord {
            polarization: pol,
            l,
            k0,
            kappa_c,
            q: k0 / kappa_c,
            radial_profile: Default::default(),
        };
        let grid = default_grid(k0, params, opts.points_per_wavelength);
        mode.radial_profile = radial_profile(&mode, params, &grid)?;
        modes.push(mode);
    }
    Ok(SearchReport { modes, seeds })
}

/// Resonance of polarization `pol` in `window` closest to `k0`, if any.
pub fn nearest_pole(
    pol: Polarization,
    l: u32,
    k0: f64,
    window: (f64, f64),
    params: &SphereParams,
) -> Result<Option<ModeRecord>> {
    let modes = find_resonance(pol, l, window, params)?;
    Ok(modes
        .into_iter()
        .min_by(|a, b| (a.k0 - k0).abs().total_cmp(&(b.k0 - k0).abs())))
}
