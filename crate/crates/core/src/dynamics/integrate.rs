use nalgebra::{UnitQuaternion, Vector3};

use super::{DynamicsError, Result, SpinState};
use crate::coupling::CouplingConstants;

fn check_step(dt: f64) -> Result<()> {
    if dt.is_finite() && dt > 0.0 {
        Ok(())
    } else {
        Err(DynamicsError::InvalidStep(dt))
    }
}

/// K = Iω - (Λ - 1) ħ S, the fixed axis of the coupled precession.
///
/// The two terms can nearly cancel, so each component is summed with
/// exact products and an exact sum and rounded once.
pub(crate) fn precession_axis(state: &SpinState, c: &CouplingConstants) -> Vector3<f64> {
    let weight = -(c.lambda - 1.0) * c.hbar;
    Vector3::from_fn(|i, _| {
        let (p, dp) = exact_product(state.omega[i], c.inertia);
        let (q, dq) = exact_product(state.s[i], weight);
        let sum = p + q;
        let back = sum - p;
        let ds = (p - (sum - back)) + (q - back);
        sum + (ds + (dp + dq))
    })
}

fn exact_product(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

/// One step of Ṡ = Λ ω × S, I ω̇ = Λ(Λ - 1) ħ ω × S.
///
/// Both vectors rotate rigidly about the conserved K at the rate Λ|K|/I,
/// so the step is the exact flow up to rounding for any dt. The body
/// orientation follows ω(t) = R(t) ω(0) exactly as well.
pub fn step_wgm(state: &SpinState, dt: f64, c: &CouplingConstants) -> Result<SpinState> {
    check_step(dt)?;
    let flow = RigidPrecession::new(state, c);
    let (omega, s) = flow.step(flow.rate * dt, state.omega.norm(), state.s.norm());
    Ok(SpinState {
        omega,
        s,
        orientation: advance_orientation(&state.orientation, &state.omega, &flow.spin, dt),
        t: state.t + dt,
    })
}

/// Rigid precession of ω and S about a fixed K, evaluated at any phase.
///
/// Rotations about one axis compose by adding angles, so n steps of
/// [`step_wgm`] equal a single turn by n times the step angle. Evaluating
/// that turn from the initial split into axial and normal parts keeps the
/// rounding error of every sample at a few ulps however many steps precede
/// it.
pub(crate) struct RigidPrecession {
    omega: Split,
    s: Split,
    /// Λ|K|/I in rad per unit time.
    pub rate: f64,
    /// Λ K / I, the angular velocity of the turn.
    pub spin: Vector3<f64>,
}

struct Split {
    start: Vector3<f64>,
    /// â × (â × v), minus the part of v normal to the axis.
    inward: Vector3<f64>,
    /// â × v
    cross: Vector3<f64>,
}

impl Split {
    // built from cross products with the unnormalized K, so K itself has no
    // normal part to turn and no projection cancels against the axial part
    fn new(v: &Vector3<f64>, k: &Vector3<f64>) -> Split {
        let k2 = k.norm_squared();
        let u = k.cross(v);
        if k2 == 0.0 || u.norm() <= 4.0 * f64::EPSILON * k2.sqrt() * v.norm() {
            return Split {
                start: *v,
                inward: Vector3::zeros(),
                cross: Vector3::zeros(),
            };
        }
        Split {
            start: *v,
            inward: k.cross(&u) / k2,
            cross: u / k2.sqrt(),
        }
    }

    // v + (1 - cos φ) â × (â × v) + sin φ â × v; a vector along the axis stays bit-exact
    fn at(&self, versine: f64, sin: f64) -> Vector3<f64> {
        self.start + self.inward * versine + self.cross * sin
    }

    /// `at`, brought back to norm `target` by rescaling only the turning part.
    ///
    /// The turn is orthogonal only to rounding, and with a fixed step angle
    /// that rounding has the same sign every step. Rescaling the whole
    /// vector would push the same error into the axial part, and so into K,
    /// every step; the turning part's error instead turns with it.
    fn at_norm(&self, versine: f64, sin: f64, target: f64) -> Vector3<f64> {
        let mut v = self.at(versine, sin);
        let turned = self.cross * sin - self.inward * (1.0 - versine);
        let n2 = turned.norm_squared();
        let now = v.norm();
        if n2 > 0.01 * now * now {
            v -= turned * ((now - target) * now / n2);
        }
        nudge_to_norm(v, target)
    }
}

impl RigidPrecession {
    pub fn new(state: &SpinState, c: &CouplingConstants) -> RigidPrecession {
        let k = precession_axis(state, c);
        let spin = k * (c.lambda / c.inertia);
        RigidPrecession {
            omega: Split::new(&state.omega, &k),
            s: Split::new(&state.s, &k),
            rate: spin.norm(),
            spin,
        }
    }

    /// ω and S after turning by `phase` radians.
    pub fn at(&self, phase: f64) -> (Vector3<f64>, Vector3<f64>) {
        let (versine, sin) = turn(phase);
        (self.omega.at(versine, sin), self.s.at(versine, sin))
    }

    /// As [`at`](Self::at), holding the norms of ω and S at the given values.
    pub fn step(&self, phase: f64, omega_norm: f64, s_norm: f64) -> (Vector3<f64>, Vector3<f64>) {
        let (versine, sin) = turn(phase);
        (
            self.omega.at_norm(versine, sin, omega_norm),
            self.s.at_norm(versine, sin, s_norm),
        )
    }
}

fn turn(phase: f64) -> (f64, f64) {
    let half = (0.5 * phase).sin();
    (2.0 * half * half, phase.sin())
}

/// Orientation after dt given ω at the start of the step and the turn rate.
pub(crate) fn advance_orientation(
    orientation: &UnitQuaternion<f64>,
    omega: &Vector3<f64>,
    spin: &Vector3<f64>,
    dt: f64,
) -> UnitQuaternion<f64> {
    let turn = UnitQuaternion::from_scaled_axis(spin * dt);
    let body = UnitQuaternion::from_scaled_axis((omega - spin) * dt);
    let mut q = turn * body * orientation;
    q.renormalize();
    q
}

// a plain rescale lands up to an ulp off in a biased direction; a few ulp
// nudges usually hit the target norm exactly and otherwise keep the closest
pub(crate) fn with_norm(mut v: Vector3<f64>, target: f64) -> Vector3<f64> {
    for _ in 0..3 {
        let now = v.norm();
        if now == 0.0 || now == target {
            return v;
        }
        v *= target / now;
    }
    nudge_to_norm(v, target)
}

fn nudge_to_norm(v: Vector3<f64>, target: f64) -> Vector3<f64> {
    let mut best = v;
    let mut best_err = (v.norm() - target).abs();
    for _ in 0..16 {
        if best_err == 0.0 {
            break;
        }
        let mut improved = false;
        for i in 0..3 {
            for up in [true, false] {
                let mut w = best;
                w[i] = if up { w[i].next_up() } else { w[i].next_down() };
                let e = (w.norm() - target).abs();
                if e < best_err {
                    best = w;
                    best_err = e;
                    improved = true;
                }
            }
        }
        if !improved {
            break;
        }
    }
    best
}

/// Field angular momentum Γ(t) and its time derivative.
pub trait GammaProvider {
    fn gamma(&self, t: f64) -> std::result::Result<(Vector3<f64>, Vector3<f64>), String>;

    /// True when dΓ/dt vanishes for all t.
    fn is_static(&self) -> bool {
        false
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConstantGamma(pub Vector3<f64>);

impl GammaProvider for ConstantGamma {
    fn gamma(&self, _t: f64) -> std::result::Result<(Vector3<f64>, Vector3<f64>), String> {
        Ok((self.0, Vector3::zeros()))
    }

    fn is_static(&self) -> bool {
        true
    }
}

/// Γ(t) = Γ0 + t Γ̇.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearGamma {
    pub gamma0: Vector3<f64>,
    pub rate: Vector3<f64>,
}

impl GammaProvider for LinearGamma {
    fn gamma(&self, t: f64) -> std::result::Result<(Vector3<f64>, Vector3<f64>), String> {
        Ok((self.gamma0 + self.rate * t, self.rate))
    }
}

/// Classic RK4 step of I ω̇ = -ω × Γ + dΓ/dt. S is left untouched.
///
/// With a static provider |ω| is restored after the step, since the
/// remaining term only turns ω about Γ.
pub fn step_general<P: GammaProvider + ?Sized>(
    state: &SpinState,
    dt: f64,
    provider: &P,
    inertia: f64,
) -> Result<SpinState> {
    check_step(dt)?;
    let rhs = |t: f64, w: &Vector3<f64>| -> Result<Vector3<f64>> {
        let (g, dg) = provider
            .gamma(t)
            .map_err(|message| DynamicsError::Provider { t, message })?;
        Ok((dg - w.cross(&g)) / inertia)
    };
    let t = state.t;
    let w = state.omega;
    let k1 = rhs(t, &w)?;
    let k2 = rhs(t + 0.5 * dt, &(w + k1 * (0.5 * dt)))?;
    let k3 = rhs(t + 0.5 * dt, &(w + k2 * (0.5 * dt)))?;
    let k4 = rhs(t + dt, &(w + k3 * dt))?;
    let mut next = w + (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (dt / 6.0);
    if provider.is_static() {
        next = with_norm(next, w.norm());
    }
    let mut orientation =
        UnitQuaternion::from_scaled_axis((w + next) * (0.5 * dt)) * state.orientation;
    orientation.renormalize();
    Ok(SpinState {
        omega: next,
        s: state.s,
        orientation,
        t: t + dt,
    })
}

/// H_r = Λ(J + ħS)²/2I + (1 - Λ)J²/2I + Λ(Λ - 1)ħ²S²/2I with J = Iω - ΛħS.
///
/// Substituting J, the three terms collapse to (Iω)²/2I, which is what is
/// evaluated: the expanded form cancels to about ε ħ²S²/(Iω)² relative
/// when the optical term dominates.
pub fn rotating_frame_energy(state: &SpinState, c: &CouplingConstants) -> f64 {
    let p = state.omega * c.inertia;
    p.norm_squared() / (2.0 * c.inertia)
}
