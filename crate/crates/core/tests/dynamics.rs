mod common;

use std::f64::consts::PI;

use common::precession::{angle_between, rodrigues};
use nalgebra::{Matrix3, UnitQuaternion, Vector3};
use proptest::prelude::*;
use rand::Rng;
use wgm_rotor::coupling::{precession_rate_estimate, CouplingConstants, Units, HBAR};
use wgm_rotor::dynamics::*;
use wgm_rotor::wgm::{SphereParams, DEFAULT_DENSITY};

const PAPER_LAMBDA: f64 = 1.1238654779962893;

fn paper_inertia() -> f64 {
    SphereParams::from_permittivity(10e-6, 2.31, DEFAULT_DENSITY)
        .unwrap()
        .inertia
}

fn natural(lambda: f64, inertia: f64) -> CouplingConstants {
    CouplingConstants::new(lambda, inertia, 1.0)
}

fn vec3(rng: &mut impl Rng, scale: f64) -> Vector3<f64> {
    Vector3::new(
        rng.gen_range(-1.0..1.0),
        rng.gen_range(-1.0..1.0),
        rng.gen_range(-1.0..1.0),
    ) * scale
}

// --- kinematics ---

fn rotation(a: (f64, f64, f64)) -> Matrix3<f64> {
    let rz = |t: f64| Matrix3::new(t.cos(), -t.sin(), 0.0, t.sin(), t.cos(), 0.0, 0.0, 0.0, 1.0);
    let ry = |t: f64| Matrix3::new(t.cos(), 0.0, t.sin(), 0.0, 1.0, 0.0, -t.sin(), 0.0, t.cos());
    rz(a.0) * ry(a.1) * rz(a.2)
}

#[test]
fn euler_rate_examples() {
    let w = euler_rates_to_omega((0.7, 0.0, -1.1), (2.5, 0.0, 0.0));
    assert!((w - Vector3::new(0.0, 0.0, 2.5)).norm() < 1e-15);
    let w = euler_rates_to_omega((0.0, PI / 2.0, 0.3), (0.0, 1.5, 0.0));
    assert!((w - Vector3::new(0.0, 1.5, 0.0)).norm() < 1e-15);
}

#[test]
fn euler_rates_match_rotation_matrix_derivative() {
    let mut rng = common::rng(23);
    let h = 1e-7;
    for _ in 0..100 {
        let a = (
            rng.gen_range(-PI..PI),
            rng.gen_range(0.1..3.0),
            rng.gen_range(-PI..PI),
        );
        let d = (
            rng.gen_range(-2.0..2.0),
            rng.gen_range(-2.0..2.0),
            rng.gen_range(-2.0..2.0),
        );
        let at = |t: f64| rotation((a.0 + d.0 * t, a.1 + d.1 * t, a.2 + d.2 * t));
        let dr = (at(h) - at(-h)) / (2.0 * h);
        let omega = dr * at(0.0).transpose();
        let skew = (omega - omega.transpose()) * 0.5;
        let fd = Vector3::new(skew[(2, 1)], skew[(0, 2)], skew[(1, 0)]);
        let w = euler_rates_to_omega(a, d);
        assert!((w - fd).norm() <= 1e-6, "{w} vs {fd}");
    }
}

#[test]
fn canonical_j_examples() {
    let j = canonical_j((0.4, 1.1, 0.2), (3.0, 0.0, 0.0)).unwrap();
    assert!((j.z - 3.0).abs() < 1e-15);
    let j = canonical_j((0.0, PI / 2.0, 0.0), (0.0, 0.0, 2.0)).unwrap();
    assert!((j - Vector3::new(2.0, 0.0, 0.0)).norm() < 1e-15);
    assert!(matches!(
        canonical_j((0.0, 0.0, 0.0), (1.0, 1.0, 1.0)),
        Err(DynamicsError::GimbalLock { .. })
    ));
    assert!(canonical_j((0.0, PI, 0.0), (1.0, 1.0, 1.0)).is_err());
}

#[test]
fn canonical_j_is_legendre_conjugate_of_rates() {
    // free rotor L = I|ω|²/2; p_ζ = ∂L/∂ζ̇ by central differences, then J = Iω
    let inertia = 2.7;
    let lagrangian = |a: (f64, f64, f64), r: (f64, f64, f64)| {
        0.5 * inertia * euler_rates_to_omega(a, r).norm_squared()
    };
    let mut rng = common::rng(29);
    let h = 1e-5;
    for _ in 0..100 {
        let a = (
            rng.gen_range(-PI..PI),
            rng.gen_range(0.2..2.9),
            rng.gen_range(-PI..PI),
        );
        let r = (
            rng.gen_range(-3.0..3.0),
            rng.gen_range(-3.0..3.0),
            rng.gen_range(-3.0..3.0),
        );
        let p = (
            (lagrangian(a, (r.0 + h, r.1, r.2)) - lagrangian(a, (r.0 - h, r.1, r.2))) / (2.0 * h),
            (lagrangian(a, (r.0, r.1 + h, r.2)) - lagrangian(a, (r.0, r.1 - h, r.2))) / (2.0 * h),
            (lagrangian(a, (r.0, r.1, r.2 + h)) - lagrangian(a, (r.0, r.1, r.2 - h))) / (2.0 * h),
        );
        let j = canonical_j(a, p).unwrap();
        let iw = euler_rates_to_omega(a, r) * inertia;
        assert!((j - iw).norm() <= 1e-7 * iw.norm().max(1.0), "{j} vs {iw}");
    }
}

#[test]
fn euler_angles_round_trip_through_quaternion() {
    let mut rng = common::rng(31);
    for _ in 0..200 {
        let a = (
            rng.gen_range(-3.0..3.0),
            rng.gen_range(0.01..3.13),
            rng.gen_range(-3.0..3.0),
        );
        let q = orientation_from_euler(a);
        let back = orientation_from_euler(euler_from_orientation(&q));
        assert!(q.angle_to(&back) < 1e-10);
        let m = q.to_rotation_matrix();
        assert!((m.matrix() - rotation(a)).norm() < 1e-12);
    }
    for beta in [0.0, PI] {
        let q = orientation_from_euler((0.8, beta, 0.3));
        assert!(q.angle_to(&orientation_from_euler(euler_from_orientation(&q))) < 1e-10);
    }
}

// --- coupled precession ---

#[test]
fn parallel_vectors_are_a_fixed_point() {
    let c = natural(1.3, 2.0);
    let axis = Vector3::new(0.3, -0.4, 0.8).normalize();
    let s0 = SpinState::new(axis * 1.7, axis * 5.0);
    let mut s = s0;
    for _ in 0..1000 {
        s = step_wgm(&s, 0.01, &c).unwrap();
    }
    assert!((s.omega - s0.omega).norm() <= 1e-14 * s0.omega.norm());
    assert!((s.s - s0.s).norm() <= 1e-14 * s0.s.norm());
    // the body just spins about the common axis
    let expected = UnitQuaternion::from_scaled_axis(s0.omega * s.t);
    assert!(s.orientation.angle_to(&expected) < 1e-10);
}

#[test]
fn no_coupling_leaves_vectors_constant() {
    let c = natural(0.0, 1.5);
    let s0 = SpinState::new(Vector3::new(0.1, 0.2, 0.3), Vector3::new(-4.0, 1.0, 2.0));
    let mut s = s0;
    for _ in 0..500 {
        s = step_wgm(&s, 0.05, &c).unwrap();
    }
    assert_eq!(s.omega, s0.omega);
    assert_eq!(s.s, s0.s);
    let expected = UnitQuaternion::from_scaled_axis(s0.omega * s.t);
    assert!(s.orientation.angle_to(&expected) < 1e-12);
}

#[test]
fn step_requires_positive_dt() {
    let c = natural(1.1, 1.0);
    let s = SpinState::new(Vector3::x(), Vector3::y());
    assert!(matches!(
        step_wgm(&s, 0.0, &c),
        Err(DynamicsError::InvalidStep(_))
    ));
    assert!(step_wgm(&s, -1.0, &c).is_err());
    assert!(step_wgm(&s, f64::NAN, &c).is_err());
}

#[test]
fn trajectory_matches_closed_form_precession() {
    let c = natural(PAPER_LAMBDA, 3.0);
    let start = SpinState::new(Vector3::new(0.4, -0.1, 0.9), Vector3::new(2.0, 1.0, -0.5));
    let k = start.omega * c.inertia - start.s * (c.lambda - 1.0);
    let rate = c.lambda * k.norm() / c.inertia;
    let dt = 0.01 * 2.0 * PI / rate;
    let mut s = start;
    let mut worst: f64 = 0.0;
    for step in 1..=10_000 {
        s = step_wgm(&s, dt, &c).unwrap();
        let t = step as f64 * dt;
        worst = worst.max(angle_between(&s.s, &rodrigues(&start.s, &k, rate * t)));
        worst = worst.max(angle_between(
            &s.omega,
            &rodrigues(&start.omega, &k, rate * t),
        ));
    }
    assert!(worst <= 1e-8, "max deviation {worst:e} rad");
}

#[test]
fn orientation_follows_rotating_angular_velocity() {
    // compare one large exact step against many small ones
    let c = natural(0.8, 1.0);
    let start = SpinState::new(Vector3::new(0.3, 0.5, -0.2), Vector3::new(0.0, 1.0, 1.0));
    let big = step_wgm(&start, 1.0, &c).unwrap();
    let mut small = start;
    for _ in 0..1000 {
        small = step_wgm(&small, 1e-3, &c).unwrap();
    }
    assert!(big.orientation.angle_to(&small.orientation) < 1e-10);
    assert!((big.orientation.norm() - 1.0).abs() < 1e-12);
}

#[test]
fn energy_examples() {
    let c = natural(1.4, 2.5);
    let s = SpinState::new(Vector3::new(0.3, -0.2, 0.7), Vector3::zeros());
    let free = 0.5 * c.inertia * s.omega.norm_squared();
    assert!((rotating_frame_energy(&s, &c) - free).abs() <= 1e-15 * free);
    let c1 = natural(1.0, 2.5);
    let still = SpinState::new(Vector3::zeros(), Vector3::new(3.0, 1.0, -2.0));
    assert_eq!(rotating_frame_energy(&still, &c1), 0.0);
}

fn three_term_energy(state: &SpinState, c: &CouplingConstants) -> (f64, f64) {
    let l = c.lambda;
    let s = state.s * c.hbar;
    let j = state.omega * c.inertia - s * l;
    let two_i = 2.0 * c.inertia;
    let terms = [
        l * (j + s).norm_squared() / two_i,
        (1.0 - l) * j.norm_squared() / two_i,
        l * (l - 1.0) * s.norm_squared() / two_i,
    ];
    (terms.iter().sum(), terms.iter().map(|t| t.abs()).sum())
}

#[test]
fn energy_equals_three_term_hamiltonian() {
    let mut rng = common::rng(37);
    for _ in 0..500 {
        let c = CouplingConstants::new(
            rng.gen_range(0.0..3.0),
            rng.gen_range(0.1..10.0),
            rng.gen_range(0.5..2.0),
        );
        let s = SpinState::new(vec3(&mut rng, 3.0), vec3(&mut rng, 3.0));
        let (literal, magnitude) = three_term_energy(&s, &c);
        let h = rotating_frame_energy(&s, &c);
        assert!((h - literal).abs() <= 1e-14 * magnitude, "{h} vs {literal}");
    }
}

#[test]
fn paper_scale_conservation_over_a_million_steps() {
    let c = CouplingConstants::new(PAPER_LAMBDA, paper_inertia(), HBAR);
    let start = SpinState::new(
        Vector3::new(1.0, 0.5, 0.2).normalize() * 1e-9,
        Vector3::new(0.3, -0.2, 1.0).normalize() * 1.2e7,
    );
    let dt = 0.01 / predicted_precession_hz(&start, &c);
    let traj = simulate(&start, &c, dt, 1_000_000, 10_000).unwrap();
    let sum = traj.summary(&c);
    assert!(sum.drift_abs_s <= 1e-13, "{sum:?}");
    assert!(sum.drift_abs_omega <= 1e-13, "{sum:?}");
    assert!(sum.drift_k <= 1e-12, "{sum:?}");
    assert!(sum.drift_hr <= 1e-10, "{sum:?}");
}

#[test]
fn repeated_steps_conserve_invariants_at_paper_scale() {
    let c = CouplingConstants::new(PAPER_LAMBDA, paper_inertia(), HBAR);
    let start = SpinState::new(
        Vector3::new(-0.4, 0.9, 0.3).normalize() * 4e-9,
        Vector3::new(0.6, 0.1, -0.8).normalize() * 9e6,
    );
    let dt = 0.02 / predicted_precession_hz(&start, &c);
    let first = Monitors::of(&start, &c);
    let mut st = start;
    for _ in 0..1_000_000 {
        st = step_wgm(&st, dt, &c).unwrap();
        let m = Monitors::of(&st, &c);
        assert!((m.abs_s - first.abs_s).abs() <= 1e-13 * first.abs_s);
        assert!((m.abs_omega - first.abs_omega).abs() <= 1e-13 * first.abs_omega);
        assert!((m.k - first.k).amax() <= 1e-12 * first.k.norm());
        assert!((m.h_r - first.h_r).abs() <= 1e-10 * first.h_r);
    }
}

proptest! {
    #![proptest_config(ProptestConfig {
        cases: 24,
        failure_persistence: None,
        rng_seed: proptest::test_runner::RngSeed::Fixed(7),
        ..ProptestConfig::default()
    })]

    #[test]
    fn invariants_hold_for_random_states(
        lambda in 0.0f64..3.0,
        inertia in 0.1f64..10.0,
        w in proptest::array::uniform3(-2.0f64..2.0),
        s in proptest::array::uniform3(-5.0f64..5.0),
        frac in 0.001f64..0.05,
    ) {
        let c = natural(lambda, inertia);
        let start = SpinState::new(Vector3::from(w), Vector3::from(s));
        let rate = predicted_precession_hz(&start, &c).max(1e-3);
        let traj = simulate(&start, &c, frac / rate, 100_000, 1000).unwrap();
        let sum = traj.summary(&c);
        prop_assert!(sum.drift_abs_s <= 1e-13);
        prop_assert!(sum.drift_abs_omega <= 1e-13);
        prop_assert!(sum.drift_k <= 1e-12);
        prop_assert!(sum.drift_hr <= 1e-10);
        for st in &traj.samples {
            prop_assert!((st.orientation.norm() - 1.0).abs() <= 1e-12);
        }
    }

    #[test]
    fn forward_then_backward_returns_home(
        lambda in 0.0f64..3.0,
        inertia in 0.1f64..10.0,
        w in proptest::array::uniform3(-2.0f64..2.0),
        s in proptest::array::uniform3(-5.0f64..5.0),
        dt in 1e-4f64..0.1,
        n in 1usize..5000,
    ) {
        let c = natural(lambda, inertia);
        let start = SpinState::new(Vector3::from(w), Vector3::from(s));
        let mut st = start;
        for _ in 0..n {
            st = step_wgm(&st, dt, &c).unwrap();
        }
        st = st.time_reversed();
        for _ in 0..n {
            st = step_wgm(&st, dt, &c).unwrap();
        }
        let back = st.time_reversed();
        prop_assert!((back.s - start.s).amax() <= 1e-10);
        prop_assert!((back.omega - start.omega).amax() <= 1e-10);
    }
}

// --- general torque ---

fn measured_rate_about_z(states: &[SpinState]) -> f64 {
    let mut angle = 0.0;
    for w in states.windows(2) {
        let a = Vector3::new(w[0].omega.x, w[0].omega.y, 0.0);
        let b = Vector3::new(w[1].omega.x, w[1].omega.y, 0.0);
        angle += a.cross(&b).z.atan2(a.dot(&b));
    }
    angle / (states.last().unwrap().t - states[0].t)
}

#[test]
fn constant_field_precesses_at_gamma_over_i() {
    let inertia = 1.7;
    let g = 3.4;
    let provider = ConstantGamma(Vector3::new(0.0, 0.0, g));
    let mut st = SpinState::new(Vector3::new(0.6, -0.2, 0.5), Vector3::zeros());
    let start_norm = st.omega.norm();
    let dt = 0.002;
    let mut worst: f64 = 0.0;
    let mut states = vec![st];
    for _ in 0..20_000 {
        st = step_general(&st, dt, &provider, inertia).unwrap();
        states.push(st);
        worst = worst.max((st.omega.norm() - start_norm).abs() / start_norm);
    }
    assert!(worst <= 2.0 * f64::EPSILON, "norm drift {worst:e}");
    let rate = measured_rate_about_z(&states);
    assert!((rate - g / inertia).abs() <= 1e-6 * g / inertia, "{rate}");
}

#[test]
fn zero_field_leaves_omega_alone() {
    let provider = ConstantGamma(Vector3::zeros());
    let w = Vector3::new(0.2, 0.1, -0.7);
    let mut st = SpinState::new(w, Vector3::zeros());
    for _ in 0..1000 {
        st = step_general(&st, 0.01, &provider, 2.0).unwrap();
    }
    assert_eq!(st.omega, w);
}

#[test]
fn growing_parallel_field_spins_up_linearly() {
    // Γ ∥ dΓ/dt and ω(0) = 0 keep ω ∥ Γ, so I ω(t) = Γ(t) - Γ(0)
    let inertia = 0.9;
    let dir = Vector3::new(1.0, 2.0, -2.0) / 3.0;
    let provider = LinearGamma {
        gamma0: dir * 0.5,
        rate: dir * 1.3,
    };
    let mut st = SpinState::new(Vector3::zeros(), Vector3::zeros());
    for _ in 0..1000 {
        st = step_general(&st, 0.003, &provider, inertia).unwrap();
        let (g, _) = provider.gamma(st.t).unwrap();
        let expect = g - provider.gamma0;
        assert!((st.omega * inertia - expect).norm() <= 1e-10 * expect.norm().max(1.0));
    }
}

#[test]
fn growing_oblique_field_has_bounded_cross_term() {
    // I ω = Ġ t - (t²/2I) Ġ × Γ0 + O(t³)
    let inertia = 1.0;
    let provider = LinearGamma {
        gamma0: Vector3::new(0.0, 0.0, 0.4),
        rate: Vector3::new(0.7, 0.0, 0.0),
    };
    let mut st = SpinState::new(Vector3::zeros(), Vector3::zeros());
    for _ in 0..100 {
        st = step_general(&st, 1e-3, &provider, inertia).unwrap();
    }
    let t = st.t;
    let expect =
        provider.rate * t - provider.rate.cross(&provider.gamma0) * (t * t / (2.0 * inertia));
    assert!((st.omega * inertia - expect).norm() <= 0.05 * t.powi(3));
}

struct Broken;

impl GammaProvider for Broken {
    fn gamma(&self, t: f64) -> std::result::Result<(Vector3<f64>, Vector3<f64>), String> {
        if t > 0.05 {
            Err("field model undefined".into())
        } else {
            Ok((Vector3::z(), Vector3::zeros()))
        }
    }
}

#[test]
fn provider_failure_propagates() {
    let mut st = SpinState::new(Vector3::x(), Vector3::zeros());
    let mut failed = None;
    for _ in 0..10 {
        match step_general(&st, 0.01, &Broken, 1.0) {
            Ok(next) => st = next,
            Err(e) => {
                failed = Some(e);
                break;
            }
        }
    }
    assert!(matches!(failed, Some(DynamicsError::Provider { .. })));
}

// --- simulation driver ---

#[test]
fn simulate_validates_arguments() {
    let c = natural(1.1, 1.0);
    let s = SpinState::new(Vector3::x(), Vector3::y());
    assert!(matches!(
        simulate(&s, &c, 0.1, 0, 1),
        Err(DynamicsError::NoSteps)
    ));
    assert!(matches!(
        simulate(&s, &c, 0.1, 10, 0),
        Err(DynamicsError::NoSampling)
    ));
    assert!(matches!(
        simulate(&s, &c, -0.1, 10, 1),
        Err(DynamicsError::InvalidStep(_))
    ));
}

#[test]
fn sampling_stride_does_not_change_states() {
    let c = natural(1.2, 1.3);
    let s = SpinState::new(Vector3::new(0.3, 0.1, -0.4), Vector3::new(1.0, 2.0, 0.5));
    let every = simulate(&s, &c, 0.01, 1000, 1).unwrap();
    let tenth = simulate(&s, &c, 0.01, 1000, 10).unwrap();
    assert_eq!(every.samples.len(), 1001);
    assert_eq!(tenth.samples.len(), 101);
    for (i, st) in tenth.samples.iter().enumerate() {
        assert_eq!(*st, every.samples[10 * i]);
        assert_eq!(tenth.monitors[i], every.monitors[10 * i]);
    }
    assert!(every.samples.windows(2).all(|w| w[0].t < w[1].t));
    assert_eq!(every.samples.len(), every.monitors.len());
}

#[test]
fn final_state_is_always_sampled() {
    let c = natural(1.2, 1.3);
    let s = SpinState::new(Vector3::x(), Vector3::y());
    let traj = simulate(&s, &c, 0.01, 25, 10).unwrap();
    let times: Vec<f64> = traj.samples.iter().map(|s| s.t).collect();
    assert_eq!(times.len(), 4);
    assert!((times[3] - 0.25).abs() < 1e-15);
}

#[test]
fn drift_beyond_tolerance_aborts() {
    let c = natural(1.2, 1.3);
    let s = SpinState::new(Vector3::new(0.3, 0.1, -0.4), Vector3::new(1.0, 2.0, 0.5));
    let err = simulate_with(&s, &c, 0.01, 100_000, 100, 0.0).unwrap_err();
    assert!(matches!(err, DynamicsError::Drift { .. }), "{err}");
}

#[test]
fn resting_state_is_a_constant_trajectory() {
    let c = natural(1.2, 1.3);
    let s = SpinState::new(Vector3::zeros(), Vector3::zeros());
    let traj = simulate(&s, &c, 0.5, 100, 10).unwrap();
    assert!(traj
        .samples
        .iter()
        .all(|st| st.omega == s.omega && st.s == s.s));
    assert_eq!(measured_precession_hz(&traj), None);
}

#[test]
fn paper_scale_precession_matches_estimate() {
    // S-dominated regime: I|ω| ≪ |Λ - 1| ħ |S|
    let p = SphereParams::from_permittivity(10e-6, 2.31, DEFAULT_DENSITY).unwrap();
    let (photons, l) = (1e5, 120u32);
    let c = CouplingConstants::new(PAPER_LAMBDA, p.inertia, HBAR);
    let s0 = Vector3::new(0.0, 0.0, photons * l as f64);
    let w0 = Vector3::new(1.0, 0.0, 0.3) * 1e-10;
    assert!(p.inertia * w0.norm() < 1e-2 * (PAPER_LAMBDA - 1.0) * HBAR * s0.norm());
    let start = SpinState::new(w0, s0);
    let estimate = precession_rate_estimate(&p, photons, l, PAPER_LAMBDA, Units::SI)
        .unwrap()
        .exact_hz;
    let dt = 0.01 / estimate;
    let traj = simulate(&start, &c, dt, 20_000, 5).unwrap();
    let measured = measured_precession_hz(&traj).unwrap();
    assert!(
        (measured - estimate).abs() <= 0.01 * estimate,
        "{measured} vs {estimate}"
    );
}

#[test]
fn trajectory_csv_layout() {
    let c = natural(1.2, 1.3);
    let s = SpinState::new(Vector3::new(0.3, 0.1, -0.4), Vector3::new(1.0, 2.0, 0.5));
    let traj = simulate(&s, &c, 0.01, 20, 10).unwrap();
    let mut buf = Vec::new();
    write_trajectory_csv(&traj, &c, &mut buf).unwrap();
    let text = String::from_utf8(buf).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert!(lines[0].starts_with('#'));
    assert!(lines[0].contains("hbar"));
    assert_eq!(
        lines[1],
        "t,omega_x,omega_y,omega_z,S_x,S_y,S_z,abs_omega,abs_S,K_x,K_y,K_z,H_r"
    );
    assert_eq!(lines.len(), 2 + traj.samples.len());
    assert!(lines[2..].iter().all(|l| l.split(',').count() == 13));
}

#[test]
fn driver_agrees_with_repeated_steps() {
    let c = natural(1.7, 0.8);
    let start = SpinState::new(Vector3::new(0.4, -0.3, 0.2), Vector3::new(1.5, 0.5, -2.0));
    let dt = 0.013;
    let traj = simulate(&start, &c, dt, 5000, 5000).unwrap();
    let mut st = start;
    for _ in 0..5000 {
        st = step_wgm(&st, dt, &c).unwrap();
    }
    let end = traj.samples.last().unwrap();
    assert!((end.omega - st.omega).amax() <= 1e-11);
    assert!((end.s - st.s).amax() <= 1e-11);
    assert!(end.orientation.angle_to(&st.orientation) <= 1e-10);
}
