use helix_euler::biotsavart::{Particle, VelocityEvalConfig, VorticityParticles};
use helix_euler::transport::*;
use helix_euler::weakform::*;
use helix_euler::{HelixParams, Vec2, Vec3};

fn h1() -> HelixParams {
    HelixParams::new(1.0).unwrap()
}

fn quad(h: HelixParams) -> VorticityParticles {
    let p = |x: f64, y: f64, g: f64| Particle { z: Vec2::new(x, y), gamma: g, area: 0.01 };
    VorticityParticles::new(
        h,
        vec![p(0.35, 0.1, 1.0), p(0.2, -0.3, 0.5), p(-0.25, 0.15, -0.8), p(-0.1, -0.4, -0.7)],
    )
    .unwrap()
}

fn frozen(w: &VorticityParticles, n: usize, horizon: f64) -> Vec<TrajectoryState> {
    (0..n)
        .map(|i| TrajectoryState {
            t: horizon * i as f64 / (n - 1) as f64,
            particles: w.clone(),
            background: None,
        })
        .collect()
}

#[test]
fn pairwise_integral_matches_velocity_form() {
    let h = h1();
    let cfg = VelocityEvalConfig::new(h).with_tolerance(1e-11);
    let psi = TestFunction::helical_bump(h, Vec2::new(0.1, 0.0), 0.6, 1.0, 0.4).unwrap();
    let snaps = frozen(&quad(h), 5, 0.4);
    let r = weak_residual(&snaps, &psi, &cfg).unwrap();
    let cuts = CutoffPair::new(0.1, CutoffPair::minimal_radius(&psi, 1.1), &psi).unwrap();
    let s = splitting_report(&snaps, &psi, &cuts, &cfg).unwrap();
    assert!(s.parts.total.abs() > 1e-4, "{}", s.parts.total);
    let scale = s.parts.total.abs();
    assert!((s.parts.total - r.nonlinear_term).abs() < 1e-7 * scale, "{} vs {}", s.parts.total, r.nonlinear_term);
    assert!(s.partition_error < 1e-12);
    assert_eq!(s.parts.far, 0.0);
    assert!(s.parts.near_abs >= s.parts.near.abs());
}

#[test]
fn residual_vanishes_when_test_function_misses_particles() {
    let h = h1();
    let cfg = VelocityEvalConfig::new(h);
    let psi = TestFunction::helical_bump(h, Vec2::new(3.0, 0.0), 0.5, 1.0, 0.4).unwrap();
    let r = weak_residual(&frozen(&quad(h), 5, 0.4), &psi, &cfg).unwrap();
    assert_eq!(r.residual, 0.0);
    assert_eq!(r.time_term, 0.0);
    assert_eq!(r.nonlinear_term, 0.0);
    assert_eq!(r.initial_term, 0.0);
}

#[test]
fn residual_small_on_a_short_run() {
    let h = h1();
    let eps = 0.05;
    let eval = VelocityEvalConfig::new(h).with_blob(eps).with_tolerance(1e-10);
    let out = run(&TrajectoryState::new(quad(h), None), &SimulationConfig::new(0.02, 0.2, eval)).unwrap();
    let psi = TestFunction::helical_bump(h, Vec2::new(0.1, 0.0), 0.6, 1.0, 0.2).unwrap();
    let r = weak_residual(&out.snapshots, &psi, &eval).unwrap();
    let full = r.residual_with_diagonal.unwrap();
    assert!(r.nonlinear_term.abs() > 1e-4 && r.time_term.abs() > 1e-4, "{r:?}");
    assert!(full < 1e-3 * (r.time_term.abs() + r.nonlinear_term.abs() + r.initial_term.abs()), "{r:?}");
}

#[test]
fn h_psi_grows_at_most_like_inverse_distance() {
    let h = h1();
    let kcfg = VelocityEvalConfig::new(h).kernel_cfg;
    let psi = TestFunction::helical_bump(h, Vec2::new(0.1, 0.0), 0.6, 1.0, 1.0).unwrap();
    let x = Vec3::new(0.2, 0.1, 0.0);
    let dir = Vec3::new(0.3, -0.5, 0.8) * (1.0 / 0.99f64.sqrt());
    let mut last = 0.0;
    for k in 1..8 {
        let d = 10f64.powi(-k);
        let v = h_psi(0.0, x, x + dir * d, &psi, &kcfg).unwrap().abs() * d;
        assert!(v.is_finite() && v < 10.0);
        last = v;
    }
    assert!(last > 0.0);
    assert!((h_psi(0.0, x, x + dir * 1e-3, &psi, &kcfg).unwrap()
        - h_psi(0.0, x + dir * 1e-3, x, &psi, &kcfg).unwrap())
    .abs()
        < 1e-9);
}

#[test]
fn snapshot_requirements() {
    let h = h1();
    let cfg = VelocityEvalConfig::new(h);
    let psi = TestFunction::helical_bump(h, Vec2::ZERO, 0.6, 1.0, 0.4).unwrap();
    let w = quad(h);
    assert_eq!(weak_residual(&frozen(&w, 3, 0.4), &psi, &cfg).unwrap_err().code(), "insufficient_snapshots");
    assert_eq!(
        weak_residual(&frozen(&w, 5, 0.2), &psi, &cfg).unwrap_err().code(),
        "snapshots_do_not_cover_horizon"
    );
    let other = TestFunction::helical_bump(HelixParams::new(2.0).unwrap(), Vec2::ZERO, 0.6, 1.0, 0.4).unwrap();
    assert_eq!(weak_residual(&frozen(&w, 5, 0.4), &other, &cfg).unwrap_err().code(), "kappa_mismatch");
    assert!(CutoffPair::new(0.1, 2.0, &psi).is_err());
}

#[test]
fn delta_scaling_reports_consistent_ratios() {
    let h = h1();
    let cfg = VelocityEvalConfig::new(h).with_tolerance(1e-9);
    let psi = TestFunction::helical_bump(h, Vec2::new(0.1, 0.0), 0.6, 1.0, 0.4).unwrap();
    let s = &frozen(&quad(h), 5, 0.4)[0];
    let radius = CutoffPair::minimal_radius(&psi, 1.1);
    let d = delta_scaling(s, &psi, &[0.8, 0.4, 0.2], radius, 2.0, &cfg).unwrap();
    assert_eq!(d.predicted_exponent, 1.0);
    assert_eq!(d.predicted_ratios, vec![0.5, 0.5]);
    for (i, r) in d.ratios.iter().enumerate() {
        assert!(*r >= 0.0 && *r <= 1.0 + 1e-12);
        assert_eq!(*r, d.near_abs[i + 1] / d.near_abs[i]);
    }
}
