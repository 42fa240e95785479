use helix_euler::biotsavart::{Particle, RadialProfile, SteadyBackground, VelocityEvalConfig, VorticityParticles};
use helix_euler::transport::mollify::slice_lq_norm_disjoint;
use helix_euler::transport::*;
use helix_euler::{HelixParams, Vec2, Vec3};

fn h1() -> HelixParams {
    HelixParams::new(1.0).unwrap()
}

fn pair(h: HelixParams) -> VorticityParticles {
    VorticityParticles::new(
        h,
        vec![
            Particle { z: Vec2::new(0.3, 0.05), gamma: 1.0, area: 0.01 },
            Particle { z: Vec2::new(-0.3, -0.05), gamma: -1.0, area: 0.01 },
        ],
    )
    .unwrap()
}

fn cfg(dt: f64, t_end: f64, h: HelixParams, eps: f64) -> SimulationConfig {
    SimulationConfig::new(dt, t_end, VelocityEvalConfig::new(h).with_blob(eps).with_tolerance(1e-11))
}

#[test]
fn mollification_preserves_mass_and_converges() {
    let h = h1();
    let disc = SliceField::disc_patch(Vec2::new(0.1, -0.2), 0.3, 2.0).unwrap();
    let mut prev = f64::INFINITY;
    for n in [4, 8, 16] {
        let m = MollifierSpec::new(n).unwrap();
        let w = mollify_initial(&disc, &m, 0.01, h).unwrap();
        assert!((w.total_circulation() - disc.integral()).abs() < 1e-3 * disc.integral());
        let l1: f64 = w
            .particles()
            .iter()
            .map(|p| (p.gamma / p.area - disc.value(p.z)).abs() * p.area)
            .sum();
        assert!(l1 < prev, "n = {n}: {l1} vs {prev}");
        prev = l1;
        for q in [1.0, 2.0, 4.0, f64::INFINITY] {
            assert!(particle_lq_norm(&w, q) <= slice_lq_norm_disjoint(&disc, q) * (1.0 + 1e-3));
        }
    }
}

#[test]
fn coarse_seeding_rejected() {
    let disc = SliceField::disc_patch(Vec2::ZERO, 0.3, 1.0).unwrap();
    let e = mollify_initial(&disc, &MollifierSpec::new(8).unwrap(), 0.2, h1()).unwrap_err();
    assert_eq!(e.code(), "resolution_too_coarse");
    assert_eq!(MollifierSpec::new(0).unwrap_err().code(), "invalid_mollifier_index");
}

#[test]
fn tracers_circle_under_background() {
    let h = h1();
    let bg = SteadyBackground::new(RadialProfile::new(0.1, 1.5, 1.0).unwrap(), h);
    let w = tracers(h, &[Vec2::new(0.5, 0.0), Vec2::new(1.0, 0.3), Vec2::new(-2.0, 1.0)]).unwrap();
    let out = run(&TrajectoryState::new(w.clone(), Some(bg)), &cfg(0.01, 1.0, h, 0.0)).unwrap();
    for (a, b) in w.particles().iter().zip(out.final_state.particles.particles()) {
        assert!((a.z.norm() - b.z.norm()).abs() <= 1e-10);
        assert!((a.z - b.z).norm() > 1e-3);
    }
}

#[test]
fn radial_steady_rings_stay_put() {
    let h = h1();
    let w = radial_steady(h, &RadialSteadySpec::default()).unwrap();
    let eps = default_blob_epsilon(&w);
    let out = run(&TrajectoryState::new(w.clone(), None), &cfg(0.01, 0.1, h, eps)).unwrap();
    for (a, b) in w.particles().iter().zip(out.final_state.particles.particles()) {
        assert!((a.z.norm() - b.z.norm()).abs() <= 1e-6);
    }
}

#[test]
fn rk4_converges_at_fourth_order() {
    let h = h1();
    let s = TrajectoryState::new(pair(h), None);
    let finals: Vec<Vec<Vec2>> = [0.1, 0.05, 0.025]
        .iter()
        .map(|&dt| run(&s, &cfg(dt, 0.4, h, 0.05)).unwrap().final_state.particles.positions())
        .collect();
    let diff = |a: &[Vec2], b: &[Vec2]| a.iter().zip(b).map(|(p, q)| (*p - *q).norm()).fold(0.0, f64::max);
    let ratio = diff(&finals[0], &finals[1]) / diff(&finals[1], &finals[2]);
    assert!((12.0..20.0).contains(&ratio), "{ratio}");
}

#[test]
fn dipole_translates_steadily() {
    let h = h1();
    let field = SliceField::dipole(1.0, 0.25, 1.0).unwrap();
    let w = mollify_initial(&field, &MollifierSpec::new(8).unwrap(), 0.109, h).unwrap();
    let eps = default_blob_epsilon(&w);
    let c = cfg(0.02, 0.1, h, eps);
    let out = run(&TrajectoryState::new(w, None), &c).unwrap();
    let centroid = |s: &TrajectoryState| {
        let (mut m, mut y) = (0.0, 0.0);
        for p in s.particles.particles().iter().filter(|p| p.gamma > 0.0) {
            m += p.gamma;
            y += p.gamma * p.z.y;
        }
        y / m
    };
    let ys: Vec<f64> = out.snapshots.iter().map(centroid).collect();
    let up = ys[1] > ys[0];
    assert!(ys.windows(2).all(|w| (w[1] > w[0]) == up && w[1] != w[0]), "{ys:?}");
    let r0 = support_radius(&out.snapshots[0]).unwrap();
    for s in &out.snapshots {
        let xs: Vec<Vec3> = s.particles.positions().iter().map(|&z| Vec3::from_slice(z)).collect();
        let vmax = state_velocity(&s.particles, None, &xs, &c)
            .unwrap()
            .iter()
            .map(|u| u.norm() * (1.0 + s.particles.h.kappa().recip() * 2.0))
            .fold(0.0, f64::max);
        assert!(support_radius(s).unwrap() - r0 <= vmax * s.t + 1e-12);
    }
    assert!(out.report.circulation_constant && out.report.linf_constant && out.report.lp_constant);
}

#[test]
fn diagnostics_cadence_and_determinism() {
    let h = h1();
    let s = TrajectoryState::new(pair(h), None);
    let mut c = cfg(0.01, 0.1, h, 0.05);
    c.diagnostics_every = 3;
    let a = run(&s, &c).unwrap();
    let steps: Vec<usize> = a.report.records.iter().map(|r| r.step).collect();
    assert_eq!(steps, vec![0, 3, 6, 9, 10]);
    assert_eq!(a.snapshots.len(), (0.1f64 / (0.01 * 3.0)).ceil() as usize + 1);
    let b = run(&s, &c).unwrap();
    assert_eq!(a, b);
    let pool = rayon::ThreadPoolBuilder::new().num_threads(3).build().unwrap();
    assert_eq!(pool.install(|| run(&s, &c)).unwrap(), a);
}

#[test]
fn support_radius_of_single_particle() {
    let h = h1();
    let w = VorticityParticles::new(h, vec![Particle { z: Vec2::new(2.0, 0.0), gamma: 0.0, area: 1.0 }]).unwrap();
    assert_eq!(support_radius(&TrajectoryState::new(w, None)).unwrap(), 2.0);
}

#[test]
fn invalid_configs() {
    let h = h1();
    let s = TrajectoryState::new(pair(h), None);
    assert_eq!(run(&s, &cfg(-0.1, 1.0, h, 0.0)).unwrap_err().code(), "invalid_dt");
    assert_eq!(run(&s, &cfg(0.1, 0.0, h, 0.0)).unwrap_err().code(), "invalid_t_end");
    let lone = VorticityParticles::new(h, vec![Particle { z: Vec2::new(0.3, 0.0), gamma: 1.0, area: 0.01 }]).unwrap();
    let e = run(&TrajectoryState::new(lone, None), &cfg(0.1, 0.2, h, 0.0)).unwrap_err();
    assert_eq!(e.code(), "unbalanced_vorticity");
}
