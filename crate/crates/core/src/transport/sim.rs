//! Particle trajectories `dX/dt = u(X)` re-projected onto the slice.
//!
//! With re-projection after every substage the slice positions obey
//! `dz/dt = ũ(z,0) + (u₃/κ) z^⊥`: moving along the helix by `−x₃/κ` rotates the
//! planar part, and at `x₃ = 0` that rotation contributes `(u₃/κ)z^⊥`.

use serde::{Deserialize, Serialize};

use crate::biotsavart::filament::velocity_many_unchecked;
use crate::biotsavart::xi::check_profile_normalization;
use crate::biotsavart::{background_velocity, SteadyBackground, VelocityEvalConfig, VorticityParticles};
use crate::error::{Error, Result};
use crate::geometry::{project_to_slice, rotate, swirl, xi, Vec2, Vec3};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Integrator {
    #[default]
    Rk4,
    Euler,
}

/// How a background in the state enters the velocity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum BackgroundMode {
    /// `u = 𝒦∗(ωξ/κ) + ū` for balanced particles.
    #[default]
    Additive,
    /// `u = Ξ[ω]` for particles balanced by the background profile.
    Xi,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SimulationConfig {
    pub dt: f64,
    pub t_end: f64,
    pub integrator: Integrator,
    /// Re-project after every substage; otherwise a full 3D step followed by one projection.
    pub reproject_each_step: bool,
    pub eval_cfg: VelocityEvalConfig,
    pub diagnostics_every: usize,
    pub background_mode: BackgroundMode,
    /// Exponent `p` of the reported `L^p` norm.
    pub lp_exponent: f64,
    pub max_halvings: u32,
    /// Allowed displacement per step in units of `max(blob_epsilon, mean spacing)`.
    pub displacement_safety: f64,
    /// Particles probed for swirl and helicality residuals at each record.
    pub diagnostic_probes: usize,
}

impl SimulationConfig {
    pub fn new(dt: f64, t_end: f64, eval_cfg: VelocityEvalConfig) -> Self {
        SimulationConfig {
            dt,
            t_end,
            integrator: Integrator::Rk4,
            reproject_each_step: true,
            eval_cfg,
            diagnostics_every: 1,
            background_mode: BackgroundMode::Additive,
            lp_exponent: 2.0,
            max_halvings: 4,
            displacement_safety: 1.0,
            diagnostic_probes: 4,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::invalid("invalid_dt", "dt must be positive"));
        }
        if !(self.t_end > 0.0 && self.t_end.is_finite()) {
            return Err(Error::invalid("invalid_t_end", "t_end must be positive"));
        }
        if self.dt >= self.t_end {
            return Err(Error::invalid("invalid_dt", "dt must be smaller than t_end"));
        }
        if self.diagnostics_every == 0 {
            return Err(Error::invalid("invalid_diagnostics_every", "diagnostics_every must be >= 1"));
        }
        if !(self.lp_exponent >= 1.0 && self.lp_exponent.is_finite()) {
            return Err(Error::invalid("invalid_lp_exponent", "lp_exponent must be finite and >= 1"));
        }
        if !(self.displacement_safety > 0.0) {
            return Err(Error::invalid("invalid_displacement_safety", "displacement_safety must be positive"));
        }
        self.eval_cfg.validate()
    }

    /// Number of steps, the last one shortened if `t_end/dt` is not an integer.
    pub fn n_steps(&self) -> usize {
        let r = self.t_end / self.dt;
        let n = r.round();
        if (r - n).abs() <= 1e-9 * r {
            n as usize
        } else {
            r.ceil() as usize
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrajectoryState {
    pub t: f64,
    pub particles: VorticityParticles,
    pub background: Option<SteadyBackground>,
}

impl TrajectoryState {
    pub fn new(particles: VorticityParticles, background: Option<SteadyBackground>) -> Self {
        TrajectoryState {
            t: 0.0,
            particles,
            background,
        }
    }
}

/// Velocity of the state's vorticity (and background) at arbitrary points.
pub fn state_velocity(
    particles: &VorticityParticles,
    background: Option<&SteadyBackground>,
    xs: &[Vec3],
    cfg: &SimulationConfig,
) -> Result<Vec<Vec3>> {
    let ec = &cfg.eval_cfg;
    match (background, cfg.background_mode) {
        (None, _) => {
            particles.check_balanced()?;
            velocity_many_unchecked(xs, particles, ec)
        }
        (Some(bg), BackgroundMode::Additive) => {
            particles.check_balanced()?;
            let mut us = velocity_many_unchecked(xs, particles, ec)?;
            for (u, x) in us.iter_mut().zip(xs) {
                *u += background_velocity(*x, bg);
            }
            Ok(us)
        }
        (Some(bg), BackgroundMode::Xi) => {
            check_profile_normalization(particles, bg)?;
            let shift = Vec3::new(0.0, 0.0, bg.weighted_integral() / bg.h.kappa());
            let mut us = velocity_many_unchecked(xs, particles, ec)?;
            for u in &mut us {
                *u += shift;
            }
            Ok(us)
        }
    }
}

fn slice_rhs(state: &TrajectoryState, zs: &[Vec2], cfg: &SimulationConfig) -> Result<Vec<Vec2>> {
    let moved = state.particles.moved_to(zs);
    let xs: Vec<Vec3> = zs.iter().map(|&z| Vec3::from_slice(z)).collect();
    let us = state_velocity(&moved, state.background.as_ref(), &xs, cfg)?;
    let k = state.particles.h.kappa();
    Ok(us
        .iter()
        .zip(zs)
        .map(|(u, z)| u.planar() + z.perp() * (u.z / k))
        .collect())
}

fn space_rhs(state: &TrajectoryState, xs: &[Vec3], cfg: &SimulationConfig) -> Result<Vec<Vec3>> {
    let h = state.particles.h;
    let zs: Vec<Vec2> = xs.iter().map(|&x| project_to_slice(x, &h).0).collect();
    let moved = state.particles.moved_to(&zs);
    state_velocity(&moved, state.background.as_ref(), xs, cfg)
}

fn axpy2(z: &[Vec2], a: f64, k: &[Vec2]) -> Vec<Vec2> {
    z.iter().zip(k).map(|(z, k)| *z + *k * a).collect()
}

fn axpy3(z: &[Vec3], a: f64, k: &[Vec3]) -> Vec<Vec3> {
    z.iter().zip(k).map(|(z, k)| *z + *k * a).collect()
}

fn raw_step(state: &TrajectoryState, dt: f64, cfg: &SimulationConfig) -> Result<Vec<Vec2>> {
    let z0 = state.particles.positions();
    if cfg.reproject_each_step {
        let k1 = slice_rhs(state, &z0, cfg)?;
        if cfg.integrator == Integrator::Euler {
            return Ok(axpy2(&z0, dt, &k1));
        }
        let k2 = slice_rhs(state, &axpy2(&z0, 0.5 * dt, &k1), cfg)?;
        let k3 = slice_rhs(state, &axpy2(&z0, 0.5 * dt, &k2), cfg)?;
        let k4 = slice_rhs(state, &axpy2(&z0, dt, &k3), cfg)?;
        Ok((0..z0.len())
            .map(|i| z0[i] + (k1[i] + (k2[i] + k3[i]) * 2.0 + k4[i]) * (dt / 6.0))
            .collect())
    } else {
        let h = state.particles.h;
        let x0: Vec<Vec3> = z0.iter().map(|&z| Vec3::from_slice(z)).collect();
        let k1 = space_rhs(state, &x0, cfg)?;
        let x1 = if cfg.integrator == Integrator::Euler {
            axpy3(&x0, dt, &k1)
        } else {
            let k2 = space_rhs(state, &axpy3(&x0, 0.5 * dt, &k1), cfg)?;
            let k3 = space_rhs(state, &axpy3(&x0, 0.5 * dt, &k2), cfg)?;
            let k4 = space_rhs(state, &axpy3(&x0, dt, &k3), cfg)?;
            (0..x0.len())
                .map(|i| x0[i] + (k1[i] + (k2[i] + k3[i]) * 2.0 + k4[i]) * (dt / 6.0))
                .collect()
        };
        Ok(x1.iter().map(|&x| project_to_slice(x, &h).0).collect())
    }
}

fn displacement_bound(state: &TrajectoryState, cfg: &SimulationConfig) -> f64 {
    let eps = cfg.eval_cfg.blob_epsilon;
    let spacing = state.particles.mean_spacing();
    let base = eps.max(spacing);
    if base > 0.0 {
        cfg.displacement_safety * base
    } else {
        f64::INFINITY
    }
}

fn step_by(state: &TrajectoryState, dt: f64, cfg: &SimulationConfig, depth: u32) -> Result<TrajectoryState> {
    let z1 = raw_step(state, dt, cfg)?;
    let z0 = state.particles.positions();
    let disp = z0.iter().zip(&z1).map(|(a, b)| (*b - *a).norm()).fold(0.0, f64::max);
    let bound = displacement_bound(state, cfg);
    if disp > bound {
        if depth >= cfg.max_halvings {
            return Err(Error::StepRejected {
                t: state.t,
                displacement: disp,
                bound,
                retries: depth,
            });
        }
        let half = step_by(state, 0.5 * dt, cfg, depth + 1)?;
        return step_by(&half, 0.5 * dt, cfg, depth + 1);
    }
    Ok(TrajectoryState {
        t: state.t + dt,
        particles: state.particles.moved_to(&z1),
        background: state.background,
    })
}

/// One step of size `cfg.dt`; circulations and areas are carried over unchanged.
pub fn step(state: &TrajectoryState, cfg: &SimulationConfig) -> Result<TrajectoryState> {
    step_by(state, cfg.dt, cfg, 0)
}

/// Per-snapshot diagnostics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiagnosticsRecord {
    pub t: f64,
    pub step: usize,
    pub l1: f64,
    pub l2: f64,
    pub lp: f64,
    pub linf: f64,
    pub total_circulation: f64,
    pub support_radius: f64,
    /// `max |u·ξ|/(|u||ξ|)` at the probe particles.
    pub max_swirl_residual: Option<f64>,
    /// `max |u(S_θx) − R_θu(x)|/|u(x)|` at the probe particles.
    pub max_helicality_residual: Option<f64>,
    /// `max |A_q(t)/A_q(0) − 1|` over recorded grid quartets.
    pub max_area_distortion: Option<f64>,
    pub weak_residual: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiagnosticsReport {
    pub p: f64,
    pub records: Vec<DiagnosticsRecord>,
    pub circulation_constant: bool,
    pub linf_constant: bool,
    pub lp_constant: bool,
    pub warnings: Vec<String>,
}

/// `max_j |(z_j, 0)|`.
pub fn support_radius(state: &TrajectoryState) -> Result<f64> {
    crate::biotsavart::particle_support_radius(&state.particles)
}

fn quad_area(ps: &VorticityParticles, q: &[usize; 4]) -> f64 {
    let p = ps.particles();
    let mut a = 0.0;
    for k in 0..4 {
        let u = p[q[k]].z;
        let v = p[q[(k + 1) % 4]].z;
        a += u.x * v.y - v.x * u.y;
    }
    0.5 * a
}

fn norms_record(state: &TrajectoryState, step: usize, p: f64, initial: &VorticityParticles) -> Result<DiagnosticsRecord> {
    use crate::transport::mollify::particle_lq_norm;
    let w = &state.particles;
    let distortion = if w.quads.is_empty() || w.quads != initial.quads {
        None
    } else {
        Some(
            w.quads
                .iter()
                .map(|q| (quad_area(w, q) / quad_area(initial, q) - 1.0).abs())
                .fold(0.0, f64::max),
        )
    };
    Ok(DiagnosticsRecord {
        t: state.t,
        step,
        l1: particle_lq_norm(w, 1.0),
        l2: particle_lq_norm(w, 2.0),
        lp: particle_lq_norm(w, p),
        linf: particle_lq_norm(w, f64::INFINITY),
        total_circulation: w.total_circulation(),
        support_radius: if w.is_empty() { 0.0 } else { support_radius(state)? },
        max_swirl_residual: None,
        max_helicality_residual: None,
        max_area_distortion: distortion,
        weak_residual: None,
    })
}

/// Discrete norms, circulation, support radius and quartet distortion per snapshot,
/// with bitwise-constancy flags.
pub fn conservation_report(series: &[TrajectoryState], p: f64) -> Result<DiagnosticsReport> {
    let mut records = Vec::with_capacity(series.len());
    if let Some(first) = series.first() {
        for (k, s) in series.iter().enumerate() {
            records.push(norms_record(s, k, p, &first.particles)?);
        }
    }
    Ok(finish_report(p, records, Vec::new()))
}

fn finish_report(p: f64, records: Vec<DiagnosticsRecord>, warnings: Vec<String>) -> DiagnosticsReport {
    let same = |f: fn(&DiagnosticsRecord) -> f64| {
        records
            .windows(2)
            .all(|w| f(&w[0]).to_bits() == f(&w[1]).to_bits())
    };
    DiagnosticsReport {
        p,
        circulation_constant: same(|r| r.total_circulation),
        linf_constant: same(|r| r.linf),
        lp_constant: same(|r| r.lp),
        records,
        warnings,
    }
}

const PROBE_THETA: f64 = 0.7;

fn structure_residuals(state: &TrajectoryState, cfg: &SimulationConfig) -> Result<(Option<f64>, Option<f64>)> {
    let w = &state.particles;
    let n = w.len().min(cfg.diagnostic_probes);
    if n == 0 {
        return Ok((None, None));
    }
    let h = w.h;
    let stride = w.len() / n;
    let xs: Vec<Vec3> = (0..n)
        .map(|k| Vec3::from_slice(w.particles()[k * stride].z))
        .collect();
    let mut all = xs.clone();
    all.extend(xs.iter().map(|x| crate::geometry::screw(PROBE_THETA, *x, &h)));
    let us = state_velocity(w, state.background.as_ref(), &all, cfg)?;
    let mut sw: f64 = 0.0;
    let mut hel: f64 = 0.0;
    for k in 0..n {
        let u = us[k];
        let un = u.norm();
        if un == 0.0 {
            continue;
        }
        sw = sw.max(swirl(u, xs[k], &h).abs() / (un * xi(xs[k], &h).norm()));
        hel = hel.max((us[n + k] - rotate(PROBE_THETA, u)).norm() / un);
    }
    Ok((Some(sw), Some(hel)))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunOutput {
    pub final_state: TrajectoryState,
    pub report: DiagnosticsReport,
    /// States at the diagnostics cadence, first and last included.
    pub snapshots: Vec<TrajectoryState>,
}

/// Steps from `initial` to `t_end`, recording diagnostics every `diagnostics_every`
/// steps and at the end.
pub fn run(initial: &TrajectoryState, cfg: &SimulationConfig) -> Result<RunOutput> {
    cfg.validate()?;
    let n = cfg.n_steps();
    let mut warnings = Vec::new();
    let mut state = initial.clone();
    let mut snapshots = vec![state.clone()];
    let mut records = Vec::new();
    let record = |s: &TrajectoryState, k: usize| -> Result<DiagnosticsRecord> {
        let mut r = norms_record(s, k, cfg.lp_exponent, &initial.particles)?;
        let (sw, hel) = structure_residuals(s, cfg)?;
        r.max_swirl_residual = sw;
        r.max_helicality_residual = hel;
        Ok(r)
    };
    records.push(record(&state, 0)?);
    for k in 1..=n {
        let dt = if k == n { cfg.t_end - state.t } else { cfg.dt };
        let sub = SimulationConfig { dt, ..*cfg };
        let next = step(&state, &sub)?;
        if k == 1 {
            let disp = state
                .particles
                .positions()
                .iter()
                .zip(next.particles.positions())
                .map(|(a, b)| (b - *a).norm())
                .fold(0.0, f64::max);
            let eps = cfg.eval_cfg.blob_epsilon;
            if eps > 0.0 && disp >= eps {
                warnings.push(format!(
                    "first step displacement {disp:.3e} is not below blob_epsilon {eps:.3e}"
                ));
            }
        }
        state = next;
        if k % cfg.diagnostics_every == 0 || k == n {
            records.push(record(&state, k)?);
            snapshots.push(state.clone());
        }
    }
    let report = finish_report(cfg.lp_exponent, records, warnings);
    Ok(RunOutput {
        final_state: state,
        report,
        snapshots,
    })
}

/// Default blob radius `ε = ½·mean spacing`.
pub fn default_blob_epsilon(w: &VorticityParticles) -> f64 {
    0.5 * w.mean_spacing()
}
