//! The symmetrized weak vorticity formulation and its residual on particle runs.
//!
//! For a helical test function `ψ(t, S_θx) = ψ(t, x)` the kernel `H_ψ` is
//! invariant under a common screw of both arguments, so every slab integral
//! against particle vorticity reduces to one angle per particle pair:
//!
//! * `∫_Ω f ω = 2πκ Σ_j Γ_j f(z_j)`
//! * `∫∫ H_ψ ω ω = 2πκ² Σ_{j,k} Γ_j Γ_k ∫_{−π}^{π} H_ψ((z_j,0), S_φ(z_k,0)) dφ`
//!
//! Both orderings of `H_ψ` are then filament integrals, which gives
//! `∫∫ H_ψ ω ω = 2πκ Σ_j Γ_j ∇ψ(z_j)·u(z_j)`. The residual uses that form; the
//! splitting report integrates `H_ψ` directly so the cutoffs can be applied
//! pointwise.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::biotsavart::{background_velocity, closest_approach, filament_integral, VelocityEvalConfig};
use crate::bump::{bump, bump_deriv, transition, transition_deriv};
use crate::error::{Error, Result};
use crate::geometry::{helix_point, project_to_slice, rotate, rotate2, xi, HelixParams, Vec2, Vec3};
use crate::kernel::{biot_savart_kernel, reduce_period, KernelConfig};
use crate::sum::{Neumaier, Neumaier3};
use crate::transport::{BackgroundMode, TrajectoryState};

const MAX_PANELS: usize = 128;
const MIN_SNAPSHOTS: usize = 4;

/// `ψ(t, x) = A·τ(t)·bump(|z − c|/ρ)` with `z = R_{−x₃/κ}x̃` the slice foot of `x`
/// and `τ(t) = transition(2(T − t)/T)`, so `ψ` is helical, vanishes for `t ≥ T`
/// and is constant in time on `[0, T/2]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TestFunction {
    pub center: Vec2,
    pub radius: f64,
    pub amplitude: f64,
    pub horizon: f64,
    pub kappa: f64,
}

impl TestFunction {
    pub fn helical_bump(h: HelixParams, center: Vec2, radius: f64, amplitude: f64, horizon: f64) -> Result<Self> {
        let f = TestFunction {
            center,
            radius,
            amplitude,
            horizon,
            kappa: h.kappa(),
        };
        f.validate()?;
        Ok(f)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.radius > 0.0 && self.radius.is_finite()) {
            return Err(Error::invalid("invalid_test_radius", "test function radius must be positive"));
        }
        if !(self.horizon > 0.0 && self.horizon.is_finite()) {
            return Err(Error::invalid("invalid_test_horizon", "test function horizon must be positive"));
        }
        if !(self.amplitude.is_finite() && self.center.is_finite()) {
            return Err(Error::invalid("invalid_test_function", "test function parameters must be finite"));
        }
        HelixParams::new(self.kappa)?;
        Ok(())
    }

    /// Radius of the cylinder `|x̃| < ρ` outside which `ψ` vanishes.
    pub fn support_radius(&self) -> f64 {
        self.center.norm() + self.radius
    }

    fn tau(&self, t: f64) -> (f64, f64) {
        let u = 2.0 * (self.horizon - t) / self.horizon;
        (transition(u), -2.0 / self.horizon * transition_deriv(u))
    }

    fn slice_bump(&self, z: Vec2) -> (f64, Vec2) {
        let d = z - self.center;
        let r = d.norm();
        let s = r / self.radius;
        let b = bump(s);
        let g = if r > 0.0 {
            d * (bump_deriv(s) / (self.radius * r))
        } else {
            Vec2::ZERO
        };
        (self.amplitude * b, g * self.amplitude)
    }

    pub fn value(&self, t: f64, x: Vec3) -> f64 {
        let (z, _) = project_to_slice(x, &self.helix());
        self.tau(t).0 * self.slice_bump(z).0
    }

    /// `∂ψ/∂t`.
    pub fn time_derivative(&self, t: f64, x: Vec3) -> f64 {
        let (z, _) = project_to_slice(x, &self.helix());
        self.tau(t).1 * self.slice_bump(z).0
    }

    /// `∇ψ = τ·(R_φ∇B(z), z^⊥·∇B(z)/κ)` with `φ = x₃/κ`.
    pub fn gradient(&self, t: f64, x: Vec3) -> Vec3 {
        let (z, phi) = project_to_slice(x, &self.helix());
        let (_, g) = self.slice_bump(z);
        let tau = self.tau(t).0;
        let p = rotate2(phi, g);
        Vec3::new(p.x, p.y, z.perp().dot(g) / self.kappa) * tau
    }

    /// Bound on `|∇ψ|·|ξ|/κ` over the support, used as an absolute scale for pair integrals.
    pub fn gradient_scale(&self) -> f64 {
        const MAX_BUMP_DERIV: f64 = 0.8;
        let r = self.support_radius();
        self.amplitude.abs() * MAX_BUMP_DERIV / self.radius * (1.0 + r / self.kappa) * r.hypot(self.kappa) / self.kappa
    }

    fn helix(&self) -> HelixParams {
        HelixParams::new(self.kappa).expect("validated kappa")
    }
}

/// `|x − y|` with `x₃ − y₃` reduced to one period.
pub fn periodic_distance(x: Vec3, y: Vec3, h: &HelixParams) -> f64 {
    let d = x - y;
    Vec3::new(d.x, d.y, reduce_period(d.z, h)).norm()
}

/// `H_ψ(t,x,y) = (1/2κ)𝒦(x−y)·(ξ(y)×(∇ψ(x)−∇ψ(y)) − (ξ(x)−ξ(y))×∇ψ(y))`.
pub fn h_psi(t: f64, x: Vec3, y: Vec3, psi: &TestFunction, cfg: &KernelConfig) -> Result<f64> {
    let h = cfg.h;
    let k = biot_savart_kernel(x - y, cfg)?.value;
    let (gx, gy) = (psi.gradient(t, x), psi.gradient(t, y));
    let (ex, ey) = (xi(x, &h), xi(y, &h));
    Ok(k.dot(ey.cross(gx - gy) - (ex - ey).cross(gy)) / (2.0 * h.kappa()))
}

/// The two-term form `(1/2κ)𝒦(x−y)·(ξ(y)×∇ψ(x) − ξ(x)×∇ψ(y))`.
pub fn h_psi_reduced(t: f64, x: Vec3, y: Vec3, psi: &TestFunction, cfg: &KernelConfig) -> Result<f64> {
    let h = cfg.h;
    let k = biot_savart_kernel(x - y, cfg)?.value;
    let (gx, gy) = (psi.gradient(t, x), psi.gradient(t, y));
    Ok(k.dot(xi(y, &h).cross(gx) - xi(x, &h).cross(gy)) / (2.0 * h.kappa()))
}

/// `φ_δ(r)`: 1 on `[0, δ]`, 0 beyond `2δ`.
pub fn cutoff_phi(delta: f64, r: f64) -> f64 {
    1.0 - transition((r - delta) / delta)
}

/// `ζ_R(r)`: 1 on `[0, R]`, 0 beyond `2R`.
pub fn cutoff_zeta(radius: f64, r: f64) -> f64 {
    1.0 - transition((r - radius) / radius)
}

/// Near-diagonal width `δ` and far-field radius `R` of the splitting.
///
/// `ζ_R` is applied to the cylindrical radius `|x̃|`, which is invariant under
/// screws; on the slab this differs from `|x|` only inside the transition band.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CutoffPair {
    pub delta: f64,
    pub radius: f64,
}

impl CutoffPair {
    pub fn new(delta: f64, radius: f64, psi: &TestFunction) -> Result<Self> {
        let c = CutoffPair { delta, radius };
        c.validate(psi)?;
        Ok(c)
    }

    pub fn validate(&self, psi: &TestFunction) -> Result<()> {
        if !(self.delta > 0.0 && self.delta.is_finite()) {
            return Err(Error::invalid("invalid_cutoff_delta", "delta must be positive"));
        }
        let min = 2.0 * psi.support_radius().max(2.0 * PI * psi.kappa);
        if !(self.radius > min && self.radius.is_finite()) {
            return Err(Error::invalid(
                "invalid_cutoff_radius",
                format!("R must exceed 2·max(ρ, 2πκ) = {min}"),
            ));
        }
        Ok(())
    }

    /// Smallest admissible `R` scaled by `factor > 1`.
    pub fn minimal_radius(psi: &TestFunction, factor: f64) -> f64 {
        factor * 2.0 * psi.support_radius().max(2.0 * PI * psi.kappa)
    }

    pub fn phi(&self, r: f64) -> f64 {
        cutoff_phi(self.delta, r)
    }

    pub fn zeta(&self, r: f64) -> f64 {
        cutoff_zeta(self.radius, r)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Default)]
pub struct WeakResidual {
    /// `|∫∫ψ_t ω + ∫∫∫H_ψ ω ω + ∫ψ(0)ω⁰|` with the diagonal omitted.
    pub residual: f64,
    /// `residual` divided by the sum of the absolute values of the three terms.
    pub relative: f64,
    pub time_term: f64,
    pub nonlinear_term: f64,
    pub initial_term: f64,
    /// Time integral of the omitted `j = k` self-helix terms; absent without a blob.
    pub diagonal: Option<f64>,
    /// Residual with the diagonal included, i.e. with the velocity that moved the particles.
    pub residual_with_diagonal: Option<f64>,
    pub snapshots: usize,
}

/// Per-snapshot terms `(time, nonlinear, diagonal, |time|, |nonlinear|)`.
fn snapshot_terms(
    s: &TrajectoryState,
    psi: &TestFunction,
    cfg: &VelocityEvalConfig,
    mode: BackgroundMode,
) -> Result<[f64; 5]> {
    let h = s.particles.h;
    let ps = s.particles.particles();
    let t = s.t;
    let with_diag = cfg.blob_epsilon > 0.0;
    let shift = match (s.background.as_ref(), mode) {
        (Some(bg), BackgroundMode::Xi) => Some(bg.weighted_integral() / h.kappa()),
        _ => None,
    };
    let rows: Vec<[f64; 3]> = (0..ps.len())
        .into_par_iter()
        .map(|j| -> Result<[f64; 3]> {
            let pj = ps[j];
            let x = Vec3::from_slice(pj.z);
            let g = psi.gradient(t, x);
            let pt = psi.time_derivative(t, x);
            let zero_g = g.norm() == 0.0;
            let mut u = Neumaier3::new();
            let mut diag = 0.0;
            if !zero_g {
                for (k, pk) in ps.iter().enumerate() {
                    if k == j {
                        if with_diag && pk.gamma != 0.0 {
                            diag = pj.gamma * pk.gamma * g.dot(filament_integral(x, pk.z, cfg)?);
                        }
                        continue;
                    }
                    if pk.gamma != 0.0 {
                        u.add(filament_integral(x, pk.z, cfg)? * pk.gamma);
                    }
                }
                match (s.background.as_ref(), shift) {
                    (_, Some(w)) => u.add(Vec3::new(0.0, 0.0, w)),
                    (Some(bg), None) => u.add(background_velocity(x, bg)),
                    (None, None) => {}
                }
            }
            let nl = pj.gamma * g.dot(u.value());
            Ok([pj.gamma * pt, nl, diag])
        })
        .collect::<Result<_>>()?;
    let mut acc = [Neumaier::new(), Neumaier::new(), Neumaier::new(), Neumaier::new(), Neumaier::new()];
    for r in &rows {
        acc[0].add(r[0]);
        acc[1].add(r[1]);
        acc[2].add(r[2]);
        acc[3].add(r[0].abs());
        acc[4].add(r[1].abs());
    }
    let c = 2.0 * PI * h.kappa();
    Ok([
        c * acc[0].value(),
        c * acc[1].value(),
        c * acc[2].value(),
        c * acc[3].value(),
        c * acc[4].value(),
    ])
}

fn check_snapshots(snapshots: &[TrajectoryState], psi: &TestFunction) -> Result<()> {
    psi.validate()?;
    if snapshots.len() < MIN_SNAPSHOTS {
        return Err(Error::InsufficientSnapshots(snapshots.len()));
    }
    let first = snapshots[0].t;
    let last = snapshots[snapshots.len() - 1].t;
    let tol = 1e-12 * psi.horizon;
    if first.abs() > tol || last < psi.horizon - tol {
        return Err(Error::invalid(
            "snapshots_do_not_cover_horizon",
            format!("snapshots span [{first}, {last}], test function needs [0, {}]", psi.horizon),
        ));
    }
    if snapshots.windows(2).any(|w| !(w[1].t > w[0].t)) {
        return Err(Error::invalid("unordered_snapshots", "snapshot times must increase"));
    }
    for s in snapshots {
        if (s.particles.h.kappa() - psi.kappa).abs() > 1e-14 * psi.kappa {
            return Err(Error::invalid("kappa_mismatch", "test function and snapshots use different kappa"));
        }
    }
    Ok(())
}

/// Trapezoid weights over the snapshot times.
fn trapezoid_weights(ts: &[f64]) -> Vec<f64> {
    let n = ts.len();
    let mut w = vec![0.0; n];
    for i in 0..n - 1 {
        let d = 0.5 * (ts[i + 1] - ts[i]);
        w[i] += d;
        w[i + 1] += d;
    }
    w
}

/// Residual of the weak identity for balanced runs, with an additive background if present.
pub fn weak_residual(snapshots: &[TrajectoryState], psi: &TestFunction, cfg: &VelocityEvalConfig) -> Result<WeakResidual> {
    weak_residual_with(snapshots, psi, cfg, BackgroundMode::Additive)
}

/// Residual of the weak identity, treating a background as the simulation did.
///
/// Under [`BackgroundMode::Xi`] the particles are not balanced and the velocity is
/// `Ξ[ω] = u_𝒦[ω] + (Γ̄/κ)e₃`; the extra term enters as `∫ω (Γ̄/κ)∂₃ψ`.
pub fn weak_residual_with(
    snapshots: &[TrajectoryState],
    psi: &TestFunction,
    cfg: &VelocityEvalConfig,
    mode: BackgroundMode,
) -> Result<WeakResidual> {
    check_snapshots(snapshots, psi)?;
    cfg.validate()?;
    if (cfg.h().kappa() - psi.kappa).abs() > 1e-14 * psi.kappa {
        return Err(Error::invalid("kappa_mismatch", "test function and kernel use different kappa"));
    }
    for s in snapshots {
        match (s.background.as_ref(), mode) {
            (Some(bg), BackgroundMode::Xi) => crate::biotsavart::check_profile_normalization(&s.particles, bg)?,
            _ => s.particles.check_balanced()?,
        }
    }
    let ts: Vec<f64> = snapshots.iter().map(|s| s.t).collect();
    let wts = trapezoid_weights(&ts);
    let mut time = Neumaier::new();
    let mut nonlin = Neumaier::new();
    let mut diag = Neumaier::new();
    let mut scale = Neumaier::new();
    for (s, &w) in snapshots.iter().zip(&wts) {
        if psi.tau(s.t).0 == 0.0 && psi.tau(s.t).1 == 0.0 {
            continue;
        }
        let r = snapshot_terms(s, psi, cfg, mode)?;
        time.add(w * r[0]);
        nonlin.add(w * r[1]);
        diag.add(w * r[2]);
        scale.add(w * (r[3] + r[4]));
    }
    let s0 = &snapshots[0];
    let c = 2.0 * PI * psi.kappa;
    let mut init = Neumaier::new();
    let mut init_abs = Neumaier::new();
    for p in s0.particles.particles() {
        let v = p.gamma * psi.value(0.0, Vec3::from_slice(p.z));
        init.add(v);
        init_abs.add(v.abs());
    }
    let initial_term = c * init.value();
    let (time_term, nonlinear_term) = (time.value(), nonlin.value());
    let total = time_term + nonlinear_term + initial_term;
    let scale = scale.value() + c * init_abs.value();
    let diagonal = (cfg.blob_epsilon > 0.0).then(|| diag.value());
    Ok(WeakResidual {
        residual: total.abs(),
        relative: if scale > 0.0 { total.abs() / scale } else { 0.0 },
        time_term,
        nonlinear_term,
        initial_term,
        diagonal,
        residual_with_diagonal: diagonal.map(|d| (total + d).abs()),
        snapshots: snapshots.len(),
    })
}

/// Parts of the off-diagonal double integral `∫∫H_ψ ωω` under a cutoff pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Default)]
pub struct SplitParts {
    /// `∫∫ H φ_δ ωω`.
    pub near: f64,
    /// `∫∫ H (1 − φ_δ) ζ_R ζ_R ωω`.
    pub bulk: f64,
    /// `∫∫ H (1 − φ_δ)(1 − ζ_R ζ_R) ωω`.
    pub far: f64,
    /// `∫∫ H ωω` accumulated on the same nodes.
    pub total: f64,
    /// `∫∫ |H| φ_δ |ω||ω|`, the quantity bounded by `Cδ^{(2−s)/s}`.
    pub near_abs: f64,
}

impl SplitParts {
    fn axpy(&mut self, w: f64, o: &SplitParts) {
        self.near += w * o.near;
        self.bulk += w * o.bulk;
        self.far += w * o.far;
        self.total += w * o.total;
        self.near_abs += w * o.near_abs;
    }

    /// `|near + bulk + far − total|`.
    pub fn partition_error(&self) -> f64 {
        (self.near + self.bulk + self.far - self.total).abs()
    }
}

fn pair_parts(
    t: f64,
    zj: Vec2,
    zk: Vec2,
    psi: &TestFunction,
    cuts: &CutoffPair,
    cfg: &VelocityEvalConfig,
) -> Result<[f64; 5]> {
    let h = cfg.h();
    let x = Vec3::from_slice(zj);
    let gx = psi.gradient(t, x);
    let gk = psi.gradient(t, Vec3::from_slice(zk));
    if gx.norm() == 0.0 && gk.norm() == 0.0 {
        return Ok([0.0; 5]);
    }
    let ex = xi(x, &h);
    let zeta_x = cuts.zeta(zj.norm());
    let zeta_y = cuts.zeta(zk.norm());
    let kappa2 = 2.0 * h.kappa();
    let f = |th: f64| -> Result<[f64; 5]> {
        let y = helix_point(th, zk, &h);
        let gy = rotate(th, gk);
        let k = biot_savart_kernel(x - y, &cfg.kernel_cfg)?.value;
        let v = k.dot(xi(y, &h).cross(gx) - ex.cross(gy)) / kappa2;
        let ph = cuts.phi(periodic_distance(x, y, &h));
        let zz = zeta_x * zeta_y;
        Ok([v * ph, v * (1.0 - ph) * zz, v * (1.0 - ph) * (1.0 - zz), v, v.abs() * ph])
    };
    let (theta, d) = closest_approach(x, zk, &h);
    let reach = d.hypot(cfg.blob_epsilon).max(f64::MIN_POSITIVE);
    let w = (reach / (zk.dot(zk) + h.kappa() * h.kappa()).sqrt()).min(PI);
    let floor = 1e-6 * cfg.quad_tolerance * psi.gradient_scale();
    crate::quad::sinh_kronrod(f, theta, w, cfg.quad_tolerance, floor, MAX_PANELS)?.map_err(|u| {
        Error::QuadratureNonconvergence {
            estimate: u.estimate,
            tolerance: u.tolerance,
        }
    })
}

/// Splitting of the off-diagonal double integral on a single snapshot at time `t`.
pub fn splitting_at(
    state: &TrajectoryState,
    psi: &TestFunction,
    cuts: &CutoffPair,
    cfg: &VelocityEvalConfig,
) -> Result<SplitParts> {
    cuts.validate(psi)?;
    let h = state.particles.h;
    let ps = state.particles.particles();
    let t = state.t;
    let rows: Vec<[f64; 5]> = (0..ps.len())
        .into_par_iter()
        .map(|j| -> Result<[f64; 5]> {
            let mut acc = [Neumaier::new(), Neumaier::new(), Neumaier::new(), Neumaier::new(), Neumaier::new()];
            for (k, pk) in ps.iter().enumerate() {
                if k == j || pk.gamma == 0.0 || ps[j].gamma == 0.0 {
                    continue;
                }
                let v = pair_parts(t, ps[j].z, pk.z, psi, cuts, cfg)?;
                let g = ps[j].gamma * pk.gamma;
                for c in 0..4 {
                    acc[c].add(g * v[c]);
                }
                acc[4].add(g.abs() * v[4]);
            }
            Ok(acc.map(|a| a.value()))
        })
        .collect::<Result<_>>()?;
    let mut acc = [Neumaier::new(), Neumaier::new(), Neumaier::new(), Neumaier::new(), Neumaier::new()];
    for r in &rows {
        for c in 0..5 {
            acc[c].add(r[c]);
        }
    }
    let c = 2.0 * PI * h.kappa() * h.kappa();
    let [near, bulk, far, total, near_abs] = acc.map(|a| c * a.value());
    Ok(SplitParts {
        near,
        bulk,
        far,
        total,
        near_abs,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SplittingReport {
    pub cuts: CutoffPair,
    /// Parts integrated over time by the trapezoid rule.
    pub parts: SplitParts,
    pub per_snapshot: Vec<(f64, SplitParts)>,
    /// Largest `|near + bulk + far − total|` relative to `Σ|parts|`, over snapshots and the time integral.
    pub partition_error: f64,
}

/// Time-integrated splitting of `∫∫H_ψ ωω` over a snapshot series.
pub fn splitting_report(
    snapshots: &[TrajectoryState],
    psi: &TestFunction,
    cuts: &CutoffPair,
    cfg: &VelocityEvalConfig,
) -> Result<SplittingReport> {
    check_snapshots(snapshots, psi)?;
    cfg.validate()?;
    let ts: Vec<f64> = snapshots.iter().map(|s| s.t).collect();
    let wts = trapezoid_weights(&ts);
    let mut parts = SplitParts::default();
    let mut per_snapshot = Vec::with_capacity(snapshots.len());
    let mut worst: f64 = 0.0;
    let rel = |p: &SplitParts| {
        let s = p.near.abs() + p.bulk.abs() + p.far.abs() + p.total.abs();
        if s > 0.0 {
            p.partition_error() / s
        } else {
            0.0
        }
    };
    for (s, &w) in snapshots.iter().zip(&wts) {
        let p = splitting_at(s, psi, cuts, cfg)?;
        worst = worst.max(rel(&p));
        parts.axpy(w, &p);
        per_snapshot.push((s.t, p));
    }
    worst = worst.max(rel(&parts));
    Ok(SplittingReport {
        cuts: *cuts,
        parts,
        per_snapshot,
        partition_error: worst,
    })
}

/// Near-diagonal part `∫∫|H_ψ|φ_δ|ω||ω|` at a sequence of `δ` on one snapshot.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DeltaScaling {
    pub p: f64,
    /// `(2 − s)/s` with `s = p′/2`.
    pub predicted_exponent: f64,
    pub deltas: Vec<f64>,
    pub near_abs: Vec<f64>,
    /// `near_abs[i+1]/near_abs[i]`.
    pub ratios: Vec<f64>,
    /// `(δ_{i+1}/δ_i)^{predicted_exponent}`.
    pub predicted_ratios: Vec<f64>,
    /// Least-squares slope of `log near_abs` against `log δ`.
    pub fitted_exponent: f64,
}

/// `(2 − s)/s` with `s = p′/2`; defined for `p > 4/3`.
pub fn near_exponent(p: f64) -> Result<f64> {
    if !(p > 4.0 / 3.0) {
        return Err(Error::invalid("invalid_lp_exponent", "the weak formulation needs p > 4/3"));
    }
    let pp = if p.is_infinite() { 1.0 } else { p / (p - 1.0) };
    let s = 0.5 * pp;
    Ok((2.0 - s) / s)
}

pub fn delta_scaling(
    state: &TrajectoryState,
    psi: &TestFunction,
    deltas: &[f64],
    radius: f64,
    p: f64,
    cfg: &VelocityEvalConfig,
) -> Result<DeltaScaling> {
    let e = near_exponent(p)?;
    if deltas.len() < 2 {
        return Err(Error::invalid("invalid_delta_sequence", "need at least two deltas"));
    }
    let mut near_abs = Vec::with_capacity(deltas.len());
    for &d in deltas {
        let cuts = CutoffPair::new(d, radius, psi)?;
        near_abs.push(splitting_at(state, psi, &cuts, cfg)?.near_abs);
    }
    let ratios = near_abs.windows(2).map(|w| w[1] / w[0]).collect();
    let predicted_ratios = deltas.windows(2).map(|w| (w[1] / w[0]).powf(e)).collect();
    let xs: Vec<f64> = deltas.iter().map(|d| d.ln()).collect();
    let ys: Vec<f64> = near_abs.iter().map(|v| v.ln()).collect();
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    Ok(DeltaScaling {
        p,
        predicted_exponent: e,
        deltas: deltas.to_vec(),
        near_abs,
        ratios,
        predicted_ratios,
        fitted_exponent: sxy / sxx,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::Normalization;
    use crate::rng::CounterRng;

    fn setup() -> (HelixParams, TestFunction, KernelConfig) {
        let h = HelixParams::new(0.8).unwrap();
        let psi = TestFunction::helical_bump(h, Vec2::new(0.2, -0.1), 0.9, 1.3, 1.0).unwrap();
        let cfg = KernelConfig::new(h).with_normalization(Normalization::Physical);
        (h, psi, cfg)
    }

    fn random_point(r: &mut CounterRng, h: &HelixParams) -> Vec3 {
        Vec3::new(r.range(-1.0, 1.0), r.range(-1.0, 1.0), r.range(-h.half_period(), h.half_period()))
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let (h, psi, _) = setup();
        let mut r = CounterRng::new(3);
        for _ in 0..50 {
            let x = random_point(&mut r, &h);
            let t = r.range(0.0, 1.0);
            let g = psi.gradient(t, x);
            let e = 1e-5;
            for i in 0..3 {
                let d = Vec3::axis(i) * e;
                let fd = (8.0 * (psi.value(t, x + d) - psi.value(t, x - d))
                    - (psi.value(t, x + d * 2.0) - psi.value(t, x - d * 2.0)))
                    / (12.0 * e);
                assert!((fd - g.component(i)).abs() < 1e-8, "{i}: {fd} vs {}", g.component(i));
            }
            let ft = (psi.value(t + 1e-6, x) - psi.value(t - 1e-6, x)) / 2e-6;
            assert!((ft - psi.time_derivative(t, x)).abs() < 1e-6);
        }
    }

    #[test]
    fn test_function_is_helical() {
        let (h, psi, _) = setup();
        let x = Vec3::new(0.3, 0.1, 0.4);
        for th in [0.3, -1.2, 2.9] {
            let y = crate::geometry::screw(th, x, &h);
            assert!((psi.value(0.1, y) - psi.value(0.1, x)).abs() < 1e-14);
            assert!((psi.gradient(0.1, y) - rotate(th, psi.gradient(0.1, x))).norm() < 1e-13);
        }
        assert_eq!(psi.value(1.0, x), 0.0);
        assert_eq!(psi.value(0.4, x), psi.value(0.0, x));
    }

    #[test]
    fn four_term_and_reduced_forms_agree_and_are_symmetric() {
        let (h, psi, cfg) = setup();
        let mut r = CounterRng::new(11);
        for _ in 0..200 {
            let x = random_point(&mut r, &h);
            let y = random_point(&mut r, &h);
            let a = h_psi(0.2, x, y, &psi, &cfg).unwrap();
            let b = h_psi_reduced(0.2, x, y, &psi, &cfg).unwrap();
            let c = h_psi(0.2, y, x, &psi, &cfg).unwrap();
            let s = a.abs().max(1e-300);
            assert!((a - b).abs() <= 1e-12 * s.max(1.0), "{a} {b}");
            assert!((a - c).abs() <= 1e-12 * s.max(1.0), "{a} {c}");
        }
    }

    #[test]
    fn vanishes_outside_support() {
        let (_, psi, cfg) = setup();
        let x = Vec3::new(5.0, 0.0, 0.1);
        let y = Vec3::new(-4.0, 3.0, 0.3);
        assert_eq!(h_psi(0.0, x, y, &psi, &cfg).unwrap(), 0.0);
    }

    #[test]
    fn diagonal_is_singular_without_blob() {
        let (_, psi, cfg) = setup();
        let x = Vec3::new(0.1, 0.2, 0.0);
        assert!(matches!(h_psi(0.0, x, x, &psi, &cfg), Err(Error::SingularInput(..))));
    }

    #[test]
    fn cutoffs() {
        let d = 0.3;
        assert_eq!(cutoff_phi(d, 0.5 * d), 1.0);
        assert_eq!(cutoff_phi(d, 3.0 * d), 0.0);
        let mut prev = 1.0;
        for i in 0..400 {
            let r = 0.01 * i as f64;
            let z = cutoff_zeta(1.0, r);
            assert!((0.0..=1.0).contains(&z) && z <= prev);
            prev = z;
        }
        let (_, psi, _) = setup();
        assert!(CutoffPair::new(0.1, 1.0, &psi).is_err());
        assert!(CutoffPair::new(0.0, 20.0, &psi).is_err());
        assert!(CutoffPair::new(0.1, CutoffPair::minimal_radius(&psi, 1.1), &psi).is_ok());
    }

    #[test]
    fn near_exponent_values() {
        assert!((near_exponent(2.0).unwrap() - 1.0).abs() < 1e-15);
        assert!((near_exponent(f64::INFINITY).unwrap() - 3.0).abs() < 1e-15);
        assert!(near_exponent(1.2).is_err());
    }
}
