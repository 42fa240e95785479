//! Velocity of helical filaments.
//!
//! A helical vorticity concentrated on the helix through `z` contributes
//! `Γ ∫_{−π}^{π} 𝒦(x − S_θ(z,0)) × ξ(S_θ(z,0)) dθ` to the velocity at `x`
//! (substituting `y = S_θ(z,0)` in the slab integral; the Jacobian `κ` cancels
//! the `1/κ` of `ωξ/κ`). The integrand is `2π`-periodic in `θ`.
//!
//! The default rule splits the period at the closest approach `θ*` and maps
//! each half by `θ = θ* ± w sinh(u·asinh(π/w))`, `u ∈ [0, 1]`, where `w` is the
//! angular width of the peak. Adaptive Gauss–Kronrod 10/21 in `u` then needs
//! about 21 nodes per half for any pair, close or far. The periodic trapezoid
//! rule with node doubling is kept as [`ThetaRule::Trapezoid`]; it is the only
//! rule used under the paper normalization, whose kernel is also singular on
//! the vertical line `x̃ = ỹ`.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{helix_point, xi, HelixParams, Vec2, Vec3};
use crate::kernel::{biot_savart_kernel, reduce_period, KernelConfig, Normalization};
use crate::sum::Neumaier3;

use super::particles::VorticityParticles;

const MAX_TRAPEZOID: usize = 1 << 14;
const MAX_PANELS: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum ThetaRule {
    #[default]
    SinhKronrod,
    Trapezoid,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct VelocityEvalConfig {
    /// Starting node count of the trapezoid rule.
    pub theta_quadrature_points: usize,
    pub theta_rule: ThetaRule,
    pub kernel_cfg: KernelConfig,
    pub blob_epsilon: f64,
    /// Relative tolerance of each pair integral, measured against `∫|integrand|`.
    pub quad_tolerance: f64,
}

impl VelocityEvalConfig {
    /// Physical normalization with image sums up to `|x̃| = 4κ`.
    pub fn new(h: HelixParams) -> Self {
        let kernel_cfg = KernelConfig {
            image_truncation: 8,
            switch_radius: 4.0 * h.kappa(),
            ..KernelConfig::new(h).with_normalization(Normalization::Physical)
        };
        VelocityEvalConfig {
            theta_quadrature_points: 64,
            theta_rule: ThetaRule::SinhKronrod,
            kernel_cfg,
            blob_epsilon: 0.0,
            quad_tolerance: 1e-8,
        }
    }

    pub fn with_blob(mut self, eps: f64) -> Self {
        self.blob_epsilon = eps;
        self.kernel_cfg.blob_epsilon = eps;
        self
    }

    pub fn with_normalization(mut self, n: Normalization) -> Self {
        self.kernel_cfg.normalization = n;
        self
    }

    pub fn with_rule(mut self, r: ThetaRule) -> Self {
        self.theta_rule = r;
        self
    }

    pub fn with_tolerance(mut self, tol: f64) -> Self {
        self.quad_tolerance = tol;
        self
    }

    pub fn h(&self) -> HelixParams {
        self.kernel_cfg.h
    }

    pub fn validate(&self) -> Result<()> {
        if self.theta_quadrature_points < 8 {
            return Err(Error::invalid(
                "invalid_theta_quadrature_points",
                "theta_quadrature_points must be >= 8",
            ));
        }
        if !(self.quad_tolerance > 0.0 && self.quad_tolerance < 1.0) {
            return Err(Error::invalid("invalid_quad_tolerance", "quad_tolerance must lie in (0, 1)"));
        }
        if self.blob_epsilon != self.kernel_cfg.blob_epsilon {
            return Err(Error::invalid(
                "invalid_blob_epsilon",
                "blob_epsilon differs from kernel_cfg.blob_epsilon",
            ));
        }
        self.kernel_cfg.validate()
    }
}

#[inline]
fn integrand(x: Vec3, z: Vec2, theta: f64, cfg: &VelocityEvalConfig) -> Result<Vec3> {
    let h = cfg.kernel_cfg.h;
    let y = helix_point(theta, z, &h);
    let k = biot_savart_kernel(x - y, &cfg.kernel_cfg)?.value;
    Ok(k.cross(xi(y, &h)))
}

/// Squared periodic distance from `x` to the helix point at `theta`, with its
/// first two `θ`-derivatives.
#[inline]
fn dist2(x: Vec3, z: Vec2, theta: f64, h: &HelixParams) -> (f64, f64, f64) {
    let v = crate::geometry::rotate2(theta, z);
    let vp = Vec2::new(v.y, -v.x);
    let p = x.planar() - v;
    let s = reduce_period(x.z - h.kappa() * theta, h);
    let k = h.kappa();
    let xt = x.planar();
    (
        p.dot(p) + s * s,
        -2.0 * xt.dot(vp) - 2.0 * k * s,
        2.0 * xt.dot(v) + 2.0 * k * k,
    )
}

/// Closest approach `(θ*, d*)` of the helix through `z` to `x`, with `θ*` in `[−π, π)`.
pub fn closest_approach(x: Vec3, z: Vec2, h: &HelixParams) -> (f64, f64) {
    const SAMPLES: usize = 32;
    let step = 2.0 * PI / SAMPLES as f64;
    let mut best = (0.0, f64::INFINITY);
    for i in 0..SAMPLES {
        let t = -PI + step * i as f64;
        let (d, _, _) = dist2(x, z, t, h);
        if d < best.1 {
            best = (t, d);
        }
    }
    let (lo, hi) = (best.0 - step, best.0 + step);
    let mut t = best.0;
    let mut f = best.1;
    for _ in 0..30 {
        let (_, d1, d2) = dist2(x, z, t, h);
        if d2 <= 0.0 {
            break;
        }
        let next = (t - d1 / d2).clamp(lo, hi);
        let (fnext, _, _) = dist2(x, z, next, h);
        if fnext > f {
            break;
        }
        let moved = (next - t).abs();
        t = next;
        f = fnext;
        if moved < 1e-14 {
            break;
        }
    }
    (t, f.max(0.0).sqrt())
}

fn sinh_kronrod(x: Vec3, z: Vec2, theta_star: f64, w: f64, cfg: &VelocityEvalConfig) -> Result<Vec3> {
    crate::quad::sinh_kronrod(|t| integrand(x, z, t, cfg), theta_star, w, cfg.quad_tolerance, 0.0, MAX_PANELS)?.map_err(|u| {
        Error::QuadratureNonconvergence {
            estimate: u.estimate,
            tolerance: u.tolerance,
        }
    })
}

fn trapezoid(x: Vec3, z: Vec2, n_start: usize, cfg: &VelocityEvalConfig) -> Result<Vec3> {
    let mut n = n_start;
    let step = 2.0 * PI / n as f64;
    let mut values: Vec<Vec3> = (0..n)
        .map(|i| integrand(x, z, -PI + step * i as f64, cfg))
        .collect::<Result<_>>()?;
    loop {
        let step = 2.0 * PI / n as f64;
        let mut full = Neumaier3::new();
        let mut half = Neumaier3::new();
        let mut abs = 0.0;
        for (i, v) in values.iter().enumerate() {
            full.add(*v);
            if i % 2 == 0 {
                half.add(*v);
            }
            abs += v.norm();
        }
        let i_full = full.value() * step;
        let err = (i_full - half.value() * (2.0 * step)).norm();
        let scale = abs * step;
        if err <= cfg.quad_tolerance * scale {
            return Ok(i_full);
        }
        if 2 * n > MAX_TRAPEZOID {
            return Err(Error::QuadratureNonconvergence {
                estimate: err,
                tolerance: cfg.quad_tolerance * scale,
            });
        }
        let fine = PI / n as f64;
        let mut next = Vec::with_capacity(2 * n);
        for (i, v) in values.iter().enumerate() {
            next.push(*v);
            next.push(integrand(x, z, -PI + fine * (2 * i + 1) as f64, cfg)?);
        }
        values = next;
        n *= 2;
    }
}

/// `∫_{−π}^{π} 𝒦(x − S_θ(z,0)) × ξ(S_θ(z,0)) dθ` for a unit-circulation filament through `z`.
pub fn filament_integral(x: Vec3, z: Vec2, cfg: &VelocityEvalConfig) -> Result<Vec3> {
    let h = cfg.kernel_cfg.h;
    let (theta_star, d_star) = closest_approach(x, z, &h);
    let eps = cfg.blob_epsilon;
    let scale = x.planar_norm() + z.norm() + h.kappa();
    if eps == 0.0 && d_star <= 1e-12 * scale {
        return Err(Error::OnFilament);
    }
    let paper = cfg.kernel_cfg.normalization == Normalization::Paper;
    if paper || cfg.theta_rule == ThetaRule::Trapezoid {
        let ell = (z.dot(z) + h.kappa() * h.kappa()).sqrt();
        let w = (d_star * d_star + eps * eps).sqrt() / ell;
        let want = (24.0 / w).clamp(cfg.theta_quadrature_points as f64, MAX_TRAPEZOID as f64);
        return trapezoid(x, z, (want as usize).next_power_of_two(), cfg);
    }
    let ell = (z.dot(z) + h.kappa() * h.kappa()).sqrt();
    let w = ((d_star * d_star + eps * eps).sqrt() / ell).min(PI);
    sinh_kronrod(x, z, theta_star, w, cfg)
}

/// Velocity of the particle set at `x` without the balance check.
pub(crate) fn velocity_filament_unchecked(
    x: Vec3,
    w: &VorticityParticles,
    cfg: &VelocityEvalConfig,
) -> Result<Vec3> {
    let mut acc = Neumaier3::new();
    for p in w.particles() {
        if p.gamma == 0.0 {
            continue;
        }
        acc.add(filament_integral(x, p.z, cfg)? * p.gamma);
    }
    Ok(acc.value())
}

/// Velocity induced at `x` by balanced helical filaments.
pub fn velocity_filament(x: Vec3, w: &VorticityParticles, cfg: &VelocityEvalConfig) -> Result<Vec3> {
    w.check_balanced()?;
    velocity_filament_unchecked(x, w, cfg)
}

/// [`velocity_filament`] at many targets; the result is independent of the thread count.
pub fn velocity_filament_many(
    xs: &[Vec3],
    w: &VorticityParticles,
    cfg: &VelocityEvalConfig,
) -> Result<Vec<Vec3>> {
    w.check_balanced()?;
    velocity_many_unchecked(xs, w, cfg)
}

pub(crate) fn velocity_many_unchecked(
    xs: &[Vec3],
    w: &VorticityParticles,
    cfg: &VelocityEvalConfig,
) -> Result<Vec<Vec3>> {
    xs.par_iter()
        .map(|&x| velocity_filament_unchecked(x, w, cfg))
        .collect()
}
