//! Direct slab quadrature of the Biot–Savart integral, independent of the filament reduction.
//!
//! `u(x) = ∫_Ω 𝒦(x − y) × ξ(y) ω(y)/κ dy` on `[−R, R]² × (−πκ, πκ]` with the
//! tensor trapezoid rule. The integrand is periodic in `y₃` and smooth with
//! compact support in `ỹ`, so the rule converges faster than any power. When `x`
//! may be near the support, a smooth cutoff `χ(|x − y|)` splits off a ball that
//! is integrated in spherical coordinates centred at `x`, where the `r²` Jacobian
//! cancels the point singularity.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::Serialize;

use crate::bump::transition;
use crate::error::{Error, Result};
use crate::geometry::{xi, Vec3};
use crate::kernel::{biot_savart_kernel, reduce_period, KernelConfig, Normalization};
use crate::quad::GaussLegendre;
use crate::sum::{Neumaier, Neumaier3};

use super::filament::VelocityEvalConfig;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OracleConfig {
    /// Relative tolerance on successive grid refinements.
    pub tolerance: f64,
    pub start_cells: usize,
    pub max_cells: usize,
    /// Radius of the excised ball around the target; `None` picks `min(R, πκ)/4`.
    pub ball_radius: Option<f64>,
    /// Relative tolerance of the balance check `|∫ω| ≤ tol·∫|ω|`.
    pub balance_tolerance: f64,
}

impl Default for OracleConfig {
    fn default() -> Self {
        OracleConfig {
            tolerance: 1e-6,
            start_cells: 32,
            max_cells: 128,
            ball_radius: None,
            balance_tolerance: 1e-6,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OracleValue {
    pub value: Vec3,
    pub error_estimate: f64,
    pub cells: usize,
}

struct Level {
    fine: Vec3,
    coarse: Vec3,
    mass: f64,
    abs_mass: f64,
}

fn chi(d: f64, rho: f64) -> f64 {
    // 1 on [0, ρ/2], 0 beyond ρ
    transition(2.0 - 2.0 * d / rho)
}

fn periodic_distance(a: Vec3, b: Vec3, kc: &KernelConfig) -> f64 {
    let d = a - b;
    let dz = reduce_period(d.z, &kc.h);
    (d.x * d.x + d.y * d.y + dz * dz).sqrt()
}

fn grid_level<F>(x: Vec3, omega: &F, r: f64, n: usize, ball: Option<f64>, kc: &KernelConfig) -> Result<Level>
where
    F: Fn(Vec3) -> f64 + Sync,
{
    let h = kc.h;
    let kappa = h.kappa();
    let period = h.period();
    let nz = 2 * ((n as f64 * period / (4.0 * r)).ceil() as usize).max(4);
    let dx = 2.0 * r / n as f64;
    let dz = period / nz as f64;
    let planes: Vec<Result<(Vec3, Vec3, f64, f64)>> = (0..nz)
        .into_par_iter()
        .map(|k| {
            let y3 = -0.5 * period + dz * k as f64;
            let mut fine = Neumaier3::new();
            let mut coarse = Neumaier3::new();
            let mut mass = Neumaier::new();
            let mut abs = Neumaier::new();
            for i in 1..n {
                for j in 1..n {
                    let y = Vec3::new(-r + dx * i as f64, -r + dx * j as f64, y3);
                    let w = omega(y);
                    if w == 0.0 {
                        continue;
                    }
                    mass.add(w);
                    abs.add(w.abs());
                    let cut = match ball {
                        Some(rho) => 1.0 - chi(periodic_distance(x, y, kc), rho),
                        None => 1.0,
                    };
                    if cut == 0.0 {
                        continue;
                    }
                    let k3 = biot_savart_kernel(x - y, kc)?.value;
                    let f = k3.cross(xi(y, &h)) * (w * cut / kappa);
                    fine.add(f);
                    if i % 2 == 0 && j % 2 == 0 && k % 2 == 0 {
                        coarse.add(f);
                    }
                }
            }
            Ok((fine.value(), coarse.value(), mass.value(), abs.value()))
        })
        .collect();
    let mut fine = Neumaier3::new();
    let mut coarse = Neumaier3::new();
    let mut mass = Neumaier::new();
    let mut abs = Neumaier::new();
    for p in planes {
        let (f, c, m, a) = p?;
        fine.add(f);
        coarse.add(c);
        mass.add(m);
        abs.add(a);
    }
    let cell = dx * dx * dz;
    Ok(Level {
        fine: fine.value() * cell,
        coarse: coarse.value() * (8.0 * cell),
        mass: mass.value() * cell,
        abs_mass: abs.value() * cell,
    })
}

fn ball_part<F>(x: Vec3, omega: &F, rho: f64, ns: usize, kc: &KernelConfig) -> Result<Vec3>
where
    F: Fn(Vec3) -> f64,
{
    let h = kc.h;
    let gs = GaussLegendre::cached(ns);
    let gc = GaussLegendre::cached(ns);
    let nphi = 2 * ns;
    let mut acc = Neumaier3::new();
    for (&s_node, &s_w) in gs.nodes.iter().zip(&gs.weights) {
        let s = 0.5 * rho * (s_node + 1.0);
        let ws = 0.5 * rho * s_w;
        let c = chi(s, rho);
        if c == 0.0 {
            continue;
        }
        for (&ct, &wc) in gc.nodes.iter().zip(&gc.weights) {
            let st = (1.0 - ct * ct).sqrt();
            for m in 0..nphi {
                let ph = 2.0 * PI * (m as f64 + 0.5) / nphi as f64;
                let dir = Vec3::new(st * ph.cos(), st * ph.sin(), ct);
                let y = x + dir * s;
                let w = omega(y);
                if w == 0.0 {
                    continue;
                }
                let k3 = biot_savart_kernel(x - y, kc)?.value;
                let weight = ws * wc * (2.0 * PI / nphi as f64) * s * s * c * w / h.kappa();
                acc.add(k3.cross(xi(y, &h)) * weight);
            }
        }
    }
    Ok(acc.value())
}

/// [`velocity_oracle_3d_with`] using [`OracleConfig::default`].
pub fn velocity_oracle_3d<F>(x: Vec3, omega: F, support_radius: f64, cfg: &VelocityEvalConfig) -> Result<OracleValue>
where
    F: Fn(Vec3) -> f64 + Sync,
{
    velocity_oracle_3d_with(x, omega, support_radius, cfg, &OracleConfig::default())
}

/// Velocity of a helical vorticity `ω` (given on ℝ³, zero for `|ỹ| ≥ support_radius`)
/// by direct 3D quadrature, with an error estimate from the last grid halving.
pub fn velocity_oracle_3d_with<F>(
    x: Vec3,
    omega: F,
    support_radius: f64,
    cfg: &VelocityEvalConfig,
    ocfg: &OracleConfig,
) -> Result<OracleValue>
where
    F: Fn(Vec3) -> f64 + Sync,
{
    if !(support_radius > 0.0 && support_radius.is_finite()) {
        return Err(Error::invalid("invalid_support_radius", "support_radius must be positive"));
    }
    if ocfg.start_cells < 4 || !ocfg.start_cells.is_multiple_of(2) || ocfg.max_cells < ocfg.start_cells {
        return Err(Error::invalid("invalid_oracle_cells", "need even start_cells >= 4 and max_cells >= start_cells"));
    }
    let kc = KernelConfig {
        blob_epsilon: 0.0,
        ..cfg.kernel_cfg
    };
    kc.validate()?;
    let h = kc.h;
    let rho = ocfg
        .ball_radius
        .unwrap_or(0.25 * support_radius.min(PI * h.kappa()));
    let near = x.planar_norm() < support_radius + rho;
    if near && kc.normalization == Normalization::Paper {
        return Err(Error::invalid(
            "oracle_paper_in_support",
            "paper normalization has a line singularity; place the target outside the support",
        ));
    }
    let ball = if near { Some(rho) } else { None };
    let (ball_value, ball_err) = if near {
        let fine = ball_part(x, &omega, rho, 32, &kc)?;
        let coarse = ball_part(x, &omega, rho, 20, &kc)?;
        (fine, (fine - coarse).norm())
    } else {
        (Vec3::ZERO, 0.0)
    };
    let mut n = ocfg.start_cells;
    loop {
        let level = grid_level(x, &omega, support_radius, n, ball, &kc)?;
        if level.mass.abs() > ocfg.balance_tolerance * level.abs_mass {
            return Err(Error::UnbalancedVorticity {
                total: level.mass,
                tolerance: ocfg.balance_tolerance * level.abs_mass,
            });
        }
        let value = level.fine + ball_value;
        let err = (level.fine - level.coarse).norm() + ball_err;
        let scale = value.norm();
        if err <= ocfg.tolerance * scale {
            return Ok(OracleValue {
                value,
                error_estimate: err,
                cells: n,
            });
        }
        if 2 * n > ocfg.max_cells {
            return Err(Error::QuadratureNonconvergence {
                estimate: err,
                tolerance: ocfg.tolerance * scale,
            });
        }
        n *= 2;
    }
}
