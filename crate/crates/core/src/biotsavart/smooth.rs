//! Velocity of a smooth slice vorticity supported in a disc.
//!
//! `u(x) = ∫ ω(z) F(x, z) dz` where `F` is the unit filament integral. `F` is
//! singular like `1/|z − z₀|` at the slice foot `z₀` of the helix through `x`.
//! If `z₀` lies in the disc the quadrature is polar about `z₀` with `ρ = s²`,
//! which leaves an integrand smooth in `(s, ϕ)`; otherwise it is polar about
//! the disc centre.

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{project_to_slice, Vec2, Vec3};
use crate::quad::GaussLegendre;
use crate::sum::Neumaier3;

use super::filament::{filament_integral, VelocityEvalConfig};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SmoothQuadrature {
    pub radial: usize,
    pub angular: usize,
}

impl Default for SmoothQuadrature {
    fn default() -> Self {
        SmoothQuadrature {
            radial: 40,
            angular: 64,
        }
    }
}

/// Velocity at `x` of the helical vorticity whose slice trace is `omega`, zero
/// outside the disc `|z − center| < radius`. No balance condition is imposed.
pub fn velocity_smooth<F>(
    x: Vec3,
    omega: F,
    center: Vec2,
    radius: f64,
    cfg: &VelocityEvalConfig,
    q: SmoothQuadrature,
) -> Result<Vec3>
where
    F: Fn(Vec2) -> f64,
{
    if !(radius > 0.0) || q.radial == 0 || q.angular < 3 {
        return Err(Error::invalid("invalid_smooth_quadrature", "need radius > 0, radial >= 1, angular >= 3"));
    }
    let h = cfg.h();
    let (z0, _) = project_to_slice(x, &h);
    let g = GaussLegendre::cached(q.radial);
    let dphi = 2.0 * PI / q.angular as f64;
    let off = z0 - center;
    let inside = off.norm() < radius;
    let origin = if inside { z0 } else { center };
    let mut acc = Neumaier3::new();
    for m in 0..q.angular {
        let ph = dphi * (m as f64 + 0.5);
        let e = Vec2::new(ph.cos(), ph.sin());
        let rho_max = if inside {
            let b = e.dot(off);
            -b + (b * b - (off.dot(off) - radius * radius)).sqrt()
        } else {
            radius
        };
        let s_max = if inside { rho_max.sqrt() } else { rho_max };
        for (&t, &wt) in g.nodes.iter().zip(&g.weights) {
            let s = 0.5 * s_max * (t + 1.0);
            let (rho, jac) = if inside { (s * s, 2.0 * s) } else { (s, 1.0) };
            let z = origin + e * rho;
            let w = omega(z);
            if w == 0.0 {
                continue;
            }
            let weight = 0.5 * s_max * wt * jac * rho * dphi * w;
            acc.add(filament_integral(x, z, cfg)? * weight);
        }
    }
    Ok(acc.value())
}
