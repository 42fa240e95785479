//! The decomposition `Ξ[ω] = 𝒦∗((ω − φ(|ỹ|))ξ/κ) + ū` for unbalanced vorticity.
//!
//! Under the physical normalization the Biot–Savart velocity of the radial
//! vorticity `φ(|x̃|)ξ/κ` is `ū − (Γ̄/κ)e₃` with `Γ̄ = ∫φ r dr`: the axial part
//! `φe₃` gives the swirl of `ū` and the azimuthal part a solenoid-like axial
//! flow that vanishes outside the support. Hence `Ξ[ω] = 𝒦∗(ωξ/κ) + (Γ̄/κ)e₃`,
//! which depends on `φ` only through `Γ̄`. [`PhiSubtraction::Quadrature`]
//! discretizes `φ` into rings of filaments instead and serves as the check.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{HelixParams, Vec2, Vec3};
use crate::kernel::Normalization;
use crate::quad::GaussLegendre;
use crate::sum::Neumaier;

use super::filament::{velocity_filament_unchecked, VelocityEvalConfig};
use super::particles::{Particle, VorticityParticles};
use super::profile::{background_velocity, RadialProfile, SteadyBackground};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case", tag = "mode")]
pub enum PhiSubtraction {
    #[default]
    Analytic,
    Quadrature { radial: usize, angular: usize },
}

/// Relative mismatch allowed between `ΣΓ` and `2π∫φ r dr`.
pub const NORMALIZATION_TOLERANCE: f64 = 1e-10;

/// Checks `2π∫φ r dr == ΣΓ_j`, the condition for `ω − φ` to have zero integral over Ω.
pub fn check_profile_normalization(w: &VorticityParticles, bg: &SteadyBackground) -> Result<()> {
    let profile_total = 2.0 * PI * bg.weighted_integral();
    let residual = w.total_circulation() - profile_total;
    let scale = w.abs_circulation().max(profile_total.abs());
    if residual.abs() > NORMALIZATION_TOLERANCE * scale {
        return Err(Error::Normalization { residual });
    }
    Ok(())
}

/// Rings of filaments at Gauss–Legendre radii carrying `sign·φ`, with circulations
/// scaled so that their sum is exactly `sign·2π∫φ r dr`.
pub fn profile_particles(
    profile: &RadialProfile,
    h: HelixParams,
    radial: usize,
    angular: usize,
    sign: f64,
) -> Result<VorticityParticles> {
    if radial == 0 || angular < 3 {
        return Err(Error::invalid("invalid_profile_quadrature", "need radial >= 1 and angular >= 3"));
    }
    let g = GaussLegendre::cached(radial);
    let (a, b) = (profile.r_inner, profile.r_outer);
    let dphi = 2.0 * PI / angular as f64;
    let mut ps = Vec::with_capacity(radial * angular);
    let mut raw = Neumaier::new();
    for (&t, &wt) in g.nodes.iter().zip(&g.weights) {
        let r = 0.5 * (a + b) + 0.5 * (b - a) * t;
        let area = r * 0.5 * (b - a) * wt * dphi;
        let gamma = profile.value(r) * area;
        for k in 0..angular {
            let ph = dphi * k as f64;
            raw.add(gamma);
            ps.push(Particle {
                z: Vec2::new(r * ph.cos(), r * ph.sin()),
                gamma,
                area,
            });
        }
    }
    let raw = raw.value();
    let target = profile.circulation();
    let scale = if raw != 0.0 { sign * target / raw } else { 0.0 };
    for p in &mut ps {
        p.gamma *= scale;
    }
    VorticityParticles::new(h, ps)
}

/// `Ξ[w](x)` with the profile subtracted analytically.
pub fn xi_operator(x: Vec3, w: &VorticityParticles, bg: &SteadyBackground, cfg: &VelocityEvalConfig) -> Result<Vec3> {
    xi_operator_with(x, w, bg, cfg, PhiSubtraction::Analytic)
}

pub fn xi_operator_with(
    x: Vec3,
    w: &VorticityParticles,
    bg: &SteadyBackground,
    cfg: &VelocityEvalConfig,
    mode: PhiSubtraction,
) -> Result<Vec3> {
    Ok(xi_operator_many(&[x], w, bg, cfg, mode)?[0])
}

/// `Ξ[w]` at many targets; parallel over targets with a fixed summation order.
pub fn xi_operator_many(
    xs: &[Vec3],
    w: &VorticityParticles,
    bg: &SteadyBackground,
    cfg: &VelocityEvalConfig,
    mode: PhiSubtraction,
) -> Result<Vec<Vec3>> {
    check_profile_normalization(w, bg)?;
    match mode {
        PhiSubtraction::Analytic => {
            if cfg.kernel_cfg.normalization != Normalization::Physical {
                return Err(Error::invalid(
                    "xi_analytic_requires_physical",
                    "analytic profile subtraction holds for the physical normalization only",
                ));
            }
            let shift = Vec3::new(0.0, 0.0, bg.weighted_integral() / bg.h.kappa());
            xs.par_iter()
                .map(|&x| Ok(velocity_filament_unchecked(x, w, cfg)? + shift))
                .collect()
        }
        PhiSubtraction::Quadrature { radial, angular } => {
            let mut balanced = w.clone();
            let rings = profile_particles(&bg.profile, w.h, radial, angular, -1.0)?;
            balanced.extend(rings.particles().iter().copied());
            balanced.check_balanced()?;
            xs.par_iter()
                .map(|&x| Ok(velocity_filament_unchecked(x, &balanced, cfg)? + background_velocity(x, bg)))
                .collect()
        }
    }
}
