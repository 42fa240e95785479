//! Particle layouts that are not produced by mollification.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::biotsavart::{Particle, VorticityParticles};
use crate::bump::bump;
use crate::error::{Error, Result};
use crate::geometry::{HelixParams, Vec2};

/// Concentric rings of equally spaced filaments carrying a radial bump profile,
/// balanced by a negative outer ring.
///
/// Each ring is invariant under rotation by `2π/n`, so it only excites angular
/// modes that are multiples of `n`; coupling between rings whose radii differ by
/// a factor of three or more is below `3^{−n}`. Every particle also lies on a
/// symmetry axis of its own ring, where the radial velocity vanishes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RadialSteadySpec {
    #[serde(default = "default_rings")]
    pub ring_radii: Vec<f64>,
    #[serde(default = "default_per_ring")]
    pub particles_per_ring: usize,
    #[serde(default = "default_balance")]
    pub balance_radius: f64,
    #[serde(default = "default_amplitude")]
    pub amplitude: f64,
}

fn default_rings() -> Vec<f64> {
    vec![0.3, 0.9]
}
fn default_per_ring() -> usize {
    16
}
fn default_balance() -> f64 {
    2.7
}
fn default_amplitude() -> f64 {
    1.0
}

impl Default for RadialSteadySpec {
    fn default() -> Self {
        RadialSteadySpec {
            ring_radii: default_rings(),
            particles_per_ring: default_per_ring(),
            balance_radius: default_balance(),
            amplitude: default_amplitude(),
        }
    }
}

impl RadialSteadySpec {
    pub fn validate(&self) -> Result<()> {
        let ok = !self.ring_radii.is_empty()
            && self.ring_radii.windows(2).all(|w| w[1] > w[0])
            && self.ring_radii[0] > 0.0
            && self.balance_radius > *self.ring_radii.last().unwrap();
        if !ok {
            return Err(Error::invalid(
                "invalid_ring_radii",
                "ring radii must be positive, increasing and below balance_radius",
            ));
        }
        if self.particles_per_ring < 3 {
            return Err(Error::invalid("invalid_particles_per_ring", "need at least 3 particles per ring"));
        }
        if !(self.amplitude.is_finite() && self.amplitude != 0.0) {
            return Err(Error::invalid("invalid_profile_amplitude", "amplitude must be finite and nonzero"));
        }
        Ok(())
    }
}

pub fn radial_steady(h: HelixParams, spec: &RadialSteadySpec) -> Result<VorticityParticles> {
    spec.validate()?;
    let n = spec.particles_per_ring;
    let radii = &spec.ring_radii;
    let outer = 1.25 * radii.last().unwrap();
    let ring = |r: f64, gamma: f64, area: f64, ps: &mut Vec<Particle>| {
        for k in 0..n {
            let ph = 2.0 * PI * k as f64 / n as f64;
            ps.push(Particle {
                z: Vec2::new(r * ph.cos(), r * ph.sin()),
                gamma,
                area,
            });
        }
    };
    let mut ps = Vec::with_capacity(n * (radii.len() + 1));
    let mut total = 0.0;
    for (i, &r) in radii.iter().enumerate() {
        let lo = if i == 0 { 0.0 } else { 0.5 * (radii[i - 1] + r) };
        let hi = if i + 1 == radii.len() { r + 0.5 * (r - lo) } else { 0.5 * (r + radii[i + 1]) };
        let area = PI * (hi * hi - lo * lo) / n as f64;
        let gamma = spec.amplitude * bump(r / outer) * area;
        total += gamma * n as f64;
        ring(r, gamma, area, &mut ps);
    }
    let rb = spec.balance_radius;
    let width = rb - radii.last().unwrap();
    let area = 2.0 * PI * rb * width / n as f64;
    ring(rb, -total / n as f64, area, &mut ps);
    let w = VorticityParticles::new(h, ps)?;
    Ok(w)
}

/// Passive particles (`Γ = 0`) at the given slice points.
pub fn tracers(h: HelixParams, points: &[Vec2]) -> Result<VorticityParticles> {
    VorticityParticles::new(
        h,
        points
            .iter()
            .map(|&z| Particle {
                z,
                gamma: 0.0,
                area: 1.0,
            })
            .collect(),
    )
}
