use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{HelixParams, Vec2};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Particle {
    pub z: Vec2,
    pub gamma: f64,
    pub area: f64,
}

/// Slice-plane particles `{(z_j, Γ_j, a_j)}` representing a helical scalar vorticity.
///
/// `quads` optionally records grid quartets (counter-clockwise particle indices)
/// for the slice-area distortion diagnostic.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VorticityParticles {
    particles: Vec<Particle>,
    total_circulation: f64,
    pub h: HelixParams,
    pub quads: Vec<[usize; 4]>,
}

fn circulation(ps: &[Particle]) -> f64 {
    crate::sum::sum(ps.iter().map(|p| p.gamma))
}

impl VorticityParticles {
    pub fn new(h: HelixParams, particles: Vec<Particle>) -> Result<Self> {
        for (i, p) in particles.iter().enumerate() {
            if !(p.z.is_finite() && p.gamma.is_finite()) {
                return Err(Error::invalid(
                    "invalid_particle",
                    format!("particle {i} has a non-finite position or circulation"),
                ));
            }
            if !(p.area > 0.0 && p.area.is_finite()) {
                return Err(Error::invalid(
                    "invalid_particle_area",
                    format!("particle {i} has non-positive area {}", p.area),
                ));
            }
        }
        let total_circulation = circulation(&particles);
        Ok(VorticityParticles {
            particles,
            total_circulation,
            h,
            quads: Vec::new(),
        })
    }

    pub fn empty(h: HelixParams) -> Self {
        VorticityParticles {
            particles: Vec::new(),
            total_circulation: 0.0,
            h,
            quads: Vec::new(),
        }
    }

    pub fn with_quads(mut self, quads: Vec<[usize; 4]>) -> Result<Self> {
        let n = self.particles.len();
        if quads.iter().flatten().any(|&i| i >= n) {
            return Err(Error::invalid("invalid_quad", "quad index out of range"));
        }
        self.quads = quads;
        Ok(self)
    }

    pub fn particles(&self) -> &[Particle] {
        &self.particles
    }

    pub fn len(&self) -> usize {
        self.particles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.particles.is_empty()
    }

    pub fn total_circulation(&self) -> f64 {
        self.total_circulation
    }

    pub fn abs_circulation(&self) -> f64 {
        crate::sum::sum(self.particles.iter().map(|p| p.gamma.abs()))
    }

    /// `|ΣΓ| ≤ 1e-12 Σ|Γ|`.
    pub fn is_balanced(&self) -> bool {
        self.total_circulation.abs() <= 1e-12 * self.abs_circulation()
    }

    pub fn check_balanced(&self) -> Result<()> {
        if self.is_balanced() {
            Ok(())
        } else {
            Err(Error::UnbalancedVorticity {
                total: self.total_circulation,
                tolerance: 1e-12 * self.abs_circulation(),
            })
        }
    }

    pub fn positions(&self) -> Vec<Vec2> {
        self.particles.iter().map(|p| p.z).collect()
    }

    /// Same circulations and areas at new positions.
    pub fn moved_to(&self, positions: &[Vec2]) -> Self {
        assert_eq!(positions.len(), self.particles.len());
        let particles = self
            .particles
            .iter()
            .zip(positions)
            .map(|(p, &z)| Particle { z, ..*p })
            .collect();
        VorticityParticles {
            particles,
            total_circulation: self.total_circulation,
            h: self.h,
            quads: self.quads.clone(),
        }
    }

    /// Appends particles; the cached circulation is recomputed.
    pub fn extend(&mut self, more: impl IntoIterator<Item = Particle>) {
        self.particles.extend(more);
        self.total_circulation = circulation(&self.particles);
    }

    /// Circulations multiplied by `s`.
    pub fn scaled(&self, s: f64) -> Self {
        let particles: Vec<Particle> = self
            .particles
            .iter()
            .map(|p| Particle { gamma: p.gamma * s, ..*p })
            .collect();
        VorticityParticles {
            total_circulation: circulation(&particles),
            particles,
            h: self.h,
            quads: self.quads.clone(),
        }
    }

    /// Mean nearest-neighbour spacing estimated from the particle areas.
    pub fn mean_spacing(&self) -> f64 {
        if self.particles.is_empty() {
            return 0.0;
        }
        crate::sum::sum(self.particles.iter().map(|p| p.area.sqrt())) / self.particles.len() as f64
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(x: f64, y: f64, g: f64) -> Particle {
        Particle {
            z: Vec2::new(x, y),
            gamma: g,
            area: 0.1,
        }
    }

    #[test]
    fn cached_circulation_tracks_contents() {
        let h = HelixParams::new(1.0).unwrap();
        let mut w = VorticityParticles::new(h, vec![p(1.0, 0.0, 1.0), p(-1.0, 0.0, -1.0)]).unwrap();
        assert_eq!(w.total_circulation(), 0.0);
        assert!(w.is_balanced());
        w.extend([p(0.0, 1.0, 0.5)]);
        assert_eq!(w.total_circulation(), 0.5);
        assert!(w.check_balanced().is_err());
    }

    #[test]
    fn rejects_bad_particles() {
        let h = HelixParams::new(1.0).unwrap();
        let mut q = p(0.0, 0.0, 1.0);
        q.area = 0.0;
        assert_eq!(VorticityParticles::new(h, vec![q]).unwrap_err().code(), "invalid_particle_area");
        let q = p(f64::NAN, 0.0, 1.0);
        assert_eq!(VorticityParticles::new(h, vec![q]).unwrap_err().code(), "invalid_particle");
    }
}
