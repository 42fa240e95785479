//! Slice initial data, the mollifier `ρ_n` and particle seeding.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::biotsavart::{Particle, VorticityParticles};
use crate::bump::{bump, BUMP_MASS_2D};
use crate::error::{Error, Result};
use crate::geometry::{HelixParams, Vec2};
use crate::quad::adaptive;
use crate::sum::Neumaier;

/// Minimum number of grid spacings across the mollified support.
pub const MIN_ACROSS: usize = 16;

/// `ρ_n(z) = (n/r₀)² ρ(n z/r₀)` with `ρ = bump(|z|)/∫bump`, supported in `|z| < r₀/n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MollifierSpec {
    pub n: usize,
    #[serde(default = "one")]
    pub base_radius: f64,
}

fn one() -> f64 {
    1.0
}

impl MollifierSpec {
    pub fn new(n: usize) -> Result<Self> {
        let m = MollifierSpec { n, base_radius: 1.0 };
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::invalid("invalid_mollifier_index", "mollifier index n must be >= 1"));
        }
        if !(self.base_radius > 0.0 && self.base_radius.is_finite()) {
            return Err(Error::invalid("invalid_mollifier_radius", "base_radius must be positive"));
        }
        Ok(())
    }

    pub fn support_radius(&self) -> f64 {
        self.base_radius / self.n as f64
    }

    pub fn value(&self, z: Vec2) -> f64 {
        let r = self.support_radius();
        bump(z.norm() / r) / (BUMP_MASS_2D * r * r)
    }
}

/// A disc of constant vorticity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Disc {
    pub center: Vec2,
    pub radius: f64,
    pub amplitude: f64,
}

/// Piecewise-constant slice vorticity as a signed sum of discs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SliceField {
    pub discs: Vec<Disc>,
}

impl SliceField {
    pub fn disc_patch(center: Vec2, radius: f64, amplitude: f64) -> Result<Self> {
        SliceField {
            discs: vec![Disc {
                center,
                radius,
                amplitude,
            }],
        }
        .validated()
    }

    /// `+amplitude` on the disc at `(s/2, 0)`, `−amplitude` on the one at `(−s/2, 0)`.
    pub fn dipole(separation: f64, radius: f64, amplitude: f64) -> Result<Self> {
        if !(separation > 2.0 * radius) {
            return Err(Error::invalid("invalid_dipole", "separation must exceed the disc diameter"));
        }
        let c = Vec2::new(0.5 * separation, 0.0);
        SliceField {
            discs: vec![
                Disc {
                    center: c,
                    radius,
                    amplitude,
                },
                Disc {
                    center: -c,
                    radius,
                    amplitude: -amplitude,
                },
            ],
        }
        .validated()
    }

    /// Annulus `r_inner < |z| < r_outer`.
    pub fn ring(r_inner: f64, r_outer: f64, amplitude: f64) -> Result<Self> {
        if !(r_inner > 0.0 && r_outer > r_inner) {
            return Err(Error::invalid("invalid_ring", "need 0 < r_inner < r_outer"));
        }
        SliceField {
            discs: vec![
                Disc {
                    center: Vec2::ZERO,
                    radius: r_outer,
                    amplitude,
                },
                Disc {
                    center: Vec2::ZERO,
                    radius: r_inner,
                    amplitude: -amplitude,
                },
            ],
        }
        .validated()
    }

    pub fn validated(self) -> Result<Self> {
        if self.discs.is_empty() {
            return Err(Error::invalid("invalid_slice_field", "slice field needs at least one disc"));
        }
        for d in &self.discs {
            if !(d.radius > 0.0 && d.radius.is_finite() && d.center.is_finite() && d.amplitude.is_finite()) {
                return Err(Error::invalid("invalid_slice_field", "disc radius must be positive and values finite"));
            }
        }
        Ok(self)
    }

    pub fn value(&self, z: Vec2) -> f64 {
        self.discs
            .iter()
            .map(|d| if (z - d.center).norm() < d.radius { d.amplitude } else { 0.0 })
            .sum()
    }

    /// `∫ω⁰ dz`.
    pub fn integral(&self) -> f64 {
        crate::sum::sum(self.discs.iter().map(|d| d.amplitude * PI * d.radius * d.radius))
    }

    /// Bounding box `(min, max)` of the support.
    pub fn bounds(&self) -> (Vec2, Vec2) {
        let mut lo = Vec2::new(f64::INFINITY, f64::INFINITY);
        let mut hi = Vec2::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
        for d in &self.discs {
            lo.x = lo.x.min(d.center.x - d.radius);
            lo.y = lo.y.min(d.center.y - d.radius);
            hi.x = hi.x.max(d.center.x + d.radius);
            hi.y = hi.y.max(d.center.y + d.radius);
        }
        (lo, hi)
    }

    /// `(ρ_n ∗ ω⁰)(z)`.
    pub fn mollified(&self, m: &MollifierSpec, z: Vec2) -> f64 {
        crate::sum::sum(self.discs.iter().map(|d| d.amplitude * disc_convolution(m, z, d)))
    }
}

/// `(ρ_n ∗ 1_D)(z) = ∫₀^{r_n} ρ̂(s) s θ(s) ds` where `θ(s)` is the angle of the
/// circle of radius `s` about `z` inside the disc.
fn disc_convolution(m: &MollifierSpec, z: Vec2, disc: &Disc) -> f64 {
    let rn = m.support_radius();
    let d = (z - disc.center).norm();
    let rr = disc.radius;
    if d >= rr + rn {
        return 0.0;
    }
    let norm = 1.0 / (BUMP_MASS_2D * rn * rn);
    let theta = |s: f64| -> f64 {
        if s <= rr - d {
            2.0 * PI
        } else if s >= rr + d || s <= d - rr {
            0.0
        } else {
            let c = ((s * s + d * d - rr * rr) / (2.0 * s * d)).clamp(-1.0, 1.0);
            2.0 * c.acos()
        }
    };
    let f = |s: f64| bump(s / rn) * s * theta(s) * norm;
    let mut cuts = vec![0.0];
    for k in [(rr - d).abs(), rr + d] {
        if k > 0.0 && k < rn {
            cuts.push(k);
        }
    }
    cuts.push(rn);
    cuts.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mut acc = Neumaier::new();
    for w in cuts.windows(2) {
        if w[1] > w[0] {
            acc.add(adaptive(f, w[0], w[1], 1e-15, 1e-13, 400).value);
        }
    }
    acc.value()
}

/// Particles on the grid `spacing·(i + ½, j + ½)` carrying `Γ = (ρ_n ∗ ω⁰)(z)·spacing²`,
/// with grid quartets recorded for the area diagnostic.
pub fn mollify_initial(
    omega0: &SliceField,
    m: &MollifierSpec,
    spacing: f64,
    h: HelixParams,
) -> Result<VorticityParticles> {
    m.validate()?;
    if !(spacing > 0.0 && spacing.is_finite()) {
        return Err(Error::invalid("invalid_resolution", "particle spacing must be positive"));
    }
    let rn = m.support_radius();
    let (lo, hi) = omega0.bounds();
    let (lo, hi) = (Vec2::new(lo.x - rn, lo.y - rn), Vec2::new(hi.x + rn, hi.y + rn));
    let extent = (hi.x - lo.x).max(hi.y - lo.y);
    let across = (extent / spacing).floor() as usize;
    if across < MIN_ACROSS {
        return Err(Error::ResolutionTooCoarse { across });
    }
    let i0 = (lo.x / spacing - 0.5).floor() as i64;
    let i1 = (hi.x / spacing - 0.5).ceil() as i64;
    let j0 = (lo.y / spacing - 0.5).floor() as i64;
    let j1 = (hi.y / spacing - 0.5).ceil() as i64;
    let nx = (i1 - i0 + 1) as usize;
    let ny = (j1 - j0 + 1) as usize;
    let mut values = vec![0.0; nx * ny];
    let mut vmax: f64 = 0.0;
    for jj in 0..ny {
        for ii in 0..nx {
            let z = Vec2::new(
                spacing * ((i0 + ii as i64) as f64 + 0.5),
                spacing * ((j0 + jj as i64) as f64 + 0.5),
            );
            let v = omega0.mollified(m, z);
            vmax = vmax.max(v.abs());
            values[jj * nx + ii] = v;
        }
    }
    let floor = 1e-13 * vmax;
    let area = spacing * spacing;
    let mut index = vec![usize::MAX; nx * ny];
    let mut ps = Vec::new();
    for jj in 0..ny {
        for ii in 0..nx {
            let v = values[jj * nx + ii];
            if v.abs() > floor {
                index[jj * nx + ii] = ps.len();
                ps.push(Particle {
                    z: Vec2::new(
                        spacing * ((i0 + ii as i64) as f64 + 0.5),
                        spacing * ((j0 + jj as i64) as f64 + 0.5),
                    ),
                    gamma: v * area,
                    area,
                });
            }
        }
    }
    let mut quads = Vec::new();
    for jj in 0..ny.saturating_sub(1) {
        for ii in 0..nx.saturating_sub(1) {
            let q = [
                index[jj * nx + ii],
                index[jj * nx + ii + 1],
                index[(jj + 1) * nx + ii + 1],
                index[(jj + 1) * nx + ii],
            ];
            if q.iter().all(|&k| k != usize::MAX) {
                quads.push(q);
            }
        }
    }
    VorticityParticles::new(h, ps)?.with_quads(quads)
}

/// Discrete `(Σ|Γ_j/a_j|^q a_j)^{1/q}`; `q = ∞` gives `max|Γ_j/a_j|`.
pub fn particle_lq_norm(w: &VorticityParticles, q: f64) -> f64 {
    if q.is_infinite() {
        return w
            .particles()
            .iter()
            .map(|p| (p.gamma / p.area).abs())
            .fold(0.0, f64::max);
    }
    let s = crate::sum::sum(w.particles().iter().map(|p| (p.gamma / p.area).abs().powf(q) * p.area));
    s.powf(1.0 / q)
}

/// Exact `‖ω⁰‖_{L^q}` for disc fields whose discs do not overlap.
pub fn slice_lq_norm_disjoint(field: &SliceField, q: f64) -> f64 {
    if q.is_infinite() {
        return field.discs.iter().map(|d| d.amplitude.abs()).fold(0.0, f64::max);
    }
    field
        .discs
        .iter()
        .map(|d| d.amplitude.abs().powf(q) * PI * d.radius * d.radius)
        .sum::<f64>()
        .powf(1.0 / q)
}
