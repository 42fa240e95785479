use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{HelixParams, Vec3};
use crate::quad::GaussLegendre;

const PANELS: usize = 16;
const NODES: usize = 24;

/// `φ(r) = A·exp(−1/(1−s²))` for `s = (2r − r_i − r_o)/(r_o − r_i) ∈ (−1, 1)`, zero elsewhere.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RadialProfile {
    pub r_inner: f64,
    pub r_outer: f64,
    pub amplitude: f64,
}

impl RadialProfile {
    pub fn new(r_inner: f64, r_outer: f64, amplitude: f64) -> Result<Self> {
        if !(r_inner > 0.0 && r_outer > r_inner && r_outer.is_finite()) {
            return Err(Error::invalid(
                "invalid_profile_radii",
                format!("need 0 < r_inner < r_outer, got {r_inner}, {r_outer}"),
            ));
        }
        if !amplitude.is_finite() {
            return Err(Error::invalid("invalid_profile_amplitude", "amplitude must be finite"));
        }
        Ok(RadialProfile {
            r_inner,
            r_outer,
            amplitude,
        })
    }

    /// Profile on `(r_inner, r_outer)` whose slice integral `2π∫φ r dr` equals `total`.
    pub fn balancing(r_inner: f64, r_outer: f64, total: f64) -> Result<Self> {
        let unit = RadialProfile::new(r_inner, r_outer, 1.0)?;
        let w = unit.weighted_integral();
        RadialProfile::new(r_inner, r_outer, total / (2.0 * PI * w))
    }

    pub fn value(&self, r: f64) -> f64 {
        if r <= self.r_inner || r >= self.r_outer {
            return 0.0;
        }
        let s = (2.0 * r - self.r_inner - self.r_outer) / (self.r_outer - self.r_inner);
        let q = 1.0 - s * s;
        if q <= 0.0 {
            0.0
        } else {
            self.amplitude * (-1.0 / q).exp()
        }
    }

    /// `m(r) = ∫₀^r φ(s) s ds`, by a fixed composite Gauss–Legendre rule.
    pub fn mass_within(&self, r: f64) -> f64 {
        let hi = r.min(self.r_outer);
        if hi <= self.r_inner {
            return 0.0;
        }
        let g = GaussLegendre::cached(NODES);
        // panels on the full support, the last one clipped, so m is smooth in r
        let width = (self.r_outer - self.r_inner) / PANELS as f64;
        let mut acc = crate::sum::Neumaier::new();
        for k in 0..PANELS {
            let a = self.r_inner + width * k as f64;
            if a >= hi {
                break;
            }
            let b = (a + width).min(hi);
            acc.add(g.integrate(a, b, |s| self.value(s) * s));
        }
        acc.value()
    }

    /// `∫₀^∞ φ(r) r dr`.
    pub fn weighted_integral(&self) -> f64 {
        self.mass_within(self.r_outer)
    }

    /// Slice circulation `2π∫φ r dr`.
    pub fn circulation(&self) -> f64 {
        2.0 * PI * self.weighted_integral()
    }
}

/// The steady radial flow `ū` generated by `φ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SteadyBackground {
    pub profile: RadialProfile,
    pub h: HelixParams,
    /// `|∫φ r dr|/κ`, the far-field axial speed.
    pub beta: f64,
    weighted: f64,
}

impl SteadyBackground {
    pub fn new(profile: RadialProfile, h: HelixParams) -> Self {
        let weighted = profile.weighted_integral();
        SteadyBackground {
            profile,
            h,
            beta: weighted.abs() / h.kappa(),
            weighted,
        }
    }

    /// Signed `∫φ r dr`.
    pub fn weighted_integral(&self) -> f64 {
        self.weighted
    }
}

/// `ū(x) = (x̃^⊥/|x̃|², 1/κ)·∫₀^{|x̃|} φ(r) r dr`; zero on the axis.
pub fn background_velocity(x: Vec3, bg: &SteadyBackground) -> Vec3 {
    let r2 = x.x * x.x + x.y * x.y;
    if r2 == 0.0 {
        return Vec3::ZERO;
    }
    let r = r2.sqrt();
    let m = if r >= bg.profile.r_outer {
        bg.weighted
    } else {
        bg.profile.mass_within(r)
    };
    Vec3::new(-x.y * m / r2, x.x * m / r2, m / bg.h.kappa())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{helicality_residual, swirl, xi};

    fn bg() -> SteadyBackground {
        let h = HelixParams::new(0.9).unwrap();
        SteadyBackground::new(RadialProfile::new(0.3, 1.1, 2.0).unwrap(), h)
    }

    #[test]
    fn weighted_integral_matches_adaptive() {
        let p = RadialProfile::new(0.3, 1.1, 2.0).unwrap();
        let r = crate::quad::adaptive(|s| p.value(s) * s, 0.3, 1.1, 1e-15, 1e-15, 2000);
        assert!((p.weighted_integral() - r.value).abs() < 1e-13);
        let q = RadialProfile::balancing(0.2, 0.5, -3.0).unwrap();
        assert!((q.circulation() + 3.0).abs() < 1e-13);
    }

    #[test]
    fn outside_support_saturates() {
        let b = bg();
        let x = Vec3::new(1.5, -0.4, 2.0);
        let u = background_velocity(x, &b);
        let g = b.weighted_integral();
        let r2 = 1.5f64 * 1.5 + 0.16;
        assert!((u - Vec3::new(0.4 * g / r2, 1.5 * g / r2, g / 0.9)).norm() < 1e-15);
        assert_eq!(background_velocity(Vec3::new(0.0, 0.0, 5.0), &b), Vec3::ZERO);
    }

    #[test]
    fn swirl_free_and_helical() {
        let b = bg();
        let h = b.h;
        for &(x, y, z) in &[(0.5, 0.2, 0.1), (-0.8, 0.7, 3.0), (2.0, 0.0, -1.0)] {
            let p = Vec3::new(x, y, z);
            let u = background_velocity(p, &b);
            assert!(swirl(u, p, &h).abs() <= 1e-12 * u.norm() * xi(p, &h).norm());
            let r = helicality_residual(|q| Ok::<_, ()>(background_velocity(q, &b)), p, 1.3, &h).unwrap();
            assert!(r.norm() < 1e-13);
        }
    }
}
