//! Helical-symmetry primitives.
//!
//! The screw group acts on ℝ³ by `S_θ x = R_θ x + (0, 0, κθ)`, where `R_θ`
//! rotates about the x₃-axis with rows `(cos θ, sin θ, 0)`, `(−sin θ, cos θ, 0)`
//! and `(0, 0, 1)`. A field `u` is helical when `u(S_θ x) = R_θ u(x)`; its
//! infinitesimal generator is `ξ(x) = (x₂, −x₁, κ)`.

use std::f64::consts::PI;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Vec3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Vec2 {
    pub x: f64,
    pub y: f64,
}

impl Vec3 {
    pub const ZERO: Vec3 = Vec3::new(0.0, 0.0, 0.0);
    pub const E3: Vec3 = Vec3::new(0.0, 0.0, 1.0);

    #[inline]
    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Vec3 { x, y, z }
    }

    /// Embeds a slice point as `(z, 0)`.
    #[inline]
    pub const fn from_slice(z: Vec2) -> Self {
        Vec3::new(z.x, z.y, 0.0)
    }

    #[inline]
    pub fn dot(self, o: Vec3) -> f64 {
        self.x * o.x + self.y * o.y + self.z * o.z
    }

    #[inline]
    pub fn cross(self, o: Vec3) -> Vec3 {
        Vec3::new(
            self.y * o.z - self.z * o.y,
            self.z * o.x - self.x * o.z,
            self.x * o.y - self.y * o.x,
        )
    }

    #[inline]
    pub fn norm_sq(self) -> f64 {
        self.dot(self)
    }

    #[inline]
    pub fn norm(self) -> f64 {
        self.norm_sq().sqrt()
    }

    /// First two components, `x̃`.
    #[inline]
    pub fn planar(self) -> Vec2 {
        Vec2::new(self.x, self.y)
    }

    #[inline]
    pub fn planar_norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }

    pub fn to_array(self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }

    pub fn from_array(a: [f64; 3]) -> Self {
        Vec3::new(a[0], a[1], a[2])
    }

    #[inline]
    pub fn component(self, i: usize) -> f64 {
        match i {
            0 => self.x,
            1 => self.y,
            _ => self.z,
        }
    }

    #[inline]
    pub fn axis(i: usize) -> Vec3 {
        match i {
            0 => Vec3::new(1.0, 0.0, 0.0),
            1 => Vec3::new(0.0, 1.0, 0.0),
            _ => Vec3::E3,
        }
    }
}

impl Vec2 {
    pub const ZERO: Vec2 = Vec2::new(0.0, 0.0);

    #[inline]
    pub const fn new(x: f64, y: f64) -> Self {
        Vec2 { x, y }
    }

    #[inline]
    pub fn dot(self, o: Vec2) -> f64 {
        self.x * o.x + self.y * o.y
    }

    #[inline]
    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    /// Counter-clockwise perpendicular `(−y, x)`.
    #[inline]
    pub fn perp(self) -> Vec2 {
        Vec2::new(-self.y, self.x)
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

macro_rules! impl_vec_ops {
    ($t:ident, $($f:ident),+) => {
        impl Add for $t {
            type Output = $t;
            #[inline]
            fn add(self, o: $t) -> $t { $t { $($f: self.$f + o.$f),+ } }
        }
        impl Sub for $t {
            type Output = $t;
            #[inline]
            fn sub(self, o: $t) -> $t { $t { $($f: self.$f - o.$f),+ } }
        }
        impl Neg for $t {
            type Output = $t;
            #[inline]
            fn neg(self) -> $t { $t { $($f: -self.$f),+ } }
        }
        impl Mul<f64> for $t {
            type Output = $t;
            #[inline]
            fn mul(self, s: f64) -> $t { $t { $($f: self.$f * s),+ } }
        }
        impl Mul<$t> for f64 {
            type Output = $t;
            #[inline]
            fn mul(self, v: $t) -> $t { v * self }
        }
        impl AddAssign for $t {
            #[inline]
            fn add_assign(&mut self, o: $t) { $(self.$f += o.$f;)+ }
        }
        impl SubAssign for $t {
            #[inline]
            fn sub_assign(&mut self, o: $t) { $(self.$f -= o.$f;)+ }
        }
    };
}

impl_vec_ops!(Vec3, x, y, z);
impl_vec_ops!(Vec2, x, y);

/// Screw pitch `κ` (length per radian) and the period `2πκ` of the x₃-direction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HelixParams {
    kappa: f64,
}

impl HelixParams {
    pub fn new(kappa: f64) -> Result<Self> {
        if !(kappa.is_finite() && kappa > 0.0) {
            return Err(Error::invalid(
                "invalid_kappa",
                format!("kappa must be positive and finite, got {kappa}"),
            ));
        }
        Ok(HelixParams { kappa })
    }

    #[inline]
    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    /// `2πκ`, recomputed on every call.
    #[inline]
    pub fn period(&self) -> f64 {
        2.0 * PI * self.kappa
    }

    /// Half period `πκ`.
    #[inline]
    pub fn half_period(&self) -> f64 {
        PI * self.kappa
    }
}

#[inline]
pub fn rotate(theta: f64, v: Vec3) -> Vec3 {
    let (s, c) = theta.sin_cos();
    Vec3::new(c * v.x + s * v.y, -s * v.x + c * v.y, v.z)
}

#[inline]
pub fn rotate2(theta: f64, v: Vec2) -> Vec2 {
    let (s, c) = theta.sin_cos();
    Vec2::new(c * v.x + s * v.y, -s * v.x + c * v.y)
}

/// `S_θ x = R_θ x + (0, 0, κθ)`.
#[inline]
pub fn screw(theta: f64, x: Vec3, h: &HelixParams) -> Vec3 {
    let mut y = rotate(theta, x);
    y.z += h.kappa * theta;
    y
}

/// Point of the helix through slice position `z` at parameter `theta`.
#[inline]
pub fn helix_point(theta: f64, z: Vec2, h: &HelixParams) -> Vec3 {
    let r = rotate2(theta, z);
    Vec3::new(r.x, r.y, h.kappa * theta)
}

/// `ξ(x) = (x₂, −x₁, κ)`.
#[inline]
pub fn xi(x: Vec3, h: &HelixParams) -> Vec3 {
    Vec3::new(x.y, -x.x, h.kappa)
}

/// Helical swirl `η = u · ξ(x)`.
#[inline]
pub fn swirl(u: Vec3, x: Vec3, h: &HelixParams) -> f64 {
    u.dot(xi(x, h))
}

/// `field(S_θ x) − R_θ field(x)`; vanishes identically for helical fields.
pub fn helicality_residual<F, E>(field: F, x: Vec3, theta: f64, h: &HelixParams) -> Result<Vec3, E>
where
    F: Fn(Vec3) -> Result<Vec3, E>,
{
    let moved = field(screw(theta, x, h))?;
    let here = field(x)?;
    Ok(moved - rotate(theta, here))
}

/// Re-expresses `x` through the slice `x₃ = 0` along its helix.
///
/// Returns `(z, θ)` with `θ = x₃/κ` left unreduced, so that
/// `screw(θ, (z, 0)) == x` up to roundoff. Winding counts survive; use
/// [`reduce_angle`] when a canonical representative is needed.
pub fn project_to_slice(x: Vec3, h: &HelixParams) -> (Vec2, f64) {
    let theta = x.z / h.kappa;
    (rotate2(-theta, x.planar()), theta)
}

/// Maps an angle into `(−π, π]`.
pub fn reduce_angle(theta: f64) -> f64 {
    let two_pi = 2.0 * PI;
    let mut t = theta - two_pi * (theta / two_pi).round();
    if t <= -PI {
        t += two_pi;
    } else if t > PI {
        t -= two_pi;
    }
    t
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: Vec3, b: Vec3, tol: f64) -> bool {
        (a - b).norm() <= tol
    }

    #[test]
    fn rotation_examples() {
        let v = Vec3::new(3.0, 4.0, 5.0);
        assert_eq!(rotate(0.0, v), v);
        assert!(close(rotate(PI / 2.0, Vec3::new(1.0, 0.0, 0.0)), Vec3::new(0.0, -1.0, 0.0), 1e-15));
        for &t in &[0.3, -2.0, 11.0] {
            assert!(close(rotate(t, Vec3::E3), Vec3::E3, 0.0));
            assert!((rotate(t, v).norm() - v.norm()).abs() < 1e-14);
        }
    }

    #[test]
    fn screw_examples() {
        let h = HelixParams::new(0.7).unwrap();
        let x = Vec3::new(0.4, -1.2, 0.3);
        assert!(close(screw(2.0 * PI, x, &h), x + Vec3::new(0.0, 0.0, h.period()), 1e-14));
        assert!(close(
            screw(PI, Vec3::new(1.0, 0.0, 0.0), &h),
            Vec3::new(-1.0, 0.0, h.kappa() * PI),
            1e-15
        ));
        let composed = screw(0.4, screw(1.1, x, &h), &h);
        assert!(close(composed, screw(1.5, x, &h), 1e-14));
    }

    #[test]
    fn xi_examples() {
        let h = HelixParams::new(1.0).unwrap();
        assert_eq!(xi(Vec3::ZERO, &h), Vec3::new(0.0, 0.0, 1.0));
        let h2 = HelixParams::new(2.5).unwrap();
        let x = Vec3::new(1.0, 2.0, 5.0);
        assert_eq!(xi(x, &h2), Vec3::new(2.0, -1.0, 2.5));
        assert!((xi(x, &h2).norm_sq() - (5.0 + 6.25)).abs() < 1e-14);
    }

    #[test]
    fn swirl_examples() {
        let h = HelixParams::new(1.3).unwrap();
        let x = Vec3::new(0.2, -0.7, 1.0);
        assert_eq!(swirl(Vec3::E3, x, &h), 1.3);
        let s = swirl(xi(x, &h), x, &h);
        assert!((s - (x.planar().norm().powi(2) + 1.69)).abs() < 1e-14);
    }

    #[test]
    fn constant_field_is_not_helical() {
        let h = HelixParams::new(1.0).unwrap();
        let r = helicality_residual(
            |_| Ok::<_, ()>(Vec3::new(1.0, 0.0, 0.0)),
            Vec3::new(0.3, 0.1, 0.0),
            PI,
            &h,
        )
        .unwrap();
        assert!(close(r, Vec3::new(2.0, 0.0, 0.0), 1e-15));
    }

    #[test]
    fn projection_examples() {
        let h = HelixParams::new(0.8).unwrap();
        let (z, t) = project_to_slice(Vec3::new(1.0, 0.0, 0.0), &h);
        assert_eq!((z, t), (Vec2::new(1.0, 0.0), 0.0));
        let (z, t) = project_to_slice(Vec3::new(-1.0, 0.0, h.kappa() * PI), &h);
        assert!((z - Vec2::new(1.0, 0.0)).norm() < 1e-15);
        assert!((t - PI).abs() < 1e-15);
        // unreduced winding
        let (_, t) = project_to_slice(Vec3::new(0.0, 1.0, 7.0 * h.period()), &h);
        assert!((t - 14.0 * PI).abs() < 1e-12);
    }

    #[test]
    fn degenerate_axis_points() {
        let h = HelixParams::new(2.0).unwrap();
        assert_eq!(xi(Vec3::new(0.0, 0.0, 3.0), &h), Vec3::new(0.0, 0.0, 2.0));
        let (z, _) = project_to_slice(Vec3::new(0.0, 0.0, 3.0), &h);
        assert_eq!(z.norm(), 0.0);
    }

    #[test]
    fn reduce_angle_range() {
        assert_eq!(reduce_angle(PI), PI);
        assert!((reduce_angle(-PI) - PI).abs() < 1e-15);
        assert!((reduce_angle(3.0 * PI + 0.1) - (-PI + 0.1)).abs() < 1e-12);
        assert_eq!(reduce_angle(0.5), 0.5);
    }

    #[test]
    fn invalid_kappa() {
        for k in [0.0, -1.0, f64::NAN, f64::INFINITY] {
            let e = HelixParams::new(k).unwrap_err();
            assert_eq!(e.code(), "invalid_kappa");
        }
    }
}
