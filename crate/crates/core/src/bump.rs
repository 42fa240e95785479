//! Smooth compactly supported building blocks.

use std::f64::consts::PI;

/// `exp(−1/(1−s²))` on `|s| < 1`, zero elsewhere.
#[inline]
pub fn bump(s: f64) -> f64 {
    let q = 1.0 - s * s;
    if q <= 0.0 {
        0.0
    } else {
        (-1.0 / q).exp()
    }
}

/// `d/ds bump(s)`.
#[inline]
pub fn bump_deriv(s: f64) -> f64 {
    let q = 1.0 - s * s;
    if q <= 0.0 {
        0.0
    } else {
        -2.0 * s / (q * q) * (-1.0 / q).exp()
    }
}

#[inline]
fn psi(u: f64) -> f64 {
    if u <= 0.0 {
        0.0
    } else {
        (-1.0 / u).exp()
    }
}

/// C^∞ step: 0 for `u ≤ 0`, 1 for `u ≥ 1`, strictly increasing in between.
#[inline]
pub fn transition(u: f64) -> f64 {
    if u <= 0.0 {
        return 0.0;
    }
    if u >= 1.0 {
        return 1.0;
    }
    let a = psi(u);
    a / (a + psi(1.0 - u))
}

/// `d/du transition(u)`.
#[inline]
pub fn transition_deriv(u: f64) -> f64 {
    if u <= 0.0 || u >= 1.0 {
        return 0.0;
    }
    let a = psi(u);
    let b = psi(1.0 - u);
    let da = a / (u * u);
    let db = -b / ((1.0 - u) * (1.0 - u));
    (da * (a + b) - a * (da + db)) / ((a + b) * (a + b))
}

/// `∫_{|z|<1} bump(|z|) dz = π(e^{−1} − E₁(1))`.
pub const BUMP_MASS_2D: f64 = PI * 0.148_495_506_775_922_05;

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quad::adaptive;

    #[test]
    fn mass_constant_matches_quadrature() {
        let q = adaptive(|r| 2.0 * PI * bump(r) * r, 0.0, 1.0, 1e-16, 1e-15, 2000);
        assert!((q.value - BUMP_MASS_2D).abs() < 1e-14, "{}", q.value);
    }

    #[test]
    fn derivatives_match_differences() {
        let h = 1e-6;
        for &u in &[0.1, 0.35, 0.5, 0.8, 0.97] {
            let fd = (transition(u + h) - transition(u - h)) / (2.0 * h);
            assert!((fd - transition_deriv(u)).abs() < 1e-7);
            let fd = (bump(u + h) - bump(u - h)) / (2.0 * h);
            assert!((fd - bump_deriv(u)).abs() < 1e-7);
        }
        assert_eq!(transition(0.5), 0.5);
    }
}
