//! Modified Bessel functions of the second kind, orders 0 and 1.
//!
//! `t ≤ 2` uses the ascending series with the logarithmic term split off;
//! `t > 2` uses Steed's continued fraction (Temme's CF2), which converges in a
//! few dozen iterations and directly yields the exponentially scaled values.

use std::f64::consts::PI;

use crate::error::{Error, Result};

pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_860_6;

/// Accuracy contract of [`k0`] and [`k1`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BesselAccuracy {
    pub max_relative_error: f64,
    pub domain: (f64, f64),
}

impl Default for BesselAccuracy {
    fn default() -> Self {
        BesselAccuracy {
            max_relative_error: 1e-12,
            domain: (1e-6, 700.0),
        }
    }
}

impl BesselAccuracy {
    pub fn new(max_relative_error: f64, lo: f64, hi: f64) -> Result<Self> {
        if !(max_relative_error > 0.0) {
            return Err(Error::invalid(
                "invalid_bessel_tolerance",
                "max_relative_error must be positive",
            ));
        }
        if !(lo > 0.0 && hi > lo) {
            return Err(Error::invalid(
                "invalid_bessel_domain",
                "domain must satisfy 0 < lo < hi",
            ));
        }
        Ok(BesselAccuracy {
            max_relative_error,
            domain: (lo, hi),
        })
    }

    pub fn contains(&self, t: f64) -> bool {
        t >= self.domain.0 && t <= self.domain.1
    }
}

fn check(function: &'static str, t: f64) -> Result<()> {
    if t > 0.0 && !t.is_nan() {
        Ok(())
    } else {
        Err(Error::Domain { function, value: t })
    }
}

/// `K₀(t)`. Underflows to zero near `t ≈ 745`.
pub fn k0(t: f64) -> Result<f64> {
    check("k0", t)?;
    Ok(if t <= 2.0 { series(t).0 } else { k01e(t).0 * (-t).exp() })
}

/// `K₁(t)`. Underflows to zero near `t ≈ 745`.
pub fn k1(t: f64) -> Result<f64> {
    check("k1", t)?;
    Ok(if t <= 2.0 { series(t).1 } else { k01e(t).1 * (-t).exp() })
}

/// `eᵗ K₀(t)`.
pub fn k0e(t: f64) -> Result<f64> {
    check("k0e", t)?;
    Ok(k01e(t).0)
}

/// `eᵗ K₁(t)`.
pub fn k1e(t: f64) -> Result<f64> {
    check("k1e", t)?;
    Ok(k01e(t).1)
}

/// `(eᵗK₀(t), eᵗK₁(t))` for `t > 0`; no domain check.
pub(crate) fn k01e(t: f64) -> (f64, f64) {
    if t <= 2.0 {
        let (a, b) = series(t);
        let e = t.exp();
        (a * e, b * e)
    } else {
        steed(t)
    }
}

fn series(t: f64) -> (f64, f64) {
    let y = 0.25 * t * t;
    let l = (0.5 * t).ln();
    // I0, I1/(t/2), harmonic-weighted sums
    let mut term0 = 1.0; // y^k/(k!)^2
    let mut term1 = 1.0; // y^k/(k!(k+1)!)
    let mut i0 = 0.0;
    let mut i1 = 0.0;
    let mut s0 = 0.0;
    let mut s1 = 0.0;
    let mut hk = 0.0; // H_k
    let mut psi1 = -EULER_GAMMA; // psi(k+1)
    let mut k = 0usize;
    loop {
        let psi2 = psi1 + 1.0 / (k as f64 + 1.0); // psi(k+2)
        i0 += term0;
        i1 += term1;
        s0 += term0 * hk;
        s1 += term1 * (psi1 + psi2);
        k += 1;
        let kf = k as f64;
        term0 *= y / (kf * kf);
        term1 *= y / (kf * (kf + 1.0));
        hk += 1.0 / kf;
        psi1 = psi2;
        if term0 < 1e-18 * i0 && k > 2 {
            break;
        }
    }
    let k0 = -(l + EULER_GAMMA) * i0 + s0;
    let k1 = 1.0 / t + l * 0.5 * t * i1 - 0.25 * t * s1;
    (k0, k1)
}

fn steed(x: f64) -> (f64, f64) {
    const A1: f64 = 0.25;
    let mut b = 2.0 * (1.0 + x);
    let mut d = 1.0 / b;
    let mut delh = d;
    let mut h = d;
    let mut q1 = 0.0;
    let mut q2 = 1.0;
    let mut q = A1;
    let mut c = A1;
    let mut a = -A1;
    let mut s = 1.0 + q * delh;
    for i in 1..10_000 {
        let fi = i as f64;
        a -= 2.0 * fi;
        c = -a * c / (fi + 1.0);
        let qnew = (q1 - b * q2) / a;
        q1 = q2;
        q2 = qnew;
        q += c * qnew;
        b += 2.0;
        d = 1.0 / (b + a * d);
        delh *= b * d - 1.0;
        h += delh;
        let dels = q * delh;
        s += dels;
        if (dels / s).abs() < 1e-17 {
            break;
        }
    }
    let k0e = (PI / (2.0 * x)).sqrt() / s;
    let k1e = k0e * (x + 0.5 - A1 * h) / x;
    (k0e, k1e)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reference_values() {
        let a = k0(1.0).unwrap();
        let b = k1(1.0).unwrap();
        assert!((a / 0.42102443824070834 - 1.0).abs() < 1e-14, "{a}");
        assert!((b / 0.6019072301972346 - 1.0).abs() < 1e-14, "{b}");
        // A&S table values
        assert!((k0(2.0).unwrap() / 0.11389387274953344 - 1.0).abs() < 1e-14);
        assert!((k1(2.0).unwrap() / 0.13986588181652243 - 1.0).abs() < 1e-14);
        assert!((k0(5.0).unwrap() / 3.6910983340425942e-3 - 1.0).abs() < 1e-13);
        assert!((k1(0.1).unwrap() / 9.853844780870606 - 1.0).abs() < 1e-14);
    }

    #[test]
    fn branches_meet() {
        for &t in &[2.0 - 1e-12, 2.0] {
            let (a, b) = series(t);
            let (c, d) = steed(t);
            let e = t.exp();
            assert!((a * e / c - 1.0).abs() < 1e-14);
            assert!((b * e / d - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn domain_errors() {
        assert!(k0(0.0).is_err());
        assert!(k1(-1.0).is_err());
        assert!(k0(f64::NAN).is_err());
        assert_eq!(k0(800.0).unwrap(), 0.0);
        assert!(k0e(800.0).unwrap() > 0.0);
    }
}
