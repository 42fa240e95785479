//! Far-field decay exponents by least squares in log–log coordinates.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::Vec3;

use super::filament::{velocity_many_unchecked, VelocityEvalConfig};
use super::particles::VorticityParticles;

const DIRECTIONS: usize = 4;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DecayFit {
    pub exponent: f64,
    pub radii: Vec<f64>,
    /// Mean of `|u|` (or `|ũ|`) over the probe directions at each radius.
    pub magnitudes: Vec<f64>,
}

/// Probe points at `n` log-spaced radii in `[r_min, r_max]`, each in four directions on `x₃ = 0`.
pub fn decay_probes(r_min: f64, r_max: f64, n: usize) -> Vec<Vec3> {
    let mut xs = Vec::with_capacity(n * DIRECTIONS);
    for i in 0..n {
        let r = r_min * (r_max / r_min).powf(i as f64 / (n - 1) as f64);
        for k in 0..DIRECTIONS {
            let ph = 0.3 + std::f64::consts::TAU * k as f64 / DIRECTIONS as f64;
            xs.push(Vec3::new(r * ph.cos(), r * ph.sin(), 0.0));
        }
    }
    xs
}

/// Fits the slope of `log|u|` against `log r` from velocities at [`decay_probes`].
pub fn fit_decay(values: &[Vec3], r_min: f64, r_max: f64, n: usize, planar: bool) -> Result<DecayFit> {
    if n < 2 || values.len() != n * DIRECTIONS || !(r_min > 0.0 && r_max > r_min) {
        return Err(Error::invalid("invalid_decay_window", "need n >= 2 and 0 < r_min < r_max"));
    }
    let mut radii = Vec::with_capacity(n);
    let mut magnitudes = Vec::with_capacity(n);
    for i in 0..n {
        radii.push(r_min * (r_max / r_min).powf(i as f64 / (n - 1) as f64));
        let m: f64 = values[i * DIRECTIONS..(i + 1) * DIRECTIONS]
            .iter()
            .map(|u| if planar { u.planar_norm() } else { u.norm() })
            .sum::<f64>()
            / DIRECTIONS as f64;
        magnitudes.push(m);
    }
    let xs: Vec<f64> = radii.iter().map(|r| r.ln()).collect();
    let ys: Vec<f64> = magnitudes.iter().map(|m| m.ln()).collect();
    let mx = xs.iter().sum::<f64>() / n as f64;
    let my = ys.iter().sum::<f64>() / n as f64;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    Ok(DecayFit {
        exponent: sxy / sxx,
        radii,
        magnitudes,
    })
}

/// Support radius of a particle set, `max_j |z_j|`.
pub fn particle_support_radius(w: &VorticityParticles) -> Result<f64> {
    if w.is_empty() {
        return Err(Error::EmptyParticleSet);
    }
    Ok(w.particles().iter().map(|p| p.z.norm()).fold(0.0, f64::max))
}

/// Decay fit of `|u|` for balanced particles over `|x̃| ∈ [4R, 32R]`.
pub fn decay_fit(w: &VorticityParticles, cfg: &VelocityEvalConfig, n: usize) -> Result<DecayFit> {
    w.check_balanced()?;
    let r = particle_support_radius(w)?;
    let (lo, hi) = (4.0 * r, 32.0 * r);
    let xs = decay_probes(lo, hi, n);
    let us = velocity_many_unchecked(&xs, w, cfg)?;
    fit_decay(&us, lo, hi, n, false)
}

/// Fitted exponent of `|u|` over `|x̃| ∈ [4R, 32R]`; about −2 for balanced data
/// supported well inside `|x̃| < κ`.
pub fn decay_exponent(w: &VorticityParticles, cfg: &VelocityEvalConfig) -> Result<f64> {
    Ok(decay_fit(w, cfg, 12)?.exponent)
}
