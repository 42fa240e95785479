//! The x₃-periodic Green's function and its Biot–Savart kernel.
//!
//! Both representations are built on the cosine series
//! `S(x) = Σ_{n≥1} K₀(n|x̃|/κ) cos(n x₃/κ)`, which is evaluated either directly
//! (Bessel path) or through its Schlömilch image form
//!
//! ```text
//! S = ½ ln|x̃| + ½(γ − ln 4πκ) + πκ/(2|x|)
//!       + (πκ/2) Σ_{±} Σ_{m≥1} [ (|x̃|² + (2πκm ± x₃)²)^{-1/2} − (2πκm)^{-1} ].
//! ```
//!
//! Internally everything is expressed through the regular part
//! `reg = S − ½ ln|x̃|`, whose image form has no logarithm.
//!
//! Two normalizations are available. [`Normalization::Paper`] is
//! `G = (S − ln|x̃|)/(2πκ²)` with `𝒦 = ∇G/4π²`, which splits as `𝒦₁ − 𝒦₂` with
//! `𝒦₂ = (x̃, 0)/(8π³κ²|x̃|²)`. [`Normalization::Physical`] is the periodized
//! Newtonian potential `G = reg/(2π²κ)`, `𝒦 = ∇G`, for which
//! `𝒦(x) = −(1/4π) Σ_m (x − 2πκm e₃)/|x − 2πκm e₃|³` and the Biot–Savart
//! integral reproduces the vorticity with unit factor.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::bessel::{self, EULER_GAMMA};
use crate::error::{Error, Result};
use crate::geometry::{HelixParams, Vec3};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Normalization {
    #[default]
    Paper,
    Physical,
}

/// How the Schlömilch constant `ln(γ/4πκ)` is read.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum GammaReading {
    /// `γ` stands for `e^{γ_E}`, so `ln γ = γ_E`.
    #[default]
    Exponential,
    /// `γ` is the Euler–Mascheroni constant itself.
    Literal,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Representation {
    BesselSeries,
    ImageSum,
}

impl Representation {
    pub fn as_str(self) -> &'static str {
        match self {
            Representation::BesselSeries => "bessel_series",
            Representation::ImageSum => "image_sum",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KernelConfig {
    pub h: HelixParams,
    /// Upper bound on Bessel terms; the sum stops earlier once the tail is negligible.
    pub series_truncation: usize,
    /// Minimum number of image pairs summed explicitly before the tail correction.
    pub image_truncation: usize,
    pub switch_radius: f64,
    pub euler_gamma: f64,
    pub gamma_reading: GammaReading,
    pub blob_epsilon: f64,
    pub normalization: Normalization,
}

impl KernelConfig {
    pub fn new(h: HelixParams) -> Self {
        KernelConfig {
            h,
            series_truncation: 100_000,
            image_truncation: 24,
            switch_radius: 0.5 * h.kappa(),
            euler_gamma: EULER_GAMMA,
            gamma_reading: GammaReading::Exponential,
            blob_epsilon: 0.0,
            normalization: Normalization::Paper,
        }
    }

    pub fn with_normalization(mut self, n: Normalization) -> Self {
        self.normalization = n;
        self
    }

    pub fn with_switch_radius(mut self, r: f64) -> Self {
        self.switch_radius = r;
        self
    }

    pub fn with_blob(mut self, eps: f64) -> Self {
        self.blob_epsilon = eps;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.series_truncation < 1 {
            return Err(Error::invalid("invalid_series_truncation", "series_truncation must be >= 1"));
        }
        if self.image_truncation < 1 {
            return Err(Error::invalid("invalid_image_truncation", "image_truncation must be >= 1"));
        }
        if !(self.switch_radius > 0.0 && self.switch_radius.is_finite()) {
            return Err(Error::invalid("invalid_switch_radius", "switch_radius must be positive"));
        }
        if (self.euler_gamma - EULER_GAMMA).abs() > 1e-15 {
            return Err(Error::invalid(
                "invalid_euler_gamma",
                format!("euler_gamma must equal {EULER_GAMMA} to 15 digits"),
            ));
        }
        if !(self.blob_epsilon >= 0.0 && self.blob_epsilon.is_finite()) {
            return Err(Error::invalid("invalid_blob_epsilon", "blob_epsilon must be >= 0"));
        }
        if self.blob_epsilon > self.switch_radius / 6.0 {
            return Err(Error::invalid(
                "invalid_blob_epsilon",
                "blob_epsilon must not exceed switch_radius / 6",
            ));
        }
        Ok(())
    }

    fn schlomilch_constant(&self) -> f64 {
        let ln_gamma = match self.gamma_reading {
            GammaReading::Exponential => self.euler_gamma,
            GammaReading::Literal => self.euler_gamma.ln(),
        };
        0.5 * (ln_gamma - (4.0 * PI * self.h.kappa()).ln())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KernelValue {
    pub value: Vec3,
    pub representation_used: Representation,
}

/// Representative of `x₃` in `(−πκ, πκ]`.
pub fn reduce_period(x3: f64, h: &HelixParams) -> f64 {
    let l = h.period();
    let mut y = x3 - l * (x3 / l).round();
    if y <= -h.half_period() {
        y += l;
    } else if y > h.half_period() {
        y -= l;
    }
    y
}

fn reduced(x: Vec3, h: &HelixParams) -> Vec3 {
    Vec3::new(x.x, x.y, reduce_period(x.z, h))
}

/// `reg = S − ½ ln|x̃|` from the Bessel series. Needs `|x̃| > 0`.
fn reg_series(x: Vec3, cfg: &KernelConfig) -> f64 {
    let k = cfg.h.kappa();
    let r = x.planar_norm();
    let t = r / k;
    let z = x.z / k;
    let et = (-t).exp();
    let scale = 1.0 + r.ln().abs();
    let mut sum = crate::sum::Neumaier::new();
    let mut decay = 1.0;
    for n in 1..=cfg.series_truncation {
        let nf = n as f64;
        decay *= et;
        let (k0e, _) = bessel::k01e(nf * t);
        let k0 = k0e * decay;
        sum.add(k0 * (nf * z).cos());
        // K0((n+1)t)/K0(nt) <= e^{-t}
        if k0 * et / (1.0 - et) < 1e-17 * (scale + sum.value().abs()) || decay == 0.0 {
            break;
        }
    }
    sum.value() - 0.5 * r.ln()
}

/// `∇reg = ∇S − ½(x̃, 0)/|x̃|²` from the Bessel series.
fn grad_reg_series(x: Vec3, cfg: &KernelConfig) -> Vec3 {
    let k = cfg.h.kappa();
    let r = x.planar_norm();
    let t = r / k;
    let z = x.z / k;
    let et = (-t).exp();
    let mut gr = crate::sum::Neumaier::new();
    let mut g3 = crate::sum::Neumaier::new();
    let mut decay = 1.0;
    let floor = 1.0 / r;
    for n in 1..=cfg.series_truncation {
        let nf = n as f64;
        decay *= et;
        let (k0e, k1e) = bessel::k01e(nf * t);
        let (s, c) = (nf * z).sin_cos();
        let w = nf / k * decay;
        gr.add(-w * k1e * c);
        g3.add(-w * k0e * s);
        let bound = w * k1e.max(k0e) * et * (1.0 + 1.0 / nf) / (1.0 - et).powi(2);
        if bound < 1e-17 * (floor + gr.value().abs() + g3.value().abs()) || decay == 0.0 {
            break;
        }
    }
    let radial = gr.value() - 0.5 / r;
    Vec3::new(radial * x.x / r, radial * x.y / r, g3.value())
}

fn image_count(x: Vec3, cfg: &KernelConfig) -> usize {
    let a = cfg.h.period();
    cfg.image_truncation.max((3.0 * x.norm() / a).ceil() as usize + 4)
}

fn blob_point(rho: f64, eps: f64) -> f64 {
    if eps > 0.0 {
        let u = (rho / eps).powi(3);
        if u > 40.0 {
            return 1.0;
        }
        -(-u).exp_m1()
    } else {
        1.0
    }
}

fn blob_line(r: f64, eps: f64) -> f64 {
    if eps > 0.0 {
        -(-(r / eps).powi(2)).exp_m1()
    } else {
        1.0
    }
}

/// `reg` from the image sums with Euler–Maclaurin tail. Needs `|x| > 0` unless blobbed.
fn reg_images(x: Vec3, cfg: &KernelConfig) -> f64 {
    let a = cfg.h.period();
    let half = 0.5 * PI * cfg.h.kappa();
    let r2 = x.x * x.x + x.y * x.y;
    let rho = x.norm();
    let m_max = image_count(x, cfg);
    let mut acc = crate::sum::Neumaier::new();
    let near = if cfg.blob_epsilon > 0.0 {
        // 1/ρ regularized consistently with the blobbed gradient
        let e = cfg.blob_epsilon;
        if rho == 0.0 {
            0.0
        } else {
            blob_point(rho, e) / rho
        }
    } else {
        1.0 / rho
    };
    for m in 1..=m_max {
        let am = a * m as f64;
        for s in [1.0, -1.0] {
            let q = am + s * x.z;
            acc.add(1.0 / (r2 + q * q).sqrt() - 1.0 / am);
        }
    }
    let t = m_max as f64 + 0.5;
    for s in [1.0, -1.0] {
        let u0 = a * t + s * x.z;
        let d = r2 + u0 * u0;
        let sd = d.sqrt();
        let integral = (2.0 * a * t / (u0 + sd)).ln() / a;
        let g1 = -u0 / (d * sd);
        let g3 = (-6.0 * u0.powi(3) + 9.0 * u0 * r2) / (d.powi(3) * sd);
        let f1 = a * g1 + 1.0 / (a * t * t);
        let f3 = a.powi(3) * g3 + 6.0 / (a * t.powi(4));
        acc.add(integral + f1 / 24.0 - 7.0 * f3 / 5760.0);
    }
    cfg.schlomilch_constant() + half * near + half * acc.value()
}

/// `∇reg` from the image sums with Euler–Maclaurin tails.
fn grad_reg_images(x: Vec3, cfg: &KernelConfig) -> Vec3 {
    let a = cfg.h.period();
    let half = 0.5 * PI * cfg.h.kappa();
    let r2 = x.x * x.x + x.y * x.y;
    let rho2 = r2 + x.z * x.z;
    let m_max = image_count(x, cfg);
    // all planar terms are positive and the axial ones pair up, so plain sums suffice
    let mut planar = 0.0;
    let mut axial = 0.0;
    for m in 1..=m_max {
        let am = a * m as f64;
        let qp = am + x.z;
        let qm = am - x.z;
        let dp = r2 + qp * qp;
        let dm = r2 + qm * qm;
        let pp = 1.0 / (dp * dp.sqrt());
        let pm = 1.0 / (dm * dm.sqrt());
        planar += pp + pm;
        axial += qm * pm - qp * pp;
    }
    let t = m_max as f64 + 0.5;
    let a3 = a * a * a;
    for s in [1.0, -1.0] {
        let q = a * t + s * x.z;
        let d = r2 + q * q;
        let sd = d.sqrt();
        let inv_d = 1.0 / d;
        let inv_sd = 1.0 / sd;
        let d52 = inv_d * inv_d * inv_sd;
        let d92 = d52 * inv_d * inv_d;
        let p_int = inv_sd / (a * (sd + q));
        let p1 = -3.0 * q * d52;
        let p3 = (-60.0 * q * q * q + 45.0 * q * r2) * d92;
        planar += p_int + a * p1 / 24.0 - 7.0 * a3 * p3 / 5760.0;
        let g_int = -inv_sd / a;
        let g2 = (2.0 * q * q - r2) * d52;
        let q2 = q * q;
        let g4 = (24.0 * q2 * q2 - 72.0 * q2 * r2 + 9.0 * r2 * r2) * d92;
        axial += s * (g_int + a * g2 / 24.0 - 7.0 * a3 * g4 / 5760.0);
    }
    let mut out = Vec3::new(-x.x * planar, -x.y * planar, axial) * half;
    if rho2 > 0.0 {
        let rho = rho2.sqrt();
        let w = blob_point(rho, cfg.blob_epsilon) / (rho2 * rho);
        out -= x * (half * w);
    }
    out
}

fn check_planar(x: Vec3) -> Result<()> {
    if !x.is_finite() {
        return Err(Error::Domain {
            function: "kernel",
            value: f64::NAN,
        });
    }
    if x.x == 0.0 && x.y == 0.0 {
        return Err(Error::SingularInput(x.x, x.y, x.z));
    }
    Ok(())
}

fn g_from_reg(reg: f64, r: f64, cfg: &KernelConfig) -> f64 {
    let k = cfg.h.kappa();
    match cfg.normalization {
        Normalization::Paper => (reg - 0.5 * r.ln()) / (2.0 * PI * k * k),
        Normalization::Physical => reg / (2.0 * PI * PI * k),
    }
}

/// `G` from the Bessel series. Errors on `x̃ = 0`.
pub fn green_series(x: Vec3, cfg: &KernelConfig) -> Result<f64> {
    check_planar(x)?;
    let x = reduced(x, &cfg.h);
    Ok(g_from_reg(reg_series(x, cfg), x.planar_norm(), cfg))
}

/// `G` from the image sums. Errors on `x̃ = 0`.
pub fn green_images(x: Vec3, cfg: &KernelConfig) -> Result<f64> {
    check_planar(x)?;
    let x = reduced(x, &cfg.h);
    Ok(g_from_reg(reg_images(x, cfg), x.planar_norm(), cfg))
}

/// Paper-normalization axis term `𝒦₂(x) = (x̃, 0)/(8π³κ²|x̃|²)`.
pub fn k2_axis_term(x: Vec3, h: &HelixParams) -> Vec3 {
    let r2 = x.x * x.x + x.y * x.y;
    let c = 1.0 / (8.0 * PI.powi(3) * h.kappa() * h.kappa() * r2);
    Vec3::new(x.x * c, x.y * c, 0.0)
}

fn kernel_from_grad_reg(g: Vec3, x: Vec3, cfg: &KernelConfig) -> Vec3 {
    let k = cfg.h.kappa();
    match cfg.normalization {
        Normalization::Paper => {
            let r2 = x.x * x.x + x.y * x.y;
            let line = if r2 > 0.0 {
                0.5 * blob_line(r2.sqrt(), cfg.blob_epsilon) / r2
            } else {
                0.0
            };
            let c = 1.0 / (8.0 * PI.powi(3) * k * k);
            Vec3::new((g.x - line * x.x) * c, (g.y - line * x.y) * c, g.z * c)
        }
        Normalization::Physical => g * (1.0 / (2.0 * PI * PI * k)),
    }
}

/// Kernel evaluated with an explicit representation. `x₃` is reduced first.
pub fn biot_savart_kernel_with(
    x: Vec3,
    cfg: &KernelConfig,
    repr: Representation,
) -> Result<KernelValue> {
    let x = reduced(x, &cfg.h);
    let regularized = cfg.blob_epsilon > 0.0 && repr == Representation::ImageSum;
    if !regularized {
        match (cfg.normalization, repr) {
            (_, Representation::BesselSeries) | (Normalization::Paper, _) => check_planar(x)?,
            (Normalization::Physical, Representation::ImageSum) => {
                if x.norm_sq() == 0.0 {
                    return Err(Error::SingularInput(x.x, x.y, x.z));
                }
            }
        }
    } else if !x.is_finite() {
        return Err(Error::Domain {
            function: "kernel",
            value: f64::NAN,
        });
    }
    let g = match repr {
        Representation::BesselSeries => grad_reg_series(x, cfg),
        Representation::ImageSum => grad_reg_images(x, cfg),
    };
    Ok(KernelValue {
        value: kernel_from_grad_reg(g, x, cfg),
        representation_used: repr,
    })
}

/// Representation chosen by `switch_radius`: images inside, Bessel series outside.
pub fn select_representation(x: Vec3, cfg: &KernelConfig) -> Representation {
    if x.planar_norm() < cfg.switch_radius {
        Representation::ImageSum
    } else {
        Representation::BesselSeries
    }
}

/// `𝒦(x)` in the configured normalization.
///
/// Errors with [`Error::SingularInput`] on `x̃ = 0` unless `blob_epsilon > 0`.
/// In the physical normalization only `x = 0` (mod period) is singular.
pub fn biot_savart_kernel(x: Vec3, cfg: &KernelConfig) -> Result<KernelValue> {
    let repr = select_representation(x, cfg);
    biot_savart_kernel_with(x, cfg, repr)
}

/// `|𝒦(x)| / (1/|x|² + 1/|x̃|)`, with `x₃` reduced first.
pub fn kernel_bound_ratio(x: Vec3, cfg: &KernelConfig) -> Result<f64> {
    check_planar(x)?;
    let xr = reduced(x, &cfg.h);
    let k = biot_savart_kernel(xr, cfg)?.value.norm();
    Ok(k / (1.0 / xr.norm_sq() + 1.0 / xr.planar_norm()))
}
