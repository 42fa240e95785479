//! Quadrature rules shared by the evaluation paths and oracles.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, Mutex, OnceLock};

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussLegendre {
    pub fn new(n: usize) -> Self {
        assert!(n >= 1);
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let m = n.div_ceil(2);
        for i in 0..m {
            let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre(n, x);
            if d != 0.0 {
                dp = d;
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        GaussLegendre { nodes, weights }
    }

    /// Cached rule of order `n`.
    pub fn cached(n: usize) -> Arc<GaussLegendre> {
        static CACHE: OnceLock<Mutex<HashMap<usize, Arc<GaussLegendre>>>> = OnceLock::new();
        let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
        let mut guard = cache.lock().unwrap_or_else(|e| e.into_inner());
        guard
            .entry(n)
            .or_insert_with(|| Arc::new(GaussLegendre::new(n)))
            .clone()
    }

    /// Integrates `f` over `[a, b]`.
    pub fn integrate<F: FnMut(f64) -> f64>(&self, a: f64, b: f64, mut f: F) -> f64 {
        let c = 0.5 * (a + b);
        let h = 0.5 * (b - a);
        let mut acc = crate::sum::Neumaier::new();
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            acc.add(w * f(c + h * x));
        }
        h * acc.value()
    }
}

fn legendre(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let p = if n == 0 { 1.0 } else { p1 };
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p, d)
}

const XGK: [f64; 11] = [
    0.995657163025808080735527280689003,
    0.973906528517171720077964012084452,
    0.930157491355708226001207180059508,
    0.865063366688984510732096688423493,
    0.780817726586416897063717578345042,
    0.679409568299024406234327365114874,
    0.562757134668604683339000099272694,
    0.433395394129247190799265943165784,
    0.294392862701460198131126603103866,
    0.148874338981631210884826001129720,
    0.000000000000000000000000000000000,
];
const WGK: [f64; 11] = [
    0.011694638867371874278064396062192,
    0.032558162307964727478818972459390,
    0.054755896574351996031381300244580,
    0.075039674810919952767043140916190,
    0.093125454583697605535065465083366,
    0.109387158802297641899210590325805,
    0.123491976262065851077208697042865,
    0.134709217311473325928054001771707,
    0.142775938577060080797094273138717,
    0.147739104901338491374841515972068,
    0.149445554002916905664936468389821,
];
const WG: [f64; 5] = [
    0.066671344308688137593568809893332,
    0.149451349150580593145776339657697,
    0.219086362515982043995534934228163,
    0.269266719309996355091226921569469,
    0.295524224714752870173892994651338,
];

/// One Gauss–Kronrod 10/21 panel: `(kronrod, |kronrod − gauss|)`.
pub fn gk21<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut rk = WGK[10] * fc;
    let mut rg = 0.0;
    for j in 0..10 {
        let dx = h * XGK[j];
        let s = f(c - dx) + f(c + dx);
        rk += WGK[j] * s;
        if j % 2 == 1 {
            rg += WG[j / 2] * s;
        }
    }
    (rk * h, ((rk - rg) * h).abs())
}

#[derive(Debug, Clone, Copy)]
pub struct AdaptiveResult {
    pub value: f64,
    pub error: f64,
    pub converged: bool,
}

/// Globally adaptive Gauss–Kronrod integration of `f` over `[a, b]`.
pub fn adaptive<F: FnMut(f64) -> f64>(
    mut f: F,
    a: f64,
    b: f64,
    abs_tol: f64,
    rel_tol: f64,
    max_panels: usize,
) -> AdaptiveResult {
    let (v, e) = gk21(&mut f, a, b);
    let mut panels = vec![(a, b, v, e)];
    loop {
        let total: f64 = crate::sum::sum(panels.iter().map(|p| p.2));
        let err: f64 = panels.iter().map(|p| p.3).sum();
        if err <= abs_tol.max(rel_tol * total.abs()) {
            return AdaptiveResult {
                value: total,
                error: err,
                converged: true,
            };
        }
        if panels.len() >= max_panels {
            return AdaptiveResult {
                value: total,
                error: err,
                converged: false,
            };
        }
        let (idx, _) = panels
            .iter()
            .enumerate()
            .fold((0, -1.0), |best, (i, p)| if p.3 > best.1 { (i, p.3) } else { best });
        let (pa, pb, _, _) = panels.swap_remove(idx);
        let m = 0.5 * (pa + pb);
        let (v1, e1) = gk21(&mut f, pa, m);
        let (v2, e2) = gk21(&mut f, m, pb);
        panels.push((pa, m, v1, e1));
        panels.push((m, pb, v2, e2));
    }
}

/// Values integrable by [`sinh_kronrod`]: vectors with a size for error control.
pub trait QuadValue: Copy {
    fn zero() -> Self;
    fn plus(self, o: Self) -> Self;
    fn times(self, s: f64) -> Self;
    fn size(self) -> f64;
}

impl QuadValue for crate::geometry::Vec3 {
    fn zero() -> Self {
        crate::geometry::Vec3::ZERO
    }
    fn plus(self, o: Self) -> Self {
        self + o
    }
    fn times(self, s: f64) -> Self {
        self * s
    }
    fn size(self) -> f64 {
        self.norm()
    }
}

impl<const N: usize> QuadValue for [f64; N] {
    fn zero() -> Self {
        [0.0; N]
    }
    fn plus(mut self, o: Self) -> Self {
        for (a, b) in self.iter_mut().zip(o) {
            *a += b;
        }
        self
    }
    fn times(mut self, s: f64) -> Self {
        for a in &mut self {
            *a *= s;
        }
        self
    }
    fn size(self) -> f64 {
        self.iter().map(|v| v * v).sum::<f64>().sqrt()
    }
}

/// Gauss–Kronrod 10/21 panel for vector values: `(integral, |kronrod − gauss|, ∫|f|)`.
fn gk21_value<T: QuadValue, E, F: FnMut(f64) -> Result<T, E>>(f: &mut F, a: f64, b: f64) -> Result<(T, f64, f64), E> {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c)?;
    let mut rk = fc.times(WGK[10]);
    let mut rg = T::zero();
    let mut abs = WGK[10] * fc.size();
    for j in 0..10 {
        let dx = h * XGK[j];
        let f1 = f(c - dx)?;
        let f2 = f(c + dx)?;
        let s = f1.plus(f2);
        rk = rk.plus(s.times(WGK[j]));
        abs += WGK[j] * (f1.size() + f2.size());
        if j % 2 == 1 {
            rg = rg.plus(s.times(WG[j / 2]));
        }
    }
    Ok((rk.times(h), rk.plus(rg.times(-1.0)).times(h).size(), abs * h.abs()))
}

/// QUADPACK-style rescaling of the raw Kronrod–Gauss difference.
fn scaled_error(raw: f64, abs: f64) -> f64 {
    if abs == 0.0 {
        return raw;
    }
    let e = abs * (200.0 * raw / abs).powf(1.5).min(1.0);
    e.max(50.0 * f64::EPSILON * abs)
}

/// Outcome of [`sinh_kronrod`] when the panel budget runs out.
#[derive(Debug, Clone, Copy)]
pub struct Unconverged {
    pub estimate: f64,
    pub tolerance: f64,
}

/// `∫_{c−π}^{c+π} f(θ) dθ` for a periodic `f` peaked at `c` with angular width `w`.
///
/// Each half is mapped by `θ = c ± w·sinh(u·asinh(π/w))`, `u ∈ [0, 1]`, and
/// integrated by adaptive Gauss–Kronrod 10/21 in `u` until the rescaled error is
/// below `max(tol·∫|f|, abs_tol)`. Panels stay in a fixed order so the sum is reproducible.
pub fn sinh_kronrod<T, E, F>(mut f: F, c: f64, w: f64, tol: f64, abs_tol: f64, max_panels: usize) -> Result<Result<T, Unconverged>, E>
where
    T: QuadValue,
    F: FnMut(f64) -> Result<T, E>,
{
    let w = w.clamp(1e-300, PI);
    let a = (PI / w).asinh();
    let mut mapped = |sign: f64, u: f64| -> Result<T, E> {
        let ua = u * a;
        Ok(f(c + sign * w * ua.sinh())?.times(w * a * ua.cosh()))
    };
    let mut panels: Vec<(f64, f64, f64, T, f64, f64)> = Vec::with_capacity(8);
    for sign in [-1.0, 1.0] {
        let (v, e, s) = gk21_value(&mut |u| mapped(sign, u), 0.0, 1.0)?;
        panels.push((sign, 0.0, 1.0, v, e, s));
    }
    loop {
        let mut total = T::zero();
        let mut err = 0.0;
        let mut abs = 0.0;
        let mut worst = 0;
        let mut worst_e = -1.0;
        for (i, p) in panels.iter().enumerate() {
            total = total.plus(p.3);
            let e = scaled_error(p.4, p.5);
            err += e;
            abs += p.5;
            if e > worst_e {
                worst = i;
                worst_e = e;
            }
        }
        if err <= (tol * abs).max(abs_tol) {
            return Ok(Ok(total));
        }
        if panels.len() >= max_panels {
            return Ok(Err(Unconverged {
                estimate: err,
                tolerance: tol * abs,
            }));
        }
        let (sign, lo, hi, _, _, _) = panels.remove(worst);
        let mid = 0.5 * (lo + hi);
        let (v1, e1, s1) = gk21_value(&mut |u| mapped(sign, u), lo, mid)?;
        let (v2, e2, s2) = gk21_value(&mut |u| mapped(sign, u), mid, hi)?;
        panels.insert(worst, (sign, mid, hi, v2, e2, s2));
        panels.insert(worst, (sign, lo, mid, v1, e1, s1));
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_legendre_polynomials() {
        for n in [1, 2, 5, 16, 40] {
            let g = GaussLegendre::new(n);
            let w: f64 = g.weights.iter().sum();
            assert!((w - 2.0).abs() < 1e-13, "n={n}");
            let deg = 2 * n - 1;
            let v = g.integrate(0.0, 1.0, |x| x.powi(deg as i32));
            assert!((v - 1.0 / (deg as f64 + 1.0)).abs() < 1e-13, "n={n}");
        }
    }

    #[test]
    fn adaptive_handles_endpoint_singularity() {
        let r = adaptive(|x| 1.0 / x.sqrt(), 0.0, 1.0, 1e-12, 1e-12, 500);
        assert!(r.converged);
        assert!((r.value - 2.0).abs() < 1e-10);
    }
}
