use helix_euler::bessel::{k0, k0e, k1, k1e};
use helix_euler::quad::adaptive;

/// `K_ν(t) = ∫₀^∞ e^{−t cosh s} cosh(νs) ds`, truncated where the integrand underflows.
fn oracle(nu: f64, t: f64) -> f64 {
    let s_max = (750.0 / t + 1.0).acosh();
    let mut acc = 0.0;
    let pieces = 16;
    for i in 0..pieces {
        let a = s_max * i as f64 / pieces as f64;
        let b = s_max * (i + 1) as f64 / pieces as f64;
        acc += adaptive(|s| (-t * s.cosh()).exp() * (nu * s).cosh(), a, b, 0.0, 1e-15, 2000).value;
    }
    acc
}

fn log_grid(n: usize, lo: f64, hi: f64) -> impl Iterator<Item = f64> {
    (0..n).map(move |i| lo * (hi / lo).powf(i as f64 / (n - 1) as f64))
}

#[test]
fn reference_points() {
    assert!((k0(1.0).unwrap() - 0.42102443824070834).abs() < 1e-15);
    assert!((k1(1.0).unwrap() - 0.6019072301972346).abs() < 1e-15);
    assert!((oracle(0.0, 1.0) - 0.42102443824070834).abs() < 1e-14);
}

#[test]
fn agrees_with_integral_representation() {
    for t in log_grid(200, 1e-3, 30.0) {
        for (nu, f) in [(0.0, k0 as fn(f64) -> _), (1.0, k1)] {
            let want = oracle(nu, t);
            let got = f(t).unwrap();
            assert!(((got - want) / want).abs() < 1e-10, "K{nu}({t}): {got} vs {want}");
        }
    }
}

#[test]
fn positive_decreasing_and_ordered() {
    let ts: Vec<f64> = log_grid(500, 1e-3, 700.0).collect();
    for w in ts.windows(2) {
        let (a, b) = (k0(w[0]).unwrap(), k0(w[1]).unwrap());
        assert!(a > b && b > 0.0, "k0 not decreasing at {}", w[0]);
        assert!(k1(w[0]).unwrap() > a);
    }
}

#[test]
fn derivative_relation() {
    for t in log_grid(50, 0.01, 20.0) {
        let h = 1e-3 * t.min(1.0);
        let d = -(k0(t + h).unwrap() - k0(t - h).unwrap()) / (2.0 * h);
        let k = k1(t).unwrap();
        assert!(((d - k) / k).abs() < 1e-5, "t = {t}");
    }
}

#[test]
fn large_argument_asymptotics() {
    for t in [50.0_f64, 100.0] {
        let a = k0(t).unwrap() * t.exp() * (2.0 * t / std::f64::consts::PI).sqrt();
        // The leading correction is −1/(8t); the remainder is O(t⁻²).
        assert!((a - 1.0).abs() < 0.13 / t);
        assert!((a - (1.0 - 0.125 / t)).abs() < 1e-2 / t);
        let o = oracle(0.0, t);
        assert!(((k0(t).unwrap() - o) / o).abs() < 1e-10);
    }
}

#[test]
fn scaled_variants() {
    for t in log_grid(40, 0.01, 600.0) {
        let e = t.exp();
        if e.is_finite() && k0(t).unwrap() > 1e-290 {
            assert!((k0e(t).unwrap() / (k0(t).unwrap() * e) - 1.0).abs() < 1e-12);
            assert!((k1e(t).unwrap() / (k1(t).unwrap() * e) - 1.0).abs() < 1e-12);
        }
    }
    assert!(k0e(1e4).unwrap() > 0.0);
}

#[test]
fn moment_identities() {
    let m0 = adaptive(|t| t * k0(t).unwrap(), 1e-12, 750.0, 1e-13, 1e-13, 4000).value;
    let m1 = adaptive(|t| t * k1(t).unwrap(), 1e-12, 750.0, 1e-13, 1e-13, 4000).value;
    assert!((m0 - 1.0).abs() < 1e-8, "{m0}");
    assert!((m1 - std::f64::consts::FRAC_PI_2).abs() < 1e-8, "{m1}");
}

#[test]
fn domain_errors() {
    for t in [0.0, -1.0, f64::NAN] {
        assert_eq!(k0(t).unwrap_err().code(), "domain");
        assert_eq!(k1(t).unwrap_err().code(), "domain");
    }
}
