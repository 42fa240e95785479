use std::f64::consts::PI;

use helix_euler::geometry::rotate;
use helix_euler::kernel::*;
use helix_euler::rng::cylinder_points;
use helix_euler::{HelixParams, Vec3};

fn cfg(kappa: f64, n: Normalization) -> KernelConfig {
    KernelConfig::new(HelixParams::new(kappa).unwrap()).with_normalization(n)
}

#[test]
fn representations_agree_on_seeded_points() {
    for kappa in [0.5, 1.0, 2.0] {
        let c = cfg(kappa, Normalization::Paper);
        let h = c.h;
        for x in cylinder_points(11, 300, 0.05 * kappa, 10.0 * kappa, h.half_period()) {
            let (s, i) = (green_series(x, &c).unwrap(), green_images(x, &c).unwrap());
            assert!((s - i).abs() <= 1e-8, "kappa {kappa}, x {x:?}: {s} vs {i}");
            let a = biot_savart_kernel_with(x, &c, Representation::BesselSeries).unwrap().value;
            let b = biot_savart_kernel_with(x, &c, Representation::ImageSum).unwrap().value;
            assert!((a - b).norm() <= 1e-7 * a.norm());
        }
    }
}

#[test]
fn green_is_even_and_rotation_invariant() {
    let c = cfg(1.3, Normalization::Paper);
    for x in cylinder_points(5, 50, 0.1, 5.0, 4.0) {
        let g = green_series(x, &c).unwrap();
        let m = Vec3::new(x.x, x.y, -x.z);
        assert!((green_series(m, &c).unwrap() - g).abs() < 1e-13 * g.abs().max(1.0));
        let r = rotate(0.77, x);
        assert!((green_images(r, &c).unwrap() - green_images(x, &c).unwrap()).abs() < 1e-12);
    }
}

#[test]
fn kernel_symmetries() {
    for n in [Normalization::Paper, Normalization::Physical] {
        let c = cfg(0.9, n);
        for x in cylinder_points(8, 100, 0.05, 6.0, 2.5) {
            let k = biot_savart_kernel(x, &c).unwrap().value;
            let km = biot_savart_kernel(x * -1.0, &c).unwrap().value;
            assert!((k + km).norm() <= 1e-12 * k.norm());
            let kr = biot_savart_kernel(rotate(1.1, x), &c).unwrap().value;
            assert!((kr - rotate(1.1, k)).norm() <= 1e-11 * k.norm());
            let flat = biot_savart_kernel(Vec3::new(x.x, x.y, 0.0), &c).unwrap().value;
            assert_eq!(flat.z, 0.0);
        }
    }
}

#[test]
fn normalizations_differ_by_scale_and_axis_source() {
    let kappa = 0.8;
    let (p, f) = (cfg(kappa, Normalization::Paper), cfg(kappa, Normalization::Physical));
    for x in cylinder_points(3, 100, 0.05, 8.0, PI * kappa) {
        let kp = biot_savart_kernel(x, &p).unwrap().value;
        let kf = biot_savart_kernel(x, &f).unwrap().value;
        let r2 = x.x * x.x + x.y * x.y;
        let axis = Vec3::new(x.x, x.y, 0.0) * (1.0 / (16.0 * PI.powi(3) * kappa * kappa * r2));
        let pred = kf * (1.0 / (4.0 * PI * kappa)) - axis;
        assert!((kp - pred).norm() <= 1e-10 * kp.norm(), "{x:?}");
    }
}

#[test]
fn point_singularity_strength() {
    for kappa in [0.5, 1.0, 2.0] {
        for (n, want) in [(Normalization::Paper, 0.25 / kappa), (Normalization::Physical, 0.25 / PI)] {
            let c = cfg(kappa, n);
            let mut prev = f64::INFINITY;
            for s in [1e-2, 1e-3, 1e-4, 1e-5] {
                let x = Vec3::new(s / 10.0, 0.0, s);
                let d = (green_images(x, &c).unwrap() * x.norm() - want).abs();
                assert!(d < prev);
                prev = d;
            }
            assert!(prev < 1e-3 * want);
        }
    }
}

#[test]
fn bound_ratio_far_field_limit() {
    for kappa in [0.7, 1.0] {
        let c = cfg(kappa, Normalization::Paper);
        let r = 60.0 * kappa;
        let x = Vec3::new(r * 0.6, r * 0.8, 0.0);
        let ratio = kernel_bound_ratio(x, &c).unwrap();
        let envelope = 1.0 / (r * r) + 1.0 / r;
        let limit = 1.0 / (8.0 * PI.powi(3) * kappa * kappa);
        assert!((ratio * envelope * r / limit - 1.0).abs() < 1e-10);
    }
}

#[test]
fn bound_ratio_finite_everywhere_sampled() {
    let c = cfg(1.0, Normalization::Paper);
    let sup = cylinder_points(21, 20_000, 1e-4, 1e2, PI)
        .into_iter()
        .map(|x| kernel_bound_ratio(x, &c).unwrap())
        .inspect(|r| assert!(r.is_finite()))
        .fold(0.0, f64::max);
    assert!(sup > 0.0 && sup < 1.0);
}

#[test]
fn period_reduction() {
    let h = HelixParams::new(1.0).unwrap();
    assert_eq!(reduce_period(0.0, &h), 0.0);
    assert!(reduce_period(2.0 * PI, &h).abs() < 1e-15);
    let e = 1e-3;
    assert!((reduce_period(PI + e, &h) - (-PI + e)).abs() < 1e-12);
    let c = cfg(1.0, Normalization::Paper);
    let x = Vec3::new(0.3, 0.2, 0.4);
    let shifted = Vec3::new(0.3, 0.2, 0.4 + 6.0 * PI);
    let (a, b) = (biot_savart_kernel(x, &c).unwrap().value, biot_savart_kernel(shifted, &c).unwrap().value);
    assert!((a - b).norm() < 1e-12 * a.norm());
}

#[test]
fn singular_set() {
    let p = cfg(1.0, Normalization::Paper);
    let f = cfg(1.0, Normalization::Physical);
    let axis = Vec3::new(0.0, 0.0, 0.3);
    assert_eq!(biot_savart_kernel(axis, &p).unwrap_err().code(), "singular_input");
    assert!(biot_savart_kernel(axis, &f).is_ok());
    assert_eq!(biot_savart_kernel(Vec3::ZERO, &f).unwrap_err().code(), "singular_input");
    assert!(biot_savart_kernel(axis, &p.with_blob(0.01)).is_ok());
}
