use std::ffi::CStr;
use std::process::Command;
use std::ptr;

use helix_euler_ffi::*;

fn last_error() -> String {
    let mut buf = [0 as std::ffi::c_char; 256];
    unsafe {
        he_last_error(buf.as_mut_ptr(), buf.len());
        CStr::from_ptr(buf.as_ptr()).to_string_lossy().into_owned()
    }
}

fn kernel(kappa: f64, n: HeNormalization) -> *mut HeKernel {
    let mut k = ptr::null_mut();
    assert_eq!(unsafe { he_kernel_new(kappa, n, &mut k) }, HeStatus::Ok);
    k
}

#[test]
fn version_is_package_version() {
    let v = unsafe { CStr::from_ptr(he_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}

#[test]
fn green_representations_agree() {
    let k = kernel(1.0, HeNormalization::Paper);
    for x in [[0.3, 0.1, 0.5], [1.5, -0.7, 2.9], [4.0, 2.0, -1.0]] {
        let (mut a, mut b) = (0.0, 0.0);
        unsafe {
            assert_eq!(he_green_series(k, x.as_ptr(), &mut a), HeStatus::Ok);
            assert_eq!(he_green_images(k, x.as_ptr(), &mut b), HeStatus::Ok);
        }
        assert!((a - b).abs() < 1e-10, "{a} vs {b}");
    }
    unsafe { he_kernel_free(k) };
}

#[test]
fn kernel_matches_library() {
    use helix_euler::kernel::{biot_savart_kernel, KernelConfig, Normalization};
    let k = kernel(0.7, HeNormalization::Physical);
    let cfg = KernelConfig::new(helix_euler::HelixParams::new(0.7).unwrap()).with_normalization(Normalization::Physical);
    let x = [0.4, -0.2, 0.3];
    let mut out = [0.0; 3];
    assert_eq!(unsafe { he_kernel_eval(k, x.as_ptr(), out.as_mut_ptr()) }, HeStatus::Ok);
    let want = biot_savart_kernel(helix_euler::Vec3::new(0.4, -0.2, 0.3), &cfg).unwrap().value;
    assert_eq!(out, want.to_array());
    unsafe { he_kernel_free(k) };
}

#[test]
fn errors_are_reported() {
    let mut k = ptr::null_mut();
    assert_eq!(unsafe { he_kernel_new(-1.0, HeNormalization::Paper, &mut k) }, HeStatus::InvalidArgument);
    assert!(k.is_null());
    assert!(last_error().starts_with("invalid_kappa"));

    let k = kernel(1.0, HeNormalization::Paper);
    let mut out = [0.0; 3];
    let axis = [0.0, 0.0, 0.5];
    assert_eq!(unsafe { he_kernel_eval(k, axis.as_ptr(), out.as_mut_ptr()) }, HeStatus::Singular);
    assert_eq!(unsafe { he_kernel_eval(k, ptr::null(), out.as_mut_ptr()) }, HeStatus::NullPointer);
    assert_eq!(unsafe { he_kernel_set_switch_radius(k, -1.0) }, HeStatus::InvalidArgument);
    unsafe { he_kernel_free(k) };
    unsafe { he_kernel_free(ptr::null_mut()) };
}

#[test]
fn velocity_of_balanced_pair() {
    let ps = [
        HeParticle { z1: 0.3, z2: 0.0, gamma: 1.0, area: 0.01 },
        HeParticle { z1: -0.3, z2: 0.0, gamma: -1.0, area: 0.01 },
    ];
    let mut h = ptr::null_mut();
    assert_eq!(unsafe { he_particles_new(1.0, ps.as_ptr(), 2, &mut h) }, HeStatus::Ok);
    assert_eq!(unsafe { he_particles_len(h) }, 2);
    assert_eq!(unsafe { he_particles_total_circulation(h) }, 0.0);
    let xs = [0.0, 0.5, 0.1, 0.8, 0.2, -0.4];
    let mut out = [0.0; 6];
    assert_eq!(unsafe { he_velocity(h, 0.0, 1e-10, xs.as_ptr(), 2, out.as_mut_ptr()) }, HeStatus::Ok);
    for (c, u) in xs.chunks(3).zip(out.chunks(3)) {
        let x = helix_euler::Vec3::new(c[0], c[1], c[2]);
        let xi = helix_euler::geometry::xi(x, &helix_euler::HelixParams::new(1.0).unwrap());
        let sw = u[0] * xi.x + u[1] * xi.y + u[2] * xi.z;
        let un = (u[0] * u[0] + u[1] * u[1] + u[2] * u[2]).sqrt();
        assert!(un > 0.0 && sw.abs() < 1e-8 * un * xi.norm());
    }
    unsafe { he_particles_free(h) };

    let lone = [HeParticle { z1: 0.3, z2: 0.0, gamma: 1.0, area: 0.01 }];
    let mut h = ptr::null_mut();
    assert_eq!(unsafe { he_particles_new(1.0, lone.as_ptr(), 1, &mut h) }, HeStatus::Ok);
    assert_eq!(unsafe { he_velocity(h, 0.0, 1e-8, xs.as_ptr(), 1, out.as_mut_ptr()) }, HeStatus::Unbalanced);
    unsafe { he_particles_free(h) };
}

#[test]
fn header_compiles_as_c() {
    let header = concat!(env!("CARGO_MANIFEST_DIR"), "/include/helix_euler.h");
    assert!(std::path::Path::new(header).exists());
    let Ok(out) = Command::new("cc").args(["-fsyntax-only", "-Wall", "-Werror", "-x", "c", header]).output() else {
        return;
    };
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
}
