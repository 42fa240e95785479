//! C ABI for `helix-euler`.
//!
//! Objects are opaque handles created by `he_*_new` and released by the matching
//! `he_*_free`. Every fallible call returns an [`HeStatus`]; on failure the
//! message is kept per thread and can be copied out with [`he_last_error`].
//! Points are `double[3]` arrays, stored contiguously for batches.

use std::cell::RefCell;
use std::ffi::{c_char, CStr};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;
use std::slice;

use helix_euler::biotsavart::{velocity_filament_many, Particle, VelocityEvalConfig, VorticityParticles};
use helix_euler::kernel::{biot_savart_kernel, green_images, green_series, kernel_bound_ratio, KernelConfig, Normalization};
use helix_euler::{Error, HelixParams, Vec2, Vec3};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HeStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Unbalanced = 3,
    Singular = 4,
    QuadratureFailed = 5,
    NumericalFailure = 6,
    Panic = 7,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HeNormalization {
    Paper = 0,
    Physical = 1,
}

/// One slice particle: position `(z1, z2)`, circulation and area.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HeParticle {
    pub z1: f64,
    pub z2: f64,
    pub gamma: f64,
    pub area: f64,
}

/// Kernel configuration handle.
pub struct HeKernel {
    cfg: KernelConfig,
}

/// Particle set handle.
pub struct HeParticles {
    inner: VorticityParticles,
}

thread_local! {
    static LAST_ERROR: RefCell<Vec<u8>> = const { RefCell::new(Vec::new()) };
}

fn set_error(msg: &str) {
    LAST_ERROR.with(|e| {
        let mut e = e.borrow_mut();
        e.clear();
        e.extend_from_slice(msg.as_bytes());
    });
}

fn status_of(err: &Error) -> HeStatus {
    match err {
        Error::InvalidConfig { .. }
        | Error::ResolutionTooCoarse { .. }
        | Error::EmptyParticleSet
        | Error::InsufficientSnapshots(_)
        | Error::Normalization { .. } => HeStatus::InvalidArgument,
        Error::UnbalancedVorticity { .. } => HeStatus::Unbalanced,
        Error::SingularInput(..) | Error::OnFilament => HeStatus::Singular,
        Error::QuadratureNonconvergence { .. } => HeStatus::QuadratureFailed,
        _ => HeStatus::NumericalFailure,
    }
}

fn guard<F: FnOnce() -> Result<(), HeStatus>>(f: F) -> HeStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => HeStatus::Ok,
        Ok(Err(s)) => s,
        Err(_) => {
            set_error("panic inside helix-euler");
            HeStatus::Panic
        }
    }
}

fn fail(err: Error) -> HeStatus {
    set_error(&format!("{}: {err}", err.code()));
    status_of(&err)
}

fn null() -> HeStatus {
    set_error("null pointer argument");
    HeStatus::NullPointer
}

unsafe fn point(x: *const f64) -> Result<Vec3, HeStatus> {
    if x.is_null() {
        return Err(null());
    }
    let s = slice::from_raw_parts(x, 3);
    Ok(Vec3::new(s[0], s[1], s[2]))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn he_version() -> *const c_char {
    static V: &CStr = match CStr::from_bytes_with_nul(concat!(env!("CARGO_PKG_VERSION"), "\0").as_bytes()) {
        Ok(v) => v,
        Err(_) => panic!("version"),
    };
    V.as_ptr()
}

/// Copies the calling thread's last error message into `buf` (NUL-terminated,
/// truncated to `len`). Returns the full message length without the NUL.
///
/// # Safety
/// `buf` must be null or point to `len` writable bytes.
#[no_mangle]
pub unsafe extern "C" fn he_last_error(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| {
        let e = e.borrow();
        if !buf.is_null() && len > 0 {
            let n = e.len().min(len - 1);
            ptr::copy_nonoverlapping(e.as_ptr(), buf as *mut u8, n);
            *buf.add(n) = 0;
        }
        e.len()
    })
}

/// Creates a kernel handle for period parameter `kappa`.
///
/// # Safety
/// `out` must be a valid pointer; on success it receives a handle owned by the caller.
#[no_mangle]
pub unsafe extern "C" fn he_kernel_new(kappa: f64, normalization: HeNormalization, out: *mut *mut HeKernel) -> HeStatus {
    guard(|| {
        if out.is_null() {
            return Err(null());
        }
        let h = HelixParams::new(kappa).map_err(fail)?;
        let n = match normalization {
            HeNormalization::Paper => Normalization::Paper,
            HeNormalization::Physical => Normalization::Physical,
        };
        let cfg = KernelConfig::new(h).with_normalization(n);
        cfg.validate().map_err(fail)?;
        *out = Box::into_raw(Box::new(HeKernel { cfg }));
        Ok(())
    })
}

/// # Safety
/// `k` must be null or a handle from [`he_kernel_new`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn he_kernel_free(k: *mut HeKernel) {
    if !k.is_null() {
        drop(Box::from_raw(k));
    }
}

unsafe fn kernel<'a>(k: *const HeKernel) -> Result<&'a KernelConfig, HeStatus> {
    k.as_ref().map(|k| &k.cfg).ok_or_else(null)
}

/// Sets the image/series switch radius (absolute units).
///
/// # Safety
/// `k` must be a live kernel handle.
#[no_mangle]
pub unsafe extern "C" fn he_kernel_set_switch_radius(k: *mut HeKernel, radius: f64) -> HeStatus {
    guard(|| {
        let k = k.as_mut().ok_or_else(null)?;
        let cfg = k.cfg.with_switch_radius(radius);
        cfg.validate().map_err(fail)?;
        k.cfg = cfg;
        Ok(())
    })
}

/// Biot–Savart kernel at `x` into `out[3]`.
///
/// # Safety
/// `k` must be a live handle; `x` and `out` must point to three doubles.
#[no_mangle]
pub unsafe extern "C" fn he_kernel_eval(k: *const HeKernel, x: *const f64, out: *mut f64) -> HeStatus {
    guard(|| {
        let cfg = kernel(k)?;
        let x = point(x)?;
        if out.is_null() {
            return Err(null());
        }
        let v = biot_savart_kernel(x, cfg).map_err(fail)?.value;
        slice::from_raw_parts_mut(out, 3).copy_from_slice(&v.to_array());
        Ok(())
    })
}

unsafe fn scalar(
    k: *const HeKernel,
    x: *const f64,
    out: *mut f64,
    f: fn(Vec3, &KernelConfig) -> helix_euler::Result<f64>,
) -> HeStatus {
    guard(|| {
        let cfg = kernel(k)?;
        let x = point(x)?;
        if out.is_null() {
            return Err(null());
        }
        *out = f(x, cfg).map_err(fail)?;
        Ok(())
    })
}

/// Green's function by the Bessel series.
///
/// # Safety
/// As [`he_kernel_eval`], with `out` pointing to one double.
#[no_mangle]
pub unsafe extern "C" fn he_green_series(k: *const HeKernel, x: *const f64, out: *mut f64) -> HeStatus {
    scalar(k, x, out, green_series)
}

/// Green's function by image sums.
///
/// # Safety
/// As [`he_green_series`].
#[no_mangle]
pub unsafe extern "C" fn he_green_images(k: *const HeKernel, x: *const f64, out: *mut f64) -> HeStatus {
    scalar(k, x, out, green_images)
}

/// `|𝒦(x)| / (1/|x|² + 1/|x̃|)`.
///
/// # Safety
/// As [`he_green_series`].
#[no_mangle]
pub unsafe extern "C" fn he_kernel_bound_ratio(k: *const HeKernel, x: *const f64, out: *mut f64) -> HeStatus {
    scalar(k, x, out, kernel_bound_ratio)
}

/// Creates a particle set from `n` particles.
///
/// # Safety
/// `ps` must point to `n` particles (or be null with `n == 0`); `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn he_particles_new(
    kappa: f64,
    ps: *const HeParticle,
    n: usize,
    out: *mut *mut HeParticles,
) -> HeStatus {
    guard(|| {
        if out.is_null() || (ps.is_null() && n > 0) {
            return Err(null());
        }
        let h = HelixParams::new(kappa).map_err(fail)?;
        let src = if n == 0 { &[][..] } else { slice::from_raw_parts(ps, n) };
        let v = src
            .iter()
            .map(|p| Particle {
                z: Vec2::new(p.z1, p.z2),
                gamma: p.gamma,
                area: p.area,
            })
            .collect();
        let inner = VorticityParticles::new(h, v).map_err(fail)?;
        *out = Box::into_raw(Box::new(HeParticles { inner }));
        Ok(())
    })
}

/// # Safety
/// `p` must be null or a handle from [`he_particles_new`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn he_particles_free(p: *mut HeParticles) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}

/// Number of particles, 0 for a null handle.
///
/// # Safety
/// `p` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn he_particles_len(p: *const HeParticles) -> usize {
    p.as_ref().map_or(0, |p| p.inner.len())
}

/// Compensated sum of the circulations, NaN for a null handle.
///
/// # Safety
/// `p` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn he_particles_total_circulation(p: *const HeParticles) -> f64 {
    p.as_ref().map_or(f64::NAN, |p| p.inner.total_circulation())
}

/// Velocity of balanced particles at `n` points `xs[3n]` into `out[3n]`, with blob
/// radius `blob_epsilon` (0 for bare filaments) and relative quadrature tolerance
/// `quad_tolerance`. Results do not depend on the thread count.
///
/// # Safety
/// `p` must be a live handle; `xs` and `out` must point to `3n` doubles.
#[no_mangle]
pub unsafe extern "C" fn he_velocity(
    p: *const HeParticles,
    blob_epsilon: f64,
    quad_tolerance: f64,
    xs: *const f64,
    n: usize,
    out: *mut f64,
) -> HeStatus {
    guard(|| {
        let w = &p.as_ref().ok_or_else(null)?.inner;
        if n == 0 {
            return Ok(());
        }
        if xs.is_null() || out.is_null() {
            return Err(null());
        }
        let cfg = VelocityEvalConfig::new(w.h)
            .with_blob(blob_epsilon)
            .with_tolerance(quad_tolerance);
        cfg.validate().map_err(fail)?;
        let pts: Vec<Vec3> = slice::from_raw_parts(xs, 3 * n)
            .chunks_exact(3)
            .map(|c| Vec3::new(c[0], c[1], c[2]))
            .collect();
        let us = velocity_filament_many(&pts, w, &cfg).map_err(fail)?;
        let dst = slice::from_raw_parts_mut(out, 3 * n);
        for (d, u) in dst.chunks_exact_mut(3).zip(us) {
            d.copy_from_slice(&u.to_array());
        }
        Ok(())
    })
}
