//! C ABI for the vslepian toolkit.
//!
//! Every fallible call returns a [`VslStatus`]; on failure the message is
//! available from [`vsl_last_error_message`] on the same thread. Regions and
//! bases are opaque handles released with their `_free` functions. Angles
//! are radians except where a name says `_deg`.

use std::cell::RefCell;
use std::ffi::c_char;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use vslepian::region::Ring;
use vslepian::specfun::{xlm, Wigner3jArgs};
use vslepian::spectral::ShannonReport;
use vslepian::vsh::SpherePoint;
use vslepian::{assemble_quadrature, polar_cap_basis, solve, Error, Part, Region, SlepianBasis};

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VslStatus {
    Ok = 0,
    NullPointer = 1,
    Domain = 2,
    IndexOutOfRange = 3,
    Numerical = 4,
    Parse = 5,
    Io = 6,
    BufferTooSmall = 7,
    Panic = 8,
}

/// Part of coefficient space.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VslPart {
    Radial = 0,
    Tangential = 1,
    Full = 2,
}

impl From<VslPart> for Part {
    fn from(p: VslPart) -> Part {
        match p {
            VslPart::Radial => Part::Radial,
            VslPart::Tangential => Part::Tangential,
            VslPart::Full => Part::Full,
        }
    }
}

/// Opaque region handle.
pub struct VslRegion(Region);

/// Opaque Slepian basis handle.
pub struct VslBasis(SlepianBasis);

thread_local! {
    static LAST_ERROR: RefCell<String> = const { RefCell::new(String::new()) };
}

fn set_error(msg: String) {
    LAST_ERROR.with(|e| *e.borrow_mut() = msg);
}

fn status_of(e: &Error) -> VslStatus {
    match e {
        Error::IndexOutOfRange { .. } => VslStatus::IndexOutOfRange,
        Error::Parse { .. } => VslStatus::Parse,
        Error::Io(_) => VslStatus::Io,
        e if e.is_numerical() => VslStatus::Numerical,
        _ => VslStatus::Domain,
    }
}

fn guard(f: impl FnOnce() -> Result<(), VslStatus>) -> VslStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error(String::new());
            VslStatus::Ok
        }
        Ok(Err(s)) => s,
        Err(_) => {
            set_error("internal panic".into());
            VslStatus::Panic
        }
    }
}

fn fail(e: Error) -> VslStatus {
    let s = status_of(&e);
    set_error(e.to_string());
    s
}

fn null() -> VslStatus {
    set_error("null pointer argument".into());
    VslStatus::NullPointer
}

/// Copies the last error message of this thread into `buf` (NUL-terminated,
/// truncated to `len`). Returns the full message length without the NUL.
///
/// # Safety
///
/// `buf` is null or valid for `len` bytes.
#[no_mangle]
pub unsafe extern "C" fn vsl_last_error_message(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| {
        let msg = e.borrow();
        if !buf.is_null() && len > 0 {
            let n = msg.len().min(len - 1);
            // SAFETY: caller guarantees `buf` holds `len` bytes.
            unsafe {
                ptr::copy_nonoverlapping(msg.as_ptr() as *const c_char, buf, n);
                *buf.add(n) = 0;
            }
        }
        msg.len()
    })
}

/// Normalized Legendre function `X_lm(theta)`.
///
/// # Safety
///
/// `out` is null or valid for one write.
#[no_mangle]
pub unsafe extern "C" fn vsl_xlm(l: u32, m: i32, theta: f64, out: *mut f64) -> VslStatus {
    guard(|| {
        if out.is_null() {
            return Err(null());
        }
        let v = xlm(l as usize, m, theta).map_err(fail)?;
        // SAFETY: checked non-null.
        unsafe { *out = v };
        Ok(())
    })
}

/// Wigner 3-j symbol; zero for disallowed couplings.
#[no_mangle]
pub extern "C" fn vsl_wigner3j(l1: u32, l2: u32, l3: u32, m1: i32, m2: i32, m3: i32) -> f64 {
    catch_unwind(|| vslepian::specfun::wigner3j(Wigner3jArgs::new(l1, l2, l3, m1, m2, m3))).unwrap_or(f64::NAN)
}

/// Shannon numbers `dim · area / 4π` of a region of the given area.
///
/// # Safety
///
/// Output pointers are null or valid for one write.
#[no_mangle]
pub unsafe extern "C" fn vsl_shannon_predicted(
    area: f64,
    l_max: u32,
    total: *mut f64,
    radial: *mut f64,
    tangential: *mut f64,
) -> VslStatus {
    guard(|| {
        if total.is_null() || radial.is_null() || tangential.is_null() {
            return Err(null());
        }
        let s = ShannonReport::predicted(area, l_max as usize);
        // SAFETY: checked non-null.
        unsafe {
            *total = s.total;
            *radial = s.radial;
            *tangential = s.tangential;
        }
        Ok(())
    })
}

fn put<T>(out: *mut *mut T, value: T) {
    // SAFETY: callers check `out` for null first.
    unsafe { *out = Box::into_raw(Box::new(value)) };
}

/// New polar cap of colatitude radius `theta`.
///
/// # Safety
///
/// `out` is null or valid for one write.
#[no_mangle]
pub unsafe extern "C" fn vsl_region_polar_cap(theta: f64, out: *mut *mut VslRegion) -> VslStatus {
    guard(|| {
        if out.is_null() {
            return Err(null());
        }
        put(out, VslRegion(Region::polar_cap(theta).map_err(fail)?));
        Ok(())
    })
}

/// New polygon union. `lonlat_deg` holds `(lon, lat)` pairs in degrees for
/// all rings back to back; ring `i` has `ring_sizes[i]` vertices.
///
/// # Safety
///
/// `ring_sizes` holds `n_rings` values and `lonlat_deg` twice their sum; `out` is valid for one write.
#[no_mangle]
pub unsafe extern "C" fn vsl_region_polygons(
    lonlat_deg: *const f64,
    ring_sizes: *const usize,
    n_rings: usize,
    out: *mut *mut VslRegion,
) -> VslStatus {
    guard(|| {
        if lonlat_deg.is_null() || ring_sizes.is_null() || out.is_null() {
            return Err(null());
        }
        // SAFETY: caller passes `n_rings` sizes and the matching vertex pairs.
        let sizes = unsafe { std::slice::from_raw_parts(ring_sizes, n_rings) };
        let total: usize = sizes.iter().sum();
        let flat = unsafe { std::slice::from_raw_parts(lonlat_deg, 2 * total) };
        let mut rings = Vec::with_capacity(n_rings);
        let mut at = 0;
        for &n in sizes {
            let v: Vec<(f64, f64)> = (at..at + n).map(|i| (flat[2 * i], flat[2 * i + 1])).collect();
            rings.push(Ring::from_degrees(&v).map_err(fail)?);
            at += n;
        }
        put(out, VslRegion(Region::polygons(rings).map_err(fail)?));
        Ok(())
    })
}

/// Releases a region; null is ignored.
///
/// # Safety
///
/// `region` is null or a live handle from this library; it must not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn vsl_region_free(region: *mut VslRegion) {
    if !region.is_null() {
        // SAFETY: pointer came from Box::into_raw in this crate.
        drop(unsafe { Box::from_raw(region) });
    }
}

/// Region area in steradians.
///
/// # Safety
///
/// `region` is null or a live handle; `out` is null or valid for one write.
#[no_mangle]
pub unsafe extern "C" fn vsl_region_area(region: *const VslRegion, out: *mut f64) -> VslStatus {
    guard(|| {
        if region.is_null() || out.is_null() {
            return Err(null());
        }
        // SAFETY: checked non-null; handle is live.
        let r = unsafe { &(*region).0 };
        let a = r.area().map_err(fail)?;
        unsafe { *out = a };
        Ok(())
    })
}

/// Membership of the point `(theta, phi)`.
///
/// # Safety
///
/// `region` is null or a live handle; `out` is null or valid for one write.
#[no_mangle]
pub unsafe extern "C" fn vsl_region_contains(region: *const VslRegion, theta: f64, phi: f64, out: *mut bool) -> VslStatus {
    guard(|| {
        if region.is_null() || out.is_null() {
            return Err(null());
        }
        let p = SpherePoint::new(theta, phi).map_err(fail)?;
        // SAFETY: checked non-null; handle is live.
        unsafe { *out = (*region).0.contains(&p) };
        Ok(())
    })
}

/// Mixed-order polar-cap basis from the analytic per-order kernels.
///
/// # Safety
///
/// `out` is null or valid for one write.
#[no_mangle]
pub unsafe extern "C" fn vsl_basis_polar_cap(theta: f64, l_max: u32, part: VslPart, out: *mut *mut VslBasis) -> VslStatus {
    guard(|| {
        if out.is_null() {
            return Err(null());
        }
        let b = polar_cap_basis(theta, l_max as usize, part.into()).map_err(fail)?;
        put(out, VslBasis(b));
        Ok(())
    })
}

/// Basis of any region from the quadrature-assembled kernel.
///
/// # Safety
///
/// `region` is null or a live handle; `out` is null or valid for one write.
#[no_mangle]
pub unsafe extern "C" fn vsl_basis_region(region: *const VslRegion, l_max: u32, part: VslPart, out: *mut *mut VslBasis) -> VslStatus {
    guard(|| {
        if region.is_null() || out.is_null() {
            return Err(null());
        }
        // SAFETY: checked non-null; handle is live.
        let r = unsafe { &(*region).0 };
        let k = assemble_quadrature(r, l_max as usize, part.into()).map_err(fail)?;
        put(out, VslBasis(solve(&k).map_err(fail)?));
        Ok(())
    })
}

/// Releases a basis; null is ignored.
///
/// # Safety
///
/// `basis` is null or a live handle from this library; it must not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn vsl_basis_free(basis: *mut VslBasis) {
    if !basis.is_null() {
        // SAFETY: pointer came from Box::into_raw in this crate.
        drop(unsafe { Box::from_raw(basis) });
    }
}

/// Number of columns; 0 for null.
///
/// # Safety
///
/// `basis` is null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn vsl_basis_len(basis: *const VslBasis) -> usize {
    if basis.is_null() {
        return 0;
    }
    // SAFETY: checked non-null; handle is live.
    unsafe { (*basis).0.len() }
}

/// Length of each column; 0 for null.
///
/// # Safety
///
/// `basis` is null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn vsl_basis_dim(basis: *const VslBasis) -> usize {
    if basis.is_null() {
        return 0;
    }
    // SAFETY: checked non-null; handle is live.
    unsafe { (*basis).0.dim() }
}

/// Concentration factor of column `alpha` (zero-based).
///
/// # Safety
///
/// `basis` is null or a live handle; `out` is null or valid for one write.
#[no_mangle]
pub unsafe extern "C" fn vsl_basis_eigenvalue(basis: *const VslBasis, alpha: usize, out: *mut f64) -> VslStatus {
    guard(|| {
        if basis.is_null() || out.is_null() {
            return Err(null());
        }
        // SAFETY: checked non-null; handle is live.
        let b = unsafe { &(*basis).0 };
        let v = *b.lambdas.get(alpha).ok_or_else(|| {
            fail(Error::IndexOutOfRange {
                index: alpha,
                len: b.len(),
            })
        })?;
        unsafe { *out = v };
        Ok(())
    })
}

/// Copies column `alpha` (zero-based, canonical layout) into `buf`, which
/// must hold `vsl_basis_dim` values.
///
/// # Safety
///
/// `basis` is null or a live handle; `buf` is null or valid for `len` values.
#[no_mangle]
pub unsafe extern "C" fn vsl_basis_column(basis: *const VslBasis, alpha: usize, buf: *mut f64, len: usize) -> VslStatus {
    guard(|| {
        if basis.is_null() || buf.is_null() {
            return Err(null());
        }
        // SAFETY: checked non-null; handle is live.
        let b = unsafe { &(*basis).0 };
        let col = b.column(alpha).map_err(fail)?;
        if len < col.len() {
            set_error(format!("buffer of {len} values, column needs {}", col.len()));
            return Err(VslStatus::BufferTooSmall);
        }
        // SAFETY: `buf` holds at least `col.len()` values.
        unsafe { ptr::copy_nonoverlapping(col.as_ptr(), buf, col.len()) };
        Ok(())
    })
}
