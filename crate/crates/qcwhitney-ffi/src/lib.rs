//! C interface: opaque handles over domains and Whitney families, status
//! codes instead of Rust errors, and plain-struct results. Every fallible
//! call reports a `QcwStatus`; pointers returned by constructors must be
//! released with the matching `_free` function.

use std::os::raw::c_char;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use qcwhitney::bounds::{bounds_report, BoundsInput};
use qcwhitney::capacity::{grid_capacity, ring_capacity_exact, ring_condenser, SolverConfig};
use qcwhitney::domains::Domain;
use qcwhitney::geometry::PointN;
use qcwhitney::whitney::{exact_family_metrics, whitney_decompose, WhitneyFamily};
use qcwhitney::Error;

/// Status of a call. `Ok` is zero; everything else names the failure.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum QcwStatus {
    Ok = 0,
    NullArgument = 1,
    DegenerateBody = 2,
    Containment = 3,
    InvalidRing = 4,
    UnsupportedDimension = 5,
    MapUndefined = 6,
    InconsistentOracle = 7,
    InvalidCondenser = 8,
    NonConvergence = 9,
    OutOfDomain = 10,
    Config = 11,
    Io = 12,
    Panic = 13,
}

fn status_of(err: &Error) -> QcwStatus {
    match err {
        Error::DegenerateBody(_) => QcwStatus::DegenerateBody,
        Error::Containment { .. } => QcwStatus::Containment,
        Error::InvalidRing { .. } => QcwStatus::InvalidRing,
        Error::UnsupportedDimension(_) => QcwStatus::UnsupportedDimension,
        Error::MapUndefined(_) => QcwStatus::MapUndefined,
        Error::InconsistentOracle(_) => QcwStatus::InconsistentOracle,
        Error::InvalidCondenser(_) => QcwStatus::InvalidCondenser,
        Error::NonConvergence { .. } => QcwStatus::NonConvergence,
        Error::OutOfDomain(_) => QcwStatus::OutOfDomain,
        Error::Config(_) => QcwStatus::Config,
        Error::Io(_) => QcwStatus::Io,
    }
}

/// Opaque domain handle.
pub struct QcwDomain(Domain);

/// Opaque Whitney family handle.
pub struct QcwFamily(WhitneyFamily);

/// Family metrics. Ratio and dilatation fields are NaN for an empty
/// family.
#[repr(C)]
#[derive(Clone, Copy, Debug)]
pub struct QcwMetrics {
    pub min_ratio: f64,
    pub max_ratio: f64,
    pub max_interior_dilatation: f64,
    pub coverage_fraction: f64,
    pub cell_count: usize,
}

/// Grid capacity result. `value` is +infinity when the plates collide.
#[repr(C)]
#[derive(Clone, Copy, Debug)]
pub struct QcwCapacity {
    pub value: f64,
    pub iterations: u64,
    pub residual: f64,
}

/// The explicit constants for given (Q, C_r, n, Cn).
#[repr(C)]
#[derive(Clone, Copy, Debug)]
pub struct QcwBounds {
    /// Cap on the dilatation of mapped balls (+infinity sentinel possible).
    pub k_r_bound: f64,
    /// Cap on diameter/distance of mapped balls, at dilatation 1.
    pub delta_upper_factor: f64,
    pub c0: f64,
    /// Floor for diameter/distance of mapped balls.
    pub c3: f64,
}

fn set_status(out: *mut QcwStatus, value: QcwStatus) {
    if !out.is_null() {
        unsafe { *out = value };
    }
}

fn guard<T>(
    status: *mut QcwStatus,
    fallback: T,
    body: impl FnOnce() -> Result<T, QcwStatus>,
) -> T {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(v)) => {
            set_status(status, QcwStatus::Ok);
            v
        }
        Ok(Err(code)) => {
            set_status(status, code);
            fallback
        }
        Err(_) => {
            set_status(status, QcwStatus::Panic);
            fallback
        }
    }
}

unsafe fn point_from(coords: *const f64, dim: usize) -> Result<PointN, QcwStatus> {
    if coords.is_null() || dim == 0 || dim > 3 {
        return Err(QcwStatus::NullArgument);
    }
    let slice = std::slice::from_raw_parts(coords, dim);
    Ok(PointN::new(slice))
}

/// Look up a catalog domain ("square", "cube", "disk", "ball", "lshape",
/// "stadium") in the given dimension. Returns null on failure.
#[no_mangle]
pub unsafe extern "C" fn qcw_domain_by_name(
    name: *const c_char,
    dim: usize,
    status: *mut QcwStatus,
) -> *mut QcwDomain {
    guard(status, ptr::null_mut(), || {
        if name.is_null() {
            return Err(QcwStatus::NullArgument);
        }
        let name = std::ffi::CStr::from_ptr(name)
            .to_str()
            .map_err(|_| QcwStatus::Config)?;
        let domain = Domain::by_name(name, dim).map_err(|e| status_of(&e))?;
        Ok(Box::into_raw(Box::new(QcwDomain(domain))))
    })
}

/// Axis-aligned box domain from corner coordinate arrays of length `dim`.
#[no_mangle]
pub unsafe extern "C" fn qcw_domain_box(
    lo: *const f64,
    hi: *const f64,
    dim: usize,
    status: *mut QcwStatus,
) -> *mut QcwDomain {
    guard(status, ptr::null_mut(), || {
        let lo = point_from(lo, dim)?;
        let hi = point_from(hi, dim)?;
        let domain = Domain::box_domain(lo, hi).map_err(|e| status_of(&e))?;
        Ok(Box::into_raw(Box::new(QcwDomain(domain))))
    })
}

#[no_mangle]
pub unsafe extern "C" fn qcw_domain_free(domain: *mut QcwDomain) {
    if !domain.is_null() {
        drop(Box::from_raw(domain));
    }
}

#[no_mangle]
pub unsafe extern "C" fn qcw_domain_dim(domain: *const QcwDomain) -> usize {
    if domain.is_null() {
        return 0;
    }
    (*domain).0.dim()
}

/// Signed distance to the domain complement at a point of length `dim`
/// (positive inside). NaN on bad arguments.
#[no_mangle]
pub unsafe extern "C" fn qcw_domain_distance(
    domain: *const QcwDomain,
    point: *const f64,
    dim: usize,
) -> f64 {
    if domain.is_null() {
        return f64::NAN;
    }
    let d = &(*domain).0;
    if dim != d.dim() {
        return f64::NAN;
    }
    match point_from(point, dim) {
        Ok(p) => d.dist_to_complement(&p),
        Err(_) => f64::NAN,
    }
}

/// Whitney decomposition of a bounded domain down to `max_level`.
#[no_mangle]
pub unsafe extern "C" fn qcw_decompose(
    domain: *const QcwDomain,
    max_level: u32,
    status: *mut QcwStatus,
) -> *mut QcwFamily {
    guard(status, ptr::null_mut(), || {
        if domain.is_null() {
            return Err(QcwStatus::NullArgument);
        }
        let family = whitney_decompose(&(*domain).0, max_level).map_err(|e| status_of(&e))?;
        Ok(Box::into_raw(Box::new(QcwFamily(family))))
    })
}

#[no_mangle]
pub unsafe extern "C" fn qcw_family_free(family: *mut QcwFamily) {
    if !family.is_null() {
        drop(Box::from_raw(family));
    }
}

#[no_mangle]
pub unsafe extern "C" fn qcw_family_cell_count(family: *const QcwFamily) -> usize {
    if family.is_null() {
        return 0;
    }
    (*family).0.cells.len()
}

/// Level and dyadic index of cell `i`. `index` must hold `dim` entries.
#[no_mangle]
pub unsafe extern "C" fn qcw_family_cell(
    family: *const QcwFamily,
    i: usize,
    level: *mut u32,
    index: *mut i64,
) -> QcwStatus {
    if family.is_null() || level.is_null() || index.is_null() {
        return QcwStatus::NullArgument;
    }
    let fam = &(*family).0;
    let Some(cell) = fam.cells.get(i) else {
        return QcwStatus::OutOfDomain;
    };
    *level = cell.level;
    for a in 0..fam.dim() {
        *index.add(a) = cell.index[a];
    }
    QcwStatus::Ok
}

/// Exact metrics of a decomposition (ratios, dilatation, probed coverage).
#[no_mangle]
pub unsafe extern "C" fn qcw_family_metrics(
    family: *const QcwFamily,
    out: *mut QcwMetrics,
) -> QcwStatus {
    if family.is_null() || out.is_null() {
        return QcwStatus::NullArgument;
    }
    let mut status = QcwStatus::Ok;
    let metrics = guard(&mut status, None, || {
        Ok(Some(exact_family_metrics(&(*family).0)))
    });
    let Some(m) = metrics else { return status };
    *out = QcwMetrics {
        min_ratio: m.min_ratio.unwrap_or(f64::NAN),
        max_ratio: m.max_ratio.unwrap_or(f64::NAN),
        max_interior_dilatation: m.max_interior_dilatation.unwrap_or(f64::NAN),
        coverage_fraction: m.coverage_fraction,
        cell_count: m.cell_count,
    };
    QcwStatus::Ok
}

/// Closed-form capacity of the ring condenser (inner radius r, outer R) in
/// dimension n, at the conformal exponent p = n.
#[no_mangle]
pub unsafe extern "C" fn qcw_ring_capacity_exact(
    r: f64,
    big_r: f64,
    n: usize,
    status: *mut QcwStatus,
) -> f64 {
    guard(status, f64::NAN, || {
        ring_capacity_exact(r, big_r, n).map_err(|e| status_of(&e))
    })
}

/// Grid estimate of the ring capacity. `center` has `dim` coordinates.
/// Non-convergence fills `out` with the partial estimate and returns the
/// matching status.
#[no_mangle]
pub unsafe extern "C" fn qcw_ring_capacity_grid(
    center: *const f64,
    dim: usize,
    r: f64,
    big_r: f64,
    p: f64,
    h: f64,
    tol: f64,
    max_iter: u64,
    out: *mut QcwCapacity,
) -> QcwStatus {
    if out.is_null() {
        return QcwStatus::NullArgument;
    }
    let mut status = QcwStatus::Ok;
    let result = guard(&mut status, None, || {
        let center = point_from(center, dim)?;
        if !(h > 0.0) {
            return Err(QcwStatus::Config);
        }
        let pad = (0.25 * big_r).max(4.0 * h);
        let condenser =
            ring_condenser(&center, r, big_r, pad, h / 2.0).map_err(|e| status_of(&e))?;
        let cfg = SolverConfig { p, h, tol, max_iter };
        match grid_capacity(&condenser, &cfg) {
            Ok(est) => Ok(Some((est, QcwStatus::Ok))),
            Err(Error::NonConvergence { estimate }) => {
                Ok(Some((*estimate, QcwStatus::NonConvergence)))
            }
            Err(e) => Err(status_of(&e)),
        }
    });
    let Some((est, code)) = result else { return status };
    *out = QcwCapacity {
        value: est.value.as_f64(),
        iterations: est.iterations,
        residual: est.residual,
    };
    code
}

/// The explicit constants for a map of distortion `q` and a ball of
/// embedding coefficient `c_r` in dimension `n`, with capacity constant
/// `cn` = 1/K(n).
#[no_mangle]
pub unsafe extern "C" fn qcw_bounds(
    q: f64,
    c_r: f64,
    n: usize,
    cn: f64,
    out: *mut QcwBounds,
) -> QcwStatus {
    if out.is_null() {
        return QcwStatus::NullArgument;
    }
    let mut status = QcwStatus::Ok;
    let result = guard(&mut status, None, || {
        let input = BoundsInput::new(q, c_r, n, cn).map_err(|e| status_of(&e))?;
        let report = bounds_report(&input).map_err(|e| status_of(&e))?;
        Ok(Some(report))
    });
    let Some(report) = result else { return status };
    *out = QcwBounds {
        k_r_bound: report.k_r_bound,
        delta_upper_factor: report.delta_upper_factor,
        c0: report.c0,
        c3: report.c3,
    };
    QcwStatus::Ok
}

/// Static name of a status code.
#[no_mangle]
pub extern "C" fn qcw_status_name(status: QcwStatus) -> *const c_char {
    let name: &'static [u8] = match status {
        QcwStatus::Ok => b"ok\0",
        QcwStatus::NullArgument => b"null argument\0",
        QcwStatus::DegenerateBody => b"degenerate body\0",
        QcwStatus::Containment => b"containment violation\0",
        QcwStatus::InvalidRing => b"invalid ring\0",
        QcwStatus::UnsupportedDimension => b"unsupported dimension\0",
        QcwStatus::MapUndefined => b"map undefined\0",
        QcwStatus::InconsistentOracle => b"inconsistent oracle\0",
        QcwStatus::InvalidCondenser => b"invalid condenser\0",
        QcwStatus::NonConvergence => b"solver did not converge\0",
        QcwStatus::OutOfDomain => b"argument out of domain\0",
        QcwStatus::Config => b"configuration error\0",
        QcwStatus::Io => b"io error\0",
        QcwStatus::Panic => b"internal panic\0",
    };
    name.as_ptr() as *const c_char
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::ffi::CString;

    #[test]
    fn domain_family_round_trip() {
        unsafe {
            let name = CString::new("square").unwrap();
            let mut status = QcwStatus::Panic;
            let domain = qcw_domain_by_name(name.as_ptr(), 2, &mut status);
            assert_eq!(status, QcwStatus::Ok);
            assert_eq!(qcw_domain_dim(domain), 2);
            let d = qcw_domain_distance(domain, [0.5f64, 0.5].as_ptr(), 2);
            assert!((d - 0.5).abs() < 1e-12);

            let family = qcw_decompose(domain, 5, &mut status);
            assert_eq!(status, QcwStatus::Ok);
            let count = qcw_family_cell_count(family);
            assert!(count > 0);

            let mut level = 0u32;
            let mut index = [0i64; 2];
            assert_eq!(
                qcw_family_cell(family, 0, &mut level, index.as_mut_ptr()),
                QcwStatus::Ok
            );
            assert!(level >= 1);
            assert_eq!(
                qcw_family_cell(family, count, &mut level, index.as_mut_ptr()),
                QcwStatus::OutOfDomain
            );

            let mut metrics = QcwMetrics {
                min_ratio: 0.0,
                max_ratio: 0.0,
                max_interior_dilatation: 0.0,
                coverage_fraction: 0.0,
                cell_count: 0,
            };
            assert_eq!(qcw_family_metrics(family, &mut metrics), QcwStatus::Ok);
            assert_eq!(metrics.cell_count, count);
            assert!(metrics.min_ratio >= 0.25 && metrics.max_ratio <= 1.0);
            assert!((metrics.coverage_fraction - 1.0).abs() < 1e-12);

            qcw_family_free(family);
            qcw_domain_free(domain);
        }
    }

    #[test]
    fn rejected_names_return_null_with_status() {
        unsafe {
            let name = CString::new("torus").unwrap();
            let mut status = QcwStatus::Ok;
            let domain = qcw_domain_by_name(name.as_ptr(), 2, &mut status);
            assert!(domain.is_null());
            assert_eq!(status, QcwStatus::Config);
            let nullname = qcw_domain_by_name(std::ptr::null(), 2, &mut status);
            assert!(nullname.is_null());
            assert_eq!(status, QcwStatus::NullArgument);
        }
    }

    #[test]
    fn ring_capacity_through_the_interface() {
        unsafe {
            let mut status = QcwStatus::Panic;
            let exact = qcw_ring_capacity_exact(1.0, std::f64::consts::E, 2, &mut status);
            assert_eq!(status, QcwStatus::Ok);
            assert!((exact - 2.0 * std::f64::consts::PI).abs() < 1e-12);

            let bad = qcw_ring_capacity_exact(2.0, 1.0, 2, &mut status);
            assert_eq!(status, QcwStatus::InvalidRing);
            assert!(bad.is_nan());

            let mut out = QcwCapacity { value: 0.0, iterations: 0, residual: 0.0 };
            let code = qcw_ring_capacity_grid(
                [0.0f64, 0.0].as_ptr(),
                2,
                1.0,
                2.0,
                2.0,
                1.0 / 16.0,
                1e-8,
                200_000,
                &mut out,
            );
            assert_eq!(code, QcwStatus::Ok);
            let expected = qcw_ring_capacity_exact(1.0, 2.0, 2, &mut status);
            assert!((out.value - expected).abs() / expected < 0.2);

            let short = qcw_ring_capacity_grid(
                [0.0f64, 0.0].as_ptr(),
                2,
                1.0,
                2.0,
                2.0,
                1.0 / 16.0,
                1e-8,
                2,
                &mut out,
            );
            assert_eq!(short, QcwStatus::NonConvergence);
            assert!(out.value > 0.0, "partial estimate still reported");
        }
    }

    #[test]
    fn bounds_through_the_interface() {
        unsafe {
            let mut out = QcwBounds {
                k_r_bound: 0.0,
                delta_upper_factor: 0.0,
                c0: 0.0,
                c3: 0.0,
            };
            let cn = 2.0 / std::f64::consts::PI;
            assert_eq!(qcw_bounds(1.0, 2.0, 2, cn, &mut out), QcwStatus::Ok);
            let expected = (std::f64::consts::PI.powi(2) / 2f64.ln()).exp();
            assert!((out.k_r_bound - expected).abs() / expected < 1e-9);
            assert!(out.c3 > 0.0 && out.c3 < 1.0);

            assert_eq!(
                qcw_bounds(0.5, 2.0, 2, cn, &mut out),
                QcwStatus::OutOfDomain
            );
        }
    }

    #[test]
    fn status_names_are_nul_terminated() {
        for code in [QcwStatus::Ok, QcwStatus::Panic, QcwStatus::Config] {
            let ptr = qcw_status_name(code);
            let text = unsafe { std::ffi::CStr::from_ptr(ptr) }.to_str().unwrap();
            assert!(!text.is_empty());
        }
    }
}
