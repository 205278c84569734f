//! C ABI for the dyadic-analysis toolkit.
//!
//! Grids, fields, and partitions cross the boundary as opaque handles that
//! must be released with the matching `_free` function. Every fallible call
//! returns a [`PaleyStatus`]; outputs are written through pointers only on
//! `PALEY_STATUS_OK`. Complex samples are passed as interleaved `re, im`
//! doubles, `2 * num_points` per field. The generated header lives at
//! `include/paley.h`.

use paley::bootstrap::{run_bootstrap, theta, BootstrapConfig};
use paley::counterexample::calibrate_amplitude;
use paley::dyadic::{
    bernstein_ratio, build_partition, dyadic_coefficients, project, project_low, sobolev_norm,
    DyadicPartition,
};
use paley::error::Error;
use paley::frac::{cutoff_field, frac_laplacian, manufacture_potential};
use paley::grid::{lp_norm, Field, PeriodicGrid};
use paley::iteration::{
    bound_constant, check_hypotheses, fixed_point_oracle, verify_conclusion, IterationParams,
};
use paley::Complex64;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

/// Status codes returned by every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PaleyStatus {
    Ok = 0,
    InvalidParameter = 1,
    InvalidInput = 2,
    Precondition = 3,
    Numerical = 4,
    NullPointer = 5,
    BufferTooSmall = 6,
    Utf8 = 7,
    Io = 8,
    Panic = 9,
}

fn status_of(err: &Error) -> PaleyStatus {
    match err {
        Error::InvalidParameter(_) => PaleyStatus::InvalidParameter,
        Error::InvalidInput(_) | Error::GridMismatch(_) | Error::Format(_) => {
            PaleyStatus::InvalidInput
        }
        Error::Precondition(_) | Error::SupportViolation(_) => PaleyStatus::Precondition,
        Error::Io(_) => PaleyStatus::Io,
        _ => PaleyStatus::Numerical,
    }
}

/// Static name of a status code (never null, do not free).
#[no_mangle]
pub extern "C" fn paley_status_name(status: PaleyStatus) -> *const c_char {
    let name: &'static [u8] = match status {
        PaleyStatus::Ok => b"ok\0",
        PaleyStatus::InvalidParameter => b"invalid parameter\0",
        PaleyStatus::InvalidInput => b"invalid input\0",
        PaleyStatus::Precondition => b"precondition failed\0",
        PaleyStatus::Numerical => b"numerical error\0",
        PaleyStatus::NullPointer => b"null pointer\0",
        PaleyStatus::BufferTooSmall => b"buffer too small\0",
        PaleyStatus::Utf8 => b"invalid utf-8\0",
        PaleyStatus::Io => b"io error\0",
        PaleyStatus::Panic => b"internal panic\0",
    };
    name.as_ptr() as *const c_char
}

/// Opaque periodic grid handle.
pub struct PaleyGrid(PeriodicGrid);
/// Opaque complex field handle.
pub struct PaleyField(Field);
/// Opaque dyadic partition handle.
pub struct PaleyPartition(DyadicPartition);

fn guard(body: impl FnOnce() -> PaleyStatus) -> PaleyStatus {
    catch_unwind(AssertUnwindSafe(body)).unwrap_or(PaleyStatus::Panic)
}

unsafe fn write_out<T>(out: *mut T, value: T) -> PaleyStatus {
    if out.is_null() {
        return PaleyStatus::NullPointer;
    }
    out.write(value);
    PaleyStatus::Ok
}

/// Creates a periodic grid with `dim` axes of `size` points each.
///
/// # Safety
/// `out` must be a valid pointer; the handle must be released with
/// [`paley_grid_free`].
#[no_mangle]
pub unsafe extern "C" fn paley_grid_new(
    dim: usize,
    size: usize,
    out: *mut *mut PaleyGrid,
) -> PaleyStatus {
    guard(|| match PeriodicGrid::new(dim, size) {
        Ok(grid) => write_out(out, Box::into_raw(Box::new(PaleyGrid(grid)))),
        Err(e) => status_of(&e),
    })
}

/// Releases a grid handle; a null pointer is a no-op.
///
/// # Safety
/// `grid` must come from [`paley_grid_new`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn paley_grid_free(grid: *mut PaleyGrid) {
    if !grid.is_null() {
        drop(Box::from_raw(grid));
    }
}

/// Number of samples (and lattice frequencies) of the grid.
///
/// # Safety
/// `grid` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn paley_grid_num_points(grid: *const PaleyGrid) -> usize {
    if grid.is_null() {
        return 0;
    }
    (*grid).0.num_points()
}

/// Builds a field from `2 * num_points` interleaved `re, im` doubles.
///
/// # Safety
/// `samples` must point to `len` readable doubles; `out` must be valid. The
/// handle must be released with [`paley_field_free`].
#[no_mangle]
pub unsafe extern "C" fn paley_field_from_samples(
    grid: *const PaleyGrid,
    samples: *const f64,
    len: usize,
    out: *mut *mut PaleyField,
) -> PaleyStatus {
    guard(|| {
        if grid.is_null() || samples.is_null() {
            return PaleyStatus::NullPointer;
        }
        let g = (*grid).0;
        if len != 2 * g.num_points() {
            return PaleyStatus::BufferTooSmall;
        }
        let raw = std::slice::from_raw_parts(samples, len);
        let complex: Vec<Complex64> = raw
            .chunks_exact(2)
            .map(|c| Complex64::new(c[0], c[1]))
            .collect();
        match Field::new(g, complex) {
            Ok(field) => write_out(out, Box::into_raw(Box::new(PaleyField(field)))),
            Err(e) => status_of(&e),
        }
    })
}

/// Releases a field handle; a null pointer is a no-op.
///
/// # Safety
/// `field` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn paley_field_free(field: *mut PaleyField) {
    if !field.is_null() {
        drop(Box::from_raw(field));
    }
}

/// Copies the field's samples as interleaved `re, im` doubles.
///
/// # Safety
/// `buffer` must have room for `cap` doubles; `cap` must be at least
/// `2 * num_points`.
#[no_mangle]
pub unsafe extern "C" fn paley_field_copy_samples(
    field: *const PaleyField,
    buffer: *mut f64,
    cap: usize,
) -> PaleyStatus {
    guard(|| {
        if field.is_null() || buffer.is_null() {
            return PaleyStatus::NullPointer;
        }
        let samples = (*field).0.samples();
        if cap < 2 * samples.len() {
            return PaleyStatus::BufferTooSmall;
        }
        let dest = std::slice::from_raw_parts_mut(buffer, 2 * samples.len());
        for (pair, z) in dest.chunks_exact_mut(2).zip(samples) {
            pair[0] = z.re;
            pair[1] = z.im;
        }
        PaleyStatus::Ok
    })
}

/// `L^p` norm of a field under the probability measure; `p` may be
/// `INFINITY`.
///
/// # Safety
/// `field` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn paley_lp_norm(
    field: *const PaleyField,
    p: f64,
    out: *mut f64,
) -> PaleyStatus {
    guard(|| {
        if field.is_null() {
            return PaleyStatus::NullPointer;
        }
        match lp_norm(&(*field).0, p) {
            Ok(v) => write_out(out, v),
            Err(e) => status_of(&e),
        }
    })
}

/// Applies the fractional Laplacian multiplier `|xi|^(2 alpha)`.
///
/// # Safety
/// `field` must be a live handle; `out` receives a new handle.
#[no_mangle]
pub unsafe extern "C" fn paley_frac_laplacian(
    field: *const PaleyField,
    alpha: f64,
    out: *mut *mut PaleyField,
) -> PaleyStatus {
    guard(|| {
        if field.is_null() {
            return PaleyStatus::NullPointer;
        }
        match frac_laplacian(&(*field).0, alpha) {
            Ok(f) => write_out(out, Box::into_raw(Box::new(PaleyField(f)))),
            Err(e) => status_of(&e),
        }
    })
}

/// Builds the potential `-L^alpha(u)/u` of a non-vanishing field.
///
/// # Safety
/// `field` must be a live handle; `out` receives a new handle.
#[no_mangle]
pub unsafe extern "C" fn paley_manufacture_potential(
    field: *const PaleyField,
    alpha: f64,
    floor: f64,
    out: *mut *mut PaleyField,
) -> PaleyStatus {
    guard(|| {
        if field.is_null() {
            return PaleyStatus::NullPointer;
        }
        match manufacture_potential(&(*field).0, alpha, floor) {
            Ok(f) => write_out(out, Box::into_raw(Box::new(PaleyField(f)))),
            Err(e) => status_of(&e),
        }
    })
}

/// Smooth radial cutoff field: 1 on `B(rho)` around `center`, 0 outside
/// `B(2 rho)`.
///
/// # Safety
/// `center` must point to `center_len` doubles matching the grid dimension.
#[no_mangle]
pub unsafe extern "C" fn paley_cutoff_field(
    grid: *const PaleyGrid,
    rho: f64,
    center: *const f64,
    center_len: usize,
    out: *mut *mut PaleyField,
) -> PaleyStatus {
    guard(|| {
        if grid.is_null() || center.is_null() {
            return PaleyStatus::NullPointer;
        }
        let c = std::slice::from_raw_parts(center, center_len);
        match cutoff_field((*grid).0, rho, c) {
            Ok(f) => write_out(out, Box::into_raw(Box::new(PaleyField(f)))),
            Err(e) => status_of(&e),
        }
    })
}

/// Builds the dyadic partition of a grid.
///
/// # Safety
/// `grid` must be a live handle; release the result with
/// [`paley_partition_free`].
#[no_mangle]
pub unsafe extern "C" fn paley_partition_new(
    grid: *const PaleyGrid,
    out: *mut *mut PaleyPartition,
) -> PaleyStatus {
    guard(|| {
        if grid.is_null() {
            return PaleyStatus::NullPointer;
        }
        let partition = build_partition((*grid).0);
        write_out(out, Box::into_raw(Box::new(PaleyPartition(partition))))
    })
}

/// Releases a partition handle; a null pointer is a no-op.
///
/// # Safety
/// `partition` must come from [`paley_partition_new`].
#[no_mangle]
pub unsafe extern "C" fn paley_partition_free(partition: *mut PaleyPartition) {
    if !partition.is_null() {
        drop(Box::from_raw(partition));
    }
}

/// Highest band index of the partition.
///
/// # Safety
/// `partition` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn paley_partition_j_max(partition: *const PaleyPartition) -> usize {
    if partition.is_null() {
        return 0;
    }
    (*partition).0.j_max()
}

/// Band projection `P_j f` for `1 <= j <= j_max`.
///
/// # Safety
/// Handles must be live; `out` receives a new field handle.
#[no_mangle]
pub unsafe extern "C" fn paley_project(
    partition: *const PaleyPartition,
    field: *const PaleyField,
    j: usize,
    out: *mut *mut PaleyField,
) -> PaleyStatus {
    guard(|| {
        if partition.is_null() || field.is_null() {
            return PaleyStatus::NullPointer;
        }
        match project(&(*field).0, j, &(*partition).0) {
            Ok(f) => write_out(out, Box::into_raw(Box::new(PaleyField(f)))),
            Err(e) => status_of(&e),
        }
    })
}

/// Low-block projection.
///
/// # Safety
/// Handles must be live; `out` receives a new field handle.
#[no_mangle]
pub unsafe extern "C" fn paley_project_low(
    partition: *const PaleyPartition,
    field: *const PaleyField,
    out: *mut *mut PaleyField,
) -> PaleyStatus {
    guard(|| {
        if partition.is_null() || field.is_null() {
            return PaleyStatus::NullPointer;
        }
        match project_low(&(*field).0, &(*partition).0) {
            Ok(f) => write_out(out, Box::into_raw(Box::new(PaleyField(f)))),
            Err(e) => status_of(&e),
        }
    })
}

/// Dyadic Sobolev norm at regularity `s`.
///
/// # Safety
/// Handles must be live and `out` valid.
#[no_mangle]
pub unsafe extern "C" fn paley_sobolev_norm(
    partition: *const PaleyPartition,
    field: *const PaleyField,
    s: f64,
    out: *mut f64,
) -> PaleyStatus {
    guard(|| {
        if partition.is_null() || field.is_null() {
            return PaleyStatus::NullPointer;
        }
        match sobolev_norm(&(*field).0, s, &(*partition).0) {
            Ok(v) => write_out(out, v),
            Err(e) => status_of(&e),
        }
    })
}

/// Writes the weighted coefficient sequence `a_k = 2^(sk) ||P_k f||_2`
/// (low-block norm at index 0) into `buffer` and the entry count into
/// `written`.
///
/// # Safety
/// `buffer` must hold `cap` doubles with `cap >= j_max + 1`.
#[no_mangle]
pub unsafe extern "C" fn paley_dyadic_coefficients(
    partition: *const PaleyPartition,
    field: *const PaleyField,
    s: f64,
    buffer: *mut f64,
    cap: usize,
    written: *mut usize,
) -> PaleyStatus {
    guard(|| {
        if partition.is_null() || field.is_null() || buffer.is_null() || written.is_null() {
            return PaleyStatus::NullPointer;
        }
        match dyadic_coefficients(&(*field).0, s, &(*partition).0) {
            Ok(coeffs) => {
                let values = coeffs.values();
                if cap < values.len() {
                    return PaleyStatus::BufferTooSmall;
                }
                let dest = std::slice::from_raw_parts_mut(buffer, values.len());
                dest.copy_from_slice(values);
                written.write(values.len());
                PaleyStatus::Ok
            }
            Err(e) => status_of(&e),
        }
    })
}

/// Bernstein ratio `||f||_q / (2^(n j (1/p - 1/q)) ||f||_p)` for a field
/// with spectrum in `B(2^j)`.
///
/// # Safety
/// `field` must be a live handle and `out` valid.
#[no_mangle]
pub unsafe extern "C" fn paley_bernstein_ratio(
    field: *const PaleyField,
    p: f64,
    q: f64,
    j: i32,
    out: *mut f64,
) -> PaleyStatus {
    guard(|| {
        if field.is_null() {
            return PaleyStatus::NullPointer;
        }
        match bernstein_ratio(&(*field).0, p, q, j) {
            Ok(v) => write_out(out, v),
            Err(e) => status_of(&e),
        }
    })
}

/// Decay exponent `theta(n, alpha, s)` of the bootstrap machinery.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn paley_theta(n: usize, alpha: f64, s: f64, out: *mut f64) -> PaleyStatus {
    guard(|| match theta(n, alpha, s) {
        Ok(v) => write_out(out, v),
        Err(e) => status_of(&e),
    })
}

/// Calibrates the supercritical-family amplitude by the radial oracle;
/// writes the amplitude and the residual at it.
///
/// # Safety
/// Output pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn paley_calibrate_amplitude(
    n: usize,
    p: f64,
    out_amplitude: *mut f64,
    out_residual: *mut f64,
) -> PaleyStatus {
    guard(|| match calibrate_amplitude(n, p) {
        Ok(cal) => {
            if out_amplitude.is_null() || out_residual.is_null() {
                return PaleyStatus::NullPointer;
            }
            out_amplitude.write(cal.oracle);
            out_residual.write(cal.residual);
            PaleyStatus::Ok
        }
        Err(e) => status_of(&e),
    })
}

/// Checks the iteration-lemma hypotheses on a sequence.
///
/// # Safety
/// `sequence` must point to `len` doubles; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn paley_iteration_check(
    epsilon: f64,
    delta: f64,
    s_start: usize,
    sequence: *const f64,
    len: usize,
    out: *mut bool,
) -> PaleyStatus {
    guard(|| {
        if sequence.is_null() {
            return PaleyStatus::NullPointer;
        }
        let a = std::slice::from_raw_parts(sequence, len);
        let params = match IterationParams::new(epsilon, delta, s_start, len) {
            Ok(p) => p,
            Err(e) => return status_of(&e),
        };
        match check_hypotheses(a, &params) {
            Ok(v) => write_out(out, v),
            Err(e) => status_of(&e),
        }
    })
}

/// Computes the explicit decay constant `M` (and verifies the conclusion)
/// for a hypothesis-satisfying sequence.
///
/// # Safety
/// `sequence` must point to `len` doubles; outputs must be valid.
#[no_mangle]
pub unsafe extern "C" fn paley_iteration_bound(
    epsilon: f64,
    delta: f64,
    s_start: usize,
    sequence: *const f64,
    len: usize,
    out_decay_constant: *mut f64,
    out_conclusion_holds: *mut bool,
) -> PaleyStatus {
    guard(|| {
        if sequence.is_null() || out_decay_constant.is_null() || out_conclusion_holds.is_null() {
            return PaleyStatus::NullPointer;
        }
        let a = std::slice::from_raw_parts(sequence, len);
        let params = match IterationParams::new(epsilon, delta, s_start, len) {
            Ok(p) => p,
            Err(e) => return status_of(&e),
        };
        match bound_constant(a, &params) {
            Ok(cert) => {
                out_decay_constant.write(cert.decay);
                out_conclusion_holds.write(verify_conclusion(a, &cert, &params));
                PaleyStatus::Ok
            }
            Err(e) => status_of(&e),
        }
    })
}

/// Runs the fixed-point oracle and fills `buffer` with the resulting
/// hypothesis-satisfying sequence of length `k_max`.
///
/// # Safety
/// `buffer` must hold `cap >= k_max` doubles.
#[no_mangle]
pub unsafe extern "C" fn paley_fixed_point_oracle(
    epsilon: f64,
    delta: f64,
    k_max: usize,
    iters: usize,
    buffer: *mut f64,
    cap: usize,
) -> PaleyStatus {
    guard(|| {
        if buffer.is_null() {
            return PaleyStatus::NullPointer;
        }
        if cap < k_max {
            return PaleyStatus::BufferTooSmall;
        }
        let params = match IterationParams::new(epsilon, delta, 0, k_max) {
            Ok(p) => p,
            Err(e) => return status_of(&e),
        };
        match fixed_point_oracle(&params, iters) {
            Ok(seq) => {
                std::slice::from_raw_parts_mut(buffer, k_max).copy_from_slice(&seq);
                PaleyStatus::Ok
            }
            Err(e) => status_of(&e),
        }
    })
}

/// Runs the full bootstrap pipeline from a flat `key = value` configuration
/// string and returns the JSON report; free it with [`paley_string_free`].
///
/// # Safety
/// `config` must be a null-terminated string (may be empty for defaults);
/// `out_json` must be valid.
#[no_mangle]
pub unsafe extern "C" fn paley_run_bootstrap_json(
    config: *const c_char,
    out_json: *mut *mut c_char,
) -> PaleyStatus {
    guard(|| {
        if config.is_null() || out_json.is_null() {
            return PaleyStatus::NullPointer;
        }
        let text = match CStr::from_ptr(config).to_str() {
            Ok(t) => t,
            Err(_) => return PaleyStatus::Utf8,
        };
        let mut cfg = BootstrapConfig::default();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return PaleyStatus::InvalidInput;
            };
            let value = value.trim();
            let parsed = match key.trim() {
                "n" => value.parse().map(|v| cfg.n = v).is_ok(),
                "size" => value.parse().map(|v| cfg.size = v).is_ok(),
                "alpha" => value.parse().map(|v| cfg.alpha = v).is_ok(),
                "s" => value.parse().map(|v| cfg.s = v).is_ok(),
                "rho" => value.parse().map(|v| cfg.rho = v).is_ok(),
                "seed" => value.parse().map(|v| cfg.seed = v).is_ok(),
                "v_scale" => value.parse().map(|v| cfg.v_scale = v).is_ok(),
                "perturbation" => value.parse().map(|v| cfg.perturbation = v).is_ok(),
                "sigma" => value.parse().map(|v| cfg.sigma = v).is_ok(),
                _ => {
                    let _ = idx;
                    false
                }
            };
            if !parsed {
                return PaleyStatus::InvalidInput;
            }
        }
        match run_bootstrap(&cfg).and_then(|r| r.to_json()) {
            Ok(json) => match CString::new(json) {
                Ok(cstr) => write_out(out_json, cstr.into_raw()),
                Err(_) => PaleyStatus::Utf8,
            },
            Err(e) => status_of(&e),
        }
    })
}

/// Frees a string returned by this library; a null pointer is a no-op.
///
/// # Safety
/// `s` must come from [`paley_run_bootstrap_json`] and not be used again.
#[no_mangle]
pub unsafe extern "C" fn paley_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::ptr;

    fn make_grid(dim: usize, size: usize) -> *mut PaleyGrid {
        let mut grid = ptr::null_mut();
        let status = unsafe { paley_grid_new(dim, size, &mut grid) };
        assert_eq!(status, PaleyStatus::Ok);
        grid
    }

    fn constant_field(grid: *const PaleyGrid, value: f64) -> *mut PaleyField {
        let points = unsafe { paley_grid_num_points(grid) };
        let samples: Vec<f64> = (0..points).flat_map(|_| [value, 0.0]).collect();
        let mut field = ptr::null_mut();
        let status =
            unsafe { paley_field_from_samples(grid, samples.as_ptr(), samples.len(), &mut field) };
        assert_eq!(status, PaleyStatus::Ok);
        field
    }

    #[test]
    fn grid_lifecycle_and_validation() {
        let grid = make_grid(2, 16);
        assert_eq!(unsafe { paley_grid_num_points(grid) }, 256);
        unsafe { paley_grid_free(grid) };

        let mut bad = ptr::null_mut();
        assert_eq!(
            unsafe { paley_grid_new(5, 16, &mut bad) },
            PaleyStatus::InvalidParameter
        );
        assert_eq!(
            unsafe { paley_grid_new(2, 12, &mut bad) },
            PaleyStatus::InvalidParameter
        );
    }

    #[test]
    fn null_pointers_are_reported() {
        assert_eq!(
            unsafe { paley_grid_new(2, 16, ptr::null_mut()) },
            PaleyStatus::NullPointer
        );
        let mut out = 0.0;
        assert_eq!(
            unsafe { paley_lp_norm(ptr::null(), 2.0, &mut out) },
            PaleyStatus::NullPointer
        );
        unsafe { paley_field_free(ptr::null_mut()) };
        unsafe { paley_grid_free(ptr::null_mut()) };
        unsafe { paley_string_free(ptr::null_mut()) };
    }

    #[test]
    fn field_round_trip_and_norms() {
        let grid = make_grid(2, 16);
        let field = constant_field(grid, 2.0);
        let mut norm = 0.0;
        assert_eq!(
            unsafe { paley_lp_norm(field, 2.0, &mut norm) },
            PaleyStatus::Ok
        );
        assert!((norm - 2.0).abs() < 1e-12);
        assert_eq!(
            unsafe { paley_lp_norm(field, 0.5, &mut norm) },
            PaleyStatus::InvalidParameter
        );

        let points = unsafe { paley_grid_num_points(grid) };
        let mut buffer = vec![0.0f64; 2 * points];
        assert_eq!(
            unsafe { paley_field_copy_samples(field, buffer.as_mut_ptr(), buffer.len()) },
            PaleyStatus::Ok
        );
        assert_eq!(buffer[0], 2.0);
        assert_eq!(
            unsafe { paley_field_copy_samples(field, buffer.as_mut_ptr(), 3) },
            PaleyStatus::BufferTooSmall
        );
        unsafe { paley_field_free(field) };
        unsafe { paley_grid_free(grid) };
    }

    #[test]
    fn laplacian_kills_constants_through_the_abi() {
        let grid = make_grid(2, 16);
        let field = constant_field(grid, 1.0);
        let mut lap = ptr::null_mut();
        assert_eq!(
            unsafe { paley_frac_laplacian(field, 0.75, &mut lap) },
            PaleyStatus::Ok
        );
        let mut norm = 1.0;
        unsafe { paley_lp_norm(lap, 2.0, &mut norm) };
        assert!(norm < 1e-12);
        assert_eq!(
            unsafe { paley_frac_laplacian(field, -1.0, &mut lap) },
            PaleyStatus::InvalidParameter
        );
        unsafe { paley_field_free(lap) };
        unsafe { paley_field_free(field) };
        unsafe { paley_grid_free(grid) };
    }

    #[test]
    fn partition_projection_and_sobolev() {
        let grid = make_grid(2, 32);
        let mut partition = ptr::null_mut();
        assert_eq!(
            unsafe { paley_partition_new(grid, &mut partition) },
            PaleyStatus::Ok
        );
        let j_max = unsafe { paley_partition_j_max(partition) };
        assert_eq!(j_max, 5);

        let field = constant_field(grid, 3.0);
        let mut low = ptr::null_mut();
        assert_eq!(
            unsafe { paley_project_low(partition, field, &mut low) },
            PaleyStatus::Ok
        );
        let mut norm = 0.0;
        unsafe { paley_lp_norm(low, 2.0, &mut norm) };
        assert!((norm - 3.0).abs() < 1e-12);

        let mut band = ptr::null_mut();
        assert_eq!(
            unsafe { paley_project(partition, field, j_max + 1, &mut band) },
            PaleyStatus::InvalidParameter
        );
        assert_eq!(
            unsafe { paley_project(partition, field, 1, &mut band) },
            PaleyStatus::Ok
        );

        let mut sob = 0.0;
        assert_eq!(
            unsafe { paley_sobolev_norm(partition, field, 1.5, &mut sob) },
            PaleyStatus::Ok
        );
        assert!((sob - 3.0).abs() < 1e-12);

        let mut coeffs = vec![0.0f64; j_max + 1];
        let mut written = 0usize;
        assert_eq!(
            unsafe {
                paley_dyadic_coefficients(
                    partition,
                    field,
                    0.5,
                    coeffs.as_mut_ptr(),
                    coeffs.len(),
                    &mut written,
                )
            },
            PaleyStatus::Ok
        );
        assert_eq!(written, j_max + 1);
        assert!((coeffs[0] - 3.0).abs() < 1e-12);
        assert!(coeffs[1..].iter().all(|v| *v < 1e-12));

        unsafe {
            paley_field_free(band);
            paley_field_free(low);
            paley_field_free(field);
            paley_partition_free(partition);
            paley_grid_free(grid);
        }
    }

    #[test]
    fn cutoff_and_manufacture_through_the_abi() {
        let grid = make_grid(2, 32);
        let center = [std::f64::consts::PI, std::f64::consts::PI];
        let mut eta = ptr::null_mut();
        assert_eq!(
            unsafe { paley_cutoff_field(grid, 0.8, center.as_ptr(), 2, &mut eta) },
            PaleyStatus::Ok
        );
        let mut sup = 0.0;
        unsafe { paley_lp_norm(eta, f64::INFINITY, &mut sup) };
        assert!((sup - 1.0).abs() < 1e-12);

        let u = constant_field(grid, 1.0);
        let mut v = ptr::null_mut();
        assert_eq!(
            unsafe { paley_manufacture_potential(u, 0.75, 0.5, &mut v) },
            PaleyStatus::Ok
        );
        let mut vnorm = 1.0;
        unsafe { paley_lp_norm(v, 2.0, &mut vnorm) };
        assert!(vnorm < 1e-12);

        // A field that dips to zero is rejected as degenerate (numerical).
        let mut status_field = ptr::null_mut();
        let points = unsafe { paley_grid_num_points(grid) };
        let mut samples = vec![0.0f64; 2 * points];
        samples[0] = 1.0;
        unsafe {
            paley_field_from_samples(grid, samples.as_ptr(), samples.len(), &mut status_field)
        };
        let mut out = ptr::null_mut();
        assert_eq!(
            unsafe { paley_manufacture_potential(status_field, 0.75, 0.5, &mut out) },
            PaleyStatus::Numerical
        );

        unsafe {
            paley_field_free(status_field);
            paley_field_free(v);
            paley_field_free(u);
            paley_field_free(eta);
            paley_grid_free(grid);
        }
    }

    #[test]
    fn bernstein_and_theta_through_the_abi() {
        let grid = make_grid(2, 32);
        let field = constant_field(grid, 1.0); // spectrum = {0} within any ball
        let mut ratio = 0.0;
        assert_eq!(
            unsafe { paley_bernstein_ratio(field, 2.0, f64::INFINITY, 2, &mut ratio) },
            PaleyStatus::Ok
        );
        assert!((ratio - 0.25).abs() < 1e-12); // 2^(-2*2*(1/2))

        let mut th = 0.0;
        assert_eq!(
            unsafe { paley_theta(2, 0.75, 0.75, &mut th) },
            PaleyStatus::Ok
        );
        assert!((th - 0.25).abs() < 1e-15);
        assert_eq!(
            unsafe { paley_theta(2, 0.75, 1.0, &mut th) },
            PaleyStatus::InvalidParameter
        );
        unsafe {
            paley_field_free(field);
            paley_grid_free(grid);
        }
    }

    #[test]
    fn iteration_lemma_through_the_abi() {
        let mut sequence = vec![0.0f64; 32];
        assert_eq!(
            unsafe { paley_fixed_point_oracle(1.0, 0.2, 32, 100_000, sequence.as_mut_ptr(), 32) },
            PaleyStatus::Ok
        );
        let mut holds = false;
        assert_eq!(
            unsafe { paley_iteration_check(1.0, 0.2, 0, sequence.as_ptr(), 32, &mut holds) },
            PaleyStatus::Ok
        );
        assert!(holds);
        let mut decay = 0.0;
        let mut conclusion = false;
        assert_eq!(
            unsafe {
                paley_iteration_bound(
                    1.0,
                    0.2,
                    0,
                    sequence.as_ptr(),
                    32,
                    &mut decay,
                    &mut conclusion,
                )
            },
            PaleyStatus::Ok
        );
        assert!(conclusion);
        assert!((decay - (1.0 + 0.2 / 3.0) / 0.2).abs() < 1e-10);

        assert_eq!(
            unsafe { paley_fixed_point_oracle(1.0, 0.3, 32, 10, sequence.as_mut_ptr(), 32) },
            PaleyStatus::InvalidParameter
        );
    }

    #[test]
    fn bootstrap_json_through_the_abi() {
        let config = CString::new("size = 32\nseed = 5\n").unwrap();
        let mut json = ptr::null_mut();
        assert_eq!(
            unsafe { paley_run_bootstrap_json(config.as_ptr(), &mut json) },
            PaleyStatus::Ok
        );
        let text = unsafe { CStr::from_ptr(json) }.to_str().unwrap();
        assert!(text.contains("\"experiment\": \"bootstrap\""));
        assert!(text.contains("theta_decay_admissible"));
        unsafe { paley_string_free(json) };

        let bad = CString::new("nonsense = 1\n").unwrap();
        assert_eq!(
            unsafe { paley_run_bootstrap_json(bad.as_ptr(), &mut json) },
            PaleyStatus::InvalidInput
        );
    }

    #[test]
    fn status_names_are_null_terminated_statics() {
        for status in [
            PaleyStatus::Ok,
            PaleyStatus::InvalidParameter,
            PaleyStatus::Numerical,
            PaleyStatus::Panic,
        ] {
            let name = paley_status_name(status);
            assert!(!name.is_null());
            assert!(!unsafe { CStr::from_ptr(name) }.to_str().unwrap().is_empty());
        }
    }
}
