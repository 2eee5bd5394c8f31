//! C ABI over the stabcast library.
//!
//! Every function returns a [`StabcastStatus`]; results are written through
//! out-pointers. On failure a message is available from
//! [`stabcast_last_error`] until the next call on the same thread. Matrices
//! are opaque handles released with [`stabcast_matrix_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use stabcast::evaluation::{bonferroni, wilcoxon_signed_rank};
use stabcast::metrics::{self, Accuracy, MetricValue};
use stabcast::pareto::{pareto_front, select_by_curvature, Smoothing, TradeoffPoint};
use stabcast::stabilize::{self, JointOrder};
use stabcast::{Error, ForecastMatrix, Method};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StabcastStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Domain = 3,
    /// The result is mathematically undefined (zero scale, all pairs tied).
    Undefined = 4,
    /// A panic was caught inside the library.
    Internal = 5,
}

/// Values accepted by the `method` arguments.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StabcastMethod {
    Partial = 0,
    Full = 1,
}

/// Values accepted by the `order` argument of [`stabcast_stabilize_joint`].
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StabcastJointOrder {
    VerticalThenHorizontal = 0,
    HorizontalThenVertical = 1,
}

/// Values accepted by the `kind` argument of [`stabcast_accuracy`].
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StabcastAccuracy {
    Mase = 0,
    Rmsse = 1,
    Smape = 2,
}

/// Opaque rolling-origin forecast matrix.
pub struct StabcastMatrix {
    inner: ForecastMatrix,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(message: impl Into<String>) {
    let text = message.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(text).ok());
}

fn clear_error() {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
}

struct Failure(StabcastStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = match e {
            Error::Domain(_) | Error::Range(_) => StabcastStatus::Domain,
            _ => StabcastStatus::InvalidArgument,
        };
        Failure(status, e.to_string())
    }
}

fn fail<T>(status: StabcastStatus, message: &str) -> Result<T, Failure> {
    Err(Failure(status, message.to_string()))
}

/// Runs `f`, recording its error message and converting panics.
fn guard(f: impl FnOnce() -> Result<(), Failure>) -> StabcastStatus {
    clear_error();
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => StabcastStatus::Ok,
        Ok(Err(Failure(status, message))) => {
            set_error(message);
            status
        }
        Err(_) => {
            set_error("internal panic");
            StabcastStatus::Internal
        }
    }
}

fn method(raw: u32) -> Result<Method, Failure> {
    match raw {
        0 => Ok(Method::Partial),
        1 => Ok(Method::Full),
        _ => fail(
            StabcastStatus::InvalidArgument,
            "method must be 0 (partial) or 1 (full)",
        ),
    }
}

/// # Safety
/// `data` must be null or point to `len` readable doubles.
unsafe fn slice<'a>(data: *const f64, len: usize, what: &str) -> Result<&'a [f64], Failure> {
    if len == 0 {
        return Ok(&[]);
    }
    if data.is_null() {
        return fail(StabcastStatus::NullPointer, &format!("{what} is null"));
    }
    Ok(std::slice::from_raw_parts(data, len))
}

fn out_ptr<T>(p: *mut T, what: &str) -> Result<(), Failure> {
    if p.is_null() {
        fail(StabcastStatus::NullPointer, &format!("{what} is null"))
    } else {
        Ok(())
    }
}

fn boxed(inner: ForecastMatrix) -> *mut StabcastMatrix {
    Box::into_raw(Box::new(StabcastMatrix { inner }))
}

/// Message of the last failed call on this thread, or null. The pointer is
/// valid until the next library call on the same thread.
#[no_mangle]
pub extern "C" fn stabcast_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Creates a matrix from `origins * horizon` row-major values. Row `k`
/// (0-based) holds the forecasts made at time `first_origin + k`.
///
/// # Safety
/// `values` must point to `origins * horizon` doubles; `out` must be
/// writable.
#[no_mangle]
pub unsafe extern "C" fn stabcast_matrix_new(
    values: *const f64,
    origins: usize,
    horizon: usize,
    first_origin: usize,
    out: *mut *mut StabcastMatrix,
) -> StabcastStatus {
    guard(|| {
        out_ptr(out, "out")?;
        let Some(len) = origins.checked_mul(horizon) else {
            return fail(StabcastStatus::InvalidArgument, "matrix size overflows");
        };
        if len == 0 {
            return fail(
                StabcastStatus::InvalidArgument,
                "matrix must have at least one origin and one horizon",
            );
        }
        let data = slice(values, len, "values")?;
        let rows = data.chunks(horizon).map(<[f64]>::to_vec).collect();
        let m = ForecastMatrix::new("ffi", first_origin, rows)?;
        *out = boxed(m);
        Ok(())
    })
}

/// Releases a matrix; null is ignored.
///
/// # Safety
/// `matrix` must be null or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn stabcast_matrix_free(matrix: *mut StabcastMatrix) {
    if !matrix.is_null() {
        drop(Box::from_raw(matrix));
    }
}

/// # Safety
/// `matrix` must be a live handle; `origins` and `horizon` writable.
#[no_mangle]
pub unsafe extern "C" fn stabcast_matrix_shape(
    matrix: *const StabcastMatrix,
    origins: *mut usize,
    horizon: *mut usize,
) -> StabcastStatus {
    guard(|| {
        let Some(m) = matrix.as_ref() else {
            return fail(StabcastStatus::NullPointer, "matrix is null");
        };
        out_ptr(origins, "origins")?;
        out_ptr(horizon, "horizon")?;
        *origins = m.inner.origins();
        *horizon = m.inner.horizon();
        Ok(())
    })
}

/// Copies the row-major values into `out`, which holds `len` doubles.
///
/// # Safety
/// `matrix` must be a live handle; `out` must point to `len` writable
/// doubles.
#[no_mangle]
pub unsafe extern "C" fn stabcast_matrix_values(
    matrix: *const StabcastMatrix,
    out: *mut f64,
    len: usize,
) -> StabcastStatus {
    guard(|| {
        let Some(m) = matrix.as_ref() else {
            return fail(StabcastStatus::NullPointer, "matrix is null");
        };
        out_ptr(out, "out")?;
        let need = m.inner.origins() * m.inner.horizon();
        if len < need {
            return fail(
                StabcastStatus::InvalidArgument,
                &format!("buffer holds {len} values, need {need}"),
            );
        }
        let dst = std::slice::from_raw_parts_mut(out, need);
        for (chunk, row) in dst.chunks_mut(m.inner.horizon()).zip(m.inner.rows()) {
            chunk.copy_from_slice(row);
        }
        Ok(())
    })
}

/// Vertical stabilization across origins.
///
/// # Safety
/// `matrix` must be a live handle; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn stabcast_stabilize_vertical(
    matrix: *const StabcastMatrix,
    w: f64,
    method_kind: u32,
    out: *mut *mut StabcastMatrix,
) -> StabcastStatus {
    guard(|| {
        let Some(m) = matrix.as_ref() else {
            return fail(StabcastStatus::NullPointer, "matrix is null");
        };
        out_ptr(out, "out")?;
        let s = stabilize::stabilize_vertical(&m.inner, w, method(method_kind)?)?;
        *out = boxed(s);
        Ok(())
    })
}

/// Horizontal stabilization of one forecast vector into `out` (`len`
/// doubles, may alias `row`).
///
/// # Safety
/// `row` and `out` must each point to `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn stabcast_stabilize_horizontal(
    row: *const f64,
    len: usize,
    w: f64,
    method_kind: u32,
    out: *mut f64,
) -> StabcastStatus {
    guard(|| {
        out_ptr(out, "out")?;
        let input = slice(row, len, "row")?.to_vec();
        let s = stabilize::stabilize_horizontal(&input, w, method(method_kind)?)?;
        std::slice::from_raw_parts_mut(out, len).copy_from_slice(&s);
        Ok(())
    })
}

/// Sequential vertical and horizontal stabilization.
///
/// # Safety
/// `matrix` must be a live handle; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn stabcast_stabilize_joint(
    matrix: *const StabcastMatrix,
    w_vertical: f64,
    w_horizontal: f64,
    order: u32,
    method_kind: u32,
    out: *mut *mut StabcastMatrix,
) -> StabcastStatus {
    guard(|| {
        let Some(m) = matrix.as_ref() else {
            return fail(StabcastStatus::NullPointer, "matrix is null");
        };
        out_ptr(out, "out")?;
        let order = match order {
            0 => JointOrder::VerticalThenHorizontal,
            1 => JointOrder::HorizontalThenVertical,
            _ => return fail(StabcastStatus::InvalidArgument, "order must be 0 or 1"),
        };
        let s = stabilize::stabilize_joint(&m.inner, w_vertical, w_horizontal, order, method(method_kind)?)?;
        *out = boxed(s);
        Ok(())
    })
}

/// Scaled accuracy of `h` forecasts against actuals, scaled by the
/// seasonal naive error of `training` with period `m`. Returns
/// `Undefined` when the scale is zero.
///
/// # Safety
/// `actuals` and `forecasts` must point to `h` doubles, `training` to
/// `training_len` doubles; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn stabcast_accuracy(
    kind: u32,
    actuals: *const f64,
    forecasts: *const f64,
    h: usize,
    training: *const f64,
    training_len: usize,
    m: usize,
    out: *mut f64,
) -> StabcastStatus {
    guard(|| {
        out_ptr(out, "out")?;
        let kind = match kind {
            0 => Accuracy::Mase,
            1 => Accuracy::Rmsse,
            2 => Accuracy::Smape,
            _ => return fail(StabcastStatus::InvalidArgument, "kind must be 0, 1 or 2"),
        };
        let a = slice(actuals, h, "actuals")?;
        let f = slice(forecasts, h, "forecasts")?;
        let t = slice(training, training_len, "training")?;
        match metrics::accuracy(kind, a, f, t, m)? {
            MetricValue::Defined(v) => {
                *out = v;
                Ok(())
            }
            MetricValue::Undefined(why) => fail(StabcastStatus::Undefined, &why.to_string()),
        }
    })
}

/// `alpha / comparisons`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn stabcast_bonferroni(alpha: f64, comparisons: usize, out: *mut f64) -> StabcastStatus {
    guard(|| {
        out_ptr(out, "out")?;
        *out = bonferroni(alpha, comparisons)?;
        Ok(())
    })
}

/// Two-sided Wilcoxon signed-rank p-value of paired samples. Returns
/// `Undefined` when every pair is tied.
///
/// # Safety
/// `a` and `b` must point to `n` doubles; `p_value` writable.
#[no_mangle]
pub unsafe extern "C" fn stabcast_wilcoxon(
    a: *const f64,
    b: *const f64,
    n: usize,
    p_value: *mut f64,
) -> StabcastStatus {
    guard(|| {
        out_ptr(p_value, "p_value")?;
        let a = slice(a, n, "a")?;
        let b = slice(b, n, "b")?;
        match wilcoxon_signed_rank(a, b)? {
            Some(r) => {
                *p_value = r.p_value;
                Ok(())
            }
            None => fail(StabcastStatus::Undefined, "all pairs are tied"),
        }
    })
}

/// Knee of the accuracy/stability front of `n` points. Writes the index of
/// the selected input point; `degenerate` (nullable) is set to 1 when the
/// front has no knee and the most accurate point was chosen.
///
/// # Safety
/// `accuracy` and `stability` must point to `n` doubles; `index` writable;
/// `degenerate` null or writable.
#[no_mangle]
pub unsafe extern "C" fn stabcast_pareto_select(
    accuracy: *const f64,
    stability: *const f64,
    n: usize,
    index: *mut usize,
    degenerate: *mut i32,
) -> StabcastStatus {
    guard(|| {
        out_ptr(index, "index")?;
        if n == 0 {
            return fail(StabcastStatus::InvalidArgument, "no points");
        }
        let acc = slice(accuracy, n, "accuracy")?;
        let stab = slice(stability, n, "stability")?;
        let points = acc
            .iter()
            .zip(stab)
            .enumerate()
            .map(|(i, (&a, &s))| TradeoffPoint::new(i.to_string(), a, s))
            .collect::<Result<Vec<_>, _>>()?;
        let selection = select_by_curvature(&pareto_front(&points), Smoothing::Hull)?;
        *index = selection.point.label.parse().unwrap_or(0);
        if !degenerate.is_null() {
            *degenerate = i32::from(selection.degenerate);
        }
        Ok(())
    })
}
