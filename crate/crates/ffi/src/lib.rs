//! C ABI for `smk-lab`.
//!
//! Operators live behind opaque handles created by `*_new` and released by
//! `*_free`. Every fallible call returns an [`SmkStatus`] and writes results
//! through out-pointers; on failure [`smk_last_error_message`] describes the
//! cause for the calling thread.

use std::cell::RefCell;
use std::ffi::{c_char, c_void, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use smk_lab::catalog;
use smk_lab::moments::{central_moments, delta, raw_moments};
use smk_lab::operator::{
    apply, apply_bivariate, apply_kantorovich, mean_parameter, weight, BivariateParams,
    OperatorParams, QuadratureRule, TruncationPolicy,
};
use smk_lab::{BivariateFunction, Error, ScalarFunction};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SmkStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidParameter = 2,
    UnknownFunction = 3,
    TruncationFailure = 4,
    NonFinite = 5,
    Panic = 6,
}

/// Univariate operator `S*_{n,a}` with its truncation and quadrature settings.
pub struct SmkOperator {
    params: OperatorParams,
    trunc: TruncationPolicy,
    quad: QuadratureRule,
}

/// Bivariate operator `Y*_{m,m,a}`.
pub struct SmkBivariateOperator {
    params: BivariateParams,
    trunc: TruncationPolicy,
    quad: QuadratureRule,
}

/// `f(u, user_data)`.
pub type SmkScalarCallback = Option<unsafe extern "C" fn(f64, *mut c_void) -> f64>;
/// `f(u, v, user_data)`.
pub type SmkBivariateCallback = Option<unsafe extern "C" fn(f64, f64, *mut c_void) -> f64>;

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(message: String) {
    let text = CString::new(message.replace('\0', " ")).expect("interior NULs removed");
    LAST_ERROR.with(|slot| *slot.borrow_mut() = Some(text));
}

fn status_of(error: &Error) -> SmkStatus {
    match error {
        Error::TruncationFailure { .. } => SmkStatus::TruncationFailure,
        Error::NonFiniteFunction { .. }
        | Error::NonFiniteBivariate { .. }
        | Error::NonFiniteWeight { .. } => SmkStatus::NonFinite,
        Error::Config(_) => SmkStatus::UnknownFunction,
        _ => SmkStatus::InvalidParameter,
    }
}

/// Runs `body`, recording errors and panics for [`smk_last_error_message`].
fn guard(body: impl FnOnce() -> Result<(), (SmkStatus, String)>) -> SmkStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => SmkStatus::Ok,
        Ok(Err((status, message))) => {
            set_last_error(message);
            status
        }
        Err(_) => {
            set_last_error("panic inside smk-lab".into());
            SmkStatus::Panic
        }
    }
}

fn lib<T>(result: Result<T, Error>) -> Result<T, (SmkStatus, String)> {
    result.map_err(|e| (status_of(&e), e.to_string()))
}

fn null(name: &str) -> (SmkStatus, String) {
    (SmkStatus::NullPointer, format!("`{name}` is NULL"))
}

fn settings(tail_eps: f64, quad_points: usize) -> Result<(TruncationPolicy, QuadratureRule), Error> {
    let tail = if tail_eps > 0.0 {
        tail_eps
    } else {
        TruncationPolicy::DEFAULT_TAIL_EPSILON
    };
    let points = if quad_points == 0 {
        QuadratureRule::DEFAULT_POINTS
    } else {
        quad_points
    };
    Ok((TruncationPolicy::new(tail, None)?, QuadratureRule::new(points)?))
}

unsafe fn name_arg(name: *const c_char) -> Result<String, (SmkStatus, String)> {
    if name.is_null() {
        return Err(null("name"));
    }
    CStr::from_ptr(name)
        .to_str()
        .map(str::to_owned)
        .map_err(|_| (SmkStatus::UnknownFunction, "function name is not UTF-8".into()))
}

struct UserData(*mut c_void);
// The callback runs on the calling thread only; the wrapper exists to satisfy
// the thread-safety bounds of the library's function types.
unsafe impl Send for UserData {}
unsafe impl Sync for UserData {}

impl UserData {
    fn get(&self) -> *mut c_void {
        self.0
    }
}

/// Message for the last failed call on this thread, or NULL.
///
/// The pointer stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn smk_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Creates `S*_{n,a}`. A nonpositive `tail_eps` or zero `quad_points` selects
/// the defaults (`1e-12`, 5 points).
///
/// # Safety
/// `out` must be a valid pointer to writable storage for one handle pointer.
#[no_mangle]
pub unsafe extern "C" fn smk_operator_new(
    n: u64,
    a: f64,
    tail_eps: f64,
    quad_points: usize,
    out: *mut *mut SmkOperator,
) -> SmkStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let params = lib(OperatorParams::new(n, a))?;
        let (trunc, quad) = lib(settings(tail_eps, quad_points))?;
        *out = Box::into_raw(Box::new(SmkOperator {
            params,
            trunc,
            quad,
        }));
        Ok(())
    })
}

/// # Safety
/// `op` must be NULL or a handle from [`smk_operator_new`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn smk_operator_free(op: *mut SmkOperator) {
    if !op.is_null() {
        drop(Box::from_raw(op));
    }
}

unsafe fn operator<'a>(op: *const SmkOperator) -> Result<&'a SmkOperator, (SmkStatus, String)> {
    op.as_ref().ok_or_else(|| null("op"))
}

unsafe fn write<T>(out: *mut T, value: T) -> Result<(), (SmkStatus, String)> {
    if out.is_null() {
        return Err(null("out"));
    }
    *out = value;
    Ok(())
}

/// `S*_{n,a}(f; x)` for a caller-supplied function.
///
/// # Safety
/// `op` must be a live handle, `out` writable, and `f` safe to call with
/// `user_data` for the duration of the call.
#[no_mangle]
pub unsafe extern "C" fn smk_operator_apply(
    op: *const SmkOperator,
    f: SmkScalarCallback,
    user_data: *mut c_void,
    x: f64,
    out: *mut f64,
) -> SmkStatus {
    guard(|| {
        let op = operator(op)?;
        let f = f.ok_or_else(|| null("f"))?;
        let data = UserData(user_data);
        let func = ScalarFunction::new("callback", move |u| unsafe { f(u, data.get()) });
        let value = lib(apply(&op.params, &func, x, &op.trunc, &op.quad))?;
        write(out, value)
    })
}

/// `S*_{n,a}(f; x)` for a catalog function such as `"exp-neg2x"`.
///
/// # Safety
/// `op` must be a live handle, `name` a NUL-terminated string, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn smk_operator_apply_named(
    op: *const SmkOperator,
    name: *const c_char,
    x: f64,
    out: *mut f64,
) -> SmkStatus {
    guard(|| {
        let op = operator(op)?;
        let func = lib(catalog::univariate(&name_arg(name)?))?;
        let value = lib(apply(&op.params, &func, x, &op.trunc, &op.quad))?;
        write(out, value)
    })
}

/// Kantorovich operator `K_n(f; x)` with the handle's degree and settings.
///
/// # Safety
/// As [`smk_operator_apply_named`].
#[no_mangle]
pub unsafe extern "C" fn smk_operator_kantorovich_named(
    op: *const SmkOperator,
    name: *const c_char,
    x: f64,
    out: *mut f64,
) -> SmkStatus {
    guard(|| {
        let op = operator(op)?;
        let func = lib(catalog::univariate(&name_arg(name)?))?;
        let value = lib(apply_kantorovich(op.params.n(), &func, x, &op.trunc, &op.quad))?;
        write(out, value)
    })
}

/// Writes `S*(e_i; x)` for `i = 0..=3` into `out[0..4]`.
///
/// # Safety
/// `op` must be a live handle and `out` point to 4 writable doubles.
#[no_mangle]
pub unsafe extern "C" fn smk_operator_raw_moments(
    op: *const SmkOperator,
    x: f64,
    out: *mut f64,
) -> SmkStatus {
    guard(|| {
        let op = operator(op)?;
        write(out.cast::<[f64; 4]>(), raw_moments(&op.params, x).as_array())
    })
}

/// Writes `S*((u - x)^i; x)` for `i = 1..=4` into `out[0..4]`.
///
/// # Safety
/// `op` must be a live handle and `out` point to 4 writable doubles.
#[no_mangle]
pub unsafe extern "C" fn smk_operator_central_moments(
    op: *const SmkOperator,
    x: f64,
    out: *mut f64,
) -> SmkStatus {
    guard(|| {
        let op = operator(op)?;
        write(out.cast::<[f64; 4]>(), central_moments(&op.params, x).as_array())
    })
}

/// Second central moment `delta_{n,a}(x)`.
///
/// # Safety
/// `op` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn smk_operator_delta(op: *const SmkOperator, x: f64, out: *mut f64) -> SmkStatus {
    guard(|| {
        let op = operator(op)?;
        write(out, delta(&op.params, x).value())
    })
}

/// Poisson mean `x ln a / (a^(1/n) - 1)` of the weights at `x`.
///
/// # Safety
/// `op` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn smk_operator_mean_parameter(
    op: *const SmkOperator,
    x: f64,
    out: *mut f64,
) -> SmkStatus {
    guard(|| {
        let op = operator(op)?;
        write(out, mean_parameter(&op.params, x))
    })
}

/// Weight `s_{n,k}(x)`.
///
/// # Safety
/// `op` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn smk_operator_weight(
    op: *const SmkOperator,
    k: u64,
    x: f64,
    out: *mut f64,
) -> SmkStatus {
    guard(|| {
        let op = operator(op)?;
        write(out, lib(weight(&op.params, k, x))?)
    })
}

/// Creates `Y*_{m,m,a}`; defaults as in [`smk_operator_new`].
///
/// # Safety
/// `out` must be a valid pointer to writable storage for one handle pointer.
#[no_mangle]
pub unsafe extern "C" fn smk_bivariate_new(
    m: u64,
    a: f64,
    tail_eps: f64,
    quad_points: usize,
    out: *mut *mut SmkBivariateOperator,
) -> SmkStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let params = lib(BivariateParams::new(m, a))?;
        let (trunc, quad) = lib(settings(tail_eps, quad_points))?;
        *out = Box::into_raw(Box::new(SmkBivariateOperator {
            params,
            trunc,
            quad,
        }));
        Ok(())
    })
}

/// # Safety
/// `op` must be NULL or a handle from [`smk_bivariate_new`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn smk_bivariate_free(op: *mut SmkBivariateOperator) {
    if !op.is_null() {
        drop(Box::from_raw(op));
    }
}

unsafe fn bivariate<'a>(
    op: *const SmkBivariateOperator,
) -> Result<&'a SmkBivariateOperator, (SmkStatus, String)> {
    op.as_ref().ok_or_else(|| null("op"))
}

/// `Y*_{m,m,a}(f; x, y)` for a caller-supplied function.
///
/// # Safety
/// As [`smk_operator_apply`].
#[no_mangle]
pub unsafe extern "C" fn smk_bivariate_apply(
    op: *const SmkBivariateOperator,
    f: SmkBivariateCallback,
    user_data: *mut c_void,
    x: f64,
    y: f64,
    out: *mut f64,
) -> SmkStatus {
    guard(|| {
        let op = bivariate(op)?;
        let f = f.ok_or_else(|| null("f"))?;
        let data = UserData(user_data);
        let func = BivariateFunction::new("callback", move |u, v| unsafe { f(u, v, data.get()) });
        let value = lib(apply_bivariate(&op.params, &func, x, y, &op.trunc, &op.quad))?;
        write(out, value)
    })
}

/// `Y*_{m,m,a}(f; x, y)` for a bivariate catalog function such as `"bi-default"`.
///
/// # Safety
/// As [`smk_operator_apply_named`].
#[no_mangle]
pub unsafe extern "C" fn smk_bivariate_apply_named(
    op: *const SmkBivariateOperator,
    name: *const c_char,
    x: f64,
    y: f64,
    out: *mut f64,
) -> SmkStatus {
    guard(|| {
        let op = bivariate(op)?;
        let func = lib(catalog::bivariate(&name_arg(name)?))?;
        let value = lib(apply_bivariate(&op.params, &func, x, y, &op.trunc, &op.quad))?;
        write(out, value)
    })
}
