use std::ffi::{c_void, CStr};
use std::ptr;

use smk_lab_ffi::*;

fn operator(n: u64, a: f64) -> *mut SmkOperator {
    let mut op = ptr::null_mut();
    assert_eq!(unsafe { smk_operator_new(n, a, 0.0, 0, &mut op) }, SmkStatus::Ok);
    assert!(!op.is_null());
    op
}

fn last_error() -> String {
    let p = smk_last_error_message();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

unsafe extern "C" fn scaled_square(u: f64, data: *mut c_void) -> f64 {
    let scale = *(data as *const f64);
    scale * u * u
}

unsafe extern "C" fn counting_one(_u: f64, data: *mut c_void) -> f64 {
    *(data as *mut u64) += 1;
    1.0
}

#[test]
fn weight_at_origin_is_point_mass() {
    let op = operator(5, 1.5);
    let mut w = f64::NAN;
    unsafe {
        assert_eq!(smk_operator_weight(op, 0, 0.0, &mut w), SmkStatus::Ok);
        assert_eq!(w, 1.0);
        assert_eq!(smk_operator_weight(op, 3, 0.0, &mut w), SmkStatus::Ok);
        assert_eq!(w, 0.0);
        smk_operator_free(op);
    }
}

#[test]
fn callback_matches_second_moment() {
    let op = operator(5, 1.5);
    let mut scale = 2.0f64;
    let (mut via_callback, mut moments) = (0.0, [0.0; 4]);
    unsafe {
        let status = smk_operator_apply(
            op,
            Some(scaled_square),
            (&mut scale as *mut f64).cast(),
            1.0,
            &mut via_callback,
        );
        assert_eq!(status, SmkStatus::Ok);
        assert_eq!(smk_operator_raw_moments(op, 1.0, moments.as_mut_ptr()), SmkStatus::Ok);
        smk_operator_free(op);
    }
    assert_eq!(moments[0], 1.0);
    let rel = (via_callback - 2.0 * moments[2]).abs() / via_callback;
    assert!(rel < 1e-11, "relative difference {rel:e}");
}

#[test]
fn user_data_reaches_callback() {
    let op = operator(3, 2.0);
    let mut calls = 0u64;
    let mut value = 0.0;
    unsafe {
        let status =
            smk_operator_apply(op, Some(counting_one), (&mut calls as *mut u64).cast(), 0.4, &mut value);
        assert_eq!(status, SmkStatus::Ok);
        smk_operator_free(op);
    }
    assert!(calls > 0);
    assert!((value - 1.0).abs() < 1e-12);
}

#[test]
fn named_functions_and_kantorovich_at_origin() {
    let op = operator(4, 1.5);
    let (mut s, mut k) = (0.0, 0.0);
    unsafe {
        assert_eq!(smk_operator_apply_named(op, c"reciprocal".as_ptr(), 0.0, &mut s), SmkStatus::Ok);
        assert_eq!(
            smk_operator_kantorovich_named(op, c"reciprocal".as_ptr(), 0.0, &mut k),
            SmkStatus::Ok
        );
        smk_operator_free(op);
    }
    // Both reduce to the average of 1/(1+u) over [0, 1/4].
    let exact = 4.0 * 1.25f64.ln();
    assert!((s - exact).abs() < 1e-12 && (k - exact).abs() < 1e-12);
}

#[test]
fn moments_and_delta_agree() {
    let op = operator(5, 1.5);
    let (mut delta, mut lambda, mut central) = (0.0, 0.0, [0.0; 4]);
    unsafe {
        assert_eq!(smk_operator_delta(op, 1.0, &mut delta), SmkStatus::Ok);
        assert_eq!(smk_operator_mean_parameter(op, 1.0, &mut lambda), SmkStatus::Ok);
        assert_eq!(smk_operator_central_moments(op, 1.0, central.as_mut_ptr()), SmkStatus::Ok);
        smk_operator_free(op);
    }
    assert_eq!(central[1], delta);
    assert!((delta - 0.198_933_792_743_181_85).abs() < 1e-14);
    assert!((lambda - 4.800_007_178_246_678_6).abs() < 1e-13);
}

#[test]
fn errors_set_status_and_message() {
    let mut op = ptr::null_mut();
    unsafe {
        assert_eq!(smk_operator_new(5, 1.0, 0.0, 0, &mut op), SmkStatus::InvalidParameter);
        assert!(op.is_null());
        assert!(last_error().contains('a'));
        assert_eq!(smk_operator_new(0, 2.0, 0.0, 0, &mut op), SmkStatus::InvalidParameter);
        assert_eq!(smk_operator_new(5, 2.0, 0.0, 0, ptr::null_mut()), SmkStatus::NullPointer);
        assert!(last_error().contains("out"));

        let op = operator(5, 2.0);
        let mut v = 0.0;
        assert_eq!(
            smk_operator_apply_named(op, c"nope".as_ptr(), 0.5, &mut v),
            SmkStatus::UnknownFunction
        );
        assert!(last_error().contains("nope"));
        assert_eq!(smk_operator_apply_named(op, ptr::null(), 0.5, &mut v), SmkStatus::NullPointer);
        assert_eq!(smk_operator_apply(op, None, ptr::null_mut(), 0.5, &mut v), SmkStatus::NullPointer);
        assert_eq!(
            smk_operator_apply_named(op, c"identity".as_ptr(), -1.0, &mut v),
            SmkStatus::InvalidParameter
        );
        assert_eq!(
            smk_operator_apply_named(ptr::null(), c"identity".as_ptr(), 0.5, &mut v),
            SmkStatus::NullPointer
        );
        smk_operator_free(op);
        smk_operator_free(ptr::null_mut());
    }
}

unsafe extern "C" fn blows_up(u: f64, _data: *mut c_void) -> f64 {
    1.0 / (u - 0.05)
}

unsafe extern "C" fn product(u: f64, v: f64, _data: *mut c_void) -> f64 {
    u * v
}

#[test]
fn non_finite_callback_is_reported() {
    let mut v = 0.0;
    unsafe {
        // One-point rule: the only node of the first cell is its midpoint 0.05.
        let mut one = ptr::null_mut();
        assert_eq!(smk_operator_new(10, 2.0, 0.0, 1, &mut one), SmkStatus::Ok);
        assert_eq!(
            smk_operator_apply(one, Some(blows_up), ptr::null_mut(), 0.0, &mut v),
            SmkStatus::NonFinite
        );
        smk_operator_free(one);
    }
}

#[test]
fn bivariate_handle_factorizes_product() {
    let mut bi = ptr::null_mut();
    let op = operator(4, 3.0);
    let (mut xy, mut named, mut mx, mut my) = (0.0, 0.0, [0.0; 4], [0.0; 4]);
    unsafe {
        assert_eq!(smk_bivariate_new(4, 3.0, 0.0, 0, &mut bi), SmkStatus::Ok);
        assert_eq!(
            smk_bivariate_apply(bi, Some(product), ptr::null_mut(), 0.3, 0.8, &mut xy),
            SmkStatus::Ok
        );
        assert_eq!(
            smk_bivariate_apply_named(bi, c"bi-product".as_ptr(), 0.3, 0.8, &mut named),
            SmkStatus::Ok
        );
        smk_operator_raw_moments(op, 0.3, mx.as_mut_ptr());
        smk_operator_raw_moments(op, 0.8, my.as_mut_ptr());
        assert_eq!(smk_bivariate_new(4, 0.5, 0.0, 0, &mut bi), SmkStatus::InvalidParameter);
        smk_bivariate_free(bi);
        smk_operator_free(op);
    }
    assert!((xy - mx[1] * my[1]).abs() < 1e-12);
    assert_eq!(xy, named);
}
