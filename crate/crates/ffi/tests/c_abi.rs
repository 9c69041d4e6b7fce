use std::ffi::{CStr, CString};
use std::ptr;

use swingbench_ffi::*;

const K3: &str = r#"{"preset":{"kind":"complete","n":3,"weight":1.0},"inertia":1,"damping":1}"#;

fn k3() -> *mut SbModel {
    let json = CString::new(K3).unwrap();
    let mut model = ptr::null_mut();
    assert_eq!(unsafe { sb_model_from_json(json.as_ptr(), &mut model) }, SbStatus::Ok);
    assert!(!model.is_null());
    model
}

fn last_error() -> String {
    unsafe { CStr::from_ptr(sb_last_error_message()) }.to_string_lossy().into_owned()
}

#[test]
fn smib_norms_through_handle() {
    let mut model = ptr::null_mut();
    unsafe {
        assert_eq!(sb_model_smib(1.0, 1.0, 1.0, &mut model), SbStatus::Ok);
        let (mut h2, mut hinf) = (0.0, 0.0);
        assert_eq!(sb_closed_form_norms(model, SbOutput::Phase, 0.0, &mut h2, &mut hinf), SbStatus::Ok);
        assert!((h2 - 0.5f64.sqrt()).abs() < 1e-15);
        assert!((hinf - 2.0 / 3f64.sqrt()).abs() < 1e-15);
        let (mut oracle, mut arg) = (0.0, 0.0);
        assert_eq!(sb_hinf_oracle(model, SbOutput::Phase, 0.0, 1e-9, &mut oracle, &mut arg), SbStatus::Ok);
        assert!((oracle - hinf).abs() < 1e-9 * hinf);
        assert!((arg - 0.5f64.sqrt()).abs() < 1e-6);
        sb_model_free(model);
    }
}

#[test]
fn network_handle_queries() {
    let model = k3();
    unsafe {
        let mut n = 0usize;
        assert_eq!(sb_model_mode_count(model, &mut n), SbStatus::Ok);
        assert_eq!(n, 3);
        let mut l2 = 0.0;
        assert_eq!(sb_model_lambda2(model, &mut l2), SbStatus::Ok);
        assert!((l2 - 3.0).abs() < 1e-12);
        let mut h2 = 0.0;
        assert_eq!(sb_h2_oracle(model, SbOutput::Frequency, 0.0, &mut h2), SbStatus::Ok);
        assert!((h2 - 1.5f64.sqrt()).abs() < 1e-12);
        assert_eq!(sb_h2_oracle(model, SbOutput::Combined, 1.0, &mut h2), SbStatus::Ok);

        let (mut a, mut b) = (0.0, 0.0);
        assert_eq!(sb_closed_form_norms(model, SbOutput::Combined, 1.0, &mut a, &mut b), SbStatus::NoClosedForm);
        assert_eq!(sb_h2_oracle(model, SbOutput::Combined, -1.0, &mut h2), SbStatus::NonPositiveParameter);

        let mut re = [0.0; 6];
        let mut im = [0.0; 6];
        let mut written = 0usize;
        assert_eq!(sb_poles(model, re.as_mut_ptr(), im.as_mut_ptr(), 2, &mut written), SbStatus::BufferTooSmall);
        assert_eq!(written, 6);
        assert_eq!(sb_poles(model, re.as_mut_ptr(), im.as_mut_ptr(), 6, &mut written), SbStatus::Ok);
        assert_eq!((re[0], im[0], re[1]), (0.0, 0.0, -1.0));

        let mut heavy = ptr::null_mut();
        assert_eq!(sb_model_with_params(model, 10.0, 1.0, &mut heavy), SbStatus::Ok);
        let mut zeta = 0.0;
        assert_eq!(sb_min_damping_ratio(heavy, &mut zeta), SbStatus::Ok);
        assert!((zeta - 1.0 / (2.0 * 30f64.sqrt())).abs() < 1e-15);
        sb_model_free(heavy);
        sb_model_free(model);
    }
}

#[test]
fn error_codes_and_messages() {
    unsafe {
        let mut model = ptr::null_mut();
        let bad = CString::new(r#"{"n":2,"edges":[{"i":0,"j":1,"b":-1}],"inertia":1,"damping":1}"#).unwrap();
        assert_eq!(sb_model_from_json(bad.as_ptr(), &mut model), SbStatus::ValidationError);
        assert!(last_error().contains("edge 0"), "{}", last_error());
        assert!(model.is_null());

        let split = CString::new(r#"{"n":4,"edges":[{"i":0,"j":1,"b":1},{"i":2,"j":3,"b":1}],"inertia":1,"damping":1}"#).unwrap();
        assert_eq!(sb_model_from_json(split.as_ptr(), &mut model), SbStatus::DisconnectedGraph);

        let junk = CString::new("{not json").unwrap();
        assert_eq!(sb_model_from_json(junk.as_ptr(), &mut model), SbStatus::ParseError);
        assert_eq!(sb_model_from_json(ptr::null(), &mut model), SbStatus::NullPointer);
        assert_eq!(sb_model_smib(0.0, 1.0, 1.0, &mut model), SbStatus::NonPositiveParameter);

        let mut x = 0.0;
        assert_eq!(sb_model_lambda2(ptr::null(), &mut x), SbStatus::NullPointer);
        sb_model_free(ptr::null_mut());

        let name = CStr::from_ptr(sb_status_name(SbStatus::DisconnectedGraph));
        assert_eq!(name.to_str().unwrap(), "DisconnectedGraph");
    }
}

#[test]
fn header_declares_every_export() {
    let header = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/include/swingbench.h")).unwrap();
    for name in [
        "sb_model_from_json",
        "sb_model_smib",
        "sb_model_with_params",
        "sb_model_free",
        "sb_model_mode_count",
        "sb_model_lambda2",
        "sb_min_damping_ratio",
        "sb_poles",
        "sb_closed_form_norms",
        "sb_h2_oracle",
        "sb_hinf_oracle",
        "sb_last_error_message",
        "sb_status_name",
        "typedef struct SbModel SbModel",
        "SB_STATUS_DISCONNECTED_GRAPH = 5",
    ] {
        assert!(header.contains(name), "header lacks {name}");
    }
}
