use std::ffi::{CStr, CString};
use std::path::PathBuf;
use std::process::Command;
use std::ptr;

use torus_cohomology_ffi::*;

const COS1: &str = r#"{"dim":1,"real":true,"coeffs":[{"k":[-1],"re":0.5,"im":0},{"k":[1],"re":0.5,"im":0}]}"#;

fn series(json: &str) -> *mut TcSeries {
    let text = CString::new(json).unwrap();
    let mut out = ptr::null_mut();
    assert_eq!(unsafe { tc_series_from_json(text.as_ptr(), &mut out) }, TcStatus::Ok);
    out
}

fn last_error() -> String {
    let p = tc_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

#[test]
fn series_round_trip_and_evaluate() {
    let s = series(COS1);
    assert_eq!(unsafe { tc_series_dim(s) }, 1);
    let mut value = 0.0;
    let theta = [0.25];
    assert_eq!(unsafe { tc_series_evaluate(s, theta.as_ptr(), 1, &mut value) }, TcStatus::Ok);
    assert!(value.abs() < 1e-15);

    let mut text = ptr::null_mut();
    assert_eq!(unsafe { tc_series_to_json(s, &mut text) }, TcStatus::Ok);
    let json = unsafe { CStr::from_ptr(text) }.to_str().unwrap().to_string();
    unsafe { tc_string_free(text) };
    let again = series(&json);
    let mut v2 = 0.0;
    let theta = [0.1];
    unsafe {
        tc_series_evaluate(s, theta.as_ptr(), 1, &mut value);
        tc_series_evaluate(again, theta.as_ptr(), 1, &mut v2);
    }
    assert_eq!(value, v2);
    unsafe {
        tc_series_free(s);
        tc_series_free(again);
    }
}

#[test]
fn parse_and_pointer_errors() {
    let bad = CString::new("{\"dim\":").unwrap();
    let mut out = ptr::null_mut();
    assert_eq!(unsafe { tc_series_from_json(bad.as_ptr(), &mut out) }, TcStatus::ParseError);
    assert!(out.is_null());
    assert!(last_error().contains("invalid series JSON"));
    assert_eq!(unsafe { tc_series_from_json(ptr::null(), &mut out) }, TcStatus::NullPointer);
    let mut value = 0.0;
    assert_eq!(
        unsafe { tc_series_evaluate(ptr::null(), ptr::null(), 0, &mut value) },
        TcStatus::NullPointer
    );
    unsafe {
        tc_series_free(ptr::null_mut());
        tc_solution_free(ptr::null_mut());
    }
}

#[test]
fn solve_and_resonance() {
    let xi = series(COS1);
    let alpha = [0.6180339887498949];
    let mut sol = ptr::null_mut();
    assert_eq!(unsafe { tc_solve(xi, alpha.as_ptr(), 1, 1e-10, 0, &mut sol) }, TcStatus::Ok);
    assert_eq!(unsafe { tc_solution_resonant_count(sol) }, 0);
    assert_eq!(unsafe { tc_solution_mean(sol) }, 0.0);
    let mut u = ptr::null_mut();
    assert_eq!(unsafe { tc_solution_transfer(sol, &mut u) }, TcStatus::Ok);
    // u(θ+α) - u(θ) = cos 2πθ
    let (mut a, mut b, mut x) = (0.0, 0.0, 0.0);
    unsafe {
        tc_series_evaluate(u, [0.3 + alpha[0]].as_ptr(), 1, &mut a);
        tc_series_evaluate(u, [0.3].as_ptr(), 1, &mut b);
        tc_series_evaluate(xi, [0.3].as_ptr(), 1, &mut x);
    }
    assert!((a - b - x).abs() < 1e-13);
    unsafe {
        tc_series_free(u);
        tc_solution_free(sol);
    }

    let mut resonant = ptr::null_mut();
    let zero = [1.0];
    assert_eq!(unsafe { tc_solve(xi, zero.as_ptr(), 1, 1e-10, 1, &mut resonant) }, TcStatus::Ok);
    unsafe { tc_solution_free(resonant) };
    let mut resonant = ptr::null_mut();
    assert_eq!(unsafe { tc_solve(xi, zero.as_ptr(), 1, 1e-10, 0, &mut resonant) }, TcStatus::Obstructed);
    assert_eq!(unsafe { tc_solution_resonant_count(resonant) }, 2);
    unsafe {
        tc_solution_free(resonant);
        tc_series_free(xi);
    }
}

#[test]
fn diophantine_pairing_and_lyapunov() {
    let alpha = [1.0, 1.618033988749895];
    let (mut margin, mut holds) = (0.0, false);
    let st = unsafe { tc_check_diophantine(alpha.as_ptr(), 2, 0.5, 1.0, 200, &mut margin, &mut holds) };
    assert_eq!(st, TcStatus::Ok);
    assert!(holds);
    assert!((margin - 0.6180339887498949).abs() < 1e-9);

    let rational = [1.0, 0.5];
    let st = unsafe { tc_check_diophantine(rational.as_ptr(), 2, 0.5, 1.0, 10, &mut margin, &mut holds) };
    assert_eq!(st, TcStatus::Obstructed);

    let psi = series(r#"{"dim":2,"real":false,"coeffs":[{"k":[2,1],"re":1,"im":0}]}"#);
    let (mut re, mut im) = (0.0, 0.0);
    assert_eq!(unsafe { tc_tm_pair(1, 2, 0.3, 0.25, psi, &mut re, &mut im) }, TcStatus::Ok);
    assert!(re.abs() < 1e-12 && (im + 1.0).abs() < 1e-12);
    assert_eq!(unsafe { tc_tm_pair(1, 0, 0.3, 0.25, psi, &mut re, &mut im) }, TcStatus::InvalidArgument);
    unsafe { tc_series_free(psi) };

    let m = [2.0, 0.0, 0.0, 0.5];
    let mut lambda = 0.0;
    assert_eq!(unsafe { tc_lyapunov(0.3, m.as_ptr(), 0.0, 1000, &mut lambda) }, TcStatus::Ok);
    assert!((lambda - 2f64.ln()).abs() < 1e-12);
}

#[test]
fn header_declares_the_api() {
    let header = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/include/torus_cohomology.h")).unwrap();
    for name in [
        "tc_series_from_json",
        "tc_series_to_json",
        "tc_series_free",
        "tc_series_evaluate",
        "tc_solve",
        "tc_solution_free",
        "tc_check_diophantine",
        "tc_tm_pair",
        "tc_lyapunov",
        "tc_last_error",
        "typedef struct TcSeries TcSeries",
        "TC_STATUS_OBSTRUCTED = 2",
    ] {
        assert!(header.contains(name), "header is missing {name}");
    }
}

#[test]
fn c_program_links_against_the_static_library() {
    let manifest = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    let exe = std::env::current_exe().unwrap();
    let profile_dir = exe.parent().and_then(|p| p.parent()).unwrap();
    let lib = profile_dir.join("libtorus_cohomology_ffi.a");
    if !lib.exists() || Command::new("cc").arg("--version").output().is_err() {
        eprintln!("skipping: no static library or C compiler");
        return;
    }
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("smoke.c");
    std::fs::write(
        &src,
        r#"#include <stdio.h>
#include "torus_cohomology.h"
int main(void) {
    TcSeries *s = NULL;
    const char *json = "{\"dim\":1,\"real\":true,\"coeffs\":[{\"k\":[0],\"re\":2.5,\"im\":0}]}";
    if (tc_series_from_json(json, &s) != TC_STATUS_OK) return 1;
    double theta = 0.3, v = 0.0;
    if (tc_series_evaluate(s, &theta, 1, &v) != TC_STATUS_OK) return 2;
    tc_series_free(s);
    if (tc_series_from_json("nope", &s) != TC_STATUS_PARSE_ERROR) return 3;
    printf("%.3f %s\n", v, tc_version());
    return 0;
}
"#,
    )
    .unwrap();
    let bin = dir.path().join("smoke");
    let status = Command::new("cc")
        .arg(&src)
        .arg("-I")
        .arg(manifest.join("include"))
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&bin)
        .status()
        .unwrap();
    assert!(status.success());
    let out = Command::new(&bin).output().unwrap();
    assert!(out.status.success(), "exit {:?}", out.status);
    assert!(String::from_utf8_lossy(&out.stdout).starts_with("2.500 "));
}
