use divstats_ffi::*;
use std::ffi::CStr;
use std::path::PathBuf;
use std::process::Command;
use std::ptr;

fn rayleigh_il() -> DsConfig {
    DsConfig { m_s: 1, m_i: 1, omega_s: 1.0, omega_i: 1.0, sigma2: 0.0, n: 1, f_m0: 10.0, f_mi: 10.0 }
}

fn last_error() -> String {
    unsafe { CStr::from_ptr(ds_last_error()) }.to_string_lossy().into_owned()
}

#[test]
fn handle_lifecycle_and_values() {
    let mut link = ptr::null_mut();
    assert_eq!(unsafe { ds_link_new(&rayleigh_il(), &mut link) }, DsStatus::Ok);
    assert!(!link.is_null());

    let (mut mu, mut c, mut regime) = (0.0, -1.0, DsRegime::General);
    assert_eq!(unsafe { ds_link_derived(link, &mut mu, &mut c, &mut regime) }, DsStatus::Ok);
    assert_eq!((mu, c, regime), (1.0, 0.0, DsRegime::InterferenceLimited));

    let mut op = 0.0;
    assert_eq!(unsafe { ds_eval(link, DsStatistic::Outage, 1.0, &mut op) }, DsStatus::Ok);
    assert!((op - 1.0 / 3.0).abs() < 1e-12);

    let mut lcr = 0.0;
    assert_eq!(unsafe { ds_eval(link, DsStatistic::Lcr, 1.0, &mut lcr) }, DsStatus::Ok);
    let want = 2f64.sqrt() * std::f64::consts::PI * 0.5 * (1.0 - (2.0f64 / 3.0).powf(1.5)) * 10.0;
    assert!((lcr / want - 1.0).abs() < 1e-12);

    let (mut t, mut flag) = (0.0, DsAfdFlag::Unbounded);
    assert_eq!(unsafe { ds_afd(link, 1.0, &mut t, &mut flag) }, DsStatus::Ok);
    assert_eq!(flag, DsAfdFlag::Regular);
    assert!((t * lcr - op).abs() < 1e-14);
    assert_eq!(unsafe { ds_afd(link, 0.0, &mut t, &mut flag) }, DsStatus::Ok);
    assert_eq!((t, flag), (0.0, DsAfdFlag::ZeroThreshold));

    let z = [0.5, 1.0, -1.0, 2.0];
    let mut out = [0.0; 4];
    assert_eq!(unsafe { ds_sweep(link, DsStatistic::Outage, z.as_ptr(), 4, out.as_mut_ptr()) }, DsStatus::Domain);
    assert!(out[2].is_nan());
    assert!((out[1] - op).abs() < 1e-15);
    assert!(out[0] < out[1] && out[1] < out[3]);
    assert!(last_error().contains("-1"));

    unsafe { ds_link_free(link) };
    unsafe { ds_link_free(ptr::null_mut()) };
}

#[test]
fn error_codes() {
    let mut link = ptr::null_mut();
    let bad = DsConfig { m_s: 0, ..rayleigh_il() };
    assert_eq!(unsafe { ds_link_new(&bad, &mut link) }, DsStatus::InvalidConfig);
    assert!(link.is_null());
    assert!(last_error().contains("m_S"));

    assert_eq!(unsafe { ds_link_new(ptr::null(), &mut link) }, DsStatus::NullPointer);
    assert_eq!(unsafe { ds_link_new(&rayleigh_il(), ptr::null_mut()) }, DsStatus::NullPointer);
    let mut v = 0.0;
    assert_eq!(unsafe { ds_eval(ptr::null(), DsStatistic::Lcr, 1.0, &mut v) }, DsStatus::NullPointer);

    assert_eq!(unsafe { ds_link_new(&rayleigh_il(), &mut link) }, DsStatus::Ok);
    assert_eq!(last_error(), "");
    assert_eq!(unsafe { ds_eval(link, DsStatistic::Lcr, f64::NAN, &mut v) }, DsStatus::Domain);
    assert_eq!(unsafe { ds_eval(link, DsStatistic::Lcr, 1.0, ptr::null_mut()) }, DsStatus::NullPointer);
    unsafe { ds_link_free(link) };
}

#[test]
fn version_string() {
    let v = unsafe { CStr::from_ptr(ds_version()) }.to_str().unwrap();
    assert_eq!(v, env!("CARGO_PKG_VERSION"));
}

const C_PROGRAM: &str = r#"
#include "divstats.h"
#include <stdio.h>
#include <math.h>

int main(void) {
    DsConfig cfg = {1, 1, 1.0, 1.0, 0.0, 1, 10.0, 10.0};
    DsLink *link = NULL;
    if (ds_link_new(&cfg, &link) != DS_STATUS_OK) return 10;
    double op = 0.0;
    if (ds_eval(link, DS_STATISTIC_OUTAGE, 1.0, &op) != DS_STATUS_OK) return 11;
    if (fabs(op - 1.0 / 3.0) > 1e-12) return 12;
    cfg.m_s = 0;
    DsLink *bad = NULL;
    if (ds_link_new(&cfg, &bad) != DS_STATUS_INVALID_CONFIG) return 13;
    if (ds_last_error()[0] == '\0') return 14;
    ds_link_free(link);
    printf("%.15f\n", op);
    return 0;
}
"#;

// Compiles and runs a C program against the generated header and the static
// library next to this test binary.
#[test]
fn c_program_links_against_header() {
    let exe = std::env::current_exe().unwrap();
    let profile_dir = exe.parent().unwrap().parent().unwrap();
    let lib = profile_dir.join("libdivstats_ffi.a");
    assert!(lib.exists(), "static library missing at {}", lib.display());
    let include = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("include");
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("main.c");
    std::fs::write(&src, C_PROGRAM).unwrap();
    let bin = dir.path().join("main");
    let status = Command::new("cc")
        .arg("-std=c99")
        .arg("-Wall")
        .arg("-Werror")
        .arg("-I")
        .arg(&include)
        .arg(&src)
        .arg(&lib)
        .args(["-lm", "-lpthread", "-ldl", "-o"])
        .arg(&bin)
        .status()
        .expect("C compiler");
    assert!(status.success());
    let out = Command::new(&bin).output().unwrap();
    assert!(out.status.success(), "exit {:?}", out.status.code());
    assert_eq!(String::from_utf8_lossy(&out.stdout).trim(), "0.333333333333333");
}
