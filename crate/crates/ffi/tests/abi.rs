use std::ffi::{CStr, CString};
use std::path::{Path, PathBuf};
use std::process::Command;
use std::ptr;

use ma_secrecy::{bcd_solve, Scenario, SolverConfig};
use ma_secrecy_ffi::*;

fn last_error() -> String {
    let p = ms_last_error_message();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

fn draw(users: usize, eves: usize, antennas: usize, seed: u64) -> *mut MsScenario {
    let mut s = ptr::null_mut();
    let st = unsafe { ms_scenario_draw(users, eves, antennas, 10.0, 3.0, seed, &mut s) };
    assert_eq!(st, MsStatus::Ok);
    s
}

fn to_json(s: *const MsScenario) -> String {
    let mut out = ptr::null_mut();
    assert_eq!(unsafe { ms_scenario_to_json(s, &mut out) }, MsStatus::Ok);
    let text = unsafe { CStr::from_ptr(out) }.to_str().unwrap().to_owned();
    unsafe { ms_string_free(out) };
    text
}

#[test]
fn json_round_trip_through_handles() {
    let s = draw(3, 2, 4, 11);
    let text = to_json(s);
    let c = CString::new(text.clone()).unwrap();
    let mut back = ptr::null_mut();
    assert_eq!(unsafe { ms_scenario_from_json(c.as_ptr(), &mut back) }, MsStatus::Ok);
    assert_eq!(to_json(back), text);
    let (mut k, mut j, mut m) = (0, 0, 0);
    assert_eq!(unsafe { ms_scenario_dims(back, &mut k, &mut j, &mut m) }, MsStatus::Ok);
    assert_eq!((k, j, m), (3, 2, 4));
    unsafe {
        ms_scenario_free(s);
        ms_scenario_free(back);
    }
}

#[test]
fn solve_matches_the_rust_api() {
    let s = draw(2, 1, 3, 4);
    let mut r = ptr::null_mut();
    assert_eq!(unsafe { ms_solve(s, false, 200, &mut r) }, MsStatus::Ok);

    let scenario = Scenario::from_json(&to_json(s)).unwrap();
    let mut cfg = SolverConfig::default();
    cfg.placement.grid_points = 200;
    let expected = bcd_solve(&scenario, &cfg).unwrap();

    let mut rate = 0.0;
    let mut iters = 0;
    let mut converged = false;
    unsafe {
        assert_eq!(ms_report_sum_rate(r, &mut rate), MsStatus::Ok);
        assert_eq!(ms_report_iterations(r, &mut iters), MsStatus::Ok);
        assert_eq!(ms_report_converged(r, &mut converged), MsStatus::Ok);
    }
    assert_eq!(rate, expected.sum_rate());
    assert_eq!(iters, expected.iterations);
    assert_eq!(converged, expected.converged);

    let mut len = 0;
    let st = unsafe { ms_report_trajectory(r, ptr::null_mut(), 0, &mut len) };
    assert_eq!(st, MsStatus::BufferTooSmall);
    assert_eq!(len, iters);
    let mut buf = vec![0.0; len];
    assert_eq!(unsafe { ms_report_trajectory(r, buf.as_mut_ptr(), len, &mut len) }, MsStatus::Ok);
    assert_eq!(buf, expected.objective_trajectory);

    let mut pos = vec![0.0; 6];
    assert_eq!(unsafe { ms_report_positions(r, pos.as_mut_ptr(), 6) }, MsStatus::Ok);
    let flat: Vec<f64> = expected.final_layout.positions.iter().flatten().copied().collect();
    assert_eq!(pos, flat);

    // the reported design evaluates to the reported rate
    let w: Vec<f64> = expected.final_beamformer.columns.iter().flatten().flat_map(|c| [c.re, c.im]).collect();
    let mut again = 0.0;
    assert_eq!(unsafe { ms_secrecy_rate(s, pos.as_ptr(), w.as_ptr(), &mut again) }, MsStatus::Ok);
    assert!((again - rate).abs() <= 1e-12 * (1.0 + rate));

    let mut json = ptr::null_mut();
    assert_eq!(unsafe { ms_report_to_json(r, &mut json) }, MsStatus::Ok);
    let text = unsafe { CStr::from_ptr(json) }.to_str().unwrap();
    let v: serde_json::Value = serde_json::from_str(text).unwrap();
    assert_eq!(v["iterations"].as_u64(), Some(iters as u64));
    unsafe {
        ms_string_free(json);
        ms_report_free(r);
        ms_scenario_free(s);
    }
}

#[test]
fn error_codes_and_messages() {
    let mut s = ptr::null_mut();
    let bad = CString::new("{\"num_users\": 1}").unwrap();
    assert_eq!(unsafe { ms_scenario_from_json(bad.as_ptr(), &mut s) }, MsStatus::Parse);
    assert!(last_error().contains("power_budget") || last_error().contains("missing"));
    assert!(s.is_null());

    assert_eq!(unsafe { ms_scenario_from_json(ptr::null(), &mut s) }, MsStatus::NullPointer);
    assert_eq!(unsafe { ms_scenario_draw(0, 1, 2, 10.0, 3.0, 0, &mut s) }, MsStatus::InvalidArgument);

    let mut r = ptr::null_mut();
    assert_eq!(unsafe { ms_solve(ptr::null(), false, 0, &mut r) }, MsStatus::NullPointer);
    assert!(last_error().contains("scenario"));

    // beamformer above the power budget
    let sc = draw(1, 1, 2, 0);
    let json: serde_json::Value = serde_json::from_str(&to_json(sc)).unwrap();
    let p = json["power_budget"].as_f64().unwrap();
    let amp = (p).sqrt();
    let w = [amp, 0.0, amp, 0.0];
    let pos = [-0.5, 0.0, 0.5, 0.0];
    let mut rate = 0.0;
    assert_eq!(unsafe { ms_secrecy_rate(sc, pos.as_ptr(), w.as_ptr(), &mut rate) }, MsStatus::Infeasible);
    unsafe { ms_scenario_free(sc) };

    // freeing null is a no-op
    unsafe {
        ms_scenario_free(ptr::null_mut());
        ms_report_free(ptr::null_mut());
        ms_string_free(ptr::null_mut());
    }
}

#[test]
fn version_is_the_crate_version() {
    let v = unsafe { CStr::from_ptr(ms_version()) }.to_str().unwrap();
    assert_eq!(v, env!("CARGO_PKG_VERSION"));
}

fn target_dir() -> PathBuf {
    // tests run from target/<profile>/deps
    let exe = std::env::current_exe().unwrap();
    exe.parent().unwrap().parent().unwrap().to_path_buf()
}

#[test]
fn c_program_links_against_the_static_library() {
    let crate_dir = Path::new(env!("CARGO_MANIFEST_DIR"));
    let lib = target_dir().join("libma_secrecy_ffi.a");
    if !lib.exists() || Command::new("cc").arg("--version").output().is_err() {
        eprintln!("skipping: static library or C compiler unavailable");
        return;
    }
    let out = tempfile::tempdir().unwrap();
    let exe = out.path().join("smoke");
    let status = Command::new("cc")
        .arg("-std=c99")
        .arg("-Wall")
        .arg("-Werror")
        .arg("-I")
        .arg(crate_dir.join("include"))
        .arg(crate_dir.join("tests/c/smoke.c"))
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm"])
        .arg("-o")
        .arg(&exe)
        .status()
        .unwrap();
    assert!(status.success(), "C compile failed");
    let run = Command::new(&exe).output().unwrap();
    assert!(run.status.success(), "{}", String::from_utf8_lossy(&run.stderr));
    let stdout = String::from_utf8(run.stdout).unwrap();
    let mut parts = stdout.split_whitespace();
    let rate: f64 = parts.next().unwrap().parse().unwrap();
    assert!(rate > 0.0);
}
