use acfront_ffi::*;
use std::ffi::{CStr, CString};
use std::path::{Path, PathBuf};
use std::process::Command;
use std::ptr;

fn last_error() -> String {
    let p = acf_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

#[test]
fn melnikov_roundtrip_and_errors() {
    unsafe {
        let mut f = ptr::null_mut();
        let spec = CString::new("triple:1,0,0,2").unwrap();
        assert_eq!(acf_forcing_parse(spec.as_ptr(), &mut f), AcfStatus::Ok);
        let mut m = ptr::null_mut();
        assert_eq!(acf_melnikov_new(f, AcfOrientation::Up, &mut m), AcfStatus::Ok);
        let (mut r, mut rp) = (f64::NAN, f64::NAN);
        assert_eq!(acf_melnikov_eval(m, 0.3, &mut r, &mut rp), AcfStatus::Ok);
        assert!(r.is_finite() && rp.is_finite() && r != 0.0);
        assert_eq!(acf_melnikov_eval(m, 0.3, ptr::null_mut(), &mut rp), AcfStatus::NullPointer);
        assert!(last_error().contains("null"));
        acf_melnikov_free(m);
        acf_forcing_free(f);
        acf_forcing_free(ptr::null_mut());

        let bad = CString::new("topo:bogus:1").unwrap();
        let mut g = ptr::null_mut();
        assert_eq!(acf_forcing_parse(bad.as_ptr(), &mut g), AcfStatus::InvalidInput);
        assert!(g.is_null());
        assert!(last_error().contains("bogus"));
        assert_eq!(acf_forcing_parse(ptr::null(), &mut g), AcfStatus::NullPointer);
    }
}

#[test]
fn nfront_and_evans() {
    unsafe {
        let mut f = ptr::null_mut();
        let spec = CString::new("zero").unwrap();
        assert_eq!(acf_forcing_parse(spec.as_ptr(), &mut f), AcfStatus::Ok);
        let pos = [-3.0, 3.0];
        let mut v = [0.0; 2];
        assert_eq!(acf_nfront_rhs(f, 0.1, AcfOrientation::Up, pos.as_ptr(), 2, v.as_mut_ptr()), AcfStatus::Ok);
        assert!(v[0] > 0.0 && (v[0] + v[1]).abs() < 1e-14);
        let unordered = [3.0, -3.0];
        assert_eq!(acf_nfront_rhs(f, 0.1, AcfOrientation::Up, unordered.as_ptr(), 2, v.as_mut_ptr()), AcfStatus::InvalidInput);
        assert_eq!(acf_nfront_rhs(f, 1.5, AcfOrientation::Up, pos.as_ptr(), 2, v.as_mut_ptr()), AcfStatus::InvalidInput);
        let mut p = [-8.0, 8.0];
        assert_eq!(acf_nfront_integrate(f, 0.1, AcfOrientation::Up, p.as_mut_ptr(), 2, 10.0), AcfStatus::Ok);
        assert!(p[0] > -8.0 && p[1] < 8.0);
        acf_forcing_free(f);

        let (mut re, mut im) = (f64::NAN, f64::NAN);
        assert_eq!(acf_evans_homogeneous(0.0, 0.0, &mut re, &mut im), AcfStatus::Ok);
        assert!(re.abs() < 1e-12 && im.abs() < 1e-12);
        assert_eq!(acf_evans_homogeneous(-3.0, 0.0, &mut re, &mut im), AcfStatus::InvalidInput);
    }
}

#[test]
fn scenario_config_and_buffers() {
    unsafe {
        let mut cfg = ptr::null_mut();
        let unknown = CString::new("fig99").unwrap();
        assert_eq!(acf_pde_config_scenario(unknown.as_ptr(), &mut cfg), AcfStatus::UnknownScenario);
        let id = CString::new("fig1a").unwrap();
        assert_eq!(acf_pde_config_scenario(id.as_ptr(), &mut cfg), AcfStatus::Ok);
        let set = CString::new("t_end=5").unwrap();
        assert_eq!(acf_pde_config_set(cfg, set.as_ptr()), AcfStatus::Ok);
        let bad = CString::new("t_end=-5").unwrap();
        assert_eq!(acf_pde_config_set(cfg, bad.as_ptr()), AcfStatus::InvalidInput);
        let mut res = ptr::null_mut();
        assert_eq!(acf_pde_run(cfg, &mut res), AcfStatus::Ok);
        let mut len = 0usize;
        let mut one = [0.0; 1];
        assert_eq!(acf_pde_result_positions(res, one.as_mut_ptr(), 1, &mut len), AcfStatus::BufferTooSmall);
        assert_eq!(len, 2);
        let mut field = vec![0.0; 1000];
        assert_eq!(acf_pde_result_field(res, field.as_mut_ptr(), field.len(), &mut len), AcfStatus::Ok);
        assert_eq!(len, 401);
        let mut outcome = AcfPdeOutcome::Pinned;
        let mut t = 0.0;
        assert_eq!(acf_pde_result_summary(res, &mut outcome, &mut t), AcfStatus::Ok);
        assert_eq!(outcome, AcfPdeOutcome::Completed);
        assert!((t - 5.0).abs() < 1e-9);
        acf_pde_result_free(res);
        acf_pde_config_free(cfg);

        let json = CString::new("{\"x_min\": 0}").unwrap();
        assert_eq!(acf_pde_config_from_json(json.as_ptr(), &mut cfg), AcfStatus::InvalidInput);
    }
}

#[test]
fn localized_count_through_ffi() {
    unsafe {
        let topo = CString::new("exp:0.8").unwrap();
        let (mut count, mut unstable) = (0usize, false);
        assert_eq!(acf_stationary_localized(topo.as_ptr(), 1e-3, 2, &mut count, &mut unstable), AcfStatus::Ok);
        assert_eq!(count, 7);
        assert!(unstable);
    }
}

fn target_dir() -> PathBuf {
    let exe = std::env::current_exe().unwrap();
    exe.parent().and_then(Path::parent).unwrap().to_path_buf()
}

#[test]
fn header_compiles_and_links_from_c() {
    let root = Path::new(env!("CARGO_MANIFEST_DIR"));
    let header = root.join("include").join("acfront.h");
    let text = std::fs::read_to_string(&header).unwrap();
    for name in ["acf_forcing_parse", "acf_pde_run", "acf_last_error", "ACF_STATUS_BUFFER_TOO_SMALL", "typedef struct AcfPdeResult AcfPdeResult"] {
        assert!(text.contains(name), "{name} missing from header");
    }
    let lib = target_dir().join("libacfront_ffi.a");
    assert!(lib.exists(), "static library not found at {}", lib.display());
    let out = tempfile::tempdir().unwrap();
    let exe = out.path().join("c_api");
    let status = Command::new("cc")
        .arg("-std=c99")
        .arg("-Wall")
        .arg("-Werror")
        .arg("-I")
        .arg(root.join("include"))
        .arg(root.join("tests").join("c_api.c"))
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&exe)
        .status()
        .unwrap();
    assert!(status.success(), "C compilation failed");
    let run = Command::new(&exe).output().unwrap();
    assert!(run.status.success(), "{}", String::from_utf8_lossy(&run.stderr));
    assert!(String::from_utf8_lossy(&run.stdout).starts_with("ok "));
}
