use std::ffi::CStr;
use std::path::PathBuf;
use std::process::Command;
use std::ptr;

use ncq_ffi::*;

fn last_error() -> String {
    let p = ncq_last_error_message();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

#[test]
fn slab_response_matches_core() {
    let mut out = NcqSlabResponse::default();
    assert_eq!(unsafe { ncq_slab_rt(7.0, 6e-3, 526.0, &mut out) }, NcqStatus::Ok);
    let core = ncq::tmm::slab_rt(7.0, 6e-3, 526.0);
    assert_eq!(out.reflectance, core.reflectance());
    assert_eq!(out.phase_difference_deg, core.phase_difference_deg());
    assert_eq!((out.r_re, out.r_im), (core.r.re, core.r.im));
}

#[test]
fn errors_carry_codes_and_messages() {
    assert_eq!(unsafe { ncq_slab_rt(7.0, 6e-3, 526.0, ptr::null_mut()) }, NcqStatus::NullPointer);
    assert!(last_error().contains("null"));
    let mut out = NcqSlabResponse::default();
    assert_eq!(unsafe { ncq_slab_rt(-1.0, 6e-3, 526.0, &mut out) }, NcqStatus::InvalidArgument);

    let mut basis: *mut NcqModeBasis = ptr::null_mut();
    // 500 points put the slab faces between nodes
    let status = unsafe { ncq_modes_solve(NCQ_METHOD_FEM, 3.0, 500, 20.0, 0.3, 1.0, &mut basis) };
    assert_eq!(status, NcqStatus::InvalidArgument);
    assert!(basis.is_null());
    assert!(last_error().contains("mesh node"));
    let status = unsafe { ncq_modes_solve(7, 3.0, 501, 20.0, 0.3, 1.0, &mut basis) };
    assert_eq!(status, NcqStatus::InvalidArgument);
    assert!(last_error().contains("method"));
}

#[test]
fn mode_handle_round_trip() {
    let mut basis: *mut NcqModeBasis = ptr::null_mut();
    let status = unsafe { ncq_modes_solve(NCQ_METHOD_FEM, 3.0, 201, 20.0, 0.3, 0.5, &mut basis) };
    assert_eq!(status, NcqStatus::Ok);
    let n = unsafe { ncq_modes_count(basis) };
    assert_eq!(n, 200);
    assert_eq!(unsafe { ncq_modes_dim(basis) }, 200);
    let mut omega = vec![0.0; n];
    assert_eq!(unsafe { ncq_modes_omega(basis, omega.as_mut_ptr(), n) }, NcqStatus::Ok);
    assert!(omega.windows(2).all(|w| w[0] <= w[1]));
    let mut band = 0.0;
    assert_eq!(unsafe { ncq_band_frequency(20.0, 0.3, 3.0, 0.5 / 3.0, 0, &mut band) }, NcqStatus::Ok);
    assert!((omega[0] - band).abs() < 1e-2 * band, "{} {}", omega[0], band);
    let (mut re, mut im) = (vec![0.0; 200], vec![0.0; 200]);
    assert_eq!(unsafe { ncq_modes_vector(basis, 3, re.as_mut_ptr(), im.as_mut_ptr(), 200) }, NcqStatus::Ok);
    assert!(re.iter().chain(&im).any(|v| *v != 0.0));
    assert_eq!(unsafe { ncq_modes_vector(basis, 200, re.as_mut_ptr(), im.as_mut_ptr(), 200) }, NcqStatus::InvalidState);
    let (mut off, mut diag) = (1.0, 1.0);
    assert_eq!(unsafe { ncq_modes_orthonormality(basis, &mut off, &mut diag) }, NcqStatus::Ok);
    assert!(off < 1e-10 && diag < 1e-10);
    unsafe { ncq_modes_free(basis) };
    unsafe { ncq_modes_free(ptr::null_mut()) };
    assert_eq!(unsafe { ncq_modes_count(ptr::null()) }, 0);
}

#[test]
fn hom_curve_on_small_cell() {
    let mut params = std::mem::MaybeUninit::<NcqHomParams>::uninit();
    assert_eq!(unsafe { ncq_hom_params_default(params.as_mut_ptr()) }, NcqStatus::Ok);
    let mut params = unsafe { params.assume_init() };
    params.rx = 0.6;
    params.n0 = 1001;
    params.x0 = 0.15;
    params.dx0 = 0.02;
    let c = ncq::PhysicalConstants::CODATA.c();
    let tau: Vec<f64> = [-0.1, -0.08, 0.0, 0.08, 0.1].iter().map(|d| d / c).collect();

    let mut curve: *mut NcqHomCurve = ptr::null_mut();
    assert_eq!(unsafe { ncq_hom_run(&params, tau.as_ptr(), tau.len(), &mut curve) }, NcqStatus::Ok);
    assert_eq!(unsafe { ncq_hom_curve_len(curve) }, 5);
    let mut summary = NcqHomSummary::default();
    assert_eq!(unsafe { ncq_hom_curve_summary(curve, &mut summary) }, NcqStatus::Ok);
    assert!(summary.visibility > 0.9, "{summary:?}");
    let (mut t, mut g) = (vec![0.0; 5], vec![0.0; 5]);
    assert_eq!(unsafe { ncq_hom_curve_points(curve, t.as_mut_ptr(), g.as_mut_ptr(), 5) }, NcqStatus::Ok);
    assert_eq!(t, tau);
    assert_eq!(g[2], summary.dip);

    // the same sweep on a separately solved basis
    let mut basis: *mut NcqModeBasis = ptr::null_mut();
    let status = unsafe { ncq_modes_solve(NCQ_METHOD_FEM, 0.6, 1001, 7.0, 6e-3, params.theta0, &mut basis) };
    assert_eq!(status, NcqStatus::Ok);
    let mut again: *mut NcqHomCurve = ptr::null_mut();
    let status = unsafe { ncq_hom_run_with_basis(basis, &params, tau.as_ptr(), tau.len(), &mut again) };
    assert_eq!(status, NcqStatus::Ok);
    let mut g2 = vec![0.0; 5];
    assert_eq!(unsafe { ncq_hom_curve_points(again, t.as_mut_ptr(), g2.as_mut_ptr(), 5) }, NcqStatus::Ok);
    assert_eq!(g, g2);

    params.left_shape = 9;
    let mut bad: *mut NcqHomCurve = ptr::null_mut();
    assert_eq!(unsafe { ncq_hom_run_with_basis(basis, &params, tau.as_ptr(), tau.len(), &mut bad) }, NcqStatus::InvalidArgument);
    assert!(bad.is_null());

    unsafe {
        ncq_hom_curve_free(curve);
        ncq_hom_curve_free(again);
        ncq_modes_free(basis);
    }
}

#[test]
fn header_declares_the_exports() {
    let header = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/include/ncq.h")).unwrap();
    for name in [
        "ncq_version",
        "ncq_last_error_message",
        "ncq_slab_rt",
        "ncq_band_frequency",
        "ncq_modes_solve",
        "ncq_modes_free",
        "ncq_modes_omega",
        "ncq_hom_run",
        "ncq_hom_run_with_basis",
        "ncq_hom_curve_summary",
        "ncq_hom_curve_free",
        "NCQ_STATUS_BUFFER_TOO_SMALL",
        "typedef struct NcqModeBasis NcqModeBasis",
    ] {
        assert!(header.contains(name), "{name}");
    }
}

/// Compiles the C smoke program against the generated header and the shared library.
#[test]
fn c_program_links_and_runs() {
    let Ok(cc) = Command::new("cc").arg("--version").output() else {
        eprintln!("no C compiler; skipping");
        return;
    };
    assert!(cc.status.success());
    let manifest = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    // target/<profile>/deps/<this test> -> target/<profile>
    let lib_dir = std::env::current_exe().unwrap().parent().unwrap().parent().unwrap().to_path_buf();
    let so = lib_dir.join("libncq_ffi.so");
    if !so.exists() {
        eprintln!("{} not built; skipping", so.display());
        return;
    }
    let exe = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("ncq_smoke");
    let status = Command::new("cc")
        .arg(manifest.join("tests/c/smoke.c"))
        .arg("-I")
        .arg(manifest.join("include"))
        .arg("-L")
        .arg(&lib_dir)
        .args(["-lncq_ffi", "-lm", "-o"])
        .arg(&exe)
        .status()
        .unwrap();
    assert!(status.success());
    let out = Command::new(&exe).env("LD_LIBRARY_PATH", &lib_dir).output().unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(String::from_utf8_lossy(&out.stdout).starts_with("ncq 0.1.0 ok"));
}
