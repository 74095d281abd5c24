use std::fs;
use std::path::Path;
use std::process::{Command, Output};

const SMALL: &str = r#"
[medium]
rx = 3.0
n0 = 201
eps_s = 20.0
rs = 0.3

[dispersion]
theta0_count = 8
bands = 3

[validate]
ladder_cases = 100
closed_form_cases = 20
"#;

fn ncq(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ncq")).current_dir(dir).args(args).output().unwrap()
}

fn write_config(dir: &Path, name: &str, body: &str) -> String {
    let path = dir.join(name);
    fs::write(&path, body).unwrap();
    path.to_string_lossy().into_owned()
}

fn data_lines(path: &Path) -> Vec<String> {
    fs::read_to_string(path).unwrap().lines().filter(|l| !l.starts_with('#')).map(str::to_owned).collect()
}

#[test]
fn design_scan_writes_csv_and_script() {
    let tmp = tempfile::tempdir().unwrap();
    let out = ncq(tmp.path(), &["--out", "run", "design"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let rows = data_lines(&tmp.path().join("run/design.csv"));
    assert_eq!(rows[0], "kappa,R2,T2,phase_diff_deg");
    assert_eq!(rows.len(), 902);
    assert!(tmp.path().join("run/plot_design.py").exists());
}

#[test]
fn outputs_are_reproducible_without_timestamp() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "small.toml", SMALL);
    for dir in ["a", "b"] {
        let out = ncq(tmp.path(), &["--config", &cfg, "--out", dir, "--no-timestamp", "modes"]);
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    }
    let a = fs::read(tmp.path().join("a/modes.csv")).unwrap();
    let b = fs::read(tmp.path().join("b/modes.csv")).unwrap();
    assert_eq!(a, b);
    assert!(!String::from_utf8_lossy(&a).starts_with('#'));
}

#[test]
fn timestamp_header_is_written_by_default() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "small.toml", SMALL);
    let out = ncq(tmp.path(), &["--config", &cfg, "--out", "o", "--method", "fdm", "modes"]);
    assert!(out.status.success());
    let text = fs::read_to_string(tmp.path().join("o/modes.csv")).unwrap();
    assert!(text.starts_with("# generated_unix_s="));
    let ortho = data_lines(&tmp.path().join("o/orthonormality.csv"));
    let worst: f64 = ortho[1].split(',').map(|v| v.parse::<f64>().unwrap()).fold(0.0, f64::max);
    assert!(worst < 1e-10);
}

#[test]
fn dispersion_writes_numeric_and_analytic_bands() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "small.toml", SMALL);
    let out = ncq(tmp.path(), &["--config", &cfg, "--out", "o", "dispersion"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(data_lines(&tmp.path().join("o/dispersion_numeric.csv")).len() > 8);
    assert!(data_lines(&tmp.path().join("o/dispersion_tmm.csv")).len() > 8);
}

#[test]
fn validate_passes_on_thick_slab() {
    let tmp = tempfile::tempdir().unwrap();
    // 201 nodes are too coarse for the 1% band agreement; the shipped 501-node system is not
    let cfg = write_config(tmp.path(), "thick.toml", &SMALL.replace("n0 = 201", "n0 = 501"));
    let out = ncq(tmp.path(), &["--config", &cfg, "--out", "o", "validate"]);
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(out.status.success(), "{stdout}");
    assert!(stdout.lines().all(|l| !l.starts_with("FAIL")));
    assert!(tmp.path().join("o/validate.txt").exists());
}

#[test]
fn corrupted_mode_column_fails_validation() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "bad.toml", &format!("{SMALL}corrupt_column = 3\n"));
    let out = ncq(tmp.path(), &["--config", &cfg, "--out", "o", "validate"]);
    assert_eq!(out.status.code(), Some(1));
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.lines().any(|l| l.starts_with("FAIL") && l.contains("diagonal")));
}

#[test]
fn malformed_config_exits_two_without_output() {
    let tmp = tempfile::tempdir().unwrap();
    for (name, body) in [
        ("syntax.toml", "[medium\nrx = 1"),
        ("unknown.toml", "[medium]\nwidth = 3.0\n"),
        ("mesh.toml", "[medium]\nn0 = 1\n"),
        ("slab.toml", "[medium]\nrs = 4.0\n"),
    ] {
        let cfg = write_config(tmp.path(), name, body);
        let out = ncq(tmp.path(), &["--config", &cfg, "--out", "o", "design"]);
        assert_eq!(out.status.code(), Some(2), "{name}");
        assert!(!String::from_utf8_lossy(&out.stderr).is_empty());
        assert!(!tmp.path().join("o").exists(), "{name}");
    }
}

#[test]
fn misaligned_slab_is_rejected_for_fem() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "mis.toml", "[medium]\nrx = 3.0\nn0 = 500\neps_s = 20.0\nrs = 0.3\n");
    let out = ncq(tmp.path(), &["--config", &cfg, "--out", "o", "--method", "fem", "modes"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn homogeneous_modes_follow_the_light_line() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "vac.toml", "[medium]\nrx = 1.0\nn0 = 101\neps_s = 1.0\nrs = 0.1\n");
    for method in ["fdm", "fem"] {
        let out = ncq(tmp.path(), &["--config", &cfg, "--out", method, "--method", method, "--no-timestamp", "modes"]);
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        let rows = data_lines(&tmp.path().join(method).join("modes.csv"));
        let c = 299_792_458.0;
        let dx = 1.0 / 100.0;
        for row in &rows[1..11] {
            let v: Vec<f64> = row.split(',').map(|s| s.parse().unwrap()).collect();
            let (kappa, omega) = (v[1], v[2]);
            let rel = (omega / (c * kappa.abs()) - 1.0).abs();
            assert!(rel <= (kappa * dx).powi(2) / 12.0, "{method} kappa {kappa}: {rel:e}");
        }
    }
}
