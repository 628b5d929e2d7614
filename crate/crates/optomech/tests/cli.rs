use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::{json, Value};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_optomech"))
}

fn write_config(dir: &Path, name: &str, cfg: &Value) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, serde_json::to_vec_pretty(cfg).unwrap()).unwrap();
    p
}

fn run(cmd: &str, cfg: &Path) -> Output {
    bin().arg(cmd).arg(cfg).env_remove("OPTOMECH_THREADS").output().unwrap()
}

fn toy(out: &Path) -> Value {
    json!({
        "scheme": "toy_dichromatic",
        "oscillator": {"normalized": {"omega_m": 1000.0, "gamma_m": 1.0, "n_thermal": 2.0}},
        "probe": {"kappa": 4.0e6},
        "grid": {"min": 0.0, "max": 1.0e4, "points": 41},
        "seed": 3,
        "output": {"dir": out, "format": "csv"}
    })
}

fn read_csv(p: &Path) -> (Vec<String>, Vec<Vec<f64>>) {
    let text = std::fs::read_to_string(p).unwrap();
    let mut lines = text.lines();
    let header = lines.next().unwrap().split(',').map(String::from).collect();
    let rows = lines.map(|l| l.split(',').map(|c| c.parse().unwrap()).collect()).collect();
    (header, rows)
}

fn diagnostic(o: &Output) -> Value {
    serde_json::from_slice(&o.stderr).expect("stderr is a JSON diagnostic")
}

#[test]
fn toy_spectrum_has_no_backaction() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let o = run("spectrum", &write_config(dir.path(), "c.json", &toy(&out)));
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let (header, rows) = read_csv(&out.join("spectrum.csv"));
    assert_eq!(header[0], "omega[rad/s]");
    assert_eq!(header[1], "omega/gamma[1]");
    assert_eq!(rows.len(), 41);
    for r in &rows {
        assert!(r[4].abs() <= 1e-24 * r[2], "backaction {} vs total {}", r[4], r[2]);
        let parts = r[3] + r[4] + r[5];
        assert!((parts / r[2] - 1.0).abs() < 1e-12);
    }
    let env: Value = serde_json::from_slice(&std::fs::read(out.join("spectrum.json")).unwrap()).unwrap();
    assert_eq!(env["command"], "spectrum");
    assert_eq!(env["tables"][0]["file"], "spectrum.csv");
    assert_eq!(env["normalized"]["kappa"], 4.0e6);
}

#[test]
fn phase_readout_touches_sql_and_sweep_finds_optimum() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    // |Z(0.5)| = 0.75 at wM = 1
    let cfg = json!({
        "scheme": "monochromatic",
        "oscillator": {"normalized": {"omega_m": 1.0, "gamma_m": 0.0, "n_thermal": 0.0}},
        "probe": {"kappa": 0.75},
        "homodyne": "phase",
        "grid": {"min": 0.5, "max": 0.5, "points": 1},
        "seed": 0,
        "output": {"dir": out, "format": "json"},
        "sweep": {"variable": "kappa", "min": 0.01, "max": 2.0, "points": 200, "scale": "linear", "omega_f0": 0.5}
    });
    let p = write_config(dir.path(), "c.json", &cfg);
    assert!(run("spectrum", &p).status.success());
    let env: Value = serde_json::from_slice(&std::fs::read(out.join("spectrum.json")).unwrap()).unwrap();
    let row = &env["tables"][0]["rows"][0];
    let total = row[2].as_f64().unwrap();
    assert!((total / 0.75 - 1.0).abs() < 1e-12, "{total}");
    assert!((row[6].as_f64().unwrap() / 0.75 - 1.0).abs() < 1e-12);

    assert!(run("sweep", &p).status.success());
    let env: Value = serde_json::from_slice(&std::fs::read(out.join("sweep.json")).unwrap()).unwrap();
    let step = (2.0 - 0.01) / 199.0;
    let best = env["summary"]["argmin_value"].as_f64().unwrap();
    assert!((best - 0.75).abs() <= step, "{best}");
    assert_eq!(env["summary"]["kappa_star"], 0.75);
}

#[test]
fn evading_kappa_sweep_decreases_strictly() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let mut cfg = toy(&out);
    cfg["oscillator"]["normalized"]["gamma_m"] = json!(0.0);
    cfg["grid"] = json!({"min": 1.0, "max": 2.0, "points": 2});
    cfg["sweep"] = json!({"variable": "kappa", "min": 1.0, "max": 1.0e8, "points": 50, "scale": "log", "omega_f0": 5.0});
    let o = run("sweep", &write_config(dir.path(), "c.json", &cfg));
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let (_, rows) = read_csv(&out.join("sweep.csv"));
    assert_eq!(rows.len(), 50);
    assert!(rows.windows(2).all(|w| w[1][2] < w[0][2]));
}

#[test]
fn single_point_sweep_matches_spectrum() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let mut cfg = toy(&out);
    cfg["grid"] = json!({"min": 30.0, "max": 30.0, "points": 1});
    cfg["sweep"] = json!({"variable": "kappa", "min": 4.0e6, "max": 4.0e6, "points": 1, "scale": "linear", "omega_f0": 30.0});
    let p = write_config(dir.path(), "c.json", &cfg);
    assert!(run("spectrum", &p).status.success());
    assert!(run("sweep", &p).status.success());
    let (_, s) = read_csv(&out.join("spectrum.csv"));
    let (_, w) = read_csv(&out.join("sweep.csv"));
    assert_eq!(w.len(), 1);
    assert_eq!(s[0][2], w[0][2]);
}

#[test]
fn reruns_are_byte_identical_across_thread_counts() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let mut cfg = toy(&out);
    cfg["probe"] = json!({"kappa": 2.0e5});
    cfg["oracle"] = json!({
        "dt": 0.05, "duration": 1000.0, "burn_in": 10.0, "trajectories": 4,
        "welch": {"segment_len": 512, "overlap": 0.5, "window": "hann"},
        "band": [0.0, 10.0]
    });
    let p = write_config(dir.path(), "c.json", &cfg);
    let snapshot = || -> Vec<(String, Vec<u8>)> {
        let mut files: Vec<_> = std::fs::read_dir(&out)
            .unwrap()
            .map(|e| {
                let e = e.unwrap();
                (e.file_name().into_string().unwrap(), std::fs::read(e.path()).unwrap())
            })
            .collect();
        files.sort();
        files
    };
    assert!(run("oracle", &p).status.success());
    let first = snapshot();
    assert!(run("oracle", &p).status.success());
    assert_eq!(first, snapshot());
    let o = bin().arg("oracle").arg(&p).env("OPTOMECH_THREADS", "1").output().unwrap();
    assert!(o.status.success());
    assert_eq!(first, snapshot());
}

#[test]
fn empty_grid_is_a_validation_error_without_output() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let mut cfg = toy(&out);
    cfg["grid"]["points"] = json!(0);
    let o = run("spectrum", &write_config(dir.path(), "c.json", &cfg));
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(diagnostic(&o)["path"], "grid");
    assert!(!out.exists());
}

#[test]
fn missing_physical_field_reports_its_path() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = toy(&dir.path().join("out"));
    cfg["oscillator"]["normalized"].as_object_mut().unwrap().remove("n_thermal");
    let o = run("validate", &write_config(dir.path(), "c.json", &cfg));
    assert_eq!(o.status.code(), Some(2));
    let d = diagnostic(&o);
    assert_eq!(d["kind"], "validation");
    assert_eq!(d["path"], "oscillator.normalized");
    assert!(d["message"].as_str().unwrap().contains("n_thermal"));
}

#[test]
fn unknown_key_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = toy(&dir.path().join("out"));
    cfg["grid"]["spacing"] = json!("log");
    let o = run("validate", &write_config(dir.path(), "c.json", &cfg));
    assert_eq!(o.status.code(), Some(2));
    assert!(diagnostic(&o)["message"].as_str().unwrap().contains("spacing"));
}

#[test]
fn zero_trajectories_is_a_validation_error() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = toy(&dir.path().join("out"));
    cfg["oracle"] = json!({
        "dt": 0.05, "duration": 1000.0, "burn_in": 10.0, "trajectories": 0,
        "welch": {"segment_len": 512, "overlap": 0.5, "window": "hann"},
        "band": [0.0, 10.0]
    });
    let o = run("oracle", &write_config(dir.path(), "c.json", &cfg));
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(diagnostic(&o)["path"], "oracle");
}

#[test]
fn undamped_pole_is_a_numeric_error_naming_the_frequency() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = toy(&dir.path().join("out"));
    cfg["oscillator"]["normalized"]["gamma_m"] = json!(0.0);
    let o = run("spectrum", &write_config(dir.path(), "c.json", &cfg));
    assert_eq!(o.status.code(), Some(3));
    assert!(diagnostic(&o)["message"].as_str().unwrap().contains("Omega = 0"));
}

#[test]
fn unwritable_output_is_an_io_error() {
    let dir = tempfile::tempdir().unwrap();
    let blocker = dir.path().join("file");
    std::fs::write(&blocker, b"x").unwrap();
    let o = run("spectrum", &write_config(dir.path(), "c.json", &toy(&blocker.join("out"))));
    assert_eq!(o.status.code(), Some(4));
}

#[test]
fn bad_thread_override_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let p = write_config(dir.path(), "c.json", &toy(&dir.path().join("out")));
    let o = bin().arg("validate").arg(&p).env("OPTOMECH_THREADS", "0").output().unwrap();
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn detect_flags_unbracketed_threshold_and_scales_with_tau() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let mut cfg = toy(&out);
    cfg["probe"] = json!({"kappa": 2.0e5});
    cfg["output"]["format"] = json!("json");
    cfg["detect"] = json!({
        "omega_f0": 2.0, "phase": 0.0, "tau": [50.0, 100.0],
        "amplitudes": [5.0, 10.0], "trials": 50,
        "dt": 0.05, "burn_in": 5.0, "snr": 1.0
    });
    let o = run("detect", &write_config(dir.path(), "c.json", &cfg));
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let env: Value = serde_json::from_slice(&std::fs::read(out.join("detect.json")).unwrap()).unwrap();
    assert_eq!(env["summary"]["threshold_not_bracketed"], true);
    assert!(env["warnings"][0].as_str().unwrap().contains("threshold not bracketed"));
    let rows = env["tables"][0]["rows"].as_array().unwrap();
    let a = |i: usize| rows[i][3].as_f64().unwrap();
    assert!((a(1) / a(0) - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-12);
    assert!(rows[0][4].is_null());
}
