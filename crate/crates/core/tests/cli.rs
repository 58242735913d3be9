use std::path::Path;
use std::process::{Command, Output};

fn focuswave(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_focuswave"))
        .args(args)
        .arg("--out")
        .arg(out)
        .output()
        .expect("binary runs")
}

fn text(o: &Output) -> String {
    format!("{}{}", String::from_utf8_lossy(&o.stdout), String::from_utf8_lossy(&o.stderr))
}

fn json(path: &Path) -> serde_json::Value {
    serde_json::from_slice(&std::fs::read(path).unwrap()).unwrap()
}

#[test]
fn eval_writes_slice_and_metadata() {
    let dir = tempfile::tempdir().unwrap();
    let o = focuswave(&["eval"], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", text(&o));
    let mut names: Vec<String> = std::fs::read_dir(dir.path())
        .unwrap()
        .map(|e| e.unwrap().file_name().to_string_lossy().into_owned())
        .collect();
    names.sort();
    assert_eq!(names, ["eval.fwslice", "eval.json"]);
    let slice = focuswave::dynamics::io::read_slice(&dir.path().join("eval.fwslice")).unwrap();
    assert_eq!(slice.grid.shape(), vec![64, 64]);
    let meta = json(&dir.path().join("eval.json"));
    assert_eq!(meta["provenance"]["config_hash"].as_str().unwrap().len(), 64);
    assert!((meta["max_abs"].as_f64().unwrap() - slice.max_abs()).abs() < 1e-15);
}

#[test]
fn zero_epsilon_is_a_configuration_error() {
    let dir = tempfile::tempdir().unwrap();
    let o = focuswave(&["eval", "--epsilon", "0"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(text(&o).contains("epsilon"));
}

#[test]
fn all_violations_are_listed_together() {
    let dir = tempfile::tempdir().unwrap();
    let o = focuswave(&["propagate", "--steps", "0", "--dt", "-1", "--initial", "nope"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    let t = text(&o);
    for key in ["steps", "dt", "initial"] {
        assert!(t.contains(key), "{key} missing from: {t}");
    }
}

#[test]
fn config_file_is_overridden_by_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    std::fs::write(&cfg, "[quantization]\ndim = 4\nsigma = 1.0\nmass = 1.0\namplitude = 2.0\n").unwrap();
    let out = dir.path().join("out");
    let o = focuswave(&["constrain", "--config", cfg.to_str().unwrap(), "--amplitude", "1.6487212707001282"], &out);
    assert_eq!(o.status.code(), Some(0), "{}", text(&o));
    let r = json(&out.join("constraint.json"));
    assert_eq!(r["kind"], "d4");
    assert!(r["residual"].as_f64().unwrap() < 1e-10);
}

#[test]
fn unknown_config_key_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    std::fs::write(&cfg, "epsilon = 0.5\nepsilnon = 1\n").unwrap();
    let o = focuswave(&["eval", "--config", cfg.to_str().unwrap()], dir.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(text(&o).contains("epsilnon"));
}

#[test]
fn constrain_cases() {
    let dir = tempfile::tempdir().unwrap();
    let o = focuswave(&["constrain", "--dim", "2", "--sigma", "1", "--amplitude", "1"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    let r = json(&dir.path().join("constraint.json"));
    assert!((r["value"].as_f64().unwrap() - 1.0).abs() < 1e-6);
    assert_eq!(r["passed"], true);

    let o = focuswave(&["constrain", "--dim", "4", "--sigma", "1", "--mass", "1", "--solve"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    let a: f64 = text(&o)
        .lines()
        .find_map(|l| l.strip_prefix("A = "))
        .expect("amplitude printed")
        .trim()
        .parse()
        .unwrap();
    assert!((a - 0.5f64.exp()).abs() < 1e-15);

    let o = focuswave(&["constrain", "--dim", "4", "--fock"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    let r = json(&dir.path().join("constraint.json"));
    assert!((r["value"].as_f64().unwrap() - 1.0).abs() < 1e-3);

    let o = focuswave(&["constrain", "--dim", "2", "--amplitude", "2"], dir.path());
    assert_eq!(o.status.code(), Some(1), "unsatisfied constraint is a check failure");

    let o = focuswave(&["constrain", "--dim", "2", "--mass", "1"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(text(&o).contains("unsupported"));
}

#[test]
fn fock_guard_is_a_resource_error() {
    let dir = tempfile::tempdir().unwrap();
    let o = focuswave(
        &["constrain", "--fock", "--modes", "601", "--n-max", "2", "--volume", "10"],
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(3), "{}", text(&o));
}

#[test]
fn residual_suite_with_negative_control() {
    let dir = tempfile::tempdir().unwrap();
    let o = focuswave(&["verify", "residual", "--negative-control"], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", text(&o));
    assert!(text(&o).contains("ExpectedFail"));
    let r = json(&dir.path().join("verify_residual.json"));
    let statuses: Vec<&str> = r["checks"].as_array().unwrap().iter().map(|c| c["status"].as_str().unwrap()).collect();
    assert_eq!(statuses, ["PASS", "EXPECTED-FAIL"]);
    let order = r["checks"][0]["value"].as_f64().unwrap();
    assert!((order - 2.0).abs() < 0.2);
}

#[test]
fn unknown_suite_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let o = focuswave(&["verify", "everything"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    let o = focuswave(&["verify"], dir.path());
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn propagate_plane_wave_conserves_energy() {
    let dir = tempfile::tempdir().unwrap();
    let o = focuswave(
        &["propagate", "--initial", "plane_wave", "--steps", "100", "--dt", "0.05", "--save-every", "25"],
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(0), "{}", text(&o));
    let r = json(&dir.path().join("propagate.json"));
    assert!(r["energy_drift"].as_f64().unwrap() < 1e-10);
    let energy = std::fs::read_to_string(dir.path().join("energy.csv")).unwrap();
    assert!(energy.starts_with("# focuswave"));
    assert_eq!(energy.lines().filter(|l| !l.starts_with('#')).count(), 1 + 101);
    assert!(dir.path().join("frame_0004.fwslice").exists());
}

#[test]
fn propagate_zero_steps_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let o = focuswave(&["propagate", "--steps", "0"], dir.path());
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn small_box_warns_but_succeeds() {
    let dir = tempfile::tempdir().unwrap();
    let o = focuswave(
        &["propagate", "--points", "16", "--extent", "4", "--steps", "1", "--dt", "0.1"],
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(0), "{}", text(&o));
    let r = json(&dir.path().join("propagate.json"));
    assert!(!r["warnings"].as_array().unwrap().is_empty());
}

#[test]
fn thread_count_does_not_change_results() {
    let dir = tempfile::tempdir().unwrap();
    let mut payloads = Vec::new();
    for threads in ["1", "3"] {
        let out = dir.path().join(threads);
        let o = Command::new(env!("CARGO_BIN_EXE_focuswave"))
            .args(["eval", "--points", "24", "--out"])
            .arg(&out)
            .env("FOCUSWAVE_THREADS", threads)
            .output()
            .unwrap();
        assert_eq!(o.status.code(), Some(0));
        payloads.push(std::fs::read(out.join("eval.fwslice")).unwrap());
    }
    assert_eq!(payloads[0], payloads[1]);
    let o = Command::new(env!("CARGO_BIN_EXE_focuswave"))
        .args(["eval", "--out"])
        .arg(dir.path())
        .env("FOCUSWAVE_THREADS", "0")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn spectrum_table_matches_library() {
    let dir = tempfile::tempdir().unwrap();
    let o = focuswave(
        &["spectrum", "--k-plus-min", "-1", "--k-plus-max", "1", "--k-plus-count", "3", "--mass", "0.5"],
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(0), "{}", text(&o));
    let r = json(&dir.path().join("spectrum.json"));
    assert_eq!(r["skipped"], serde_json::json!([0.0]));
    let env = focuswave::Envelope::gaussian(1.0).unwrap();
    let expected = focuswave::spectral::massless_fourier_coefficient(&env, 1.0).unwrap();
    let got = &r["massless"][1];
    assert!((got[0].as_f64().unwrap() - expected.re).abs() < 1e-15);
    assert!((got[1].as_f64().unwrap() - expected.im).abs() < 1e-15);
    let csv = std::fs::read_to_string(dir.path().join("spectrum.csv")).unwrap();
    let mut reader = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(csv.as_bytes());
    assert_eq!(reader.records().count(), 2);
}

#[test]
fn help_lists_every_subcommand() {
    let o = Command::new(env!("CARGO_BIN_EXE_focuswave")).arg("--help").output().unwrap();
    assert_eq!(o.status.code(), Some(0));
    let t = text(&o);
    for sub in ["eval", "propagate", "verify", "constrain", "spectrum"] {
        assert!(t.contains(sub));
    }
}
