use std::fs;
use std::path::Path;
use std::process::{Command, Output};

const QM_CONFIG: &str = r#"
kind = "quadratic_mean"
process = "wiener"
function = "exp:1"
replicas = 500
intervals = 512
"#;

fn rfj(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rfj"))
        .args(args)
        .output()
        .expect("rfj runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn write_config(dir: &Path, text: &str) -> String {
    let path = dir.join("config.toml");
    fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn quadratic_mean_run_writes_one_row_per_order() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), QM_CONFIG);
    let out = dir.path().join("out");
    let o = rfj(&["run", "--config", &cfg, "--out", out.to_str().unwrap()]);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    let csv = fs::read_to_string(out.join("report.csv")).unwrap();
    let keys: Vec<&str> = csv
        .lines()
        .skip(1)
        .map(|l| l.split(',').next().unwrap())
        .collect();
    assert_eq!(keys, ["2", "4", "8", "16", "32"]);
    let json = fs::read_to_string(out.join("report.json")).unwrap();
    assert!(json.contains("\"provenance\""));
    assert!(json.contains("\"schema_version\""));
}

#[test]
fn negative_eta_is_a_validation_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), QM_CONFIG);
    let out = dir.path().join("out");
    let o = rfj(&[
        "run",
        "--config",
        &cfg,
        "--set",
        "eta=-0.5",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("eta"));
    assert!(!out.join("report.csv").exists());
}

#[test]
fn unknown_key_is_a_validation_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), QM_CONFIG);
    let o = rfj(&["run", "--config", &cfg, "--set", "colour=3"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("colour"));
}

#[test]
fn reruns_and_replays_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), QM_CONFIG);
    let runs = ["a", "b", "c"].map(|name| dir.path().join(name));
    for (out, workers) in runs[..2].iter().zip(["1", "2"]) {
        let o = rfj(&[
            "run",
            "--config",
            &cfg,
            "--seed",
            "7",
            "--workers",
            workers,
            "--out",
            out.to_str().unwrap(),
        ]);
        assert_eq!(o.status.code(), Some(0));
    }
    let replay_from = runs[0].join("report.json");
    let o = rfj(&[
        "run",
        "--config",
        replay_from.to_str().unwrap(),
        "--out",
        runs[2].to_str().unwrap(),
    ]);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    for file in ["report.csv", "report.json"] {
        let first = fs::read(runs[0].join(file)).unwrap();
        for other in &runs[1..] {
            assert_eq!(first, fs::read(other.join(file)).unwrap(), "{file} differs");
        }
    }
}

#[test]
fn seven_presets() {
    let o = rfj(&["presets"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert_eq!(text.lines().count(), 7);
    assert!(text.contains("remark-b-stable-in-probability"));
    assert!(text.contains("remark-f-wiener-almost-sure"));
}

#[test]
fn unknown_preset_fails_validation() {
    let o = rfj(&["run", "--preset", "no-such-preset"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn check_examples() {
    let o = rfj(&[
        "check", "--gamma", "0", "--delta", "0", "--eta", "0", "--tau", "0", "--p", "2", "--alpha",
        "2",
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).ends_with("satisfied, margin 0.25\n"));

    let o = rfj(&["check", "--alpha", "1", "--gamma", "1", "--eta", "2"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).ends_with("violated, margin -1\n"));

    let o = rfj(&["check", "--gamma", "-1.5"]);
    assert_eq!(o.status.code(), Some(2));

    let o = rfj(&[
        "check",
        "--process",
        "wiener",
        "--gamma",
        "0.5",
        "--delta",
        "0.5",
        "--eta",
        "0.25",
        "--tau",
        "0.25",
    ]);
    assert!(stdout(&o).ends_with("satisfied, margin 0.25\n"));
}
