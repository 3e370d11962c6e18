use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use headpred::load_trace;

fn headpred(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_headpred")).args(args).output().unwrap()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

const PROFILE: &str = r#"
duration = 8.0
rate_hz = 200
noise_sigma_pos = 0.001
noise_sigma_rot = 0.1
seed = 9

[motion]
kind = "sinusoidal_yaw"
amplitude_deg = 30
frequency_hz = 0.5
velocity = [0.5, 0.0, 0.0]
"#;

fn synth_trace(dir: &Path, name: &str) -> std::path::PathBuf {
    let profile = dir.join(format!("{name}.toml"));
    fs::write(&profile, PROFILE).unwrap();
    let out = dir.join(format!("{name}.csv"));
    let o = headpred(&["synth", "--profile", path(&profile), "--out", path(&out)]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    out
}

fn rows(csv: &Path) -> Vec<Vec<String>> {
    fs::read_to_string(csv)
        .unwrap()
        .lines()
        .skip(1)
        .map(|l| l.split(',').map(String::from).collect())
        .collect()
}

#[test]
fn synth_then_stats() {
    let dir = tempfile::tempdir().unwrap();
    let csv = synth_trace(dir.path(), "yaw");
    let trace = load_trace(&csv).unwrap();
    assert_eq!(trace.len(), 1601);
    assert_eq!(trace.sample_rate_hz(), Some(200.0));
    assert!(fs::read_to_string(&csv).unwrap().starts_with("timestamp,x,y,z,qw,qx,qy,qz\n"));

    let o = headpred(&["stats", "--trace", path(&csv)]);
    assert!(o.status.success());
    let text = String::from_utf8(o.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 7);
    // x moves at a constant 0.5 m/s, so its mean velocity is 0.5
    let x: Vec<f64> = lines[1].split(',').skip(1).map(|v| v.parse().unwrap()).collect();
    assert!((x[0] - 0.5).abs() < 0.01, "{}", lines[1]);
    assert!(lines[4].starts_with("yaw,"));
}

#[test]
fn eval_one_trace_one_predictor() {
    let dir = tempfile::tempdir().unwrap();
    let trace = synth_trace(dir.path(), "yaw");
    let cfg = dir.path().join("eval.toml");
    fs::write(&cfg, "traces = [\"yaw.csv\"]\npredictors = [\"kalman\"]\n").unwrap();
    let out = dir.path().join("out");
    let o = headpred(&["eval", "--config", path(&cfg), "--out", path(&out)]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));

    let summary = rows(&out.join("summary.csv"));
    assert_eq!(summary.len(), 5);
    assert_eq!(summary.iter().map(|r| r[1].as_str()).collect::<Vec<_>>(), ["20", "40", "60", "80", "100"]);
    assert!(rows(&out.join("ttests.csv")).is_empty());

    let per_trace = rows(&out.join("per_trace.csv"));
    assert_eq!(per_trace.len(), 5);
    for (s, p) in summary.iter().zip(&per_trace) {
        assert_eq!(p[0], "yaw");
        let (a, b): (f64, f64) = (s[2].parse().unwrap(), p[3].parse().unwrap());
        assert!((a - b).abs() <= 1e-12);
    }

    let n = load_trace(&trace).unwrap().len();
    let errors = rows(&out.join("errors_lat60_kalman.csv"));
    assert_eq!(errors.len(), n - 400 - 12);
    assert_eq!(errors[0][1], "412");
}

#[test]
fn eval_overrides_and_pairs() {
    let dir = tempfile::tempdir().unwrap();
    synth_trace(dir.path(), "a");
    synth_trace(dir.path(), "b");
    let cfg = dir.path().join("eval.toml");
    fs::write(&cfg, "traces = [\"a.csv\", \"b.csv\"]\nout_dir = \"ignored\"\n").unwrap();
    let out = dir.path().join("out");
    let o = headpred(&[
        "eval", "--config", path(&cfg), "--out", path(&out), "--lat", "20,60", "--predictors", "baseline,kalman",
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(!dir.path().join("ignored").exists());

    let summary = rows(&out.join("summary.csv"));
    assert_eq!(summary.len(), 4);
    assert!(summary.iter().all(|r| r[4] == "2"));
    // cross-trace mean equals the mean of the per-trace rows
    let per_trace = rows(&out.join("per_trace.csv"));
    for s in &summary {
        let vals: Vec<f64> = per_trace
            .iter()
            .filter(|p| p[1] == s[0] && p[2] == s[1])
            .map(|p| p[4].parse().unwrap())
            .collect();
        let mean = vals.iter().sum::<f64>() / vals.len() as f64;
        assert!((mean - s[3].parse::<f64>().unwrap()).abs() <= 1e-12);
    }
    let ttests = rows(&out.join("ttests.csv"));
    assert_eq!(ttests.len(), 4);
    assert!(ttests.iter().all(|r| r[1] == "baseline" && r[2] == "kalman"));
}

#[test]
fn empty_predictor_list_fails_before_writing() {
    let dir = tempfile::tempdir().unwrap();
    synth_trace(dir.path(), "yaw");
    let cfg = dir.path().join("eval.toml");
    fs::write(&cfg, "traces = [\"yaw.csv\"]\npredictors = []\n").unwrap();
    let out = dir.path().join("out");
    let o = headpred(&["eval", "--config", path(&cfg), "--out", path(&out)]);
    assert!(!o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("configuration error"));
    assert!(!out.exists());
}

#[test]
fn train_then_eval_autoreg() {
    let dir = tempfile::tempdir().unwrap();
    let train = synth_trace(dir.path(), "train");
    let test = synth_trace(dir.path(), "test");
    let model = dir.path().join("model.json");
    let o = headpred(&["train-ar", "--traces", path(&train), "--out", path(&model), "--max-lag", "8"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let json: serde_json::Value = serde_json::from_str(&fs::read_to_string(&model).unwrap()).unwrap();
    assert_eq!(json.as_array().unwrap().len(), 7);

    let cfg = dir.path().join("eval.toml");
    fs::write(
        &cfg,
        format!(
            "traces = [{:?}]\npredictors = [\"autoreg\", \"baseline\"]\n[autoreg]\nmodel = \"model.json\"\n",
            path(&test)
        ),
    )
    .unwrap();
    let out = dir.path().join("out");
    let o = headpred(&["eval", "--config", path(&cfg), "--out", path(&out)]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(rows(&out.join("summary.csv")).len(), 10);
}

#[test]
fn bad_trace_reports_line() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("bad.csv");
    fs::write(
        &csv,
        "timestamp,x,y,z,qw,qx,qy,qz\n0.0,0,0,0,1,0,0,0\n0.005,0,0,0,1,0,0,0\n0.005,0,0,0,1,0,0,0\n",
    )
    .unwrap();
    let o = headpred(&["stats", "--trace", path(&csv)]);
    assert!(!o.status.success());
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("line 4"), "{err}");
}
