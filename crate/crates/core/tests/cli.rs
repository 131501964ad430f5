use std::process::{Command, Output};

fn l0lab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_l0lab"))
        .args(args)
        .env("L0LAB_WORKERS", "1")
        .output()
        .expect("run l0lab")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn fisher_prints_unit_information_for_gaussian() {
    let o = l0lab(&["fisher", "--poly", "0,0,-0.5"]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("I_q = 1.000000"));
}

#[test]
fn bad_flag_value_is_a_usage_error() {
    let o = l0lab(&["standard-error", "--d", "many"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("--d"));
}

#[test]
fn invalid_noise_exits_with_failure_name() {
    let o = l0lab(&["fisher", "--poly", "0,0,0,-1"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("OddDegree"));
}

#[test]
fn sweep_writes_one_row_per_cell() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("sweep.csv");
    let o = l0lab(&[
        "sweep", "--poly", "0,0,-0.5", "--c", "1", "--dims", "64,256", "--alphas", "0.2,0.5,0.8",
        "--attack", "coupling", "--classifier", "truncated", "--trials", "200", "--seed", "7",
        "--out", out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = std::fs::read_to_string(&out).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 7);
    assert_eq!(
        lines[0],
        "d,k,alpha,classifier,attack,trials,errors,error_rate,ci_low,ci_high,revert_rate,seed,status"
    );
    assert!(lines[1..].iter().all(|l| l.ends_with(",ok")));
}

#[test]
fn config_file_is_read_and_flags_override_it() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    std::fs::write(&cfg, r#"{"poly": [0, 0, -0.5], "c": 1.0, "d": 64, "trials": 300, "seed": 4}"#).unwrap();
    let a = l0lab(&["standard-error", "--config", cfg.to_str().unwrap()]);
    assert!(a.status.success(), "{}", String::from_utf8_lossy(&a.stderr));
    assert!(stdout(&a).lines().nth(1).unwrap().starts_with("64,0,,ml,none,300,"));
    let b = l0lab(&["standard-error", "--config", cfg.to_str().unwrap(), "--trials", "400"]);
    assert!(stdout(&b).lines().nth(1).unwrap().starts_with("64,0,,ml,none,400,"));

    std::fs::write(&cfg, r#"{"bogus": 1}"#).unwrap();
    let c = l0lab(&["standard-error", "--config", cfg.to_str().unwrap()]);
    assert_ne!(c.status.code(), Some(0));
}

#[test]
fn json_output_parses() {
    let o = l0lab(&["robust", "--d", "64", "--k", "2", "--attack", "worst_case", "--trials", "200", "--format", "json"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["rows"][0]["attack"], "worst_case");
}

#[test]
fn runs_replay_exactly() {
    let args = ["robust", "--d", "128", "--alpha", "0.5", "--attack", "coupling", "--trials", "300", "--seed", "9"];
    assert_eq!(stdout(&l0lab(&args)), stdout(&l0lab(&args)));
}
