use std::path::Path;
use std::process::{Command, Output};

fn bin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bt-torsion")).args(args).output().expect("spawn bt-torsion")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn json(path: &Path) -> serde_json::Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn passing_suite_exits_zero() {
    let out = bin(&["torsion", "--a-max", "6"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let csv = String::from_utf8(out.stdout).unwrap();
    assert!(csv.starts_with("suite,params,measured,expected,tol,pass\n"));
    assert!(!csv.contains(",false"));
}

#[test]
fn failing_check_exits_one() {
    let out = bin(&["kirillov", "--a-max", "2", "--tol", "residual=1e-30"]);
    assert_eq!(code(&out), 1);
    assert!(String::from_utf8_lossy(&out.stderr).contains("FAIL kirillov"));
}

#[test]
fn usage_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{ \"a_max\": \"six\" }").unwrap();
    let unknown_key = dir.path().join("unknown.json");
    std::fs::write(&unknown_key, "{ \"colour\": 1 }").unwrap();
    let missing = dir.path().join("missing.json");
    let cases: Vec<Vec<&str>> = vec![
        vec!["nosuch"],
        vec!["toeplitz", "--p", "16,8"],
        vec!["toeplitz", "--p", "8,x"],
        vec!["toeplitz", "--symbol", "sin"],
        vec!["kirillov", "--tol", "nosuch=1e-3"],
        vec!["kirillov", "--tol", "residual=-1"],
        vec!["clifford", "--m-max", "9"],
        vec!["dh", "--config", bad.to_str().unwrap()],
        vec!["dh", "--config", unknown_key.to_str().unwrap()],
        vec!["dh", "--config", missing.to_str().unwrap()],
    ];
    for args in cases {
        assert_eq!(code(&bin(&args)), 2, "{args:?}");
    }
}

#[test]
fn csv_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    for path in [&a, &b] {
        let out = bin(&["gauss", "--chains", "20", "-o", path.to_str().unwrap()]);
        assert_eq!(code(&out), 0);
        assert!(out.stdout.is_empty());
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
}

#[test]
fn json_schema_and_timestamp() {
    let dir = tempfile::tempdir().unwrap();
    let plain = dir.path().join("plain.json");
    let stamped = dir.path().join("stamped.json");
    assert_eq!(code(&bin(&["dh", "--format", "json", "-o", plain.to_str().unwrap()])), 0);
    assert_eq!(code(&bin(&["dh", "--format", "json", "--timestamp", "-o", stamped.to_str().unwrap()])), 0);

    let v = json(&plain);
    assert_eq!(v["suite"], "dh");
    assert!(v.get("timestamp").is_none());
    let rows = v["rows"].as_array().unwrap();
    assert!(!rows.is_empty());
    for row in rows {
        for key in ["suite", "params", "measured", "expected", "tol", "pass"] {
            assert!(row.get(key).is_some(), "missing {key}");
        }
    }
    let params: Vec<&str> = rows.iter().map(|r| r["params"].as_str().unwrap()).collect();
    let mut sorted = params.clone();
    sorted.sort();
    assert_eq!(params, sorted);

    assert!(json(&stamped)["timestamp"].as_u64().unwrap() > 0);
}

#[test]
fn flags_override_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    std::fs::write(&cfg, r#"{ "a_max": 1, "format": "json", "tolerances": { "residual": 1e-30 } }"#).unwrap();
    let out_path = dir.path().join("out.json");

    // file tolerance alone fails the run
    let out = bin(&["kirillov", "--config", cfg.to_str().unwrap(), "-o", out_path.to_str().unwrap()]);
    assert_eq!(code(&out), 1);
    assert_eq!(json(&out_path)["rows"].as_array().unwrap().len(), 2);

    let out = bin(&[
        "kirillov",
        "--config",
        cfg.to_str().unwrap(),
        "--a-max",
        "3",
        "--tol",
        "residual=1e-7",
        "-o",
        out_path.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let v = json(&out_path);
    let rows = v["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 4);
    assert!(rows.iter().all(|r| r["tol"] == 1e-7));
}
