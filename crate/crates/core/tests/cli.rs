use std::fs;
use std::process::{Command, Output};
use std::time::{Duration, Instant};

use lorgeo::report::{to_json, ClassificationReport};
use serde_json::Value;

fn lorgeo(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lorgeo")).args(args).env_remove("LORGEO_SEED").output().expect("spawn")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

const G5: [&str; 10] = ["--family", "g5", "--alpha", "1", "--beta", "2", "--gamma", "-4", "--delta", "2"];

#[test]
fn classify_g5_example() {
    let mut args = vec!["classify"];
    args.extend(G5);
    let o = lorgeo(&args);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["schema"], 1);
    assert_eq!(v["d"], "40/9");
    assert_eq!(v["symmetric"], false);
    assert_eq!(v["independent_geodesic_count"], 1);
    assert_eq!(v["has_null_homogeneous"], false);
    assert_eq!(v["is_go"], false);
}

#[test]
fn classify_g3_is_go() {
    let o = lorgeo(&["classify", "--family", "g3", "--alpha", "1", "--beta", "1", "--gamma", "2"]);
    assert_eq!(o.status.code(), Some(0));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["unimodular"], true);
    assert_eq!(v["is_go"], true);
    assert_eq!(v["is_naturally_reductive"], true);
}

#[test]
fn report_round_trips_and_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("r.json");
    let mut args = vec!["classify", "--samples", "100", "--seed", "7", "--output", path.to_str().unwrap()];
    args.extend(G5);
    assert_eq!(lorgeo(&args).status.code(), Some(0));
    let text = fs::read_to_string(&path).unwrap();
    let back: ClassificationReport = serde_json::from_str(&text).unwrap();
    assert_eq!(to_json(&back).unwrap(), text);
    assert_eq!(lorgeo(&args).status.code(), Some(0));
    assert_eq!(fs::read_to_string(&path).unwrap(), text);
}

#[test]
fn spec_file_input() {
    let dir = tempfile::tempdir().unwrap();
    let good = dir.path().join("good.json");
    fs::write(&good, r#"{"family": "g7", "alpha": 1, "beta": "2", "gamma": 0, "delta": 3}"#).unwrap();
    let o = lorgeo(&["geodesics", "--input", good.to_str().unwrap(), "--samples", "500"]);
    assert_eq!(o.status.code(), Some(0));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["has_null_homogeneous"], true);

    let missing = dir.path().join("missing.json");
    fs::write(&missing, r#"{"family": "g5", "alpha": 1, "beta": 2, "gamma": -4}"#).unwrap();
    let o = lorgeo(&["classify", "--input", missing.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("delta"));

    let broken = dir.path().join("broken.json");
    fs::write(&broken, "{\"family\": \"g5\",\n \"alpha\": }").unwrap();
    let o = lorgeo(&["classify", "--input", broken.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 2"));
}

#[test]
fn invalid_input_exits_2() {
    let o = lorgeo(&["classify", "--family", "g5", "--alpha", "1", "--beta", "1", "--gamma", "1", "--delta", "1"]);
    assert_eq!(o.status.code(), Some(2));
    let o = lorgeo(&["classify", "--family", "g9", "--alpha", "1"]);
    assert_eq!(o.status.code(), Some(2));
    let mut args = vec!["classify", "--tol", "-1"];
    args.extend(G5);
    assert_eq!(lorgeo(&args).status.code(), Some(2));
    let o = lorgeo(&["scan", "--family", "g5", "--alpha", "1", "--beta", "0", "--gamma", "0", "--delta", "1"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn single_point_scan_has_one_row() {
    let o = lorgeo(&[
        "scan", "--family", "g5", "--alpha", "1", "--beta", "0", "--gamma", "0", "--delta", "1", "--grid", "beta=1",
        "--grid", "delta=2", "--solve", "gamma", "--samples", "50",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let mut rdr = csv::Reader::from_reader(text.as_bytes());
    let headers = rdr.headers().unwrap().clone();
    assert_eq!(&headers[0], "family");
    assert_eq!(&headers[headers.len() - 1], "reason");
    let rows: Vec<_> = rdr.records().collect::<Result<_, _>>().unwrap();
    assert_eq!(rows.len(), 1);
    assert_eq!(&rows[0][3], "-2");
}

#[test]
fn seed_env_overrides_flag() {
    let run = |env: Option<&str>, seed: &str| {
        let mut cmd = Command::new(env!("CARGO_BIN_EXE_lorgeo"));
        cmd.args(["go-check", "--family", "g6", "--alpha", "1", "--beta", "2", "--gamma", "4", "--delta", "2"]);
        cmd.args(["--samples", "30", "--seed", seed]);
        match env {
            Some(v) => cmd.env("LORGEO_SEED", v),
            None => cmd.env_remove("LORGEO_SEED"),
        };
        stdout(&cmd.output().unwrap())
    };
    assert_eq!(run(Some("5"), "1"), run(None, "5"));
    assert_ne!(run(None, "1"), run(None, "5"));
}

#[test]
fn verify_runs_and_catches_fault() {
    let start = Instant::now();
    let o = lorgeo(&["verify", "--samples", "10"]);
    assert!(start.elapsed() < Duration::from_secs(5), "{:?}", start.elapsed());
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let o = lorgeo(&["verify", "--samples", "3", "--inject-fault", "structure-constant", "--format", "json"]);
    assert_eq!(o.status.code(), Some(1));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    let jacobi = v["suites"].as_array().unwrap().iter().find(|s| s["name"] == "jacobi").unwrap();
    assert!(jacobi["failures"].as_u64().unwrap() > 0);
}

#[test]
fn geodesics_csv_lists_directions() {
    let mut args = vec!["geodesics", "--format", "csv", "--samples", "300"];
    args.extend(G5);
    let o = lorgeo(&args);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.starts_with("x1,x2,x3,k,causal,isotropy_part"));
    assert!(text.lines().count() > 1);
    let o = lorgeo(&["isotropy", "--format", "csv", "--family", "g7", "--alpha", "1", "--beta", "2", "--gamma", "0", "--delta", "3"]);
    assert_eq!(o.status.code(), Some(2));
}
