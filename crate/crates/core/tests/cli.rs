use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_triheun"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).expect("valid json on stdout")
}

#[test]
fn csv_header_and_known_value() {
    let out = run(&["potential", "--preset", "v1-zero", "--grid", "0:1:3"]);
    assert!(out.status.success());
    let text = stdout(&out);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("r,rho,v_eff,v_family"));
    let first: Vec<f64> = lines
        .next()
        .unwrap()
        .split(',')
        .map(|c| c.parse().unwrap())
        .take(3)
        .collect();
    assert_eq!(first, [0.0, 0.0, -9.75]);
    assert_eq!(lines.count(), 2);
}

#[test]
fn json_schema() {
    let out = run(&["spectrum", "--preset", "qes", "--format", "json"]);
    assert!(out.status.success());
    let v = json(&out);
    assert_eq!(v["schema_version"], 1);
    assert_eq!(v["command"], "spectrum");
    let cols: Vec<&str> = v["columns"]
        .as_array()
        .unwrap()
        .iter()
        .map(|c| c.as_str().unwrap())
        .collect();
    let energy = cols.iter().position(|c| *c == "energy").unwrap();
    let levels: Vec<f64> = v["rows"]
        .as_array()
        .unwrap()
        .iter()
        .map(|r| r[energy].as_f64().unwrap())
        .collect();
    assert_eq!(levels, [1.0, 2.0, 3.0, 4.0, 5.0]);
}

#[test]
fn output_is_deterministic() {
    for args in [
        &["asym", "--canonical", "0.3,-1.2,0.8"][..],
        &["susy", "--preset", "figW", "--format", "json"][..],
        &["validate"][..],
    ] {
        let a = run(args);
        let b = run(args);
        assert!(a.status.success(), "{args:?}");
        assert_eq!(a.stdout, b.stdout, "{args:?}");
    }
}

#[test]
fn out_file_matches_stdout() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("series.csv");
    let args = ["series", "--canonical", "1,2,0.5"];
    let direct = run(&args);
    let written = run(&[&args[..], &["--out", path.to_str().unwrap()]].concat());
    assert!(written.status.success());
    assert!(written.stdout.is_empty());
    assert_eq!(std::fs::read(&path).unwrap(), direct.stdout);
    // nothing left behind besides the target
    assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 1);
}

#[test]
fn config_file_then_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    std::fs::write(
        &cfg,
        "{\"command\": \"spectrum\", \"params\": [0, 0, 0, 0, 3, 0], \"n_max\": 2}",
    )
    .unwrap();
    let out = run(&["--config", cfg.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(stdout(&out).lines().count(), 4);
    let out = run(&["--config", cfg.to_str().unwrap(), "--n-max", "4"]);
    assert_eq!(stdout(&out).lines().count(), 6);
}

#[test]
fn exit_codes() {
    let bad_number = run(&["series", "--canonical", "1,x,2"]);
    assert_eq!(bad_number.status.code(), Some(2));
    let err: serde_json::Value = serde_json::from_slice(&bad_number.stderr).unwrap();
    assert_eq!(err["exit_code"], 2);
    assert!(err["message"].as_str().unwrap().contains("canonical"));

    let missing = run(&["classify"]);
    assert_eq!(missing.status.code(), Some(2));

    // b = (0, -1, 0) leaves no admissible domain
    let math = run(&["classify", "--params", "0,0,0,0,-1,0"]);
    assert_eq!(math.status.code(), Some(3));

    let unknown = run(&["frobnicate"]);
    assert_eq!(unknown.status.code(), Some(2));
}

#[test]
fn validate_passes() {
    let out = run(&["validate", "--format", "json"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    let cols: Vec<&str> = v["columns"]
        .as_array()
        .unwrap()
        .iter()
        .map(|c| c.as_str().unwrap())
        .collect();
    let passed = cols.iter().position(|c| *c == "passed").unwrap();
    assert!(v["rows"].as_array().unwrap().iter().all(|r| r[passed] == true));
}
