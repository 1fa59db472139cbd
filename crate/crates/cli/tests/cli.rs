//! End-to-end behaviour of the `partial-search` binary.

use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_partial-search"));
    c.env_remove("PARTIAL_SEARCH_WORKERS");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn json(args: &[&str]) -> Value {
    let out = run(&[args, &["--format", "json"]].concat());
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).unwrap()
}

fn csv_rows(args: &[&str]) -> (Vec<String>, Vec<Vec<String>>) {
    let out = run(args);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let mut r = csv::Reader::from_reader(out.stdout.as_slice());
    let headers = r.headers().unwrap().iter().map(String::from).collect();
    let rows = r
        .records()
        .map(|rec| rec.unwrap().iter().map(String::from).collect())
        .collect();
    (headers, rows)
}

#[test]
fn angles_json_for_four_items() {
    let v = json(&["angles", "--n", "2", "--m", "1"]);
    assert_eq!(v["schema_version"], "1");
    assert_eq!(v["command"], "angles");
    let row = &v["rows"][0];
    assert_eq!(row["N"], 4);
    assert_eq!(row["sin_theta1"].as_f64().unwrap(), 0.5);
    assert_eq!(
        row["sin_theta2"].as_f64().unwrap(),
        std::f64::consts::FRAC_1_SQRT_2
    );
    assert_eq!(
        row["sin_gamma"].as_f64().unwrap(),
        std::f64::consts::FRAC_1_SQRT_2
    );
}

#[test]
fn simulate_one_local_then_one_global() {
    let v = json(&["simulate", "--n", "8", "--m", "2", "--seq", "l:1,g:1"]);
    let row = &v["rows"][0];
    assert_eq!(row["product"], "G_8G_2");
    assert!((row["block_probability"].as_f64().unwrap() - 0.105747).abs() < 5e-7);
}

#[test]
fn tables_cover_every_cell() {
    let (headers, rows) = csv_rows(&["tables", "--n", "8", "--which", "pr"]);
    assert_eq!(
        headers,
        ["m", "k_tot", "operator", "pr_percent", "is_grk_form"]
    );
    assert_eq!(rows.len(), 60);
    assert_eq!(rows[0][2], "G_8G_2");
    assert_eq!(rows[0][3], "10.5747");
}

#[test]
fn csv_and_json_carry_the_same_rows() {
    let args = ["enumerate", "--n", "6", "--m", "3", "--ktot", "2..6"];
    let (headers, rows) = csv_rows(&args);
    let v = json(&args);
    let jrows = v["rows"].as_array().unwrap();
    assert_eq!(rows.len(), jrows.len());
    for (row, jrow) in rows.iter().zip(jrows) {
        let obj = jrow.as_object().unwrap();
        assert_eq!(
            obj.keys().collect::<Vec<_>>(),
            headers.iter().collect::<Vec<_>>()
        );
        for (h, cell) in headers.iter().zip(row) {
            match &obj[h] {
                Value::String(s) => assert_eq!(s, cell),
                Value::Number(n) => assert_eq!(cell.parse::<f64>().unwrap(), n.as_f64().unwrap()),
                Value::Bool(b) => assert_eq!(cell, &b.to_string()),
                Value::Null => assert!(cell.is_empty()),
                other => panic!("unexpected {other}"),
            }
        }
    }
}

#[test]
fn emitted_sequences_replay_to_the_reported_probability() {
    let v = json(&[
        "enumerate",
        "--n",
        "7",
        "--m",
        "3",
        "--ktot",
        "1..8",
        "--all-ties",
    ]);
    for row in v["rows"].as_array().unwrap() {
        let pr = row["pr_max"].as_f64().unwrap();
        let seq = row["sequence"].as_str().unwrap();
        let sim = json(&["simulate", "--n", "7", "--m", "3", "--seq", seq]);
        let got = sim["rows"][0]["block_probability"].as_f64().unwrap();
        assert!((got - pr).abs() < 1e-12, "{seq}: {got} vs {pr}");
        assert_eq!(sim["rows"][0]["product"], row["product"]);
    }
}

#[test]
fn out_writes_a_file_and_nothing_to_stdout() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("angles.csv");
    let out = run(&[
        "angles",
        "--n",
        "4",
        "--m",
        "2",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.starts_with("n,m,N,b,K,"));
    assert_eq!(text.lines().count(), 2);
}

#[test]
fn exit_codes() {
    assert_eq!(run(&["--help"]).status.code(), Some(0));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(run(&["angles", "--n", "4"]).status.code(), Some(2));

    let bad = run(&["simulate", "--n", "8", "--m", "9", "--seq", "g:1"]);
    assert_eq!(bad.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&bad.stderr).starts_with("error:"));

    let bad = run(&["simulate", "--n", "8", "--m", "2", "--seq", "x:3"]);
    assert_eq!(bad.status.code(), Some(1));
}

#[test]
fn scheme_constraints_name_their_definition() {
    let out = run(&["parallel", "--scheme", "hybrid", "--n", "5", "--l", "2"]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("hybrid parallel search definition"), "{err}");

    let (_, rows) = csv_rows(&["parallel", "--scheme", "compare", "--n", "5", "--l", "2"]);
    let hybrid = rows.iter().find(|r| r[0] == "hybrid").unwrap();
    assert!(hybrid[3].starts_with("omitted: hybrid parallel search definition"));
}

#[test]
fn worker_count_from_environment() {
    let args = ["parallel", "--scheme", "hybrid", "--n", "12", "--l", "3"];
    let one = bin()
        .args(args)
        .env("PARTIAL_SEARCH_WORKERS", "1")
        .output()
        .unwrap();
    let four = bin()
        .args(args)
        .env("PARTIAL_SEARCH_WORKERS", "4")
        .output()
        .unwrap();
    assert!(one.status.success() && four.status.success());
    assert_eq!(stdout(&one), stdout(&four));

    let zero = bin()
        .args(["angles", "--n", "4", "--m", "2"])
        .env("PARTIAL_SEARCH_WORKERS", "0")
        .output()
        .unwrap();
    assert_eq!(zero.status.code(), Some(1));
    // the flag wins over the environment
    let flag = bin()
        .args(["angles", "--n", "4", "--m", "2", "--workers", "2"])
        .env("PARTIAL_SEARCH_WORKERS", "0")
        .output()
        .unwrap();
    assert!(flag.status.success());
}

#[test]
fn verify_reports_a_pass() {
    let v = json(&["verify", "--n", "6", "--m", "2", "--sequences", "20"]);
    let row = &v["rows"][0];
    assert_eq!(row["passed"], true);
    assert!(row["max_deviation"].as_f64().unwrap() <= 1e-10);
}
