use std::process::{Command, Output};

use serde_json::Value;

fn dt4(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dt4")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(o: &Output) -> Value {
    serde_json::from_str(&stdout(o)).expect("valid JSON")
}

/// Re-parsing and re-serializing must reproduce the bytes.
fn assert_round_trip(text: &str) {
    let v: Value = serde_json::from_str(text).unwrap();
    let mut again = serde_json::to_string_pretty(&v).unwrap();
    again.push('\n');
    assert_eq!(again, text);
}

#[test]
fn partitions_count_example() {
    let o = dt4(&["partitions", "--dim", "4", "--size", "5", "--count"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o), "59\n");
}

#[test]
fn partitions_list_json() {
    let o = dt4(&["partitions", "--dim", "3", "--size", "3", "--list", "--json"]);
    assert!(o.status.success());
    assert_round_trip(&stdout(&o));
    let v = json(&o);
    assert_eq!(v["count"], 6);
    let listed = v["partitions"].as_array().unwrap();
    assert_eq!(listed.len(), 6);
    assert!(listed.contains(&serde_json::json!([[3]])));
    assert!(listed.contains(&serde_json::json!([[1], [1], [1]])));
}

#[test]
fn zc4_both_json_matches() {
    let o = dt4(&["zc4", "--nmax", "2", "--s2", "2", "--s3", "3", "--m", "1", "--mode", "both", "--json"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert_round_trip(&text);
    let v = json(&o);
    assert_eq!(v["match"], true);
    assert_eq!(v["survivors"].as_array().unwrap().len(), 1);
    let coeffs = v["coefficients"].as_array().unwrap();
    assert_eq!(coeffs.len(), 3);
    assert!(coeffs.iter().all(|c| c["match"] == true));
    assert_eq!(v["localized"], v["closed"]);
    assert!(v["checks"].as_array().unwrap().iter().all(|c| c["verdict"] == "PASS"));
}

#[test]
fn zc4_human_and_json_agree() {
    let base = ["zc4", "--nmax", "3", "--s2", "-5/2", "--s3", "7/3", "--m", "2/5", "--no-insertion"];
    let human = dt4(&base);
    let mut with_json = base.to_vec();
    with_json.push("--json");
    let js = json(&dt4(&with_json));
    assert!(human.status.success());
    let text = stdout(&human);
    for c in js["checks"].as_array().unwrap() {
        let line = format!("{} {}", c["verdict"].as_str().unwrap(), c["name"].as_str().unwrap());
        assert!(text.contains(&line), "{line} missing from\n{text}");
    }
    assert_eq!(js["match"], true);
}

#[test]
fn zc4_closed_mode_has_no_match_field() {
    let v = json(&dt4(&["zc4", "--nmax", "2", "--s2", "2", "--s3", "3", "--m", "1", "--mode", "closed", "--json"]));
    assert!(v.get("match").is_none());
    assert!(v.get("localized").is_none());
    assert_eq!(v["closed"]["coeffs"][1]["num"], serde_json::json!(["5", "25/6", "5/6"]));
}

#[test]
fn zc4_csv_columns() {
    let o = dt4(&["zc4", "--nmax", "1", "--s2", "2", "--s3", "3", "--m", "1", "--csv"]);
    assert_eq!(stdout(&o), "n,coeff_num,coeff_den,match\n0,1,1,true\n1,5;25/6;5/6,0;5;1,true\n");
}

#[test]
fn output_independent_of_threads() {
    let args = ["zc4", "--nmax", "3", "--s2", "2", "--s3", "3", "--m", "1", "--json"];
    let one = dt4(&[&["--threads", "1"], &args[..]].concat());
    let four = dt4(&[&["--threads", "4"], &args[..]].concat());
    assert_eq!(one.stdout, four.stdout);
    let env = Command::new(env!("CARGO_BIN_EXE_dt4")).args(args).env("DT4_THREADS", "2").output().unwrap();
    assert_eq!(env.stdout, one.stdout);
}

#[test]
fn parse_errors_exit_2() {
    assert_eq!(dt4(&["partitions", "--dim", "5", "--size", "2"]).status.code(), Some(2));
    assert_eq!(dt4(&["zc4", "--nmax", "2", "--s2", "1/0", "--s3", "3", "--m", "1"]).status.code(), Some(2));
    assert_eq!(dt4(&["verify", "--suite", "bogus", "--nmax", "2"]).status.code(), Some(2));
    let bad_genus = ["local-curve", "--g", "-1", "--l1", "0", "--l2", "0", "--l3", "0", "--l", "0", "--nmax", "2", "--s2", "2", "--s3", "3", "--m", "1"];
    assert_eq!(dt4(&bad_genus).status.code(), Some(2));
    assert_eq!(dt4(&["partitions", "--dim", "4", "--size", "99"]).status.code(), Some(2));
}

#[test]
fn zero_weight_exits_3_with_diagnostic() {
    let o = dt4(&["zc4", "--nmax", "2", "--s2", "1", "--s3", "-1", "--m", "1"]);
    assert_eq!(o.status.code(), Some(3));
    let diag: Value = serde_json::from_slice(&o.stderr).unwrap();
    assert_eq!(diag["error"], "zero_weight");
    assert!(diag["message"].as_str().unwrap().contains("s2"));
}

#[test]
fn local_curve_split_json() {
    let o = dt4(&[
        "local-curve", "--g", "1", "--l1", "0", "--l2", "0", "--l3", "0", "--l", "2", "--nmax", "4",
        "--s2", "2", "--s3", "3", "--m", "1/2", "--split", "0,0,0,-1,1", "--json",
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert_round_trip(&stdout(&o));
    let v = json(&o);
    assert_eq!(v["data"]["r"], 0);
    assert_eq!(v["split"]["left"]["r"], 1);
    assert_eq!(v["split"]["right"]["r"], 1);
    assert_eq!(v["split"]["verdict"], "PASS");
}

#[test]
fn residue_json() {
    let o = dt4(&["residue", "--nmax", "4", "--s2", "2", "--s3", "3", "--m", "3", "--json"]);
    assert!(o.status.success());
    let v = json(&o);
    assert_eq!(v["match"], true);
    // m log M(-q): -m sigma2(1)/1 q + m sigma2(2)/2 q^2
    assert_eq!(v["f_inf0"]["coeffs"][1], "-3");
    assert_eq!(v["f_inf0"]["coeffs"][2], "15/2");
}

#[test]
fn verify_all_example_exits_0() {
    let o = dt4(&["verify", "--suite", "all", "--nmax", "4", "--trials", "3", "--seed", "1"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).lines().last().unwrap().starts_with("PASS"));
}

#[test]
fn verify_json_round_trips_and_is_reproducible() {
    let args = ["verify", "--suite", "rubber", "--nmax", "3", "--trials", "2", "--seed", "9", "--json"];
    let a = dt4(&args);
    let b = dt4(&args);
    assert_eq!(a.stdout, b.stdout);
    assert_round_trip(&stdout(&a));
    assert_eq!(json(&a)["verdict"], "PASS");
}

#[test]
fn injected_sign_fails_with_witness() {
    let o = dt4(&["verify", "--suite", "c4", "--nmax", "3", "--trials", "3", "--seed", "1", "--inject", "sign", "--junit"]);
    assert_eq!(o.status.code(), Some(1));
    let xml = stdout(&o);
    assert!(xml.contains("<failure message=\"size 3 partition"), "{xml}");
}
