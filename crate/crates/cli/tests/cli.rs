use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn kolakoski(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_kolakoski")).args(args).output().expect("binary runs")
}

fn stdout(args: &[&str]) -> String {
    let out = kolakoski(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn json(args: &[&str]) -> Value {
    serde_json::from_str(&stdout(args)).unwrap()
}

fn golden(name: &str) -> String {
    fs::read_to_string(Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name)).unwrap()
}

#[test]
fn generate_prints_digits() {
    assert_eq!(stdout(&["generate", "--p", "2", "--q", "1", "--n", "10"]), "2211212212\n");
    assert_eq!(stdout(&["generate", "--p", "2", "--q", "1", "--n", "10", "--method", "substitution"]), "2211212212\n");
    assert_eq!(stdout(&["generate", "--p", "4", "--q", "2", "--n", "16"]), "4444222244442222\n");
    assert_eq!(stdout(&["generate", "--p", "2", "--q", "1", "--n", "6", "--side", "left"]), "122112\n");
}

#[test]
fn generate_json_echoes_config() {
    let v = json(&["generate", "--p", "1", "--q", "2", "--n", "5", "--format", "json"]);
    assert_eq!(v["sequence"], serde_json::json!([1, 2, 2, 1, 1]));
    assert_eq!(v["config"]["subcommand"], "generate");
    assert_eq!(v["config"]["p"], 1);
}

#[test]
fn argument_errors_exit_two() {
    for args in [
        &["generate", "--p", "2", "--q", "2"][..],
        &["generate", "--p", "0", "--q", "2"],
        &["analyze", "--m", "1", "--n", "2"],
        &["analyze", "--m", "2"],
        &["cosets", "--m", "2", "--n", "1", "--letter", "zz"],
        &["diffract", "--m", "2", "--n", "1", "--cp", "oops"],
        &["visualize", "--m", "2", "--n", "1", "--contraction", "1/2"],
        &["visualize", "--m", "2", "--n", "1", "--colors", "red,green,blue"],
        &["frobnicate"],
        &[],
    ] {
        let out = kolakoski(args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert!(out.stdout.is_empty(), "{args:?} wrote to stdout");
        assert!(!out.stderr.is_empty(), "{args:?} gave no diagnostic");
    }
}

#[test]
fn missing_config_file_is_an_argument_error() {
    assert_eq!(kolakoski(&["--config", "/nonexistent/run.json"]).status.code(), Some(2));
}

#[test]
fn analyze_two_one() {
    let v = json(&["analyze", "--m", "2", "--n", "1"]);
    assert_eq!(v["height"], 1);
    assert_eq!(v["coincidence"]["k"], 2);
    assert_eq!(v["pure_point"], true);
    assert_eq!(v["spectrum"]["primes"], serde_json::json!([3]));
    assert_eq!(v["spectrum"]["cyclic"], 4);
    assert_eq!(v["minimal_coincidence"]["digits"], serde_json::json!([1, 2]));
    assert_eq!(v["minimal_coincidence"]["letter"], "b1");
}

#[test]
fn analyze_table() {
    for (m, n, cyclic) in [(3, 2, 4), (3, 1, 1), (4, 2, 2), (5, 3, 1)] {
        let v = json(&["analyze", "--m", &m.to_string(), "--n", &n.to_string()]);
        assert_eq!(v["height"], 1);
        assert_eq!(v["pure_point"], true);
        assert_eq!(v["spectrum"]["cyclic"], cyclic, "({m},{n})");
    }
}

#[test]
fn derive_record() {
    let v = json(&["derive", "--m", "2", "--n", "1"]);
    assert_eq!(v["substitution"], "a1 -> a1 a2 a1\na2 -> a2 b1 b1\nb1 -> a1 a2 b1\n");
    assert_eq!(v["length"], 3);
    assert_eq!(v["height"], 1);
    assert_eq!(v["gcd"], 1);
    assert_eq!(v["coincidence"]["k"], 2);
    assert_eq!(v["pure_point"], true);
    assert_eq!(v["spectrum"]["cyclic_order"], 4);

    let v = json(&["derive", "--m", "2", "--n", "1", "--kind", "numbered"]);
    assert_eq!(v["height"], 2);
    assert_eq!(v["pure_point"], Value::Null);

    let v = json(&["derive", "--m", "2", "--n", "1", "--kind", "blocked-sigma"]);
    assert_eq!(v["length"], Value::Null);
}

#[test]
fn derive_rules_file_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let rules = dir.path().join("theta.txt");
    let v = json(&["derive", "--m", "3", "--n", "2", "--rules", rules.to_str().unwrap()]);
    assert_eq!(fs::read_to_string(&rules).unwrap(), v["substitution"].as_str().unwrap());
    let c = json(&["cosets", "--substitution", rules.to_str().unwrap(), "--letter", "a1", "--depth", "3"]);
    let d = json(&["cosets", "--m", "3", "--n", "2", "--letter", "a1", "--depth", "3"]);
    assert_eq!(c["cosets"], d["cosets"]);
}

#[test]
fn cosets_golden_and_csv() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("b1.csv");
    let out =
        stdout(&["cosets", "--m", "2", "--n", "1", "--letter", "b1", "--depth", "4", "--csv", csv.to_str().unwrap()]);
    let v: Value = serde_json::from_str(&out).unwrap();
    let pairs: Vec<(u64, u64)> = v["cosets"]
        .as_array()
        .unwrap()
        .iter()
        .map(|c| (c["modulus"].as_u64().unwrap(), c["residue"].as_u64().unwrap()))
        .collect();
    assert_eq!(pairs, [(9, 5), (27, 17), (27, 22), (81, 53), (81, 58), (81, 64), (81, 65)]);
    assert_eq!(v["covered_density"], serde_json::json!({ "num": 19, "den": 81 }));
    assert_eq!(fs::read_to_string(&csv).unwrap(), "modulus,residue\n9,5\n27,17\n27,22\n81,53\n81,58\n81,64\n81,65\n");
    let plain = stdout(&["cosets", "--m", "2", "--n", "1", "--letter", "b1", "--depth", "4"]);
    assert_eq!(plain, golden("cosets_b1_depth4.json"));
}

#[test]
fn report_golden_two_one() {
    let out = stdout(&["report", "--m", "2", "--n", "1"]);
    assert_eq!(out, golden("report_2_1.json"));
    let v: Value = serde_json::from_str(&out).unwrap();
    let printed_c = serde_json::json!([
        [2, 1, 0, 0, 0, 0],
        [0, 1, 2, 0, 0, 0],
        [1, 1, 1, 0, 0, 0],
        [0, 0, 0, 1, 1, 1],
        [1, 1, 0, 0, 1, 0],
        [0, 0, 1, 1, 0, 1],
    ]);
    assert_eq!(v["coincidence_matrix"]["rows"], printed_c);
    let b1 = v["cosets"].as_array().unwrap().iter().find(|c| c["letter"] == "b1").unwrap();
    assert_eq!(b1["printed"], serde_json::json!(["9Z+5", "27Z+17", "27Z+22", "81Z+53", "81Z+58", "81Z+64", "81Z+65"]));
}

#[test]
fn diffract_peaks_agree_with_oracle() {
    let v = json(&["diffract", "--m", "2", "--n", "1", "--max-denom", "1", "--oracle-n", "50000"]);
    let peaks = v["peaks"].as_array().unwrap();
    assert!(!peaks.is_empty());
    for p in peaks {
        let bound = p["error_bound"].as_f64().unwrap();
        let delta = p["oracle"]["delta"].as_f64().unwrap();
        // The finite prefix adds its own error on top of the coset truncation.
        assert!(delta <= bound + 0.01, "{p}");
        assert!(p["frequency"]["den"].as_i64().unwrap() > 0);
    }
    assert_eq!(peaks[0]["frequency"], serde_json::json!({ "num": 0, "den": 1 }));
}

#[test]
fn diffract_csv_and_skipped_oracle() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("peaks.csv");
    let v = json(&[
        "diffract",
        "--m",
        "2",
        "--n",
        "1",
        "--max-denom",
        "1",
        "--oracle-n",
        "0",
        "--csv",
        csv.to_str().unwrap(),
    ]);
    assert!(v["peaks"][0]["oracle"].is_null());
    let text = fs::read_to_string(&csv).unwrap();
    assert!(text.starts_with("num,den,re,im,intensity,error_bound,oracle_delta\n0,1,"));
    assert_eq!(text.lines().count(), v["peaks"].as_array().unwrap().len() + 1);
}

#[test]
fn visualize_svg() {
    let svg = stdout(&["visualize", "--m", "2", "--n", "1", "--depth", "2"]);
    assert!(svg.starts_with("<?xml"));
    assert!(svg.contains("data-address=\"02\" data-letter=\"a1\""));
    assert!(svg.contains("data-address=\"12\" data-letter=\"a2\""));
    assert!(svg.contains("data-address=\"21\" data-letter=\"b1\""));
    let line = stdout(&["visualize", "--m", "2", "--n", "1", "--depth", "3", "--dimension", "1"]);
    assert!(line.contains("<rect x="));
}

#[test]
fn outputs_regenerate_from_their_config() {
    let dir = tempfile::tempdir().unwrap();
    let runs: Vec<Vec<&str>> = vec![
        vec!["analyze", "--m", "3", "--n", "1"],
        vec!["derive", "--m", "4", "--n", "2", "--kind", "theta"],
        vec!["cosets", "--m", "2", "--n", "1", "--letter", "a2", "--depth", "5"],
        vec![
            "diffract",
            "--m",
            "2",
            "--n",
            "1",
            "--cp",
            "1,-0.5",
            "--cq",
            "0,1",
            "--max-denom",
            "1",
            "--oracle-n",
            "3000",
        ],
        vec!["visualize", "--m", "3", "--n", "1", "--depth", "3", "--colors", "#112233,#445566,#778899,#aabbcc"],
        vec!["report", "--m", "3", "--n", "2"],
        vec!["generate", "--p", "4", "--q", "2", "--n", "40", "--format", "json"],
    ];
    for (i, args) in runs.iter().enumerate() {
        let first = dir.path().join(format!("out{i}"));
        let mut with_output = args.clone();
        with_output.extend(["--output", first.to_str().unwrap()]);
        stdout(&with_output);
        let before = fs::read(&first).unwrap();
        let copy = dir.path().join(format!("copy{i}"));
        fs::copy(&first, &copy).unwrap();
        stdout(&["--config", copy.to_str().unwrap()]);
        assert_eq!(fs::read(&first).unwrap(), before, "{args:?}");
    }
}

#[test]
fn config_file_with_flags_only() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("run.json");
    fs::write(&path, r#"{"subcommand": "analyze", "m": 2, "n": 1}"#).unwrap();
    let v = json(&["--config", path.to_str().unwrap()]);
    assert_eq!(v["coincidence"]["k"], 2);
    fs::write(&path, r#"{"subcommand": "analyze", "m": 2, "n": 1, "bogus": true}"#).unwrap();
    assert_eq!(kolakoski(&["--config", path.to_str().unwrap()]).status.code(), Some(2));
    assert_eq!(
        kolakoski(&["--config", path.to_str().unwrap(), "analyze", "--m", "2", "--n", "1"]).status.code(),
        Some(2)
    );
}
