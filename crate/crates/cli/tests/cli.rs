use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn mumford(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mumford")).args(args).env_remove("MUMFORD_DATA_DIR").output().unwrap()
}

fn json(args: &[&str]) -> (Value, i32) {
    let mut all = vec!["--json"];
    all.extend_from_slice(args);
    let out = mumford(&all);
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    (v, out.status.code().unwrap())
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("mumford-cli-{name}-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn bundled(file: &str) -> String {
    std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/../core/data/").to_owned() + file).unwrap()
}

#[test]
fn classical_table_regenerates() {
    let (v, code) = json(&["table", "5.4.1"]);
    assert_eq!(code, 0);
    assert_eq!(v["status"], 0);
    let rows = v["payload"]["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 22);
    assert!(rows.iter().all(|r| r["outcome"] == "match"));
    assert!(v["payload"]["diff"].as_array().unwrap().is_empty());
}

#[test]
fn wild_table_reports_loose_rows_without_failing() {
    let (v, code) = json(&["table", "5.4.2"]);
    assert_eq!(code, 0);
    let rows = v["payload"]["rows"].as_array().unwrap();
    assert_eq!(rows.iter().filter(|r| r["outcome"] == "loose").count(), 2);
    assert_eq!(rows.iter().filter(|r| r["outcome"] == "unprinted").count(), 2);
}

#[test]
fn ab_grid_and_unknown_table() {
    assert_eq!(mumford(&["table", "6.3"]).status.code(), Some(0));
    assert_eq!(mumford(&["table", "9.9"]).status.code(), Some(1));
    assert_eq!(mumford(&["frobnicate"]).status.code(), Some(1));
}

#[test]
fn census_totals() {
    let (v, code) = json(&["census"]);
    assert_eq!(code, 0);
    assert_eq!(v["payload"]["total"], 134);
    let per = v["payload"]["perGenus"].as_array().unwrap();
    let counts: Vec<u64> = per.iter().map(|g| g["count"].as_u64().unwrap()).collect();
    assert_eq!(counts, [53, 14, 51, 16]);
    assert_eq!(per[3]["orders"], serde_json::json!([83, 84]));
}

#[test]
fn tampered_golden_file_is_a_mismatch() {
    let dir = scratch("golden");
    let text = bundled("golden_tables.json").replacen("\"1/12\"", "\"1/11\"", 1);
    std::fs::write(dir.join("golden_tables.json"), text).unwrap();
    std::fs::write(dir.join("gnu_counts.json"), bundled("gnu_counts.json")).unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_mumford"))
        .args(["table", "5.4.1"])
        .env("MUMFORD_DATA_DIR", &dir)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn missing_count_file_is_an_error() {
    let dir = scratch("counts");
    std::fs::write(dir.join("golden_tables.json"), bundled("golden_tables.json")).unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_mumford")).arg("census").env("MUMFORD_DATA_DIR", &dir).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).starts_with("mumford:"));
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn case_verdict() {
    let (v, code) = json(&["case", "F2", "p=3", "t=1", "n=2", "t1=0", "t2=0"]);
    assert_eq!(code, 0);
    assert_eq!(v["payload"]["verdict"], "attains_bound");
}

#[test]
fn asm_family_fields() {
    let (v, code) = json(&["family", "asm", "3", "1"]);
    assert_eq!(code, 0);
    assert_eq!(v["payload"]["genus"], "4");
    assert_eq!(v["payload"]["aut_order"], "36");
    assert_eq!(mumford(&["family", "asm", "2", "1"]).status.code(), Some(1));
}

#[test]
fn csv_and_json_agree() {
    let (v, _) = json(&["family", "asm", "3", "1"]);
    let out = mumford(&["--csv", "family", "asm", "3", "1"]);
    let mut reader = csv::Reader::from_reader(out.stdout.as_slice());
    let mut n = 0;
    for rec in reader.records() {
        let rec = rec.unwrap();
        let want = match &v["payload"][&rec[0]] {
            Value::String(s) => s.clone(),
            other => other.to_string(),
        };
        assert_eq!(rec[1], want, "field {}", &rec[0]);
        n += 1;
    }
    assert!(n >= 8);
}

#[test]
fn translation_mirror() {
    let (v, code) = json(&["tree", "mirror", "tau", "pi", "--window", "5"]);
    assert_eq!(code, 0);
    for level in v["payload"]["apartment"].as_array().unwrap() {
        let j = level["j"].as_i64().unwrap();
        assert_eq!(level["fixed"], j >= -1, "j={j}");
    }
}

#[test]
fn asm_discreteness() {
    let (v, code) = json(&["discrete", "asm", "3", "1", "-1", "3"]);
    assert_eq!(code, 0);
    assert_eq!(v["payload"]["disjoint"], true);
    assert_eq!(v["payload"]["generators"], 4);
    let (v, code) = json(&["discrete", "asm", "3", "1", "0", "3"]);
    assert_eq!(code, 0);
    assert_eq!(v["payload"]["disjoint"], false);
}
