use std::path::PathBuf;
use std::process::{Command, Output};

fn specs(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../specs").join(name).to_string_lossy().into_owned()
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_anosov")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn form_tables_match_golden_bytes() {
    let o = run(&["form", "tables"]);
    assert_eq!(o.status.code(), Some(0));
    let golden = std::fs::read(PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden/form_tables.txt")).unwrap();
    assert_eq!(o.stdout, golden);
}

#[test]
fn analyze_s2xs2_is_no_anosov() {
    let o = run(&["analyze", &specs("s2xs2.json"), "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let verdicts = v["verdicts"].as_array().unwrap();
    assert!(!verdicts.is_empty());
    assert!(verdicts.iter().all(|x| x["conclusion"] == "NO_ANOSOV"));
}

#[test]
fn analyze_s3xs3_stays_inconclusive() {
    let o = run(&["analyze", &specs("s3xs3.json"), "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["verdicts"][0]["conclusion"], "INCONCLUSIVE");
}

#[test]
fn malformed_input_exits_with_precondition_code() {
    let dir = std::env::temp_dir().join(format!("anosov-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let bad = dir.join("bad.json");
    std::fs::write(&bad, r#"{"kind": "sphere", "dim": }"#).unwrap();
    let o = run(&["analyze", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 1"));
    let o = run(&["analyze", &dir.join("missing.json").to_string_lossy()]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn bounded_form_search_exits_three() {
    let o = run(&["form", "analyze", "--matrix", &specs("hh.json"), "--bound", "2"]);
    assert_eq!(o.status.code(), Some(3));
    let o = run(&["form", "analyze", "--matrix", &specs("hh.json"), "--chi-nonzero"]);
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn oracle_csv_for_cat_map() {
    let o = run(&["oracle", "cross-check", "--matrix", &specs("cat.json"), "-L", "3", "--format", "csv"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "l,lefschetz,det_count,smith_count\n1,-1,1,1\n2,-5,5,5\n3,-16,16,16\n");
}

#[test]
fn block_table_command_prints_thirteen_degrees() {
    let o = run(&["sphere-product", "blocks", &specs("example_s1s2s3.json")]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert_eq!(text.lines().count(), 13);
    assert!(text.contains("f^{*4} = upp.tr(Id_Z, A1 ⊗ A3, A1^∧2, A1^∧2)"));
}

#[test]
fn lefschetz_command_reports_compatibility() {
    let o = run(&["lefschetz", "--ring", &specs("t2.json"), "--aut", &specs("cat_aut.json"), "-L", "5"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["compatibility"]["compatibility"], "CONSISTENT_WITH_TRANSITIVE");
}
