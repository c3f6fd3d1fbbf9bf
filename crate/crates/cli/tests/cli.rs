use std::path::PathBuf;
use std::process::{Command, Output};

fn rotlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rotlab")).args(args).output().expect("run rotlab")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn temp(name: &str) -> PathBuf {
    std::env::temp_dir().join(format!("rotlab-cli-{name}-{}", std::process::id()))
}

#[test]
fn check_writes_a_json_report_and_exits_zero() {
    let path = temp("report.json");
    let o = rotlab(&["check", "--tag", "elem_rot", "--n", "3", "--certificates", "--report", path.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stdout(&o));
    let rep: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(rep["expectations_met"], true);
    assert_eq!(rep["summary"]["counts"]["Member"], 7);
    assert!(stdout(&o).contains("certificate verified"));
    let _ = std::fs::remove_file(path);
}

#[test]
fn unmet_expectations_exit_one() {
    let o = rotlab(&["check", "--tag", "half_rot", "--n", "4", "--inverses", "false"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("FAIL"));
}

#[test]
fn errors_exit_two() {
    assert_eq!(rotlab(&["check", "--tag", "no_such_tag"]).status.code(), Some(2));
    assert_eq!(rotlab(&["check", "--tag", "elem_rot", "--n", "3", "--max-degree", "3"]).status.code(), Some(2));
    assert_eq!(rotlab(&["dehn", "--figure", "7"]).status.code(), Some(2));
}

#[test]
fn export_then_check_system_file() {
    let path = temp("system.json");
    let o = rotlab(&["export", "--system", "super_rot", "--n", "3", "--bars", "2", "-o", path.to_str().unwrap()]);
    assert!(o.status.success());
    let o = rotlab(&["check", "--system", path.to_str().unwrap(), "--json"]);
    assert!(o.status.success(), "{}", stdout(&o));
    let rep: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(rep["parameters"]["system"], "super_rot bars={2}");
    let _ = std::fs::remove_file(path);
}

#[test]
fn small_experiments_meet_expectations() {
    for args in [
        &["identities"][..],
        &["dehn"],
        &["dehn", "--figure", "2:5"],
        &["counterexamples"],
        &["rule-of-k", "--k", "1"],
        &["scan256", "--subset", "stratified16"],
    ] {
        let o = rotlab(args);
        assert!(o.status.success(), "{args:?}: {}", stdout(&o));
        assert!(stdout(&o).contains("expectations met"), "{args:?}");
    }
}

#[test]
fn limits_produce_marked_partial_reports() {
    let o = rotlab(&["check", "--tag", "elem_rot", "--n", "3", "--max-basis", "5", "--json"]);
    assert_eq!(o.status.code(), Some(1));
    let rep: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(rep["truncated"], true);
    assert_eq!(rep["systems"][0]["limit_hit"], true);
}

#[test]
fn dehn_print_and_list() {
    let o = rotlab(&["dehn", "--figure", "3", "--print"]);
    assert!(o.status.success());
    assert!(stdout(&o).lines().any(|l| l.starts_with("outer")));
    let o = rotlab(&["list"]);
    assert!(stdout(&o).contains("rule_of_k"));
}
