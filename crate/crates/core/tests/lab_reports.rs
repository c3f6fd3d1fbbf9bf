use std::fs;
use std::path::PathBuf;

use rotlab_core::lab::{self, classify_pattern, RunOptions, ScanSubset, STRATIFIED_16};
use rotlab_core::relation_sets::{build, BuildParams, Tag};

fn temp_dir(name: &str) -> PathBuf {
    let d = std::env::temp_dir().join(format!("rotlab-{name}-{}", std::process::id()));
    let _ = fs::remove_dir_all(&d);
    d
}

#[test]
fn reports_are_deterministic_up_to_timing() {
    let opts = RunOptions::default();
    let a = lab::cmd_counterexamples(&opts).unwrap();
    let b = lab::cmd_counterexamples(&opts).unwrap();
    assert_eq!(a.without_timing(), b.without_timing());
    let p = BuildParams { n: Some(3), ..Default::default() };
    let a = lab::cmd_check_theorem(Tag::SuperRot, &p, &opts).unwrap();
    let b = lab::cmd_check_theorem(Tag::SuperRot, &p, &opts).unwrap();
    assert_eq!(a.without_timing().to_json(), b.without_timing().to_json());
    assert_eq!(a.systems.len(), 8);
}

#[test]
fn interrupted_scan_resumes_to_the_same_summary() {
    let plain = lab::cmd_scan_256(ScanSubset::Stratified16, &RunOptions::default()).unwrap();
    assert!(plain.expectations_met, "{}", plain.render_text());

    // Simulate an interrupted run: only a few words reached the cache.
    let dir = temp_dir("resume");
    let scan_dir = dir.join("scan256");
    fs::create_dir_all(&scan_dir).unwrap();
    for w in STRATIFIED_16.iter().step_by(3) {
        let r = classify_pattern(w, &RunOptions::default()).unwrap();
        fs::write(scan_dir.join(format!("{w}.json")), serde_json::to_string(&r).unwrap()).unwrap();
    }
    let opts = RunOptions { cache: Some(dir.clone()), ..Default::default() };
    let resumed = lab::cmd_scan_256(ScanSubset::Stratified16, &opts).unwrap();
    assert_eq!(fs::read_dir(&scan_dir).unwrap().count(), 16);
    assert_eq!(resumed.entries, plain.entries);
    assert_eq!(resumed.summary, plain.summary);
    let again = lab::cmd_scan_256(ScanSubset::Stratified16, &opts).unwrap();
    assert_eq!(again.entries, plain.entries);
    let _ = fs::remove_dir_all(dir);
}

#[test]
fn report_labels_map_to_unique_goals() {
    let opts = RunOptions::default();
    for (tag, p) in [
        (Tag::ElemRot, BuildParams::n(3)),
        (Tag::PairedFactors, BuildParams::default().with_bound(5)),
        (Tag::QuadraticRot, BuildParams::n(3)),
    ] {
        let sys = build(tag, &p).unwrap();
        let r = lab::cmd_check_theorem(tag, &p, &opts).unwrap();
        assert_eq!(r.entries.len(), sys.goals.len());
        for e in &r.entries {
            let hits = sys.goals.iter().filter(|g| g.label() == e.label).count();
            assert_eq!(hits, 1, "{}", e.label);
        }
    }
}

#[test]
fn positive_theorem_with_missing_hypotheses_fails_loudly() {
    // Without adjoined inverses the half-rotation conclusion is not implied.
    let p = BuildParams { n: Some(4), inverses: Some(false), ..Default::default() };
    let r = lab::cmd_check_theorem(Tag::HalfRot, &p, &RunOptions::default()).unwrap();
    assert!(!r.expectations_met);
    assert_eq!(r.summary.failed_expectations, 1);
}

#[test]
fn system_files_round_trip_through_check() {
    let sys = build(Tag::ElemRot, &BuildParams::n(3)).unwrap();
    let back = rotlab_core::relation_sets::RelationSystem::from_json(&sys.to_json()).unwrap();
    let a = lab::cmd_check_system(&sys, &RunOptions::default()).unwrap();
    let b = lab::cmd_check_system(&back, &RunOptions::default()).unwrap();
    assert_eq!(a.entries, b.entries);
    assert!(a.entries.iter().all(|e| e.verdict == "Member"));
}
