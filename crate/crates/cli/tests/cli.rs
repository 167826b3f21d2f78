use std::process::Command;

use relkit::LinearRelation;

fn relkit() -> Command {
    Command::new(env!("CARGO_BIN_EXE_relkit"))
}

#[test]
fn run_writes_a_versioned_report() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("r.json");
    let out = relkit()
        .args(["run", "--trials", "2", "--seed", "7", "--dim", "4", "--class", "hermitian", "--report"])
        .arg(&path)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let report: serde_json::Value = serde_json::from_slice(&std::fs::read(&path).unwrap()).unwrap();
    assert_eq!(report["schema"], 1);
    assert_eq!(report["config"]["seed"], 7);
    assert_eq!(report["trials"].as_array().unwrap().len(), 2);
    assert!(report["summary"].get("wall_time_seconds").is_none());
}

#[test]
fn timing_is_opt_in() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("r.json");
    let status = relkit()
        .args(["run", "--trials", "1", "--dim", "3", "--class", "generic", "--timing", "--report"])
        .arg(&path)
        .status()
        .unwrap();
    // The generic class carries the block tail bound, which fails.
    assert_eq!(status.code(), Some(1));
    let report: serde_json::Value = serde_json::from_slice(&std::fs::read(&path).unwrap()).unwrap();
    assert!(report["summary"]["wall_time_seconds"].as_f64().unwrap() >= 0.0);
}

#[test]
fn usage_errors_exit_with_two() {
    for args in [
        vec!["run", "--class", "normal"],
        vec!["run", "--dim", "3", "--mul-dim", "5"],
        vec!["run", "--tol-eq=-1"],
        vec!["demo", "nope"],
        vec!["frobnicate"],
    ] {
        let status = relkit().args(&args).status().unwrap();
        assert_eq!(status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn env_tolerance_is_validated() {
    let status = relkit().args(["demo", "arens"]).env("RELKIT_TOL_EQ", "abc").status().unwrap();
    assert_eq!(status.code(), Some(2));
    let status = relkit().args(["demo", "arens"]).env("RELKIT_TOL_EQ", "1e-6").status().unwrap();
    assert_eq!(status.code(), Some(0));
}

#[test]
fn demos_succeed() {
    for name in ["remark-3-1", "arens", "lemma-3-1", "block-tail"] {
        let out = relkit().args(["demo", name]).output().unwrap();
        assert_eq!(out.status.code(), Some(0), "{name}");
        assert!(String::from_utf8_lossy(&out.stdout).ends_with("ok\n"));
    }
}

#[test]
fn verify_identical_relations() {
    let dir = tempfile::tempdir().unwrap();
    let rel = LinearRelation::from_matrix(&relkit::matrix::from_real_rows(&[&[1.0, 2.0], &[2.0, 0.0]]));
    let (a, b) = (dir.path().join("a.json"), dir.path().join("b.json"));
    std::fs::write(&a, serde_json::to_string(&rel).unwrap()).unwrap();
    std::fs::write(&b, serde_json::to_string(&rel).unwrap()).unwrap();
    let out = relkit().arg("verify").arg(&a).arg(&b).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(report["gap_norm"].as_f64().unwrap() < 1e-12);

    std::fs::write(&b, "{not json").unwrap();
    let status = relkit().arg("verify").arg(&a).arg(&b).status().unwrap();
    assert_eq!(status.code(), Some(2));
}
