use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cubical-omega"))
        .args(args)
        .env_remove("CUBICAL_OMEGA_BUDGET")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn golden(name: &str) -> String {
    fs::read_to_string(
        Path::new(env!("CARGO_MANIFEST_DIR"))
            .join("tests/golden")
            .join(name),
    )
    .unwrap()
}

#[test]
fn build_prints_counts() {
    for (shape, line) in [
        ("", "M(): 1 members, 1 cells"),
        ("1", "M(1): 3 members, 3 cells"),
        ("2", "M(2): 6 members, 5 cells"),
        ("1x1", "M(1x1): 11 members, 9 cells"),
    ] {
        let o = run(&["build", "--shape", shape]);
        assert_eq!(o.status.code(), Some(0));
        assert_eq!(stdout(&o).trim(), line);
    }
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(run(&["build", "--shape", "1xq"]).status.code(), Some(2));
    assert_eq!(run(&["build"]).status.code(), Some(2));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(
        run(&["analyze", "--shape", "1", "--kmax", "2", "--grade", "5"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        run(&["check", "omega", "--input", "/nonexistent/m.json"])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn budget_overrun_exits_1() {
    let o = run(&["build", "--shape", "1x1x1", "--budget", "10"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn check_accepts_built_document_and_rejects_corruption() {
    let dir = tempfile::tempdir().unwrap();
    let good = dir.path().join("m.json");
    let o = run(&["build", "--shape", "1x1", "--out", good.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(
        run(&["check", "omega", "--input", good.to_str().unwrap()])
            .status
            .code(),
        Some(0)
    );

    let mut doc: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(&good).unwrap()).unwrap();
    let top = doc["members"]
        .as_array_mut()
        .unwrap()
        .iter_mut()
        .find(|m| m["dim"] == 2)
        .unwrap();
    let faces = top["faces"][0].as_array_mut().unwrap();
    faces.swap(0, 1);
    let bad = dir.path().join("bad.json");
    fs::write(&bad, doc.to_string()).unwrap();
    assert_eq!(
        run(&["check", "omega", "--input", bad.to_str().unwrap()])
            .status
            .code(),
        Some(1)
    );
}

#[test]
fn cubical_and_relation_checks_pass() {
    for kind in ["cubical", "relations"] {
        let o = run(&["check", kind, "--shape", "1x1", "--kmax", "3"]);
        assert_eq!(o.status.code(), Some(0), "{kind}: {}", stdout(&o));
    }
}

#[test]
fn dot_export_is_deterministic_and_matches_golden() {
    let a = stdout(&run(&["export-dot", "--shape", "1"]));
    let b = stdout(&run(&["export-dot", "--shape", "1"]));
    assert_eq!(a, b);
    assert_eq!(a, golden("m_1.dot"));
}

#[test]
fn roundtrip_report_matches_golden() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r.json");
    let o = run(&["roundtrip", "--shape", "1", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(fs::read_to_string(out).unwrap(), golden("roundtrip_1.json"));
}

#[test]
fn analyze_reports_census() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("a.json");
    let o = run(&[
        "analyze",
        "--shape",
        "1x1",
        "--kmax",
        "3",
        "--grade",
        "2",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("grade 2: 47 elements, 38 thin, 38 commutative boundaries"));
    let doc: serde_json::Value = serde_json::from_str(&fs::read_to_string(out).unwrap()).unwrap();
    assert_eq!(doc["census"][0]["thin"], 38);
    assert_eq!(doc["witnesses"].as_array().unwrap().len(), 38);
}
