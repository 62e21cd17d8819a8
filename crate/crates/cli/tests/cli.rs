use std::path::Path;
use std::process::{Command, Output};

fn rearrkit(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rearrkit")).args(args).env("RK_THREADS", "2").output().expect("binary runs")
}

fn rows(path: &Path) -> Vec<serde_json::Value> {
    let text = std::fs::read_to_string(path).unwrap();
    serde_json::from_str::<Vec<serde_json::Value>>(&text).unwrap()
}

#[test]
fn hl_suite_writes_one_row_per_trial() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("report.json");
    let o = rearrkit(&["verify", "hl", "--trials", "10", "--seed", "7", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let rows = rows(&out);
    assert_eq!(rows.len(), 10);
    for (k, row) in rows.iter().enumerate() {
        assert_eq!(row["trial"], k);
        assert_eq!(row["holds"], true);
        let keys: Vec<&str> = row.as_object().unwrap().keys().map(String::as_str).collect();
        assert_eq!(keys.len(), 5);
    }
}

#[test]
fn reports_are_byte_identical_across_runs_and_thread_counts() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    let args = |p: &Path| vec!["verify".to_string(), "riesz".into(), "--trials".into(), "3".into(), "--seed".into(), "11".into(), "--out".into(), p.display().to_string()];
    let run = |p: &Path, threads: &str| {
        let o = Command::new(env!("CARGO_BIN_EXE_rearrkit")).args(args(p)).env("RK_THREADS", threads).output().unwrap();
        assert_eq!(o.status.code(), Some(0));
    };
    run(&a, "1");
    run(&b, "4");
    let (ta, tb) = (std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    assert_eq!(ta, tb);
    assert!(String::from_utf8(ta).unwrap().starts_with("trial,lhs,rhs,slack,holds\n"));
}

#[test]
fn counterexample_passes_with_a_strict_decrease() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("c.json");
    let o = rearrkit(&["counterexample", "riesz", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let rows = rows(&out);
    assert_eq!(rows.len(), 1);
    assert_eq!(rows[0]["lhs"], 0.0);
    assert!(rows[0]["slack"].as_f64().unwrap() > 0.0);
}

#[test]
fn malformed_or_mismatched_config_exits_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{ not json").unwrap();
    assert_eq!(rearrkit(&["verify", "hl", "--config", bad.to_str().unwrap()]).status.code(), Some(2));
    let other = dir.path().join("other.json");
    std::fs::write(&other, r#"{"suite": "riesz"}"#).unwrap();
    assert_eq!(rearrkit(&["verify", "hl", "--config", other.to_str().unwrap()]).status.code(), Some(2));
    let unknown = dir.path().join("unknown.json");
    std::fs::write(&unknown, r#"{"suite": "hl", "colour": 1}"#).unwrap();
    assert_eq!(rearrkit(&["verify", "hl", "--config", unknown.to_str().unwrap()]).status.code(), Some(2));
    assert_eq!(rearrkit(&["verify", "nope"]).status.code(), Some(2));
}

#[test]
fn violated_inequality_exits_with_one() {
    // An anti-comonotone table outside the supermodular class makes the
    // oracle disagree with the rearranged functional.
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("oracle.json");
    std::fs::write(
        &cfg,
        r#"{"suite": "oracle", "trials": 2,
            "integrand": {"family": "table", "axes": [[0, 1], [0, 1]], "values": [0, 0, 0, -1]}}"#,
    )
    .unwrap();
    let o = rearrkit(&["oracle", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1), "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn config_file_drives_the_run() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("tp.json");
    let out = dir.path().join("tp.csv");
    std::fs::write(
        &cfg,
        format!(
            r#"{{"suite": "two-point", "trials": 2, "seed": 3,
                "domain": {{"kind": "circle", "extent": 6.0, "n": 12}},
                "functional": "riesz", "kernels": [{{"form": "exp", "alpha": 1.0}}],
                "output": {{"path": "{}"}}}}"#,
            out.display()
        ),
    )
    .unwrap();
    let o = rearrkit(&["two-point", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(std::fs::read_to_string(&out).unwrap().lines().count(), 3);
}

#[test]
fn remaining_suites_run() {
    let dir = tempfile::tempdir().unwrap();
    let trace = dir.path().join("trace.csv");
    for args in [
        vec!["bm-check", "--trials", "20"],
        vec!["oracle", "--trials", "3"],
        vec!["rearrange", "--trials", "2"],
        vec!["optics", "solve", "--trials", "2", "--trace", trace.to_str().unwrap()],
    ] {
        let o = rearrkit(&args);
        assert_eq!(o.status.code(), Some(0), "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
        let rows: Vec<serde_json::Value> = serde_json::from_slice(&o.stdout).unwrap();
        assert!(!rows.is_empty());
    }
    assert!(std::fs::read_to_string(&trace).unwrap().starts_with("trial,iter,energy,dirichlet,potential,symmetrized\n"));
}
