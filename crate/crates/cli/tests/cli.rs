use std::path::Path;
use std::process::{Command, Output};

fn caplab(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_caplab")).args(args).current_dir(dir).output().unwrap()
}

fn write(dir: &Path, name: &str, text: &str) {
    std::fs::write(dir.join(name), text).unwrap();
}

const SQUARE_LOG: &str = r#"{"experiment":"theorem_log",
  "shape":{"kind":"regular_polygon","N":4,"resolution":160},
  "kernel":{"kind":"log"},
  "matrices":{"count":3,"condition_cap":10,"seed":1}}"#;

#[test]
fn passing_run_exits_zero_and_writes_the_report() {
    let tmp = tempfile::tempdir().unwrap();
    write(tmp.path(), "cfg.json", SQUARE_LOG);
    let out = caplab(&["theorem-log", "--config", "cfg.json", "--out", "reports", "--format", "csv"], tmp.path());
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = std::fs::read_to_string(tmp.path().join("reports/theorem_log.csv")).unwrap();
    assert!(csv.starts_with("case,matrix,normalization,"));
    assert_eq!(csv.lines().count(), 4);
    assert!(String::from_utf8_lossy(&out.stderr).contains("wall time"));
}

#[test]
fn report_files_do_not_depend_on_wall_time() {
    let tmp = tempfile::tempdir().unwrap();
    write(tmp.path(), "cfg.json", SQUARE_LOG);
    for dir in ["a", "b"] {
        let out = caplab(&["theorem_log", "--config", "cfg.json", "--seed", "5", "--out", dir], tmp.path());
        assert_eq!(out.status.code(), Some(0));
    }
    let a = std::fs::read(tmp.path().join("a/theorem_log.json")).unwrap();
    let b = std::fs::read(tmp.path().join("b/theorem_log.json")).unwrap();
    assert_eq!(a, b);
    let report: serde_json::Value = serde_json::from_slice(&a).unwrap();
    assert_eq!(report["schema"], "caplab-report/1");
    assert_eq!(report["inputs"]["matrices"]["seed"], 5);
}

#[test]
fn failing_verdict_exits_one() {
    let tmp = tempfile::tempdir().unwrap();
    // A grid that misses s = 0 by more than one step cannot put the minimum
    // at the identity.
    write(
        tmp.path(),
        "cfg.json",
        r#"{"experiment":"polya_schiffer",
            "shape":{"kind":"regular_polygon","N":3,"resolution":150,"discretize":"volume"},
            "kernel":{"kind":"riesz","p":1},
            "sweep":{"family":"shear","values":[0.5,0.6,0.7]}}"#,
    );
    let out = caplab(&["polya_schiffer", "--config", "cfg.json"], tmp.path());
    assert_eq!(out.status.code(), Some(1), "{}", String::from_utf8_lossy(&out.stderr));
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["experiment"], "polya_schiffer");
}

#[test]
fn configuration_problems_exit_two() {
    let tmp = tempfile::tempdir().unwrap();
    write(tmp.path(), "cfg.json", SQUARE_LOG);
    write(tmp.path(), "bad.json", r#"{"experiment":"theorem_log","bogus":true}"#);
    write(
        tmp.path(),
        "riesz.json",
        r#"{"experiment":"theorem_log","shape":{"kind":"regular_polygon","N":4,"resolution":100},"kernel":{"kind":"riesz","p":1}}"#,
    );
    let cases: [&[&str]; 6] = [
        &["theorem_log", "--config", "bad.json"],
        &["theorem_log", "--config", "riesz.json"],
        &["theorem_log", "--config", "missing.json"],
        &["capacity", "--config", "cfg.json"],
        &["no_such_experiment", "--config", "cfg.json"],
        &["theorem_log"],
    ];
    for args in cases {
        let out = caplab(args, tmp.path());
        assert_eq!(out.status.code(), Some(2), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    }
    let out = caplab(&["theorem_log", "--config", "cfg.json", "--format", "xml"], tmp.path());
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn thread_cap_is_validated() {
    let tmp = tempfile::tempdir().unwrap();
    write(tmp.path(), "cfg.json", SQUARE_LOG);
    let run = |threads: &str| {
        Command::new(env!("CARGO_BIN_EXE_caplab"))
            .args(["theorem_log", "--config", "cfg.json"])
            .env("CAPLAB_THREADS", threads)
            .current_dir(tmp.path())
            .output()
            .unwrap()
    };
    assert_eq!(run("0").status.code(), Some(2));
    assert_eq!(run("many").status.code(), Some(2));
    assert_eq!(run("1").status.code(), Some(0));
}

#[test]
fn verify_all_needs_no_config() {
    let tmp = tempfile::tempdir().unwrap();
    let out = caplab(&["verify-all", "--format", "csv"], tmp.path());
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = String::from_utf8(out.stdout).unwrap();
    assert!(csv.starts_with("suite,value,tolerance,pass,detail\r\n"));
    assert!(csv.lines().skip(1).all(|l| l.contains(",true,")), "{csv}");
}
