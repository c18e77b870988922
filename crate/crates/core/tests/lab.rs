use caplab::lab::{run_experiment, Cell, ExperimentConfig, ExperimentKind, MatrixSource, RandomMatrices, Report};
use caplab::geometry::{Discretization, ShapeSpec};
use caplab::{Error, Kernel};

fn config(json: &str) -> ExperimentConfig {
    ExperimentConfig::from_json_str(json).unwrap()
}

fn is_config_error<T: std::fmt::Debug>(r: Result<T, Error>) -> bool {
    matches!(r, Err(Error::Config(_)))
}

#[test]
fn rotation_leaves_the_log_capacity_unchanged() {
    let (s, c) = (std::f64::consts::PI / 6.0).sin_cos();
    let mut cfg = config(
        r#"{"experiment":"theorem_log","shape":{"kind":"regular_polygon","N":4,"resolution":200},"kernel":{"kind":"log"}}"#,
    );
    cfg.matrices = Some(MatrixSource::Explicit(vec![vec![vec![c, -s], vec![s, c]]]));
    let r = run_experiment(&cfg).unwrap();
    assert_eq!(r.rows.len(), 1);
    let margin = r.cell(0, "margin").and_then(Cell::as_f64).unwrap();
    let eps = r.cell(0, "eps_disc").and_then(Cell::as_f64).unwrap();
    assert!(margin.abs() <= eps, "margin {margin}, eps {eps}");
    assert!(r.passed());
}

#[test]
fn empty_sweep_gives_header_only_csv() {
    let mut cfg = ExperimentConfig::new(ExperimentKind::TheoremLog);
    cfg.shape = Some(ShapeSpec::regular_polygon(4, 1.0, 100, Discretization::Boundary));
    cfg.kernel = Some(Kernel::log().spec());
    cfg.matrices = Some(MatrixSource::Random(RandomMatrices { count: 0, condition_cap: 10.0, seed: 1 }));
    let r = run_experiment(&cfg).unwrap();
    assert!(r.rows.is_empty());
    assert_eq!(r.to_csv_string().unwrap().lines().count(), 1);
}

#[test]
fn reports_round_trip_through_json() {
    let cfg = config(
        r#"{"experiment":"deform","shape":{"kind":"regular_polygon","N":3,"resolution":90},
            "kernel":{"kind":"riesz","p":0.5},"matrices":[[[2,0],[0,1]],[[1,1],[0,1]]]}"#,
    );
    let r = run_experiment(&cfg).unwrap();
    assert_eq!(r.rows.len(), 2);
    let back = Report::from_json_str(&r.to_json_string().unwrap()).unwrap();
    assert_eq!(back, r);
    assert_eq!(back.schema, "caplab-report/1");
}

#[test]
fn kernel_must_match_the_experiment() {
    let bad = [
        r#"{"experiment":"theorem_log","shape":{"kind":"regular_polygon","N":4,"resolution":100},"kernel":{"kind":"riesz","p":1}}"#,
        r#"{"experiment":"theorem_riesz","shape":{"kind":"regular_polygon","N":4,"resolution":100},"kernel":{"kind":"log"}}"#,
        // p must not exceed 2/(n−1) = 1 in three dimensions.
        r#"{"experiment":"polya_schiffer","shape":{"kind":"cube","resolution":100},"kernel":{"kind":"riesz","p":1.5}}"#,
        // Two-capacity needs n ≥ 3.
        r#"{"experiment":"two_capacity","shape":{"kind":"regular_polygon","N":4,"resolution":100},"kernel":{"kind":"riesz","p":2}}"#,
        // Infinite self-energy on boundary segments.
        r#"{"experiment":"theorem_riesz","shape":{"kind":"regular_polygon","N":4,"resolution":100},"kernel":{"kind":"riesz","p":1}}"#,
        // No symmetry group.
        r#"{"experiment":"theorem_log","shape":{"kind":"triangle","vertices":[[0,0],[2,0],[0.3,0.9]],"resolution":60},"kernel":{"kind":"log"}}"#,
    ];
    for json in bad {
        assert!(is_config_error(run_experiment(&config(json))), "{json}");
    }
}

#[test]
fn missing_pieces_are_config_errors() {
    assert!(is_config_error(run_experiment(&config(r#"{"experiment":"capacity"}"#))));
    assert!(is_config_error(run_experiment(&config(
        r#"{"experiment":"deform","shape":{"kind":"disk","resolution":50},"kernel":{"kind":"log"},"matrices":[[[1,0,0],[0,1,0],[0,0,1]]]}"#
    ))));
}

#[test]
fn evidence_experiments_never_claim_proof() {
    let cfg = config(
        r#"{"experiment":"conjecture_volume","shape":{"kind":"regular_polygon","N":4,"resolution":100,"discretize":"volume"},
            "kernel":{"kind":"riesz","p":0.5},"matrices":{"count":3,"seed":2}}"#,
    );
    let r = run_experiment(&cfg).unwrap();
    assert!(r.evidence);
    assert!(r.rows.iter().all(|row| row.last() == Some(&Cell::text("EVIDENCE"))));
    let json = r.to_json_string().unwrap();
    assert!(!json.to_lowercase().contains("proved"));
}

#[test]
fn capacity_refinement_reports_each_level() {
    let cfg = config(
        r#"{"experiment":"capacity","shape":{"kind":"disk","radius":1,"resolution":100},"kernel":{"kind":"log"},
            "levels":[64,128,256]}"#,
    );
    let r = run_experiment(&cfg).unwrap();
    assert_eq!(r.rows.len(), 4);
    let extrapolated = r.cell(3, "capacity").and_then(Cell::as_f64).unwrap();
    assert!((extrapolated - 1.0).abs() < 1e-3);
    assert!(r.passed());
}

#[test]
fn seeded_runs_serialize_identically() {
    let cfg = config(
        r#"{"experiment":"theorem_riesz","shape":{"kind":"regular_polygon","N":5,"resolution":150,"discretize":"volume"},
            "kernel":{"kind":"riesz","p":1},"matrices":{"count":4,"seed":11}}"#,
    );
    let a = run_experiment(&cfg).unwrap();
    let b = run_experiment(&cfg).unwrap();
    assert_eq!(a.to_json_string().unwrap(), b.to_json_string().unwrap());
    assert_eq!(a.to_csv_string().unwrap(), b.to_csv_string().unwrap());
    let c = run_experiment(&cfg.clone().with_seed(12)).unwrap();
    assert_ne!(a.to_csv_string().unwrap(), c.to_csv_string().unwrap());
}
