//! Acceptance run. Prints one PASS/FAIL line per criterion and exits with a
//! failure status if any criterion fails.

use std::io::Write;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::Instant;

use caplab::equilibrium::{capacity_extrapolated, solve_equilibrium, EnergyMatrix};
use caplab::geometry::{Discretization, ShapeKind, ShapeSpec};
use caplab::kernels::Kernel;
use caplab::lab::verify::{self, SuiteResult};
use caplab::lab::{
    emit_report, run_experiment, ExperimentConfig, ExperimentKind, MatrixSource, OutputFormat, RandomMatrices, Report,
};

type Outcome = Result<String, String>;

/// Reports produced along the way; criterion 6 checks Frostman
/// complementarity on every solve they record.
#[derive(Default)]
struct Log {
    reports: Vec<Report>,
}

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn suite(s: Result<SuiteResult, caplab::Error>) -> (bool, String) {
    match s {
        Ok(s) => (s.pass, format!("{} {:.2e} (tol {:.0e})", s.name, s.value, s.tolerance)),
        Err(e) => (false, e.to_string()),
    }
}

fn within_budget(start: Instant, secs: f64, what: &str) -> Result<(), String> {
    let t = start.elapsed().as_secs_f64();
    if t <= secs {
        Ok(())
    } else {
        Err(format!("{what} took {t:.0} s, budget {secs:.0} s"))
    }
}

fn closed_form_capacities(_: &mut Log) -> Outcome {
    let r1 = Kernel::riesz(1.0).unwrap();
    let cases: [(&str, ShapeSpec, Kernel<f64>, &[usize], f64, f64); 4] = [
        ("disk", ShapeSpec::disk(1.0, 0, Discretization::Boundary), Kernel::log(), &[250, 500, 1000, 2000], 1.0, 0.005),
        ("segment", ShapeSpec::segment(4.0, 0), Kernel::log(), &[250, 500, 1000, 2000], 1.0, 0.005),
        ("ellipse", ShapeSpec::ellipse(2.0, 1.0, 0, Discretization::Boundary), Kernel::log(), &[250, 500, 1000, 2000], 1.5, 0.01),
        ("sphere", ShapeSpec::ball(1.0, 0, Discretization::Boundary), r1, &[500, 1000, 2000, 4000], 1.0, 0.01),
    ];
    let mut ok = true;
    let mut parts = Vec::new();
    for (name, spec, kernel, levels, exact, tol) in cases {
        let start = Instant::now();
        match capacity_extrapolated(&spec, &kernel, levels) {
            Ok(ex) => {
                let err = (ex.extrapolated - exact).abs() / exact;
                let nodes = ex.levels.last().map_or(0, |l| l.nodes);
                let fits = err <= tol && nodes <= 4000;
                let timed = within_budget(start, 120.0, name);
                ok &= fits && timed.is_ok();
                parts.push(format!("{name} {:.5} (rel err {err:.1e}, N ≤ {nodes})", ex.extrapolated));
                if let Err(e) = timed {
                    parts.push(e);
                }
            }
            Err(e) => {
                ok = false;
                parts.push(format!("{name}: {e}"));
            }
        }
    }
    check(ok, parts.join("; "))
}

fn exact_averaging_identities(_: &mut Log) -> Outcome {
    let results = [
        suite(verify::cyclic_averaging()),
        suite(verify::platonic_averaging()),
        suite(verify::moment_identity(50)),
    ];
    check(results.iter().all(|r| r.0), results.map(|r| r.1).join("; "))
}

fn variation_suite(_: &mut Log) -> Outcome {
    let start = Instant::now();
    let r1 = Kernel::riesz(1.0).unwrap();
    let cases = [
        ("square/log", ShapeSpec::regular_polygon(4, 1.0, 400, Discretization::Boundary), Kernel::log()),
        ("hexagon/log", ShapeSpec::regular_polygon(6, 1.0, 420, Discretization::Boundary), Kernel::log()),
        ("cube/log", ShapeSpec::solid(ShapeKind::Cube, 1.0, 600, Discretization::Boundary), Kernel::log()),
        ("square/riesz1", ShapeSpec::regular_polygon(4, 1.0, 400, Discretization::Volume), r1),
        ("hexagon/riesz1", ShapeSpec::regular_polygon(6, 1.0, 400, Discretization::Volume), r1),
        ("cube/riesz1", ShapeSpec::solid(ShapeKind::Cube, 1.0, 600, Discretization::Boundary), r1),
    ];
    let mut ok = true;
    let (mut first, mut fd, mut d2, mut strict) = (0.0f64, 0.0f64, f64::NEG_INFINITY, true);
    let mut failures = Vec::new();
    for (k, (name, spec, kernel)) in cases.into_iter().enumerate() {
        match verify::variation_check(&spec, &kernel, 100 + k as u64) {
            Ok(c) => {
                first = first.max(c.first_over_second);
                fd = fd.max(c.fd_rel_err);
                d2 = d2.max(c.max_rel_d2);
                strict &= c.zero_is_strict_maximum;
                if !c.pass() {
                    ok = false;
                    failures.push(format!("{name}: {c:?}"));
                }
            }
            Err(e) => {
                ok = false;
                failures.push(format!("{name}: {e}"));
            }
        }
    }
    let timed = within_budget(start, 300.0, "variation suite");
    ok &= timed.is_ok();
    let mut detail = format!(
        "max |E'(0)|/|E''(0)| {first:.1e} (tol 1e-8), fd mismatch {fd:.1e} (tol 1e-6), \
         max E''/|E| {d2:.1e} (tol 1e-10), E(0) strict max {strict}"
    );
    for f in failures.into_iter().chain(timed.err()) {
        detail.push_str("; ");
        detail.push_str(&f);
    }
    check(ok, detail)
}

fn theorem_config(kind: ExperimentKind, spec: ShapeSpec, kernel: &Kernel<f64>) -> ExperimentConfig {
    let mut cfg = ExperimentConfig::new(kind);
    cfg.shape = Some(spec);
    cfg.kernel = Some(kernel.spec());
    cfg.matrices = Some(MatrixSource::Random(RandomMatrices { count: 20, condition_cap: 10.0, seed: 7 }));
    cfg
}

fn theorem_reproduction(log: &mut Log) -> Outcome {
    let start = Instant::now();
    let r1 = Kernel::riesz(1.0).unwrap();
    let r2 = Kernel::riesz(2.0).unwrap();
    let polygons = [("square", 4), ("triangle", 3), ("pentagon", 5)];
    let mut runs = Vec::new();
    for (name, n) in polygons {
        let spec = ShapeSpec::regular_polygon(n, 1.0, 800, Discretization::Boundary);
        runs.push((format!("log/{name}"), theorem_config(ExperimentKind::TheoremLog, spec, &Kernel::log())));
    }
    for (name, n) in polygons {
        let spec = ShapeSpec::regular_polygon(n, 1.0, 1000, Discretization::Volume);
        runs.push((format!("p1/{name}"), theorem_config(ExperimentKind::TheoremRiesz, spec, &r1)));
    }
    for (name, kind) in [("cube", ShapeKind::Cube), ("tetrahedron", ShapeKind::Tetrahedron)] {
        let spec = ShapeSpec::solid(kind, 1.0, 2000, Discretization::Boundary);
        runs.push((format!("p1/{name}"), theorem_config(ExperimentKind::TheoremRiesz, spec, &r1)));
        let spec = ShapeSpec::solid(kind, 1.0, 4000, Discretization::Volume);
        runs.push((format!("p2/{name}"), theorem_config(ExperimentKind::TheoremRiesz, spec, &r2)));
    }
    let mut ok = true;
    let (mut violations, mut strict_cases, mut worst_ratio) = (0.0, 0usize, f64::INFINITY);
    let mut failures = Vec::new();
    for (name, cfg) in runs {
        match run_experiment(&cfg) {
            Ok(report) => {
                let judged = ["margin_at_least_minus_eps", "strict_margin_when_far_from_orthogonal", "cases_solved"];
                for v in judged {
                    match report.verdict(v) {
                        Some(v) if v.pass => {}
                        Some(v) => {
                            ok = false;
                            failures.push(format!("{name}: {} failed (value {:?})", v.name, v.value));
                        }
                        None => {
                            ok = false;
                            failures.push(format!("{name}: no {v} verdict"));
                        }
                    }
                }
                if let Some(v) = report.verdict("margin_at_least_minus_eps").and_then(|v| v.value) {
                    violations += v;
                }
                if let Some(r) = report.verdict("strict_margin_when_far_from_orthogonal").and_then(|v| v.value) {
                    worst_ratio = worst_ratio.min(r);
                }
                let defect = report.column("orthogonality_defect").unwrap();
                strict_cases += report.rows.iter().filter(|r| r[defect].as_f64().is_some_and(|d| d > 0.2)).count();
                log.reports.push(report);
            }
            Err(e) => {
                ok = false;
                failures.push(format!("{name}: {e}"));
            }
        }
    }
    let timed = within_budget(start, 600.0, "theorem runs");
    ok &= timed.is_ok();
    let mut detail = format!(
        "10 runs × 20 matrices: {violations} margins below -eps_disc; {strict_cases} cases with defect > 0.2, \
         smallest margin/eps_disc {worst_ratio:.2} (needs > 3)"
    );
    for f in failures.into_iter().chain(timed.err()) {
        detail.push_str("; ");
        detail.push_str(&f);
    }
    check(ok, detail)
}

fn polya_schiffer_and_two_capacity(log: &mut Log) -> Outcome {
    let r1 = Kernel::riesz(1.0).unwrap();
    let r2 = Kernel::riesz(2.0).unwrap();
    let runs = [
        (
            "triangle shear",
            ExperimentKind::PolyaSchiffer,
            ShapeSpec::regular_polygon(3, 1.0, 800, Discretization::Volume),
            r1,
            "minimum_at_identity",
        ),
        (
            "cube stretch",
            ExperimentKind::PolyaSchiffer,
            ShapeSpec::solid(ShapeKind::Cube, 1.0, 1500, Discretization::Boundary),
            r1,
            "minimum_at_identity",
        ),
        (
            "two-capacity identity",
            ExperimentKind::TwoCapacity,
            ShapeSpec::solid(ShapeKind::Cube, 1.0, 1000, Discretization::Volume),
            r2,
            "two_norm_identity",
        ),
    ];
    let mut ok = true;
    let mut parts = Vec::new();
    for (name, kind, spec, kernel, verdict) in runs {
        let mut cfg = ExperimentConfig::new(kind);
        cfg.shape = Some(spec);
        cfg.kernel = Some(kernel.spec());
        if kind == ExperimentKind::TwoCapacity {
            cfg.matrices = Some(MatrixSource::Random(RandomMatrices { count: 20, condition_cap: 10.0, seed: 7 }));
        }
        match run_experiment(&cfg) {
            Ok(report) => {
                match report.verdict(verdict) {
                    Some(v) => {
                        ok &= v.pass;
                        let value = v.value.map_or("-".into(), |x| format!("{x:.2e}"));
                        parts.push(format!("{name}: {} {} (value {value}, tol {:.1e})", v.name, v.pass, v.tolerance));
                    }
                    None => {
                        ok = false;
                        parts.push(format!("{name}: no {verdict} verdict"));
                    }
                }
                log.reports.push(report);
            }
            Err(e) => {
                ok = false;
                parts.push(format!("{name}: {e}"));
            }
        }
    }
    check(ok, parts.join("; "))
}

fn property_suites(log: &mut Log) -> Outcome {
    let mut results = vec![
        suite(verify::kernel_growth()),
        suite(verify::schatten_chain(200)),
        suite(verify::scaling_law()),
        suite(verify::orthogonal_invariance()),
        suite(verify::frostman_and_symmetry()),
        suite(verify::determinism()),
    ];

    // Frostman complementarity on every converged solve of the runs above.
    let solves: usize = log.reports.iter().map(|r| r.diagnostics.iter().filter(|d| d.converged).count()).sum();
    let bad: usize = log.reports.iter().map(|r| r.diagnostics.iter().filter(|d| d.converged && !d.frostman_ok).count()).sum();
    results.push((bad == 0, format!("frostman on {solves} experiment solves: {bad} violations")));

    // Byte-identical report files from two seeded runs.
    let files = (|| -> Result<bool, caplab::Error> {
        let mut cfg = ExperimentConfig::new(ExperimentKind::TheoremRiesz);
        cfg.shape = Some(ShapeSpec::regular_polygon(5, 1.0, 200, Discretization::Volume));
        cfg.kernel = Some(Kernel::<f64>::riesz(1.0)?.spec());
        cfg = cfg.with_seed(3);
        let dirs = [tempfile::tempdir()?, tempfile::tempdir()?];
        let mut bytes = Vec::new();
        for d in &dirs {
            let report = run_experiment(&cfg)?;
            for format in [OutputFormat::Json, OutputFormat::Csv] {
                bytes.push(std::fs::read(emit_report(&report, d.path(), format)?)?);
            }
        }
        Ok(bytes[0] == bytes[2] && bytes[1] == bytes[3])
    })();
    results.push(match files {
        Ok(same) => (same, format!("report files byte-identical: {same}")),
        Err(e) => (false, e.to_string()),
    });
    check(results.iter().all(|r| r.0), results.into_iter().map(|r| r.1).collect::<Vec<_>>().join("; "))
}

/// Weights minimizing `wᵀAw` over the simplex grid of the given step,
/// by enumeration.
fn grid_minimizer(a: &[Vec<f64>], step: f64) -> Vec<f64> {
    let n = a.len();
    let m = (1.0 / step).round() as usize;
    let mut best = (f64::INFINITY, vec![0.0; n]);
    let mut counts = vec![0usize; n];
    loop {
        let used: usize = counts[..n - 1].iter().sum();
        if used <= m {
            counts[n - 1] = m - used;
            let w: Vec<f64> = counts.iter().map(|&c| c as f64 / m as f64).collect();
            let q: f64 = (0..n).map(|i| (0..n).map(|j| a[i][j] * w[i] * w[j]).sum::<f64>()).sum();
            if q < best.0 {
                best = (q, w);
            }
        }
        // Odometer over the first n − 1 counts.
        let mut k = 0;
        loop {
            if k == n - 1 {
                return best.1;
            }
            counts[k] += 1;
            if counts[k] <= m {
                break;
            }
            counts[k] = 0;
            k += 1;
        }
    }
}

fn small_instance_oracle(_: &mut Log) -> Outcome {
    let riesz = |p: f64| move |r: f64| r.powf(-p);
    let log_k = |r: f64| -r.ln();
    type Problem = (&'static str, Vec<Vec<f64>>, Box<dyn Fn(f64) -> f64>, f64, Kernel<f64>);
    let problems: Vec<Problem> = vec![
        ("collinear 0,1,3 p=1", vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![3.0, 0.0]], Box::new(riesz(1.0)), 0.2, Kernel::riesz(1.0).unwrap()),
        ("isosceles log", vec![vec![0.0, 0.0], vec![0.6, 0.0], vec![0.3, 0.2]], Box::new(log_k), 0.04, Kernel::log()),
        ("kite log", vec![vec![0.0, 0.0], vec![0.5, 0.1], vec![0.5, -0.1], vec![0.9, 0.0]], Box::new(log_k), 0.06, Kernel::log()),
        ("trapezoid p=1/2", vec![vec![0.0, 0.0], vec![3.0, 0.0], vec![1.0, 1.0], vec![2.0, 1.0]], Box::new(riesz(0.5)), 0.3, Kernel::riesz(0.5).unwrap()),
        ("spatial p=2", vec![vec![0.0, 0.0, 0.0], vec![1.0, 0.0, 0.0], vec![0.0, 1.5, 0.0], vec![0.2, 0.3, 2.0]], Box::new(riesz(2.0)), 0.5, Kernel::riesz(2.0).unwrap()),
    ];
    let mut worst = 0.0f64;
    let mut parts = Vec::new();
    for (name, pts, phi, rho, kernel) in problems {
        let n = pts.len();
        let a: Vec<Vec<f64>> = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        let d = pts[i].iter().zip(&pts[j]).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt();
                        if i == j { phi(rho) } else { phi(d) }
                    })
                    .collect()
            })
            .collect();
        let flat: Vec<f64> = a.iter().flatten().copied().collect();
        let solved = EnergyMatrix::from_entries(n, flat, kernel).and_then(|m| solve_equilibrium(&m, 1e-12, 100_000));
        match solved {
            Ok(r) => {
                let oracle = grid_minimizer(&a, 1e-3);
                let err = r.weights.iter().zip(&oracle).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
                worst = worst.max(err);
                parts.push(format!("{name} {err:.1e}"));
            }
            Err(e) => {
                worst = f64::INFINITY;
                parts.push(format!("{name}: {e}"));
            }
        }
    }
    check(worst <= 2e-3, format!("max weight difference {worst:.2e} (tol 2e-3): {}", parts.join(", ")))
}

fn main() {
    let criteria: [(&str, fn(&mut Log) -> Outcome); 7] = [
        ("closed-form capacities", closed_form_capacities),
        ("exact averaging identities", exact_averaging_identities),
        ("variation suite", variation_suite),
        ("theorem reproduction", theorem_reproduction),
        ("Pólya–Schiffer and two-capacity identity", polya_schiffer_and_two_capacity),
        ("property suites", property_suites),
        ("small-instance oracle", small_instance_oracle),
    ];
    let mut log = Log::default();
    let mut failed = 0;
    for (k, (name, f)) in criteria.into_iter().enumerate() {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(|| f(&mut log)))
            .unwrap_or_else(|p| Err(format!("panicked: {}", p.downcast_ref::<String>().cloned().unwrap_or_default())));
        let secs = start.elapsed().as_secs_f64();
        let (tag, detail) = match outcome {
            Ok(d) => ("PASS", d),
            Err(d) => {
                failed += 1;
                ("FAIL", d)
            }
        };
        println!("criterion {}: {tag} {name} [{secs:.1} s] {detail}", k + 1);
        std::io::stdout().flush().ok();
    }
    if failed > 0 {
        println!("{failed} of 7 criteria failed");
        std::process::exit(1);
    }
    println!("all 7 criteria passed");
}
