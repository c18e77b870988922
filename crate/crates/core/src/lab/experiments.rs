//! The experiment procedures behind [`super::run_experiment`].

use crate::equilibrium::{
    assemble_energy_matrix_with, capacity_extrapolated_with, self_interaction_factor, solve_equilibrium, EquilibriumResult, Regularization,
};
use crate::error::{Error, Result};
use crate::geometry::{apply_linear, build_shape, measure, Discretization, Shape, ShapeKind, ShapeSpec};
use crate::kernels::{Kernel, KernelKind};
use crate::matrix_tools::{normalize, schatten_norm, Mat, Normalization};

use super::random::{condition_number, random_matrix, rng};
use super::report::{Cell, Report, SolveDiagnostic, Verdict};
use super::{ExperimentConfig, ExperimentKind, MatrixSource, RandomMatrices, SweepFamily, SweepSpec};

/// Orthogonality defect above which a strict margin is required.
const STRICT_DEFECT: f64 = 0.2;
/// Strict cases need a margin above this multiple of `ε_disc`.
const STRICT_FACTOR: f64 = 3.0;

pub(super) fn run(cfg: &ExperimentConfig) -> Result<Report> {
    match cfg.experiment {
        ExperimentKind::Capacity => capacity(cfg),
        ExperimentKind::Deform => deform(cfg),
        ExperimentKind::TheoremLog => theorem(cfg, false),
        ExperimentKind::TheoremRiesz => theorem(cfg, true),
        ExperimentKind::PolyaSchiffer => polya_schiffer(cfg),
        ExperimentKind::TwoCapacity => two_capacity(cfg),
        ExperimentKind::ConjectureVolume => conjecture_volume(cfg),
        ExperimentKind::ProblemBall => problem_ball(cfg),
        ExperimentKind::VerifyAll => Ok(super::verify::verify_all_report(cfg)),
    }
}

fn config_err(msg: impl Into<String>) -> Error {
    Error::Config(msg.into())
}

/// Solver settings shared by every solve of one run.
struct Solver {
    kernel: Kernel<f64>,
    reg: Regularization,
    tol: f64,
}

/// Outcome of one solve: the result when it converged, and the diagnostic
/// row either way.
struct Solve {
    result: Option<EquilibriumResult<f64>>,
    diag: SolveDiagnostic,
}

impl Solve {
    fn capacity(&self) -> Option<f64> {
        self.result.as_ref().map(|r| r.capacity)
    }
}

impl Solver {
    fn from_config(cfg: &ExperimentConfig, kernel: Kernel<f64>) -> Result<Self> {
        let scale = cfg.self_interaction_scale.unwrap_or(1.0);
        if !(scale > 0.0) || !scale.is_finite() {
            return Err(config_err("self_interaction_scale must be positive"));
        }
        let tol = cfg.solver_tolerance.unwrap_or(1e-9);
        if !(tol > 0.0) {
            return Err(config_err("solver_tolerance must be positive"));
        }
        Ok(Self { kernel, reg: Regularization { scale }, tol })
    }

    /// Kernel/shape pairing: Riesz needs `p` below the ambient dimension and
    /// a finite self-energy on the shape's cells.
    fn check_pairing(&self, shape: &Shape<f64>) -> Result<()> {
        self.kernel
            .check_dimension(shape.dim())
            .and_then(|()| self_interaction_factor(&self.kernel, shape.cell_dim()).map(|_| ()))
            .map_err(|e| config_err(format!("{}: {e}", shape.label())))
    }

    fn solve(&self, shape: &Shape<f64>, case: usize, label: &str) -> Solve {
        let mut diag = SolveDiagnostic {
            case,
            label: label.to_string(),
            nodes: shape.len(),
            iterations: 0,
            gap: f64::NAN,
            converged: false,
            frostman_ok: false,
            error: String::new(),
        };
        let outcome = assemble_energy_matrix_with(shape, &self.kernel, self.reg)
            .and_then(|a| solve_equilibrium(&a, self.tol, (200 * shape.len()).max(10_000)));
        match outcome {
            Ok(r) => {
                diag.iterations = r.iterations;
                diag.gap = r.gap;
                diag.converged = r.converged;
                diag.frostman_ok = r.satisfies_frostman();
                if !r.converged {
                    diag.error = "not converged".into();
                }
                let ok = r.converged;
                Solve { result: ok.then_some(r), diag }
            }
            Err(e) => {
                diag.error = e.to_string();
                Solve { result: None, diag }
            }
        }
    }
}

fn require_shape(cfg: &ExperimentConfig) -> Result<&ShapeSpec> {
    cfg.shape.as_ref().ok_or_else(|| config_err(format!("{} needs a shape", cfg.experiment)))
}

fn require_kernel(cfg: &ExperimentConfig) -> Result<Kernel<f64>> {
    let spec = cfg.kernel.ok_or_else(|| config_err(format!("{} needs a kernel", cfg.experiment)))?;
    spec.build().map_err(|e| config_err(e.to_string()))
}

fn build(spec: &ShapeSpec) -> Result<Shape<f64>> {
    build_shape(spec).map_err(|e| config_err(format!("shape: {e}")))
}

fn require_irreducible(shape: &Shape<f64>, what: ExperimentKind) -> Result<()> {
    if shape.has_irreducible_symmetry() {
        Ok(())
    } else {
        Err(config_err(format!("{what} needs a shape with an irreducible symmetry group")))
    }
}

fn matrix_text(m: &Mat<f64>) -> String {
    serde_json::to_string(&m.to_f64_rows()).expect("finite matrix serializes")
}

/// The configured matrices, checked for size. Random sweeps default to 20
/// matrices with condition number at most 10.
fn matrices(cfg: &ExperimentConfig, n: usize) -> Result<Vec<Mat<f64>>> {
    let source = cfg
        .matrices
        .clone()
        .unwrap_or(MatrixSource::Random(RandomMatrices { count: 20, condition_cap: 10.0, seed: 0 }));
    match source {
        MatrixSource::Random(r) => {
            if !(r.condition_cap >= 1.0) {
                return Err(config_err("condition_cap must be at least 1"));
            }
            let mut g = rng(r.seed);
            Ok((0..r.count).map(|_| random_matrix(&mut g, n, r.condition_cap)).collect())
        }
        MatrixSource::Explicit(list) => list
            .iter()
            .enumerate()
            .map(|(k, rows)| {
                let m = Mat::from_f64_rows(rows).map_err(|e| config_err(format!("matrix {k}: {e}")))?;
                if m.rows() != n || !m.is_square() {
                    return Err(config_err(format!("matrix {k} must be {n}×{n}")));
                }
                Ok(m)
            })
            .collect(),
    }
}

/// `ε_disc = 3 |C(res) − C(coarser)|` from the next coarser mesh level.
fn disc_error(solver: &Solver, spec: &ShapeSpec, c_fine: f64, report: &mut Report) -> Result<f64> {
    let coarse_res = spec.coarser_resolution().map_err(|e| config_err(format!("ε_disc: {e}")))?;
    let coarse = build(&spec.with_resolution(coarse_res))?;
    let s = solver.solve(&coarse, usize::MAX, "coarser level");
    let c = s.capacity();
    report.diagnostics.push(s.diag);
    match c {
        Some(c) => Ok(3.0 * (c_fine - c).abs()),
        None => Err(Error::NonConvergence("coarser level for ε_disc".into())),
    }
}

fn converged_verdict(report: &mut Report) {
    let failed = report.diagnostics.iter().filter(|d| !d.converged).count();
    let frost = report.diagnostics.iter().filter(|d| d.converged && !d.frostman_ok).count();
    report.verdicts.push(Verdict::new("solves_converged", failed == 0, Some(failed as f64), 0.0, "number of failed solves"));
    report.verdicts.push(Verdict::new(
        "frostman_complementarity",
        frost == 0,
        Some(frost as f64),
        0.0,
        "converged solves violating the Frostman conditions beyond their tolerance",
    ));
}

fn capacity(cfg: &ExperimentConfig) -> Result<Report> {
    let spec = require_shape(cfg)?;
    let kernel = require_kernel(cfg)?;
    let solver = Solver::from_config(cfg, kernel)?;
    let mut report = Report::new(
        cfg.experiment,
        cfg.clone(),
        &["case", "resolution", "nodes", "h", "energy", "capacity", "iterations", "gap", "converged"],
    );
    if cfg.levels.len() >= 3 {
        solver.check_pairing(&build(&spec.with_resolution(cfg.levels[0]))?)?;
        match capacity_extrapolated_with(spec, &kernel, &cfg.levels, solver.reg, solver.tol) {
            Ok(ex) => {
                for (k, l) in ex.levels.iter().enumerate() {
                    report.push_row(vec![
                        k.into(),
                        l.resolution.into(),
                        l.nodes.into(),
                        l.h.into(),
                        l.energy.into(),
                        l.capacity.into(),
                        l.iterations.into(),
                        l.gap.into(),
                        true.into(),
                    ]);
                }
                report.push_row(vec![
                    "extrapolated".into(),
                    Cell::Null,
                    Cell::Null,
                    0.0.into(),
                    Cell::Null,
                    ex.extrapolated.into(),
                    Cell::Null,
                    Cell::Null,
                    true.into(),
                ]);
                report.notes.push(format!(
                    "error model C(h) = C* + {:e} h^{:.4} (residual {:e}), monotone = {}",
                    ex.error_model.coefficient, ex.error_model.order, ex.error_model.residual, ex.monotone
                ));
                report.verdicts.push(Verdict::new("levels_converged", true, None, solver.tol, ""));
            }
            Err(Error::InvalidArgument(m)) => return Err(config_err(m)),
            Err(Error::NonConvergence(m)) => {
                report.verdicts.push(Verdict::new("levels_converged", false, None, solver.tol, m));
            }
            Err(e) => return Err(config_err(e.to_string())),
        }
        return Ok(report);
    }
    let levels = if cfg.levels.is_empty() { vec![spec.resolution] } else { cfg.levels.clone() };
    for (k, &res) in levels.iter().enumerate() {
        let shape = build(&spec.with_resolution(res))?;
        solver.check_pairing(&shape)?;
        let s = solver.solve(&shape, k, &format!("resolution {res}"));
        let r = s.result.as_ref();
        report.push_row(vec![
            k.into(),
            res.into(),
            shape.len().into(),
            (shape.len() as f64).powf(-1.0 / shape.cell_dim() as f64).into(),
            r.map_or(Cell::Null, |r| r.energy.into()),
            r.map_or(Cell::Null, |r| r.capacity.into()),
            s.diag.iterations.into(),
            s.diag.gap.into(),
            s.diag.converged.into(),
        ]);
        report.diagnostics.push(s.diag);
    }
    converged_verdict(&mut report);
    Ok(report)
}

fn deform(cfg: &ExperimentConfig) -> Result<Report> {
    let spec = require_shape(cfg)?;
    let kernel = require_kernel(cfg)?;
    let solver = Solver::from_config(cfg, kernel)?;
    let base = build(spec)?;
    solver.check_pairing(&base)?;
    let ms = matrices(cfg, base.dim())?;
    let mut report = Report::new(
        cfg.experiment,
        cfg.clone(),
        &["case", "matrix", "det", "condition", "orthogonality_defect", "capacity_K", "capacity_MK", "ratio"],
    );
    let s0 = solver.solve(&base, 0, "base");
    let c0 = s0.capacity();
    report.diagnostics.push(s0.diag);
    for (k, m) in ms.iter().enumerate() {
        let case = k + 1;
        let c = match apply_linear(&base, m) {
            Ok(mk) => {
                let s = solver.solve(&mk, case, "MK");
                let c = s.capacity();
                report.diagnostics.push(s.diag);
                c
            }
            Err(e) => {
                report.notes.push(format!("case {case}: {e}"));
                None
            }
        };
        report.push_row(vec![
            case.into(),
            matrix_text(m).into(),
            m.det().into(),
            condition_number(m).into(),
            m.orthogonality_defect().into(),
            c0.map_or(Cell::Null, Cell::num),
            c.map_or(Cell::Null, Cell::num),
            c.zip(c0).map_or(Cell::Null, |(a, b)| Cell::num(a / b)),
        ]);
    }
    converged_verdict(&mut report);
    Ok(report)
}

fn theorem(cfg: &ExperimentConfig, riesz: bool) -> Result<Report> {
    let spec = require_shape(cfg)?;
    let kernel = require_kernel(cfg)?;
    match (riesz, kernel.kind()) {
        (false, KernelKind::Log) | (true, KernelKind::Riesz) => {}
        (false, _) => return Err(config_err("theorem_log needs the logarithmic kernel")),
        (true, _) => return Err(config_err("theorem_riesz needs a Riesz kernel")),
    }
    let solver = Solver::from_config(cfg, kernel)?;
    let base = build(spec)?;
    solver.check_pairing(&base)?;
    require_irreducible(&base, cfg.experiment)?;
    let n = base.dim();
    let mode = if riesz { Normalization::InversePnorm { p: kernel.p() } } else { Normalization::Volume };
    let ms = matrices(cfg, n)?;
    let mut report = Report::new(
        cfg.experiment,
        cfg.clone(),
        &[
            "case",
            "matrix",
            "normalization",
            "condition",
            "orthogonality_defect",
            "capacity_K",
            "capacity_MK",
            "margin",
            "eps_disc",
            "threshold",
            "pass",
        ],
    );
    let s0 = solver.solve(&base, 0, "base");
    let c0 = s0.capacity();
    report.diagnostics.push(s0.diag);
    let Some(c0) = c0 else {
        report.verdicts.push(Verdict::new("base_solve", false, None, solver.tol, "base shape did not converge"));
        return Ok(report);
    };
    let eps = match disc_error(&solver, spec, c0, &mut report) {
        Ok(e) => e,
        Err(Error::Config(m)) => return Err(config_err(m)),
        Err(e) => {
            report.verdicts.push(Verdict::new("eps_disc", false, None, solver.tol, e.to_string()));
            return Ok(report);
        }
    };
    let norm_text = if riesz { format!("inverse_pnorm({})", kernel.p()) } else { "volume".to_string() };
    let (mut violations, mut strict_total, mut strict_fail, mut failed) = (0usize, 0usize, 0usize, 0usize);
    let mut worst_ratio = f64::INFINITY;
    for (k, m) in ms.iter().enumerate() {
        let case = k + 1;
        let normalized = normalize(m, mode);
        let (defect, c) = match normalized {
            Ok(mn) => {
                let defect = mn.orthogonality_defect();
                let c = match apply_linear(&base, &mn) {
                    Ok(mk) => {
                        let s = solver.solve(&mk, case, "MK");
                        let c = s.capacity();
                        report.diagnostics.push(s.diag);
                        c
                    }
                    Err(e) => {
                        report.notes.push(format!("case {case}: {e}"));
                        None
                    }
                };
                (defect, c)
            }
            Err(e) => {
                report.notes.push(format!("case {case}: {e}"));
                (f64::NAN, None)
            }
        };
        let strict = defect > STRICT_DEFECT;
        let threshold = if strict { STRICT_FACTOR * eps } else { -eps };
        let (margin, pass) = match c {
            Some(c) => {
                let margin = c - c0;
                let pass = margin >= -eps && (!strict || margin > threshold);
                if margin < -eps {
                    violations += 1;
                }
                if strict {
                    strict_total += 1;
                    if margin <= threshold {
                        strict_fail += 1;
                    }
                    worst_ratio = worst_ratio.min(margin / eps.max(f64::MIN_POSITIVE));
                }
                (margin, pass)
            }
            None => {
                failed += 1;
                (f64::NAN, false)
            }
        };
        report.push_row(vec![
            case.into(),
            matrix_text(m).into(),
            norm_text.clone().into(),
            condition_number(m).into(),
            defect.into(),
            c0.into(),
            c.map_or(Cell::Null, Cell::num),
            margin.into(),
            eps.into(),
            threshold.into(),
            pass.into(),
        ]);
    }
    report.verdicts.push(Verdict::new(
        "margin_at_least_minus_eps",
        violations == 0,
        Some(violations as f64),
        eps,
        "cases with margin < -eps_disc",
    ));
    report.verdicts.push(Verdict::new(
        "strict_margin_when_far_from_orthogonal",
        strict_fail == 0,
        (strict_total > 0).then_some(worst_ratio),
        STRICT_FACTOR * eps,
        format!("{strict_total} cases with defect > {STRICT_DEFECT}; value is the smallest margin / eps_disc"),
    ));
    report.verdicts.push(Verdict::new("cases_solved", failed == 0, Some(failed as f64), 0.0, "cases without a capacity"));
    report.notes.push(format!("eps_disc = 3 |C(res) - C(next coarser mesh)| = {eps:e}"));
    converged_verdict(&mut report);
    Ok(report)
}

/// Scale-invariant functional `C_p √(I^{n−1} / V^{n+1})`.
fn polya_functional(c: f64, shape: &Shape<f64>) -> Result<f64> {
    let m = measure(shape)?;
    let n = shape.dim() as i32;
    Ok(c * (m.inertia.powi(n - 1) / m.volume.powi(n + 1)).sqrt())
}

fn sweep_matrix(family: SweepFamily, s: f64, n: usize) -> Mat<f64> {
    match family {
        SweepFamily::Shear => Mat::from_fn(n, n, |i, j| if i == j { 1.0 } else if i == 0 && j == 1 { s } else { 0.0 }),
        SweepFamily::Stretch => Mat::from_fn(n, n, |i, j| if i != j { 0.0 } else if i == 0 { s.exp() } else { 1.0 }),
    }
}

fn default_sweep(n: usize) -> SweepSpec {
    let values = (0..21).map(|k| -1.0 + 0.1 * k as f64).map(|v: f64| (v * 10.0).round() / 10.0);
    if n == 2 {
        SweepSpec { family: SweepFamily::Shear, values: values.collect() }
    } else {
        SweepSpec { family: SweepFamily::Stretch, values: values.map(|v| 0.5 * v).collect() }
    }
}

fn polya_schiffer(cfg: &ExperimentConfig) -> Result<Report> {
    let spec = require_shape(cfg)?;
    let kernel = require_kernel(cfg)?;
    if kernel.kind() != KernelKind::Riesz {
        return Err(config_err("polya_schiffer needs a Riesz kernel"));
    }
    let base = build(spec)?;
    require_irreducible(&base, cfg.experiment)?;
    let n = base.dim();
    let p = kernel.p();
    let q = if n == 2 { 2.0 } else { 2.0 / (n as f64 - 1.0) };
    let admissible = if n == 2 { p > 0.0 && p < 2.0 } else { p > 0.0 && p <= q };
    if !admissible {
        return Err(config_err(format!("polya_schiffer needs 0 < p {} {q} in dimension {n}", if n == 2 { "<" } else { "≤" })));
    }
    let solver = Solver::from_config(cfg, kernel)?;
    solver.check_pairing(&base)?;
    let sweep = cfg.sweep.clone().unwrap_or_else(|| default_sweep(n));
    if sweep.values.is_empty() {
        return Err(config_err("sweep needs at least one value"));
    }
    let mut report = Report::new(
        cfg.experiment,
        cfg.clone(),
        &["case", "s", "matrix", "capacity", "inertia", "volume", "functional", "inv_pnorm", "inv_qnorm", "chain_bound", "chain_ok"],
    );
    let mut best: Option<(usize, f64)> = None;
    let mut chain_fail = 0usize;
    for (k, &s) in sweep.values.iter().enumerate() {
        let m = sweep_matrix(sweep.family, s, n);
        let inv = m.inverse()?;
        let inv_p = schatten_norm(&inv, p)?;
        let inv_q = schatten_norm(&inv, q)?;
        let bound = schatten_norm(&m, 2.0)?.powi(n as i32 - 1) / m.det().abs();
        let slack = 1e-12 * bound;
        let chain_ok = inv_p <= inv_q + slack && inv_q <= bound + slack;
        if !chain_ok {
            chain_fail += 1;
        }
        let mk = apply_linear(&base, &m)?;
        let sol = solver.solve(&mk, k, &format!("s = {s}"));
        let c = sol.capacity();
        report.diagnostics.push(sol.diag);
        let meas = measure(&mk)?;
        let f = match c {
            Some(c) => polya_functional(c, &mk)?,
            None => f64::NAN,
        };
        if f.is_finite() && best.is_none_or(|(_, b)| f < b) {
            best = Some((k, f));
        }
        report.push_row(vec![
            k.into(),
            s.into(),
            matrix_text(&m).into(),
            c.map_or(Cell::Null, Cell::num),
            meas.inertia.into(),
            meas.volume.into(),
            f.into(),
            inv_p.into(),
            inv_q.into(),
            bound.into(),
            chain_ok.into(),
        ]);
    }
    // The identity sits at s = 0; the minimum must lie within one grid step.
    let step = sweep.values.windows(2).map(|w| (w[1] - w[0]).abs()).fold(f64::INFINITY, f64::min);
    let step = if step.is_finite() { step } else { 0.0 };
    let (pass, value) = match best {
        Some((k, _)) => {
            let s_min = sweep.values[k];
            ((s_min.abs() <= step * (1.0 + 1e-9)), Some(s_min))
        }
        None => (false, None),
    };
    report.verdicts.push(Verdict::new(
        "minimum_at_identity",
        pass,
        value,
        step,
        "value is the sweep parameter of the smallest functional; the identity is s = 0",
    ));
    report.verdicts.push(Verdict::new(
        "schatten_chain",
        chain_fail == 0,
        Some(chain_fail as f64),
        1e-12,
        format!("‖M⁻¹‖_(p,n) ≤ ‖M⁻¹‖_(q,n) ≤ ‖M‖_(2,n)^(n-1)/|det M| with q = {q}; relative slack"),
    ));
    converged_verdict(&mut report);
    Ok(report)
}

fn two_capacity(cfg: &ExperimentConfig) -> Result<Report> {
    let spec = require_shape(cfg)?;
    let kernel = match cfg.kernel {
        Some(k) => k.build().map_err(|e| config_err(e.to_string()))?,
        None => Kernel::riesz(2.0)?,
    };
    if kernel.kind() != KernelKind::Riesz || kernel.p() != 2.0 {
        return Err(config_err("two_capacity uses the Riesz kernel with p = 2"));
    }
    let base = build(spec)?;
    let n = base.dim();
    if n < 3 {
        return Err(config_err("two_capacity needs dimension at least 3 (p = 2 < n)"));
    }
    require_irreducible(&base, cfg.experiment)?;
    let solver = Solver::from_config(cfg, kernel)?;
    solver.check_pairing(&base)?;
    let ms = matrices(cfg, n)?;
    let mut report = Report::new(
        cfg.experiment,
        cfg.clone(),
        &[
            "case",
            "matrix",
            "inv_2norm_times_det",
            "asymmetry_ratio",
            "identity_rel_err",
            "lhs",
            "rhs",
            "rel_margin",
            "tolerance",
            "pass",
        ],
    );
    let mk0 = measure(&base)?;
    let s0 = solver.solve(&base, 0, "base");
    let c0 = s0.capacity();
    report.diagnostics.push(s0.diag);
    let eps = match c0 {
        Some(c0) => disc_error(&solver, spec, c0, &mut report).map_err(|e| match e {
            Error::Config(m) => config_err(m),
            e => e,
        })?,
        None => f64::NAN,
    };
    let fnorm = |c: f64, v: f64| c / v.powf(1.0 / n as f64);
    let rhs = c0.map(|c| mk0.asymmetry * fnorm(c, mk0.volume));
    let (mut id_fail, mut ineq_fail) = (0usize, 0usize);
    let mut worst_id = 0.0f64;
    for (k, m) in ms.iter().enumerate() {
        let case = k + 1;
        let inv = m.inverse()?;
        let det = m.det().abs();
        let lhs_id = schatten_norm(&inv, 2.0)? * det.powf(1.0 / n as f64);
        let inv_shape = apply_linear(&base, &inv)?;
        let alpha_inv = measure(&inv_shape)?.asymmetry;
        let ratio = alpha_inv / mk0.asymmetry;
        let id_err = (lhs_id - ratio).abs() / ratio.abs();
        worst_id = worst_id.max(id_err);
        if !(id_err <= 1e-8) {
            id_fail += 1;
        }
        let mk = apply_linear(&base, m)?;
        let sol = solver.solve(&mk, case, "MK");
        let c = sol.capacity();
        report.diagnostics.push(sol.diag);
        let lhs = c.map(|c| alpha_inv * fnorm(c, measure(&mk).map(|x| x.volume).unwrap_or(f64::NAN)));
        let tol = c0.map_or(f64::NAN, |c0| eps / c0);
        let (rel, pass) = match (lhs, rhs) {
            (Some(l), Some(r)) => {
                let rel = l / r - 1.0;
                (rel, rel >= -tol)
            }
            _ => (f64::NAN, false),
        };
        if !pass {
            ineq_fail += 1;
        }
        report.push_row(vec![
            case.into(),
            matrix_text(m).into(),
            lhs_id.into(),
            ratio.into(),
            id_err.into(),
            lhs.map_or(Cell::Null, Cell::num),
            rhs.map_or(Cell::Null, Cell::num),
            rel.into(),
            tol.into(),
            pass.into(),
        ]);
    }
    report.verdicts.push(Verdict::new(
        "two_norm_identity",
        id_fail == 0,
        Some(worst_id),
        1e-8,
        "‖M⁻¹‖_(2,n) |det M|^(1/n) = α(M⁻¹K)/α(K); value is the largest relative error",
    ));
    report.verdicts.push(Verdict::new(
        "asymmetry_capacity_inequality",
        ineq_fail == 0,
        Some(ineq_fail as f64),
        c0.map_or(f64::NAN, |c| eps / c),
        "α(M⁻¹K)·C₂(MK)/V(MK)^(1/n) ≥ α(K)·C₂(K)/V(K)^(1/n) up to the relative eps_disc",
    ));
    converged_verdict(&mut report);
    Ok(report)
}

fn conjecture_volume(cfg: &ExperimentConfig) -> Result<Report> {
    let spec = require_shape(cfg)?;
    let kernel = require_kernel(cfg)?;
    if kernel.kind() != KernelKind::Riesz {
        return Err(config_err("conjecture_volume needs a Riesz kernel"));
    }
    let base = build(spec)?;
    let solver = Solver::from_config(cfg, kernel)?;
    solver.check_pairing(&base)?;
    let ms = matrices(cfg, base.dim())?;
    let mut report = Report::new(
        cfg.experiment,
        cfg.clone(),
        &["case", "matrix", "orthogonality_defect", "capacity_K", "capacity_MK", "margin", "eps_disc", "sign", "label"],
    );
    let s0 = solver.solve(&base, 0, "base");
    let c0 = s0.capacity();
    report.diagnostics.push(s0.diag);
    let eps = match c0 {
        Some(c) => disc_error(&solver, spec, c, &mut report).unwrap_or(f64::NAN),
        None => f64::NAN,
    };
    let (mut pos, mut neg, mut unresolved) = (0usize, 0usize, 0usize);
    for (k, m) in ms.iter().enumerate() {
        let case = k + 1;
        let mn = normalize(m, Normalization::Volume)?;
        let mk = apply_linear(&base, &mn)?;
        let sol = solver.solve(&mk, case, "MK");
        let c = sol.capacity();
        report.diagnostics.push(sol.diag);
        let margin = c.zip(c0).map(|(a, b)| a - b);
        let sign = match margin {
            Some(x) if x > eps => {
                pos += 1;
                "positive"
            }
            Some(x) if x < -eps => {
                neg += 1;
                "negative"
            }
            Some(_) => {
                unresolved += 1;
                "within_eps"
            }
            None => "unsolved",
        };
        report.push_row(vec![
            case.into(),
            matrix_text(m).into(),
            mn.orthogonality_defect().into(),
            c0.map_or(Cell::Null, Cell::num),
            c.map_or(Cell::Null, Cell::num),
            margin.map_or(Cell::Null, Cell::num),
            eps.into(),
            sign.into(),
            "EVIDENCE".into(),
        ]);
    }
    report.notes.push(format!(
        "EVIDENCE only: {pos} positive, {neg} negative, {unresolved} within eps_disc; nothing here is a proof"
    ));
    converged_verdict(&mut report);
    Ok(report)
}

fn problem_ball(cfg: &ExperimentConfig) -> Result<Report> {
    let resolution = cfg.shape.as_ref().map(|s| s.resolution).or(cfg.levels.first().copied()).unwrap_or(1000);
    let ps = if cfg.p_values.is_empty() { vec![0.25, 0.5, 0.75] } else { cfg.p_values.clone() };
    if let Some(p) = ps.iter().find(|&&p| !(p > 0.0 && p < 3.0)) {
        return Err(config_err(format!("problem_ball needs 0 < p < 3, got {p}")));
    }
    let shapes = [
        ("ball", ShapeSpec::ball((3.0 / (4.0 * std::f64::consts::PI)).cbrt(), resolution, Discretization::Volume)),
        ("cube", ShapeSpec::solid(ShapeKind::Cube, 1.0, resolution, Discretization::Volume)),
        ("tetrahedron", ShapeSpec::solid(ShapeKind::Tetrahedron, 1.0, resolution, Discretization::Volume)),
    ];
    let mut report = Report::new(
        cfg.experiment,
        cfg.clone(),
        &["case", "p", "shape", "nodes", "capacity", "eps_disc", "ratio_to_ball", "ball_not_larger", "label"],
    );
    let mut case = 0;
    for &p in &ps {
        let kernel = Kernel::riesz(p)?;
        let solver = Solver::from_config(cfg, kernel)?;
        let mut ball_c = None;
        for (name, spec) in &shapes {
            let shape = build(spec)?;
            solver.check_pairing(&shape)?;
            let sol = solver.solve(&shape, case, &format!("{name}, p = {p}"));
            let c = sol.capacity();
            report.diagnostics.push(sol.diag);
            let eps = match c {
                Some(c) => disc_error(&solver, spec, c, &mut report).unwrap_or(f64::NAN),
                None => f64::NAN,
            };
            if *name == "ball" {
                ball_c = c;
            }
            let ratio = c.zip(ball_c).map(|(a, b)| a / b);
            report.push_row(vec![
                case.into(),
                p.into(),
                (*name).into(),
                shape.len().into(),
                c.map_or(Cell::Null, Cell::num),
                eps.into(),
                ratio.map_or(Cell::Null, Cell::num),
                ratio.map_or(Cell::Null, |r| Cell::Bool(r >= 1.0)),
                "EVIDENCE".into(),
            ]);
            case += 1;
        }
    }
    report.notes.push("EVIDENCE only: unit-volume shapes compared at equal resolution; nothing here is a proof".into());
    converged_verdict(&mut report);
    Ok(report)
}
