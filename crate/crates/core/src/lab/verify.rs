//! Invariant suites run by `verify_all`. Each suite is cheap (seconds) and
//! reports its worst observed value against a fixed tolerance.

use serde::{Deserialize, Serialize};

use crate::equilibrium::{
    assemble_energy_matrix, equilibrium_symmetry_check, solve_equilibrium, symmetrize_weights, EnergyMatrix,
};
use crate::error::Result;
use crate::geometry::{apply_linear, build_shape, measure, Discretization, Shape, ShapeKind, ShapeSpec};
use crate::kernels::{logspace, verify_growth_conditions, Kernel, KernelKind};
use crate::matrix_tools::{
    average_conjugation, build_group, check_irreducible, schatten_norm, FlowKind, GroupName, Mat,
};
use crate::variation::{
    concavity_condition_check, default_t_grid, energy_curve, finite_difference_check, support_rank,
};

use super::random::{gaussian_matrix, haar_orthogonal, random_flow, random_matrix, random_traceless_symmetric, rng};
use super::report::{Cell, Report, Verdict};
use super::{run_experiment, ExperimentConfig, ExperimentKind, MatrixSource, RandomMatrices};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteResult {
    pub name: String,
    pub pass: bool,
    /// Worst observed value of the suite's statistic.
    pub value: f64,
    pub tolerance: f64,
    pub detail: String,
}

impl SuiteResult {
    fn at_most(name: &str, value: f64, tolerance: f64, detail: impl Into<String>) -> Self {
        Self { name: name.into(), pass: value <= tolerance, value, tolerance, detail: detail.into() }
    }

    fn from_error(name: &str, e: crate::error::Error) -> Self {
        Self { name: name.into(), pass: false, value: f64::NAN, tolerance: f64::NAN, detail: e.to_string() }
    }
}

fn run_suite(name: &str, f: impl FnOnce() -> Result<SuiteResult>) -> SuiteResult {
    f().unwrap_or_else(|e| SuiteResult::from_error(name, e))
}

/// Every suite, in a fixed order.
pub fn verify_all() -> Vec<SuiteResult> {
    vec![
        run_suite("kernel_growth", kernel_growth),
        run_suite("kernel_derivatives", kernel_derivatives),
        run_suite("schatten_chain", || schatten_chain(200)),
        run_suite("flow_ode", flow_ode),
        run_suite("cyclic_averaging", cyclic_averaging),
        run_suite("platonic_averaging", platonic_averaging),
        run_suite("irreducibility", irreducibility),
        run_suite("moment_identity", || moment_identity(50)),
        run_suite("small_instance_oracle", small_instance_oracle),
        run_suite("frostman_and_symmetry", frostman_and_symmetry),
        run_suite("scaling_law", scaling_law),
        run_suite("orthogonal_invariance", orthogonal_invariance),
        run_suite("normalization_equivalence", normalization_equivalence),
        run_suite("concavity_condition", concavity_condition),
        run_suite("variation", variation_small),
        run_suite("determinism", determinism),
    ]
}

pub(super) fn verify_all_report(cfg: &ExperimentConfig) -> Report {
    let mut report = Report::new(ExperimentKind::VerifyAll, cfg.clone(), &["suite", "value", "tolerance", "pass", "detail"]);
    for s in verify_all() {
        report.push_row(vec![
            s.name.clone().into(),
            Cell::num(s.value),
            Cell::num(s.tolerance),
            s.pass.into(),
            s.detail.clone().into(),
        ]);
        report.verdicts.push(Verdict::new(s.name, s.pass, Some(s.value), s.tolerance, s.detail));
    }
    report
}

/// Largest left/right ratio of the growth conditions over `r ∈ [1e-6, 1e6]`
/// (1000 points) and 31 scale factors in `[1/2, 2]`, for the log kernel and
/// Riesz exponents 0.5 to 2.5.
pub fn kernel_growth() -> Result<SuiteResult> {
    let r = logspace(1e-6, 1e6, 1000);
    let a: Vec<f64> = (0..=30).map(|k| 0.5 + 1.5 * k as f64 / 30.0).collect();
    let mut worst = 0.0f64;
    let mut kernels = vec![Kernel::log()];
    for p in [0.5, 1.0, 1.5, 2.0, 2.5] {
        kernels.push(Kernel::riesz(p)?);
    }
    for k in &kernels {
        let g = verify_growth_conditions(k, &r, &a)?;
        worst = worst.max(g.max_ratio_0).max(g.max_ratio_1).max(g.max_ratio_2);
    }
    Ok(SuiteResult::at_most("kernel_growth", worst, 1.0, "largest ratio with C = 4 (log) or 2^(p+2)(1+p+p²)"))
}

/// Central differences of Φ against Φ′ and of Φ′ against Φ″ at r ∈ {0.1, 1, 10},
/// plus positivity of Φ″ − Φ′/r on a log grid.
pub fn kernel_derivatives() -> Result<SuiteResult> {
    let mut worst = 0.0f64;
    let mut positive = true;
    for k in [Kernel::<f64>::log(), Kernel::riesz(0.5)?, Kernel::riesz(1.0)?, Kernel::riesz(2.0)?] {
        for r in [0.1f64, 1.0, 10.0] {
            let h = 1e-5 * r;
            let d1 = (k.value(r + h) - k.value(r - h)) / (2.0 * h);
            let d2 = (k.d1(r + h) - k.d1(r - h)) / (2.0 * h);
            worst = worst.max((d1 - k.d1(r)).abs() / k.d1(r).abs());
            worst = worst.max((d2 - k.d2(r)).abs() / k.d2(r).abs());
        }
        positive &= logspace(1e-6, 1e6, 200).into_iter().all(|r| k.convexity_margin(r) > 0.0);
    }
    let mut s = SuiteResult::at_most("kernel_derivatives", worst, 1e-6, "relative finite-difference mismatch");
    if !positive {
        s.pass = false;
        s.detail.push_str("; convexity margin not positive somewhere");
    }
    Ok(s)
}

/// Jensen, monotonicity and the `q = 2/(n−1)` estimate on `count` Gaussian
/// matrices per `n ∈ {2, 3, 4}`, with equality on scaled orthogonal matrices.
/// The statistic is the largest relative violation (or equality defect).
pub fn schatten_chain(count: usize) -> Result<SuiteResult> {
    let mut g = rng(11);
    let mut worst = 0.0f64;
    let viol = |lo: f64, hi: f64| ((lo - hi) / hi.abs()).max(0.0);
    for n in 2..=4usize {
        let q = 2.0 / (n as f64 - 1.0);
        for _ in 0..count {
            let m = gaussian_matrix(&mut g, n);
            let inv = m.inverse()?;
            let det = m.det().abs();
            let norms: Vec<f64> = [0.5, 1.0, 2.0].iter().map(|&p| schatten_norm(&inv, p)).collect::<Result<_>>()?;
            let floor = det.recip().powf(1.0 / n as f64);
            for &v in &norms {
                worst = worst.max(viol(floor, v));
            }
            worst = worst.max(viol(norms[0], norms[1])).max(viol(norms[1], norms[2]));
            let bound = schatten_norm(&m, 2.0)?.powi(n as i32 - 1) / det;
            worst = worst.max(viol(schatten_norm(&inv, q)?, bound));
        }
        for _ in 0..10 {
            let m = haar_orthogonal(&mut g, n).scale(2.5);
            let inv = m.inverse()?;
            let det = m.det().abs();
            let lhs = schatten_norm(&inv, q)?;
            let bound = schatten_norm(&m, 2.0)?.powi(n as i32 - 1) / det;
            worst = worst.max((lhs - bound).abs() / bound);
            worst = worst.max((schatten_norm(&inv, 1.0)? - det.recip().powf(1.0 / n as f64)).abs() / lhs);
        }
    }
    Ok(SuiteResult::at_most("schatten_chain", worst, 1e-10, "largest relative violation or equality defect"))
}

/// `(p+1) d′² = d d″` for 100 random flows and times of each kind, and
/// `tr Ṡ₀ = 0`.
pub fn flow_ode() -> Result<SuiteResult> {
    let mut g = rng(5);
    let mut worst = 0.0f64;
    use rand::Rng;
    for _ in 0..100 {
        let n = g.random_range(2..=4usize);
        for kind in [FlowKind::Log, FlowKind::Riesz { p: g.random_range(0.1..(n as f64 - 0.1)) }] {
            let f = random_flow(&mut g, n, kind, 1.0);
            let (lo, hi) = f.domain();
            let t = g.random_range(lo.max(-1.0)..hi.min(2.0));
            for k in 0..n {
                worst = worst.max(f.ode_residual(k, t)?);
            }
            let tr: f64 = f.diagonals(0.0)?.1.iter().sum();
            worst = worst.max(tr.abs());
        }
    }
    Ok(SuiteResult::at_most("flow_ode", worst, 1e-10, "relative ODE residual and |tr Ṡ₀|"))
}

/// Averages of `Uᵀ diag(−1, 1) U` over `cyclic(N)`, `3 ≤ N ≤ 12`.
pub fn cyclic_averaging() -> Result<SuiteResult> {
    let s = Mat::from_diag(&[-1.0, 1.0]);
    let mut worst = 0.0f64;
    for n in 3..=12 {
        let g = build_group::<f64>(GroupName::Cyclic(n), 2)?;
        worst = worst.max(average_conjugation(&g, &s)?.max_abs());
    }
    Ok(SuiteResult::at_most("cyclic_averaging", worst, 1e-13, "largest entry of the average"))
}

/// Averages of 5 random traceless symmetric matrices over each platonic group.
pub fn platonic_averaging() -> Result<SuiteResult> {
    let mut g = rng(17);
    let mut worst = 0.0f64;
    for name in [GroupName::Tetrahedral, GroupName::Octahedral, GroupName::Icosahedral] {
        let grp = build_group::<f64>(name, 3)?;
        for _ in 0..5 {
            let s = random_traceless_symmetric(&mut g, 3);
            worst = worst.max(average_conjugation(&grp, &s)?.max_abs());
        }
    }
    Ok(SuiteResult::at_most("platonic_averaging", worst, 1e-13, "largest entry of the average"))
}

pub fn irreducibility() -> Result<SuiteResult> {
    let mut wrong = 0usize;
    for n in 3..=8 {
        wrong += usize::from(!check_irreducible(&build_group::<f64>(GroupName::Cyclic(n), 2)?));
        wrong += usize::from(!check_irreducible(&build_group::<f64>(GroupName::Dihedral(n), 2)?));
    }
    wrong += usize::from(check_irreducible(&build_group::<f64>(GroupName::Cyclic(2), 2)?));
    for name in [GroupName::Tetrahedral, GroupName::Octahedral, GroupName::Icosahedral] {
        wrong += usize::from(!check_irreducible(&build_group::<f64>(name, 3)?));
    }
    Ok(SuiteResult::at_most("irreducibility", wrong as f64, 0.0, "misclassified groups"))
}

/// `I(MK) = |det M| ‖M‖²_{2,n} I(K)` for regular polygons and platonic solids
/// with `count` random `M` of condition number at most 100 each.
pub fn moment_identity(count: usize) -> Result<SuiteResult> {
    let mut specs: Vec<ShapeSpec> =
        (3..=8).map(|n| ShapeSpec::regular_polygon(n, 1.0, 24, Discretization::Boundary)).collect();
    for kind in [ShapeKind::Tetrahedron, ShapeKind::Cube, ShapeKind::Octahedron, ShapeKind::Icosahedron] {
        specs.push(ShapeSpec::solid(kind, 1.0, 20, Discretization::Boundary));
    }
    let mut g = rng(23);
    let mut worst = 0.0f64;
    for spec in &specs {
        let k: Shape<f64> = build_shape(spec)?;
        let n = k.dim();
        let i0 = measure(&k)?.inertia;
        for _ in 0..count {
            let m = random_matrix(&mut g, n, 100.0);
            let predicted = m.det().abs() * schatten_norm(&m, 2.0)?.powi(2) * i0;
            let got = measure(&apply_linear(&k, &m)?)?.inertia;
            worst = worst.max((got - predicted).abs() / predicted);
        }
    }
    Ok(SuiteResult::at_most("moment_identity", worst, 1e-10, "largest relative error"))
}

/// Hand-built 3–4 point problems.
pub fn oracle_problems() -> Vec<(String, EnergyMatrix<f64>)> {
    let build = |label: &str, pts: &[&[f64]], kernel: Kernel<f64>, rho: f64| {
        let n = pts.len();
        let mut e = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                e[i * n + j] = if i == j {
                    kernel.value(rho)
                } else {
                    kernel.value(crate::scalar::distance(pts[i], pts[j]))
                };
            }
        }
        (label.to_string(), EnergyMatrix::from_entries(n, e, kernel).expect("hand-built matrix is symmetric"))
    };
    let r1 = Kernel::riesz(1.0).expect("valid exponent");
    let r2 = Kernel::riesz(2.0).expect("valid exponent");
    vec![
        build("collinear 0, 1, 3 (p = 1)", &[&[0.0, 0.0], &[1.0, 0.0], &[3.0, 0.0]], r1, 0.2),
        build("scalene triangle (log)", &[&[0.0, 0.0], &[0.5, 0.0], &[0.15, 0.4]], Kernel::log(), 0.05),
        build("perturbed square (log)", &[&[0.0, 0.0], &[0.4, 0.0], &[0.4, 0.4], &[0.08, 0.36]], Kernel::log(), 0.05),
        build("quadrilateral (p = 1)", &[&[0.0, 0.0], &[2.0, 0.0], &[0.0, 1.0], &[1.5, 1.2]], r1, 0.3),
        build("tetrahedron-like (p = 2)", &[&[0.0, 0.0, 0.0], &[1.0, 0.0, 0.0], &[0.0, 2.0, 0.0], &[0.3, 0.4, 1.5]], r2, 0.4),
    ]
}

/// Minimizer of `wᵀAw` over the simplex grid with the given step.
pub fn simplex_grid_search(a: &EnergyMatrix<f64>, step: f64) -> Vec<f64> {
    let n = a.n();
    let m = (1.0 / step).round() as usize;
    let q = |w: &[f64]| -> f64 {
        let mut s = 0.0;
        for i in 0..n {
            for j in 0..n {
                s += a.entry(i, j) * w[i] * w[j];
            }
        }
        s
    };
    let mut best = (f64::INFINITY, vec![0.0; n]);
    let mut w = vec![0.0; n];
    // Enumerate compositions of m into n parts.
    fn rec(k: usize, left: usize, m: usize, w: &mut Vec<f64>, visit: &mut dyn FnMut(&[f64])) {
        let n = w.len();
        if k == n - 1 {
            w[k] = left as f64 / m as f64;
            visit(w);
            return;
        }
        for c in 0..=left {
            w[k] = c as f64 / m as f64;
            rec(k + 1, left - c, m, w, visit);
        }
    }
    rec(0, m, m, &mut w, &mut |w| {
        let v = q(w);
        if v < best.0 {
            best = (v, w.to_vec());
        }
    });
    best.1
}

/// Solver weights against exhaustive grid search at step 1e-3.
pub fn small_instance_oracle() -> Result<SuiteResult> {
    let mut worst = 0.0f64;
    for (_, a) in oracle_problems() {
        let r = solve_equilibrium(&a, 1e-12, 100_000)?;
        let g = simplex_grid_search(&a, 1e-3);
        for (x, y) in r.weights.iter().zip(&g) {
            worst = worst.max((x - y).abs());
        }
    }
    Ok(SuiteResult::at_most("small_instance_oracle", worst, 2e-3, "largest weight difference"))
}

fn small_shapes() -> Vec<(ShapeSpec, Kernel<f64>)> {
    let r1 = Kernel::riesz(1.0).expect("valid exponent");
    vec![
        (ShapeSpec::disk(1.0, 128, Discretization::Boundary), Kernel::log()),
        (ShapeSpec::regular_polygon(6, 1.0, 120, Discretization::Boundary), Kernel::log()),
        (ShapeSpec::regular_polygon(4, 1.0, 144, Discretization::Volume), r1),
        (ShapeSpec::solid(ShapeKind::Cube, 1.0, 150, Discretization::Boundary), r1),
    ]
}

/// Frostman conditions, monotone energy and symmetric weights on small
/// catalog shapes; statistic is the number of failures.
pub fn frostman_and_symmetry() -> Result<SuiteResult> {
    let mut failures = 0usize;
    for (spec, k) in small_shapes() {
        let s: Shape<f64> = build_shape(&spec)?;
        let a = assemble_energy_matrix(&s, &k)?;
        let r = solve_equilibrium(&a, 1e-10, 200 * s.len())?;
        let uniform = vec![1.0 / s.len() as f64; s.len()];
        let ok = r.converged
            && r.satisfies_frostman()
            && r.energy_is_monotone()
            && r.energy <= a.energy(&uniform)
            && equilibrium_symmetry_check(&r, &s)?.pass;
        failures += usize::from(!ok);
    }
    Ok(SuiteResult::at_most("frostman_and_symmetry", failures as f64, 0.0, "shapes failing a check"))
}

/// `C(tK) = t C(K)` for Riesz and `V(tK) = V(K) − log t` for log, `t ∈ {0.5, 2, 3}`.
pub fn scaling_law() -> Result<SuiteResult> {
    let mut worst = 0.0f64;
    for (spec, k) in small_shapes() {
        let s: Shape<f64> = build_shape(&spec)?;
        let r0 = solve_equilibrium(&assemble_energy_matrix(&s, &k)?, 1e-13, 200 * s.len())?;
        for t in [0.5, 2.0, 3.0] {
            let st = s.scaled(t)?;
            let r = solve_equilibrium(&assemble_energy_matrix(&st, &k)?, 1e-13, 200 * s.len())?;
            let err = match k.kind() {
                KernelKind::Log => (r.energy - (r0.energy - f64::ln(t))).abs() / r0.energy.abs().max(1.0),
                KernelKind::Riesz => (r.capacity - t * r0.capacity).abs() / (t * r0.capacity),
            };
            worst = worst.max(err);
        }
    }
    Ok(SuiteResult::at_most("scaling_law", worst, 1e-10, "largest relative error"))
}

/// Random rotations and reflections leave `V` and `w` unchanged.
pub fn orthogonal_invariance() -> Result<SuiteResult> {
    let mut g = rng(29);
    let mut worst = 0.0f64;
    for (spec, k) in small_shapes() {
        let s: Shape<f64> = build_shape(&spec)?;
        let r0 = solve_equilibrium(&assemble_energy_matrix(&s, &k)?, 1e-13, 200 * s.len())?;
        let u = haar_orthogonal(&mut g, s.dim());
        let su = apply_linear(&s, &u)?;
        let r = solve_equilibrium(&assemble_energy_matrix(&su, &k)?, 1e-13, 200 * s.len())?;
        worst = worst.max((r.energy - r0.energy).abs() / r0.energy.abs().max(1.0));
        for (a, b) in r.weights.iter().zip(&r0.weights) {
            worst = worst.max((a - b).abs());
        }
    }
    Ok(SuiteResult::at_most("orthogonal_invariance", worst, 1e-12, "largest change in V or w"))
}

/// The margin computed with `normalize(M, inverse_pnorm(p))` against the
/// scale-invariant form `C_p(MK) ‖M⁻¹‖_{p,n} − C_p(K)`.
pub fn normalization_equivalence() -> Result<SuiteResult> {
    use crate::matrix_tools::{normalize, Normalization};
    let mut g = rng(31);
    let mut worst = 0.0f64;
    let k = Kernel::riesz(1.0)?;
    let s: Shape<f64> = build_shape(&ShapeSpec::regular_polygon(4, 1.0, 100, Discretization::Volume))?;
    let c0 = solve_equilibrium(&assemble_energy_matrix(&s, &k)?, 1e-13, 100_000)?.capacity;
    for _ in 0..5 {
        let m = random_matrix(&mut g, 2, 10.0);
        let mn = normalize(&m, Normalization::InversePnorm { p: 1.0 })?;
        let cn = solve_equilibrium(&assemble_energy_matrix(&apply_linear(&s, &mn)?, &k)?, 1e-13, 100_000)?.capacity;
        let cm = solve_equilibrium(&assemble_energy_matrix(&apply_linear(&s, &m)?, &k)?, 1e-13, 100_000)?.capacity;
        let invariant = cm * schatten_norm(&m.inverse()?, 1.0)? - c0;
        let margin = cn - c0;
        worst = worst.max((invariant - margin).abs() / c0);
    }
    Ok(SuiteResult::at_most("normalization_equivalence", worst, 1e-10, "relative to C(K)"))
}

/// Equality in the linear concavity condition for random flows and pairs.
pub fn concavity_condition() -> Result<SuiteResult> {
    use rand::Rng;
    let mut g = rng(37);
    let mut worst = 0.0f64;
    let mut convex = true;
    for _ in 0..20 {
        let n = g.random_range(2..=3usize);
        let p = g.random_range(0.2..(n as f64 - 0.2));
        for (kind, kernel) in [(FlowKind::Log, Kernel::log()), (FlowKind::Riesz { p }, Kernel::riesz(p)?)] {
            let f = random_flow(&mut g, n, kind, 0.8);
            let pairs: Vec<(Vec<f64>, Vec<f64>)> = (0..5)
                .map(|_| ((0..n).map(|_| g.random_range(-1.0..1.0)).collect(), vec![0.0; n]))
                .collect();
            let rep = concavity_condition_check(&f, &kernel, &pairs, &default_t_grid())?;
            worst = worst.max(rep.max_rel_residual);
            convex &= rep.convexity_positive;
        }
    }
    let mut s = SuiteResult::at_most("concavity_condition", worst, 1e-10, "relative gap between the two sides");
    if !convex {
        s.pass = false;
        s.detail.push_str("; Φ″ − Φ′/r not positive somewhere");
    }
    Ok(s)
}

/// Statistics of one variation check.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct VariationCheck {
    /// `|E′(0)| / |E″(0)|`.
    pub first_over_second: f64,
    /// Largest analytic/finite-difference mismatch.
    pub fd_rel_err: f64,
    /// Largest `E″(t) / |E(0)|` on the grid.
    pub max_rel_d2: f64,
    /// Largest second difference of the values over `|E(0)|`.
    pub max_rel_second_difference: f64,
    pub zero_is_strict_maximum: bool,
    pub support_rank: usize,
}

impl VariationCheck {
    pub fn pass(&self) -> bool {
        self.first_over_second <= 1e-8
            && self.fd_rel_err <= 1e-6
            && self.max_rel_d2 <= 1e-10
            && self.max_rel_second_difference <= 1e-8
            && self.zero_is_strict_maximum
    }
}

/// Solves for the equilibrium of `spec`, symmetrizes the weights over the
/// shape's group, and checks the curve along a random flow matched to the
/// kernel.
pub fn variation_check(spec: &ShapeSpec, kernel: &Kernel<f64>, seed: u64) -> Result<VariationCheck> {
    let s: Shape<f64> = build_shape(spec)?;
    let a = assemble_energy_matrix(&s, kernel)?;
    let r = solve_equilibrium(&a, 1e-12, 200 * s.len())?;
    let w = symmetrize_weights(&r.weights, &s)?;
    let kind = match kernel.kind() {
        KernelKind::Log => FlowKind::Log,
        KernelKind::Riesz => FlowKind::Riesz { p: kernel.p() },
    };
    let flow = random_flow(&mut rng(seed), s.dim(), kind, 0.4);
    let grid = default_t_grid();
    let curve = energy_curve(&s, &w, kernel, &flow, &grid)?;
    let fd = finite_difference_check(&s, &w, kernel, &flow, &grid, 1e-6)?;
    Ok(VariationCheck {
        first_over_second: (curve.d1[0] / curve.d2[0]).abs(),
        fd_rel_err: fd.max_rel_err,
        max_rel_d2: curve.max_relative_d2(),
        max_rel_second_difference: curve.max_relative_second_difference(),
        zero_is_strict_maximum: curve.zero_is_strict_maximum(),
        support_rank: support_rank(&s, &w)?,
    })
}

fn variation_small() -> Result<SuiteResult> {
    let mut failures = Vec::new();
    for (k, (spec, kernel)) in small_shapes().into_iter().skip(1).enumerate() {
        let c = variation_check(&spec, &kernel, 41 + k as u64)?;
        if !c.pass() {
            failures.push(format!("{:?}: {c:?}", spec.kind));
        }
    }
    let mut s = SuiteResult::at_most("variation", failures.len() as f64, 0.0, "shapes failing a variation check");
    if !failures.is_empty() {
        s.detail = failures.join("; ");
    }
    Ok(s)
}

/// Two runs of a small seeded sweep serialize to identical bytes.
pub fn determinism() -> Result<SuiteResult> {
    let mut cfg = ExperimentConfig::new(ExperimentKind::TheoremLog);
    cfg.shape = Some(ShapeSpec::regular_polygon(4, 1.0, 120, Discretization::Boundary));
    cfg.kernel = Some(Kernel::<f64>::log().spec());
    cfg.matrices = Some(MatrixSource::Random(RandomMatrices { count: 3, condition_cap: 10.0, seed: 7 }));
    let a = run_experiment(&cfg)?;
    let b = run_experiment(&cfg)?;
    let same = a.to_json_string()? == b.to_json_string()? && a.to_csv_string()? == b.to_csv_string()?;
    Ok(SuiteResult::at_most("determinism", f64::from(u8::from(!same)), 0.0, "1 when the two reports differ"))
}
