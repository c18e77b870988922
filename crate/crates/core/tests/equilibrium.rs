use caplab::equilibrium::{
    assemble_energy_matrix, capacity_from_energy, equilibrium_symmetry_check, solve_equilibrium, EnergyMatrix,
};
use caplab::geometry::{build_shape, Discretization, Shape, ShapeKind, ShapeSpec};
use caplab::kernels::Kernel;

fn solve(shape: &Shape<f64>, kernel: &Kernel<f64>) -> caplab::EquilibriumResult {
    let a = assemble_energy_matrix(shape, kernel).unwrap();
    let r = solve_equilibrium(&a, 1e-12, 200 * shape.len()).unwrap();
    assert!(r.converged);
    r
}

#[test]
fn equilateral_vertices_get_equal_weights() {
    let e = |r: f64| -r.ln();
    let d = e(0.1);
    let entries = vec![d, e(1.0), e(1.0), e(1.0), d, e(1.0), e(1.0), e(1.0), d];
    let a = EnergyMatrix::from_entries(3, entries, Kernel::log()).unwrap();
    let r = solve_equilibrium(&a, 1e-14, 10_000).unwrap();
    for w in &r.weights {
        assert!((w - 1.0 / 3.0).abs() < 1e-12);
    }
    // V = (d + 2·0)/3 for unit spacing.
    assert!((r.energy - d / 3.0).abs() < 1e-14);
}

#[test]
fn circle_weights_are_uniform() {
    let s: Shape<f64> = build_shape(&ShapeSpec::disk(1.0, 256, Discretization::Boundary)).unwrap();
    assert_eq!(s.len(), 256);
    let r = solve(&s, &Kernel::log());
    for w in &r.weights {
        assert!((w - 1.0 / 256.0).abs() < 1e-8);
    }
}

#[test]
fn hexagon_weights_respect_the_symmetry_group() {
    let s: Shape<f64> = build_shape(&ShapeSpec::regular_polygon(6, 1.0, 180, Discretization::Boundary)).unwrap();
    let r = solve(&s, &Kernel::log());
    let rep = equilibrium_symmetry_check(&r, &s).unwrap();
    assert!(!rep.skipped());
    assert!(rep.pass && rep.max_discrepancy <= 1e-8, "{rep:?}");
}

#[test]
fn asymmetric_triangle_skips_the_symmetry_check() {
    let spec = ShapeSpec {
        kind: ShapeKind::Triangle,
        vertices: Some(vec![vec![0.0, 0.0], vec![2.0, 0.0], vec![0.3, 0.9]]),
        resolution: 60,
        discretize: Some(Discretization::Boundary),
        ..ShapeSpec::default()
    };
    let s: Shape<f64> = build_shape(&spec).unwrap();
    let r = solve(&s, &Kernel::log());
    assert!(equilibrium_symmetry_check(&r, &s).unwrap().skipped());
}

#[test]
fn unit_square_log_capacity() {
    // C = Γ(1/4)² / (4π^{3/2}) times the side length.
    let exact = gamma_quarter().powi(2) / (4.0 * std::f64::consts::PI.powf(1.5));
    let s: Shape<f64> = build_shape(&ShapeSpec::regular_polygon(4, 1.0, 800, Discretization::Boundary)).unwrap();
    let c = solve(&s, &Kernel::log()).capacity;
    assert!((c - exact).abs() / exact < 2e-3, "{c} vs {exact}");
}

/// Γ(1/4) from `Γ(1/4)² = (2π)^{3/2} / AGM(1, √2)`.
fn gamma_quarter() -> f64 {
    let (mut a, mut b) = (1.0f64, 2f64.sqrt());
    for _ in 0..10 {
        let (x, y) = (0.5 * (a + b), (a * b).sqrt());
        a = x;
        b = y;
    }
    ((2.0 * std::f64::consts::PI).powf(1.5) / a).sqrt()
}

#[test]
fn capacity_conversions() {
    let log = Kernel::<f64>::log();
    assert_eq!(capacity_from_energy(0.0, &log).unwrap(), 1.0);
    assert_eq!(capacity_from_energy(4.0, &Kernel::riesz(1.0).unwrap()).unwrap(), 0.25);
    assert_eq!(capacity_from_energy(16.0, &Kernel::riesz(2.0).unwrap()).unwrap(), 0.25);
}
