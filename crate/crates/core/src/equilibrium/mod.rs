//! Discrete energy matrices, the simplex-constrained equilibrium solver, and
//! capacities derived from equilibrium energies.

mod dump;
mod extrapolate;
mod self_energy;
mod solver;
mod symmetry;

pub use dump::{read_matrix_dump, write_matrix_dump};
pub use extrapolate::{capacity_extrapolated, capacity_extrapolated_with, fit_power_law, ErrorModel, Extrapolation, LevelEstimate};
pub use self_energy::{self_interaction_factor, self_interaction_radii};
pub use solver::{solve_equilibrium, EquilibriumResult, ResultFile};
pub use symmetry::{equilibrium_symmetry_check, symmetrize_weights, SymmetryReport};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::Shape;
use crate::kernels::{Kernel, KernelKind};
use crate::scalar::{distance, dot, pairwise_sum, Real};

/// Multiplier applied to the self-interaction radii. The default of 1 uses
/// the exact cell means; other values exist for sensitivity studies.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Regularization {
    pub scale: f64,
}

impl Default for Regularization {
    fn default() -> Self {
        Self { scale: 1.0 }
    }
}

/// Symmetric `N×N` matrix with `A_ij = Φ(|x_i − x_j|)` off the diagonal and
/// `A_ii = Φ(ρ_i)`.
#[derive(Clone, Debug)]
pub struct EnergyMatrix<T: Real> {
    n: usize,
    entries: Vec<T>,
    kernel: Kernel<T>,
    rho: Vec<T>,
    label: String,
}

pub fn assemble_energy_matrix<T: Real>(shape: &Shape<T>, kernel: &Kernel<T>) -> Result<EnergyMatrix<T>> {
    assemble_energy_matrix_with(shape, kernel, Regularization::default())
}

pub fn assemble_energy_matrix_with<T: Real>(
    shape: &Shape<T>,
    kernel: &Kernel<T>,
    reg: Regularization,
) -> Result<EnergyMatrix<T>> {
    kernel.check_dimension(shape.dim())?;
    let rho = self_interaction_radii(shape.cell_radii(), kernel, shape.cell_dim(), reg.scale)?;
    let n = shape.len();
    let mut entries = vec![T::zero(); n * n];
    // Rows are filled independently; the lower triangle is mirrored after.
    entries.par_chunks_mut(n.max(1)).enumerate().try_for_each(|(i, row)| {
        let xi = shape.point(i);
        row[i] = kernel.value(rho[i]);
        for j in i + 1..n {
            let r = distance(xi, shape.point(j));
            if !(r > T::zero()) {
                return Err(Error::CoincidentPoints(i, j));
            }
            row[j] = kernel.value(r);
        }
        Ok(())
    })?;
    for i in 0..n {
        for j in 0..i {
            entries[i * n + j] = entries[j * n + i];
        }
    }
    Ok(EnergyMatrix { n, entries, kernel: *kernel, rho, label: shape.label().to_string() })
}

impl<T: Real> EnergyMatrix<T> {
    /// Wraps a raw symmetric matrix, e.g. for hand-built test problems.
    pub fn from_entries(n: usize, entries: Vec<T>, kernel: Kernel<T>) -> Result<Self> {
        if entries.len() != n * n {
            return Err(Error::Dimension(format!("expected {} entries, got {}", n * n, entries.len())));
        }
        let m = Self { n, entries, kernel, rho: Vec::new(), label: String::new() };
        let asym = m.symmetry_residual();
        if asym.is_nan() || m.entries.iter().any(|x| x.is_nan()) {
            return Err(Error::NotANumber);
        }
        if asym > T::tol(1e-12) * (T::one() + m.max_abs()) {
            return Err(Error::NotSymmetric(asym.to_f64_lossy()));
        }
        Ok(m)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn entries(&self) -> &[T] {
        &self.entries
    }

    #[inline]
    pub fn entry(&self, i: usize, j: usize) -> T {
        self.entries[i * self.n + j]
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[T] {
        &self.entries[i * self.n..(i + 1) * self.n]
    }

    pub fn kernel(&self) -> &Kernel<T> {
        &self.kernel
    }

    /// Self-interaction radii; empty for matrices built from raw entries.
    pub fn rho(&self) -> &[T] {
        &self.rho
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn max_abs(&self) -> T {
        self.entries.iter().fold(T::zero(), |m, x| m.max(x.abs()))
    }

    pub fn is_finite(&self) -> bool {
        self.entries.iter().all(|x| x.is_finite())
    }

    pub fn symmetry_residual(&self) -> T {
        let mut r = T::zero();
        for i in 0..self.n {
            for j in 0..i {
                let d = (self.entry(i, j) - self.entry(j, i)).abs();
                if d.is_nan() {
                    return T::nan();
                }
                r = r.max(d);
            }
        }
        r
    }

    /// Potentials `U = A w`.
    pub fn potentials(&self, w: &[T]) -> Vec<T> {
        (0..self.n).into_par_iter().map(|i| dot(self.row(i), w)).collect()
    }

    /// `wᵀ A w` with a fixed summation order shared with the variation
    /// module, so both report bitwise identical energies.
    pub fn energy(&self, w: &[T]) -> T {
        quadratic_form(w, &self.potentials(w))
    }
}

/// `Σ_i w_i U_i` by pairwise summation.
pub(crate) fn quadratic_form<T: Real>(w: &[T], u: &[T]) -> T {
    let terms: Vec<T> = w.iter().zip(u).map(|(&a, &b)| a * b).collect();
    pairwise_sum(&terms)
}

/// `exp(−V)` for the logarithmic kernel, `V^{−1/p}` for Riesz.
pub fn capacity_from_energy<T: Real>(v: T, kernel: &Kernel<T>) -> Result<T> {
    if v.is_nan() {
        return Err(Error::NotANumber);
    }
    match kernel.kind() {
        KernelKind::Log => Ok((-v).exp()),
        KernelKind::Riesz => {
            if !(v > T::zero()) {
                return Err(Error::InvalidArgument(format!("riesz energy must be positive, got {v}")));
            }
            Ok(v.powf(-kernel.p().recip()))
        }
    }
}

/// Inverse of [`capacity_from_energy`].
pub fn energy_from_capacity<T: Real>(c: T, kernel: &Kernel<T>) -> T {
    match kernel.kind() {
        KernelKind::Log => -c.ln(),
        KernelKind::Riesz => c.powf(-kernel.p()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{build_shape, Discretization, ShapeSpec};

    fn points(dim: usize, pts: &[&[f64]]) -> Shape<f64> {
        let coords: Vec<f64> = pts.iter().flat_map(|p| p.iter().copied()).collect();
        let n = pts.len();
        Shape::from_parts(dim, dim, coords, vec![1.0 / n as f64; n], None, Discretization::Volume, None, None, "pts")
            .unwrap()
    }

    #[test]
    fn two_points_at_unit_distance_have_zero_log_interaction() {
        let s = points(2, &[&[0.0, 0.0], &[1.0, 0.0]]);
        let a = assemble_energy_matrix(&s, &Kernel::log()).unwrap();
        assert_eq!(a.entry(0, 1), 0.0);
        assert_eq!(a.entry(1, 0), 0.0);
    }

    #[test]
    fn equilateral_riesz_off_diagonals() {
        let d = 0.7;
        let h = d * 3f64.sqrt() / 2.0;
        let s = points(2, &[&[0.0, 0.0], &[d, 0.0], &[d / 2.0, h]]);
        let a = assemble_energy_matrix(&s, &Kernel::riesz(1.0).unwrap()).unwrap();
        for (i, j) in [(0, 1), (0, 2), (1, 2)] {
            assert!((a.entry(i, j) - 1.0 / d).abs() < 1e-14);
        }
    }

    #[test]
    fn assembly_is_exactly_symmetric() {
        let s: Shape<f64> = build_shape(&ShapeSpec::regular_polygon(5, 1.0, 200, Discretization::Volume)).unwrap();
        let a = assemble_energy_matrix(&s, &Kernel::riesz(1.0).unwrap()).unwrap();
        assert_eq!(a.symmetry_residual(), 0.0);
        assert!(a.is_finite());
    }

    #[test]
    fn coincident_points_are_rejected() {
        let s = points(2, &[&[0.0, 0.0], &[1.0, 0.0], &[0.0, 0.0]]);
        assert!(matches!(assemble_energy_matrix(&s, &Kernel::log()), Err(Error::CoincidentPoints(0, 2))));
    }

    #[test]
    fn riesz_exponent_at_dimension_is_rejected() {
        let s = points(2, &[&[0.0, 0.0], &[1.0, 0.0]]);
        assert!(assemble_energy_matrix(&s, &Kernel::riesz(2.0).unwrap()).is_err());
    }

    #[test]
    fn capacity_examples() {
        assert_eq!(capacity_from_energy(0.0, &Kernel::log()).unwrap(), 1.0);
        assert_eq!(capacity_from_energy(4.0, &Kernel::riesz(1.0).unwrap()).unwrap(), 0.25);
        assert_eq!(capacity_from_energy(16.0, &Kernel::riesz(2.0).unwrap()).unwrap(), 0.25);
        assert!(capacity_from_energy(0.0, &Kernel::riesz(1.0).unwrap()).is_err());
        assert!(capacity_from_energy(-1.0, &Kernel::riesz(1.0).unwrap()).is_err());
    }
}
