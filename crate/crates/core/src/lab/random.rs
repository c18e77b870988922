//! Seeded random matrices and flow parameters.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::matrix_tools::{Flow, FlowKind, Mat};

pub type LabRng = ChaCha8Rng;

pub fn rng(seed: u64) -> LabRng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn gaussian_matrix(rng: &mut LabRng, n: usize) -> Mat<f64> {
    Mat::from_fn(n, n, |_, _| rng.sample(StandardNormal))
}

/// Haar-distributed orthogonal matrix from the QR factorization of a
/// Gaussian matrix.
pub fn haar_orthogonal(rng: &mut LabRng, n: usize) -> Mat<f64> {
    gaussian_matrix(rng, n).qr().0
}

/// `Q₁ diag(exp u) Q₂` with `u` uniform in `[−½ log κ, ½ log κ]ⁿ`, so the
/// condition number never exceeds `condition_cap`.
pub fn random_matrix(rng: &mut LabRng, n: usize, condition_cap: f64) -> Mat<f64> {
    let q1 = haar_orthogonal(rng, n);
    let q2 = haar_orthogonal(rng, n);
    let half = 0.5 * condition_cap.max(1.0).ln();
    let d: Vec<f64> = (0..n).map(|_| if half > 0.0 { rng.random_range(-half..=half).exp() } else { 1.0 }).collect();
    &(&q1 * &Mat::from_diag(&d)) * &q2
}

/// Symmetric matrix with Gaussian entries and its trace removed.
pub fn random_traceless_symmetric(rng: &mut LabRng, n: usize) -> Mat<f64> {
    let g = gaussian_matrix(rng, n);
    let s = Mat::from_fn(n, n, |i, j| 0.5 * (g[(i, j)] + g[(j, i)]));
    let shift = s.trace() / n as f64;
    Mat::from_fn(n, n, |i, j| s[(i, j)] - if i == j { shift } else { 0.0 })
}

/// Flow with `log σ_k` uniform in `[−spread, spread]`, projected onto the
/// constraint surface of `kind`.
pub fn random_flow(rng: &mut LabRng, n: usize, kind: FlowKind<f64>, spread: f64) -> Flow<f64> {
    let raw: Vec<f64> = (0..n).map(|_| rng.random_range(-spread..=spread).exp()).collect();
    let sigmas = Flow::normalize_sigmas(&raw, kind);
    crate::matrix_tools::make_flow(&sigmas, kind).expect("normalized sigmas satisfy the flow constraint")
}

/// Condition number from the singular values.
pub fn condition_number(m: &Mat<f64>) -> f64 {
    let s = crate::matrix_tools::svd(m).sigma;
    let hi = s.iter().cloned().fold(0.0, f64::max);
    let lo = s.iter().cloned().fold(f64::INFINITY, f64::min);
    hi / lo
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn condition_cap_is_respected() {
        let mut r = rng(3);
        for n in 2..=4 {
            for _ in 0..50 {
                let m = random_matrix(&mut r, n, 10.0);
                assert!(condition_number(&m) <= 10.0 * (1.0 + 1e-12));
            }
        }
    }

    #[test]
    fn haar_matrix_is_orthogonal() {
        let q = haar_orthogonal(&mut rng(1), 4);
        assert!(q.orthogonality_residual() < 1e-13);
    }

    #[test]
    fn same_seed_same_matrix() {
        let a = random_matrix(&mut rng(9), 3, 5.0);
        let b = random_matrix(&mut rng(9), 3, 5.0);
        assert_eq!(a, b);
    }
}
