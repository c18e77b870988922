//! Matrix decompositions, Schatten norms, normalizations, deformation
//! flows and finite orthogonal groups.

mod dense;
mod flow;
mod group;

pub use dense::{cholesky_in_place, cholesky_solve, svd, Mat, Svd};
pub use flow::{make_flow, Flow, FlowKind, FlowSpec};
pub use group::{
    average_conjugation, build_group, check_irreducible, irreducibility_report, GroupName,
    IrreducibilityReport, SymmetryGroup,
};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Normalized Schatten p-norm `((1/n) Σ σ_k^p)^{1/p}`.
pub fn schatten_norm<T: Real>(m: &Mat<T>, p: T) -> Result<T> {
    if !(p > T::zero()) {
        return Err(Error::InvalidArgument(format!("Schatten exponent must be positive, got {p}")));
    }
    if !m.is_finite() {
        return Err(Error::InvalidArgument("matrix has non-finite entries".into()));
    }
    Ok(schatten_from_singular_values(&svd(m).sigma, p))
}

/// Schatten mean of a list of singular values. Scales by the largest value
/// before exponentiation to avoid overflow for large `p`.
pub fn schatten_from_singular_values<T: Real>(sigma: &[T], p: T) -> T {
    let top = sigma.iter().fold(T::zero(), |a, &s| a.max(s));
    if top == T::zero() {
        return T::zero();
    }
    let n = T::from_usize_lossy(sigma.len());
    let mean = sigma.iter().map(|&s| (s / top).powf(p)).sum::<T>() / n;
    top * mean.powf(p.recip())
}

/// Normalization applied to a linear map before comparing capacities.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum Normalization {
    /// Scale to |det| = 1.
    Volume,
    /// Scale to ‖M⁻¹‖_{p,n} = 1.
    InversePnorm { p: f64 },
}

/// Rescales `m` according to `mode`.
pub fn normalize<T: Real>(m: &Mat<T>, mode: Normalization) -> Result<Mat<T>> {
    let n = m.rows();
    match mode {
        Normalization::Volume => {
            let det = m.det();
            if det.abs() <= T::lit(1e-14) * m.max_abs().powi(n as i32) || det == T::zero() {
                return Err(Error::Singular(det.to_f64_lossy()));
            }
            // Use the singular values for the scale: more accurate than det^{1/n}
            // when M is far from orthogonal.
            let sigma = svd(m).sigma;
            let log_mean = sigma.iter().map(|s| s.ln()).sum::<T>() / T::from_usize_lossy(n);
            Ok(m.scale((-log_mean).exp()))
        }
        Normalization::InversePnorm { p } => {
            let inv = m.inverse()?;
            let c = schatten_norm(&inv, T::lit(p))?;
            Ok(m.scale(c))
        }
    }
}
