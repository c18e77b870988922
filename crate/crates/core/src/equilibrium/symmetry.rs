//! Invariance of equilibrium weights under the symmetry group of a shape.

use serde::{Deserialize, Serialize};

use super::EquilibriumResult;
use crate::error::{Error, Result};
use crate::geometry::Shape;
use crate::scalar::{pairwise_sum, Real};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SymmetryReport {
    /// `None` when the shape carries no group and the check was skipped.
    pub group: Option<String>,
    pub elements_checked: usize,
    pub max_discrepancy: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl SymmetryReport {
    pub fn skipped(&self) -> bool {
        self.group.is_none()
    }
}

/// Compares `w_i` with `w_{π(i)}` where `x_{π(i)} = U x_i`, for every group
/// element `U`. Passes when the largest difference is at most
/// `max(10·gap, 1e-8)`.
pub fn equilibrium_symmetry_check<T: Real>(res: &EquilibriumResult<T>, shape: &Shape<T>) -> Result<SymmetryReport> {
    let tolerance = (10.0 * res.gap.max(res.away_gap).to_f64_lossy()).max(1e-8);
    let Some(group) = shape.symmetry() else {
        return Ok(SymmetryReport { group: None, elements_checked: 0, max_discrepancy: 0.0, tolerance, pass: true });
    };
    let mut worst = 0.0f64;
    for u in group.elements() {
        let perm = shape.match_nodes(u)?;
        for (i, &j) in perm.iter().enumerate() {
            worst = worst.max((res.weights[i] - res.weights[j]).abs().to_f64_lossy());
        }
    }
    Ok(SymmetryReport {
        group: Some(group.name().to_string()),
        elements_checked: group.order(),
        max_discrepancy: worst,
        tolerance,
        pass: worst <= tolerance,
    })
}

/// Averages `w` over the node permutations induced by the shape's symmetry
/// group. The result is invariant up to rounding, which removes solver noise from
/// quantities that vanish only by symmetry. Returns `w` unchanged when the
/// shape has no group.
pub fn symmetrize_weights<T: Real>(w: &[T], shape: &Shape<T>) -> Result<Vec<T>> {
    if w.len() != shape.len() {
        return Err(Error::Dimension(format!("{} weights for {} nodes", w.len(), shape.len())));
    }
    let Some(group) = shape.symmetry() else {
        return Ok(w.to_vec());
    };
    let perms = group.elements().iter().map(|u| shape.match_nodes(u)).collect::<Result<Vec<_>>>()?;
    let g = T::from_usize_lossy(perms.len());
    let mut out: Vec<T> = (0..w.len())
        .map(|i| {
            let orbit: Vec<T> = perms.iter().map(|p| w[p[i]]).collect();
            pairwise_sum(&orbit) / g
        })
        .collect();
    let s = pairwise_sum(&out);
    out.iter_mut().for_each(|x| *x = *x / s);
    Ok(out)
}
