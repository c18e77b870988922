//! Mesh-refinement extrapolation `C(h) ≈ C* + a·h^q`.

use serde::{Deserialize, Serialize};

use super::{assemble_energy_matrix_with, solve_equilibrium, Regularization};
use crate::error::{Error, Result};
use crate::geometry::{build_shape, Shape, ShapeSpec};
use crate::kernels::Kernel;
use crate::scalar::Real;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LevelEstimate {
    pub resolution: usize,
    pub nodes: usize,
    /// `N^{−1/cell_dim}`.
    pub h: f64,
    pub energy: f64,
    pub capacity: f64,
    pub iterations: usize,
    pub gap: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ErrorModel {
    /// Fitted convergence order `q`, searched in `[0.25, 4]`.
    pub order: f64,
    pub coefficient: f64,
    /// Root-mean-square residual of the fit.
    pub residual: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Extrapolation {
    pub levels: Vec<LevelEstimate>,
    pub extrapolated: f64,
    pub error_model: ErrorModel,
    /// Whether the per-level capacities move monotonically.
    pub monotone: bool,
}

pub const ORDER_RANGE: (f64, f64) = (0.25, 4.0);

pub fn capacity_extrapolated<T: Real>(spec: &ShapeSpec, kernel: &Kernel<T>, levels: &[usize]) -> Result<Extrapolation> {
    capacity_extrapolated_with(spec, kernel, levels, Regularization::default(), T::lit(1e-9))
}

pub fn capacity_extrapolated_with<T: Real>(
    spec: &ShapeSpec,
    kernel: &Kernel<T>,
    levels: &[usize],
    reg: Regularization,
    tol: T,
) -> Result<Extrapolation> {
    if levels.len() < 3 {
        return Err(Error::InvalidArgument("extrapolation needs at least three levels".into()));
    }
    if levels.windows(2).any(|p| p[1] <= p[0]) {
        return Err(Error::InvalidArgument("levels must be strictly increasing".into()));
    }
    let mut out = Vec::with_capacity(levels.len());
    for &res in levels {
        let shape: Shape<T> = build_shape(&spec.with_resolution(res))?;
        let a = assemble_energy_matrix_with(&shape, kernel, reg)?;
        let r = solve_equilibrium(&a, tol, 200 * shape.len())?;
        if !r.converged {
            return Err(Error::NonConvergence(format!(
                "level {res} ({} nodes): gap {:e} after {} iterations",
                shape.len(),
                r.gap.to_f64_lossy(),
                r.iterations
            )));
        }
        out.push(LevelEstimate {
            resolution: res,
            nodes: shape.len(),
            h: (shape.len() as f64).powf(-1.0 / shape.cell_dim() as f64),
            energy: r.energy.to_f64_lossy(),
            capacity: r.capacity.to_f64_lossy(),
            iterations: r.iterations,
            gap: r.gap.to_f64_lossy(),
        });
    }
    let tail = &out[out.len() - 3..];
    let hs: Vec<f64> = tail.iter().map(|l| l.h).collect();
    let cs: Vec<f64> = tail.iter().map(|l| l.capacity).collect();
    let (extrapolated, error_model) = fit_power_law(&hs, &cs);
    let d: Vec<f64> = out.windows(2).map(|p| p[1].capacity - p[0].capacity).collect();
    let monotone = d.iter().all(|&x| x >= 0.0) || d.iter().all(|&x| x <= 0.0);
    Ok(Extrapolation { levels: out, extrapolated, error_model, monotone })
}

/// Least-squares fit of `c = C* + a h^q`: linear in `(C*, a)` for each `q`,
/// with `q` found by a grid scan refined by golden-section search.
pub fn fit_power_law(h: &[f64], c: &[f64]) -> (f64, ErrorModel) {
    let linear = |q: f64| -> (f64, f64, f64) {
        let x: Vec<f64> = h.iter().map(|v| v.powf(q)).collect();
        let m = x.len() as f64;
        let mx = x.iter().sum::<f64>() / m;
        let mc = c.iter().sum::<f64>() / m;
        let sxx: f64 = x.iter().map(|v| (v - mx) * (v - mx)).sum();
        let sxc: f64 = x.iter().zip(c).map(|(v, w)| (v - mx) * (w - mc)).sum();
        let a = if sxx > 0.0 { sxc / sxx } else { 0.0 };
        let c0 = mc - a * mx;
        let rss: f64 = x.iter().zip(c).map(|(v, w)| (c0 + a * v - w).powi(2)).sum();
        (c0, a, (rss / m).sqrt())
    };
    let (lo, hi) = ORDER_RANGE;
    let steps = 1500;
    let grid = |k: usize| lo + (hi - lo) * k as f64 / steps as f64;
    let best = (0..=steps).min_by(|&i, &j| linear(grid(i)).2.total_cmp(&linear(grid(j)).2)).unwrap_or(0);
    let (mut a, mut b) = (grid(best.saturating_sub(1)), grid((best + 1).min(steps)));
    let g = (5f64.sqrt() - 1.0) / 2.0;
    for _ in 0..60 {
        let x1 = b - g * (b - a);
        let x2 = a + g * (b - a);
        if linear(x1).2 <= linear(x2).2 {
            b = x2;
        } else {
            a = x1;
        }
    }
    let q = 0.5 * (a + b);
    let (c0, coef, residual) = linear(q);
    (c0, ErrorModel { order: q, coefficient: coef, residual })
}
