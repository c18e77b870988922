//! Regularized diagonal of the energy matrix.
//!
//! A node stands for a small cell. The diagonal entry is `Φ(ρ)` with `ρ`
//! chosen so that `Φ(ρ)` equals the mean of `Φ(|x − y|)` over two independent
//! uniform points of a model cell with the node's cell radius: a segment of
//! length `2r`, a disk of radius `r`, or a ball of radius `r`.

use crate::error::{Error, Result};
use crate::kernels::{Kernel, KernelKind};
use crate::quadrature::integrate;
use crate::scalar::Real;

/// Ratio `ρ / r` for a cell of dimension `cell_dim` and radius `r`.
pub fn self_interaction_factor<T: Real>(kernel: &Kernel<T>, cell_dim: usize) -> Result<f64> {
    if !(1..=3).contains(&cell_dim) {
        return Err(Error::InvalidArgument(format!("cells of dimension {cell_dim} are not supported")));
    }
    match kernel.kind() {
        // −log ρ = E[−log|x−y|], so ρ/r = exp(E log|x−y|) on the unit cell.
        KernelKind::Log => Ok(unit_cell_mean_log(cell_dim).exp()),
        KernelKind::Riesz => {
            let p = kernel.p().to_f64_lossy();
            if p >= cell_dim as f64 {
                return Err(Error::InvalidKernel(format!(
                    "riesz exponent {p} has infinite self-energy on {cell_dim}-dimensional cells"
                )));
            }
            Ok(unit_cell_mean_riesz(cell_dim, p).powf(-1.0 / p))
        }
    }
}

/// `E log|x − y|` for uniform points in the unit segment half-length 1
/// (length 2), unit disk or unit ball.
fn unit_cell_mean_log(cell_dim: usize) -> f64 {
    match cell_dim {
        1 => 2f64.ln() - 1.5,
        2 => -0.25,
        _ => ball_pdf_terms().iter().map(|&(c, k)| c * int_rk_log(k)).sum(),
    }
}

/// `E |x − y|^{−p}` over the same cells.
fn unit_cell_mean_riesz(cell_dim: usize, p: f64) -> f64 {
    match cell_dim {
        1 => 2f64.powf(-p) * 2.0 / ((1.0 - p) * (2.0 - p)),
        2 => disk_mean_riesz(p),
        _ => ball_pdf_terms().iter().map(|&(c, k)| c * 2f64.powf(k + 1.0 - p) / (k + 1.0 - p)).sum(),
    }
}

/// Distance density of two uniform points in the unit ball, as `Σ c r^k`.
fn ball_pdf_terms() -> [(f64, f64); 3] {
    [(3.0, 2.0), (-9.0 / 4.0, 3.0), (3.0 / 16.0, 5.0)]
}

/// `∫_0^2 r^k log r dr`.
fn int_rk_log(k: f64) -> f64 {
    let m = k + 1.0;
    2f64.powf(m) * (2f64.ln() / m - 1.0 / (m * m))
}

/// Mean of `r^{−p}` for the unit disk, whose distance density is
/// `(4r/π)(acos(r/2) − (r/2)√(1 − r²/4))`. The substitution
/// `r = 2 sin(π v^m / 2)` removes both endpoint singularities.
fn disk_mean_riesz(p: f64) -> f64 {
    use std::f64::consts::FRAC_PI_2;
    let m = (4.0 / (2.0 - p)).max(2.0);
    let f = |v: f64| {
        if v <= 0.0 {
            return 0.0;
        }
        let th = FRAC_PI_2 * v.powf(m);
        let dth = FRAC_PI_2 * m * v.powf(m - 1.0);
        let (s, c) = th.sin_cos();
        let r = 2.0 * s;
        let dens = (4.0 * r / std::f64::consts::PI) * ((FRAC_PI_2 - th) - s * c);
        r.powf(-p) * dens * 2.0 * c * dth
    };
    integrate(f, 0.0, 1.0, 64, 20)
}

/// Regularization radii `ρ_i = factor · scale · r_i`.
pub fn self_interaction_radii<T: Real>(radii: &[T], kernel: &Kernel<T>, cell_dim: usize, scale: f64) -> Result<Vec<T>> {
    let f = T::lit(self_interaction_factor(kernel, cell_dim)? * scale);
    Ok(radii.iter().map(|&r| r * f).collect())
}
