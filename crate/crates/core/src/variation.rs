//! Energy of a fixed weight vector pushed forward along a diagonal flow,
//! its analytic t-derivatives, and the pairwise concavity condition.
//!
//! `E(t) = Σ_{i≠j} w_i w_j Φ(|S_t(x_i − x_j)|) + Σ_i w_i² Φ(ρ_i(t))`, where
//! the self-interaction radius follows the local stretch of its cell.
//! Derivatives cover the off-diagonal part only; the diagonal carries no
//! pair separation and is frozen in finite-difference comparisons.

use std::io::Write;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::equilibrium::{quadratic_form, self_interaction_radii, Regularization};
use crate::error::{Error, Result};
use crate::geometry::Shape;
use crate::kernels::{Kernel, KernelSpec};
use crate::matrix_tools::{svd, Flow, FlowSpec, Mat};
use crate::scalar::{dot, pairwise_sum, Real};

/// Identifies what a curve was computed from.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub shape: String,
    pub nodes: usize,
    pub kernel: KernelSpec,
    pub flow: FlowSpec,
}

#[derive(Clone, Debug)]
pub struct EnergyCurve<T> {
    pub t_grid: Vec<T>,
    pub values: Vec<T>,
    pub d1: Vec<T>,
    pub d2: Vec<T>,
    pub provenance: Provenance,
}

/// How the diagonal terms are treated when evaluating `E(t)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Diagonal {
    /// Radii follow the cell stretch, as in assembly of the mapped shape.
    Mapped,
    /// Radii stay at their `t = 0` values.
    Frozen,
    /// Diagonal terms dropped.
    Excluded,
}

/// 21 equally spaced times on `[0, 1]`.
pub fn default_t_grid<T: Real>() -> Vec<T> {
    linspace(T::zero(), T::one(), 21)
}

pub fn linspace<T: Real>(a: T, b: T, count: usize) -> Vec<T> {
    if count == 1 {
        return vec![a];
    }
    let step = (b - a) / T::from_usize_lossy(count - 1);
    (0..count).map(|k| if k + 1 == count { b } else { a + step * T::from_usize_lossy(k) }).collect()
}

/// Precomputed inputs shared by every evaluation along one flow.
struct Setup<'a, T: Real> {
    shape: &'a Shape<T>,
    w: &'a [T],
    kernel: &'a Kernel<T>,
    flow: &'a Flow<T>,
    rho: Vec<T>,
}

impl<'a, T: Real> Setup<'a, T> {
    fn new(
        shape: &'a Shape<T>,
        w: &'a [T],
        kernel: &'a Kernel<T>,
        flow: &'a Flow<T>,
        reg: Regularization,
    ) -> Result<Self> {
        let n = shape.dim();
        if flow.dim() != n {
            return Err(Error::Dimension(format!("flow acts on R^{} but the shape lives in R^{n}", flow.dim())));
        }
        kernel.check_dimension(n)?;
        check_weights(w, shape.len())?;
        if shape.cell_dim() < n && shape.cell_axes().is_none() {
            return Err(Error::InvalidSpec("lower-dimensional cells need axes to follow the flow".into()));
        }
        let rho = self_interaction_radii(shape.cell_radii(), kernel, shape.cell_dim(), reg.scale)?;
        Ok(Self { shape, w, kernel, flow, rho })
    }

    fn check_t(&self, t: T) -> Result<()> {
        if self.flow.contains(t) {
            Ok(())
        } else {
            let (lo, hi) = self.flow.domain();
            Err(Error::OutsideDomain { t: t.to_f64_lossy(), lo: lo.to_f64_lossy(), hi: hi.to_f64_lossy() })
        }
    }

    /// Stretch factor of cell `i` under `diag(d)`; exactly 1 when `d = 1`.
    fn radius_factor(&self, i: usize, d: &[T]) -> T {
        let n = self.shape.dim();
        let cd = self.shape.cell_dim();
        if cd == n {
            let det: T = d.iter().fold(T::one(), |p, &x| p * x).abs();
            return det.powf(T::from_usize_lossy(n).recip());
        }
        let u = self.shape.cell_axis(i).expect("axes checked in setup");
        let len = |f: &dyn Fn(usize) -> T| (0..n).fold(T::zero(), |s, k| s + f(k) * f(k)).sqrt();
        let base = len(&|k| u[k]);
        if cd == 1 {
            len(&|k| d[k] * u[k]) / base
        } else {
            let det: T = d.iter().fold(T::one(), |p, &x| p * x).abs();
            let s = len(&|k| u[k] / d[k]) / base;
            (det * s).powf(T::from_usize_lossy(cd).recip())
        }
    }

    fn energy(&self, t: T, diagonal: Diagonal) -> Result<T> {
        self.check_t(t)?;
        let (d, _, _) = self.flow.diagonals(t)?;
        let shape = self.shape;
        let n = shape.dim();
        let len = shape.len();
        let potentials: Vec<T> = (0..len)
            .into_par_iter()
            .map_init(
                || vec![T::zero(); len],
                |row, i| {
                    let xi = shape.point(i);
                    for (j, slot) in row.iter_mut().enumerate() {
                        if j == i {
                            *slot = match diagonal {
                                Diagonal::Mapped => self.kernel.value(self.rho[i] * self.radius_factor(i, &d)),
                                Diagonal::Frozen => self.kernel.value(self.rho[i]),
                                Diagonal::Excluded => T::zero(),
                            };
                            continue;
                        }
                        let xj = shape.point(j);
                        let mut s = T::zero();
                        for k in 0..n {
                            let z = (xi[k] - xj[k]) * d[k];
                            s = s + z * z;
                        }
                        *slot = self.kernel.value(s.sqrt());
                    }
                    dot(row, self.w)
                },
            )
            .collect();
        Ok(quadratic_form(self.w, &potentials))
    }

    /// First and second t-derivatives of the off-diagonal energy.
    fn derivatives(&self, t: T) -> Result<(T, T)> {
        self.check_t(t)?;
        let (d0, d1, d2) = self.flow.diagonals(t)?;
        let shape = self.shape;
        let n = shape.dim();
        let len = shape.len();
        let rows: Vec<(T, T)> = (0..len)
            .into_par_iter()
            .map(|i| {
                let xi = shape.point(i);
                let (mut g1, mut g2) = (T::zero(), T::zero());
                for j in 0..len {
                    if j == i {
                        continue;
                    }
                    let xj = shape.point(j);
                    // a = |S z|², b = S z · Ṡ z, c = |Ṡ z|² + S z · S̈ z
                    let (mut a, mut b, mut c) = (T::zero(), T::zero(), T::zero());
                    for k in 0..n {
                        let z = xi[k] - xj[k];
                        let z2 = z * z;
                        a = a + d0[k] * d0[k] * z2;
                        b = b + d0[k] * d1[k] * z2;
                        c = c + (d1[k] * d1[k] + d0[k] * d2[k]) * z2;
                    }
                    let r = a.sqrt();
                    let r1 = b / r;
                    let r2 = c / r - b * b / (a * r);
                    let p1 = self.kernel.d1(r);
                    g1 = g1 + self.w[j] * p1 * r1;
                    g2 = g2 + self.w[j] * (self.kernel.d2(r) * r1 * r1 + p1 * r2);
                }
                (self.w[i] * g1, self.w[i] * g2)
            })
            .collect();
        let (a, b): (Vec<T>, Vec<T>) = rows.into_iter().unzip();
        Ok((pairwise_sum(&a), pairwise_sum(&b)))
    }

    fn provenance(&self) -> Provenance {
        Provenance {
            shape: self.shape.label().to_string(),
            nodes: self.shape.len(),
            kernel: self.kernel.spec(),
            flow: self.flow.spec(),
        }
    }
}

fn check_weights<T: Real>(w: &[T], n: usize) -> Result<()> {
    if w.len() != n {
        return Err(Error::Dimension(format!("{} weights for {n} nodes", w.len())));
    }
    if w.iter().any(|&x| !(x >= T::zero()) || !x.is_finite()) {
        return Err(Error::InvalidArgument("weights must be finite and non-negative".into()));
    }
    let s = pairwise_sum(w);
    if (s - T::one()).abs() > T::tol(1e-10) {
        return Err(Error::InvalidArgument(format!("weights must sum to 1, got {s}")));
    }
    Ok(())
}

pub fn energy_curve<T: Real>(
    shape: &Shape<T>,
    w: &[T],
    kernel: &Kernel<T>,
    flow: &Flow<T>,
    t_grid: &[T],
) -> Result<EnergyCurve<T>> {
    energy_curve_with(shape, w, kernel, flow, t_grid, Regularization::default())
}

/// [`energy_curve`] with an explicit self-interaction scale; use the same
/// value as the assembly that produced `w`.
pub fn energy_curve_with<T: Real>(
    shape: &Shape<T>,
    w: &[T],
    kernel: &Kernel<T>,
    flow: &Flow<T>,
    t_grid: &[T],
    reg: Regularization,
) -> Result<EnergyCurve<T>> {
    let st = Setup::new(shape, w, kernel, flow, reg)?;
    for &t in t_grid {
        st.check_t(t)?;
    }
    let mut values = Vec::with_capacity(t_grid.len());
    let mut d1 = Vec::with_capacity(t_grid.len());
    let mut d2 = Vec::with_capacity(t_grid.len());
    for &t in t_grid {
        let v = st.energy(t, Diagonal::Mapped)?;
        if !v.is_finite() {
            return Err(Error::NotANumber);
        }
        let (a, b) = st.derivatives(t)?;
        values.push(v);
        d1.push(a);
        d2.push(b);
    }
    Ok(EnergyCurve { t_grid: t_grid.to_vec(), values, d1, d2, provenance: st.provenance() })
}

/// `E(t)` with the chosen diagonal treatment.
pub fn energy_at<T: Real>(
    shape: &Shape<T>,
    w: &[T],
    kernel: &Kernel<T>,
    flow: &Flow<T>,
    t: T,
    diagonal: Diagonal,
) -> Result<T> {
    Setup::new(shape, w, kernel, flow, Regularization::default())?.energy(t, diagonal)
}

/// Analytic `E′(t)` (order 1) or `E″(t)` (order 2), diagonal excluded.
pub fn variation_derivative<T: Real>(
    shape: &Shape<T>,
    w: &[T],
    kernel: &Kernel<T>,
    flow: &Flow<T>,
    t: T,
    order: u8,
) -> Result<T> {
    if !matches!(order, 1 | 2) {
        return Err(Error::InvalidArgument(format!("derivative order {order} not supported")));
    }
    let (a, b) = Setup::new(shape, w, kernel, flow, Regularization::default())?.derivatives(t)?;
    Ok(if order == 1 { a } else { b })
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FiniteDifferenceRow {
    pub t: f64,
    pub d1: f64,
    pub d1_fd: f64,
    pub d2: f64,
    pub d2_fd: f64,
    pub rel_err1: f64,
    pub rel_err2: f64,
    pub step: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FiniteDifferenceReport {
    pub rows: Vec<FiniteDifferenceRow>,
    pub tolerance: f64,
    pub max_rel_err: f64,
    pub pass: bool,
}

/// Five-point central differences of the frozen-diagonal energy against the
/// analytic derivatives. The step is `1e-2`, halved until the stencil fits
/// inside the flow's domain; truncation error is `O(h⁴)`, far below the
/// rounding error of a `1e-4` second difference.
///
/// Errors are relative to `max(|E′(t)|, |E″(t)|)` (floored at `1e-12 |E|`),
/// so a derivative that vanishes, as `E′(0)` does on symmetric weights, is
/// compared against the curve's own scale rather than against roundoff.
pub fn finite_difference_check<T: Real>(
    shape: &Shape<T>,
    w: &[T],
    kernel: &Kernel<T>,
    flow: &Flow<T>,
    t_grid: &[T],
    tol: f64,
) -> Result<FiniteDifferenceReport> {
    let st = Setup::new(shape, w, kernel, flow, Regularization::default())?;
    let mut rows = Vec::with_capacity(t_grid.len());
    for &t in t_grid {
        let (a1, a2) = st.derivatives(t)?;
        let (a1, a2) = (a1.to_f64_lossy(), a2.to_f64_lossy());
        let mut h = T::lit(1e-2);
        while !(flow.contains(t - T::lit(2.0) * h) && flow.contains(t + T::lit(2.0) * h)) {
            h = h / T::lit(2.0);
            if h < T::lit(1e-8) {
                return Err(Error::InvalidArgument(format!("t = {t} is too close to the edge of the flow's domain")));
            }
        }
        let e = |k: f64| -> Result<f64> { Ok(st.energy(t + T::lit(k) * h, Diagonal::Frozen)?.to_f64_lossy()) };
        let (em2, em1, e0, ep1, ep2) = (e(-2.0)?, e(-1.0)?, e(0.0)?, e(1.0)?, e(2.0)?);
        let hf = h.to_f64_lossy();
        let f1 = (em2 - 8.0 * em1 + 8.0 * ep1 - ep2) / (12.0 * hf);
        let f2 = (-em2 + 16.0 * em1 - 30.0 * e0 + 16.0 * ep1 - ep2) / (12.0 * hf * hf);
        let scale = a1.abs().max(a2.abs()).max(1e-12 * e0.abs()).max(f64::MIN_POSITIVE);
        rows.push(FiniteDifferenceRow {
            t: t.to_f64_lossy(),
            d1: a1,
            d1_fd: f1,
            d2: a2,
            d2_fd: f2,
            rel_err1: (a1 - f1).abs() / scale,
            rel_err2: (a2 - f2).abs() / scale,
            step: hf,
        });
    }
    let max_rel_err = rows.iter().map(|r| r.rel_err1.max(r.rel_err2)).fold(0.0, f64::max);
    Ok(FiniteDifferenceReport { rows, tolerance: tol, max_rel_err, pass: max_rel_err <= tol })
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ConcavityRow {
    pub pair: usize,
    pub t: f64,
    /// `(p+1)|Ṡ_t z|²`
    pub lhs: f64,
    /// `S_t z · S̈_t z`
    pub rhs: f64,
    pub rel_residual: f64,
    /// `Φ″(r) − Φ′(r)/r` at `r = |S_t z|`.
    pub convexity_margin: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ConcavityReport {
    pub rows: Vec<ConcavityRow>,
    pub tolerance: f64,
    pub max_rel_residual: f64,
    pub equality_holds: bool,
    pub convexity_positive: bool,
}

/// Evaluates both sides of `(p+1)|Ṡ_t z|² ≤ S_t z · S̈_t z` for the difference
/// vectors `z = x − y` of the sample pairs. For the built-in flows the two
/// sides agree to 1e-10 relative. `p` is taken from the kernel (0 for log).
pub fn concavity_condition_check<T: Real>(
    flow: &Flow<T>,
    kernel: &Kernel<T>,
    pairs: &[(Vec<T>, Vec<T>)],
    t_grid: &[T],
) -> Result<ConcavityReport> {
    let n = flow.dim();
    let p1 = kernel.p() + T::one();
    let mut rows = Vec::new();
    for (idx, (x, y)) in pairs.iter().enumerate() {
        if x.len() != n || y.len() != n {
            return Err(Error::Dimension(format!("pair {idx} is not in R^{n}")));
        }
        let z: Vec<T> = x.iter().zip(y).map(|(&a, &b)| a - b).collect();
        for &t in t_grid {
            let (d0, d1, d2) = flow.diagonals(t)?;
            let (mut lhs, mut rhs, mut r2) = (T::zero(), T::zero(), T::zero());
            for k in 0..n {
                let z2 = z[k] * z[k];
                lhs = lhs + d1[k] * d1[k] * z2;
                rhs = rhs + d0[k] * d2[k] * z2;
                r2 = r2 + d0[k] * d0[k] * z2;
            }
            let lhs = p1 * lhs;
            let scale = lhs.abs().max(rhs.abs());
            let rel = if scale > T::zero() { (lhs - rhs).abs() / scale } else { T::zero() };
            let r = r2.sqrt();
            let margin = if r > T::zero() { kernel.convexity_margin(r) } else { T::infinity() };
            rows.push(ConcavityRow {
                pair: idx,
                t: t.to_f64_lossy(),
                lhs: lhs.to_f64_lossy(),
                rhs: rhs.to_f64_lossy(),
                rel_residual: rel.to_f64_lossy(),
                convexity_margin: margin.to_f64_lossy(),
            });
        }
    }
    let tolerance = 1e-10_f64.max(T::epsilon().to_f64_lossy() * 64.0);
    let max_rel_residual = rows.iter().map(|r| r.rel_residual).fold(0.0, f64::max);
    Ok(ConcavityReport {
        equality_holds: max_rel_residual <= tolerance,
        convexity_positive: rows.iter().all(|r| r.convexity_margin > 0.0),
        rows,
        tolerance,
        max_rel_residual,
    })
}

/// Rank of the weighted second-moment matrix of the support of `w` about its
/// barycenter. A full-rank support does not lie in any affine hyperplane.
pub fn support_rank<T: Real>(shape: &Shape<T>, w: &[T]) -> Result<usize> {
    check_weights(w, shape.len())?;
    let n = shape.dim();
    let mut c = vec![T::zero(); n];
    for (i, &wi) in w.iter().enumerate() {
        for (ck, &x) in c.iter_mut().zip(shape.point(i)) {
            *ck = *ck + wi * x;
        }
    }
    let mut m = Mat::zeros(n, n);
    for (i, &wi) in w.iter().enumerate() {
        if wi > T::zero() {
            let x = shape.point(i);
            for a in 0..n {
                for b in 0..n {
                    m[(a, b)] = m[(a, b)] + wi * (x[a] - c[a]) * (x[b] - c[b]);
                }
            }
        }
    }
    let sv = svd(&m).sigma;
    let top = sv.iter().fold(T::zero(), |a, &b| a.max(b));
    Ok(sv.iter().filter(|&&s| s > top * T::tol(1e-10)).count())
}

impl<T: Real> EnergyCurve<T> {
    /// `E(0)` when 0 is on the grid.
    pub fn value_at_zero(&self) -> Option<T> {
        self.t_grid.iter().position(|&t| t == T::zero()).map(|k| self.values[k])
    }

    /// Largest `d2` relative to `|E(0)|` (or the first value).
    pub fn max_relative_d2(&self) -> T {
        let e = self.value_at_zero().unwrap_or(self.values[0]).abs().max(T::min_positive_value());
        self.d2.iter().fold(T::neg_infinity(), |m, &x| m.max(x / e))
    }

    /// Largest second central difference of `values` relative to `|E(0)|`;
    /// assumes a uniform grid.
    pub fn max_relative_second_difference(&self) -> T {
        let e = self.value_at_zero().unwrap_or(self.values[0]).abs().max(T::min_positive_value());
        self.values.windows(3).fold(T::neg_infinity(), |m, v| m.max((v[0] - v[1] - v[1] + v[2]) / e))
    }

    /// True when `E(0)` strictly exceeds every other grid value.
    pub fn zero_is_strict_maximum(&self) -> bool {
        match self.t_grid.iter().position(|&t| t == T::zero()) {
            Some(k) => self.values.iter().enumerate().all(|(j, &v)| j == k || v < self.values[k]),
            None => false,
        }
    }

    pub fn write_csv_to<W: Write>(&self, out: W) -> Result<()> {
        let mut wtr = csv::Writer::from_writer(out);
        wtr.write_record(["t", "E", "d1", "d2"])?;
        for k in 0..self.t_grid.len() {
            wtr.write_record([
                self.t_grid[k].to_f64_lossy().to_string(),
                self.values[k].to_f64_lossy().to_string(),
                self.d1[k].to_f64_lossy().to_string(),
                self.d2[k].to_f64_lossy().to_string(),
            ])?;
        }
        wtr.flush()?;
        Ok(())
    }

    pub fn write_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        self.write_csv_to(std::fs::File::create(path)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::equilibrium::{assemble_energy_matrix, solve_equilibrium};
    use crate::geometry::{build_shape, Discretization, ShapeSpec};
    use crate::matrix_tools::{make_flow, FlowKind};

    fn pair_shape() -> Shape<f64> {
        Shape::from_parts(2, 2, vec![1.0, 0.0, -1.0, 0.0], vec![0.01, 0.01], None, Discretization::Volume, None, None, String::new())
            .unwrap()
    }

    #[test]
    fn two_point_first_variation_by_hand() {
        let s = pair_shape();
        let f = make_flow(&[2.0, 0.5], FlowKind::Log).unwrap();
        let d = variation_derivative(&s, &[0.5, 0.5], &Kernel::log(), &f, 0.0, 1).unwrap();
        assert!((d + 0.5 * 2f64.ln()).abs() < 1e-15, "{d}");
    }

    #[test]
    fn identity_flow_gives_constant_curve() {
        let s = pair_shape();
        let f = make_flow(&[1.0, 1.0], FlowKind::Log).unwrap();
        let c = energy_curve(&s, &[0.3, 0.7], &Kernel::log(), &f, &default_t_grid()).unwrap();
        let e0 = c.values[0];
        assert!(c.values.iter().all(|v| (v - e0).abs() <= 1e-12 * e0.abs().max(1.0)));
    }

    #[test]
    fn curve_at_zero_matches_solver_energy_bitwise() {
        let s: Shape<f64> = build_shape(&ShapeSpec::regular_polygon(4, 1.0, 200, Discretization::Boundary)).unwrap();
        let k = Kernel::log();
        let res = solve_equilibrium(&assemble_energy_matrix(&s, &k).unwrap(), 1e-10, 100_000).unwrap();
        let f = make_flow(&[2.0, 0.5], FlowKind::Log).unwrap();
        let c = energy_curve(&s, &res.weights, &k, &f, &[0.0, 0.5, 1.0]).unwrap();
        assert_eq!(c.values[0], res.energy);
        assert!(c.values[0] > c.values[1] && c.values[1] > c.values[2]);
    }

    #[test]
    fn riesz_concavity_example() {
        let f = make_flow(&[2.0, 2.0 / 3.0], FlowKind::Riesz { p: 1.0 }).unwrap();
        let rep = concavity_condition_check(&f, &Kernel::riesz(1.0).unwrap(), &[(vec![1.0, 0.0], vec![0.0, 0.0])], &[0.0]).unwrap();
        assert!((rep.rows[0].lhs - 0.5).abs() < 1e-14 && (rep.rows[0].rhs - 0.5).abs() < 1e-14);
        assert!(rep.equality_holds && rep.convexity_positive);
    }

    #[test]
    fn outside_domain_and_bad_order_rejected() {
        let s = pair_shape();
        let f = make_flow(&[2.0, 2.0 / 3.0], FlowKind::Riesz { p: 1.0 }).unwrap();
        let k = Kernel::riesz(1.0).unwrap();
        assert!(matches!(energy_curve(&s, &[0.5, 0.5], &k, &f, &[10.0]), Err(Error::OutsideDomain { .. })));
        assert!(variation_derivative(&s, &[0.5, 0.5], &k, &f, 0.0, 3).is_err());
    }

    #[test]
    fn csv_has_expected_header() {
        let s = pair_shape();
        let f = make_flow(&[2.0, 0.5], FlowKind::Log).unwrap();
        let c = energy_curve(&s, &[0.5, 0.5], &Kernel::log(), &f, &[0.0, 1.0]).unwrap();
        let mut buf = Vec::new();
        c.write_csv_to(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("t,E,d1,d2\n"));
        assert_eq!(text.lines().count(), 3);
    }
}
