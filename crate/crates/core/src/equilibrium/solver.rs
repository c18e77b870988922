//! Minimization of `wᵀAw` over the probability simplex.
//!
//! The iteration is a fully corrective away-step conditional-gradient
//! method. A Frank–Wolfe vertex (the node of lowest potential) enters the
//! support, then the energy is minimized exactly over the affine hull of the
//! support with a ratio test that drops nodes whose weight reaches zero
//! (Lawson–Hanson style). When the restricted matrix cannot be factored, the
//! solver falls back to plain away-step Frank–Wolfe with exact line search.

use serde::{Deserialize, Serialize};

use super::{capacity_from_energy, quadratic_form, EnergyMatrix};
use crate::error::{Error, Result};
use crate::matrix_tools::{cholesky_in_place, cholesky_solve};
use crate::scalar::Real;

#[derive(Clone, Debug)]
pub struct EquilibriumResult<T: Real> {
    pub weights: Vec<T>,
    pub energy: T,
    pub capacity: T,
    /// `U = A w`.
    pub potentials: Vec<T>,
    /// Frank–Wolfe gap `max_j ⟨∇, w − e_j⟩ = 2 (V − min_j U_j)`.
    pub gap: T,
    /// Away gap `max_{w_j > 0} ⟨∇, e_j − w⟩ = 2 (max U_j − V)` over the support.
    pub away_gap: T,
    pub iterations: usize,
    pub converged: bool,
    /// Energy after every accepted step, starting from uniform weights.
    pub energy_trace: Vec<T>,
}

/// JSON form of a result.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResultFile {
    pub weights: Vec<f64>,
    pub energy: f64,
    pub capacity: f64,
    pub gap: f64,
    pub iterations: usize,
    pub converged: bool,
}

impl<T: Real> EquilibriumResult<T> {
    /// `τ = max(10·gap, 1e-8·|V|)`.
    pub fn frostman_tolerance(&self) -> T {
        (T::lit(10.0) * self.gap.max(self.away_gap)).max(T::tol(1e-8) * self.energy.abs())
    }

    /// Largest violation of the discrete Frostman conditions
    /// (`U_i ≤ V + τ` on the support, `U_i ≥ V − τ` everywhere), minus `τ`.
    /// Non-positive means the conditions hold.
    pub fn frostman_excess(&self) -> T {
        let tau = self.frostman_tolerance();
        let support = T::tol(1e-12);
        let mut worst = T::neg_infinity();
        for (&w, &u) in self.weights.iter().zip(&self.potentials) {
            worst = worst.max(self.energy - u);
            if w > support {
                worst = worst.max(u - self.energy);
            }
        }
        worst - tau
    }

    pub fn satisfies_frostman(&self) -> bool {
        self.frostman_excess() <= T::zero()
    }

    /// Whether the recorded energies never increase beyond rounding.
    pub fn energy_is_monotone(&self) -> bool {
        self.energy_trace.windows(2).all(|p| p[1] <= p[0] + slack(p[0]))
    }

    pub fn to_file(&self) -> ResultFile {
        ResultFile {
            weights: self.weights.iter().map(|w| w.to_f64_lossy()).collect(),
            energy: self.energy.to_f64_lossy(),
            capacity: self.capacity.to_f64_lossy(),
            gap: self.gap.to_f64_lossy(),
            iterations: self.iterations,
            converged: self.converged,
        }
    }
}

fn slack<T: Real>(v: T) -> T {
    T::epsilon() * T::lit(1024.0) * (T::one() + v.abs())
}

struct State<T> {
    w: Vec<T>,
    u: Vec<T>,
    v: T,
}

impl<T: Real> State<T> {
    fn new(a: &EnergyMatrix<T>, w: Vec<T>) -> Self {
        let u = a.potentials(&w);
        let v = quadratic_form(&w, &u);
        Self { w, u, v }
    }

    fn refresh(&mut self, a: &EnergyMatrix<T>) {
        self.u = a.potentials(&self.w);
        self.v = quadratic_form(&self.w, &self.u);
    }

    /// `(fw_gap, away_gap, argmin U)`; ties resolve to the lowest index.
    fn gaps(&self) -> (T, T, usize) {
        let mut jmin = 0;
        let mut umax = T::neg_infinity();
        for (j, &u) in self.u.iter().enumerate() {
            if u < self.u[jmin] {
                jmin = j;
            }
            if self.w[j] > T::zero() && u > umax {
                umax = u;
            }
        }
        let two = T::lit(2.0);
        (two * (self.v - self.u[jmin]), two * (umax - self.v), jmin)
    }
}

/// Minimizes `wᵀAw` over the simplex from uniform weights. Returns the best
/// iterate with `converged = false` when `max_iter` steps are exhausted.
pub fn solve_equilibrium<T: Real>(a: &EnergyMatrix<T>, tol: T, max_iter: usize) -> Result<EquilibriumResult<T>> {
    solve(a, tol, max_iter, true)
}

fn solve<T: Real>(a: &EnergyMatrix<T>, tol: T, max_iter: usize, corrective: bool) -> Result<EquilibriumResult<T>> {
    let n = a.n();
    if n < 2 {
        return Err(Error::InvalidArgument(
            "a single node carries a point mass, whose energy is infinite".into(),
        ));
    }
    if !a.is_finite() {
        return Err(Error::NotANumber);
    }
    if !(tol > T::zero()) {
        return Err(Error::InvalidArgument(format!("tolerance must be positive, got {tol}")));
    }
    let mut st = State::new(a, vec![T::from_usize_lossy(n).recip(); n]);
    let mut support = vec![true; n];
    let mut trace = vec![st.v];
    let mut shift = a.max_abs().max(T::one());
    let mut corrective = corrective;
    let mut iterations = 0;
    let mut converged = false;
    let mut since_refresh = 0;

    loop {
        let (gap, away, jmin) = st.gaps();
        let thr = tol * st.v.abs().max(T::one());
        if gap <= thr && away <= thr {
            converged = true;
            break;
        }
        if iterations >= max_iter {
            break;
        }
        let saved = (st.w.clone(), st.u.clone(), st.v, support.clone());
        if corrective {
            if gap > thr {
                support[jmin] = true;
            }
            match corrective_step(a, &mut st, &mut support, &mut shift, &mut iterations, max_iter) {
                Some(()) => st.refresh(a),
                None => corrective = false,
            }
        } else {
            away_step(a, &mut st);
            iterations += 1;
            since_refresh += 1;
            if since_refresh >= n {
                st.refresh(a);
                since_refresh = 0;
            }
        }
        if st.v > saved.2 + slack(saved.2) || st.v.is_nan() {
            (st.w, st.u, st.v, support) = saved;
            if corrective {
                corrective = false;
                continue;
            }
            break;
        }
        if !corrective {
            for (s, &w) in support.iter_mut().zip(&st.w) {
                *s = w > T::zero();
            }
        }
        trace.push(st.v);
    }

    st.refresh(a);
    let (gap, away_gap, _) = st.gaps();
    let capacity = capacity_from_energy(st.v, a.kernel())?;
    Ok(EquilibriumResult {
        weights: st.w,
        energy: st.v,
        capacity,
        potentials: st.u,
        gap: gap.max(T::zero()),
        away_gap: away_gap.max(T::zero()),
        iterations,
        converged,
        energy_trace: trace,
    })
}

/// Moves `w` to the minimizer of the energy over the simplex face spanned
/// by `support`, shrinking the support as needed. `None` when a restricted
/// matrix is not positive definite on the hyperplane `Σw = 1`.
fn corrective_step<T: Real>(
    a: &EnergyMatrix<T>,
    st: &mut State<T>,
    support: &mut [bool],
    shift: &mut T,
    iterations: &mut usize,
    max_iter: usize,
) -> Option<()> {
    loop {
        *iterations += 1;
        let idx: Vec<usize> = (0..support.len()).filter(|&i| support[i]).collect();
        let y = affine_minimizer(a, &idx, shift)?;
        let mut alpha = T::one();
        let mut blocking = Vec::new();
        for (k, &i) in idx.iter().enumerate() {
            if y[k] < T::zero() {
                let r = st.w[i] / (st.w[i] - y[k]);
                if r < alpha {
                    alpha = r;
                    blocking.clear();
                }
                if r <= alpha {
                    blocking.push(i);
                }
            }
        }
        if blocking.is_empty() {
            for (k, &i) in idx.iter().enumerate() {
                st.w[i] = y[k];
            }
            return Some(());
        }
        for (k, &i) in idx.iter().enumerate() {
            st.w[i] = (st.w[i] + alpha * (y[k] - st.w[i])).max(T::zero());
        }
        for &i in &blocking {
            st.w[i] = T::zero();
            support[i] = false;
        }
        renormalize(&mut st.w);
        if *iterations >= max_iter {
            return Some(());
        }
    }
}

fn renormalize<T: Real>(w: &mut [T]) {
    let s: T = crate::scalar::pairwise_sum(w);
    for x in w.iter_mut() {
        *x = *x / s;
    }
}

/// Solves `(A_SS + c 11ᵀ) z = 1` with one step of iterative refinement and
/// returns `z / Σz`, the minimizer of `wᵀAw` on the affine hull of `S`.
fn affine_minimizer<T: Real>(a: &EnergyMatrix<T>, idx: &[usize], shift: &mut T) -> Option<Vec<T>> {
    let m = idx.len();
    let build = |c: T| {
        let mut mat = vec![T::zero(); m * m];
        for (r, &i) in idx.iter().enumerate() {
            let row = a.row(i);
            for (s, &j) in idx.iter().enumerate() {
                mat[r * m + s] = row[j] + c;
            }
        }
        mat
    };
    let mut attempt = 0;
    let (l, c) = loop {
        let mut l = build(*shift);
        if cholesky_in_place(&mut l, m) {
            break (l, *shift);
        }
        attempt += 1;
        if attempt > 2 {
            return None;
        }
        *shift = *shift * T::lit(100.0);
    };
    let ones = vec![T::one(); m];
    let mut z = cholesky_solve(&l, m, &ones);
    let zsum: T = z.iter().copied().sum();
    let resid: Vec<T> = idx
        .iter()
        .map(|&i| {
            let row = a.row(i);
            let az: T = idx.iter().zip(&z).map(|(&j, &zj)| row[j] * zj).sum();
            T::one() - az - c * zsum
        })
        .collect();
    let dz = cholesky_solve(&l, m, &resid);
    for (x, d) in z.iter_mut().zip(dz) {
        *x = *x + d;
    }
    let s: T = crate::scalar::pairwise_sum(&z);
    if !(s > T::zero()) || !s.is_finite() {
        return None;
    }
    Some(z.into_iter().map(|x| x / s).collect())
}

/// One away-step Frank–Wolfe iteration with exact line search.
fn away_step<T: Real>(a: &EnergyMatrix<T>, st: &mut State<T>) {
    let n = st.w.len();
    let mut j = 0;
    let mut k = usize::MAX;
    for i in 0..n {
        if st.u[i] < st.u[j] {
            j = i;
        }
        if st.w[i] > T::zero() && (k == usize::MAX || st.u[i] > st.u[k]) {
            k = i;
        }
    }
    let fw = st.v - st.u[j];
    let aw = st.u[k] - st.v;
    let (toward, vertex, slope, gmax) = if fw >= aw {
        (true, j, st.u[j] - st.v, T::one())
    } else {
        let wk = st.w[k];
        let g = if wk < T::one() { wk / (T::one() - wk) } else { T::infinity() };
        (false, k, st.v - st.u[k], g)
    };
    let row = a.row(vertex);
    // d = ±(e_vertex − w), A d = ±(A_vertex − U).
    let sign = if toward { T::one() } else { -T::one() };
    let curv = row[vertex] - T::lit(2.0) * st.u[vertex] + st.v;
    let gamma = if curv > T::zero() { (-slope / curv).min(gmax) } else { gmax };
    if !(gamma > T::zero()) || !gamma.is_finite() {
        return;
    }
    let g = sign * gamma;
    for i in 0..n {
        let e = if i == vertex { T::one() } else { T::zero() };
        st.w[i] = (st.w[i] + g * (e - st.w[i])).max(T::zero());
        st.u[i] = st.u[i] + g * (row[i] - st.u[i]);
    }
    renormalize(&mut st.w);
    st.v = quadratic_form(&st.w, &st.u);
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernels::Kernel;

    fn matrix(rows: &[&[f64]]) -> EnergyMatrix<f64> {
        let n = rows.len();
        EnergyMatrix::from_entries(n, rows.iter().flat_map(|r| r.iter().copied()).collect(), Kernel::log()).unwrap()
    }

    #[test]
    fn two_symmetric_nodes_split_evenly() {
        let a = matrix(&[&[2.0, 0.5], &[0.5, 2.0]]);
        let r = solve_equilibrium(&a, 1e-12, 100).unwrap();
        assert!(r.converged);
        assert!((r.weights[0] - 0.5).abs() < 1e-15);
    }

    #[test]
    fn dominated_node_gets_zero_weight() {
        // Node 2 has a huge self-interaction and should drop out.
        let a = matrix(&[&[1.0, 0.2, 0.9], &[0.2, 1.0, 0.9], &[0.9, 0.9, 50.0]]);
        let r = solve_equilibrium(&a, 1e-12, 100).unwrap();
        assert!(r.converged);
        assert_eq!(r.weights[2], 0.0);
        assert!((r.weights[0] - 0.5).abs() < 1e-14);
        assert!(r.satisfies_frostman());
        assert!(r.energy_is_monotone());
    }

    #[test]
    fn single_node_is_rejected() {
        let a = matrix(&[&[1.0]]);
        assert!(solve_equilibrium(&a, 1e-9, 10).is_err());
    }

    #[test]
    fn nan_is_rejected() {
        let a = EnergyMatrix::from_entries(2, vec![1.0, 0.0, 0.0, 1.0], Kernel::log()).unwrap();
        let mut e = a.entries().to_vec();
        e[0] = f64::NAN;
        assert!(EnergyMatrix::from_entries(2, e, Kernel::log()).is_err());
    }

    #[test]
    fn away_step_path_agrees_with_corrective_path() {
        let a = matrix(&[&[3.0, 1.0, 0.5, 0.2], &[1.0, 2.5, 0.7, 0.4], &[0.5, 0.7, 2.0, 0.9], &[0.2, 0.4, 0.9, 4.0]]);
        let exact = solve(&a, 1e-13, 100, true).unwrap();
        let afw = solve(&a, 1e-10, 100_000, false).unwrap();
        assert!(exact.converged && afw.converged);
        assert!(afw.energy_is_monotone());
        for (x, y) in exact.weights.iter().zip(&afw.weights) {
            assert!((x - y).abs() < 1e-4, "{x} vs {y}");
        }
        assert!((exact.energy - afw.energy).abs() < 1e-9);
    }
}
