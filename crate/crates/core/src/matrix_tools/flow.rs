//! Diagonal one-parameter stretch families `S_t` with `S_0 = I` and
//! `S_1 = diag(σ)`.
//!
//! Each diagonal entry `d(t)` solves `(p+1) d′² = d d″` (with `p = 0` for the
//! logarithmic family), so the pairwise concavity condition holds with
//! equality along the flow.

use serde::{Deserialize, Serialize};

use super::Mat;
use crate::error::{Error, Result};
use crate::scalar::Real;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum FlowKind<T> {
    /// Entries `σ_k^t`; requires `Π σ_k = 1`.
    Log,
    /// Entries `(1 − t + t σ_k^{−p})^{−1/p}`; requires `(1/n) Σ σ_k^{−p} = 1`.
    Riesz { p: T },
}

impl<T: Real> FlowKind<T> {
    /// Exponent used in the entry ODE: 0 for log, p for Riesz.
    pub fn ode_exponent(&self) -> T {
        match *self {
            FlowKind::Log => T::zero(),
            FlowKind::Riesz { p } => p,
        }
    }
}

/// Serialized form: `{kind, p?, sigmas}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FlowSpec {
    pub kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<f64>,
    pub sigmas: Vec<f64>,
}

impl FlowSpec {
    pub fn build<T: Real>(&self) -> Result<Flow<T>> {
        let kind = match (self.kind.as_str(), self.p) {
            ("log", _) => FlowKind::Log,
            ("riesz", Some(p)) => FlowKind::Riesz { p: T::lit(p) },
            ("riesz", None) => return Err(Error::InvalidFlow("riesz flow needs p".into())),
            (k, _) => return Err(Error::InvalidFlow(format!("unknown flow kind {k:?}"))),
        };
        let sigmas: Vec<T> = self.sigmas.iter().map(|&s| T::lit(s)).collect();
        make_flow(&sigmas, kind)
    }
}

#[derive(Clone, Debug)]
pub struct Flow<T> {
    kind: FlowKind<T>,
    sigmas: Vec<T>,
    domain: (T, T),
}

/// Builds the flow after checking the normalization constraint on `sigmas`
/// (tolerance 1e-10).
pub fn make_flow<T: Real>(sigmas: &[T], kind: FlowKind<T>) -> Result<Flow<T>> {
    let n = sigmas.len();
    if n == 0 {
        return Err(Error::InvalidFlow("empty sigma list".into()));
    }
    if sigmas.iter().any(|&s| !(s > T::zero()) || !s.is_finite()) {
        return Err(Error::InvalidFlow("singular values must be positive and finite".into()));
    }
    let tol = T::tol(1e-10);
    let domain = match kind {
        FlowKind::Log => {
            let log_prod: T = sigmas.iter().map(|s| s.ln()).sum();
            if log_prod.abs() > tol {
                return Err(Error::InvalidFlow(format!(
                    "log flow needs Π σ = 1, got exp({})",
                    log_prod
                )));
            }
            (T::neg_infinity(), T::infinity())
        }
        FlowKind::Riesz { p } => {
            if !(p > T::zero() && p < T::from_usize_lossy(n)) {
                return Err(Error::InvalidFlow(format!("riesz exponent must satisfy 0 < p < {n}")));
            }
            let mean = sigmas.iter().map(|&s| s.powf(-p)).sum::<T>() / T::from_usize_lossy(n);
            if (mean - T::one()).abs() > tol {
                return Err(Error::InvalidFlow(format!("riesz flow needs (1/n) Σ σ^-p = 1, got {mean}")));
            }
            riesz_domain(sigmas, p)
        }
    };
    Ok(Flow { kind, sigmas: sigmas.to_vec(), domain })
}

/// Largest open interval where every `1 − t + t σ_k^{−p}` is positive,
/// shrunk by 1e-9 at each finite end.
fn riesz_domain<T: Real>(sigmas: &[T], p: T) -> (T, T) {
    let mut lo = T::neg_infinity();
    let mut hi = T::infinity();
    for &s in sigmas {
        let b = s.powf(-p) - T::one();
        if b > T::zero() {
            lo = lo.max(-b.recip());
        } else if b < T::zero() {
            hi = hi.min(-b.recip());
        }
    }
    let shrink = T::lit(1e-9);
    (if lo.is_finite() { lo + shrink } else { lo }, if hi.is_finite() { hi - shrink } else { hi })
}

impl<T: Real> Flow<T> {
    /// Rescales arbitrary positive values onto the constraint surface of
    /// `kind`: unit geometric mean (log) or unit `(1/n) Σ σ^{−p}` (Riesz).
    pub fn normalize_sigmas(raw: &[T], kind: FlowKind<T>) -> Vec<T> {
        let n = T::from_usize_lossy(raw.len());
        let c = match kind {
            FlowKind::Log => (-(raw.iter().map(|s| s.ln()).sum::<T>() / n)).exp(),
            FlowKind::Riesz { p } => (raw.iter().map(|&s| s.powf(-p)).sum::<T>() / n).powf(p.recip()),
        };
        raw.iter().map(|&s| s * c).collect()
    }

    pub fn kind(&self) -> FlowKind<T> {
        self.kind
    }

    pub fn sigmas(&self) -> &[T] {
        &self.sigmas
    }

    pub fn dim(&self) -> usize {
        self.sigmas.len()
    }

    pub fn domain(&self) -> (T, T) {
        self.domain
    }

    pub fn contains(&self, t: T) -> bool {
        t > self.domain.0 && t < self.domain.1
    }

    pub fn spec(&self) -> FlowSpec {
        let (kind, p) = match self.kind {
            FlowKind::Log => ("log", None),
            FlowKind::Riesz { p } => ("riesz", Some(p.to_f64_lossy())),
        };
        FlowSpec { kind: kind.into(), p, sigmas: self.sigmas.iter().map(|s| s.to_f64_lossy()).collect() }
    }

    fn check(&self, t: T) -> Result<()> {
        if self.contains(t) {
            Ok(())
        } else {
            Err(Error::OutsideDomain {
                t: t.to_f64_lossy(),
                lo: self.domain.0.to_f64_lossy(),
                hi: self.domain.1.to_f64_lossy(),
            })
        }
    }

    /// `(d, d′, d″)` for diagonal entry `k` at time `t`.
    pub fn entry(&self, k: usize, t: T) -> Result<(T, T, T)> {
        self.check(t)?;
        Ok(self.entry_unchecked(k, t))
    }

    fn entry_unchecked(&self, k: usize, t: T) -> (T, T, T) {
        let s = self.sigmas[k];
        match self.kind {
            FlowKind::Log => {
                let l = s.ln();
                let d = s.powf(t);
                (d, d * l, d * l * l)
            }
            FlowKind::Riesz { p } => {
                let b = s.powf(-p) - T::one();
                let g = T::one() + t * b;
                let ip = p.recip();
                let d = g.powf(-ip);
                let d1 = -ip * b * d / g;
                let d2 = ip * (ip + T::one()) * b * b * d / (g * g);
                (d, d1, d2)
            }
        }
    }

    /// Diagonals of `S_t`, `Ṡ_t`, `S̈_t`.
    pub fn diagonals(&self, t: T) -> Result<(Vec<T>, Vec<T>, Vec<T>)> {
        self.check(t)?;
        let mut d0 = Vec::with_capacity(self.dim());
        let mut d1 = Vec::with_capacity(self.dim());
        let mut d2 = Vec::with_capacity(self.dim());
        for k in 0..self.dim() {
            let (a, b, c) = self.entry_unchecked(k, t);
            d0.push(a);
            d1.push(b);
            d2.push(c);
        }
        Ok((d0, d1, d2))
    }

    pub fn s(&self, t: T) -> Result<Mat<T>> {
        Ok(Mat::from_diag(&self.diagonals(t)?.0))
    }

    pub fn s_dot(&self, t: T) -> Result<Mat<T>> {
        Ok(Mat::from_diag(&self.diagonals(t)?.1))
    }

    pub fn s_ddot(&self, t: T) -> Result<Mat<T>> {
        Ok(Mat::from_diag(&self.diagonals(t)?.2))
    }

    /// `(p+1) d′² − d d″` for entry `k` at `t`, relative to `d d″` (or the
    /// absolute value when that vanishes).
    pub fn ode_residual(&self, k: usize, t: T) -> Result<T> {
        let (d, d1, d2) = self.entry(k, t)?;
        let lhs = (self.kind.ode_exponent() + T::one()) * d1 * d1;
        let rhs = d * d2;
        let scale = lhs.abs().max(rhs.abs());
        Ok(if scale > T::zero() { (lhs - rhs).abs() / scale } else { T::zero() })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn log_flow_example() {
        let f = make_flow(&[2.0_f64, 0.5], FlowKind::Log).unwrap();
        assert!(f.s(0.0).unwrap().max_abs_diff(&Mat::identity(2)) == 0.0);
        assert!(f.s(1.0).unwrap().max_abs_diff(&Mat::from_diag(&[2.0, 0.5])) < 1e-15);
        let sd = f.s_dot(0.0).unwrap();
        let ln2 = 2.0_f64.ln();
        assert!(sd.max_abs_diff(&Mat::from_diag(&[ln2, -ln2])) < 1e-15);
        assert!(sd.trace().abs() < 1e-12);
    }

    #[test]
    fn riesz_flow_example() {
        let f = make_flow(&[2.0_f64, 2.0 / 3.0], FlowKind::Riesz { p: 1.0 }).unwrap();
        assert!(f.s(1.0).unwrap().max_abs_diff(&Mat::from_diag(&[2.0, 2.0 / 3.0])) < 1e-15);
        assert!(f.s_dot(0.0).unwrap().max_abs_diff(&Mat::from_diag(&[0.5, -0.5])) < 1e-15);
        let (lo, hi) = f.domain();
        assert!(lo < 0.0 && hi > 1.0);
        // 1 − t + t/2 > 0 for t < 2 and 1 − t + 3t/2 > 0 for t > −2.
        assert!((hi - 2.0).abs() < 1e-8 && (lo + 2.0).abs() < 1e-8);
        assert!(matches!(f.s(2.5), Err(Error::OutsideDomain { .. })));
    }

    #[test]
    fn unit_sigmas_give_identity() {
        for kind in [FlowKind::Log, FlowKind::Riesz { p: 1.5 }] {
            let f = make_flow(&[1.0_f64; 3], kind).unwrap();
            for t in [-3.0, 0.2, 0.9, 4.0] {
                assert_eq!(f.s(t).unwrap(), Mat::identity(3));
            }
        }
    }

    #[test]
    fn constraint_violations_are_rejected() {
        assert!(make_flow(&[2.0_f64, 0.6], FlowKind::Log).is_err());
        assert!(make_flow(&[2.0_f64, 1.0], FlowKind::Riesz { p: 1.0 }).is_err());
        assert!(make_flow(&[1.0_f64, 1.0], FlowKind::Riesz { p: 2.0 }).is_err());
    }

    #[test]
    fn normalize_sigmas_lands_on_constraint() {
        let raw = [3.0_f64, 0.7, 1.9];
        let s = Flow::normalize_sigmas(&raw, FlowKind::Log);
        assert!(make_flow(&s, FlowKind::Log).is_ok());
        let s = Flow::normalize_sigmas(&raw, FlowKind::Riesz { p: 2.0 });
        assert!(make_flow(&s, FlowKind::Riesz { p: 2.0 }).is_ok());
    }

    #[test]
    fn spec_round_trip() {
        let f = make_flow(&[2.0_f64, 2.0 / 3.0], FlowKind::Riesz { p: 1.0 }).unwrap();
        let json = serde_json::to_string(&f.spec()).unwrap();
        let back: FlowSpec = serde_json::from_str(&json).unwrap();
        assert_eq!(back.build::<f64>().unwrap().sigmas(), f.sigmas());
    }
}
