//! Logarithmic and Riesz interaction kernels, their radial derivatives, and
//! grid checks of the kernel growth conditions.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KernelKind {
    Log,
    Riesz,
}

/// `Φ(r) = log(1/r)` or `Φ(r) = r^{−p}`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Kernel<T> {
    kind: KernelKind,
    p: T,
}

/// Serialized kernel: `{"kind": "log"}` or `{"kind": "riesz", "p": 1.0}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct KernelSpec {
    pub kind: KernelKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<f64>,
}

impl KernelSpec {
    pub fn build<T: Real>(&self) -> Result<Kernel<T>> {
        match (self.kind, self.p) {
            (KernelKind::Log, _) => Ok(Kernel::log()),
            (KernelKind::Riesz, Some(p)) => Kernel::riesz(T::lit(p)),
            (KernelKind::Riesz, None) => Err(Error::InvalidKernel("riesz kernel needs p".into())),
        }
    }
}

impl<T: Real> Kernel<T> {
    pub fn log() -> Self {
        Self { kind: KernelKind::Log, p: T::zero() }
    }

    pub fn riesz(p: T) -> Result<Self> {
        if !(p > T::zero()) || !p.is_finite() {
            return Err(Error::InvalidKernel(format!("riesz exponent must be positive, got {p}")));
        }
        Ok(Self { kind: KernelKind::Riesz, p })
    }

    pub fn kind(&self) -> KernelKind {
        self.kind
    }

    /// 0 for the logarithmic kernel.
    pub fn p(&self) -> T {
        self.p
    }

    /// `β_p`: 1 for log, `p` for Riesz.
    pub fn beta(&self) -> T {
        match self.kind {
            KernelKind::Log => T::one(),
            KernelKind::Riesz => self.p,
        }
    }

    pub fn spec(&self) -> KernelSpec {
        KernelSpec {
            kind: self.kind,
            p: (self.kind == KernelKind::Riesz).then(|| self.p.to_f64_lossy()),
        }
    }

    /// Pairing check against the ambient dimension: Riesz needs `p < n`.
    pub fn check_dimension(&self, n: usize) -> Result<()> {
        if self.kind == KernelKind::Riesz && self.p >= T::from_usize_lossy(n) {
            return Err(Error::InvalidKernel(format!("riesz exponent {} must be below dimension {n}", self.p)));
        }
        Ok(())
    }

    /// `Φ`, `Φ′` or `Φ″` at `r > 0`.
    pub fn eval(&self, r: T, order: u8) -> Result<T> {
        if !(r > T::zero()) {
            return Err(Error::InfiniteKernel(r.to_f64_lossy()));
        }
        match order {
            0 => Ok(self.value(r)),
            1 => Ok(self.d1(r)),
            2 => Ok(self.d2(r)),
            _ => Err(Error::InvalidArgument(format!("derivative order {order} not supported"))),
        }
    }

    /// `Φ(r)` without the positivity check; callers guarantee `r > 0`.
    #[inline]
    pub fn value(&self, r: T) -> T {
        match self.kind {
            KernelKind::Log => -r.ln(),
            KernelKind::Riesz => r.powf(-self.p),
        }
    }

    #[inline]
    pub fn d1(&self, r: T) -> T {
        match self.kind {
            KernelKind::Log => -r.recip(),
            KernelKind::Riesz => -self.p * r.powf(-self.p - T::one()),
        }
    }

    #[inline]
    pub fn d2(&self, r: T) -> T {
        match self.kind {
            KernelKind::Log => (r * r).recip(),
            KernelKind::Riesz => self.p * (self.p + T::one()) * r.powf(-self.p - T::lit(2.0)),
        }
    }

    /// Inverse of `Φ` on `(0, ∞)`.
    pub fn inverse_value(&self, v: T) -> T {
        match self.kind {
            KernelKind::Log => (-v).exp(),
            KernelKind::Riesz => v.powf(-self.p.recip()),
        }
    }

    /// `Φ″(r) − Φ′(r)/r`; positive for both kernel families.
    pub fn convexity_margin(&self, r: T) -> T {
        self.d2(r) - self.d1(r) / r
    }

    /// Constant in the growth conditions: 4 for log, `2^{p+2}(1+p+p²)` for Riesz.
    pub fn growth_constant(&self) -> T {
        match self.kind {
            KernelKind::Log => T::lit(4.0),
            KernelKind::Riesz => {
                let p = self.p;
                T::lit(2.0).powf(p + T::lit(2.0)) * (T::one() + p + p * p)
            }
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GrowthReport {
    pub max_ratio_0: f64,
    pub max_ratio_1: f64,
    pub max_ratio_2: f64,
    pub constant_used: f64,
    pub pass: bool,
}

/// Checks, over every `(r, a)` in the grids,
/// `|Φ(ar)| ≤ C(1+|Φ(r)|)`, `|Φ′(ar)| ≤ C r⁻¹(1+|Φ(r)|)`,
/// `|Φ″(ar)| ≤ C r⁻²(1+|Φ(r)|)`, reporting the largest left/right ratio.
pub fn verify_growth_conditions<T: Real>(kernel: &Kernel<T>, r_grid: &[T], a_grid: &[T]) -> Result<GrowthReport> {
    if let Some(a) = a_grid.iter().find(|&&a| a < T::lit(0.5) || a > T::lit(2.0)) {
        return Err(Error::InvalidArgument(format!("scale factor {a} outside [1/2, 2]")));
    }
    if let Some(r) = r_grid.iter().find(|&&r| !(r > T::zero())) {
        return Err(Error::InvalidArgument(format!("radius {r} not positive")));
    }
    let c = kernel.growth_constant();
    let (mut m0, mut m1, mut m2) = (T::zero(), T::zero(), T::zero());
    for &r in r_grid {
        let base = c * (T::one() + kernel.value(r).abs());
        for &a in a_grid {
            let ar = a * r;
            m0 = m0.max(kernel.value(ar).abs() / base);
            m1 = m1.max(kernel.d1(ar).abs() * r / base);
            m2 = m2.max(kernel.d2(ar).abs() * r * r / base);
        }
    }
    let one = T::one();
    Ok(GrowthReport {
        max_ratio_0: m0.to_f64_lossy(),
        max_ratio_1: m1.to_f64_lossy(),
        max_ratio_2: m2.to_f64_lossy(),
        constant_used: c.to_f64_lossy(),
        pass: m0 <= one && m1 <= one && m2 <= one,
    })
}

/// `count` points log-spaced between `lo` and `hi` inclusive.
pub fn logspace<T: Real>(lo: T, hi: T, count: usize) -> Vec<T> {
    let (a, b) = (lo.ln(), hi.ln());
    let last = T::from_usize_lossy(count.saturating_sub(1).max(1));
    (0..count).map(|i| (a + (b - a) * T::from_usize_lossy(i) / last).exp()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eval_examples() {
        let log = Kernel::<f64>::log();
        assert_eq!(log.eval(1.0, 0).unwrap(), 0.0);
        let r1 = Kernel::riesz(1.0_f64).unwrap();
        assert_eq!(r1.eval(2.0, 0).unwrap(), 0.5);
        assert_eq!(r1.eval(1.0, 2).unwrap(), 2.0);
        assert_eq!(r1.eval(1.0, 2).unwrap() - r1.eval(1.0, 1).unwrap() / 1.0, 3.0);
    }

    #[test]
    fn zero_radius_is_signalled() {
        let k = Kernel::<f64>::log();
        assert!(matches!(k.eval(0.0, 0), Err(Error::InfiniteKernel(_))));
        assert!(k.eval(-1.0, 1).is_err());
        assert!(k.eval(1.0, 3).is_err());
    }

    #[test]
    fn growth_conditions_with_stated_constants() {
        let r = logspace(1e-6_f64, 1e6, 1000);
        let a = [0.5, 1.0, 2.0];
        let rep = verify_growth_conditions(&Kernel::log(), &r, &a).unwrap();
        assert!(rep.pass && rep.constant_used == 4.0);
        let rep = verify_growth_conditions(&Kernel::riesz(1.0).unwrap(), &r, &a).unwrap();
        assert!(rep.pass && rep.constant_used == 24.0);
        let rep = verify_growth_conditions(&Kernel::log(), &r, &[1.0]).unwrap();
        assert!(rep.max_ratio_0 <= 1.0);
        assert!(verify_growth_conditions(&Kernel::log(), &r, &[3.0]).is_err());
    }

    #[test]
    fn derivatives_match_central_differences() {
        for k in [Kernel::log(), Kernel::riesz(0.5).unwrap(), Kernel::riesz(1.0).unwrap(), Kernel::riesz(2.5).unwrap()] {
            for r in [0.1_f64, 1.0, 10.0] {
                let h = 1e-5 * r;
                let fd1 = (k.value(r + h) - k.value(r - h)) / (2.0 * h);
                let fd2 = (k.d1(r + h) - k.d1(r - h)) / (2.0 * h);
                assert!((fd1 - k.d1(r)).abs() <= 1e-6 * k.d1(r).abs());
                assert!((fd2 - k.d2(r)).abs() <= 1e-6 * k.d2(r).abs());
            }
        }
    }

    #[test]
    fn convexity_margin_is_positive() {
        for k in [Kernel::log(), Kernel::riesz(0.25).unwrap(), Kernel::riesz(2.0).unwrap()] {
            for r in logspace(1e-4_f64, 1e4, 200) {
                assert!(k.convexity_margin(r) > 0.0);
            }
        }
    }

    #[test]
    fn inverse_value_inverts() {
        for k in [Kernel::log(), Kernel::riesz(1.3_f64).unwrap()] {
            let r = 0.37;
            assert!((k.inverse_value(k.value(r)) - r).abs() < 1e-15);
        }
    }

    #[test]
    fn riesz_dimension_pairing() {
        let k = Kernel::riesz(2.0_f64).unwrap();
        assert!(k.check_dimension(3).is_ok());
        assert!(k.check_dimension(2).is_err());
    }
}
