//! Finite orthogonal groups: cyclic and dihedral groups in the plane and the
//! rotation groups of the platonic solids.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::{svd, Mat};
use crate::error::{Error, Result};
use crate::scalar::Real;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GroupName {
    Cyclic(usize),
    Dihedral(usize),
    Tetrahedral,
    Octahedral,
    Icosahedral,
}

impl GroupName {
    pub fn dim(&self) -> usize {
        match self {
            GroupName::Cyclic(_) | GroupName::Dihedral(_) => 2,
            _ => 3,
        }
    }
}

impl fmt::Display for GroupName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GroupName::Cyclic(n) => write!(f, "cyclic({n})"),
            GroupName::Dihedral(n) => write!(f, "dihedral({n})"),
            GroupName::Tetrahedral => f.write_str("tetrahedral"),
            GroupName::Octahedral => f.write_str("octahedral"),
            GroupName::Icosahedral => f.write_str("icosahedral"),
        }
    }
}

impl FromStr for GroupName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim().to_ascii_lowercase();
        let order = |prefix: &str| -> Option<usize> {
            s.strip_prefix(prefix)?.strip_prefix('(')?.strip_suffix(')')?.trim().parse().ok()
        };
        if let Some(n) = order("cyclic") {
            return Ok(GroupName::Cyclic(n));
        }
        if let Some(n) = order("dihedral") {
            return Ok(GroupName::Dihedral(n));
        }
        match s.as_str() {
            "tetrahedral" => Ok(GroupName::Tetrahedral),
            "octahedral" => Ok(GroupName::Octahedral),
            "icosahedral" => Ok(GroupName::Icosahedral),
            _ => Err(Error::InvalidGroup(format!("unknown group name {s:?}"))),
        }
    }
}

/// A finite set of orthogonal matrices closed under product and inverse.
#[derive(Clone, Debug)]
pub struct SymmetryGroup<T: Real> {
    name: String,
    dim: usize,
    elements: Vec<Mat<T>>,
}

const ORTHO_TOL: f64 = 1e-12;
const CLOSURE_TOL: f64 = 1e-10;

impl<T: Real> SymmetryGroup<T> {
    /// Validates orthogonality (1e-12) and closure (1e-10).
    pub fn from_elements(name: impl Into<String>, elements: Vec<Mat<T>>) -> Result<Self> {
        let dim = elements.first().map(Mat::rows).ok_or_else(|| Error::InvalidGroup("empty group".into()))?;
        let g = Self { name: name.into(), dim, elements };
        g.validate()?;
        Ok(g)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn elements(&self) -> &[Mat<T>] {
        &self.elements
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    /// Index of the element within `tol` (max-entry) of `m`.
    pub fn find(&self, m: &Mat<T>, tol: T) -> Option<usize> {
        self.elements.iter().position(|e| e.max_abs_diff(m) <= tol)
    }

    pub fn validate(&self) -> Result<()> {
        let otol = T::tol(ORTHO_TOL);
        let ctol = T::tol(CLOSURE_TOL);
        for (i, u) in self.elements.iter().enumerate() {
            if u.rows() != self.dim || !u.is_square() {
                return Err(Error::InvalidGroup(format!("element {i} has wrong shape")));
            }
            let r = u.orthogonality_residual();
            if r > otol {
                return Err(Error::InvalidGroup(format!("element {i} not orthogonal (residual {r})")));
            }
        }
        let res = self.closure_residual();
        if res > ctol {
            return Err(Error::InvalidGroup(format!("not closed under products (residual {res})")));
        }
        Ok(())
    }

    /// Largest distance from a product or inverse to its nearest member.
    pub fn closure_residual(&self) -> T {
        let nearest = |m: &Mat<T>| {
            self.elements.iter().map(|e| e.max_abs_diff(m)).fold(T::infinity(), T::min)
        };
        let mut worst = T::zero();
        for a in &self.elements {
            worst = worst.max(nearest(&a.transpose()));
            for b in &self.elements {
                worst = worst.max(nearest(&(a * b)));
            }
        }
        worst
    }

    /// The group `{M U Mᵀ}` for orthogonal `M`.
    pub fn conjugate(&self, m: &Mat<T>) -> Self {
        let mt = m.transpose();
        Self {
            name: format!("{}~conj", self.name),
            dim: self.dim,
            elements: self.elements.iter().map(|u| &(m * u) * &mt).collect(),
        }
    }

    pub fn to_f64_matrices(&self) -> Vec<Vec<Vec<f64>>> {
        self.elements.iter().map(Mat::to_f64_rows).collect()
    }
}

/// Builds one of the named groups in its standard orientation.
///
/// Dihedral reflection axes sit at angles `πj/N`; the platonic rotation
/// groups act on solids with vertices at `(±1,±1,±1)`-type coordinates
/// (cube, tetrahedron), `±e_k` (octahedron) and cyclic permutations of
/// `(0, ±1, ±φ)` (icosahedron).
pub fn build_group<T: Real>(name: GroupName, dim: usize) -> Result<SymmetryGroup<T>> {
    if name.dim() != dim {
        return Err(Error::InvalidGroup(format!("{name} lives in dimension {}, not {dim}", name.dim())));
    }
    let elements = match name {
        GroupName::Cyclic(0) | GroupName::Dihedral(0) => {
            return Err(Error::InvalidGroup("group order must be positive".into()))
        }
        GroupName::Cyclic(n) => rotations(n),
        GroupName::Dihedral(n) => {
            let mut e = rotations(n);
            for j in 0..n {
                let a = T::lit(2.0) * T::PI() * T::from_usize_lossy(j) / T::from_usize_lossy(n);
                let (s, c) = a.sin_cos();
                e.push(Mat::from_rows(&[[c, s], [s, -c]]));
            }
            e
        }
        GroupName::Tetrahedral => closure(&[cyclic_perm(), Mat::from_diag(&[T::one(), -T::one(), -T::one()])])?,
        GroupName::Octahedral => {
            let (o, z) = (T::one(), T::zero());
            closure(&[cyclic_perm(), Mat::from_rows(&[[z, -o, z], [o, z, z], [z, z, o]])])?
        }
        GroupName::Icosahedral => {
            let phi = (T::one() + T::lit(5.0).sqrt()) * T::lit(0.5);
            let o = T::one();
            // 5-fold rotation about the vertex axis (0, 1, φ), by Rodrigues.
            let len = (o + phi * phi).sqrt();
            let k = [T::zero(), o / len, phi / len];
            let th = T::lit(2.0) * T::PI() / T::lit(5.0);
            let (c, s) = (th.cos(), th.sin());
            let five = Mat::from_fn(3, 3, |i, j| {
                let cross = match (i, j) {
                    (0, 1) => -k[2],
                    (0, 2) => k[1],
                    (1, 0) => k[2],
                    (1, 2) => -k[0],
                    (2, 0) => -k[1],
                    (2, 1) => k[0],
                    _ => T::zero(),
                };
                let id = if i == j { c } else { T::zero() };
                id + s * cross + (o - c) * k[i] * k[j]
            });
            closure(&[cyclic_perm(), Mat::from_diag(&[o, -o, -o]), five])?
        }
    };
    SymmetryGroup::from_elements(name.to_string(), elements)
}

fn rotations<T: Real>(n: usize) -> Vec<Mat<T>> {
    (0..n)
        .map(|j| Mat::rotation2(T::lit(2.0) * T::PI() * T::from_usize_lossy(j) / T::from_usize_lossy(n)))
        .collect()
}

fn cyclic_perm<T: Real>() -> Mat<T> {
    let (o, z) = (T::one(), T::zero());
    Mat::from_rows(&[[z, z, o], [o, z, z], [z, o, z]])
}

/// Breadth-first closure of a generating set.
fn closure<T: Real>(generators: &[Mat<T>]) -> Result<Vec<Mat<T>>> {
    let n = generators[0].rows();
    let tol = T::tol(1e-9);
    let mut elements = vec![Mat::identity(n)];
    let mut head = 0;
    while head < elements.len() {
        let e = elements[head].clone();
        head += 1;
        for g in generators {
            let prod = g * &e;
            if !elements.iter().any(|x| x.max_abs_diff(&prod) <= tol) {
                elements.push(prod);
                if elements.len() > 1000 {
                    return Err(Error::InvalidGroup("generators do not produce a finite group".into()));
                }
            }
        }
    }
    Ok(elements)
}

/// `(1/|G|) Σ_U Uᵀ S U`.
pub fn average_conjugation<T: Real>(group: &SymmetryGroup<T>, s: &Mat<T>) -> Result<Mat<T>> {
    if s.rows() != group.dim() || !s.is_square() {
        return Err(Error::Dimension(format!("expected {0}×{0} matrix", group.dim())));
    }
    let asym = s.symmetry_residual();
    if asym > T::tol(1e-12) * s.max_abs().max(T::one()) {
        return Err(Error::NotSymmetric(asym.to_f64_lossy()));
    }
    let mut acc = Mat::zeros(s.rows(), s.cols());
    for u in group.elements() {
        acc = &acc + &(&(&u.transpose() * s) * u);
    }
    Ok(acc.scale(T::from_usize_lossy(group.order()).recip()))
}

#[derive(Clone, Debug)]
pub struct IrreducibilityReport {
    pub irreducible: bool,
    pub orbit_span_ok: bool,
    pub averaging_ok: bool,
    /// Smallest relative singular value of any probed orbit matrix.
    pub min_relative_singular_value: f64,
    /// Largest deviation of an averaged basis matrix from `(tr S/n) Id`.
    pub averaging_residual: f64,
    /// Set when a rank decision fell within a decade of the cutoff.
    pub near_cutoff: bool,
}

const RANK_CUTOFF: f64 = 1e-10;
const PROBE_SEED: u64 = 0x5EED_1DEA;

pub fn irreducibility_report<T: Real>(group: &SymmetryGroup<T>) -> IrreducibilityReport {
    let n = group.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(PROBE_SEED);
    let mut probes: Vec<Vec<T>> = (0..n)
        .map(|k| (0..n).map(|i| if i == k { T::one() } else { T::zero() }).collect())
        .collect();
    for _ in 0..10 {
        let v: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
        let nrm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        probes.push(v.iter().map(|x| T::lit(x / nrm)).collect());
    }
    let mut min_rel = f64::INFINITY;
    for x in &probes {
        // Gram matrix of the orbit: its singular values are the squares of
        // those of the orbit matrix.
        let mut gram = Mat::zeros(n, n);
        for u in group.elements() {
            let y = u.mul_vec(x);
            for i in 0..n {
                for j in 0..n {
                    gram[(i, j)] = gram[(i, j)] + y[i] * y[j];
                }
            }
        }
        let s: Vec<T> = svd(&gram).sigma;
        let rel = if s[0] > T::zero() { (s[n - 1] / s[0]).sqrt().to_f64_lossy() } else { 0.0 };
        min_rel = min_rel.min(rel);
    }
    let orbit_span_ok = min_rel > RANK_CUTOFF;

    let mut avg_res = 0.0_f64;
    for i in 0..n {
        for j in i..n {
            let mut s = Mat::zeros(n, n);
            s[(i, j)] = T::one();
            s[(j, i)] = T::one();
            let avg = average_conjugation(group, &s).expect("basis matrix is symmetric");
            let target = Mat::identity(n).scale(s.trace() / T::from_usize_lossy(n));
            avg_res = avg_res.max(avg.max_abs_diff(&target).to_f64_lossy());
        }
    }
    let averaging_ok = avg_res <= T::tol(RANK_CUTOFF).to_f64_lossy();
    IrreducibilityReport {
        irreducible: orbit_span_ok && averaging_ok,
        orbit_span_ok,
        averaging_ok,
        min_relative_singular_value: min_rel,
        averaging_residual: avg_res,
        near_cutoff: min_rel > RANK_CUTOFF && min_rel < 10.0 * RANK_CUTOFF,
    }
}

/// Orbit-span rank test on the standard basis and 10 seeded random unit
/// vectors, combined with the averaging test on a basis of symmetric
/// matrices.
pub fn check_irreducible<T: Real>(group: &SymmetryGroup<T>) -> bool {
    irreducibility_report(group).irreducible
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(name: GroupName) -> SymmetryGroup<f64> {
        build_group(name, name.dim()).unwrap()
    }

    #[test]
    fn element_counts() {
        assert_eq!(g(GroupName::Cyclic(1)).order(), 1);
        assert_eq!(g(GroupName::Cyclic(7)).order(), 7);
        assert_eq!(g(GroupName::Dihedral(5)).order(), 10);
        assert_eq!(g(GroupName::Tetrahedral).order(), 12);
        assert_eq!(g(GroupName::Octahedral).order(), 24);
        assert_eq!(g(GroupName::Icosahedral).order(), 60);
    }

    #[test]
    fn cyclic_three_angles() {
        let grp = g(GroupName::Cyclic(3));
        for (j, u) in grp.elements().iter().enumerate() {
            let th = 2.0 * std::f64::consts::PI * j as f64 / 3.0;
            assert!(u.max_abs_diff(&Mat::rotation2(th)) < 1e-15);
        }
    }

    #[test]
    fn platonic_groups_are_rotations() {
        for name in [GroupName::Tetrahedral, GroupName::Octahedral, GroupName::Icosahedral] {
            let grp = g(name);
            assert!(grp.closure_residual() <= 1e-10);
            for u in grp.elements() {
                assert!((u.det() - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn octahedral_is_signed_permutations_with_det_one() {
        // Independent enumeration of the 48 signed permutation matrices.
        let perms = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
        let mut expected = Vec::new();
        for p in perms {
            for signs in 0..8 {
                let m = Mat::from_fn(3, 3, |i, j| {
                    if p[i] == j {
                        if signs >> i & 1 == 1 { -1.0 } else { 1.0 }
                    } else {
                        0.0
                    }
                });
                if m.det() > 0.0 {
                    expected.push(m);
                }
            }
        }
        let grp = g(GroupName::Octahedral);
        assert_eq!(expected.len(), 24);
        for m in &expected {
            assert!(grp.find(m, 1e-14).is_some());
        }
    }

    #[test]
    fn averaging_examples() {
        let s = Mat::from_diag(&[-1.0, 1.0]);
        for n in 3..12 {
            let avg = average_conjugation(&g(GroupName::Cyclic(n)), &s).unwrap();
            assert!(avg.max_abs() <= 1e-14, "N = {n}: {avg:?}");
        }
        let avg = average_conjugation(&g(GroupName::Cyclic(2)), &s).unwrap();
        assert!(avg.max_abs_diff(&s) < 1e-15);

        let avg = average_conjugation(&g(GroupName::Octahedral), &Mat::from_diag(&[3.0, 0.0, 0.0])).unwrap();
        assert!(avg.max_abs_diff(&Mat::identity(3)) < 1e-14);
    }

    #[test]
    fn averaging_rejects_nonsymmetric() {
        let s = Mat::from_rows(&[[0.0, 1.0], [0.0, 0.0]]);
        assert!(matches!(average_conjugation(&g(GroupName::Cyclic(3)), &s), Err(Error::NotSymmetric(_))));
    }

    #[test]
    fn irreducibility_examples() {
        assert!(check_irreducible(&g(GroupName::Cyclic(3))));
        assert!(!check_irreducible(&g(GroupName::Cyclic(2))));
        assert!(!check_irreducible(&g(GroupName::Cyclic(1))));
        assert!(!check_irreducible(&g(GroupName::Dihedral(2))));
        assert!(check_irreducible(&g(GroupName::Dihedral(4))));
        assert!(check_irreducible(&g(GroupName::Tetrahedral)));
        assert!(check_irreducible(&g(GroupName::Octahedral)));
        assert!(check_irreducible(&g(GroupName::Icosahedral)));
    }

    #[test]
    fn name_parsing_round_trips() {
        for name in [GroupName::Cyclic(5), GroupName::Dihedral(12), GroupName::Icosahedral] {
            assert_eq!(name.to_string().parse::<GroupName>().unwrap(), name);
        }
        assert!("heptagonal".parse::<GroupName>().is_err());
        assert!(build_group::<f64>(GroupName::Octahedral, 2).is_err());
    }

    #[test]
    fn non_closed_set_is_rejected() {
        let e = vec![Mat::identity(2), Mat::rotation2(1.0_f64)];
        assert!(SymmetryGroup::from_elements("bad", e).is_err());
    }
}
