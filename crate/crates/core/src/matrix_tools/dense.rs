//! Small dense row-major matrices with LU, modified Gram-Schmidt QR,
//! one-sided Jacobi SVD, and a Cholesky routine for the larger energy
//! systems.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Sub};

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Dense row-major matrix.
#[derive(Clone, PartialEq)]
pub struct Mat<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Real> Mat<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![T::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = T::one();
        }
        m
    }

    pub fn from_diag(d: &[T]) -> Self {
        let mut m = Self::zeros(d.len(), d.len());
        for (i, &x) in d.iter().enumerate() {
            m[(i, i)] = x;
        }
        m
    }

    /// Builds from row slices. Panics on ragged input.
    pub fn from_rows<R: AsRef<[T]>>(rows: &[R]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.as_ref().len());
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            assert_eq!(row.as_ref().len(), c, "ragged matrix rows");
            data.extend_from_slice(row.as_ref());
        }
        Self { rows: r, cols: c, data }
    }

    pub fn from_f64_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != c) {
            return Err(Error::Dimension("ragged matrix rows".into()));
        }
        let data = rows.iter().flatten().map(|&x| T::lit(x)).collect();
        Ok(Self { rows: rows.len(), cols: c, data })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    pub fn rotation2(theta: T) -> Self {
        let (s, c) = theta.sin_cos();
        Self::from_rows(&[[c, -s], [s, c]])
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn col(&self, j: usize) -> Vec<T> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn as_slice(&self) -> &[T] {
        &self.data
    }

    pub fn to_f64_rows(&self) -> Vec<Vec<f64>> {
        (0..self.rows).map(|i| self.row(i).iter().map(|x| x.to_f64_lossy()).collect()).collect()
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn scale(&self, s: T) -> Self {
        Self { rows: self.rows, cols: self.cols, data: self.data.iter().map(|&x| x * s).collect() }
    }

    pub fn trace(&self) -> T {
        (0..self.rows.min(self.cols)).fold(T::zero(), |acc, i| acc + self[(i, i)])
    }

    pub fn diag(&self) -> Vec<T> {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).collect()
    }

    pub fn frobenius_norm(&self) -> T {
        self.data.iter().fold(T::zero(), |s, &x| s + x * x).sqrt()
    }

    pub fn max_abs(&self) -> T {
        self.data.iter().fold(T::zero(), |s, &x| s.max(x.abs()))
    }

    pub fn max_abs_diff(&self, other: &Self) -> T {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data.iter().zip(&other.data).fold(T::zero(), |s, (&a, &b)| s.max((a - b).abs()))
    }

    pub fn mul_vec(&self, x: &[T]) -> Vec<T> {
        assert_eq!(self.cols, x.len());
        (0..self.rows).map(|i| crate::scalar::dot(self.row(i), x)).collect()
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|x| x.is_finite())
    }

    /// Largest entry of |AᵀA − I|.
    pub fn orthogonality_residual(&self) -> T {
        (&self.transpose() * self).max_abs_diff(&Self::identity(self.cols))
    }

    /// Frobenius norm of AᵀA − I.
    pub fn orthogonality_defect(&self) -> T {
        (&(&self.transpose() * self) - &Self::identity(self.cols)).frobenius_norm()
    }

    pub fn is_orthogonal(&self, tol: T) -> bool {
        self.is_square() && self.orthogonality_residual() <= tol
    }

    pub fn symmetry_residual(&self) -> T {
        self.max_abs_diff(&self.transpose())
    }

    /// LU factorization with partial pivoting; returns (packed LU, pivots, sign).
    fn lu(&self) -> (Self, Vec<usize>, T, bool) {
        assert!(self.is_square(), "LU of non-square matrix");
        let n = self.rows;
        let mut a = self.clone();
        let mut piv: Vec<usize> = (0..n).collect();
        let mut sign = T::one();
        let mut singular = false;
        for k in 0..n {
            let (p, big) = (k..n)
                .map(|i| (i, a[(i, k)].abs()))
                .fold((k, -T::one()), |acc, x| if x.1 > acc.1 { x } else { acc });
            if big == T::zero() {
                singular = true;
                continue;
            }
            if p != k {
                for j in 0..n {
                    a.data.swap(k * n + j, p * n + j);
                }
                piv.swap(k, p);
                sign = -sign;
            }
            let pivot = a[(k, k)];
            for i in k + 1..n {
                let f = a[(i, k)] / pivot;
                a[(i, k)] = f;
                for j in k + 1..n {
                    let v = a[(k, j)];
                    a[(i, j)] = a[(i, j)] - f * v;
                }
            }
        }
        (a, piv, sign, singular)
    }

    pub fn det(&self) -> T {
        let (lu, _, sign, singular) = self.lu();
        if singular {
            return T::zero();
        }
        (0..self.rows).fold(sign, |d, i| d * lu[(i, i)])
    }

    /// Inverse via LU. Rejects matrices with |det| ≤ 1e-14 · ‖A‖^n.
    pub fn inverse(&self) -> Result<Self> {
        let n = self.rows;
        let (lu, piv, sign, singular) = self.lu();
        let det = (0..n).fold(sign, |d, i| d * lu[(i, i)]);
        let scale = self.max_abs().max(T::min_positive_value()).powi(n as i32);
        if singular || det.abs() <= T::lit(1e-14) * scale {
            return Err(Error::Singular(det.to_f64_lossy()));
        }
        let mut inv = Self::zeros(n, n);
        for c in 0..n {
            let mut x: Vec<T> = (0..n).map(|i| if piv[i] == c { T::one() } else { T::zero() }).collect();
            for i in 0..n {
                for k in 0..i {
                    x[i] = x[i] - lu[(i, k)] * x[k];
                }
            }
            for i in (0..n).rev() {
                for k in i + 1..n {
                    x[i] = x[i] - lu[(i, k)] * x[k];
                }
                x[i] = x[i] / lu[(i, i)];
            }
            for i in 0..n {
                inv[(i, c)] = x[i];
            }
        }
        Ok(inv)
    }

    /// Thin QR by modified Gram-Schmidt with reorthogonalization.
    /// The diagonal of R is made non-negative, so for Gaussian input Q is
    /// Haar-distributed.
    pub fn qr(&self) -> (Self, Self) {
        let (m, n) = (self.rows, self.cols);
        let mut q = self.clone();
        let mut r = Self::zeros(n, n);
        for j in 0..n {
            for _pass in 0..2 {
                for k in 0..j {
                    let proj = (0..m).fold(T::zero(), |s, i| s + q[(i, k)] * q[(i, j)]);
                    r[(k, j)] = r[(k, j)] + proj;
                    for i in 0..m {
                        let v = q[(i, k)];
                        q[(i, j)] = q[(i, j)] - proj * v;
                    }
                }
            }
            let nrm = (0..m).fold(T::zero(), |s, i| s + q[(i, j)] * q[(i, j)]).sqrt();
            r[(j, j)] = nrm;
            if nrm > T::zero() {
                for i in 0..m {
                    q[(i, j)] = q[(i, j)] / nrm;
                }
            }
        }
        (q, r)
    }
}

impl<T: Real> Index<(usize, usize)> for Mat<T> {
    type Output = T;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &T {
        &self.data[i * self.cols + j]
    }
}

impl<T: Real> IndexMut<(usize, usize)> for Mat<T> {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        &mut self.data[i * self.cols + j]
    }
}

impl<T: Real> Mul for &Mat<T> {
    type Output = Mat<T>;
    fn mul(self, rhs: &Mat<T>) -> Mat<T> {
        assert_eq!(self.cols, rhs.rows, "matrix product shape mismatch");
        let mut out = Mat::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                for j in 0..rhs.cols {
                    out[(i, j)] = out[(i, j)] + a * rhs[(k, j)];
                }
            }
        }
        out
    }
}

impl<T: Real> Add for &Mat<T> {
    type Output = Mat<T>;
    fn add(self, rhs: &Mat<T>) -> Mat<T> {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        Mat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(&a, &b)| a + b).collect(),
        }
    }
}

impl<T: Real> Sub for &Mat<T> {
    type Output = Mat<T>;
    fn sub(self, rhs: &Mat<T>) -> Mat<T> {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        Mat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(&a, &b)| a - b).collect(),
        }
    }
}

impl<T: Real> fmt::Debug for Mat<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries((0..self.rows).map(|i| self.row(i))).finish()
    }
}

impl<T: Real> Serialize for Mat<T> {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let rows: Vec<&[T]> = (0..self.rows).map(|i| self.row(i)).collect();
        rows.serialize(s)
    }
}

impl<'de, T: Real> Deserialize<'de> for Mat<T> {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let rows: Vec<Vec<T>> = Vec::deserialize(d)?;
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != c) {
            return Err(D::Error::custom("ragged matrix rows"));
        }
        Ok(Mat::from_rows(&rows))
    }
}

/// Singular value decomposition `M = A · diag(sigma) · B` with `A`, `B`
/// orthogonal and `sigma` sorted descending.
#[derive(Clone, Debug)]
pub struct Svd<T: Real> {
    pub a: Mat<T>,
    pub sigma: Vec<T>,
    pub b: Mat<T>,
}

impl<T: Real> Svd<T> {
    pub fn reconstruct(&self) -> Mat<T> {
        &(&self.a * &Mat::from_diag(&self.sigma)) * &self.b
    }
}

/// One-sided (Hestenes) Jacobi SVD of a square matrix.
pub fn svd<T: Real>(m: &Mat<T>) -> Svd<T> {
    assert!(m.is_square(), "svd expects a square matrix");
    let n = m.rows();
    let mut w = m.clone();
    let mut v = Mat::identity(n);
    let eps = T::epsilon();
    for _sweep in 0..60 {
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let (mut alpha, mut beta, mut gamma) = (T::zero(), T::zero(), T::zero());
                for i in 0..n {
                    let (x, y) = (w[(i, p)], w[(i, q)]);
                    alpha = alpha + x * x;
                    beta = beta + y * y;
                    gamma = gamma + x * y;
                }
                if gamma == T::zero() || gamma.abs() <= eps * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (gamma + gamma);
                let t = zeta.signum() / (zeta.abs() + (T::one() + zeta * zeta).sqrt());
                let c = T::one() / (T::one() + t * t).sqrt();
                let s = c * t;
                for mat in [&mut w, &mut v] {
                    for i in 0..n {
                        let (x, y) = (mat[(i, p)], mat[(i, q)]);
                        mat[(i, p)] = c * x - s * y;
                        mat[(i, q)] = s * x + c * y;
                    }
                }
            }
        }
        if !rotated {
            break;
        }
    }
    let norms: Vec<T> = (0..n).map(|j| crate::scalar::norm(&w.col(j))).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| norms[b].partial_cmp(&norms[a]).unwrap_or(std::cmp::Ordering::Equal));

    let mut a = Mat::zeros(n, n);
    let mut b = Mat::zeros(n, n);
    let mut sigma = Vec::with_capacity(n);
    let mut filled = Vec::new();
    for (k, &j) in order.iter().enumerate() {
        sigma.push(norms[j]);
        for i in 0..n {
            b[(k, i)] = v[(i, j)];
        }
        if norms[j] > T::zero() && norms[j] > eps * norms[order[0]] * T::from_usize_lossy(n) {
            for i in 0..n {
                a[(i, k)] = w[(i, j)] / norms[j];
            }
            filled.push(k);
        }
    }
    complete_orthonormal_columns(&mut a, &filled);
    Svd { a, sigma, b }
}

/// Fills the columns of `a` not listed in `filled` with an orthonormal
/// completion (Gram-Schmidt against the standard basis).
fn complete_orthonormal_columns<T: Real>(a: &mut Mat<T>, filled: &[usize]) {
    let n = a.rows();
    let mut basis: Vec<Vec<T>> = filled.iter().map(|&k| a.col(k)).collect();
    let mut e = 0;
    for k in 0..n {
        if filled.contains(&k) {
            continue;
        }
        loop {
            let mut x = vec![T::zero(); n];
            x[e % n] = T::one();
            e += 1;
            for _ in 0..2 {
                for b in &basis {
                    let d = crate::scalar::dot(&x, b);
                    for (xi, bi) in x.iter_mut().zip(b) {
                        *xi = *xi - d * *bi;
                    }
                }
            }
            let nrm = crate::scalar::norm(&x);
            if nrm > T::lit(1e-3) {
                x.iter_mut().for_each(|v| *v = *v / nrm);
                for i in 0..n {
                    a[(i, k)] = x[i];
                }
                basis.push(x);
                break;
            }
        }
    }
}

/// In-place Cholesky of a dense symmetric matrix stored row-major in `a`.
/// On success the lower triangle holds `L` with `A = L Lᵀ` and the strict
/// upper triangle is zeroed.
/// Returns `false` if a non-positive pivot is met.
///
/// Blocked right-looking factorization of the upper triangle (`A = UᵀU`),
/// so every update is an axpy over a contiguous row segment.
pub fn cholesky_in_place<T: Real>(a: &mut [T], n: usize) -> bool {
    const PANEL: usize = 48;
    const CHUNK: usize = 512;
    assert_eq!(a.len(), n * n);
    let mut k0 = 0;
    while k0 < n {
        let k1 = (k0 + PANEL).min(n);
        for k in k0..k1 {
            let d = a[k * n + k];
            if !(d > T::zero()) {
                return false;
            }
            let d = d.sqrt();
            a[k * n + k] = d;
            let inv = T::one() / d;
            for x in &mut a[k * n + k + 1..k * n + n] {
                *x = *x * inv;
            }
            for i in k + 1..k1 {
                let (head, tail) = a.split_at_mut(i * n);
                let s = head[k * n + i];
                axpy_neg(&mut tail[i..n], s, &head[k * n + i..k * n + n]);
            }
        }
        // Trailing update, chunked over columns so the panel slice stays in cache.
        let mut c0 = k1;
        while c0 < n {
            let c1 = (c0 + CHUNK).min(n);
            for i in k1..c1 {
                let (head, tail) = a.split_at_mut(i * n);
                let lo = i.max(c0);
                let row = &mut tail[lo..c1];
                for k in k0..k1 {
                    let s = head[k * n + i];
                    if s != T::zero() {
                        axpy_neg(row, s, &head[k * n + lo..k * n + c1]);
                    }
                }
            }
            c0 = c1;
        }
        k0 = k1;
    }
    for i in 0..n {
        for j in 0..i {
            a[i * n + j] = a[j * n + i];
            a[j * n + i] = T::zero();
        }
    }
    true
}

#[inline]
fn axpy_neg<T: Real>(y: &mut [T], s: T, x: &[T]) {
    for (yi, &xi) in y.iter_mut().zip(x) {
        *yi = *yi - s * xi;
    }
}

/// Solves `L Lᵀ x = b` given the factor from [`cholesky_in_place`].
pub fn cholesky_solve<T: Real>(l: &[T], n: usize, b: &[T]) -> Vec<T> {
    let mut y = b.to_vec();
    for i in 0..n {
        let s = dot_unrolled(&l[i * n..i * n + i], &y[..i]);
        y[i] = (y[i] - s) / l[i * n + i];
    }
    for i in (0..n).rev() {
        let mut s = T::zero();
        for k in i + 1..n {
            s = s + l[k * n + i] * y[k];
        }
        y[i] = (y[i] - s) / l[i * n + i];
    }
    y
}

/// Dot product with four independent accumulators so the compiler can
/// vectorize the inner loop.
#[inline]
fn dot_unrolled<T: Real>(a: &[T], b: &[T]) -> T {
    let n = a.len().min(b.len());
    let (mut s0, mut s1, mut s2, mut s3) = (T::zero(), T::zero(), T::zero(), T::zero());
    let chunks = n / 4;
    for c in 0..chunks {
        let k = 4 * c;
        s0 = s0 + a[k] * b[k];
        s1 = s1 + a[k + 1] * b[k + 1];
        s2 = s2 + a[k + 2] * b[k + 2];
        s3 = s3 + a[k + 3] * b[k + 3];
    }
    let mut s = (s0 + s1) + (s2 + s3);
    for k in 4 * chunks..n {
        s = s + a[k] * b[k];
    }
    s
}
