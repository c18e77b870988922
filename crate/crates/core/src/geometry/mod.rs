//! Discretized compact sets: nodes, cell weights, cell radii, exact metadata
//! and symmetry, together with linear images and measurements.

mod io;
mod mesh;
mod spec;

pub use io::{MetadataFile, ShapeFile, SymmetryRepr};
pub use spec::{build_shape, ShapeKind, ShapeSpec};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix_tools::{build_group, check_irreducible, GroupName, Mat, SymmetryGroup};
use crate::scalar::{norm, Real};

/// Which region of the set carries nodes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Discretization {
    Boundary,
    Volume,
}

/// Exact geometric data of the continuum set.
#[derive(Clone, Debug, PartialEq)]
pub struct Metadata<T: Real> {
    /// n-dimensional volume (0 for sets with empty interior).
    pub volume: T,
    pub centroid: Vec<T>,
    /// Central second-moment matrix `Q = ∫ (x − x̄)(x − x̄)ᵀ dx`.
    pub moment_matrix: Option<Mat<T>>,
}

impl<T: Real> Metadata<T> {
    /// `I = tr Q`.
    pub fn inertia(&self) -> Option<T> {
        self.moment_matrix.as_ref().map(Mat::trace)
    }
}

/// A discretized compact set in `R^n`.
///
/// `cell_dim` is the dimension of the cells the nodes stand for: 1 for
/// boundary panels of planar sets and for segments, 2 for planar area cells
/// and for surface cells in `R³`, 3 for volume cells in `R³`. Cells of
/// dimension 1 carry a unit tangent, surface cells in `R³` a unit normal.
#[derive(Clone, Debug)]
pub struct Shape<T: Real> {
    dim: usize,
    cell_dim: usize,
    coords: Vec<T>,
    cell_weights: Vec<T>,
    cell_radii: Vec<T>,
    cell_axes: Option<Vec<T>>,
    discretization: Discretization,
    metadata: Option<Metadata<T>>,
    symmetry: Option<SymmetryGroup<T>>,
    label: String,
}

/// Output of [`measure`].
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Measurements<T> {
    pub volume: T,
    pub centroid: Vec<T>,
    pub inertia: T,
    pub moment_matrix: Vec<Vec<T>>,
    pub asymmetry: T,
}

const SYMMETRY_TOL: f64 = 1e-12;

/// Equivalent-ball radius of a cell of the given dimension and measure.
pub fn cell_radius<T: Real>(cell_dim: usize, measure: T) -> T {
    match cell_dim {
        1 => measure * T::lit(0.5),
        2 => (measure / T::PI()).sqrt(),
        _ => (T::lit(0.75) * measure / T::PI()).cbrt(),
    }
}

impl<T: Real> Shape<T> {
    /// Assembles a shape from raw parts and checks its invariants. Radii are
    /// derived from the weights.
    #[allow(clippy::too_many_arguments)]
    pub fn from_parts(
        dim: usize,
        cell_dim: usize,
        coords: Vec<T>,
        cell_weights: Vec<T>,
        cell_axes: Option<Vec<T>>,
        discretization: Discretization,
        metadata: Option<Metadata<T>>,
        symmetry: Option<SymmetryGroup<T>>,
        label: impl Into<String>,
    ) -> Result<Self> {
        let cell_radii = cell_weights.iter().map(|&w| cell_radius(cell_dim, w)).collect();
        let shape = Self {
            dim,
            cell_dim,
            coords,
            cell_weights,
            cell_radii,
            cell_axes,
            discretization,
            metadata,
            symmetry,
            label: label.into(),
        };
        shape.validate()?;
        Ok(shape)
    }

    /// Checks the structural invariants: sizes, positive weights and radii,
    /// finite coordinates, and exact invariance under the attached group.
    pub fn validate(&self) -> Result<()> {
        let n = self.dim;
        if n == 0 || self.cell_dim == 0 || self.cell_dim > n {
            return Err(Error::Dimension(format!("cell dimension {} in R^{n}", self.cell_dim)));
        }
        if self.coords.len() % n != 0 {
            return Err(Error::Dimension("coordinate buffer not a multiple of dim".into()));
        }
        let count = self.len();
        if self.cell_weights.len() != count || self.cell_radii.len() != count {
            return Err(Error::Dimension("weights/radii length differs from node count".into()));
        }
        if let Some(ax) = &self.cell_axes {
            if ax.len() != count * n {
                return Err(Error::Dimension("cell axes length differs from node count".into()));
            }
        }
        if self.coords.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidSpec("non-finite coordinate".into()));
        }
        if self.cell_weights.iter().chain(&self.cell_radii).any(|&w| !(w > T::zero()) || !w.is_finite()) {
            return Err(Error::InvalidSpec("cell weights and radii must be positive".into()));
        }
        if let Some(g) = &self.symmetry {
            if g.dim() != n {
                return Err(Error::Dimension(format!("group acts on R^{}, shape lives in R^{n}", g.dim())));
            }
            for u in g.elements() {
                self.match_nodes(u)?;
            }
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn cell_dim(&self) -> usize {
        self.cell_dim
    }

    pub fn len(&self) -> usize {
        self.coords.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    #[inline]
    pub fn point(&self, i: usize) -> &[T] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    pub fn coords(&self) -> &[T] {
        &self.coords
    }

    pub fn points(&self) -> Vec<Vec<T>> {
        self.coords.chunks(self.dim).map(<[T]>::to_vec).collect()
    }

    pub fn cell_weights(&self) -> &[T] {
        &self.cell_weights
    }

    pub fn cell_radii(&self) -> &[T] {
        &self.cell_radii
    }

    /// Unit tangent (1-D cells) or unit normal (surface cells in `R³`).
    pub fn cell_axis(&self, i: usize) -> Option<&[T]> {
        self.cell_axes.as_ref().map(|a| &a[i * self.dim..(i + 1) * self.dim])
    }

    pub fn cell_axes(&self) -> Option<&[T]> {
        self.cell_axes.as_deref()
    }

    pub fn discretization(&self) -> Discretization {
        self.discretization
    }

    pub fn metadata(&self) -> Option<&Metadata<T>> {
        self.metadata.as_ref()
    }

    pub fn symmetry(&self) -> Option<&SymmetryGroup<T>> {
        self.symmetry.as_ref()
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    /// Total reference measure `Σ cell_weights`.
    pub fn total_weight(&self) -> T {
        crate::scalar::pairwise_sum(&self.cell_weights)
    }

    /// Diagonal of the bounding box; a cheap scale for tolerances.
    pub fn extent(&self) -> T {
        let n = self.dim;
        let mut s = T::zero();
        for k in 0..n {
            let (lo, hi) = self
                .coords
                .iter()
                .skip(k)
                .step_by(n)
                .fold((T::infinity(), T::neg_infinity()), |(a, b), &x| (a.min(x), b.max(x)));
            if lo.is_finite() {
                s = s + (hi - lo) * (hi - lo);
            }
        }
        s.sqrt()
    }

    /// Whether the attached group is irreducible.
    pub fn has_irreducible_symmetry(&self) -> bool {
        self.symmetry.as_ref().is_some_and(check_irreducible)
    }

    /// Permutation `π` with `U x_i = x_{π(i)}` to tolerance `1e-12·max(1, extent)`
    /// per coordinate.
    pub fn match_nodes(&self, u: &Mat<T>) -> Result<Vec<usize>> {
        let tol = T::tol(SYMMETRY_TOL) * T::one().max(self.extent());
        let index = NodeIndex::new(self);
        (0..self.len())
            .map(|i| {
                let y = u.mul_vec(self.point(i));
                index.find(self, &y, tol).ok_or_else(|| {
                    Error::NodeMatching(format!("image of node {i} is not a node (tolerance {tol})"))
                })
            })
            .collect()
    }
}

/// Nodes sorted by first coordinate, for range lookups.
struct NodeIndex<T> {
    order: Vec<usize>,
    keys: Vec<T>,
}

impl<T: Real> NodeIndex<T> {
    fn new(shape: &Shape<T>) -> Self {
        let mut order: Vec<usize> = (0..shape.len()).collect();
        order.sort_by(|&a, &b| shape.point(a)[0].partial_cmp(&shape.point(b)[0]).expect("finite coordinates"));
        let keys = order.iter().map(|&i| shape.point(i)[0]).collect();
        Self { order, keys }
    }

    fn find(&self, shape: &Shape<T>, y: &[T], tol: T) -> Option<usize> {
        let start = self.keys.partition_point(|&k| k < y[0] - tol);
        let mut best: Option<(usize, T)> = None;
        for (pos, &k) in self.keys.iter().enumerate().skip(start) {
            if k > y[0] + tol {
                break;
            }
            let i = self.order[pos];
            let d = shape.point(i).iter().zip(y).fold(T::zero(), |m, (&a, &b)| m.max((a - b).abs()));
            if d <= tol && best.is_none_or(|(_, bd)| d < bd) {
                best = Some((i, d));
            }
        }
        best.map(|(i, _)| i)
    }
}

/// Image `MK` of the shape under an invertible linear map.
///
/// Volume cells scale by `|det M|`; 1-D cells by the stretch of their
/// tangent; surface cells in `R³` by `|det M|·|M⁻ᵀ n|`. Exact metadata is
/// carried by the change of variables `x̄ ↦ Mx̄`, `Q ↦ |det M| M Q Mᵀ`. The
/// symmetry group is kept (conjugated) only when `M` is orthogonal.
pub fn apply_linear<T: Real>(shape: &Shape<T>, m: &Mat<T>) -> Result<Shape<T>> {
    let n = shape.dim;
    if m.rows() != n || !m.is_square() {
        return Err(Error::Dimension(format!("expected a {n}×{n} matrix")));
    }
    let inv = m.inverse()?;
    let det = m.det();
    let adet = det.abs();
    let mut coords = Vec::with_capacity(shape.coords.len());
    for i in 0..shape.len() {
        coords.extend(m.mul_vec(shape.point(i)));
    }
    let mut weights = shape.cell_weights.clone();
    let mut axes = shape.cell_axes.clone();
    match (shape.cell_dim, axes.as_mut()) {
        (c, _) if c == n => weights.iter_mut().for_each(|w| *w = *w * adet),
        (1, Some(ax)) => {
            for (i, w) in weights.iter_mut().enumerate() {
                let v = m.mul_vec(&ax[i * n..(i + 1) * n]);
                let s = norm(&v);
                *w = *w * s;
                for k in 0..n {
                    ax[i * n + k] = v[k] / s;
                }
            }
        }
        (_, Some(ax)) => {
            let inv_t = inv.transpose();
            for (i, w) in weights.iter_mut().enumerate() {
                let v = inv_t.mul_vec(&ax[i * n..(i + 1) * n]);
                let s = norm(&v);
                *w = *w * adet * s;
                for k in 0..n {
                    ax[i * n + k] = v[k] / s;
                }
            }
        }
        _ => return Err(Error::InvalidSpec("lower-dimensional cells need axes to be mapped".into())),
    }
    let metadata = shape.metadata.as_ref().map(|md| Metadata {
        volume: md.volume * adet,
        centroid: m.mul_vec(&md.centroid),
        moment_matrix: md.moment_matrix.as_ref().map(|q| (&(m * q) * &m.transpose()).scale(adet)),
    });
    let symmetry = match &shape.symmetry {
        Some(g) if m.orthogonality_residual() <= T::tol(SYMMETRY_TOL) => {
            if m.max_abs_diff(&Mat::identity(n)) == T::zero() {
                Some(g.clone())
            } else {
                Some(g.conjugate(m))
            }
        }
        _ => None,
    };
    let cell_radii = weights.iter().map(|&w| cell_radius(shape.cell_dim, w)).collect();
    Ok(Shape {
        dim: n,
        cell_dim: shape.cell_dim,
        coords,
        cell_weights: weights,
        cell_radii,
        cell_axes: axes,
        discretization: shape.discretization,
        metadata,
        symmetry,
        label: shape.label.clone(),
    })
}

/// Volume, centroid, inertia, moment matrix and asymmetry
/// `α = sqrt(I / V^{1+2/n})`.
///
/// Exact metadata is preferred; otherwise volume-cell quadrature is used.
/// Sets with zero volume and no exact moments yield `Error::Undefined`.
pub fn measure<T: Real>(shape: &Shape<T>) -> Result<Measurements<T>> {
    let n = shape.dim;
    let (volume, centroid, q) = match shape.metadata.as_ref() {
        Some(Metadata { volume, centroid, moment_matrix: Some(q) }) => (*volume, centroid.clone(), q.clone()),
        _ if shape.cell_dim == n => quadrature_moments(shape),
        _ => return Err(Error::Undefined("inertia")),
    };
    if !(volume > T::zero()) {
        return Err(Error::Undefined("inertia"));
    }
    let inertia = q.trace();
    let nn = T::from_usize_lossy(n);
    let asymmetry = (inertia / volume.powf(T::one() + T::lit(2.0) / nn)).sqrt();
    Ok(Measurements {
        volume,
        centroid,
        inertia,
        moment_matrix: (0..n).map(|i| q.row(i).to_vec()).collect(),
        asymmetry,
    })
}

fn quadrature_moments<T: Real>(shape: &Shape<T>) -> (T, Vec<T>, Mat<T>) {
    let n = shape.dim;
    let volume = shape.total_weight();
    let mut c = vec![T::zero(); n];
    for (i, &w) in shape.cell_weights.iter().enumerate() {
        for (ck, &x) in c.iter_mut().zip(shape.point(i)) {
            *ck = *ck + w * x;
        }
    }
    c.iter_mut().for_each(|x| *x = *x / volume);
    let mut q = Mat::zeros(n, n);
    for (i, &w) in shape.cell_weights.iter().enumerate() {
        let p = shape.point(i);
        for a in 0..n {
            for b in 0..n {
                q[(a, b)] = q[(a, b)] + w * (p[a] - c[a]) * (p[b] - c[b]);
            }
        }
    }
    (volume, c, q)
}

/// Union of `N ≥ 3` rotated copies of a planar shape, duplicate nodes merged
/// at `1e-10·extent`, with the cyclic group `C_N` attached.
pub fn union_of_rotations<T: Real>(base: &Shape<T>, n_rot: usize) -> Result<Shape<T>> {
    if base.dim != 2 {
        return Err(Error::Dimension("union of rotations needs a planar base shape".into()));
    }
    if n_rot < 3 {
        return Err(Error::InvalidSpec(format!("need N ≥ 3 rotations for an irreducible group, got {n_rot}")));
    }
    let group: SymmetryGroup<T> = build_group(GroupName::Cyclic(n_rot), 2)?;
    let mut parts = Vec::with_capacity(n_rot);
    for u in group.elements() {
        let mut rotated = base.clone();
        rotated.symmetry = None;
        parts.push(apply_linear(&rotated, u)?);
    }
    let tol = T::lit(1e-10) * T::one().max(base.extent() * T::lit(2.0));
    let mut coords: Vec<T> = Vec::new();
    let mut weights = Vec::new();
    let mut axes: Option<Vec<T>> = base.cell_axes.as_ref().map(|_| Vec::new());
    let mut grid: std::collections::HashMap<(i64, i64), Vec<usize>> = std::collections::HashMap::new();
    let key = |x: T, y: T| ((x / tol).floor().to_i64().unwrap_or(0), (y / tol).floor().to_i64().unwrap_or(0));
    for part in &parts {
        for i in 0..part.len() {
            let p = part.point(i);
            let (kx, ky) = key(p[0], p[1]);
            let dup = (-1..=1).flat_map(|dx| (-1..=1).map(move |dy| (kx + dx, ky + dy))).any(|k| {
                grid.get(&k).is_some_and(|ids| {
                    ids.iter().any(|&j| crate::scalar::distance(&coords[2 * j..2 * j + 2], p) < tol)
                })
            });
            if dup {
                continue;
            }
            let idx = weights.len();
            grid.entry((kx, ky)).or_default().push(idx);
            coords.extend_from_slice(p);
            weights.push(part.cell_weights[i]);
            if let (Some(out), Some(a)) = (axes.as_mut(), part.cell_axis(i)) {
                out.extend_from_slice(a);
            }
        }
    }
    Shape::from_parts(
        2,
        base.cell_dim,
        coords,
        weights,
        axes,
        base.discretization,
        None,
        Some(group),
        format!("{}x{n_rot}", base.label),
    )
}

impl<T: Real> Shape<T> {
    /// Replaces the symmetry group after checking node invariance.
    pub fn with_symmetry(mut self, group: Option<SymmetryGroup<T>>) -> Result<Self> {
        self.symmetry = group;
        if let Some(g) = &self.symmetry {
            for u in g.elements() {
                self.match_nodes(u)?;
            }
        }
        Ok(self)
    }

    /// Replaces the exact metadata.
    pub fn with_metadata(mut self, metadata: Option<Metadata<T>>) -> Self {
        self.metadata = metadata;
        self
    }

    /// Multiplies every coordinate by `s > 0`, mapping cells and metadata
    /// accordingly.
    pub fn scaled(&self, s: T) -> Result<Self> {
        apply_linear(self, &Mat::identity(self.dim).scale(s))
    }
}
