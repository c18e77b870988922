//! Declarative shape descriptions and the catalog builder.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::mesh::{self, Mesh, V2, V3};
use super::{apply_linear, union_of_rotations, Discretization, Metadata, Shape, ShapeFile};
use crate::error::{Error, Result};
use crate::matrix_tools::{build_group, GroupName, Mat, SymmetryGroup};
use crate::scalar::Real;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum ShapeKind {
    Segment,
    #[default]
    Disk,
    Ellipse,
    RegularPolygon,
    Polygon,
    Triangle,
    UnionOfRotations,
    Ball,
    Ellipsoid,
    Cube,
    Tetrahedron,
    Octahedron,
    Icosahedron,
    PointCloudFile,
}

/// Description of a catalog shape. Only the parameters relevant to `kind`
/// are read.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct ShapeSpec {
    pub kind: ShapeKind,
    /// Ambient dimension for `ball` (2 or 3).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dim: Option<usize>,
    /// Number of sides (`regular_polygon`) or rotations (`union_of_rotations`).
    #[serde(default, rename = "N", alias = "n", skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    /// Disk/ball radius, or circumradius of polygons and solids.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub radius: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub length: Option<f64>,
    /// Area (planar) or volume of polygons and solids; default 1 when no
    /// radius is given.
    #[serde(default, alias = "area", skip_serializing_if = "Option::is_none")]
    pub volume: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub semi_axes: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub vertices: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub path: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub base: Option<Box<ShapeSpec>>,
    /// Target node count.
    pub resolution: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub discretize: Option<Discretization>,
    /// Corner grading exponent for polygon edges (default 1.5) or radial
    /// grading exponent for disk and ball volume cells (default 1). Polygon
    /// and polyhedron volume cells use uniform lattices and ignore it.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grading: Option<f64>,
}

impl ShapeSpec {
    pub fn regular_polygon(n: usize, area: f64, resolution: usize, discretize: Discretization) -> Self {
        Self {
            kind: ShapeKind::RegularPolygon,
            n: Some(n),
            volume: Some(area),
            resolution,
            discretize: Some(discretize),
            ..Self::default()
        }
    }

    pub fn segment(length: f64, resolution: usize) -> Self {
        Self { kind: ShapeKind::Segment, length: Some(length), resolution, ..Self::default() }
    }

    pub fn disk(radius: f64, resolution: usize, discretize: Discretization) -> Self {
        Self { kind: ShapeKind::Disk, radius: Some(radius), resolution, discretize: Some(discretize), ..Self::default() }
    }

    pub fn ellipse(a: f64, b: f64, resolution: usize, discretize: Discretization) -> Self {
        Self {
            kind: ShapeKind::Ellipse,
            semi_axes: Some(vec![a, b]),
            resolution,
            discretize: Some(discretize),
            ..Self::default()
        }
    }

    pub fn ball(radius: f64, resolution: usize, discretize: Discretization) -> Self {
        Self {
            kind: ShapeKind::Ball,
            dim: Some(3),
            radius: Some(radius),
            resolution,
            discretize: Some(discretize),
            ..Self::default()
        }
    }

    /// Cube, tetrahedron, octahedron or icosahedron of the given volume.
    pub fn solid(kind: ShapeKind, volume: f64, resolution: usize, discretize: Discretization) -> Self {
        Self { kind, volume: Some(volume), resolution, discretize: Some(discretize), ..Self::default() }
    }

    pub fn with_resolution(&self, resolution: usize) -> Self {
        Self { resolution, ..self.clone() }
    }

    pub fn with_discretization(&self, discretize: Discretization) -> Self {
        Self { discretize: Some(discretize), ..self.clone() }
    }

    /// Resolution of the next coarser mesh level: the largest resolution
    /// whose mesh has fewer nodes than this one.
    pub fn coarser_resolution(&self) -> Result<usize> {
        let count = |r: usize| -> Result<usize> { Ok(build_shape::<f64>(&self.with_resolution(r))?.len()) };
        let n = count(self.resolution)?;
        let (mut lo, mut hi) = (1usize, self.resolution);
        // Invariant: count(hi) == n; find the largest r < hi with fewer nodes.
        while hi - lo > 1 {
            let mid = lo + (hi - lo) / 2;
            match count(mid) {
                Ok(c) if c < n => lo = mid,
                Ok(_) => hi = mid,
                Err(_) => lo = mid,
            }
        }
        match count(lo) {
            Ok(c) if c < n => Ok(lo),
            _ => Err(Error::InvalidSpec(format!("resolution {} is already the coarsest level", self.resolution))),
        }
    }

    /// Ambient dimension of the built shape, when known without reading
    /// files.
    pub fn ambient_dim(&self) -> Option<usize> {
        match self.kind {
            ShapeKind::Ball => Some(self.dim.unwrap_or(3)),
            ShapeKind::Ellipsoid | ShapeKind::Cube | ShapeKind::Tetrahedron | ShapeKind::Octahedron | ShapeKind::Icosahedron => {
                Some(3)
            }
            ShapeKind::PointCloudFile => None,
            ShapeKind::Polygon | ShapeKind::Triangle => {
                Some(self.vertices.as_ref().and_then(|v| v.first()).map_or(2, Vec::len))
            }
            _ => Some(2),
        }
    }

    fn discretization(&self) -> Discretization {
        self.discretize.unwrap_or(Discretization::Boundary)
    }

    fn positive(&self, name: &str, v: Option<f64>, default: f64) -> Result<f64> {
        let x = v.unwrap_or(default);
        if !(x > 0.0) || !x.is_finite() {
            return Err(Error::InvalidSpec(format!("{name} must be positive, got {x}")));
        }
        Ok(x)
    }

    fn min_resolution(&self, min: usize) -> Result<()> {
        if self.resolution < min {
            return Err(Error::InvalidSpec(format!(
                "resolution {} below the minimum {min} for {:?}",
                self.resolution, self.kind
            )));
        }
        Ok(())
    }
}

/// Smallest level whose node count is closest to `target`.
fn closest_level(target: usize, count: impl Fn(usize) -> usize) -> usize {
    let mut f = 1;
    while count(f) < target && f < 10_000 {
        f += 1;
    }
    if f > 1 && target.abs_diff(count(f - 1)) <= target.abs_diff(count(f)) {
        f - 1
    } else {
        f
    }
}

fn to_t<T: Real>(xs: &[f64]) -> Vec<T> {
    xs.iter().map(|&x| T::lit(x)).collect()
}

fn metadata<T: Real>(volume: f64, centroid: &[f64], q: Option<Vec<Vec<f64>>>) -> Metadata<T> {
    Metadata {
        volume: T::lit(volume),
        centroid: to_t(centroid),
        moment_matrix: q.map(|rows| Mat::from_f64_rows(&rows).expect("square moment matrix")),
    }
}

fn finish<T: Real>(
    m: Mesh,
    disc: Discretization,
    md: Option<Metadata<T>>,
    group: Option<SymmetryGroup<T>>,
    label: String,
) -> Result<Shape<T>> {
    Shape::from_parts(m.dim, m.cell_dim, to_t(&m.coords), to_t(&m.weights), m.axes.as_deref().map(to_t), disc, md, group, label)
}

fn central_q(volume: f64, first: &[f64], second: &[Vec<f64>]) -> (Vec<f64>, Vec<Vec<f64>>) {
    let n = first.len();
    let c: Vec<f64> = first.iter().map(|x| x / volume).collect();
    let q = (0..n).map(|i| (0..n).map(|j| second[i][j] - volume * c[i] * c[j]).collect()).collect();
    (c, q)
}

fn diag_q(d: &[f64]) -> Vec<Vec<f64>> {
    (0..d.len()).map(|i| (0..d.len()).map(|j| if i == j { d[i] } else { 0.0 }).collect()).collect()
}

/// Largest divisor of `n` in `[3, 12]`.
fn dihedral_order(n: usize) -> Option<usize> {
    (3..=12).rev().find(|d| n % d == 0)
}

fn klein_group<T: Real>() -> Result<SymmetryGroup<T>> {
    let o = T::one();
    let elems = vec![
        Mat::identity(3),
        Mat::from_diag(&[o, -o, -o]),
        Mat::from_diag(&[-o, o, -o]),
        Mat::from_diag(&[-o, -o, o]),
    ];
    SymmetryGroup::from_elements("klein4", elems)
}

/// Builds the discretized shape described by `spec`.
///
/// Symmetric primitives carry their symmetry group; their nodes are
/// invariant under it up to rounding.
pub fn build_shape<T: Real>(spec: &ShapeSpec) -> Result<Shape<T>> {
    let disc = spec.discretization();
    let res = spec.resolution;
    let gamma = spec.grading.unwrap_or(1.0);
    if let Some(g) = spec.grading {
        if !(g >= 1.0) || !g.is_finite() {
            return Err(Error::InvalidSpec(format!("grading exponent must be at least 1, got {g}")));
        }
    }
    match spec.kind {
        ShapeKind::Segment => {
            spec.min_resolution(2)?;
            let len = spec.positive("length", spec.length, 1.0)?;
            match &spec.vertices {
                Some(v) => {
                    let (a, b) = two_points(v)?;
                    let m = mesh::segment(a, b, res);
                    let c = [(a[0] + b[0]) / 2.0, (a[1] + b[1]) / 2.0];
                    finish(m, disc, Some(metadata(0.0, &c, None)), None, "segment".into())
                }
                None => {
                    let m = mesh::centred_segment(len, res);
                    let g = build_group(GroupName::Dihedral(2), 2)?;
                    finish(m, disc, Some(metadata(0.0, &[0.0, 0.0], None)), Some(g), "segment".into())
                }
            }
        }
        ShapeKind::Disk => disk(spec, spec.positive("radius", spec.radius, 1.0)?, disc, gamma),
        ShapeKind::Ball if spec.dim == Some(2) => disk(spec, spec.positive("radius", spec.radius, 1.0)?, disc, gamma),
        ShapeKind::Ellipse => {
            let ax = semi_axes(spec, 2)?;
            let (a, b) = (ax[0], ax[1]);
            let q = diag_q(&[PI * a.powi(3) * b / 4.0, PI * a * b.powi(3) / 4.0]);
            let md = metadata(PI * a * b, &[0.0, 0.0], Some(q));
            let g = build_group(GroupName::Dihedral(2), 2)?;
            match disc {
                Discretization::Boundary => {
                    spec.min_resolution(8)?;
                    let n = res + res % 2;
                    finish(mesh::ellipse_boundary(a, b, n), disc, Some(md), Some(g), "ellipse".into())
                }
                Discretization::Volume => {
                    let unit = disk::<T>(&ShapeSpec { radius: Some(1.0), ..spec.clone() }, 1.0, disc, gamma)?;
                    let mapped = apply_linear(&unit, &Mat::from_diag(&[T::lit(a), T::lit(b)]))?;
                    mapped.with_metadata(Some(md)).with_symmetry(Some(g)).map(|s| s.with_label("ellipse"))
                }
            }
        }
        ShapeKind::RegularPolygon => {
            let n = spec.n.ok_or_else(|| Error::InvalidSpec("regular_polygon needs N".into()))?;
            if n < 3 {
                return Err(Error::InvalidSpec(format!("a polygon needs N ≥ 3 sides, got {n}")));
            }
            spec.min_resolution(n)?;
            let r = circumradius(spec, n)?;
            let verts: Vec<V2> = (0..n)
                .map(|k| {
                    let th = PI / n as f64 + 2.0 * PI * k as f64 / n as f64;
                    [r * th.cos(), r * th.sin()]
                })
                .collect();
            let g = build_group(GroupName::Dihedral(n), 2)?;
            polygon(spec, &verts, [0.0, 0.0], Some(g), format!("regular_polygon({n})"))
        }
        ShapeKind::Triangle | ShapeKind::Polygon => {
            let verts = match (&spec.vertices, spec.kind) {
                (None, ShapeKind::Triangle) => {
                    let equi = ShapeSpec { kind: ShapeKind::RegularPolygon, n: Some(3), ..spec.clone() };
                    return build_shape(&equi);
                }
                (None, _) => return Err(Error::InvalidSpec("polygon needs vertices".into())),
                (Some(v), _) => planar_vertices(v)?,
            };
            if spec.kind == ShapeKind::Triangle && verts.len() != 3 {
                return Err(Error::InvalidSpec("triangle needs exactly 3 vertices".into()));
            }
            spec.min_resolution(verts.len())?;
            let (area, _, _) = mesh::polygon_moments(&verts);
            if area.abs() < 1e-14 {
                return Err(Error::InvalidSpec("polygon has zero area".into()));
            }
            let mut verts = verts;
            if area < 0.0 {
                verts.reverse();
            }
            let (area, first, _) = mesh::polygon_moments(&verts);
            let c = [first[0] / area, first[1] / area];
            let label = if spec.kind == ShapeKind::Triangle { "triangle" } else { "polygon" };
            polygon(spec, &verts, c, None, label.into())
        }
        ShapeKind::UnionOfRotations => {
            let base = spec.base.as_ref().ok_or_else(|| Error::InvalidSpec("union_of_rotations needs a base".into()))?;
            let n = spec.n.ok_or_else(|| Error::InvalidSpec("union_of_rotations needs N".into()))?;
            let b: Shape<T> = build_shape(base)?;
            union_of_rotations(&b, n)
        }
        ShapeKind::Ball => {
            if spec.dim.unwrap_or(3) != 3 {
                return Err(Error::InvalidSpec("ball supports dim 2 or 3".into()));
            }
            ball(spec, spec.positive("radius", spec.radius, 1.0)?, disc, gamma)
        }
        ShapeKind::Ellipsoid => {
            let ax = semi_axes(spec, 3)?;
            let unit: Shape<T> = ball(&ShapeSpec { radius: Some(1.0), ..spec.clone() }, 1.0, disc, gamma)?;
            let mapped = apply_linear(&unit, &Mat::from_diag(&to_t::<T>(&ax)))?;
            let vol = 4.0 * PI * ax[0] * ax[1] * ax[2] / 3.0;
            let q = diag_q(&[vol * ax[0] * ax[0] / 5.0, vol * ax[1] * ax[1] / 5.0, vol * ax[2] * ax[2] / 5.0]);
            mapped
                .with_metadata(Some(metadata(vol, &[0.0; 3], Some(q))))
                .with_symmetry(Some(klein_group()?))
                .map(|s| s.with_label("ellipsoid"))
        }
        ShapeKind::Cube | ShapeKind::Tetrahedron | ShapeKind::Octahedron | ShapeKind::Icosahedron => {
            let (verts, faces, group, label) = match spec.kind {
                ShapeKind::Cube => {
                    let (v, f) = mesh::cube();
                    (v, f, GroupName::Octahedral, "cube")
                }
                ShapeKind::Tetrahedron => {
                    let (v, f) = mesh::tetrahedron();
                    (v, f, GroupName::Tetrahedral, "tetrahedron")
                }
                ShapeKind::Octahedron => {
                    let (v, f) = mesh::octahedron();
                    (v, f, GroupName::Octahedral, "octahedron")
                }
                _ => {
                    let (v, f) = mesh::icosahedron();
                    (v, f, GroupName::Icosahedral, "icosahedron")
                }
            };
            let base_r = mesh::dot3(verts[0], verts[0]).sqrt();
            let (base_vol, _, _) = mesh::polyhedron_moments(&verts, &faces);
            let scale = match spec.radius {
                Some(r) => spec.positive("radius", Some(r), 1.0)? / base_r,
                None => (spec.positive("volume", spec.volume, 1.0)? / base_vol).cbrt(),
            };
            let verts: Vec<V3> = verts.iter().map(|v| [v[0] * scale, v[1] * scale, v[2] * scale]).collect();
            let (vol, first, second) = mesh::polyhedron_moments(&verts, &faces);
            let second: Vec<Vec<f64>> = second.iter().map(|r| r.to_vec()).collect();
            let (c, q) = central_q(vol, &first, &second);
            let md = metadata(vol, &c, Some(q));
            let g = build_group(group, 3)?;
            let m = match disc {
                Discretization::Boundary => {
                    spec.min_resolution(faces.len())?;
                    let f = closest_level(res, |f| mesh::polyhedron_boundary_count(&faces, f));
                    mesh::polyhedron_boundary(&verts, &faces, f)
                }
                Discretization::Volume => {
                    spec.min_resolution(faces.len())?;
                    let f = closest_level(res, |f| mesh::polyhedron_volume_count(&verts, &faces, f));
                    mesh::polyhedron_volume(&verts, &faces, f)
                }
            };
            finish(m, disc, Some(md), Some(g), label.into())
        }
        ShapeKind::PointCloudFile => {
            let path = spec.path.as_ref().ok_or_else(|| Error::InvalidSpec("point_cloud_file needs a path".into()))?;
            ShapeFile::read(path)?.to_shape()
        }
    }
}

fn two_points(v: &[Vec<f64>]) -> Result<(V2, V2)> {
    let p = planar_vertices(v)?;
    if p.len() != 2 {
        return Err(Error::InvalidSpec("segment endpoints must be two planar points".into()));
    }
    if p[0] == p[1] {
        return Err(Error::InvalidSpec("segment endpoints coincide".into()));
    }
    Ok((p[0], p[1]))
}

fn planar_vertices(v: &[Vec<f64>]) -> Result<Vec<V2>> {
    v.iter()
        .map(|p| match p.as_slice() {
            [x, y] if x.is_finite() && y.is_finite() => Ok([*x, *y]),
            _ => Err(Error::InvalidSpec("vertices must be finite planar points".into())),
        })
        .collect()
}

fn semi_axes(spec: &ShapeSpec, n: usize) -> Result<Vec<f64>> {
    let ax = spec.semi_axes.clone().ok_or_else(|| Error::InvalidSpec("semi_axes required".into()))?;
    if ax.len() != n {
        return Err(Error::InvalidSpec(format!("expected {n} semi-axes, got {}", ax.len())));
    }
    if ax.iter().any(|&a| !(a > 0.0) || !a.is_finite()) {
        return Err(Error::InvalidSpec("semi-axes must be positive".into()));
    }
    Ok(ax)
}

fn circumradius(spec: &ShapeSpec, n: usize) -> Result<f64> {
    match spec.radius {
        Some(r) => spec.positive("radius", Some(r), 1.0),
        None => {
            let area = spec.positive("area", spec.volume, 1.0)?;
            Ok((2.0 * area / (n as f64 * (2.0 * PI / n as f64).sin())).sqrt())
        }
    }
}

fn polygon<T: Real>(
    spec: &ShapeSpec,
    verts: &[V2],
    center: V2,
    group: Option<SymmetryGroup<T>>,
    label: String,
) -> Result<Shape<T>> {
    let disc = spec.discretization();
    let (area, first, second) = mesh::polygon_moments(verts);
    let second: Vec<Vec<f64>> = second.iter().map(|r| r.to_vec()).collect();
    let (c, q) = central_q(area, &first, &second);
    let md = metadata(area, &c, Some(q));
    let m = match disc {
        Discretization::Boundary => {
            let q = spec.grading.unwrap_or(1.5);
            let n = verts.len();
            let lens: Vec<f64> = (0..n)
                .map(|k| {
                    let (a, b) = (verts[k], verts[(k + 1) % n]);
                    ((b[0] - a[0]).powi(2) + (b[1] - a[1]).powi(2)).sqrt()
                })
                .collect();
            let perim: f64 = lens.iter().sum();
            let per_edge: Vec<usize> =
                lens.iter().map(|l| ((spec.resolution as f64) * l / perim).round().max(1.0) as usize).collect();
            mesh::polygon_boundary(verts, &per_edge, q)
        }
        Discretization::Volume => {
            for k in 0..verts.len() {
                let (a, b) = (verts[k], verts[(k + 1) % verts.len()]);
                let cr = (a[0] - center[0]) * (b[1] - center[1]) - (a[1] - center[1]) * (b[0] - center[0]);
                if cr <= 0.0 {
                    return Err(Error::InvalidSpec("polygon is not star-shaped about its centroid".into()));
                }
            }
            let level = closest_level(spec.resolution, |l| mesh::polygon_volume_count(verts, l));
            mesh::polygon_volume(verts, center, level)
        }
    };
    finish(m, disc, Some(md), group, label)
}

fn disk<T: Real>(spec: &ShapeSpec, r: f64, disc: Discretization, gamma: f64) -> Result<Shape<T>> {
    let md = metadata(PI * r * r, &[0.0, 0.0], Some(diag_q(&[PI * r.powi(4) / 4.0; 2])));
    match disc {
        Discretization::Boundary => {
            spec.min_resolution(8)?;
            let g = dihedral_order(spec.resolution).map(|d| build_group(GroupName::Dihedral(d), 2)).transpose()?;
            finish(mesh::circle_boundary(r, spec.resolution), disc, Some(md), g, "disk".into())
        }
        Discretization::Volume => {
            spec.min_resolution(6)?;
            let rings = closest_level(spec.resolution, |l| mesh::disk_volume_count(l, 6, gamma));
            let g = build_group(GroupName::Dihedral(6), 2)?;
            finish(mesh::disk_volume(r, rings, 6, gamma), disc, Some(md), Some(g), "disk".into())
        }
    }
}

fn ball<T: Real>(spec: &ShapeSpec, r: f64, disc: Discretization, gamma: f64) -> Result<Shape<T>> {
    let vol = 4.0 * PI * r.powi(3) / 3.0;
    let md = metadata(vol, &[0.0; 3], Some(diag_q(&[vol * r * r / 5.0; 3])));
    let g = build_group(GroupName::Icosahedral, 3)?;
    spec.min_resolution(20)?;
    let m = match disc {
        Discretization::Boundary => mesh::sphere_boundary(r, closest_level(spec.resolution, |f| 20 * f * f)),
        Discretization::Volume => {
            mesh::ball_volume(r, closest_level(spec.resolution, |f| mesh::ball_volume_count(f, gamma)), gamma)
        }
    };
    finish(m, disc, Some(md), Some(g), "ball".into())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::measure;

    #[test]
    fn square_example() {
        let s: Shape<f64> = build_shape(&ShapeSpec::regular_polygon(4, 1.0, 400, Discretization::Boundary)).unwrap();
        assert_eq!(s.len(), 400);
        assert!((s.metadata().unwrap().volume - 1.0).abs() < 1e-14);
        assert_eq!(s.symmetry().unwrap().name(), "dihedral(4)");
    }

    #[test]
    fn sphere_example() {
        let s: Shape<f64> = build_shape(&ShapeSpec::ball(1.0, 2000, Discretization::Boundary)).unwrap();
        assert!((s.metadata().unwrap().volume - 4.0 * PI / 3.0).abs() < 1e-14);
        assert!((s.len() as f64 - 2000.0).abs() < 300.0);
        assert!(s.has_irreducible_symmetry());
    }

    #[test]
    fn unit_disk_measure() {
        let s: Shape<f64> = build_shape(&ShapeSpec::disk(1.0, 64, Discretization::Boundary)).unwrap();
        let m = measure(&s).unwrap();
        assert!((m.volume - PI).abs() < 1e-14);
        assert!((m.inertia - PI / 2.0).abs() < 1e-14);
        assert!((m.asymmetry - (1.0 / (2.0 * PI)).sqrt()).abs() < 1e-14);
    }

    #[test]
    fn every_kind_builds() {
        let specs = vec![
            ShapeSpec::segment(4.0, 50),
            ShapeSpec::disk(1.0, 60, Discretization::Boundary),
            ShapeSpec::disk(1.0, 300, Discretization::Volume),
            ShapeSpec::ellipse(2.0, 1.0, 100, Discretization::Boundary),
            ShapeSpec::ellipse(2.0, 1.0, 300, Discretization::Volume),
            ShapeSpec::regular_polygon(5, 1.0, 100, Discretization::Boundary),
            ShapeSpec::regular_polygon(3, 1.0, 300, Discretization::Volume),
            ShapeSpec {
                kind: ShapeKind::Polygon,
                vertices: Some(vec![vec![0.0, 0.0], vec![2.0, 0.0], vec![2.0, 1.0], vec![0.0, 1.0]]),
                resolution: 120,
                discretize: Some(Discretization::Volume),
                ..ShapeSpec::default()
            },
            ShapeSpec { kind: ShapeKind::Triangle, resolution: 90, ..ShapeSpec::default() },
            ShapeSpec::ball(1.0, 500, Discretization::Volume),
            ShapeSpec {
                kind: ShapeKind::Ellipsoid,
                semi_axes: Some(vec![1.0, 2.0, 0.5]),
                resolution: 500,
                ..ShapeSpec::default()
            },
            ShapeSpec::solid(ShapeKind::Cube, 1.0, 600, Discretization::Boundary),
            ShapeSpec::solid(ShapeKind::Tetrahedron, 1.0, 600, Discretization::Volume),
            ShapeSpec::solid(ShapeKind::Octahedron, 1.0, 400, Discretization::Boundary),
            ShapeSpec::solid(ShapeKind::Icosahedron, 1.0, 400, Discretization::Volume),
        ];
        for spec in specs {
            let s: Shape<f64> = build_shape(&spec).unwrap_or_else(|e| panic!("{spec:?}: {e}"));
            assert!(s.len() > 10, "{spec:?}");
            if let Some(md) = s.metadata() {
                if s.discretization() == Discretization::Volume {
                    let rel = (s.total_weight() - md.volume).abs() / md.volume;
                    assert!(rel < 1e-12, "{spec:?}: {rel}");
                }
            }
        }
    }

    #[test]
    fn platonic_volumes_and_moments() {
        for kind in [ShapeKind::Cube, ShapeKind::Tetrahedron, ShapeKind::Octahedron, ShapeKind::Icosahedron] {
            let s: Shape<f64> = build_shape(&ShapeSpec::solid(kind, 2.0, 100, Discretization::Boundary)).unwrap();
            let m = measure(&s).unwrap();
            assert!((m.volume - 2.0).abs() < 1e-12);
            for i in 0..3 {
                for j in 0..3 {
                    let expect = if i == j { m.inertia / 3.0 } else { 0.0 };
                    assert!((m.moment_matrix[i][j] - expect).abs() < 1e-12 * m.inertia);
                }
            }
        }
        // Cube of unit volume: I = 3 · (1/12).
        let s: Shape<f64> = build_shape(&ShapeSpec::solid(ShapeKind::Cube, 1.0, 6, Discretization::Boundary)).unwrap();
        assert!((measure(&s).unwrap().inertia - 0.25).abs() < 1e-14);
    }

    #[test]
    fn invalid_specs_are_rejected() {
        assert!(build_shape::<f64>(&ShapeSpec::regular_polygon(4, 1.0, 3, Discretization::Boundary)).is_err());
        assert!(build_shape::<f64>(&ShapeSpec::ellipse(0.0, 1.0, 100, Discretization::Boundary)).is_err());
        assert!(build_shape::<f64>(&ShapeSpec { kind: ShapeKind::Polygon, resolution: 10, ..ShapeSpec::default() }).is_err());
        let json = r#"{"kind": "dodecahedron", "resolution": 10}"#;
        assert!(serde_json::from_str::<ShapeSpec>(json).is_err());
    }

    #[test]
    fn spec_json_round_trip() {
        let spec = ShapeSpec::regular_polygon(6, 2.0, 600, Discretization::Volume);
        let json = serde_json::to_string(&spec).unwrap();
        assert_eq!(serde_json::from_str::<ShapeSpec>(&json).unwrap(), spec);
    }
}
