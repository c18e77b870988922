//! Node generators for the catalog primitives. Everything here works in
//! `f64`; shapes convert on construction.

use std::f64::consts::PI;

use crate::quadrature::gauss_legendre;

/// Raw discretization: node coordinates, cell measures and optional axes.
#[derive(Clone, Debug, Default)]
pub(crate) struct Mesh {
    pub dim: usize,
    pub cell_dim: usize,
    pub coords: Vec<f64>,
    pub weights: Vec<f64>,
    pub axes: Option<Vec<f64>>,
}

impl Mesh {
    fn new(dim: usize, cell_dim: usize, with_axes: bool) -> Self {
        Self { dim, cell_dim, axes: with_axes.then(Vec::new), ..Self::default() }
    }

    fn push(&mut self, x: &[f64], w: f64, axis: Option<&[f64]>) {
        self.coords.extend_from_slice(x);
        self.weights.push(w);
        if let (Some(a), Some(v)) = (self.axes.as_mut(), axis) {
            a.extend_from_slice(v);
        }
    }
}

pub(crate) type V2 = [f64; 2];
pub(crate) type V3 = [f64; 3];

fn sub3(a: V3, b: V3) -> V3 {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

fn add3(a: V3, b: V3) -> V3 {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2]]
}

fn scale3(a: V3, s: f64) -> V3 {
    [a[0] * s, a[1] * s, a[2] * s]
}

pub(crate) fn cross3(a: V3, b: V3) -> V3 {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

pub(crate) fn dot3(a: V3, b: V3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn norm3(a: V3) -> f64 {
    dot3(a, a).sqrt()
}

fn unit3(a: V3) -> V3 {
    scale3(a, 1.0 / norm3(a))
}

/// Symmetric grading map of `[0, 1]` clustering toward both ends; `q = 1`
/// is uniform.
fn grade(u: f64, q: f64) -> f64 {
    if q == 1.0 {
        return u;
    }
    let a = u.powf(q);
    let b = (1.0 - u).powf(q);
    a / (a + b)
}

/// Straight segment from `a` to `b` in `R²` with Chebyshev-graded panels.
pub(crate) fn segment(a: V2, b: V2, panels: usize) -> Mesh {
    let mut m = Mesh::new(2, 1, true);
    let d = [b[0] - a[0], b[1] - a[1]];
    let len = (d[0] * d[0] + d[1] * d[1]).sqrt();
    let u = [d[0] / len, d[1] / len];
    let nodes: Vec<f64> = (0..=panels).map(|k| 0.5 * (1.0 - (PI * k as f64 / panels as f64).cos())).collect();
    for k in 0..panels {
        let (s0, s1) = (nodes[k], nodes[k + 1]);
        let mid = 0.5 * (s0 + s1);
        let x = [a[0] + d[0] * mid, a[1] + d[1] * mid];
        m.push(&x, len * (s1 - s0), Some(&u));
    }
    m
}

/// Segment of length `len` on the x-axis centred at the origin; nodes are
/// placed exactly antisymmetrically.
pub(crate) fn centred_segment(len: f64, panels: usize) -> Mesh {
    let mut m = Mesh::new(2, 1, true);
    let half = 0.5 * len;
    let e: Vec<f64> = (0..=panels).map(|k| -half * (PI * k as f64 / panels as f64).cos()).collect();
    let mut xs: Vec<(f64, f64)> = Vec::with_capacity(panels);
    for k in 0..panels {
        xs.push((0.5 * (e[k] + e[k + 1]), e[k + 1] - e[k]));
    }
    for k in 0..panels / 2 {
        let j = panels - 1 - k;
        let (x, w) = (0.5 * (xs[j].0 - xs[k].0), 0.5 * (xs[j].1 + xs[k].1));
        xs[k] = (-x, w);
        xs[j] = (x, w);
    }
    if panels % 2 == 1 {
        xs[panels / 2].0 = 0.0;
    }
    for (x, w) in xs {
        m.push(&[x, 0.0], w, Some(&[1.0, 0.0]));
    }
    m
}

/// Boundary panels on the closed polygon `verts`, `per_edge[k]` panels on
/// edge `k`, graded toward the corners with exponent `q`.
pub(crate) fn polygon_boundary(verts: &[V2], per_edge: &[usize], q: f64) -> Mesh {
    let mut m = Mesh::new(2, 1, true);
    let n = verts.len();
    for k in 0..n {
        let (a, b) = (verts[k], verts[(k + 1) % n]);
        let d = [b[0] - a[0], b[1] - a[1]];
        let len = (d[0] * d[0] + d[1] * d[1]).sqrt();
        let u = [d[0] / len, d[1] / len];
        let p = per_edge[k];
        let t: Vec<f64> = (0..=p).map(|i| grade(i as f64 / p as f64, q)).collect();
        for i in 0..p {
            let mid = 0.5 * (t[i] + t[i + 1]);
            m.push(&[a[0] + d[0] * mid, a[1] + d[1] * mid], len * (t[i + 1] - t[i]), Some(&u));
        }
    }
    m
}

/// Circle of radius `r` cut into `n` equal arcs, nodes at arc midpoints
/// `2π(k + 1/2)/n`.
pub(crate) fn circle_boundary(r: f64, n: usize) -> Mesh {
    let mut m = Mesh::new(2, 1, true);
    let w = 2.0 * PI * r / n as f64;
    for k in 0..n {
        let th = 2.0 * PI * (k as f64 + 0.5) / n as f64;
        let (s, c) = th.sin_cos();
        m.push(&[r * c, r * s], w, Some(&[-s, c]));
    }
    m
}

/// Ellipse with semi-axes `a`, `b`, cut at equal parametric angles; cell
/// weights are exact arc lengths.
pub(crate) fn ellipse_boundary(a: f64, b: f64, n: usize) -> Mesh {
    let mut m = Mesh::new(2, 1, true);
    let (gx, gw) = gauss_legendre(16);
    let speed = |t: f64| (a * a * t.sin().powi(2) + b * b * t.cos().powi(2)).sqrt();
    let h = 2.0 * PI / n as f64;
    for k in 0..n {
        let t0 = h * k as f64;
        let len: f64 = gx.iter().zip(&gw).map(|(x, w)| 0.5 * h * w * speed(t0 + 0.5 * h * (x + 1.0))).sum();
        let th = t0 + 0.5 * h;
        let (s, c) = th.sin_cos();
        let tan = [-a * s, b * c];
        let tl = (tan[0] * tan[0] + tan[1] * tan[1]).sqrt();
        m.push(&[a * c, b * s], len, Some(&[tan[0] / tl, tan[1] / tl]));
    }
    m
}

/// Radial layer boundaries `0 = s_0 < … < s_L = 1`, refined toward `s = 1`
/// when `gamma > 1`.
fn layers(count: usize, gamma: f64) -> Vec<f64> {
    (0..=count).map(|k| 1.0 - (1.0 - k as f64 / count as f64).powf(gamma)).collect()
}

/// Mean of `s` over `[s1, s2]` against the density `s^{d-1}`.
fn radial_mean(s1: f64, s2: f64, d: i32) -> f64 {
    let df = d as f64;
    df / (df + 1.0) * (s2.powi(d + 1) - s1.powi(d + 1)) / (s2.powi(d) - s1.powi(d))
}

/// Barycentric lattice of the triangle `abc` at `level`: `level²`
/// congruent cells with nodes at their centroids. The cell set is invariant
/// under every permutation of the vertices.
fn triangle_lattice(m: &mut Mesh, a: V2, b: V2, c: V2, level: usize) {
    let l = level as f64;
    let p = |i: usize, j: usize| {
        let (u, v) = (i as f64 / l, j as f64 / l);
        [a[0] + (b[0] - a[0]) * u + (c[0] - a[0]) * v, a[1] + (b[1] - a[1]) * u + (c[1] - a[1]) * v]
    };
    let area = 0.5 * ((b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])).abs() / (l * l);
    let centroid = |x: V2, y: V2, z: V2| [(x[0] + y[0] + z[0]) / 3.0, (x[1] + y[1] + z[1]) / 3.0];
    for i in 0..level {
        for j in 0..level - i {
            m.push(&centroid(p(i, j), p(i + 1, j), p(i, j + 1)), area, None);
            if i + j + 2 <= level {
                m.push(&centroid(p(i + 1, j), p(i + 1, j + 1), p(i, j + 1)), area, None);
            }
        }
    }
}

/// Volume cells for a planar polygon star-shaped about `center`. A triangle
/// is subdivided directly; other polygons are fanned from `center` and each
/// fan triangle is subdivided at a level proportional to its edge.
pub(crate) fn polygon_volume(verts: &[V2], center: V2, level: usize) -> Mesh {
    let mut m = Mesh::new(2, 2, false);
    if verts.len() == 3 {
        triangle_lattice(&mut m, verts[0], verts[1], verts[2], level);
        return m;
    }
    for (k, l) in fan_levels(verts, level).into_iter().enumerate() {
        triangle_lattice(&mut m, center, verts[k], verts[(k + 1) % verts.len()], l);
    }
    m
}

fn fan_levels(verts: &[V2], level: usize) -> Vec<usize> {
    let n = verts.len();
    let lens: Vec<f64> = (0..n)
        .map(|k| {
            let (a, b) = (verts[k], verts[(k + 1) % n]);
            ((b[0] - a[0]).powi(2) + (b[1] - a[1]).powi(2)).sqrt()
        })
        .collect();
    let emax = lens.iter().cloned().fold(0.0, f64::max);
    lens.iter().map(|l| ((level as f64) * l / emax).round().max(1.0) as usize).collect()
}

pub(crate) fn polygon_volume_count(verts: &[V2], level: usize) -> usize {
    if verts.len() == 3 {
        return level * level;
    }
    fan_levels(verts, level).into_iter().map(|l| l * l).sum()
}

/// Disk of radius `r` as rings of annular sectors; every ring count is a
/// multiple of `fold` so the set is invariant under the dihedral group of
/// that order.
pub(crate) fn disk_volume(r: f64, rings: usize, fold: usize, gamma: f64) -> Mesh {
    let mut m = Mesh::new(2, 2, false);
    let s = layers(rings, gamma);
    for l in 0..rings {
        let (s1, s2) = (s[l], s[l + 1]);
        let target = 2.0 * PI * 0.5 * (s1 + s2) / (s2 - s1);
        let count = fold * ((target / fold as f64).round().max(1.0) as usize);
        let half = PI / count as f64;
        let rad = r * radial_mean(s1, s2, 2) * half.sin() / half;
        let area = half * r * r * (s2 * s2 - s1 * s1);
        for j in 0..count {
            let th = 2.0 * PI * (j as f64 + 0.5) / count as f64;
            m.push(&[rad * th.cos(), rad * th.sin()], area, None);
        }
    }
    m
}

/// A planar tile on a facet: vertices in order.
#[derive(Clone, Debug)]
struct Tile {
    verts: Vec<V3>,
}

impl Tile {
    fn centroid_area(&self) -> (V3, f64) {
        let v = &self.verts;
        let mut c = [0.0; 3];
        let mut total = 0.0;
        for k in 1..v.len() - 1 {
            let a = norm3(cross3(sub3(v[k], v[0]), sub3(v[k + 1], v[0]))) * 0.5;
            let g = scale3(add3(add3(v[0], v[k]), v[k + 1]), 1.0 / 3.0);
            c = add3(c, scale3(g, a));
            total += a;
        }
        (scale3(c, 1.0 / total), total)
    }
}

/// Uniform subdivision of a triangular or square facet at level `f`.
fn facet_tiles(face: &[V3], f: usize) -> Vec<Tile> {
    let ff = f as f64;
    let mut out = Vec::new();
    match face.len() {
        3 => {
            let (a, b, c) = (face[0], face[1], face[2]);
            let p = |i: usize, j: usize| {
                let (u, v) = (i as f64 / ff, j as f64 / ff);
                add3(add3(scale3(a, 1.0 - u - v), scale3(b, u)), scale3(c, v))
            };
            for i in 0..f {
                for j in 0..f - i {
                    out.push(Tile { verts: vec![p(i, j), p(i + 1, j), p(i, j + 1)] });
                    if i + j + 2 <= f {
                        out.push(Tile { verts: vec![p(i + 1, j), p(i + 1, j + 1), p(i, j + 1)] });
                    }
                }
            }
        }
        4 => {
            let (o, e1, e2) = (face[0], sub3(face[1], face[0]), sub3(face[3], face[0]));
            let p = |i: usize, j: usize| add3(add3(o, scale3(e1, i as f64 / ff)), scale3(e2, j as f64 / ff));
            for i in 0..f {
                for j in 0..f {
                    out.push(Tile { verts: vec![p(i, j), p(i + 1, j), p(i + 1, j + 1), p(i, j + 1)] });
                }
            }
        }
        k => panic!("facets with {k} vertices are not supported"),
    }
    out
}

/// Both triangles and squares split into `f²` tiles at level `f`.
fn tiles_per_level(_face_len: usize, f: usize) -> usize {
    f * f
}

/// Surface cells on a convex polyhedron, each facet subdivided at level `f`.
pub(crate) fn polyhedron_boundary(verts: &[V3], faces: &[Vec<usize>], f: usize) -> Mesh {
    let mut m = Mesh::new(3, 2, true);
    for face in faces {
        let fv: Vec<V3> = face.iter().map(|&i| verts[i]).collect();
        let normal = unit3(cross3(sub3(fv[1], fv[0]), sub3(fv[2], fv[0])));
        for t in facet_tiles(&fv, f) {
            let (c, a) = t.centroid_area();
            m.push(&c, a, Some(&normal));
        }
    }
    m
}

pub(crate) fn polyhedron_boundary_count(faces: &[Vec<usize>], f: usize) -> usize {
    faces.iter().map(|fc| tiles_per_level(fc.len(), f)).sum()
}

/// Tetrahedral lattice of the tetrahedron `v` at `level`: upward and
/// downward tetrahedra plus the octahedra between them (four times the
/// volume), nodes at their centroids. Invariant under every permutation of
/// the vertices.
fn tetra_lattice(m: &mut Mesh, v: [V3; 4], level: usize) {
    let l = level as f64;
    let (e1, e2, e3) = (sub3(v[1], v[0]), sub3(v[2], v[0]), sub3(v[3], v[0]));
    let p = |i: usize, j: usize, k: usize| {
        add3(add3(add3(v[0], scale3(e1, i as f64 / l)), scale3(e2, j as f64 / l)), scale3(e3, k as f64 / l))
    };
    let vol = dot3(e1, cross3(e2, e3)).abs() / (6.0 * l * l * l);
    let mean = |pts: &[V3]| scale3(pts.iter().fold([0.0; 3], |acc, &x| add3(acc, x)), 1.0 / pts.len() as f64);
    for i in 0..level {
        for j in 0..level - i {
            for k in 0..level - i - j {
                m.push(&mean(&[p(i, j, k), p(i + 1, j, k), p(i, j + 1, k), p(i, j, k + 1)]), vol, None);
                if i + j + k + 2 <= level {
                    let oct = [
                        p(i + 1, j, k),
                        p(i, j + 1, k),
                        p(i, j, k + 1),
                        p(i + 1, j + 1, k),
                        p(i + 1, j, k + 1),
                        p(i, j + 1, k + 1),
                    ];
                    m.push(&mean(&oct), 4.0 * vol, None);
                }
                if i + j + k + 3 <= level {
                    let down = [p(i + 1, j + 1, k), p(i + 1, j, k + 1), p(i, j + 1, k + 1), p(i + 1, j + 1, k + 1)];
                    m.push(&mean(&down), vol, None);
                }
            }
        }
    }
}

fn tetra_lattice_count(level: usize) -> usize {
    let t = |k: usize| if k >= 3 { k * (k - 1) * (k - 2) / 6 } else { 0 };
    // Up cells: a ≥ 0 with Σa = level − 1, octahedra Σa = level − 2, down
    // cells Σa = level − 3 (after shifting), each counted by C(s + 3, 3).
    t(level + 2) + t(level + 1) + t(level)
}

/// Volume cells for the catalog solids: a voxel grid for the cube, the
/// tetrahedral lattice for the tetrahedron, and fans of lattice-subdivided
/// cones over the triangular faces otherwise.
pub(crate) fn polyhedron_volume(verts: &[V3], faces: &[Vec<usize>], f: usize) -> Mesh {
    let mut m = Mesh::new(3, 3, false);
    if faces.iter().all(|fc| fc.len() == 4) {
        let half = verts[0][0].abs();
        let h = 2.0 * half / f as f64;
        let c = |i: usize| -half + h * (i as f64 + 0.5);
        for i in 0..f {
            for j in 0..f {
                for k in 0..f {
                    m.push(&[c(i), c(j), c(k)], h * h * h, None);
                }
            }
        }
    } else if verts.len() == 4 {
        tetra_lattice(&mut m, [verts[0], verts[1], verts[2], verts[3]], f);
    } else {
        for face in faces {
            tetra_lattice(&mut m, [[0.0; 3], verts[face[0]], verts[face[1]], verts[face[2]]], f);
        }
    }
    m
}

pub(crate) fn polyhedron_volume_count(verts: &[V3], faces: &[Vec<usize>], f: usize) -> usize {
    if faces.iter().all(|fc| fc.len() == 4) {
        f * f * f
    } else if verts.len() == 4 {
        tetra_lattice_count(f)
    } else {
        faces.len() * tetra_lattice_count(f)
    }
}

fn layer_level(f: usize, s1: f64, s2: f64) -> usize {
    ((f as f64) * 0.5 * (s1 + s2)).round().max(1.0) as usize
}

/// Area of the spherical triangle with unit vertices `a`, `b`, `c`.
fn spherical_area(a: V3, b: V3, c: V3) -> f64 {
    let num = dot3(a, cross3(b, c)).abs();
    let den = 1.0 + dot3(a, b) + dot3(b, c) + dot3(c, a);
    2.0 * num.atan2(den)
}

/// Geodesic subdivision of the sphere of radius `r`: icosahedron faces
/// subdivided at level `f` and projected, `20 f²` cells with exact
/// spherical areas.
pub(crate) fn sphere_boundary(r: f64, f: usize) -> Mesh {
    let mut m = Mesh::new(3, 2, true);
    let (verts, faces) = icosahedron();
    for face in &faces {
        let fv: Vec<V3> = face.iter().map(|&i| verts[i]).collect();
        for t in facet_tiles(&fv, f) {
            let u: Vec<V3> = t.verts.iter().map(|&v| unit3(v)).collect();
            let area = spherical_area(u[0], u[1], u[2]);
            let dir = unit3(add3(add3(u[0], u[1]), u[2]));
            m.push(&scale3(dir, r), area * r * r, Some(&dir));
        }
    }
    m
}

/// Ball of radius `r`: cones over projected geodesic tiles, cut into
/// `rings` radial layers.
pub(crate) fn ball_volume(r: f64, f: usize, gamma: f64) -> Mesh {
    let mut m = Mesh::new(3, 3, false);
    let (verts, faces) = icosahedron();
    let nl = ball_layers(f);
    let s = layers(nl, gamma);
    for face in &faces {
        let fv: Vec<V3> = face.iter().map(|&i| verts[i]).collect();
        for l in 0..nl {
            let (s1, s2) = (s[l], s[l + 1]);
            let rm = radial_mean(s1, s2, 3);
            for t in facet_tiles(&fv, layer_level(f, s1, s2)) {
                let u: Vec<V3> = t.verts.iter().map(|&v| unit3(v)).collect();
                let area = spherical_area(u[0], u[1], u[2]);
                let dir = unit3(add3(add3(u[0], u[1]), u[2]));
                m.push(&scale3(dir, r * rm), area * r.powi(3) * (s2.powi(3) - s1.powi(3)) / 3.0, None);
            }
        }
    }
    m
}

fn ball_layers(f: usize) -> usize {
    // Icosahedron edge 2 on circumradius sqrt(1 + φ²): tiles of the outer
    // level have edge ≈ 1.05/f on the unit sphere.
    ((f as f64) / 1.05).round().max(1.0) as usize
}

pub(crate) fn ball_volume_count(f: usize, gamma: f64) -> usize {
    let nl = ball_layers(f);
    let s = layers(nl, gamma);
    20 * (0..nl).map(|l| tiles_per_level(3, layer_level(f, s[l], s[l + 1]))).sum::<usize>()
}

pub(crate) fn disk_volume_count(rings: usize, fold: usize, gamma: f64) -> usize {
    let s = layers(rings, gamma);
    (0..rings)
        .map(|l| {
            let (s1, s2) = (s[l], s[l + 1]);
            let target = 2.0 * PI * 0.5 * (s1 + s2) / (s2 - s1);
            fold * ((target / fold as f64).round().max(1.0) as usize)
        })
        .sum()
}

pub(crate) const PHI: f64 = 1.618_033_988_749_895;

/// Icosahedron with vertices at cyclic permutations of `(0, ±1, ±φ)`,
/// faces oriented outward.
pub(crate) fn icosahedron() -> (Vec<V3>, Vec<Vec<usize>>) {
    let mut v = Vec::new();
    for &a in &[-1.0, 1.0] {
        for &b in &[-PHI, PHI] {
            v.push([0.0, a, b]);
            v.push([a, b, 0.0]);
            v.push([b, 0.0, a]);
        }
    }
    let faces = faces_by_edge_length(&v, 2.0);
    (v, faces)
}

pub(crate) fn tetrahedron() -> (Vec<V3>, Vec<Vec<usize>>) {
    let v = vec![[1.0, 1.0, 1.0], [1.0, -1.0, -1.0], [-1.0, 1.0, -1.0], [-1.0, -1.0, 1.0]];
    let faces = faces_by_edge_length(&v, 8.0_f64.sqrt());
    (v, faces)
}

pub(crate) fn octahedron() -> (Vec<V3>, Vec<Vec<usize>>) {
    let mut v = Vec::new();
    for k in 0..3 {
        for s in [1.0, -1.0] {
            let mut p = [0.0; 3];
            p[k] = s;
            v.push(p);
        }
    }
    let faces = faces_by_edge_length(&v, 2.0_f64.sqrt());
    (v, faces)
}

/// Cube `[-1, 1]³` with square faces oriented outward.
pub(crate) fn cube() -> (Vec<V3>, Vec<Vec<usize>>) {
    let mut v = Vec::new();
    for &x in &[-1.0, 1.0] {
        for &y in &[-1.0, 1.0] {
            for &z in &[-1.0, 1.0] {
                v.push([x, y, z]);
            }
        }
    }
    let mut faces = Vec::new();
    for k in 0..3 {
        for s in [-1.0, 1.0] {
            let (a, b) = ((k + 1) % 3, (k + 2) % 3);
            let find = |ua: f64, ub: f64| {
                v.iter()
                    .position(|p| p[k] == s && p[a] == ua && p[b] == ub)
                    .expect("cube vertex")
            };
            let mut face = vec![find(-1.0, -1.0), find(1.0, -1.0), find(1.0, 1.0), find(-1.0, 1.0)];
            orient(&v, &mut face);
            faces.push(face);
        }
    }
    (v, faces)
}

/// All vertex triples whose pairwise distances equal `edge`, oriented
/// outward.
fn faces_by_edge_length(v: &[V3], edge: f64) -> Vec<Vec<usize>> {
    let close = |i: usize, j: usize| (norm3(sub3(v[i], v[j])) - edge).abs() < 1e-9;
    let mut faces = Vec::new();
    for i in 0..v.len() {
        for j in i + 1..v.len() {
            for k in j + 1..v.len() {
                if close(i, j) && close(j, k) && close(i, k) {
                    let mut f = vec![i, j, k];
                    orient(v, &mut f);
                    faces.push(f);
                }
            }
        }
    }
    faces
}

fn orient(v: &[V3], face: &mut [usize]) {
    let n = cross3(sub3(v[face[1]], v[face[0]]), sub3(v[face[2]], v[face[0]]));
    if dot3(n, v[face[0]]) < 0.0 {
        face.reverse();
    }
}

/// Volume, first moment and second moment `∫ x xᵀ` of a convex polyhedron
/// containing the origin, by tetrahedra from the origin.
pub(crate) fn polyhedron_moments(verts: &[V3], faces: &[Vec<usize>]) -> (f64, V3, [[f64; 3]; 3]) {
    let mut vol = 0.0;
    let mut first = [0.0; 3];
    let mut second = [[0.0; 3]; 3];
    for face in faces {
        for k in 1..face.len() - 1 {
            let (a, b, c) = (verts[face[0]], verts[face[k]], verts[face[k + 1]]);
            let v = dot3(a, cross3(b, c)) / 6.0;
            let s = add3(add3(a, b), c);
            vol += v;
            first = add3(first, scale3(s, v / 4.0));
            for i in 0..3 {
                for j in 0..3 {
                    second[i][j] += v / 20.0 * (a[i] * a[j] + b[i] * b[j] + c[i] * c[j] + s[i] * s[j]);
                }
            }
        }
    }
    (vol, first, second)
}

/// Area, first moment and second moment `∫ x xᵀ` of a simple polygon.
pub(crate) fn polygon_moments(verts: &[V2]) -> (f64, V2, [[f64; 2]; 2]) {
    let n = verts.len();
    let mut area = 0.0;
    let mut first = [0.0; 2];
    let mut second = [[0.0; 2]; 2];
    for k in 0..n {
        let (a, b) = (verts[k], verts[(k + 1) % n]);
        let t = 0.5 * (a[0] * b[1] - a[1] * b[0]);
        let s = [a[0] + b[0], a[1] + b[1]];
        area += t;
        first[0] += t * s[0] / 3.0;
        first[1] += t * s[1] / 3.0;
        for i in 0..2 {
            for j in 0..2 {
                second[i][j] += t / 12.0 * (a[i] * a[j] + b[i] * b[j] + s[i] * s[j]);
            }
        }
    }
    (area, first, second)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn platonic_face_counts() {
        assert_eq!(tetrahedron().1.len(), 4);
        assert_eq!(octahedron().1.len(), 8);
        assert_eq!(cube().1.len(), 6);
        assert_eq!(icosahedron().1.len(), 20);
    }

    #[test]
    fn polyhedron_moments_of_cube() {
        let (v, f) = cube();
        let (vol, first, second) = polyhedron_moments(&v, &f);
        assert!((vol - 8.0).abs() < 1e-13);
        assert!(first.iter().all(|x| x.abs() < 1e-13));
        // ∫ x² over [-1,1]³ = 8/3.
        assert!((second[0][0] - 8.0 / 3.0).abs() < 1e-13);
        assert!(second[0][1].abs() < 1e-13);
    }

    #[test]
    fn sphere_areas_sum_to_4pi() {
        let m = sphere_boundary(1.0, 6);
        assert_eq!(m.weights.len(), 720);
        let total: f64 = m.weights.iter().sum();
        assert!((total - 4.0 * PI).abs() < 1e-12);
    }

    #[test]
    fn volume_meshes_fill_the_body() {
        for (v, f, vol) in [(tetrahedron().0, tetrahedron().1, 8.0 / 3.0), (cube().0, cube().1, 8.0), (octahedron().0, octahedron().1, 4.0 / 3.0)] {
            for level in [1, 2, 5] {
                let m = polyhedron_volume(&v, &f, level);
                assert_eq!(m.weights.len(), polyhedron_volume_count(&v, &f, level));
                let total: f64 = m.weights.iter().sum();
                assert!((total - vol).abs() < 1e-12);
            }
        }
        let b = ball_volume(1.0, 4, 1.0);
        assert_eq!(b.weights.len(), ball_volume_count(4, 1.0));
        let total: f64 = b.weights.iter().sum();
        assert!((total - 4.0 * PI / 3.0).abs() < 1e-12);
        let d = disk_volume(1.0, 8, 6, 1.0);
        assert_eq!(d.weights.len(), disk_volume_count(8, 6, 1.0));
        assert!((d.weights.iter().sum::<f64>() - PI).abs() < 1e-12);
    }

    #[test]
    fn polygon_volume_area() {
        let sq = [[1.0, 1.0], [-1.0, 1.0], [-1.0, -1.0], [1.0, -1.0]];
        let m = polygon_volume(&sq, [0.0, 0.0], 10);
        assert_eq!(m.weights.len(), polygon_volume_count(&sq, 10));
        assert!((m.weights.iter().sum::<f64>() - 4.0).abs() < 1e-12);
        let tri = [[0.0, 0.0], [2.0, 0.0], [0.0, 1.0]];
        let m = polygon_volume(&tri, [0.5, 0.5], 7);
        assert_eq!(m.weights.len(), 49);
        assert!((m.weights.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn centred_segment_is_antisymmetric() {
        let m = centred_segment(4.0, 7);
        for k in 0..7 {
            assert_eq!(m.coords[2 * k], -m.coords[2 * (6 - k)]);
            assert_eq!(m.weights[k], m.weights[6 - k]);
        }
        assert!((m.weights.iter().sum::<f64>() - 4.0).abs() < 1e-12);
    }
}
