//! JSON shape files. `f64` values round-trip exactly through serde_json's
//! shortest representation.

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{Discretization, Metadata, Shape};
use crate::error::{Error, Result};
use crate::matrix_tools::{build_group, GroupName, Mat, SymmetryGroup};
use crate::scalar::Real;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SymmetryRepr {
    Name(String),
    Matrices(Vec<Vec<Vec<f64>>>),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetadataFile {
    pub volume: f64,
    pub centroid: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub inertia: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub moment_matrix: Option<Vec<Vec<f64>>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ShapeFile {
    pub dim: usize,
    /// Defaults to `dim` (volume cells).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cell_dim: Option<usize>,
    pub points: Vec<Vec<f64>>,
    pub cell_weights: Vec<f64>,
    pub cell_radii: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cell_axes: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub discretization: Option<Discretization>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub metadata: Option<MetadataFile>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub symmetry: Option<SymmetryRepr>,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub label: String,
}

impl ShapeFile {
    pub fn from_shape<T: Real>(shape: &Shape<T>) -> Self {
        let f = |xs: &[T]| xs.iter().map(|x| x.to_f64_lossy()).collect::<Vec<_>>();
        let symmetry = shape.symmetry().map(|g| {
            let named = g.name().parse::<GroupName>().ok().and_then(|name| {
                let built: SymmetryGroup<T> = build_group(name, g.dim()).ok()?;
                (built.elements() == g.elements()).then(|| g.name().to_string())
            });
            match named {
                Some(n) => SymmetryRepr::Name(n),
                None => SymmetryRepr::Matrices(g.to_f64_matrices()),
            }
        });
        Self {
            dim: shape.dim(),
            cell_dim: Some(shape.cell_dim()),
            points: (0..shape.len()).map(|i| f(shape.point(i))).collect(),
            cell_weights: f(shape.cell_weights()),
            cell_radii: f(shape.cell_radii()),
            cell_axes: (0..shape.len()).map(|i| shape.cell_axis(i).map(f)).collect(),
            discretization: Some(shape.discretization()),
            metadata: shape.metadata().map(|md| MetadataFile {
                volume: md.volume.to_f64_lossy(),
                centroid: f(&md.centroid),
                inertia: md.inertia().map(|x| x.to_f64_lossy()),
                moment_matrix: md.moment_matrix.as_ref().map(Mat::to_f64_rows),
            }),
            symmetry,
            label: shape.label().to_string(),
        }
    }

    /// Converts back, taking radii from the file rather than recomputing
    /// them.
    pub fn to_shape<T: Real>(&self) -> Result<Shape<T>> {
        let n = self.dim;
        if self.points.iter().any(|p| p.len() != n) {
            return Err(Error::Dimension(format!("every point must have {n} coordinates")));
        }
        let t = |xs: &[f64]| xs.iter().map(|&x| T::lit(x)).collect::<Vec<T>>();
        let coords: Vec<T> = self.points.iter().flat_map(|p| t(p)).collect();
        let axes = match &self.cell_axes {
            Some(a) if a.len() == self.points.len() && a.iter().all(|v| v.len() == n) => {
                Some(a.iter().flat_map(|v| t(v)).collect())
            }
            Some(_) => return Err(Error::Dimension("cell_axes must match points".into())),
            None => None,
        };
        let metadata = match &self.metadata {
            Some(md) => Some(Metadata {
                volume: T::lit(md.volume),
                centroid: t(&md.centroid),
                moment_matrix: md.moment_matrix.as_ref().map(|q| Mat::from_f64_rows(q)).transpose()?,
            }),
            None => None,
        };
        let symmetry = match &self.symmetry {
            None => None,
            Some(SymmetryRepr::Name(s)) => Some(build_group(s.parse()?, n)?),
            Some(SymmetryRepr::Matrices(ms)) => {
                let elems = ms.iter().map(|m| Mat::from_f64_rows(m)).collect::<Result<Vec<_>>>()?;
                Some(SymmetryGroup::from_elements("custom", elems)?)
            }
        };
        let cell_dim = self.cell_dim.unwrap_or(n);
        let mut shape = Shape::from_parts(
            n,
            cell_dim,
            coords,
            t(&self.cell_weights),
            axes,
            self.discretization.unwrap_or(if cell_dim == n { Discretization::Volume } else { Discretization::Boundary }),
            metadata,
            symmetry,
            self.label.clone(),
        )?;
        if self.cell_radii.len() != shape.len() {
            return Err(Error::Dimension("cell_radii length differs from node count".into()));
        }
        shape.cell_radii = t(&self.cell_radii);
        shape.validate()?;
        Ok(shape)
    }

    pub fn read(path: impl AsRef<Path>) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Ok(serde_json::from_str(&text)?)
    }

    pub fn write(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, serde_json::to_string_pretty(self)?)?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{apply_linear, build_shape, ShapeSpec};

    #[test]
    fn shape_file_round_trips_bit_exactly() {
        let s: Shape<f64> =
            build_shape(&ShapeSpec::regular_polygon(5, 1.0, 100, Discretization::Boundary)).unwrap();
        let s = apply_linear(&s, &Mat::rotation2(0.1)).unwrap();
        let file = ShapeFile::from_shape(&s);
        let json = serde_json::to_string(&file).unwrap();
        let back: ShapeFile = serde_json::from_str(&json).unwrap();
        assert_eq!(back, file);
        let s2: Shape<f64> = back.to_shape().unwrap();
        assert_eq!(s2.coords(), s.coords());
        assert_eq!(s2.cell_radii(), s.cell_radii());
        assert_eq!(s2.symmetry().unwrap().order(), 10);
    }

    #[test]
    fn named_symmetry_is_written_by_name() {
        let s: Shape<f64> = build_shape(&ShapeSpec::regular_polygon(4, 1.0, 40, Discretization::Boundary)).unwrap();
        let file = ShapeFile::from_shape(&s);
        assert_eq!(file.symmetry, Some(SymmetryRepr::Name("dihedral(4)".into())));
    }
}
