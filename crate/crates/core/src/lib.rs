//! Numerical capacities of compact sets in the plane and in space, and the
//! tools for studying how they change under linear maps.
//!
//! Everything numeric is generic over [`scalar::Real`]; the aliases below fix
//! the scalar to `f64`, which is what the experiment runner uses.

pub mod equilibrium;
pub mod error;
pub mod geometry;
pub mod kernels;
pub mod lab;
pub mod matrix_tools;
pub mod quadrature;
pub mod scalar;
pub mod variation;

pub use error::{Error, Result};

pub type Shape = geometry::Shape<f64>;
pub type Measurements = geometry::Measurements<f64>;
pub type Kernel = kernels::Kernel<f64>;
pub type Mat = matrix_tools::Mat<f64>;
pub type Flow = matrix_tools::Flow<f64>;
pub type SymmetryGroup = matrix_tools::SymmetryGroup<f64>;
pub type EnergyMatrix = equilibrium::EnergyMatrix<f64>;
pub type EquilibriumResult = equilibrium::EquilibriumResult<f64>;
pub type EnergyCurve = variation::EnergyCurve<f64>;
