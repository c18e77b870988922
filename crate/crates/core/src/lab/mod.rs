//! Experiment runner: configuration, dispatch, and machine-readable reports.
//!
//! Every experiment is deterministic for a fixed configuration and seed.
//! Cases run in order; parallelism lives inside assembly and the solver,
//! whose reductions have a fixed order.

mod experiments;
pub mod random;
mod report;
pub mod verify;

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::ShapeSpec;
use crate::kernels::KernelSpec;

pub use report::{emit_report, Cell, Report, SolveDiagnostic, Verdict, REPORT_SCHEMA};
pub use verify::{verify_all, SuiteResult};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentKind {
    Capacity,
    Deform,
    TheoremLog,
    TheoremRiesz,
    PolyaSchiffer,
    TwoCapacity,
    ConjectureVolume,
    ProblemBall,
    VerifyAll,
}

impl ExperimentKind {
    pub const ALL: [ExperimentKind; 9] = [
        Self::Capacity,
        Self::Deform,
        Self::TheoremLog,
        Self::TheoremRiesz,
        Self::PolyaSchiffer,
        Self::TwoCapacity,
        Self::ConjectureVolume,
        Self::ProblemBall,
        Self::VerifyAll,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Self::Capacity => "capacity",
            Self::Deform => "deform",
            Self::TheoremLog => "theorem_log",
            Self::TheoremRiesz => "theorem_riesz",
            Self::PolyaSchiffer => "polya_schiffer",
            Self::TwoCapacity => "two_capacity",
            Self::ConjectureVolume => "conjecture_volume",
            Self::ProblemBall => "problem_ball",
            Self::VerifyAll => "verify_all",
        }
    }

    /// Exploratory experiments report evidence and never a proof.
    pub fn is_evidence(self) -> bool {
        matches!(self, Self::ConjectureVolume | Self::ProblemBall)
    }
}

impl fmt::Display for ExperimentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ExperimentKind {
    type Err = Error;

    /// Accepts `theorem_log` and `theorem-log` alike.
    fn from_str(s: &str) -> Result<Self> {
        let key = s.replace('-', "_");
        Self::ALL
            .into_iter()
            .find(|k| k.as_str() == key)
            .ok_or_else(|| Error::Config(format!("unknown experiment {s:?}")))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RandomMatrices {
    pub count: usize,
    #[serde(default = "default_condition_cap")]
    pub condition_cap: f64,
    #[serde(default)]
    pub seed: u64,
}

fn default_condition_cap() -> f64 {
    10.0
}

/// Either a seeded random sweep or an explicit list of row-major matrices.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum MatrixSource {
    Random(RandomMatrices),
    Explicit(Vec<Vec<Vec<f64>>>),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepFamily {
    /// `I + s e₁e₂ᵀ`.
    Shear,
    /// `diag(e^s, 1, …, 1)`.
    Stretch,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub family: SweepFamily,
    pub values: Vec<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum OutputFormat {
    #[default]
    Json,
    Csv,
}

impl OutputFormat {
    pub fn extension(self) -> &'static str {
        match self {
            Self::Json => "json",
            Self::Csv => "csv",
        }
    }
}

impl FromStr for OutputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "json" => Ok(Self::Json),
            "csv" => Ok(Self::Csv),
            _ => Err(Error::Config(format!("unknown output format {s:?}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    /// Output directory.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub path: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub format: Option<OutputFormat>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: ExperimentKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub shape: Option<ShapeSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kernel: Option<KernelSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matrices: Option<MatrixSource>,
    /// Resolutions for refinement studies.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub levels: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepSpec>,
    /// Riesz exponents for `problem_ball`.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub p_values: Vec<f64>,
    /// Multiplier on the self-interaction radii (default 1).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub self_interaction_scale: Option<f64>,
    /// Relative duality-gap tolerance of every solve (default 1e-9).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub solver_tolerance: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<OutputSpec>,
}

impl ExperimentConfig {
    pub fn new(experiment: ExperimentKind) -> Self {
        Self {
            experiment,
            shape: None,
            kernel: None,
            matrices: None,
            levels: Vec::new(),
            sweep: None,
            p_values: Vec::new(),
            self_interaction_scale: None,
            solver_tolerance: None,
            output: None,
        }
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn read(path: impl AsRef<std::path::Path>) -> Result<Self> {
        let text = std::fs::read_to_string(path.as_ref())
            .map_err(|e| Error::Config(format!("{}: {e}", path.as_ref().display())))?;
        Self::from_json_str(&text)
    }

    /// Replaces the seed of a random matrix sweep; explicit lists are kept.
    pub fn with_seed(mut self, seed: u64) -> Self {
        match &mut self.matrices {
            Some(MatrixSource::Random(r)) => r.seed = seed,
            Some(MatrixSource::Explicit(_)) => {}
            None => {
                self.matrices = Some(MatrixSource::Random(RandomMatrices { count: 20, condition_cap: 10.0, seed }));
            }
        }
        self
    }
}

/// Runs one experiment. Configuration problems are `Error::Config` (or a
/// more specific validation error); per-case solver failures are recorded
/// in the report and do not abort the run.
pub fn run_experiment(config: &ExperimentConfig) -> Result<Report> {
    experiments::run(config)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn experiment_names_parse_both_ways() {
        for k in ExperimentKind::ALL {
            assert_eq!(k.as_str().parse::<ExperimentKind>().unwrap(), k);
            assert_eq!(k.as_str().replace('_', "-").parse::<ExperimentKind>().unwrap(), k);
        }
        assert!("nope".parse::<ExperimentKind>().is_err());
    }

    #[test]
    fn config_accepts_both_matrix_forms() {
        let a = ExperimentConfig::from_json_str(
            r#"{"experiment":"theorem_log","shape":{"kind":"regular_polygon","N":4,"resolution":200},
                "kernel":{"kind":"log"},"matrices":{"count":3,"seed":7}}"#,
        )
        .unwrap();
        assert!(matches!(a.matrices, Some(MatrixSource::Random(RandomMatrices { count: 3, seed: 7, .. }))));
        let b = ExperimentConfig::from_json_str(
            r#"{"experiment":"deform","matrices":[[[1,0],[0,1]]]}"#,
        )
        .unwrap();
        assert!(matches!(b.matrices, Some(MatrixSource::Explicit(ref m)) if m.len() == 1));
    }

    #[test]
    fn unknown_fields_are_config_errors() {
        assert!(matches!(
            ExperimentConfig::from_json_str(r#"{"experiment":"capacity","bogus":1}"#),
            Err(Error::Config(_))
        ));
    }
}
