use std::fmt;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::{HarnessError, HarnessResult};
use crate::domain::ModelParams;
use crate::gpm::SolveOptions;
use crate::linalg::EigOptions;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Model {
    Phase,
    Z2,
}

impl fmt::Display for Model {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Model::Phase => "phase",
            Model::Z2 => "z2",
        })
    }
}

impl std::str::FromStr for Model {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "phase" => Ok(Model::Phase),
            "z2" => Ok(Model::Z2),
            other => Err(format!("unknown model {other:?} (expected phase or z2)")),
        }
    }
}

/// Estimators in the order records are sorted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Estimator {
    Spectral,
    Gpm,
    Sdp,
    Mle,
}

impl Estimator {
    pub const ALL: [Estimator; 4] = [Estimator::Spectral, Estimator::Gpm, Estimator::Sdp, Estimator::Mle];
}

impl fmt::Display for Estimator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Estimator::Spectral => "spectral",
            Estimator::Gpm => "gpm",
            Estimator::Sdp => "sdp",
            Estimator::Mle => "mle",
        })
    }
}

impl std::str::FromStr for Estimator {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "spectral" => Ok(Estimator::Spectral),
            "gpm" => Ok(Estimator::Gpm),
            "sdp" => Ok(Estimator::Sdp),
            "mle" => Ok(Estimator::Mle),
            other => Err(format!("unknown estimator {other:?}")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Csv,
    Jsonl,
}

impl std::str::FromStr for OutputFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "csv" => Ok(OutputFormat::Csv),
            "jsonl" => Ok(OutputFormat::Jsonl),
            other => Err(format!("unknown format {other:?} (expected csv or jsonl)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridPoint {
    pub n: usize,
    pub p: f64,
    pub sigma2: f64,
}

impl GridPoint {
    pub fn params(&self) -> HarnessResult<ModelParams> {
        Ok(ModelParams::from_sigma2(self.n, self.p, self.sigma2)?)
    }
}

/// Iteration caps and tolerances; every field is optional in the file.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Tolerances {
    /// Fixed-point tolerance (mean column residual for the SDP, RMS step for GPM).
    pub tol: f64,
    pub max_sweeps: usize,
    pub max_iter: usize,
    pub eig_tol: f64,
    pub eig_max_iter: usize,
    /// Relative size of the perturbation added to the spectral lift.
    pub lift_perturbation: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            tol: 1e-8,
            max_sweeps: 200,
            max_iter: 200,
            eig_tol: 1e-10,
            eig_max_iter: 20_000,
            lift_perturbation: 1e-2,
        }
    }
}

impl Tolerances {
    pub fn sdp(&self) -> SolveOptions {
        SolveOptions {
            max_iter: self.max_sweeps,
            tol: self.tol,
        }
    }

    pub fn gpm(&self) -> SolveOptions {
        SolveOptions {
            max_iter: self.max_iter,
            tol: self.tol,
        }
    }

    pub fn eig(&self) -> EigOptions {
        EigOptions {
            tol: self.eig_tol,
            max_iter: self.eig_max_iter,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    pub path: PathBuf,
    pub format: OutputFormat,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub model: Model,
    pub grid: Vec<GridPoint>,
    pub estimators: Vec<Estimator>,
    pub replicates: u64,
    pub master_seed: u64,
    #[serde(default)]
    pub tolerances: Tolerances,
    pub output: OutputSpec,
    /// Worker threads; 0 uses the rayon default.
    #[serde(default)]
    pub workers: usize,
    /// Wall time varies between runs, so it is left empty unless requested.
    #[serde(default)]
    pub record_wall_time: bool,
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> HarnessResult<Self> {
        let cfg: Self = serde_json::from_str(text).map_err(|e| HarnessError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> HarnessResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| HarnessError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_json(&text).map_err(|e| match e {
            HarnessError::Config(msg) => HarnessError::Config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    pub fn validate(&self) -> HarnessResult<()> {
        if self.grid.is_empty() {
            return Err(HarnessError::Config("grid is empty".into()));
        }
        for point in &self.grid {
            point
                .params()
                .map_err(|e| HarnessError::Config(format!("grid point {point:?}: {e}")))?;
        }
        if self.estimators.is_empty() {
            return Err(HarnessError::Config("no estimators requested".into()));
        }
        if self.replicates < 1 {
            return Err(HarnessError::Config("replicates must be >= 1".into()));
        }
        let t = &self.tolerances;
        if t.tol.is_nan() || t.tol <= 0.0 || t.eig_tol.is_nan() || t.eig_tol <= 0.0 {
            return Err(HarnessError::Config("tolerances must be positive".into()));
        }
        if !(t.lift_perturbation >= 0.0 && t.lift_perturbation.is_finite()) {
            return Err(HarnessError::Config("lift_perturbation must be >= 0".into()));
        }
        Ok(())
    }
}
