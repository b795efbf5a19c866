use serde::{Deserialize, Serialize};

use super::config::{Estimator, Model};

/// One estimator's outcome on one replicate. Field order is the CSV column
/// order; fields that do not apply to the model or estimator are `None`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentRecord {
    pub model: Model,
    pub n: usize,
    pub p: f64,
    pub sigma2: f64,
    pub replicate: u64,
    pub estimator: Estimator,
    pub loss_vector: Option<f64>,
    pub loss_matrix: Option<f64>,
    pub loss_z2: Option<f64>,
    pub objective: Option<f64>,
    pub iterations: u64,
    pub fixed_point_residual: Option<f64>,
    pub converged: bool,
    pub exact_recovery: Option<bool>,
    pub benchmark_vector: Option<f64>,
    pub benchmark_matrix: Option<f64>,
    pub benchmark_exp: Option<f64>,
    pub wall_time_ms: Option<f64>,
    pub master_seed: u64,
}

impl ExperimentRecord {
    /// The model's primary vector loss: `loss_vector` (phase) or `loss_z2`.
    pub fn primary_loss(&self) -> Option<f64> {
        match self.model {
            Model::Phase => self.loss_vector,
            Model::Z2 => self.loss_z2,
        }
    }
}
