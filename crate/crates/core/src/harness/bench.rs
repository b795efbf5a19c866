use serde::Serialize;

use super::config::Model;

/// Minimax benchmark rates for one grid point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Benchmarks {
    /// `σ²/(2np)`, phase vector loss.
    pub vector: Option<f64>,
    /// `σ²/(np)`, phase matrix loss.
    pub matrix: Option<f64>,
    /// `exp(−np/(2σ²))`, Z₂ misclassification loss.
    pub exp_rate: Option<f64>,
    /// `np/(2 ln n)`, the Z₂ exact-recovery noise threshold.
    pub exact_recovery_threshold_sigma2: Option<f64>,
}

pub fn theoretical_benchmarks(n: usize, p: f64, sigma2: f64, model: Model) -> Benchmarks {
    let np = n as f64 * p;
    match model {
        Model::Phase => Benchmarks {
            vector: Some(sigma2 / (2.0 * np)),
            matrix: Some(sigma2 / np),
            exp_rate: None,
            exact_recovery_threshold_sigma2: None,
        },
        Model::Z2 => Benchmarks {
            vector: None,
            matrix: None,
            exp_rate: Some(if sigma2 > 0.0 {
                (-np / (2.0 * sigma2)).exp()
            } else {
                0.0
            }),
            exact_recovery_threshold_sigma2: Some(np / (2.0 * (n as f64).ln())),
        },
    }
}
