use thiserror::Error;

use crate::scalar::FieldKind;

#[derive(Debug, Error, PartialEq)]
pub enum SyncError {
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("entry {index} has modulus {modulus}, expected 1")]
    NotUnitModulus { index: usize, modulus: f64 },

    #[error("entry {index} is {value}, expected -1 or +1")]
    NotSign { index: usize, value: f64 },

    #[error("column {index} has norm {norm}, expected 1")]
    NotUnitColumn { index: usize, norm: f64 },

    #[error("field kinds differ: {0:?} vs {1:?}")]
    FieldMismatch(FieldKind, FieldKind),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid observation: {0}")]
    InvalidObservation(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("matrix is not square: {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("objective has imaginary residue {residue:e} (scale {scale:e})")]
    ImaginaryResidue { residue: f64, scale: f64 },

    #[error("noise matrix unavailable; this statistic is defined for synthetic data only")]
    NoiseUnavailable,
}

pub type Result<T> = std::result::Result<T, SyncError>;
