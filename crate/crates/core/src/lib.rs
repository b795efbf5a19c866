//! Phase and Z₂ synchronization estimators.
//!
//! The crate recovers unit-modulus complex numbers (or signs) from noisy,
//! partially observed pairwise products `z_j * conj(z_k)`. Four estimators
//! are provided for each model:
//!
//! * spectral initialization (entrywise phase of the leading eigenvector),
//! * the generalized power method (GPM),
//! * the maximum likelihood estimator, computed as a fixed point of the GPM map,
//! * the semidefinite relaxation, solved through its unit-column factorization
//!   `Z = VᴴV` with sequential column updates and rounded back to a vector.
//!
//! [`synth`] samples the observation model from counter-based seeded streams
//! and [`harness`] runs Monte Carlo grids and writes CSV or JSONL records.

pub mod domain;
pub mod error;
pub mod gpm;
pub mod harness;
pub mod lifted;
pub mod linalg;
pub mod loss;
pub mod phase;
pub mod scalar;
pub mod synth;
pub mod z2;

pub use domain::{AlignmentResult, LiftedState, MaskedObservation, ModelParams, PhaseVector, SignVector, UnitEntries};
pub use error::{Result, SyncError};
pub use scalar::{FieldKind, Scalar};
pub use synth::SeedSpec;
