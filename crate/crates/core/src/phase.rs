//! Phase synchronization estimators: spectral initialization, the
//! generalized power method, the MLE as a GPM fixed point, and the SDP
//! solved in its unit-column factorization.

use num_complex::Complex64;

use crate::domain::{LiftedState, MaskedObservation, PhaseVector};
use crate::error::Result;
use crate::gpm::{self, SolveDiagnostics, SolveOptions};
use crate::lifted::{self, RoundingInput};
use crate::linalg::{EigOptions, EigResult};
use crate::synth::SeedSpec;

pub use crate::lifted::{fixed_point_residual, lifted_step, sdp_objective};

pub type ComplexObservation = MaskedObservation<Complex64>;

/// Phases of the leading eigenvector of `A∘Y`. The eigensolver outcome is
/// returned alongside; a non-converged solve still yields an estimate.
pub fn spectral_init(
    obs: &ComplexObservation,
    eig: &EigOptions,
    seed: SeedSpec,
) -> Result<(PhaseVector, EigResult<Complex64>)> {
    gpm::spectral(obs, eig, seed)
}

pub fn gpm_step(obs: &ComplexObservation, z: &PhaseVector) -> Result<PhaseVector> {
    gpm::step(obs, z)
}

pub fn gpm_run(
    obs: &ComplexObservation,
    z0: &PhaseVector,
    opts: &SolveOptions,
) -> Result<(PhaseVector, SolveDiagnostics)> {
    gpm::run(obs, z0, opts)
}

/// A fixed point of the GPM map reached from `z0`; the computable stand-in
/// for the maximizer of `zᴴ(A∘Y)z` over unit-modulus vectors.
pub fn mle_fixed_point(
    obs: &ComplexObservation,
    z0: &PhaseVector,
    opts: &SolveOptions,
) -> Result<(PhaseVector, SolveDiagnostics)> {
    gpm::run(obs, z0, opts)
}

pub fn sdp_solve(
    obs: &ComplexObservation,
    v0: &LiftedState<Complex64>,
    opts: &SolveOptions,
) -> Result<(LiftedState<Complex64>, SolveDiagnostics)> {
    lifted::sdp_solve(obs, v0, opts)
}

pub fn round_to_vector(
    input: RoundingInput<'_, Complex64>,
    eig: &EigOptions,
    seed: SeedSpec,
) -> Result<(PhaseVector, EigResult<Complex64>)> {
    lifted::round(input, eig, seed)
}
