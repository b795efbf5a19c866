//! Z₂ synchronization: the real-valued counterparts of the phase
//! estimators, exact-recovery detection and the `U_j` noise statistic.

use crate::domain::{LiftedState, MaskedObservation, SignVector, UnitEntries};
use crate::error::{Result, SyncError};
use crate::gpm::{self, SolveDiagnostics, SolveOptions};
use crate::lifted::{self, RoundingInput};
use crate::linalg::{EigOptions, EigResult, SquareMatrix};
use crate::loss::loss_matrix;
use crate::synth::SeedSpec;

pub type RealObservation = MaskedObservation<f64>;

/// Matrix-loss threshold below which the Gram matrix counts as `z*z*ᵀ`.
pub const EXACT_LOSS_TOL: f64 = 1e-10;
/// Second Gram eigenvalue must be below this multiple of `n`.
pub const EXACT_SECOND_EIG_FACTOR: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq)]
pub struct Z2Diagnostics {
    pub solve: SolveDiagnostics,
    /// `U_j` values when the observation carries its noise matrix.
    pub u_stats: Option<Vec<f64>>,
}

impl Z2Diagnostics {
    /// Number of `|U_j|` above `threshold`; `None` without noise.
    pub fn exceed_count(&self, threshold: f64) -> Option<usize> {
        self.u_stats
            .as_ref()
            .map(|u| u.iter().filter(|x| x.abs() > threshold).count())
    }
}

pub fn spectral_init_z2(
    obs: &RealObservation,
    eig: &EigOptions,
    seed: SeedSpec,
) -> Result<(SignVector, EigResult<f64>)> {
    gpm::spectral(obs, eig, seed)
}

/// `z'_j = sign(Σ_{k≠j} A_jk Y_jk z_k)`, unchanged when the sum is zero.
pub fn gpm_step_z2(obs: &RealObservation, z: &SignVector) -> Result<SignVector> {
    gpm::step(obs, z)
}

pub fn gpm_run_z2(
    obs: &RealObservation,
    z0: &SignVector,
    opts: &SolveOptions,
) -> Result<(SignVector, SolveDiagnostics)> {
    gpm::run(obs, z0, opts)
}

pub fn mle_fixed_point_z2(
    obs: &RealObservation,
    z0: &SignVector,
    opts: &SolveOptions,
) -> Result<(SignVector, SolveDiagnostics)> {
    gpm::run(obs, z0, opts)
}

/// Real block coordinate ascent; `U_j` is attached when `z_star` is given
/// and the observation is synthetic.
pub fn sdp_solve_z2(
    obs: &RealObservation,
    v0: &LiftedState<f64>,
    opts: &SolveOptions,
    z_star: Option<&SignVector>,
) -> Result<(LiftedState<f64>, Z2Diagnostics)> {
    let (v, solve) = lifted::sdp_solve(obs, v0, opts)?;
    let u_stats = match (z_star, obs.noise()) {
        (Some(z), Some(w)) => Some(u_statistic(obs, Some(w), z)?),
        _ => None,
    };
    Ok((v, Z2Diagnostics { solve, u_stats }))
}

pub fn round_to_signs(
    input: RoundingInput<'_, f64>,
    eig: &EigOptions,
    seed: SeedSpec,
) -> Result<(SignVector, EigResult<f64>)> {
    lifted::round(input, eig, seed)
}

/// Whether `V̂ᵀV̂` equals `z*z*ᵀ`: matrix loss below [`EXACT_LOSS_TOL`] and
/// second eigenvalue below [`EXACT_SECOND_EIG_FACTOR`]`·n`.
pub fn exact_recovery(v_hat: &LiftedState<f64>, z_star: &SignVector) -> Result<bool> {
    let gram: SquareMatrix<f64> = v_hat.gram();
    if loss_matrix(&gram, z_star)? >= EXACT_LOSS_TOL {
        return Ok(false);
    }
    let threshold = EXACT_SECOND_EIG_FACTOR * v_hat.n() as f64;
    Ok(lifted::second_gram_eigenvalue(v_hat, threshold)? < threshold)
}

/// `U_j = σ/((n−1)p) · Σ_{k≠j} z*_k A_jk W_jk`. Needs the noise matrix,
/// so it is only defined for synthetic observations.
pub fn u_statistic(obs: &RealObservation, noise: Option<&SquareMatrix<f64>>, z_star: &SignVector) -> Result<Vec<f64>> {
    let w = noise.ok_or(SyncError::NoiseUnavailable)?;
    let n = obs.n();
    gpm::check_n(n, z_star.len())?;
    gpm::check_n(n, w.n())?;
    let params = obs.params();
    let scale = params.sigma / ((n - 1) as f64 * params.p);
    Ok((0..n)
        .map(|j| {
            let s: f64 = obs
                .neighbors(j)
                .iter()
                .map(|&(k, _)| z_star.value(k) * w.get(j, k))
                .sum();
            scale * s
        })
        .collect())
}
