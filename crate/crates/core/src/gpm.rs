//! Entrywise-normalized power iteration shared by the phase and Z₂ models.

use crate::domain::{MaskedObservation, UnitEntries};
use crate::error::{Result, SyncError};
use crate::linalg;
use crate::scalar::Scalar;

/// Stopping rule for the iterative solvers. For the SDP solver `max_iter`
/// counts full sweeps over the columns.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveOptions {
    pub max_iter: usize,
    pub tol: f64,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            max_iter: 200,
            tol: 1e-8,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct SolveDiagnostics {
    /// Objective at the start and after every iteration or sweep.
    pub objective_trace: Vec<f64>,
    pub fixed_point_residual: f64,
    pub iterations: usize,
    pub converged: bool,
}

impl SolveDiagnostics {
    pub fn final_objective(&self) -> f64 {
        self.objective_trace.last().copied().unwrap_or(f64::NAN)
    }

    /// Whether the trace never drops by more than `rel_tol` relative.
    pub fn is_nondecreasing(&self, rel_tol: f64) -> bool {
        self.objective_trace
            .windows(2)
            .all(|w| w[1] >= w[0] - rel_tol * w[0].abs().max(1.0))
    }
}

pub(crate) fn check_n(expected: usize, actual: usize) -> Result<()> {
    if expected != actual {
        return Err(SyncError::DimensionMismatch { expected, actual });
    }
    Ok(())
}

/// `z'_j = s_j/|s_j|` with `s_j = Σ_{k≠j} A_jk Y_jk z_k`; `z'_j = z_j` when `s_j = 0`.
pub fn step_values<T: Scalar>(obs: &MaskedObservation<T>, z: &[T]) -> Vec<T> {
    z.iter()
        .enumerate()
        .map(|(j, &zj)| {
            let s = obs.neighbors(j).iter().fold(T::zero(), |acc, &(k, y)| acc + y * z[k]);
            let m = s.abs();
            if m == 0.0 {
                zj
            } else {
                s.div_real(m)
            }
        })
        .collect()
}

pub fn step<Z: UnitEntries>(obs: &MaskedObservation<Z::Scalar>, z: &Z) -> Result<Z> {
    check_n(obs.n(), z.len())?;
    Z::from_values(step_values(obs, &z.to_values()))
}

/// RMS distance `min_{|a|=1} ‖x − a y‖/√n`.
pub fn aligned_rms<T: Scalar>(x: &[T], y: &[T]) -> f64 {
    linalg::aligned_distance(y, x) / (x.len() as f64).sqrt()
}

/// Raw RMS distance `‖x − y‖/√n`.
pub fn rms<T: Scalar>(x: &[T], y: &[T]) -> f64 {
    let s: f64 = x.iter().zip(y).map(|(&a, &b)| (a - b).abs_sqr()).sum();
    (s / x.len() as f64).sqrt()
}

/// Iterates [`step`] until consecutive iterates agree up to a global unit
/// scalar within `tol` (RMS) or `max_iter` steps. The reported residual is
/// the raw RMS move of one further step from the returned iterate.
pub fn run<Z: UnitEntries>(
    obs: &MaskedObservation<Z::Scalar>,
    z0: &Z,
    opts: &SolveOptions,
) -> Result<(Z, SolveDiagnostics)> {
    check_n(obs.n(), z0.len())?;
    let mut z = z0.to_values();
    let mut diag = SolveDiagnostics {
        objective_trace: vec![obs.quadratic_form(&z)],
        ..Default::default()
    };
    while diag.iterations < opts.max_iter {
        let next = step_values(obs, &z);
        diag.iterations += 1;
        let moved = aligned_rms(&next, &z);
        z = next;
        diag.objective_trace.push(obs.quadratic_form(&z));
        if moved < opts.tol {
            diag.converged = true;
            break;
        }
    }
    diag.fixed_point_residual = rms(&step_values(obs, &z), &z);
    Ok((Z::from_values(z)?, diag))
}

/// Normalizes each entry to the unit circle (or to ±1); zeros map to 1.
pub fn unit_entries<T: Scalar>(v: &[T]) -> Vec<T> {
    v.iter()
        .map(|&x| {
            let m = x.abs();
            if m == 0.0 {
                T::one()
            } else {
                x.div_real(m)
            }
        })
        .collect()
}

/// Entrywise normalization of the leading eigenvector of `A∘Y`.
pub fn spectral<Z: UnitEntries>(
    obs: &MaskedObservation<Z::Scalar>,
    eig: &linalg::EigOptions,
    seed: crate::synth::SeedSpec,
) -> Result<(Z, linalg::EigResult<Z::Scalar>)> {
    let lead = linalg::power_iteration(obs, eig, seed)?;
    let z = Z::from_values(unit_entries(&lead.vector))?;
    Ok((z, lead))
}
