//! The lifted map on unit-column matrices and the block coordinate ascent
//! solver for `max Tr((A∘Y)VᴴV)` subject to `‖V_j‖ = 1`.
//!
//! Column `j` of the map is the normalized sum `Σ_{k≠j} A_jk conj(Y_jk) V_k`,
//! which is also the exact maximizer of the objective over `V_j` with the
//! other columns held fixed. The solver applies that maximizer column by
//! column in index order (Gauss–Seidel), so the objective never decreases,
//! and measures convergence with the simultaneous map.

use crate::domain::{LiftedState, MaskedObservation, UnitEntries};
use crate::error::{Result, SyncError};
use crate::gpm::{check_n, SolveDiagnostics, SolveOptions};
use crate::linalg;
use crate::scalar::Scalar;
use crate::synth::{self, SeedSpec, StreamTag};

/// Relative tolerance for the imaginary part of the Hermitian trace.
pub const IMAGINARY_RESIDUE_TOL: f64 = 1e-9;

/// Sweeps between full recomputations of the maintained column sums.
const REFRESH_EVERY: usize = 16;

/// Column sums `S_j = Σ_{k≠j} A_jk conj(Y_jk) V_k` restricted to the first
/// `rows` coordinates, column-major.
fn column_sums<T: Scalar>(obs: &MaskedObservation<T>, v: &[T], n: usize, rows: usize) -> Vec<T> {
    let mut s = vec![T::zero(); n * rows];
    for j in 0..n {
        let sj = &mut s[j * rows..(j + 1) * rows];
        for &(k, y) in obs.neighbors(j) {
            linalg::axpy(y.conj(), &v[k * n..k * n + rows], sj);
        }
    }
    s
}

/// One application of the simultaneous (Jacobi) map `f`.
pub fn lifted_step<T: Scalar>(obs: &MaskedObservation<T>, v: &LiftedState<T>) -> Result<LiftedState<T>> {
    let n = v.n();
    check_n(obs.n(), n)?;
    let rows = v.active_rows();
    let s = column_sums(obs, v.as_column_major(), n, rows);
    let mut out = v.as_column_major().to_vec();
    for j in 0..n {
        let sj = &s[j * rows..(j + 1) * rows];
        let norm = linalg::norm(sj);
        if norm > 0.0 {
            let inv = 1.0 / norm;
            for (o, &x) in out[j * n..j * n + rows].iter_mut().zip(sj) {
                *o = x.scale(inv);
            }
        }
    }
    LiftedState::from_column_major(n, out)
}

/// `Re Tr((A∘Y)VᴴV)`; fails if the imaginary part exceeds
/// [`IMAGINARY_RESIDUE_TOL`] relative to `Σ |A_jk Y_jk|`.
pub fn sdp_objective<T: Scalar>(obs: &MaskedObservation<T>, v: &LiftedState<T>) -> Result<f64> {
    let n = v.n();
    check_n(obs.n(), n)?;
    let rows = v.active_rows();
    let data = v.as_column_major();
    let mut acc = T::zero();
    let mut scale = 0.0;
    for j in 0..n {
        let vj = &data[j * n..j * n + rows];
        for &(k, y) in obs.neighbors(j) {
            acc += y * linalg::dot(&data[k * n..k * n + rows], vj);
            scale += y.abs();
        }
    }
    if acc.im().abs() > IMAGINARY_RESIDUE_TOL * scale.max(1.0) {
        return Err(SyncError::ImaginaryResidue {
            residue: acc.im().abs(),
            scale,
        });
    }
    Ok(acc.re())
}

/// Mean over columns of `‖V_j − f(V)_j‖`.
pub fn fixed_point_residual<T: Scalar>(obs: &MaskedObservation<T>, v: &LiftedState<T>) -> Result<f64> {
    let n = v.n();
    check_n(obs.n(), n)?;
    let rows = v.active_rows();
    let s = column_sums(obs, v.as_column_major(), n, rows);
    Ok(residual_from_sums(v.as_column_major(), &s, n, rows))
}

fn residual_from_sums<T: Scalar>(v: &[T], s: &[T], n: usize, rows: usize) -> f64 {
    let mut total = 0.0;
    for j in 0..n {
        let sj = &s[j * rows..(j + 1) * rows];
        let norm = linalg::norm(sj);
        if norm == 0.0 {
            continue;
        }
        let inv = 1.0 / norm;
        let d: f64 = v[j * n..j * n + rows]
            .iter()
            .zip(sj)
            .map(|(&a, &b)| (a - b.scale(inv)).abs_sqr())
            .sum();
        total += d.sqrt();
    }
    total / n as f64
}

fn objective_from_sums<T: Scalar>(v: &[T], s: &[T], n: usize, rows: usize) -> f64 {
    (0..n)
        .map(|j| linalg::dot(&v[j * n..j * n + rows], &s[j * rows..(j + 1) * rows]).re())
        .sum()
}

/// Block coordinate ascent from `v0`.
///
/// Each sweep replaces columns `0..n` in order by the normalized column sum
/// computed from the current values of all other columns, leaving a column
/// untouched when its sum is zero. The column sums are maintained
/// incrementally and refreshed periodically. The solve stops once the mean
/// Jacobi residual falls below `opts.tol`, confirmed on freshly computed
/// sums, or after `opts.max_iter` sweeps.
pub fn sdp_solve<T: Scalar>(
    obs: &MaskedObservation<T>,
    v0: &LiftedState<T>,
    opts: &SolveOptions,
) -> Result<(LiftedState<T>, SolveDiagnostics)> {
    let n = v0.n();
    check_n(obs.n(), n)?;
    let rows = v0.active_rows();
    let mut v = v0.as_column_major().to_vec();
    let mut s = column_sums(obs, &v, n, rows);
    let mut diag = SolveDiagnostics {
        objective_trace: vec![objective_from_sums(&v, &s, n, rows)],
        ..Default::default()
    };
    diag.fixed_point_residual = residual_from_sums(&v, &s, n, rows);
    let mut delta = vec![T::zero(); rows];

    while diag.iterations < opts.max_iter {
        diag.iterations += 1;
        for j in 0..n {
            let sj = &s[j * rows..(j + 1) * rows];
            let norm = linalg::norm(sj);
            if norm == 0.0 {
                continue;
            }
            let inv = 1.0 / norm;
            let vj = &mut v[j * n..j * n + rows];
            debug_assert!({
                // objective gain of this update is 2(‖S_j‖ − Re V_jᴴS_j)
                let gain = 2.0 * (norm - linalg::dot(vj, sj).re());
                gain >= -1e-9 * norm.max(1.0)
            });
            for ((d, x), &sx) in delta.iter_mut().zip(vj.iter_mut()).zip(sj) {
                let new = sx.scale(inv);
                *d = new - *x;
                *x = new;
            }
            // S_k gains conj(Y_kj)·Δ = Y_jk·Δ
            for &(k, y) in obs.neighbors(j) {
                linalg::axpy(y, &delta, &mut s[k * rows..(k + 1) * rows]);
            }
        }
        if diag.iterations.is_multiple_of(REFRESH_EVERY) {
            s = column_sums(obs, &v, n, rows);
        }
        let mut residual = residual_from_sums(&v, &s, n, rows);
        if residual < opts.tol {
            s = column_sums(obs, &v, n, rows);
            residual = residual_from_sums(&v, &s, n, rows);
            diag.converged = residual < opts.tol;
        }
        diag.objective_trace.push(objective_from_sums(&v, &s, n, rows));
        diag.fixed_point_residual = residual;
        if diag.converged {
            break;
        }
    }
    if !diag.converged {
        s = column_sums(obs, &v, n, rows);
        diag.fixed_point_residual = residual_from_sums(&v, &s, n, rows);
    }
    Ok((LiftedState::from_column_major(n, v)?, diag))
}

/// The embedding of `z` (column `j` = `conj(z_j)·e₁`) plus a seeded Gaussian
/// perturbation of relative size `eps` in the first `rank` coordinates,
/// with columns renormalized. `eps = 0` gives the plain embedding.
///
/// Both the map and the solver keep the column span, so the plain embedding
/// confines the solve to rank-one matrices; the perturbation lets it leave.
pub fn perturbed_embedding<Z: UnitEntries>(
    z: &Z,
    eps: f64,
    rank: usize,
    seed: SeedSpec,
) -> Result<LiftedState<Z::Scalar>> {
    let n = z.len();
    if !(eps >= 0.0 && eps.is_finite()) {
        return Err(SyncError::InvalidParameter(format!(
            "perturbation must be >= 0, got {eps}"
        )));
    }
    if eps == 0.0 {
        return LiftedState::embed(z);
    }
    let rank = rank.clamp(1, n);
    let mut rng = synth::stream(seed, StreamTag::LiftPerturbation, 0);
    let scale = eps / (rank as f64).sqrt();
    let mut data = vec![Z::Scalar::zero(); n * n];
    for j in 0..n {
        let col = &mut data[j * n..(j + 1) * n];
        for x in col[..rank].iter_mut() {
            *x = synth::standard_gaussian::<Z::Scalar, _>(&mut rng).scale(scale);
        }
        col[0] += z.value(j).conj();
        let inv = 1.0 / linalg::norm(col);
        col.iter_mut().for_each(|x| *x = x.scale(inv));
    }
    LiftedState::from_column_major(n, data)
}

/// Input to rounding: an explicit Gram matrix or a lifted state.
#[derive(Debug, Clone, Copy)]
pub enum RoundingInput<'a, T: Scalar> {
    Gram(&'a crate::linalg::SquareMatrix<T>),
    Lifted(&'a LiftedState<T>),
}

/// Entrywise normalization of the leading eigenvector of `Ẑ`; zero entries
/// map to 1.
pub fn round<Z: UnitEntries>(
    input: RoundingInput<'_, Z::Scalar>,
    eig: &linalg::EigOptions,
    seed: SeedSpec,
) -> Result<(Z, linalg::EigResult<Z::Scalar>)> {
    let lead = match input {
        RoundingInput::Gram(m) => linalg::power_iteration(m, eig, seed)?,
        RoundingInput::Lifted(v) => linalg::power_iteration(&linalg::GramOperator::new(v), eig, seed)?,
    };
    let z = Z::from_values(crate::gpm::unit_entries(&lead.vector))?;
    Ok((z, lead))
}

/// Upper bound `n − λ₁(VᴴV)` on the second eigenvalue of the Gram matrix,
/// refined by deflation when the bound alone is not below `threshold`.
pub fn second_gram_eigenvalue<T: Scalar>(v: &LiftedState<T>, threshold: f64) -> Result<f64> {
    let op = linalg::GramOperator::new(v);
    let opts = linalg::EigOptions {
        tol: 1e-12,
        max_iter: 5_000,
    };
    let seed = SeedSpec::new(0x6772_616d, 0);
    let lead = linalg::power_iteration(&op, &opts, seed)?;
    // unit diagonal: trace is n, so λ₂ ≤ n − λ₁
    let bound = (v.n() as f64 - lead.value).max(0.0);
    if bound < threshold {
        return Ok(bound);
    }
    Ok(linalg::second_eigenvalue_psd(&op, &opts, seed)?.min(bound))
}
