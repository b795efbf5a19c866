//! Alignment losses between estimates and ground truth.
//!
//! All three losses are minimized over the global symmetry of the problem
//! (a unit scalar for vectors, a unit vector for lifted states) and have
//! closed forms in terms of a single aligning sum.

use num_complex::Complex64;

use crate::domain::{AlignmentResult, LiftedState, PhaseVector, SignVector, UnitEntries};
use crate::error::{Result, SyncError};
use crate::linalg::{self, SquareMatrix};
use crate::scalar::Scalar;

fn check_len(expected: usize, actual: usize) -> Result<()> {
    if expected != actual {
        return Err(SyncError::DimensionMismatch { expected, actual });
    }
    Ok(())
}

/// `min_{|a|=1} (1/n) Σ |ẑ_j − z_j a|² = 2(1 − |zᴴẑ|/n)`.
///
/// The aligner is `zᴴẑ / |zᴴẑ|`, or 1 when the sum vanishes.
pub fn loss_vector(z_hat: &PhaseVector, z_ref: &PhaseVector) -> Result<AlignmentResult<Complex64>> {
    aligned_vector_loss(z_hat, z_ref)
}

/// Same closed form for any pair of unit-entry vectors; for signs the
/// aligner is ±1.
pub fn aligned_vector_loss<Z: UnitEntries>(z_hat: &Z, z_ref: &Z) -> Result<AlignmentResult<Z::Scalar>> {
    let n = z_ref.len();
    check_len(n, z_hat.len())?;
    let s = (0..n).fold(Z::Scalar::zero(), |acc, j| acc + z_ref.value(j).conj() * z_hat.value(j));
    let m = s.abs();
    if m == 0.0 {
        return Ok(AlignmentResult {
            loss: 2.0,
            aligner: Z::Scalar::one(),
        });
    }
    let loss = (2.0 * (1.0 - m / n as f64)).clamp(0.0, 4.0);
    Ok(AlignmentResult {
        loss,
        aligner: s.scale(1.0 / m),
    })
}

/// `min_{‖a‖=1} (1/n) Σ ‖V_j − conj(z_j) a‖² = 2(1 − ‖m‖)` with
/// `m = (1/n) Σ z_j V_j`. The aligner is `m/‖m‖`, `None` when `m = 0`.
pub fn loss_lifted<Z: UnitEntries>(
    v: &LiftedState<Z::Scalar>,
    z_ref: &Z,
) -> Result<AlignmentResult<Option<Vec<Z::Scalar>>>> {
    let m = lifted_mean(v, z_ref)?;
    let norm = linalg::norm(&m);
    if norm == 0.0 {
        return Ok(AlignmentResult {
            loss: 2.0,
            aligner: None,
        });
    }
    let loss = (2.0 * (1.0 - norm)).clamp(0.0, 4.0);
    let inv = 1.0 / norm;
    Ok(AlignmentResult {
        loss,
        aligner: Some(m.into_iter().map(|x| x.scale(inv)).collect()),
    })
}

/// `m = (1/n) Σ_j z_j V_j`.
pub fn lifted_mean<Z: UnitEntries>(v: &LiftedState<Z::Scalar>, z_ref: &Z) -> Result<Vec<Z::Scalar>> {
    let n = v.n();
    check_len(n, z_ref.len())?;
    let mut m = vec![Z::Scalar::zero(); n];
    for (j, col) in v.columns().enumerate() {
        linalg::axpy(z_ref.value(j), col, &mut m);
    }
    let inv = 1.0 / n as f64;
    m.iter_mut().for_each(|x| *x = x.scale(inv));
    Ok(m)
}

/// `(1/n²) Σ_{j,k} |Ẑ_jk − z_j conj(z_k)|²`.
pub fn loss_matrix<Z: UnitEntries>(z_hat: &SquareMatrix<Z::Scalar>, z_ref: &Z) -> Result<f64> {
    let n = z_ref.len();
    check_len(n, z_hat.n())?;
    let z = z_ref.to_values();
    let mut acc = 0.0;
    for (j, zj) in z.iter().enumerate() {
        for (k, zk) in z.iter().enumerate() {
            acc += (z_hat.get(j, k) - *zj * zk.conj()).abs_sqr();
        }
    }
    Ok(acc / (n * n) as f64)
}

/// Misclassification loss `4·min(h, 1 − h)`, `h` the disagreement fraction.
pub fn loss_z2(z_hat: &SignVector, z_ref: &SignVector) -> Result<f64> {
    let n = z_ref.len();
    check_len(n, z_hat.len())?;
    let disagree = z_hat
        .entries()
        .iter()
        .zip(z_ref.entries())
        .filter(|(a, b)| a != b)
        .count();
    Ok(4.0 * disagree.min(n - disagree) as f64 / n as f64)
}

// Slack for rounding in the normalization bound below.
const BOUND_ABS_SLACK: f64 = 1e-14;
const BOUND_REL_SLACK: f64 = 1e-12;

/// Checks `‖x/‖x‖ − y‖² ≤ (‖(I − yyᴴ)x‖² + |Im yᴴx|²) / |Re yᴴx|²`
/// for unit `y` with `Re(yᴴx) > 0`. The real case drops the imaginary term
/// automatically.
pub fn ratio_bound_check<T: Scalar>(x: &[T], y: &[T]) -> Result<bool> {
    check_len(y.len(), x.len())?;
    let ny = linalg::norm(y);
    if (ny - 1.0).abs() > 1e-12 {
        return Err(SyncError::Precondition(format!("y must have unit norm, got {ny}")));
    }
    let yx = linalg::dot(y, x);
    if yx.re().is_nan() || yx.re() <= 0.0 {
        return Err(SyncError::Precondition(format!(
            "Re(yᴴx) must be positive, got {}",
            yx.re()
        )));
    }
    let nx = linalg::norm(x);
    let lhs: f64 = x
        .iter()
        .zip(y)
        .map(|(&xi, &yi)| (xi.scale(1.0 / nx) - yi).abs_sqr())
        .sum();
    let perp: f64 = x.iter().zip(y).map(|(&xi, &yi)| (xi - yi * yx).abs_sqr()).sum();
    let rhs = (perp + yx.im() * yx.im()) / (yx.re() * yx.re());
    Ok(lhs <= rhs + BOUND_ABS_SLACK + BOUND_REL_SLACK * rhs)
}

/// Scalar form: `|x/|x| − 1|² ≤ |Im x|² / |Re x|²` for `Re x > 0`.
pub fn ratio_bound_check_scalar(x: Complex64) -> Result<bool> {
    ratio_bound_check(&[x], &[Complex64::new(1.0, 0.0)])
}
