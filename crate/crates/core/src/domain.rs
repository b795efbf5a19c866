//! Domain types shared by every estimator.

use num_complex::Complex64;

use crate::error::{Result, SyncError};
use crate::linalg::{self, SquareMatrix};
use crate::scalar::{FieldKind, Scalar};

/// Allowed deviation of a phase entry's modulus (or a column's norm) from 1.
pub const UNIT_TOL: f64 = 1e-12;

/// Entry-wise access to a vector of group elements (phases or signs).
pub trait UnitEntries: Sized {
    type Scalar: Scalar;

    fn len(&self) -> usize;

    fn value(&self, j: usize) -> Self::Scalar;

    fn from_values(values: Vec<Self::Scalar>) -> Result<Self>;

    fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn to_values(&self) -> Vec<Self::Scalar> {
        (0..self.len()).map(|j| self.value(j)).collect()
    }
}

/// `n ≥ 2` unit-modulus complex numbers.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseVector(Vec<Complex64>);

impl PhaseVector {
    pub fn new(entries: Vec<Complex64>) -> Result<Self> {
        if entries.len() < 2 {
            return Err(SyncError::InvalidParameter(format!(
                "phase vector needs n >= 2, got {}",
                entries.len()
            )));
        }
        for (index, z) in entries.iter().enumerate() {
            let modulus = z.norm();
            if modulus.is_nan() || (modulus - 1.0).abs() > UNIT_TOL {
                return Err(SyncError::NotUnitModulus { index, modulus });
            }
        }
        Ok(Self(entries))
    }

    pub fn from_angles(angles: &[f64]) -> Result<Self> {
        Self::new(angles.iter().map(|&t| Complex64::from_polar(1.0, t)).collect())
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.0
    }

    /// Multiplies every entry by the unit scalar `c`.
    pub fn rotated(&self, c: Complex64) -> Result<Self> {
        Self::new(self.0.iter().map(|z| z * c).collect())
    }
}

impl UnitEntries for PhaseVector {
    type Scalar = Complex64;

    fn len(&self) -> usize {
        self.0.len()
    }

    fn value(&self, j: usize) -> Complex64 {
        self.0[j]
    }

    fn from_values(values: Vec<Complex64>) -> Result<Self> {
        Self::new(values)
    }
}

/// `n ≥ 2` entries in {−1, +1}.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SignVector(Vec<i8>);

impl SignVector {
    pub fn new(entries: Vec<i8>) -> Result<Self> {
        if entries.len() < 2 {
            return Err(SyncError::InvalidParameter(format!(
                "sign vector needs n >= 2, got {}",
                entries.len()
            )));
        }
        if let Some((index, &v)) = entries.iter().enumerate().find(|(_, &v)| v != 1 && v != -1) {
            return Err(SyncError::NotSign {
                index,
                value: f64::from(v),
            });
        }
        Ok(Self(entries))
    }

    pub fn entries(&self) -> &[i8] {
        &self.0
    }

    pub fn flipped(&self) -> Self {
        Self(self.0.iter().map(|s| -s).collect())
    }
}

impl UnitEntries for SignVector {
    type Scalar = f64;

    fn len(&self) -> usize {
        self.0.len()
    }

    fn value(&self, j: usize) -> f64 {
        f64::from(self.0[j])
    }

    fn from_values(values: Vec<f64>) -> Result<Self> {
        let mut out = Vec::with_capacity(values.len());
        for (index, v) in values.into_iter().enumerate() {
            if v == 1.0 {
                out.push(1);
            } else if v == -1.0 {
                out.push(-1);
            } else {
                return Err(SyncError::NotSign { index, value: v });
            }
        }
        Self::new(out)
    }
}

/// Model size, observation probability and noise level.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    pub n: usize,
    pub p: f64,
    pub sigma: f64,
}

impl ModelParams {
    pub fn new(n: usize, p: f64, sigma: f64) -> Result<Self> {
        if n < 2 {
            return Err(SyncError::InvalidParameter(format!("n must be >= 2, got {n}")));
        }
        if !(p > 0.0 && p <= 1.0) {
            return Err(SyncError::InvalidParameter(format!("p must lie in (0, 1], got {p}")));
        }
        if !(sigma >= 0.0 && sigma.is_finite()) {
            return Err(SyncError::InvalidParameter(format!("sigma must be >= 0, got {sigma}")));
        }
        Ok(Self { n, p, sigma })
    }

    pub fn from_sigma2(n: usize, p: f64, sigma2: f64) -> Result<Self> {
        if sigma2.is_nan() || sigma2 < 0.0 {
            return Err(SyncError::InvalidParameter(format!(
                "sigma2 must be >= 0, got {sigma2}"
            )));
        }
        Self::new(n, p, sigma2.sqrt())
    }

    pub fn sigma2(&self) -> f64 {
        self.sigma * self.sigma
    }
}

/// Masked pairwise data `A∘Y` together with the mask `A`.
///
/// The mask diagonal is always zero, so no estimator ever reads the data
/// diagonal. Rows are also kept as neighbor lists `(k, Y_jk)` for the
/// sparse sums every estimator performs.
#[derive(Debug, Clone)]
pub struct MaskedObservation<T: Scalar> {
    params: ModelParams,
    mask: Vec<bool>,
    data: SquareMatrix<T>,
    neighbors: Vec<Vec<(usize, T)>>,
    noise: Option<SquareMatrix<T>>,
}

impl<T: Scalar> MaskedObservation<T> {
    /// Validates the structural invariants: symmetric zero-diagonal mask,
    /// Hermitian (or symmetric) data, diagonal 1 (complex) or 0 (real),
    /// and zero data wherever the mask is off.
    pub fn new(params: ModelParams, mask: Vec<bool>, data: SquareMatrix<T>) -> Result<Self> {
        let n = params.n;
        if data.n() != n {
            return Err(SyncError::DimensionMismatch {
                expected: n,
                actual: data.n(),
            });
        }
        if mask.len() != n * n {
            return Err(SyncError::DimensionMismatch {
                expected: n * n,
                actual: mask.len(),
            });
        }
        let diag = match T::KIND {
            FieldKind::Complex => T::one(),
            FieldKind::Real => T::zero(),
        };
        let mut neighbors = vec![Vec::new(); n];
        for j in 0..n {
            if mask[j * n + j] {
                return Err(SyncError::InvalidObservation(format!("mask diagonal set at {j}")));
            }
            if data.get(j, j) != diag {
                return Err(SyncError::InvalidObservation(format!(
                    "data diagonal at {j} is {:?}, expected {diag:?}",
                    data.get(j, j)
                )));
            }
            for k in 0..n {
                if k == j {
                    continue;
                }
                let a = mask[j * n + k];
                if a != mask[k * n + j] {
                    return Err(SyncError::InvalidObservation(format!(
                        "mask not symmetric at ({j}, {k})"
                    )));
                }
                let y = data.get(j, k);
                let mirror = data.get(k, j).conj();
                if (y - mirror).abs() > 1e-12 * (1.0 + y.abs()) {
                    return Err(SyncError::InvalidObservation(format!(
                        "data not Hermitian at ({j}, {k})"
                    )));
                }
                if a {
                    neighbors[j].push((k, y));
                } else if y != T::zero() {
                    return Err(SyncError::InvalidObservation(format!(
                        "unobserved entry ({j}, {k}) is nonzero"
                    )));
                }
            }
        }
        Ok(Self {
            params,
            mask,
            data,
            neighbors,
            noise: None,
        })
    }

    /// Attaches the ground-truth noise matrix of a synthetic sample.
    pub fn with_noise(mut self, noise: SquareMatrix<T>) -> Result<Self> {
        if noise.n() != self.n() {
            return Err(SyncError::DimensionMismatch {
                expected: self.n(),
                actual: noise.n(),
            });
        }
        self.noise = Some(noise);
        Ok(self)
    }

    pub fn kind(&self) -> FieldKind {
        T::KIND
    }

    pub fn n(&self) -> usize {
        self.params.n
    }

    pub fn params(&self) -> &ModelParams {
        &self.params
    }

    pub fn mask(&self, j: usize, k: usize) -> bool {
        self.mask[j * self.n() + k]
    }

    pub fn mask_slice(&self) -> &[bool] {
        &self.mask
    }

    pub fn data(&self) -> &SquareMatrix<T> {
        &self.data
    }

    /// Observed `(k, Y_jk)` pairs of row `j`, `k ≠ j`, in increasing `k`.
    pub fn neighbors(&self, j: usize) -> &[(usize, T)] {
        &self.neighbors[j]
    }

    pub fn noise(&self) -> Option<&SquareMatrix<T>> {
        self.noise.as_ref()
    }

    /// Number of observed unordered pairs.
    pub fn edge_count(&self) -> usize {
        self.neighbors.iter().map(Vec::len).sum::<usize>() / 2
    }

    /// `A∘Y` as a dense matrix with zero diagonal.
    pub fn masked_matrix(&self) -> SquareMatrix<T> {
        let n = self.n();
        let mut m = SquareMatrix::zeros(n);
        for j in 0..n {
            for &(k, y) in self.neighbors(j) {
                m.set(j, k, y);
            }
        }
        m
    }

    /// `zᴴ(A∘Y)z` for a vector estimate.
    pub fn quadratic_form(&self, z: &[T]) -> f64 {
        let mut acc = T::zero();
        for (j, zj) in z.iter().enumerate() {
            let mut row = T::zero();
            for &(k, y) in self.neighbors(j) {
                row += y * z[k];
            }
            acc += zj.conj() * row;
        }
        acc.re()
    }
}

/// `n` unit-norm columns of length `n`; `gram()` gives the SDP variable `VᴴV`.
///
/// Stored column-major so each column is contiguous.
#[derive(Debug, Clone, PartialEq)]
pub struct LiftedState<T: Scalar> {
    n: usize,
    data: Vec<T>,
}

impl<T: Scalar> LiftedState<T> {
    /// Builds from column-major storage, checking every column norm.
    pub fn from_column_major(n: usize, data: Vec<T>) -> Result<Self> {
        if data.len() != n * n {
            return Err(SyncError::DimensionMismatch {
                expected: n * n,
                actual: data.len(),
            });
        }
        if n < 2 {
            return Err(SyncError::InvalidParameter(format!(
                "lifted state needs n >= 2, got {n}"
            )));
        }
        for index in 0..n {
            let norm = linalg::norm(&data[index * n..(index + 1) * n]);
            if norm.is_nan() || (norm - 1.0).abs() > UNIT_TOL {
                return Err(SyncError::NotUnitColumn { index, norm });
            }
        }
        Ok(Self { n, data })
    }

    pub fn from_columns(columns: Vec<Vec<T>>) -> Result<Self> {
        let n = columns.len();
        let mut data = Vec::with_capacity(n * n);
        for c in &columns {
            if c.len() != n {
                return Err(SyncError::DimensionMismatch {
                    expected: n,
                    actual: c.len(),
                });
            }
            data.extend_from_slice(c);
        }
        Self::from_column_major(n, data)
    }

    /// Column `j` equals `conj(z_j)·e₁`.
    pub fn embed<Z: UnitEntries<Scalar = T>>(z: &Z) -> Result<Self> {
        let n = z.len();
        let mut data = vec![T::zero(); n * n];
        for j in 0..n {
            data[j * n] = z.value(j).conj();
        }
        Self::from_column_major(n, data)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn kind(&self) -> FieldKind {
        T::KIND
    }

    pub fn column(&self, j: usize) -> &[T] {
        &self.data[j * self.n..(j + 1) * self.n]
    }

    pub fn columns(&self) -> impl Iterator<Item = &[T]> {
        self.data.chunks_exact(self.n)
    }

    pub fn as_column_major(&self) -> &[T] {
        &self.data
    }

    pub fn into_column_major(self) -> Vec<T> {
        self.data
    }

    /// One past the largest coordinate index that is nonzero in any column.
    /// Rows beyond it stay zero under every column update.
    pub fn active_rows(&self) -> usize {
        let n = self.n;
        let mut active = 0;
        for col in self.columns() {
            if let Some(last) = col.iter().rposition(|x| *x != T::zero()) {
                active = active.max(last + 1);
            }
            if active == n {
                break;
            }
        }
        active
    }

    pub fn gram(&self) -> SquareMatrix<T> {
        linalg::gram(self)
    }
}

/// Loss value together with the optimal aligner.
#[derive(Debug, Clone, PartialEq)]
pub struct AlignmentResult<A> {
    pub loss: f64,
    pub aligner: A,
}
