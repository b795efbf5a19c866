//! Dense Hermitian linear algebra: products, Gram matrices and a shifted
//! power iteration for the leading eigenpair.

use crate::domain::{LiftedState, MaskedObservation};
use crate::error::{Result, SyncError};
use crate::scalar::Scalar;
use crate::synth::{self, SeedSpec, StreamTag};

/// Inner product `xᴴy`.
#[inline]
pub fn dot<T: Scalar>(x: &[T], y: &[T]) -> T {
    x.iter().zip(y).fold(T::zero(), |acc, (&a, &b)| acc + a.conj() * b)
}

#[inline]
pub fn norm_sqr<T: Scalar>(x: &[T]) -> f64 {
    x.iter().map(|v| v.abs_sqr()).sum()
}

#[inline]
pub fn norm<T: Scalar>(x: &[T]) -> f64 {
    norm_sqr(x).sqrt()
}

/// `y += a·x`
#[inline]
pub fn axpy<T: Scalar>(a: T, x: &[T], y: &mut [T]) {
    for (yi, &xi) in y.iter_mut().zip(x) {
        *yi += a * xi;
    }
}

/// Row-major square matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct SquareMatrix<T> {
    n: usize,
    data: Vec<T>,
}

impl<T: Scalar> SquareMatrix<T> {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![T::zero(); n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for j in 0..n {
            m.set(j, j, T::one());
        }
        m
    }

    pub fn from_row_major(n: usize, data: Vec<T>) -> Result<Self> {
        if data.len() != n * n {
            return Err(SyncError::DimensionMismatch {
                expected: n * n,
                actual: data.len(),
            });
        }
        Ok(Self { n, data })
    }

    pub fn from_rows(rows: Vec<Vec<T>>) -> Result<Self> {
        let n = rows.len();
        let mut data = Vec::with_capacity(n * n);
        for row in rows {
            if row.len() != n {
                return Err(SyncError::NotSquare {
                    rows: n,
                    cols: row.len(),
                });
            }
            data.extend(row);
        }
        Ok(Self { n, data })
    }

    /// `x xᴴ`
    pub fn outer(x: &[T]) -> Self {
        let n = x.len();
        let mut data = Vec::with_capacity(n * n);
        for &a in x {
            data.extend(x.iter().map(|&b| a * b.conj()));
        }
        Self { n, data }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, j: usize, k: usize) -> T {
        self.data[j * self.n + k]
    }

    #[inline]
    pub fn set(&mut self, j: usize, k: usize, v: T) {
        self.data[j * self.n + k] = v;
    }

    pub fn row(&self, j: usize) -> &[T] {
        &self.data[j * self.n..(j + 1) * self.n]
    }

    pub fn as_row_major(&self) -> &[T] {
        &self.data
    }

    /// Lower bound on the smallest eigenvalue from Gershgorin discs.
    pub fn gershgorin_lower_bound(&self) -> f64 {
        (0..self.n)
            .map(|j| {
                let off: f64 = self
                    .row(j)
                    .iter()
                    .enumerate()
                    .filter(|&(k, _)| k != j)
                    .map(|(_, v)| v.abs())
                    .sum();
                self.get(j, j).re() - off
            })
            .fold(f64::INFINITY, f64::min)
    }
}

/// Dense product `Mx`.
pub fn matvec<T: Scalar>(m: &SquareMatrix<T>, x: &[T]) -> Result<Vec<T>> {
    if x.len() != m.n() {
        return Err(SyncError::DimensionMismatch {
            expected: m.n(),
            actual: x.len(),
        });
    }
    Ok((0..m.n())
        .map(|j| m.row(j).iter().zip(x).fold(T::zero(), |acc, (&a, &b)| acc + a * b))
        .collect())
}

/// `VᴴV`, Hermitian with unit diagonal.
pub fn gram<T: Scalar>(v: &LiftedState<T>) -> SquareMatrix<T> {
    let n = v.n();
    let r = v.active_rows();
    let mut g = SquareMatrix::zeros(n);
    for j in 0..n {
        let vj = &v.column(j)[..r];
        for k in j..n {
            let x = dot(vj, &v.column(k)[..r]);
            g.set(j, k, x);
            g.set(k, j, x.conj());
        }
    }
    g
}

/// A Hermitian operator accessible through products.
pub trait HermitianOperator<T: Scalar> {
    fn dim(&self) -> usize;

    /// `out = M x`
    fn apply(&self, x: &[T], out: &mut [T]);

    /// Any lower bound on the smallest eigenvalue.
    fn spectrum_lower_bound(&self) -> f64;
}

impl<T: Scalar> HermitianOperator<T> for SquareMatrix<T> {
    fn dim(&self) -> usize {
        self.n
    }

    fn apply(&self, x: &[T], out: &mut [T]) {
        for (j, o) in out.iter_mut().enumerate() {
            *o = self.row(j).iter().zip(x).fold(T::zero(), |acc, (&a, &b)| acc + a * b);
        }
    }

    fn spectrum_lower_bound(&self) -> f64 {
        self.gershgorin_lower_bound()
    }
}

/// `A∘Y` with zero diagonal, applied through neighbor lists.
impl<T: Scalar> HermitianOperator<T> for MaskedObservation<T> {
    fn dim(&self) -> usize {
        self.n()
    }

    fn apply(&self, x: &[T], out: &mut [T]) {
        for (j, o) in out.iter_mut().enumerate() {
            *o = self.neighbors(j).iter().fold(T::zero(), |acc, &(k, y)| acc + y * x[k]);
        }
    }

    fn spectrum_lower_bound(&self) -> f64 {
        (0..self.n())
            .map(|j| -self.neighbors(j).iter().map(|(_, y)| y.abs()).sum::<f64>())
            .fold(f64::INFINITY, f64::min)
    }
}

/// `VᴴV` applied as `Vᴴ(Vx)` without forming the Gram matrix.
pub struct GramOperator<'a, T: Scalar> {
    state: &'a LiftedState<T>,
    rows: usize,
}

impl<'a, T: Scalar> GramOperator<'a, T> {
    pub fn new(state: &'a LiftedState<T>) -> Self {
        Self {
            state,
            rows: state.active_rows(),
        }
    }
}

impl<T: Scalar> HermitianOperator<T> for GramOperator<'_, T> {
    fn dim(&self) -> usize {
        self.state.n()
    }

    fn apply(&self, x: &[T], out: &mut [T]) {
        let r = self.rows;
        let mut vx = vec![T::zero(); r];
        for (col, &xj) in self.state.columns().zip(x) {
            axpy(xj, &col[..r], &mut vx);
        }
        for (o, col) in out.iter_mut().zip(self.state.columns()) {
            *o = dot(&col[..r], &vx);
        }
    }

    fn spectrum_lower_bound(&self) -> f64 {
        0.0
    }
}

/// `M − λ v vᴴ` for a computed leading pair of a PSD operator.
struct Deflated<'a, T: Scalar, O: HermitianOperator<T>> {
    inner: &'a O,
    value: f64,
    vector: &'a [T],
}

impl<T: Scalar, O: HermitianOperator<T>> HermitianOperator<T> for Deflated<'_, T, O> {
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    fn apply(&self, x: &[T], out: &mut [T]) {
        self.inner.apply(x, out);
        let c = dot(self.vector, x).scale(self.value);
        axpy(-c, self.vector, out);
    }

    fn spectrum_lower_bound(&self) -> f64 {
        0.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EigOptions {
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for EigOptions {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            max_iter: 20_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EigResult<T> {
    pub value: f64,
    pub vector: Vec<T>,
    pub iterations: usize,
    /// `‖Mv − λv‖`, recomputed after the last iterate.
    pub residual: f64,
    pub converged: bool,
    /// Residuals recorded every [`CHECKPOINT_EVERY`] iterations.
    pub residual_checkpoints: Vec<f64>,
}

pub const CHECKPOINT_EVERY: usize = 10;
const MAX_RESTARTS: u64 = 4;

/// Leading eigenpair of a dense Hermitian matrix.
pub fn leading_eigenvector<T: Scalar>(m: &SquareMatrix<T>, opts: &EigOptions, seed: SeedSpec) -> Result<EigResult<T>> {
    power_iteration(m, opts, seed)
}

/// Power iteration on `M + cI` with `c = max(0, −lower bound)`, which keeps
/// the eigenvectors and makes the algebraically largest eigenvalue dominant.
///
/// Stops when consecutive iterates, aligned by a unit scalar, differ by less
/// than `tol`. The start vector is a seeded Gaussian; an iterate annihilated
/// by the shifted operator triggers a restart from a fresh stream.
pub fn power_iteration<T: Scalar, O: HermitianOperator<T> + ?Sized>(
    op: &O,
    opts: &EigOptions,
    seed: SeedSpec,
) -> Result<EigResult<T>> {
    if opts.tol.is_nan() || opts.tol <= 0.0 {
        return Err(SyncError::InvalidParameter(format!(
            "tol must be positive, got {}",
            opts.tol
        )));
    }
    let n = op.dim();
    if n == 0 {
        return Err(SyncError::InvalidParameter("empty operator".into()));
    }
    let shift = (-op.spectrum_lower_bound()).max(0.0);
    let mut restarts = 0;
    let mut x = start_vector(n, seed, restarts);
    let mut y = vec![T::zero(); n];
    let mut iterations = 0;
    let mut converged = false;
    let mut checkpoints = Vec::new();

    while iterations < opts.max_iter {
        iterations += 1;
        op.apply(&x, &mut y);
        axpy(T::from_re(shift), &x, &mut y);
        let ny = norm(&y);
        if ny == 0.0 || !ny.is_finite() {
            if restarts >= MAX_RESTARTS {
                break;
            }
            restarts += 1;
            x = start_vector(n, seed, restarts);
            continue;
        }
        let inv = 1.0 / ny;
        y.iter_mut().for_each(|v| *v = v.scale(inv));
        let step = aligned_distance(&x, &y);
        std::mem::swap(&mut x, &mut y);
        if step < opts.tol {
            converged = true;
            break;
        }
        if iterations % CHECKPOINT_EVERY == 0 {
            checkpoints.push(rayleigh(op, &x).1);
        }
    }

    let (value, residual) = rayleigh(op, &x);
    checkpoints.push(residual);
    Ok(EigResult {
        value,
        vector: x,
        iterations,
        residual,
        converged,
        residual_checkpoints: checkpoints,
    })
}

/// Second-largest eigenvalue of a PSD operator by deflating the leading pair.
pub fn second_eigenvalue_psd<T: Scalar, O: HermitianOperator<T>>(
    op: &O,
    opts: &EigOptions,
    seed: SeedSpec,
) -> Result<f64> {
    let lead = power_iteration(op, opts, seed)?;
    let deflated = Deflated {
        inner: op,
        value: lead.value,
        vector: &lead.vector,
    };
    let next_seed = SeedSpec::new(seed.master_seed ^ 0x5eed, seed.replicate_index);
    Ok(power_iteration(&deflated, opts, next_seed)?.value)
}

/// `min over unit a of ‖y − a x‖` for unit vectors `x, y`.
pub fn aligned_distance<T: Scalar>(x: &[T], y: &[T]) -> f64 {
    let ip = dot(x, y);
    let m = ip.abs();
    let a = if m > 0.0 { ip.scale(1.0 / m) } else { T::one() };
    x.iter()
        .zip(y)
        .map(|(&xi, &yi)| (yi - a * xi).abs_sqr())
        .sum::<f64>()
        .sqrt()
}

fn rayleigh<T: Scalar, O: HermitianOperator<T> + ?Sized>(op: &O, x: &[T]) -> (f64, f64) {
    let mut mx = vec![T::zero(); x.len()];
    op.apply(x, &mut mx);
    let value = dot(x, &mx).re();
    axpy(T::from_re(-value), x, &mut mx);
    (value, norm(&mx))
}

fn start_vector<T: Scalar>(n: usize, seed: SeedSpec, attempt: u64) -> Vec<T> {
    let mut rng = synth::stream(seed, StreamTag::EigenStart, attempt);
    let mut x: Vec<T> = (0..n).map(|_| synth::standard_gaussian(&mut rng)).collect();
    let inv = 1.0 / norm(&x);
    x.iter_mut().for_each(|v| *v = v.scale(inv));
    x
}
