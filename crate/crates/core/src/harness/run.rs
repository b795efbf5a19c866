use std::collections::BTreeMap;
use std::time::Instant;

use rayon::prelude::*;

use super::bench::theoretical_benchmarks;
use super::config::{Estimator, ExperimentConfig, GridPoint, Model};
use super::record::ExperimentRecord;
use super::{HarnessError, HarnessResult};
use crate::domain::{LiftedState, MaskedObservation, ModelParams, PhaseVector, SignVector, UnitEntries};
use crate::error::Result;
use crate::gpm;
use crate::lifted::{self, RoundingInput};
use crate::linalg::SquareMatrix;
use crate::loss;
use crate::synth::{self, SeedSpec};
use crate::z2;

/// Ground-truth types the harness can run end to end.
trait Truth: UnitEntries + Sized {
    fn sample(n: usize, seed: SeedSpec) -> Result<Self>;
    fn observe(&self, params: &ModelParams, seed: SeedSpec) -> Result<MaskedObservation<Self::Scalar>>;
    /// Fills the vector-loss columns for a vector estimate.
    fn vector_losses(rec: &mut ExperimentRecord, estimate: &Self, truth: &Self) -> Result<()>;
    /// Fills the exact-recovery column for a lifted estimate.
    fn lifted_extras(rec: &mut ExperimentRecord, v: &LiftedState<Self::Scalar>, truth: &Self) -> Result<()>;
}

impl Truth for PhaseVector {
    fn sample(n: usize, seed: SeedSpec) -> Result<Self> {
        synth::sample_truth_phase(n, seed)
    }

    fn observe(&self, params: &ModelParams, seed: SeedSpec) -> Result<MaskedObservation<Self::Scalar>> {
        synth::sample_observation(self, params, seed)
    }

    fn vector_losses(rec: &mut ExperimentRecord, estimate: &Self, truth: &Self) -> Result<()> {
        rec.loss_vector = Some(loss::loss_vector(estimate, truth)?.loss);
        Ok(())
    }

    fn lifted_extras(_: &mut ExperimentRecord, _: &LiftedState<Self::Scalar>, _: &Self) -> Result<()> {
        Ok(())
    }
}

impl Truth for SignVector {
    fn sample(n: usize, seed: SeedSpec) -> Result<Self> {
        synth::sample_truth_z2(n, seed)
    }

    fn observe(&self, params: &ModelParams, seed: SeedSpec) -> Result<MaskedObservation<Self::Scalar>> {
        synth::sample_observation_z2(self, params, seed)
    }

    fn vector_losses(rec: &mut ExperimentRecord, estimate: &Self, truth: &Self) -> Result<()> {
        rec.loss_z2 = Some(loss::loss_z2(estimate, truth)?);
        rec.exact_recovery = Some(z2::exact_recovery(&LiftedState::embed(estimate)?, truth)?);
        Ok(())
    }

    fn lifted_extras(rec: &mut ExperimentRecord, v: &LiftedState<f64>, truth: &Self) -> Result<()> {
        rec.exact_recovery = Some(z2::exact_recovery(v, truth)?);
        Ok(())
    }
}

/// Per-grid-point master seed, so grid points never share streams.
fn grid_seed(master_seed: u64, grid_index: usize) -> u64 {
    // splitmix64 finalizer
    let mut x = master_seed ^ (grid_index as u64 + 1).wrapping_mul(0x9e37_79b9_7f4a_7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^ (x >> 31)
}

const ROUNDING_SALT: u64 = 0x0072_6f75_6e64;

/// Seed of replicate `replicate` at grid point `grid_index`.
pub fn replicate_seed(master_seed: u64, grid_index: usize, replicate: u64) -> SeedSpec {
    SeedSpec::new(grid_seed(master_seed, grid_index), replicate)
}

/// Seed used to round the lifted solution of a replicate.
pub fn rounding_seed(seed: SeedSpec) -> SeedSpec {
    SeedSpec::new(seed.master_seed ^ ROUNDING_SALT, seed.replicate_index)
}

fn base_record(cfg: &ExperimentConfig, point: &GridPoint, replicate: u64, estimator: Estimator) -> ExperimentRecord {
    let b = theoretical_benchmarks(point.n, point.p, point.sigma2, cfg.model);
    ExperimentRecord {
        model: cfg.model,
        n: point.n,
        p: point.p,
        sigma2: point.sigma2,
        replicate,
        estimator,
        loss_vector: None,
        loss_matrix: None,
        loss_z2: None,
        objective: None,
        iterations: 0,
        fixed_point_residual: None,
        converged: false,
        exact_recovery: None,
        benchmark_vector: b.vector,
        benchmark_matrix: b.matrix,
        benchmark_exp: b.exp_rate,
        wall_time_ms: None,
        master_seed: cfg.master_seed,
    }
}

fn estimators(cfg: &ExperimentConfig) -> Vec<Estimator> {
    let mut e = cfg.estimators.clone();
    e.sort_unstable();
    e.dedup();
    e
}

/// Runs every requested estimator on one sampled replicate. Failures are
/// recorded as non-converged rows with empty losses.
pub fn run_replicate(cfg: &ExperimentConfig, grid_index: usize, replicate: u64) -> Vec<ExperimentRecord> {
    let point = cfg.grid[grid_index];
    let seed = replicate_seed(cfg.master_seed, grid_index, replicate);
    let outcome = match cfg.model {
        Model::Phase => replicate_records::<PhaseVector>(cfg, &point, seed),
        Model::Z2 => replicate_records::<SignVector>(cfg, &point, seed),
    };
    match outcome {
        Ok(rows) => rows,
        Err(_) => estimators(cfg)
            .into_iter()
            .map(|e| base_record(cfg, &point, replicate, e))
            .collect(),
    }
}

fn replicate_records<Z: Truth>(
    cfg: &ExperimentConfig,
    point: &GridPoint,
    seed: SeedSpec,
) -> Result<Vec<ExperimentRecord>> {
    let params = ModelParams::from_sigma2(point.n, point.p, point.sigma2)?;
    let truth = Z::sample(point.n, seed)?;
    let obs = truth.observe(&params, seed)?;
    let tol = &cfg.tolerances;

    let started = Instant::now();
    let (z0, eig) = gpm::spectral::<Z>(&obs, &tol.eig(), seed)?;
    let spectral_ms = started.elapsed().as_secs_f64() * 1e3;

    let mut rows = Vec::new();
    for estimator in estimators(cfg) {
        let mut rec = base_record(cfg, point, seed.replicate_index, estimator);
        let started = Instant::now();
        let filled = fill_record(&mut rec, estimator, &obs, &truth, &z0, &eig, cfg, seed);
        if filled.is_err() {
            rec = base_record(cfg, point, seed.replicate_index, estimator);
        }
        if cfg.record_wall_time {
            let own = started.elapsed().as_secs_f64() * 1e3;
            rec.wall_time_ms = Some(own + spectral_ms);
        }
        rows.push(rec);
    }
    Ok(rows)
}

#[allow(clippy::too_many_arguments)]
fn fill_record<Z: Truth>(
    rec: &mut ExperimentRecord,
    estimator: Estimator,
    obs: &MaskedObservation<Z::Scalar>,
    truth: &Z,
    z0: &Z,
    eig: &crate::linalg::EigResult<Z::Scalar>,
    cfg: &ExperimentConfig,
    seed: SeedSpec,
) -> Result<()> {
    let tol = &cfg.tolerances;
    let vector_outcome = |rec: &mut ExperimentRecord, est: &Z| -> Result<()> {
        Z::vector_losses(rec, est, truth)?;
        let values = est.to_values();
        rec.loss_matrix = Some(loss::loss_matrix(&SquareMatrix::outer(&values), truth)?);
        rec.objective = Some(obs.quadratic_form(&values));
        Ok(())
    };
    match estimator {
        Estimator::Spectral => {
            vector_outcome(rec, z0)?;
            rec.iterations = eig.iterations as u64;
            rec.converged = eig.converged;
        }
        Estimator::Gpm | Estimator::Mle => {
            let (est, diag) = gpm::run(obs, z0, &tol.gpm())?;
            vector_outcome(rec, &est)?;
            rec.iterations = diag.iterations as u64;
            rec.fixed_point_residual = Some(diag.fixed_point_residual);
            rec.converged = diag.converged;
        }
        Estimator::Sdp => {
            let v0 = lifted::perturbed_embedding(z0, tol.lift_perturbation, obs.n(), seed)?;
            let (v, diag) = lifted::sdp_solve(obs, &v0, &tol.sdp())?;
            let (est, _) = lifted::round::<Z>(RoundingInput::Lifted(&v), &tol.eig(), rounding_seed(seed))?;
            Z::vector_losses(rec, &est, truth)?;
            Z::lifted_extras(rec, &v, truth)?;
            rec.loss_matrix = Some(loss::loss_matrix(&v.gram(), truth)?);
            rec.objective = Some(lifted::sdp_objective(obs, &v)?);
            rec.iterations = diag.iterations as u64;
            rec.fixed_point_residual = Some(diag.fixed_point_residual);
            rec.converged = diag.converged;
        }
    }
    Ok(())
}

/// Runs the whole grid. Records come back ordered by grid point (config
/// order), replicate, then estimator, whatever the worker count.
pub fn run_experiment(cfg: &ExperimentConfig) -> HarnessResult<Vec<ExperimentRecord>> {
    cfg.validate()?;
    let jobs: Vec<(usize, u64)> = (0..cfg.grid.len())
        .flat_map(|g| (0..cfg.replicates).map(move |r| (g, r)))
        .collect();
    let work = || {
        jobs.par_iter()
            .map(|&(g, r)| run_replicate(cfg, g, r))
            .collect::<Vec<_>>()
    };
    let nested = if cfg.workers > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(cfg.workers)
            .build()
            .map_err(|e| HarnessError::Config(format!("cannot start {} workers: {e}", cfg.workers)))?
            .install(work)
    } else {
        work()
    };
    Ok(nested.into_iter().flatten().collect())
}

/// Means over replicates for one (grid point, estimator) cell.
#[derive(Debug, Clone, PartialEq)]
pub struct Summary {
    pub model: Model,
    pub n: usize,
    pub p: f64,
    pub sigma2: f64,
    pub estimator: Estimator,
    pub replicates: usize,
    pub mean_loss: f64,
    pub mean_loss_matrix: f64,
    /// Mean vector loss over `σ²/(2np)` (phase) or `exp(−np/(2σ²))` (Z₂).
    pub loss_ratio: f64,
    /// Mean matrix loss over `σ²/(np)`; phase only.
    pub matrix_ratio: Option<f64>,
    pub converged_fraction: f64,
    pub exact_recovery_fraction: Option<f64>,
}

fn mean(xs: impl Iterator<Item = f64>) -> f64 {
    let (s, c) = xs.fold((0.0, 0usize), |(s, c), x| (s + x, c + 1));
    if c == 0 {
        f64::NAN
    } else {
        s / c as f64
    }
}

pub fn summarize(records: &[ExperimentRecord]) -> Vec<Summary> {
    let mut cells: BTreeMap<(usize, u64, u64, Estimator), Vec<&ExperimentRecord>> = BTreeMap::new();
    for r in records {
        cells
            .entry((r.n, r.p.to_bits(), r.sigma2.to_bits(), r.estimator))
            .or_default()
            .push(r);
    }
    cells
        .into_values()
        .map(|rs| {
            let first = rs[0];
            let mean_loss = mean(rs.iter().filter_map(|r| r.primary_loss()));
            let mean_loss_matrix = mean(rs.iter().filter_map(|r| r.loss_matrix));
            let benchmark = match first.model {
                Model::Phase => first.benchmark_vector,
                Model::Z2 => first.benchmark_exp,
            };
            let exact: Vec<bool> = rs.iter().filter_map(|r| r.exact_recovery).collect();
            Summary {
                model: first.model,
                n: first.n,
                p: first.p,
                sigma2: first.sigma2,
                estimator: first.estimator,
                replicates: rs.len(),
                mean_loss,
                mean_loss_matrix,
                loss_ratio: benchmark.map_or(f64::NAN, |b| mean_loss / b),
                matrix_ratio: first.benchmark_matrix.map(|b| mean_loss_matrix / b),
                converged_fraction: rs.iter().filter(|r| r.converged).count() as f64 / rs.len() as f64,
                exact_recovery_fraction: (!exact.is_empty())
                    .then(|| exact.iter().filter(|&&e| e).count() as f64 / exact.len() as f64),
            }
        })
        .collect()
}
