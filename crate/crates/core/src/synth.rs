//! Seeded sampling of the phase and Z₂ observation models.
//!
//! Every draw comes from a ChaCha8 stream keyed by `(master_seed, site tag,
//! sub-index)` whose stream id is the replicate index. ChaCha is counter
//! based, so a replicate's draws never depend on which other replicates ran
//! or in what order. Gaussians use `rand_distr::StandardNormal` (ziggurat).

use std::f64::consts::{FRAC_1_SQRT_2, TAU};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::domain::{MaskedObservation, ModelParams, PhaseVector, SignVector, UnitEntries};
use crate::error::{Result, SyncError};
use crate::linalg::SquareMatrix;
use crate::scalar::{FieldKind, Scalar};

/// Identifies one replicate of one experiment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SeedSpec {
    pub master_seed: u64,
    pub replicate_index: u64,
}

impl SeedSpec {
    pub fn new(master_seed: u64, replicate_index: u64) -> Self {
        Self {
            master_seed,
            replicate_index,
        }
    }
}

/// Draw sites. Each gets an independent stream.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StreamTag {
    TruthPhase,
    TruthSigns,
    Mask,
    Noise,
    EigenStart,
    LiftPerturbation,
}

impl StreamTag {
    fn code(self) -> u64 {
        match self {
            StreamTag::TruthPhase => 0x7472_7574_6850,
            StreamTag::TruthSigns => 0x7472_7574_6853,
            StreamTag::Mask => 0x6d61_736b,
            StreamTag::Noise => 0x006e_6f69_7365,
            StreamTag::EigenStart => 0x6569_6773,
            StreamTag::LiftPerturbation => 0x6c69_6674,
        }
    }
}

/// Random stream for one draw site of one replicate. `sub` separates
/// repeated uses of the same site (e.g. eigensolver restarts).
pub fn stream(seed: SeedSpec, tag: StreamTag, sub: u64) -> ChaCha8Rng {
    let mut key = [0u8; 32];
    key[..8].copy_from_slice(&seed.master_seed.to_le_bytes());
    key[8..16].copy_from_slice(&tag.code().to_le_bytes());
    key[16..24].copy_from_slice(&sub.to_le_bytes());
    let mut rng = ChaCha8Rng::from_seed(key);
    rng.set_stream(seed.replicate_index);
    rng
}

/// Standard Gaussian in the scalar's field: `N(0,1)` real, `CN(0,1)` complex.
pub fn standard_gaussian<T: Scalar, R: Rng + ?Sized>(rng: &mut R) -> T {
    match T::KIND {
        FieldKind::Real => T::from_re(rng.sample(StandardNormal)),
        FieldKind::Complex => {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            T::from_parts(re * FRAC_1_SQRT_2, im * FRAC_1_SQRT_2)
        }
    }
}

pub fn sample_truth_phase(n: usize, seed: SeedSpec) -> Result<PhaseVector> {
    check_size(n)?;
    let mut rng = stream(seed, StreamTag::TruthPhase, 0);
    // θ uniform on (0, 2π]
    let angles: Vec<f64> = (0..n).map(|_| TAU * (1.0 - rng.random::<f64>())).collect();
    PhaseVector::from_angles(&angles)
}

pub fn sample_truth_z2(n: usize, seed: SeedSpec) -> Result<SignVector> {
    check_size(n)?;
    let mut rng = stream(seed, StreamTag::TruthSigns, 0);
    SignVector::new((0..n).map(|_| if rng.random::<bool>() { 1 } else { -1 }).collect())
}

/// `Y_jk = z_j conj(z_k) + σ W_jk` with `W_jk ~ CN(0,1)`, observed with
/// probability `p` for each `j < k`. The noise matrix is attached.
pub fn sample_observation(
    z_star: &PhaseVector,
    params: &ModelParams,
    seed: SeedSpec,
) -> Result<MaskedObservation<Complex64>> {
    sample_pairs(z_star, params, seed)
}

/// Real counterpart with `W_jk ~ N(0,1)` and zero data diagonal.
pub fn sample_observation_z2(
    z_star: &SignVector,
    params: &ModelParams,
    seed: SeedSpec,
) -> Result<MaskedObservation<f64>> {
    sample_pairs(z_star, params, seed)
}

fn sample_pairs<Z: UnitEntries>(
    z_star: &Z,
    params: &ModelParams,
    seed: SeedSpec,
) -> Result<MaskedObservation<Z::Scalar>> {
    let n = params.n;
    if z_star.len() != n {
        return Err(SyncError::DimensionMismatch {
            expected: n,
            actual: z_star.len(),
        });
    }
    let z = z_star.to_values();
    let mut mask_rng = stream(seed, StreamTag::Mask, 0);
    let mut noise_rng = stream(seed, StreamTag::Noise, 0);

    let mut mask = vec![false; n * n];
    let mut data = SquareMatrix::zeros(n);
    let mut noise = SquareMatrix::zeros(n);
    if Z::Scalar::KIND == FieldKind::Complex {
        for j in 0..n {
            data.set(j, j, Z::Scalar::one());
        }
    }
    for j in 0..n {
        for k in (j + 1)..n {
            let observed = mask_rng.random::<f64>() < params.p;
            let w: Z::Scalar = standard_gaussian(&mut noise_rng);
            noise.set(j, k, w);
            noise.set(k, j, w.conj());
            if observed {
                let y = z[j] * z[k].conj() + w.scale(params.sigma);
                mask[j * n + k] = true;
                mask[k * n + j] = true;
                data.set(j, k, y);
                data.set(k, j, y.conj());
            }
        }
    }
    MaskedObservation::new(*params, mask, data)?.with_noise(noise)
}

fn check_size(n: usize) -> Result<()> {
    if n < 2 {
        return Err(SyncError::InvalidParameter(format!("n must be >= 2, got {n}")));
    }
    Ok(())
}
