//! Independent oracles and property audits shared by the integration tests
//! and the acceptance runner. Nothing here calls the code path it checks.
#![allow(dead_code, clippy::needless_range_loop)]

use std::f64::consts::{FRAC_1_SQRT_2, TAU};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use syncbench::gpm::SolveOptions;
use syncbench::harness::{self, Estimator, ExperimentConfig, GridPoint, Model, OutputFormat, OutputSpec, Tolerances};
use syncbench::linalg::{EigOptions, SquareMatrix};
use syncbench::{lifted, loss, phase, synth, z2};
use syncbench::{LiftedState, MaskedObservation, ModelParams, PhaseVector, SeedSpec, SignVector, UnitEntries};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn gaussian_c(rng: &mut ChaCha8Rng) -> Complex64 {
    let a: f64 = rng.sample(StandardNormal);
    let b: f64 = rng.sample(StandardNormal);
    c(a * FRAC_1_SQRT_2, b * FRAC_1_SQRT_2)
}

pub fn gaussian(rng: &mut ChaCha8Rng) -> f64 {
    rng.sample(StandardNormal)
}

pub fn random_phases(rng: &mut ChaCha8Rng, n: usize) -> PhaseVector {
    let angles: Vec<f64> = (0..n).map(|_| rng.random::<f64>() * TAU).collect();
    PhaseVector::from_angles(&angles).unwrap()
}

pub fn random_signs(rng: &mut ChaCha8Rng, n: usize) -> SignVector {
    SignVector::new((0..n).map(|_| if rng.random::<bool>() { 1 } else { -1 }).collect()).unwrap()
}

fn normalized_c(mut v: Vec<Complex64>) -> Vec<Complex64> {
    let norm = v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
    v.iter_mut().for_each(|x| *x /= norm);
    v
}

fn normalized_r(mut v: Vec<f64>) -> Vec<f64> {
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    v.iter_mut().for_each(|x| *x /= norm);
    v
}

pub fn random_unit_c(rng: &mut ChaCha8Rng, n: usize) -> Vec<Complex64> {
    normalized_c((0..n).map(|_| gaussian_c(rng)).collect())
}

pub fn random_lifted_c(rng: &mut ChaCha8Rng, n: usize) -> LiftedState<Complex64> {
    LiftedState::from_columns((0..n).map(|_| random_unit_c(rng, n)).collect()).unwrap()
}

pub fn random_lifted_r(rng: &mut ChaCha8Rng, n: usize) -> LiftedState<f64> {
    LiftedState::from_columns(
        (0..n)
            .map(|_| normalized_r((0..n).map(|_| gaussian(rng)).collect()))
            .collect(),
    )
    .unwrap()
}

/// Columns `conj(z_j) a + ε g_j`, renormalized: close to the embedding.
pub fn near_embedding_c(rng: &mut ChaCha8Rng, z: &PhaseVector, eps: f64) -> LiftedState<Complex64> {
    let n = z.len();
    let a = random_unit_c(rng, n);
    let cols = (0..n)
        .map(|j| {
            normalized_c(
                (0..n)
                    .map(|i| z.entries()[j].conj() * a[i] + gaussian_c(rng) * eps)
                    .collect(),
            )
        })
        .collect();
    LiftedState::from_columns(cols).unwrap()
}

pub fn random_hermitian(rng: &mut ChaCha8Rng, n: usize) -> SquareMatrix<Complex64> {
    let mut m = SquareMatrix::zeros(n);
    for j in 0..n {
        m.set(j, j, c(gaussian(rng), 0.0));
        for k in (j + 1)..n {
            let x = gaussian_c(rng);
            m.set(j, k, x);
            m.set(k, j, x.conj());
        }
    }
    m
}

pub fn observation_c(seed: u64, n: usize, p: f64, sigma: f64) -> (PhaseVector, MaskedObservation<Complex64>) {
    let s = SeedSpec::new(seed, 0);
    let z = synth::sample_truth_phase(n, s).unwrap();
    let obs = synth::sample_observation(&z, &ModelParams::new(n, p, sigma).unwrap(), s).unwrap();
    (z, obs)
}

pub fn observation_r(seed: u64, n: usize, p: f64, sigma: f64) -> (SignVector, MaskedObservation<f64>) {
    let s = SeedSpec::new(seed, 0);
    let z = synth::sample_truth_z2(n, s).unwrap();
    let obs = synth::sample_observation_z2(&z, &ModelParams::new(n, p, sigma).unwrap(), s).unwrap();
    (z, obs)
}

// ---------------------------------------------------------------- eigen oracle

/// Cyclic Jacobi rotations on a real symmetric matrix. Returns eigenvalues
/// in decreasing order and the matching eigenvectors (as rows of the result).
pub fn jacobi_eigen(mut a: Vec<Vec<f64>>) -> (Vec<f64>, Vec<Vec<f64>>) {
    let n = a.len();
    let mut v = vec![vec![0.0; n]; n];
    for (i, row) in v.iter_mut().enumerate() {
        row[i] = 1.0;
    }
    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[i][j] * a[i][j])
            .sum();
        if off < 1e-30 {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                if a[p][q].abs() < 1e-300 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let cs = 1.0 / (t * t + 1.0).sqrt();
                let sn = t * cs;
                for k in 0..n {
                    let akp = a[k][p];
                    let akq = a[k][q];
                    a[k][p] = cs * akp - sn * akq;
                    a[k][q] = sn * akp + cs * akq;
                }
                for k in 0..n {
                    let apk = a[p][k];
                    let aqk = a[q][k];
                    a[p][k] = cs * apk - sn * aqk;
                    a[q][k] = sn * apk + cs * aqk;
                }
                for row in v.iter_mut() {
                    let vp = row[p];
                    let vq = row[q];
                    row[p] = cs * vp - sn * vq;
                    row[q] = sn * vp + cs * vq;
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[j][j].partial_cmp(&a[i][i]).unwrap());
    let values = order.iter().map(|&i| a[i][i]).collect();
    let vectors = order.iter().map(|&i| (0..n).map(|k| v[k][i]).collect()).collect();
    (values, vectors)
}

/// Hermitian eigen-decomposition through the real embedding
/// `[[Re, −Im], [Im, Re]]`, whose spectrum is each eigenvalue twice.
pub fn hermitian_eigen(m: &SquareMatrix<Complex64>) -> (Vec<f64>, Vec<Vec<Complex64>>) {
    let n = m.n();
    let mut big = vec![vec![0.0; 2 * n]; 2 * n];
    for j in 0..n {
        for k in 0..n {
            let x = m.get(j, k);
            big[j][k] = x.re;
            big[j][k + n] = -x.im;
            big[j + n][k] = x.im;
            big[j + n][k + n] = x.re;
        }
    }
    let (vals, vecs) = jacobi_eigen(big);
    let values = vals.iter().step_by(2).copied().collect();
    let vectors = vecs
        .iter()
        .step_by(2)
        .map(|v| normalized_c((0..n).map(|j| c(v[j], v[j + n])).collect()))
        .collect();
    (values, vectors)
}

pub fn real_eigen(m: &SquareMatrix<f64>) -> (Vec<f64>, Vec<Vec<f64>>) {
    let n = m.n();
    jacobi_eigen((0..n).map(|j| m.row(j).to_vec()).collect())
}

pub fn phase_distance(x: &[Complex64], y: &[Complex64]) -> f64 {
    let ip: Complex64 = x.iter().zip(y).map(|(a, b)| a.conj() * b).sum();
    let a = if ip.norm() > 0.0 { ip / ip.norm() } else { c(1.0, 0.0) };
    x.iter()
        .zip(y)
        .map(|(xi, yi)| (yi - a * xi).norm_sqr())
        .sum::<f64>()
        .sqrt()
}

// ---------------------------------------------------------------- loss oracles

/// `(1/n) Σ |ẑ_j − z_j a|²` minimized over `points` equally spaced `a`.
pub fn grid_loss_vector(z_hat: &PhaseVector, z: &PhaseVector, points: usize) -> f64 {
    let n = z.len() as f64;
    (0..points)
        .map(|i| {
            let a = Complex64::from_polar(1.0, TAU * i as f64 / points as f64);
            z_hat
                .entries()
                .iter()
                .zip(z.entries())
                .map(|(h, t)| (h - t * a).norm_sqr())
                .sum::<f64>()
                / n
        })
        .fold(f64::INFINITY, f64::min)
}

/// `(1/n) Σ ‖V_j − conj(z_j) a‖²` for a given aligner.
pub fn direct_lifted_loss(v: &LiftedState<Complex64>, z: &PhaseVector, a: &[Complex64]) -> f64 {
    let n = v.n();
    (0..n)
        .map(|j| {
            v.column(j)
                .iter()
                .zip(a)
                .map(|(x, ai)| (x - z.entries()[j].conj() * ai).norm_sqr())
                .sum::<f64>()
        })
        .sum::<f64>()
        / n as f64
}

/// Projected gradient descent on the unit sphere from random starts.
pub fn multistart_lifted_loss(rng: &mut ChaCha8Rng, v: &LiftedState<Complex64>, z: &PhaseVector, starts: usize) -> f64 {
    let n = v.n();
    let mut best = f64::INFINITY;
    for _ in 0..starts {
        let mut a = random_unit_c(rng, n);
        for _ in 0..2000 {
            // gradient of the loss in conj(a) is (a − (1/n) Σ z_j V_j)
            let mut g = a.clone();
            for j in 0..n {
                for i in 0..n {
                    g[i] -= z.entries()[j] * v.column(j)[i] / n as f64;
                }
            }
            a = normalized_c(a.iter().zip(&g).map(|(x, gi)| x - gi * 0.5).collect());
        }
        best = best.min(direct_lifted_loss(v, z, &a));
    }
    best
}

/// Squared Frobenius distance `(1/n²)‖VᴴV − zzᴴ‖²` by explicit entries.
pub fn frobenius_gap_c(v: &LiftedState<Complex64>, z: &PhaseVector) -> f64 {
    let n = v.n();
    let mut acc = 0.0;
    for j in 0..n {
        for k in 0..n {
            let g: Complex64 = v.column(j).iter().zip(v.column(k)).map(|(a, b)| a.conj() * b).sum();
            acc += (g - z.entries()[j] * z.entries()[k].conj()).norm_sqr();
        }
    }
    acc / (n * n) as f64
}

pub fn frobenius_gap_r(v: &LiftedState<f64>, z: &SignVector) -> f64 {
    let n = v.n();
    let mut acc = 0.0;
    for j in 0..n {
        for k in 0..n {
            let g: f64 = v.column(j).iter().zip(v.column(k)).map(|(a, b)| a * b).sum();
            acc += (g - z.value(j) * z.value(k)).powi(2);
        }
    }
    acc / (n * n) as f64
}

/// `‖VVᴴ‖²_F/n² + 1 − 2‖m‖²`, the exact expansion of the matrix loss of
/// `VᴴV`, computed without forming `VᴴV`.
pub fn matrix_loss_by_expansion(v: &LiftedState<Complex64>, z: &PhaseVector) -> f64 {
    let n = v.n();
    let mut outer = vec![c(0.0, 0.0); n * n];
    for col in v.columns() {
        for a in 0..n {
            for b in 0..n {
                outer[a * n + b] += col[a] * col[b].conj();
            }
        }
    }
    let fro: f64 = outer.iter().map(|x| x.norm_sqr()).sum();
    let mut m = vec![c(0.0, 0.0); n];
    for (j, col) in v.columns().enumerate() {
        for i in 0..n {
            m[i] += z.entries()[j] * col[i] / n as f64;
        }
    }
    let m2: f64 = m.iter().map(|x| x.norm_sqr()).sum();
    fro / (n * n) as f64 + 1.0 - 2.0 * m2
}

// ---------------------------------------------------------------- naive estimator oracles

pub fn naive_gpm_step(obs: &MaskedObservation<Complex64>, z: &[Complex64]) -> Vec<Complex64> {
    let n = z.len();
    (0..n)
        .map(|j| {
            let mut s = c(0.0, 0.0);
            for k in 0..n {
                if k != j && obs.mask(j, k) {
                    s += obs.data().get(j, k) * z[k];
                }
            }
            if s.norm() == 0.0 {
                z[j]
            } else {
                s / s.norm()
            }
        })
        .collect()
}

pub fn naive_lifted_column(obs: &MaskedObservation<Complex64>, v: &LiftedState<Complex64>, j: usize) -> Vec<Complex64> {
    let n = v.n();
    let mut s = vec![c(0.0, 0.0); n];
    for k in 0..n {
        if k != j && obs.mask(j, k) {
            let y = obs.data().get(j, k).conj();
            for i in 0..n {
                s[i] += y * v.column(k)[i];
            }
        }
    }
    let norm = s.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
    if norm == 0.0 {
        v.column(j).to_vec()
    } else {
        s.iter().map(|x| x / norm).collect()
    }
}

pub fn naive_objective(obs: &MaskedObservation<Complex64>, v: &LiftedState<Complex64>) -> f64 {
    let n = v.n();
    let mut acc = c(0.0, 0.0);
    for j in 0..n {
        for k in 0..n {
            if obs.mask(j, k) {
                let g: Complex64 = v.column(j).iter().zip(v.column(k)).map(|(a, b)| a.conj() * b).sum();
                acc += obs.data().get(j, k).conj() * g;
            }
        }
    }
    acc.re
}

// ---------------------------------------------------------------- property audits

pub type Audit = Result<String, String>;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

/// Closed-form losses against the grid and multi-start oracles.
pub fn audit_loss_oracles() -> Audit {
    let mut r = rng(101);
    let mut worst: f64 = 0.0;
    for n in 2..=8 {
        let zh = random_phases(&mut r, n);
        let z = random_phases(&mut r, n);
        let closed = loss::loss_vector(&zh, &z).unwrap().loss;
        let grid = grid_loss_vector(&zh, &z, 1_000_000);
        worst = worst.max((closed - grid).abs());
    }
    ensure(worst < 1e-9, || format!("vector loss vs grid: worst gap {worst:e}"))?;

    let mut worst_lifted: f64 = 0.0;
    for _ in 0..3 {
        let v = random_lifted_c(&mut r, 4);
        let z = random_phases(&mut r, 4);
        let closed = loss::loss_lifted(&v, &z).unwrap();
        let direct = direct_lifted_loss(&v, &z, closed.aligner.as_ref().unwrap());
        let multi = multistart_lifted_loss(&mut r, &v, &z, 100);
        worst_lifted = worst_lifted
            .max((closed.loss - direct).abs())
            .max((closed.loss - multi).abs());
    }
    ensure(worst_lifted < 1e-9, || {
        format!("lifted loss vs multi-start: worst gap {worst_lifted:e}")
    })?;
    Ok(format!("vector gap {worst:.1e}, lifted gap {worst_lifted:.1e}"))
}

/// `(1/n²)‖VᴴV − zzᴴ‖² ≤ 2ℓ(V, z)` and the two matrix-loss routes agree.
pub fn audit_loss_relation(count: usize) -> Audit {
    let mut r = rng(202);
    let mut tightest = f64::INFINITY;
    let mut route_gap: f64 = 0.0;
    for i in 0..count {
        let n = 2 + i % 11;
        if i % 2 == 0 {
            let z = random_phases(&mut r, n);
            let v = if i % 4 == 0 {
                random_lifted_c(&mut r, n)
            } else {
                near_embedding_c(&mut r, &z, 0.05)
            };
            let lhs = frobenius_gap_c(&v, &z);
            let rhs = 2.0 * loss::loss_lifted(&v, &z).unwrap().loss;
            ensure(lhs <= rhs + 1e-10, || format!("complex n={n}: {lhs} > {rhs}"))?;
            tightest = tightest.min(rhs - lhs);
            let gram_route = loss::loss_matrix(&v.gram(), &z).unwrap();
            route_gap = route_gap.max((gram_route - matrix_loss_by_expansion(&v, &z)).abs());
        } else {
            let z = random_signs(&mut r, n);
            let v = random_lifted_r(&mut r, n);
            let lhs = frobenius_gap_r(&v, &z);
            let rhs = 2.0 * loss::loss_lifted(&v, &z).unwrap().loss;
            ensure(lhs <= rhs + 1e-10, || format!("real n={n}: {lhs} > {rhs}"))?;
            tightest = tightest.min(rhs - lhs);
        }
    }
    ensure(route_gap < 1e-10, || {
        format!("matrix loss routes differ by {route_gap:e}")
    })?;
    Ok(format!(
        "{count} pairs, min slack {tightest:.2e}, route gap {route_gap:.1e}"
    ))
}

/// The normalization bound on random inputs with positive real overlap.
pub fn audit_ratio_bound(count: usize) -> Audit {
    let mut r = rng(303);
    for i in 0..count {
        let n = 1 + i % 6;
        match i % 3 {
            0 => {
                let y = random_unit_c(&mut r, n);
                let mut x: Vec<Complex64> = (0..n).map(|_| gaussian_c(&mut r) * 3.0).collect();
                let ip: Complex64 = y.iter().zip(&x).map(|(a, b)| a.conj() * b).sum();
                if ip.re < 0.0 {
                    x.iter_mut().for_each(|v| *v = -*v);
                }
                if ip.re == 0.0 {
                    continue;
                }
                ensure(loss::ratio_bound_check(&x, &y).unwrap(), || {
                    format!("complex case failed at {i}")
                })?;
            }
            1 => {
                let y = normalized_r((0..n).map(|_| gaussian(&mut r)).collect());
                let mut x: Vec<f64> = (0..n).map(|_| gaussian(&mut r)).collect();
                let ip: f64 = y.iter().zip(&x).map(|(a, b)| a * b).sum();
                if ip < 0.0 {
                    x.iter_mut().for_each(|v| *v = -*v);
                }
                if ip == 0.0 {
                    continue;
                }
                ensure(loss::ratio_bound_check(&x, &y).unwrap(), || {
                    format!("real case failed at {i}")
                })?;
            }
            _ => {
                let x = c(gaussian(&mut r).abs() + 1e-6, 5.0 * gaussian(&mut r));
                ensure(loss::ratio_bound_check_scalar(x).unwrap(), || {
                    format!("scalar case failed at {i}")
                })?;
            }
        }
    }
    Ok(format!("{count} random inputs"))
}

/// The lifted map restricted to `conj(z_j)·e₁` columns is the GPM.
pub fn audit_embedding(count: usize) -> Audit {
    let mut r = rng(404);
    let mut worst: f64 = 0.0;
    for i in 0..count {
        let n = 3 + (i % 20);
        let p = 0.2 + 0.8 * r.random::<f64>();
        let sigma = 3.0 * r.random::<f64>();
        if i % 2 == 0 {
            let (_, obs) = observation_c(i as u64 + 1000, n, p, sigma);
            let z = random_phases(&mut r, n);
            let lifted = lifted::lifted_step(&obs, &LiftedState::embed(&z).unwrap()).unwrap();
            let gpm = LiftedState::embed(&phase::gpm_step(&obs, &z).unwrap()).unwrap();
            for (a, b) in lifted.as_column_major().iter().zip(gpm.as_column_major()) {
                worst = worst.max((a - b).norm());
            }
        } else {
            let (_, obs) = observation_r(i as u64 + 1000, n, p, sigma);
            let z = random_signs(&mut r, n);
            let lifted = lifted::lifted_step(&obs, &LiftedState::embed(&z).unwrap()).unwrap();
            let gpm = LiftedState::embed(&z2::gpm_step_z2(&obs, &z).unwrap()).unwrap();
            for (a, b) in lifted.as_column_major().iter().zip(gpm.as_column_major()) {
                worst = worst.max((a - b).abs());
            }
        }
    }
    ensure(worst <= 1e-14, || format!("embedding identity off by {worst:e}"))?;
    Ok(format!("{count} instances, worst {worst:.1e}"))
}

/// Outcome of one solve for monotonicity and fixed-point checks.
pub fn check_solve<T: syncbench::Scalar>(
    obs: &MaskedObservation<T>,
    v: &LiftedState<T>,
    diag: &syncbench::gpm::SolveDiagnostics,
    tol: f64,
) -> Result<(), String> {
    ensure(diag.is_nondecreasing(1e-9), || {
        "objective decreased during a sweep".into()
    })?;
    if diag.converged {
        ensure(diag.fixed_point_residual < tol, || {
            format!("residual {} at converged exit", diag.fixed_point_residual)
        })?;
        let fresh = lifted::fixed_point_residual(obs, v).unwrap();
        ensure(fresh < tol, || format!("recomputed residual {fresh} at converged exit"))?;
        let before = lifted::sdp_objective(obs, v).unwrap();
        let after = lifted::sdp_objective(obs, &lifted::lifted_step(obs, v).unwrap()).unwrap();
        let rel = (after - before).abs() / before.abs().max(1.0);
        ensure(rel < 1e-8, || {
            format!("lifted step moved the objective by {rel:e} relative")
        })?;
    }
    Ok(())
}

/// Monotone sweeps and fixed-point exits on a spread of random instances.
pub fn audit_solver_properties() -> Audit {
    let opts = SolveOptions::default();
    let eig = EigOptions::default();
    let mut solves = 0;
    let mut converged = 0;
    for (i, &(n, p, sigma)) in [
        (20, 1.0, 0.5),
        (40, 0.5, 1.0),
        (60, 0.8, 2.0),
        (80, 1.0, 3.0),
        (50, 0.3, 0.8),
    ]
    .iter()
    .enumerate()
    {
        let seed = SeedSpec::new(500 + i as u64, 0);
        let (_, obs) = observation_c(500 + i as u64, n, p, sigma);
        let (z0, _) = phase::spectral_init(&obs, &eig, seed).unwrap();
        let starts = [
            lifted::perturbed_embedding(&z0, 0.01, n, seed).unwrap(),
            random_lifted_c(&mut rng(i as u64), n),
        ];
        for v0 in &starts {
            let (v, diag) = phase::sdp_solve(&obs, v0, &opts).unwrap();
            check_solve(&obs, &v, &diag, opts.tol)?;
            solves += 1;
            converged += diag.converged as usize;
        }
        let (_, obs) = observation_r(600 + i as u64, n, p, sigma);
        let (z0, _) = z2::spectral_init_z2(&obs, &eig, seed).unwrap();
        let starts = [
            lifted::perturbed_embedding(&z0, 0.01, n, seed).unwrap(),
            random_lifted_r(&mut rng(i as u64), n),
        ];
        for v0 in &starts {
            let (v, diag) = z2::sdp_solve_z2(&obs, v0, &opts, None).unwrap();
            check_solve(&obs, &v, &diag.solve, opts.tol)?;
            solves += 1;
            converged += diag.solve.converged as usize;
        }
    }
    ensure(converged * 2 >= solves, || {
        format!("only {converged}/{solves} solves converged")
    })?;
    Ok(format!("{solves} solves, {converged} converged"))
}

pub fn small_config(model: Model, workers: usize) -> ExperimentConfig {
    ExperimentConfig {
        model,
        grid: vec![
            GridPoint {
                n: 30,
                p: 1.0,
                sigma2: 1.0,
            },
            GridPoint {
                n: 40,
                p: 0.5,
                sigma2: 2.0,
            },
        ],
        estimators: Estimator::ALL.to_vec(),
        replicates: 5,
        master_seed: 2024,
        tolerances: Tolerances::default(),
        output: OutputSpec {
            path: "unused.csv".into(),
            format: OutputFormat::Csv,
        },
        workers,
        record_wall_time: false,
    }
}

pub fn csv_bytes(cfg: &ExperimentConfig) -> Vec<u8> {
    let records = harness::run_experiment(cfg).unwrap();
    let mut buf = Vec::new();
    harness::write_csv(&records, &mut buf).unwrap();
    buf
}

/// Byte-identical CSV across repeated runs and across worker counts.
pub fn audit_harness_determinism() -> Audit {
    for model in [Model::Phase, Model::Z2] {
        let one = csv_bytes(&small_config(model, 1));
        let again = csv_bytes(&small_config(model, 1));
        let many = csv_bytes(&small_config(model, 8));
        ensure(one == again, || format!("{model}: repeated run differs"))?;
        ensure(one == many, || format!("{model}: 1 vs 8 workers differ"))?;
        let records = harness::run_experiment(&small_config(model, 1)).unwrap();
        for rec in &records {
            for l in [rec.loss_vector, rec.loss_matrix, rec.loss_z2].into_iter().flatten() {
                ensure(l.is_finite() && (0.0..=4.0).contains(&l), || {
                    format!("loss {l} out of range")
                })?;
            }
        }
    }
    Ok("phase and z2 configs, 1 vs 8 workers".into())
}
