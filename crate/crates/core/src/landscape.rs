//! Fitness-landscape features estimated from random walks: the fitness
//! autocorrelation function, the autocorrelation length τ, and the neutral
//! rate nr, all parameterized by the mutation operator (p, r).

use rand::{Rng as _, SeedableRng as _};
use rand_chacha::ChaCha8Rng;
use std::collections::HashSet;
use thiserror::Error;

use crate::engine::RETRY_CAP;
use crate::problems::FitnessProblem;
use crate::space::{hash_key, mutate, Candidate, MutationParams, SpaceError};

#[derive(Debug, Error)]
pub enum LandscapeError {
    #[error("walk length must be at least 2, got {0}")]
    WalkTooShort(usize),
    #[error("lag bound must satisfy 1 <= k_max < walk length, got k_max = {k_max} on length {length}")]
    InvalidLag { k_max: usize, length: usize },
    #[error("significance level must be a positive finite number, got {0}")]
    InvalidEpsilon(f64),
    #[error("autocorrelation is undefined on a zero-variance walk")]
    DegenerateWalk,
    #[error("no acceptable step found after {0} mutation retries")]
    RetrySaturation(usize),
    #[error(transparent)]
    Space(#[from] SpaceError),
}

/// Distinctness rule applied while stepping a walk.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WalkMode {
    /// Each step must differ from its predecessor only.
    ConsecutiveDistinct,
    /// Each step must differ from every earlier step.
    GloballyDistinct,
}

/// A realized random walk: candidates, their fitness, and how it was made.
#[derive(Debug, Clone, PartialEq)]
pub struct WalkTrace {
    pub problem_name: String,
    pub candidates: Vec<Candidate>,
    pub fitness: Vec<f64>,
    pub mutation: MutationParams,
    pub seed: u64,
    pub mode: WalkMode,
}

impl WalkTrace {
    pub fn len(&self) -> usize {
        self.fitness.len()
    }

    pub fn is_empty(&self) -> bool {
        self.fitness.is_empty()
    }
}

/// Walk features in the form the analysis grid consumes.
#[derive(Debug, Clone, PartialEq)]
pub struct LandscapeFeatures {
    pub p: f64,
    pub r: f64,
    pub length: usize,
    /// ρ̂(k) for k = 1..=k_max; empty on a zero-variance walk.
    pub rho: Vec<f64>,
    /// Smallest lag with |ρ̂| below epsilon; `None` on a zero-variance walk.
    pub tau: Option<usize>,
    /// True when no lag up to k_max crossed below epsilon and τ was capped.
    pub tau_saturated: bool,
    pub nr: f64,
    pub epsilon: f64,
}

/// Random walk under consecutive-distinctness (the default stepping rule).
pub fn random_walk(
    problem: &dyn FitnessProblem,
    m: MutationParams,
    length: usize,
    seed: u64,
) -> Result<WalkTrace, LandscapeError> {
    random_walk_with_mode(problem, m, length, seed, WalkMode::ConsecutiveDistinct)
}

/// Random walk of `length` candidates starting from a uniform random point.
///
/// Each step mutates the current candidate, retrying until the mutant
/// satisfies the mode's distinctness rule; the walk fails with
/// [`LandscapeError::RetrySaturation`] once a step exceeds the engine's
/// retry cap. Identical inputs reproduce the identical walk.
pub fn random_walk_with_mode(
    problem: &dyn FitnessProblem,
    m: MutationParams,
    length: usize,
    seed: u64,
    mode: WalkMode,
) -> Result<WalkTrace, LandscapeError> {
    if length < 2 {
        return Err(LandscapeError::WalkTooShort(length));
    }
    let bounds = problem.bounds();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let start: Candidate = bounds
        .lb()
        .iter()
        .zip(bounds.ub())
        .map(|(&lo, &hi)| rng.gen_range(lo..=hi))
        .collect();
    let mut seen = HashSet::new();
    if mode == WalkMode::GloballyDistinct {
        seen.insert(hash_key(&start));
    }
    let mut candidates = Vec::with_capacity(length);
    let mut fitness = Vec::with_capacity(length);
    fitness.push(problem.evaluate(&start));
    candidates.push(start);
    while candidates.len() < length {
        let current = candidates.last().expect("walk holds its start");
        let mut accepted = None;
        for _ in 0..RETRY_CAP {
            let step = mutate(current, bounds, m, &mut rng);
            let distinct = match mode {
                WalkMode::ConsecutiveDistinct => step != *current,
                WalkMode::GloballyDistinct => seen.insert(hash_key(&step)),
            };
            if distinct {
                accepted = Some(step);
                break;
            }
        }
        let Some(step) = accepted else {
            return Err(LandscapeError::RetrySaturation(RETRY_CAP));
        };
        fitness.push(problem.evaluate(&step));
        candidates.push(step);
    }
    Ok(WalkTrace {
        problem_name: problem.name().to_owned(),
        candidates,
        fitness,
        mutation: m,
        seed,
        mode,
    })
}

/// ρ̂ at one lag, over precomputed mean and denominator.
fn rho_at(fitness: &[f64], mean: f64, denominator: f64, k: usize) -> f64 {
    let numerator: f64 = fitness[..fitness.len() - k]
        .iter()
        .zip(&fitness[k..])
        .map(|(&a, &b)| (a - mean) * (b - mean))
        .sum();
    numerator / denominator
}

/// Fitness autocorrelation ρ̂(k) for k = 1..=k_max.
///
/// ρ̂(k) = [Σ_{t=1}^{ℓ−k} (f_t − f̄)(f_{t+k} − f̄)] / [Σ_{t=1}^{ℓ} (f_t − f̄)²]
/// with f̄ the mean over the whole series; the denominator runs over all ℓ
/// terms. A zero-variance series has no autocorrelation and errors out;
/// callers report nr = 1 for such walks instead of τ.
pub fn autocorrelation(fitness: &[f64], k_max: usize) -> Result<Vec<f64>, LandscapeError> {
    let length = fitness.len();
    if length < 2 {
        return Err(LandscapeError::WalkTooShort(length));
    }
    if k_max < 1 || k_max >= length {
        return Err(LandscapeError::InvalidLag { k_max, length });
    }
    let mean = fitness.iter().sum::<f64>() / length as f64;
    let denominator: f64 = fitness.iter().map(|&f| (f - mean) * (f - mean)).sum();
    if denominator == 0.0 {
        return Err(LandscapeError::DegenerateWalk);
    }
    debug_assert_eq!(rho_at(fitness, mean, denominator, 0), 1.0);
    Ok((1..=k_max).map(|k| rho_at(fitness, mean, denominator, k)).collect())
}

/// Autocorrelation length: the smallest lag k with |ρ̂(k)| < epsilon.
///
/// Returns `(τ, saturated)`; when no lag in `rho` crosses below epsilon the
/// length is capped at the last lag and flagged as saturated.
pub fn autocorrelation_length(rho: &[f64], epsilon: f64) -> Result<(usize, bool), LandscapeError> {
    if rho.is_empty() {
        return Err(LandscapeError::InvalidLag { k_max: 0, length: 0 });
    }
    if !(epsilon > 0.0) || !epsilon.is_finite() {
        return Err(LandscapeError::InvalidEpsilon(epsilon));
    }
    match rho.iter().position(|&r| r.abs() < epsilon) {
        Some(index) => Ok((index + 1, false)),
        None => Ok((rho.len(), true)),
    }
}

/// Neutral rate: the fraction of consecutive pairs with exactly equal
/// fitness. Exact equality is meaningful because every problem here is
/// deterministic.
pub fn neutral_rate(fitness: &[f64]) -> Result<f64, LandscapeError> {
    if fitness.len() < 2 {
        return Err(LandscapeError::WalkTooShort(fitness.len()));
    }
    let equal = fitness.windows(2).filter(|w| w[0] == w[1]).count();
    Ok(equal as f64 / (fitness.len() - 1) as f64)
}

/// Walks once and estimates both landscape features.
///
/// Uses the defaults matched to a length-ℓ walk: ε = 4/√ℓ and k_max = ℓ/4.
/// A zero-variance walk yields nr = 1 with no τ and an empty ρ̂ vector.
pub fn features(
    problem: &dyn FitnessProblem,
    m: MutationParams,
    length: usize,
    seed: u64,
) -> Result<LandscapeFeatures, LandscapeError> {
    features_with_mode(problem, m, length, seed, WalkMode::ConsecutiveDistinct)
}

/// As [`features`], with an explicit walk distinctness mode.
pub fn features_with_mode(
    problem: &dyn FitnessProblem,
    m: MutationParams,
    length: usize,
    seed: u64,
    mode: WalkMode,
) -> Result<LandscapeFeatures, LandscapeError> {
    let walk = random_walk_with_mode(problem, m, length, seed, mode)?;
    let epsilon = 4.0 / (length as f64).sqrt();
    let k_max = (length / 4).max(1);
    let nr = neutral_rate(&walk.fitness)?;
    let (rho, tau, tau_saturated) = match autocorrelation(&walk.fitness, k_max) {
        Ok(rho) => {
            let (tau, saturated) = autocorrelation_length(&rho, epsilon)?;
            (rho, Some(tau), saturated)
        }
        Err(LandscapeError::DegenerateWalk) => (Vec::new(), None, false),
        Err(err) => return Err(err),
    };
    Ok(LandscapeFeatures {
        p: m.p(),
        r: m.r(),
        length,
        rho,
        tau,
        tau_saturated,
        nr,
        epsilon,
    })
}
