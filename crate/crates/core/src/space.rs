//! Integer box search space: bounds with an exemption list for out-of-range
//! reference values, candidate validation, Sobol quasi-random initialization,
//! the bounded-range mutation operator, and canonical candidate hashing.

use std::collections::BTreeSet;

use rand::Rng;
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::sobol::{SobolError, SobolSequence, MAX_POINTS};

/// A candidate solution: one integer per decision variable.
pub type Candidate = Vec<i64>;

#[derive(Debug, Error)]
pub enum SpaceError {
    #[error("bounds vectors must share one nonzero length (got names {names}, lb {lb}, ub {ub}, reference {reference})")]
    MismatchedLengths { names: usize, lb: usize, ub: usize, reference: usize },
    #[error("variable {index} has lb {lb} > ub {ub}")]
    InvertedBounds { index: usize, lb: i64, ub: i64 },
    #[error("variable {index} has reference {value} outside [{lb}, {ub}] and no exemption")]
    ReferenceOutOfBounds { index: usize, value: i64, lb: i64, ub: i64 },
    #[error("exemption index {0} is out of range")]
    ExemptIndexOutOfRange(usize),
    #[error("variable {index} spans more than 2^62 values")]
    SpanTooLarge { index: usize },
    #[error("mutation rate p = {0} outside (0, 1]")]
    InvalidMutationRate(f64),
    #[error("mutation range width r = {0} outside (0, 0.5]")]
    InvalidMutationRange(f64),
    #[error(transparent)]
    Sobol(#[from] SobolError),
}

/// Bounds, names, and the reference configuration of an integer box space.
///
/// Every coordinate has inclusive integer bounds `lb[j] ..= ub[j]`. The
/// reference configuration normally lies inside the box; coordinates listed in
/// the exemption set may instead carry an out-of-range reference value, which
/// is accepted by [`BoundsSpec::validate`] only when a candidate matches it
/// exactly. The search itself always stays inside the bounds.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoundsSpec {
    names: Vec<String>,
    lb: Vec<i64>,
    ub: Vec<i64>,
    reference: Vec<i64>,
    exempt: BTreeSet<usize>,
}

impl BoundsSpec {
    /// Builds a spec with explicit variable names.
    pub fn named(
        names: Vec<String>,
        lb: Vec<i64>,
        ub: Vec<i64>,
        reference: Vec<i64>,
        exempt: &[usize],
    ) -> Result<Self, SpaceError> {
        if names.is_empty() || names.len() != lb.len() || lb.len() != ub.len() || ub.len() != reference.len() {
            return Err(SpaceError::MismatchedLengths {
                names: names.len(),
                lb: lb.len(),
                ub: ub.len(),
                reference: reference.len(),
            });
        }
        let exempt: BTreeSet<usize> = exempt.iter().copied().collect();
        if let Some(&bad) = exempt.iter().find(|&&j| j >= lb.len()) {
            return Err(SpaceError::ExemptIndexOutOfRange(bad));
        }
        for j in 0..lb.len() {
            if lb[j] > ub[j] {
                return Err(SpaceError::InvertedBounds { index: j, lb: lb[j], ub: ub[j] });
            }
            if (ub[j] as i128 - lb[j] as i128) >= (1i128 << 62) {
                return Err(SpaceError::SpanTooLarge { index: j });
            }
            if !exempt.contains(&j) && (reference[j] < lb[j] || reference[j] > ub[j]) {
                return Err(SpaceError::ReferenceOutOfBounds {
                    index: j,
                    value: reference[j],
                    lb: lb[j],
                    ub: ub[j],
                });
            }
        }
        Ok(Self { names, lb, ub, reference, exempt })
    }

    /// Builds a spec with generated names `x0, x1, ...`.
    pub fn new(lb: Vec<i64>, ub: Vec<i64>, reference: Vec<i64>) -> Result<Self, SpaceError> {
        let names = (0..lb.len()).map(|j| format!("x{j}")).collect();
        Self::named(names, lb, ub, reference, &[])
    }

    pub fn dimension(&self) -> usize {
        self.lb.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn lb(&self) -> &[i64] {
        &self.lb
    }

    pub fn ub(&self) -> &[i64] {
        &self.ub
    }

    pub fn reference(&self) -> &[i64] {
        &self.reference
    }

    pub fn exempt(&self) -> impl Iterator<Item = usize> + '_ {
        self.exempt.iter().copied()
    }

    /// True iff every coordinate is inside its bounds, allowing exempt
    /// coordinates to sit exactly on their reference value instead.
    ///
    /// # Panics
    /// Panics on dimension mismatch; that is a caller bug.
    pub fn validate(&self, c: &[i64]) -> bool {
        assert_eq!(c.len(), self.dimension(), "candidate dimension mismatch");
        c.iter().enumerate().all(|(j, &x)| {
            (self.lb[j] <= x && x <= self.ub[j])
                || (self.exempt.contains(&j) && x == self.reference[j])
        })
    }
}

/// Mutation operator parameters: per-coordinate rate `p` and relative range
/// width `r`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MutationParams {
    p: f64,
    r: f64,
}

impl MutationParams {
    pub fn new(p: f64, r: f64) -> Result<Self, SpaceError> {
        if !(p > 0.0 && p <= 1.0) {
            return Err(SpaceError::InvalidMutationRate(p));
        }
        if !(r > 0.0 && r <= 0.5) {
            return Err(SpaceError::InvalidMutationRange(r));
        }
        Ok(Self { p, r })
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    /// Half-width of the redraw interval for a variable spanning `[lb, ub]`.
    ///
    /// The nominal width floor(r * (ub - lb)) is raised to 1 whenever the
    /// variable has any room at all, so that narrow (for example binary)
    /// variables remain mutable; a fixed variable (lb = ub) keeps width 0 and
    /// is skipped by [`mutate`].
    pub fn delta(&self, lb: i64, ub: i64) -> i64 {
        debug_assert!(lb <= ub);
        if ub == lb {
            return 0;
        }
        let nominal = (self.r * (ub - lb) as f64).floor() as i64;
        nominal.max(1)
    }
}

/// Streams candidates from one seeded window of the Sobol sequence.
///
/// Each seed selects a disjoint 2^16-point window of the underlying sequence
/// (the all-zeros point 0 is always skipped), so distinct seeds give distinct
/// initial designs while a fixed seed replays the identical stream. Drawing
/// past the window simply continues the sequence.
pub struct SobolSampler {
    seq: SobolSequence,
    lb: Vec<i64>,
    span: Vec<u64>,
}

const SOBOL_WINDOW: u64 = 1 << 16;

impl SobolSampler {
    pub fn new(bounds: &BoundsSpec, seed: u64) -> Result<Self, SpaceError> {
        let mut seq = SobolSequence::new(bounds.dimension())?;
        let windows = (MAX_POINTS - 1) / SOBOL_WINDOW;
        let start = 1 + (seed % windows) * SOBOL_WINDOW;
        seq.seek(start - 1)?;
        let span = bounds
            .lb()
            .iter()
            .zip(bounds.ub())
            .map(|(&lo, &hi)| (hi as i128 - lo as i128 + 1) as u64)
            .collect();
        Ok(Self { seq, lb: bounds.lb().to_vec(), span })
    }

    /// Next candidate of the stream, mapped into the integer box.
    pub fn next_candidate(&mut self) -> Result<Candidate, SpaceError> {
        let raw = self.seq.next_raw()?;
        Ok(raw
            .iter()
            .zip(self.lb.iter().zip(&self.span))
            .map(|(&u, (&lo, &span))| {
                let offset = ((u as u128 * span as u128) >> 32) as i64;
                (lo + offset).min(lo + span as i64 - 1)
            })
            .collect())
    }
}

/// First `count` candidates of the seeded Sobol stream over `bounds`.
///
/// Coordinates are mapped as x[j] = lb[j] + floor(u_j * (ub[j] - lb[j] + 1))
/// from Sobol points u in [0, 1)^n. Duplicate integer vectors are possible on
/// narrow boxes; deduplication is the engine's job.
pub fn sobol_init(bounds: &BoundsSpec, count: usize, seed: u64) -> Result<Vec<Candidate>, SpaceError> {
    let mut sampler = SobolSampler::new(bounds, seed)?;
    (0..count).map(|_| sampler.next_candidate()).collect()
}

/// One application of the bounded-range mutation operator.
///
/// Every coordinate is independently selected with probability `p`; a selected
/// coordinate is redrawn uniformly from [x_j - δ_j, x_j + δ_j] ∩ [lb_j, ub_j]
/// minus the current value, with δ_j from [`MutationParams::delta`]. The
/// result may equal the input when no coordinate is selected; the
/// retry-until-unseen loop belongs to the engine.
pub fn mutate<R: Rng + ?Sized>(
    c: &[i64],
    bounds: &BoundsSpec,
    m: MutationParams,
    rng: &mut R,
) -> Candidate {
    debug_assert!(bounds.validate(c));
    let mut out = c.to_vec();
    for j in 0..out.len() {
        if rng.gen::<f64>() >= m.p() {
            continue;
        }
        let (lb, ub) = (bounds.lb()[j], bounds.ub()[j]);
        let delta = m.delta(lb, ub);
        if delta == 0 {
            log::debug!("degenerate range on variable {j}: lb = ub = {lb}, mutation skipped");
            continue;
        }
        let x = out[j];
        let lo = x.saturating_sub(delta).max(lb);
        let hi = x.saturating_add(delta).min(ub);
        if lo > hi {
            log::debug!("empty redraw interval on variable {j} at {x}, mutation skipped");
            continue;
        }
        let excludes_current = lo <= x && x <= hi;
        let size = hi - lo + 1 - i64::from(excludes_current);
        if size <= 0 {
            log::debug!("redraw interval on variable {j} holds only the current value, mutation skipped");
            continue;
        }
        let mut draw = lo + rng.gen_range(0..size);
        if excludes_current && draw >= x {
            draw += 1;
        }
        out[j] = draw;
    }
    out
}

/// Canonical 128-bit key of a candidate, for the master's seen-set.
///
/// The key is the first half of a SHA-256 digest over the dimension and the
/// little-endian coordinate bytes, so equal vectors collide deliberately and
/// unequal vectors collide with negligible probability.
pub fn hash_key(c: &[i64]) -> u128 {
    let mut buf = Vec::with_capacity(8 + 8 * c.len());
    buf.extend_from_slice(&(c.len() as u64).to_le_bytes());
    for &x in c {
        buf.extend_from_slice(&x.to_le_bytes());
    }
    let digest = Sha256::digest(&buf);
    let mut key = [0u8; 16];
    key.copy_from_slice(&digest[..16]);
    u128::from_le_bytes(key)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::collections::HashSet;

    fn plain_bounds(lb: i64, ub: i64, n: usize) -> BoundsSpec {
        BoundsSpec::new(vec![lb; n], vec![ub; n], vec![lb; n]).unwrap()
    }

    #[test]
    fn validate_accepts_inclusive_bounds() {
        let b = plain_bounds(0, 10, 3);
        assert!(b.validate(&[0, 10, 5]));
        assert!(!b.validate(&[-1, 10, 5]));
        assert!(!b.validate(&[0, 11, 5]));
    }

    #[test]
    fn validate_accepts_exempt_reference_values_only() {
        let b = BoundsSpec::named(
            vec!["a".into(), "b".into()],
            vec![3, 3],
            vec![13, 13],
            vec![72, 8],
            &[0, 1],
        )
        .unwrap();
        assert!(b.validate(b.reference()));
        assert!(b.validate(&[5, 8]));
        assert!(!b.validate(&[71, 8]));
        assert!(!b.validate(&[14, 8]));
    }

    #[test]
    fn constructor_rejects_bad_specs() {
        assert!(BoundsSpec::new(vec![0], vec![-1], vec![0]).is_err());
        assert!(BoundsSpec::new(vec![0, 0], vec![1], vec![0, 0]).is_err());
        assert!(BoundsSpec::new(vec![0], vec![1], vec![2]).is_err());
        assert!(BoundsSpec::named(
            vec!["a".into()],
            vec![0],
            vec![1],
            vec![0],
            &[3],
        )
        .is_err());
    }

    #[test]
    fn mutation_params_are_range_checked() {
        assert!(MutationParams::new(0.0, 0.1).is_err());
        assert!(MutationParams::new(1.1, 0.1).is_err());
        assert!(MutationParams::new(0.1, 0.0).is_err());
        assert!(MutationParams::new(0.1, 0.6).is_err());
        assert!(MutationParams::new(1.0, 0.5).is_ok());
    }

    #[test]
    fn delta_matches_formula_and_keeps_narrow_ranges_alive() {
        let m = MutationParams::new(0.1, 0.05).unwrap();
        assert_eq!(m.delta(10, 110), 5);
        let m = MutationParams::new(0.1, 0.5).unwrap();
        assert_eq!(m.delta(0, 255), 127);
        assert_eq!(m.delta(0, 1), 1);
        assert_eq!(m.delta(7, 7), 0);
        let m = MutationParams::new(0.1, 0.05).unwrap();
        assert_eq!(m.delta(0, 10), 1);
    }

    #[test]
    fn sobol_init_covers_binary_range() {
        let b = plain_bounds(0, 1, 1);
        for c in sobol_init(&b, 2, 0).unwrap() {
            assert!(c[0] == 0 || c[0] == 1);
        }
    }

    #[test]
    fn sobol_init_first_points_match_reference_sequence() {
        // Points 1..4 of the one-dimensional sequence are 0.5, 0.75, 0.25,
        // 0.375; over [0, 3] they map to 2, 3, 1, 1.
        let b = plain_bounds(0, 3, 1);
        let pts: Vec<i64> = sobol_init(&b, 4, 0).unwrap().into_iter().map(|c| c[0]).collect();
        assert_eq!(pts, vec![2, 3, 1, 1]);
        let distinct: HashSet<i64> = pts.into_iter().collect();
        assert!(distinct.len() >= 3);
    }

    #[test]
    fn sobol_init_is_deterministic_and_seed_sensitive() {
        let b = plain_bounds(-5, 90, 4);
        let a1 = sobol_init(&b, 64, 7).unwrap();
        let a2 = sobol_init(&b, 64, 7).unwrap();
        let other = sobol_init(&b, 64, 8).unwrap();
        assert_eq!(a1, a2);
        assert_ne!(a1, other);
        for c in &a1 {
            assert!(b.validate(c));
        }
    }

    #[test]
    fn sampler_continues_past_the_initial_window() {
        let b = plain_bounds(0, 1000, 2);
        let mut sampler = SobolSampler::new(&b, 3).unwrap();
        for _ in 0..(SOBOL_WINDOW + 10) {
            let c = sampler.next_candidate().unwrap();
            assert!(b.validate(&c));
        }
    }

    #[test]
    fn mutate_redraws_within_the_clamped_interval() {
        let b = plain_bounds(10, 110, 1);
        let m = MutationParams::new(1.0, 0.05).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let mut observed = HashSet::new();
        for _ in 0..5000 {
            let c = mutate(&[60], &b, m, &mut rng);
            assert!((55..=65).contains(&c[0]));
            assert_ne!(c[0], 60);
            observed.insert(c[0]);
        }
        let expected: HashSet<i64> = (55..=65).filter(|&v| v != 60).collect();
        assert_eq!(observed, expected);
    }

    #[test]
    fn mutate_clamps_at_the_lower_bound() {
        let b = plain_bounds(0, 255, 1);
        let m = MutationParams::new(1.0, 0.5).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let (mut lo_seen, mut hi_seen) = (i64::MAX, i64::MIN);
        for _ in 0..20000 {
            let c = mutate(&[0], &b, m, &mut rng);
            assert!((1..=127).contains(&c[0]));
            lo_seen = lo_seen.min(c[0]);
            hi_seen = hi_seen.max(c[0]);
        }
        assert_eq!(lo_seen, 1);
        assert_eq!(hi_seen, 127);
    }

    #[test]
    fn mutate_modifies_the_binomial_share_of_coordinates() {
        let n = 11;
        let p = 0.1;
        let b = plain_bounds(0, 1000, n);
        let m = MutationParams::new(p, 0.2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let trials = 100_000u64;
        let x = vec![500i64; n];
        let mut modified = 0u64;
        for _ in 0..trials {
            let c = mutate(&x, &b, m, &mut rng);
            modified += c.iter().zip(&x).filter(|(a, b)| a != b).count() as u64;
        }
        let mean = modified as f64 / trials as f64;
        let expect = n as f64 * p;
        let se = (n as f64 * p * (1.0 - p) / trials as f64).sqrt();
        assert!(
            (mean - expect).abs() <= 3.0 * se,
            "mean {mean} not within 3 standard errors ({se}) of {expect}"
        );
    }

    #[test]
    fn mutate_leaves_exempt_reference_coordinates_reachable_into_bounds() {
        let b = BoundsSpec::named(
            vec!["V".into()],
            vec![3],
            vec![13],
            vec![72],
            &[0],
        )
        .unwrap();
        let m = MutationParams::new(1.0, 0.5).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        // From the out-of-range reference value the redraw interval misses the
        // box entirely, so the coordinate is left unchanged and stays valid by
        // exemption.
        let c = mutate(&[72], &b, m, &mut rng);
        assert_eq!(c, vec![72]);
        assert!(b.validate(&c));
    }

    #[test]
    fn hash_key_separates_close_vectors() {
        assert_eq!(hash_key(&[1, 2, 3]), hash_key(&[1, 2, 3]));
        assert_ne!(hash_key(&[1, 2, 3]), hash_key(&[1, 2, 4]));
        assert_ne!(hash_key(&[1, 2]), hash_key(&[1, 2, 0]));
        assert_ne!(hash_key(&[]), hash_key(&[0]));
    }

    #[test]
    fn hash_key_has_no_collisions_over_a_million_random_candidates() {
        let b = BoundsSpec::new(
            vec![0, 0, 0, 10, 10, 10, 10, 3, 3, 7, 8],
            vec![255, 255, 255, 110, 110, 110, 110, 13, 13, 117, 16],
            vec![0, 0, 0, 10, 10, 10, 10, 3, 3, 7, 8],
        )
        .unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut vectors = HashSet::new();
        let mut keys = HashSet::new();
        let mut collisions = 0;
        for _ in 0..1_000_000 {
            let c: Candidate = b
                .lb()
                .iter()
                .zip(b.ub())
                .map(|(&lo, &hi)| rng.gen_range(lo..=hi))
                .collect();
            let key = hash_key(&c);
            if vectors.insert(c) && !keys.insert(key) {
                collisions += 1;
            }
        }
        assert_eq!(collisions, 0);
    }

    proptest! {
        #[test]
        fn mutation_closure_and_locality(
            seed in any::<u64>(),
            p in 0.01f64..=1.0,
            r in 0.01f64..=0.5,
            dims in proptest::collection::vec((-50i64..=50, 0i64..=200), 1..8),
            sel in any::<u64>(),
        ) {
            let lb: Vec<i64> = dims.iter().map(|&(lo, _)| lo).collect();
            let ub: Vec<i64> = dims.iter().map(|&(lo, span)| lo + span).collect();
            let b = BoundsSpec::new(lb.clone(), ub.clone(), lb.clone()).unwrap();
            let m = MutationParams::new(p, r).unwrap();
            let mut pick = ChaCha8Rng::seed_from_u64(sel);
            let x: Candidate = lb.iter().zip(&ub).map(|(&lo, &hi)| pick.gen_range(lo..=hi)).collect();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let y = mutate(&x, &b, m, &mut rng);
            prop_assert!(b.validate(&y));
            for j in 0..x.len() {
                let delta = m.delta(lb[j], ub[j]);
                prop_assert!((y[j] - x[j]).abs() <= delta, "coordinate {} moved {} > delta {}", j, (y[j] - x[j]).abs(), delta);
            }
        }

        #[test]
        fn full_rate_mutation_always_changes_free_coordinates(seed in any::<u64>()) {
            let b = BoundsSpec::new(vec![0; 5], vec![9; 5], vec![0; 5]).unwrap();
            let m = MutationParams::new(1.0, 0.3).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let x = vec![4i64; 5];
            let y = mutate(&x, &b, m, &mut rng);
            for j in 0..5 {
                prop_assert_ne!(y[j], x[j]);
            }
        }
    }
}
