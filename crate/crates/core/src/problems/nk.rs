//! NK-landscape benchmark with random epistatic links and an
//! exhaustive-enumeration oracle for small N.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{FitnessProblem, ProblemError};
use crate::space::{BoundsSpec, Candidate};

/// Largest N for which exhaustive enumeration stays affordable.
pub const MAX_N: usize = 24;

/// A binary-coded NK landscape, minimized.
///
/// Each of the N bits contributes a table value selected by the bit itself and
/// K random other bits; fitness is the mean contribution. Links and tables are
/// reproducible from the seed.
pub struct NkLandscape {
    n: usize,
    k: usize,
    links: Vec<Vec<usize>>,
    tables: Vec<Vec<f64>>,
    bounds: BoundsSpec,
    name: String,
}

impl NkLandscape {
    pub fn new(n: usize, k: usize, seed: u64) -> Result<Self, ProblemError> {
        if !(1 <= k && k < n && n <= MAX_N) {
            return Err(ProblemError::InvalidNkParams { n, k });
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let links: Vec<Vec<usize>> = (0..n)
            .map(|i| {
                let mut chosen = vec![i];
                while chosen.len() < k + 1 {
                    let j = rng.gen_range(0..n);
                    if !chosen.contains(&j) {
                        chosen.push(j);
                    }
                }
                chosen
            })
            .collect();
        let tables = (0..n)
            .map(|_| (0..1usize << (k + 1)).map(|_| rng.gen::<f64>()).collect())
            .collect();
        Ok(Self::assemble(n, k, links, tables, seed))
    }

    fn assemble(
        n: usize,
        k: usize,
        links: Vec<Vec<usize>>,
        tables: Vec<Vec<f64>>,
        seed: u64,
    ) -> Self {
        let bounds = BoundsSpec::new(vec![0; n], vec![1; n], vec![0; n])
            .expect("binary bounds are always valid");
        Self { n, k, links, tables, bounds, name: format!("nk-{n}-{k}-s{seed}") }
    }

    #[cfg(test)]
    fn with_tables(n: usize, k: usize, links: Vec<Vec<usize>>, tables: Vec<Vec<f64>>) -> Self {
        assert!(links.iter().all(|l| l.len() == k + 1));
        assert!(tables.iter().all(|t| t.len() == 1 << (k + 1)));
        Self::assemble(n, k, links, tables, 0)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    fn contribution_index(&self, i: usize, c: &[i64]) -> usize {
        self.links[i]
            .iter()
            .enumerate()
            .map(|(pos, &j)| (c[j] as usize & 1) << pos)
            .sum()
    }

    /// Candidate encoding of an enumeration index: bit j of `v` becomes x[j].
    fn decode(&self, v: u64) -> Candidate {
        (0..self.n).map(|j| ((v >> j) & 1) as i64).collect()
    }

    /// Scans all 2^N candidates and returns a global minimizer and its
    /// fitness (the first minimizer in enumeration order on ties).
    pub fn enumerate_optimum(&self) -> (Candidate, f64) {
        let mut best_v = 0u64;
        let mut best_f = f64::INFINITY;
        for v in 0..(1u64 << self.n) {
            let f = self.evaluate(&self.decode(v));
            if f < best_f {
                best_f = f;
                best_v = v;
            }
        }
        (self.decode(best_v), best_f)
    }
}

impl FitnessProblem for NkLandscape {
    fn name(&self) -> &str {
        &self.name
    }

    fn bounds(&self) -> &BoundsSpec {
        &self.bounds
    }

    fn evaluate(&self, c: &[i64]) -> f64 {
        debug_assert!(self.bounds.validate(c));
        let sum: f64 = (0..self.n)
            .map(|i| self.tables[i][self.contribution_index(i, c)])
            .sum();
        sum / self.n as f64
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_out_of_range_parameters() {
        assert!(NkLandscape::new(4, 0, 1).is_err());
        assert!(NkLandscape::new(4, 4, 1).is_err());
        assert!(NkLandscape::new(25, 2, 1).is_err());
        assert!(NkLandscape::new(16, 2, 1).is_ok());
    }

    #[test]
    fn is_reproducible_from_the_seed() {
        let a = NkLandscape::new(12, 3, 42).unwrap();
        let b = NkLandscape::new(12, 3, 42).unwrap();
        let c = NkLandscape::new(12, 3, 43).unwrap();
        let probe: Vec<Candidate> = (0..64).map(|v| a.decode(v * 61 % (1 << 12))).collect();
        assert!(probe.iter().all(|x| a.evaluate(x) == b.evaluate(x)));
        assert!(probe.iter().any(|x| a.evaluate(x) != c.evaluate(x)));
    }

    #[test]
    fn constant_tables_make_a_flat_landscape() {
        let links = vec![vec![0, 1], vec![1, 2], vec![2, 0]];
        let tables = vec![vec![0.5; 4]; 3];
        let nk = NkLandscape::with_tables(3, 1, links, tables);
        for v in 0..8 {
            assert_eq!(nk.evaluate(&nk.decode(v)), 0.5);
        }
    }

    #[test]
    fn full_fitness_table_matches_direct_recomputation() {
        let nk = NkLandscape::new(4, 1, 7).unwrap();
        for v in 0..16u64 {
            let c = nk.decode(v);
            // Recompute from the raw tables without contribution_index.
            let mut sum = 0.0;
            for i in 0..4 {
                let mut idx = 0usize;
                for (pos, &j) in nk.links[i].iter().enumerate() {
                    if c[j] == 1 {
                        idx |= 1 << pos;
                    }
                }
                sum += nk.tables[i][idx];
            }
            assert_eq!(nk.evaluate(&c), sum / 4.0, "candidate {v:04b}");
        }
    }

    #[test]
    fn enumerated_optimum_is_the_global_minimum() {
        let nk = NkLandscape::new(16, 2, 20260821).unwrap();
        let (best, best_f) = nk.enumerate_optimum();
        assert_eq!(nk.evaluate(&best), best_f);
        for v in (0..1u64 << 16).step_by(97) {
            assert!(nk.evaluate(&nk.decode(v)) >= best_f);
        }
    }

    #[test]
    fn links_are_distinct_and_anchored() {
        let nk = NkLandscape::new(20, 4, 9).unwrap();
        for (i, l) in nk.links.iter().enumerate() {
            assert_eq!(l[0], i);
            assert_eq!(l.len(), 5);
            let mut sorted = l.clone();
            sorted.sort_unstable();
            sorted.dedup();
            assert_eq!(sorted.len(), 5);
        }
    }
}
