//! Sobol low-discrepancy sequence generator.
//!
//! Gray-code construction with 32 bits of resolution per coordinate, using the
//! unscrambled Joe-Kuo D(6) direction numbers embedded in
//! [`crate::sobol_directions`]. Point 0 of the raw sequence is the all-zeros
//! corner; callers that want a spread of initial designs usually start at
//! index 1 (see [`crate::space::sobol_init`]).

use thiserror::Error;

use crate::sobol_directions::JOE_KUO_D6;

const BITS: usize = 32;

/// Largest supported dimension (the embedded direction-number table ends here).
pub const MAX_DIMENSION: usize = JOE_KUO_D6.len() + 1;

/// Number of points addressable by the 32-bit generator.
pub const MAX_POINTS: u64 = 1 << BITS;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SobolError {
    #[error("sobol dimension {0} unsupported (must be 1..={MAX_DIMENSION})")]
    DimensionUnsupported(usize),
    #[error("sobol index range [{start}, {end}) exceeds the generator capacity of 2^32 points")]
    IndexExhausted { start: u64, end: u64 },
}

/// Direction numbers `v_1..v_32` for one dimension, already shifted into place.
fn direction_vector(dim_index: usize) -> [u32; BITS] {
    let mut v = [0u32; BITS];
    if dim_index == 0 {
        for (j, slot) in v.iter_mut().enumerate() {
            *slot = 1 << (31 - j);
        }
        return v;
    }
    let (a, m) = JOE_KUO_D6[dim_index - 1];
    let s = m.len();
    for j in 0..s.min(BITS) {
        v[j] = m[j] << (31 - j);
    }
    for j in s..BITS {
        let mut x = v[j - s] ^ (v[j - s] >> s);
        for k in 1..s {
            if (a >> (s - 1 - k)) & 1 == 1 {
                x ^= v[j - k];
            }
        }
        v[j] = x;
    }
    v
}

/// Streaming Sobol point generator over a fixed dimension.
#[derive(Debug, Clone)]
pub struct SobolSequence {
    directions: Vec<[u32; BITS]>,
    state: Vec<u32>,
    index: u64,
}

impl SobolSequence {
    /// Creates a generator positioned on point 0 (the all-zeros point).
    pub fn new(dimension: usize) -> Result<Self, SobolError> {
        if dimension == 0 || dimension > MAX_DIMENSION {
            return Err(SobolError::DimensionUnsupported(dimension));
        }
        Ok(Self {
            directions: (0..dimension).map(direction_vector).collect(),
            state: vec![0; dimension],
            index: 0,
        })
    }

    pub fn dimension(&self) -> usize {
        self.state.len()
    }

    /// Index of the point currently held in the generator state.
    pub fn index(&self) -> u64 {
        self.index
    }

    /// Jumps directly to an arbitrary point index.
    ///
    /// Uses the Gray-code expansion of the index, so the cost is O(dim * 32)
    /// regardless of the distance jumped.
    pub fn seek(&mut self, index: u64) -> Result<(), SobolError> {
        if index >= MAX_POINTS {
            return Err(SobolError::IndexExhausted { start: index, end: index + 1 });
        }
        let gray = (index ^ (index >> 1)) as u32;
        for (d, dirs) in self.directions.iter().enumerate() {
            let mut x = 0u32;
            for (j, &v) in dirs.iter().enumerate() {
                if (gray >> j) & 1 == 1 {
                    x ^= v;
                }
            }
            self.state[d] = x;
        }
        self.index = index;
        Ok(())
    }

    /// Advances to the next point and returns its coordinates as 32-bit
    /// fixed-point fractions (`x / 2^32` is the point in `[0, 1)`).
    pub fn next_raw(&mut self) -> Result<&[u32], SobolError> {
        let next = self.index + 1;
        if next >= MAX_POINTS {
            return Err(SobolError::IndexExhausted { start: next, end: next + 1 });
        }
        // Gray-code step: flip by the direction number of the lowest zero bit.
        let bit = self.index.trailing_ones() as usize;
        for (d, dirs) in self.directions.iter().enumerate() {
            self.state[d] ^= dirs[bit];
        }
        self.index = next;
        Ok(&self.state)
    }

    /// The current point as floats in `[0, 1)`.
    pub fn point_f64(&self) -> Vec<f64> {
        self.state.iter().map(|&x| x as f64 / MAX_POINTS as f64).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn nth_point(dim: usize, index: u64) -> Vec<f64> {
        let mut seq = SobolSequence::new(dim).unwrap();
        seq.seek(index).unwrap();
        seq.point_f64()
    }

    #[test]
    fn first_dimension_matches_reference() {
        // Reference points generated with scipy.stats.qmc.Sobol(scramble=False),
        // which uses the same Joe-Kuo D(6) direction numbers. All values below
        // are dyadic rationals, hence exact in f64.
        let expected = [0.0, 0.5, 0.75, 0.25, 0.375, 0.875, 0.625, 0.125, 0.1875];
        let mut seq = SobolSequence::new(1).unwrap();
        assert_eq!(seq.point_f64()[0], expected[0]);
        for &e in &expected[1..] {
            seq.next_raw().unwrap();
            assert_eq!(seq.point_f64()[0], e);
        }
    }

    #[test]
    fn eleven_dimensions_match_reference() {
        // scipy.stats.qmc.Sobol(11, scramble=False).random(9), rows 1..8.
        let expected: [[f64; 11]; 8] = [
            [0.5; 11],
            [0.75, 0.25, 0.25, 0.25, 0.75, 0.75, 0.25, 0.75, 0.75, 0.75, 0.75],
            [0.25, 0.75, 0.75, 0.75, 0.25, 0.25, 0.75, 0.25, 0.25, 0.25, 0.25],
            [0.375, 0.375, 0.625, 0.875, 0.375, 0.125, 0.375, 0.875, 0.875, 0.625, 0.875],
            [0.875, 0.875, 0.125, 0.375, 0.875, 0.625, 0.875, 0.375, 0.375, 0.125, 0.375],
            [0.625, 0.125, 0.875, 0.625, 0.625, 0.875, 0.125, 0.125, 0.125, 0.375, 0.125],
            [0.125, 0.625, 0.375, 0.125, 0.125, 0.375, 0.625, 0.625, 0.625, 0.875, 0.625],
            [0.1875, 0.3125, 0.9375, 0.4375, 0.5625, 0.3125, 0.4375, 0.9375, 0.9375, 0.3125, 0.6875],
        ];
        for (i, row) in expected.iter().enumerate() {
            assert_eq!(nth_point(11, i as u64 + 1), row.to_vec(), "index {}", i + 1);
        }
    }

    #[test]
    fn seek_agrees_with_stepping() {
        let mut stepped = SobolSequence::new(7).unwrap();
        for index in 1..300u64 {
            stepped.next_raw().unwrap();
            let jumped = nth_point(7, index);
            assert_eq!(stepped.point_f64(), jumped, "index {index}");
        }
    }

    #[test]
    fn one_dimensional_blocks_are_equidistributed() {
        // For every valid Sobol dimension the first 2^k points, scaled by 2^k,
        // form a permutation of 0..2^k. Checks the direction-number recurrence.
        let dim = MAX_DIMENSION.min(64);
        let k = 10u32;
        let mut seq = SobolSequence::new(dim).unwrap();
        let mut buckets = vec![vec![false; 1 << k]; dim];
        for d in 0..dim {
            buckets[d][0] = true; // point 0
        }
        for _ in 1..(1u64 << k) {
            let raw = seq.next_raw().unwrap();
            for (d, &x) in raw.iter().enumerate() {
                let cell = (x >> (32 - k)) as usize;
                assert!(!buckets[d][cell], "dimension {d} revisits cell {cell}");
                buckets[d][cell] = true;
            }
        }
    }

    #[test]
    fn rejects_unsupported_dimension() {
        assert_eq!(
            SobolSequence::new(MAX_DIMENSION + 1).unwrap_err(),
            SobolError::DimensionUnsupported(MAX_DIMENSION + 1)
        );
        assert!(SobolSequence::new(0).is_err());
    }
}
