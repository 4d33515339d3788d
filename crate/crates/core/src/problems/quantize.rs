//! Fitness quantization wrapper, used to induce plateaus.

use super::{FitnessProblem, ProblemError};
use crate::space::BoundsSpec;

/// Wraps a problem and floors its fitness onto a grid of the given grain:
/// fitness' = floor(fitness / grain) · grain. Candidates whose raw fitness
/// falls in the same cell become exactly equal, which creates the neutral
/// plateaus the drift-friendly acceptance rule exploits.
pub struct Quantized {
    inner: Box<dyn FitnessProblem>,
    grain: f64,
    name: String,
}

impl Quantized {
    pub fn new(inner: Box<dyn FitnessProblem>, grain: f64) -> Result<Self, ProblemError> {
        if !(grain > 0.0 && grain.is_finite()) {
            return Err(ProblemError::InvalidGrain(grain));
        }
        let name = format!("{}+q{grain}", inner.name());
        Ok(Self { inner, grain, name })
    }

    pub fn grain(&self) -> f64 {
        self.grain
    }

    pub fn inner(&self) -> &dyn FitnessProblem {
        self.inner.as_ref()
    }
}

impl FitnessProblem for Quantized {
    fn name(&self) -> &str {
        &self.name
    }

    fn bounds(&self) -> &BoundsSpec {
        self.inner.bounds()
    }

    fn evaluate(&self, c: &[i64]) -> f64 {
        (self.inner.evaluate(c) / self.grain).floor() * self.grain
    }

    fn nominal_cost(&self) -> f64 {
        self.inner.nominal_cost()
    }

    fn reference_fitness(&self) -> Option<f64> {
        self.inner.reference_fitness()?;
        let reference = self.inner.bounds().reference().to_vec();
        Some(self.evaluate(&reference))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problems::SeparableQuadratic;

    fn base() -> Box<dyn FitnessProblem> {
        let b = BoundsSpec::new(vec![0], vec![1000], vec![500]).unwrap();
        Box::new(SeparableQuadratic::new(b).unwrap())
    }

    #[test]
    fn rejects_nonpositive_grain() {
        assert!(Quantized::new(base(), 0.0).is_err());
        assert!(Quantized::new(base(), -0.1).is_err());
        assert!(Quantized::new(base(), f64::INFINITY).is_err());
    }

    #[test]
    fn fine_grain_is_almost_transparent() {
        let raw = base();
        let q = Quantized::new(base(), 1e-9).unwrap();
        for x in [0, 123, 500, 640, 1000] {
            assert!((q.evaluate(&[x]) - raw.evaluate(&[x])).abs() < 1e-8);
        }
    }

    #[test]
    fn floors_onto_the_grid() {
        struct Fixed(BoundsSpec);
        impl FitnessProblem for Fixed {
            fn name(&self) -> &str {
                "fixed"
            }
            fn bounds(&self) -> &BoundsSpec {
                &self.0
            }
            fn evaluate(&self, _c: &[i64]) -> f64 {
                0.123
            }
        }
        let b = BoundsSpec::new(vec![0], vec![1], vec![0]).unwrap();
        let q = Quantized::new(Box::new(Fixed(b)), 0.05).unwrap();
        assert!((q.evaluate(&[0]) - 0.10).abs() < 1e-15);
    }

    #[test]
    fn coarse_grain_merges_nearby_fitness_values() {
        let q = Quantized::new(base(), 0.25).unwrap();
        assert_eq!(q.evaluate(&[500]), q.evaluate(&[600]));
        assert!(q.evaluate(&[500]) < q.evaluate(&[1000]));
    }
}
