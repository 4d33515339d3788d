//! Separable quadratic test problem with a known optimum.

use super::{FitnessProblem, ProblemError};
use crate::space::BoundsSpec;

/// Sum of squared per-coordinate distances to the reference configuration,
/// each normalized by the variable's span. Smooth, plateau-free, and minimized
/// exactly at the reference, which makes it a convenient oracle for engine and
/// landscape tests.
pub struct SeparableQuadratic {
    bounds: BoundsSpec,
    name: String,
}

impl SeparableQuadratic {
    pub fn new(bounds: BoundsSpec) -> Result<Self, ProblemError> {
        for (j, &r) in bounds.reference().iter().enumerate() {
            if r < bounds.lb()[j] || r > bounds.ub()[j] {
                return Err(ProblemError::InvalidSurrogateConfig(format!(
                    "quadratic target (reference) must lie inside the bounds at variable {j}"
                )));
            }
        }
        Ok(Self { bounds, name: "quadratic".into() })
    }
}

impl FitnessProblem for SeparableQuadratic {
    fn name(&self) -> &str {
        &self.name
    }

    fn bounds(&self) -> &BoundsSpec {
        &self.bounds
    }

    fn evaluate(&self, c: &[i64]) -> f64 {
        debug_assert!(self.bounds.validate(c));
        c.iter()
            .enumerate()
            .map(|(j, &x)| {
                let span = (self.bounds.ub()[j] - self.bounds.lb()[j]).max(1) as f64;
                let d = (x - self.bounds.reference()[j]) as f64 / span;
                d * d
            })
            .sum()
    }

    fn reference_fitness(&self) -> Option<f64> {
        Some(0.0)
    }
}
