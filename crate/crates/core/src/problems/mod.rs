//! Fitness problems: the deterministic load-following surrogate, an
//! NK-landscape benchmark with an exhaustive-enumeration oracle, a separable
//! quadratic test problem, and a plateau-inducing quantization wrapper.

mod nk;
mod quadratic;
mod quantize;
mod surrogate;

pub use nk::NkLandscape;
pub use quadratic::SeparableQuadratic;
pub use quantize::Quantized;
pub use surrogate::{
    ps_insertion, tr_speed, DemandProfile, LoadFollowProblem, RodState, SimulationOutput,
    SurrogateConstants,
};

use thiserror::Error;

use crate::space::BoundsSpec;

#[derive(Debug, Error)]
pub enum ProblemError {
    #[error("trajectory needs at least 2 points (got {0})")]
    TrajectoryTooShort(usize),
    #[error("trajectory times must be strictly increasing (point {0})")]
    TrajectoryTimeOrder(usize),
    #[error("overlap {index} is {value}, outside [0, {height}]")]
    InvalidOverlap { index: usize, value: i64, height: i64 },
    #[error("NK parameters must satisfy 1 <= K < N <= 24 (got N = {n}, K = {k})")]
    InvalidNkParams { n: usize, k: usize },
    #[error("quantization grain must be a positive finite number (got {0})")]
    InvalidGrain(f64),
    #[error("invalid surrogate configuration: {0}")]
    InvalidSurrogateConfig(String),
    #[error(transparent)]
    Space(#[from] crate::space::SpaceError),
}

/// A black-box fitness function over an integer box, minimized.
///
/// Implementations must be deterministic (same candidate, same fitness) and
/// safe to evaluate concurrently.
pub trait FitnessProblem: Send + Sync {
    /// Stable identifier used in artifacts and the CLI registry.
    fn name(&self) -> &str;

    fn bounds(&self) -> &BoundsSpec;

    /// Fitness of a candidate that satisfies `bounds().validate`.
    fn evaluate(&self, c: &[i64]) -> f64;

    /// Expected cost of one evaluation in virtual seconds.
    fn nominal_cost(&self) -> f64 {
        2426.0
    }

    /// Fitness of the reference configuration, when normalizing by it makes
    /// sense for this problem.
    fn reference_fitness(&self) -> Option<f64> {
        None
    }
}

impl FitnessProblem for Box<dyn FitnessProblem> {
    fn name(&self) -> &str {
        (**self).name()
    }

    fn bounds(&self) -> &BoundsSpec {
        (**self).bounds()
    }

    fn evaluate(&self, c: &[i64]) -> f64 {
        (**self).evaluate(c)
    }

    fn nominal_cost(&self) -> f64 {
        (**self).nominal_cost()
    }

    fn reference_fitness(&self) -> Option<f64> {
        (**self).reference_fitness()
    }
}

/// One sample of the simulated core state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrajectoryPoint {
    /// Time in seconds.
    pub t: f64,
    /// Relative thermal power in [0, 1.05].
    pub p_r: f64,
    /// Axial offset in [-1, 1].
    pub ao: f64,
    /// Power axial imbalance, always `p_r * ao`.
    pub delta_i: f64,
}

/// Time-ordered core states traced by the surrogate.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    points: Vec<TrajectoryPoint>,
}

impl Trajectory {
    /// Builds a trajectory from (t, p_r, ao) samples, deriving ΔI = p_r · ao.
    pub fn from_states(
        states: impl IntoIterator<Item = (f64, f64, f64)>,
    ) -> Result<Self, ProblemError> {
        let points: Vec<TrajectoryPoint> = states
            .into_iter()
            .map(|(t, p_r, ao)| TrajectoryPoint { t, p_r, ao, delta_i: p_r * ao })
            .collect();
        for i in 1..points.len() {
            if points[i].t <= points[i - 1].t {
                return Err(ProblemError::TrajectoryTimeOrder(i));
            }
        }
        Ok(Self { points })
    }

    pub fn points(&self) -> &[TrajectoryPoint] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Power-weighted area between the operating path and the constant-axial-offset
/// reference line of the control diagram.
///
/// With samples i = 0..m-1, the reference line is ΔI_ref,i = p_r,i · AO_0
/// (AO_0 taken from the first sample), the deviation is
/// D_i = |ΔI_i - ΔI_ref,i|, and the criterion is the trapezoid-style sum
/// f = 1/4 · Σ_i |p²_{i+1} - p²_i| · (D_{i+1} + D_i), which is zero when the
/// path never leaves the reference line or power never changes.
pub fn control_diagram_criterion(traj: &Trajectory) -> Result<f64, ProblemError> {
    let pts = traj.points();
    if pts.len() < 2 {
        return Err(ProblemError::TrajectoryTooShort(pts.len()));
    }
    let ao_0 = pts[0].ao;
    let dev = |p: &TrajectoryPoint| (p.delta_i - p.p_r * ao_0).abs();
    let mut sum = 0.0;
    for pair in pts.windows(2) {
        let (a, b) = (&pair[0], &pair[1]);
        sum += (b.p_r * b.p_r - a.p_r * a.p_r).abs() * (dev(b) + dev(a));
    }
    Ok(0.25 * sum)
}
