//! Deterministic load-following surrogate.
//!
//! The model keeps the control structure of a pressurized-water core under
//! load following: shim rod groups inserted in an overlapped program driven by
//! a totalizer that tracks demand through a calibration line, a
//! temperature-regulation rod moved by a dead-band speed controller inside a
//! maneuvering band, a first-order core temperature lag, and a two-zone axial
//! offset that drifts with inserted absorber and relaxes toward an
//! equilibrium. Fitness is the control-diagram criterion of the resulting
//! trajectory. Everything is intentionally coarse; the point is a fast,
//! deterministic fitness whose eleven design variables all influence the
//! criterion in physically plausible directions.

use super::{control_diagram_criterion, FitnessProblem, ProblemError, Trajectory};
use crate::space::BoundsSpec;

/// Rod positions at one simulated instant, in steps.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RodState {
    /// Master insertion counter driving the overlap program.
    pub totalizer: i64,
    /// Insertion depth of the four shim groups, in program order.
    pub insertions: [i64; 4],
    /// Regulation rod position inside the maneuvering band.
    pub tr_position: i64,
}

/// Trajectory plus the rod states that produced it.
#[derive(Debug, Clone, PartialEq)]
pub struct SimulationOutput {
    pub trajectory: Trajectory,
    pub rod_states: Vec<RodState>,
}

/// Shim group insertions for a totalizer value under the overlap program.
///
/// Group k+1 starts moving once group k has travelled (height - o_k) steps;
/// all engaged groups advance one step per totalizer step. The totalizer is
/// clamped into [0, 4·height - o1 - o2 - o3], the range the program can
/// realize.
pub fn ps_insertion(
    totalizer: i64,
    overlaps: (i64, i64, i64),
    height: i64,
) -> Result<[i64; 4], ProblemError> {
    let os = [overlaps.0, overlaps.1, overlaps.2];
    for (index, &o) in os.iter().enumerate() {
        if o < 0 || o > height {
            return Err(ProblemError::InvalidOverlap { index, value: o, height });
        }
    }
    let starts = group_starts(&os, height);
    let total = starts[3] + height;
    let t = totalizer.clamp(0, total);
    Ok(starts.map(|s| (t - s).clamp(0, height)))
}

fn group_starts(overlaps: &[i64; 3], height: i64) -> [i64; 4] {
    let mut starts = [0i64; 4];
    for k in 1..4 {
        starts[k] = starts[k - 1] + (height - overlaps[k - 1]);
    }
    starts
}

/// Commanded regulation rod speed for a temperature error, in steps/min.
///
/// Zero inside the dead band, sign(dT)·vmax beyond the 2.8 °C knee, and a
/// linear ramp from vmin to vmax in between; the speed magnitude jumps from 0
/// to vmin when |dT| leaves the dead band.
pub fn tr_speed(dt_c: f64, dead_band_c: f64, vmax: f64, vmin: f64) -> f64 {
    tr_speed_with_knee(dt_c, dead_band_c, vmax, vmin, DEFAULT_RAMP_KNEE_C)
}

/// Temperature error at which the regulation rods reach full speed.
pub const DEFAULT_RAMP_KNEE_C: f64 = 2.8;

fn tr_speed_with_knee(dt_c: f64, dead_band_c: f64, vmax: f64, vmin: f64, knee_c: f64) -> f64 {
    debug_assert!(dead_band_c > 0.0 && vmin > 0.0 && vmin <= vmax);
    let a = dt_c.abs();
    if a <= dead_band_c {
        return 0.0;
    }
    let magnitude = if a >= knee_c || knee_c <= dead_band_c {
        vmax
    } else {
        vmin + (vmax - vmin) * (a - dead_band_c) / (knee_c - dead_band_c)
    };
    magnitude * dt_c.signum()
}

/// All tunable physics constants of the surrogate, in one block.
#[derive(Debug, Clone, PartialEq)]
pub struct SurrogateConstants {
    /// Travel of one shim group, in steps.
    pub rod_height: i64,
    /// Totalizer steps commanded at `calib_low_power` (full extraction is
    /// commanded at 100% power); the calibration line is linear in between.
    pub calib_max_totalizer: f64,
    /// Relative power at which the calibration line reaches its maximum.
    pub calib_low_power: f64,
    /// Programmed coolant temperature at full power, in °C.
    pub temp_program_base_c: f64,
    /// Slope of the programmed temperature in °C per unit of relative power.
    pub temp_program_slope_c: f64,
    /// Equilibrium temperature shift per step of calibration tracking error.
    pub temp_error_gain_c: f64,
    /// Equilibrium temperature drop per step of regulation rod insertion
    /// beyond the band midpoint.
    pub tr_cooling_gain_c: f64,
    /// First-order core temperature time constant, in seconds.
    pub temp_lag_s: f64,
    /// Axial offset drift rate per unit of inserted absorber fraction, 1/s.
    pub ao_absorber_gain: f64,
    /// Axial offset relaxation rate toward its equilibrium, 1/s.
    pub ao_relax_rate: f64,
    /// Axial offset equilibrium at zero inserted absorber.
    pub ao_equilibrium: f64,
    /// Affine decode of the two encoded regulation rod speeds into steps/min.
    pub tr_speed_scale: f64,
    pub tr_speed_offset: f64,
    /// Decode of the encoded dead band into °C.
    pub dead_band_scale_c: f64,
    /// Temperature error at which regulation rods reach full speed, in °C.
    pub ramp_knee_c: f64,
    /// Simulation time step, in seconds.
    pub time_step_s: f64,
}

impl Default for SurrogateConstants {
    fn default() -> Self {
        Self {
            rod_height: 255,
            calib_max_totalizer: 700.0,
            calib_low_power: 0.25,
            temp_program_base_c: 305.0,
            temp_program_slope_c: 2.0,
            temp_error_gain_c: 0.02,
            tr_cooling_gain_c: 0.05,
            temp_lag_s: 300.0,
            ao_absorber_gain: 0.5 / 1800.0,
            ao_relax_rate: 1.0 / 1800.0,
            ao_equilibrium: 0.05,
            tr_speed_scale: 1.0,
            tr_speed_offset: 0.0,
            dead_band_scale_c: 0.1,
            ramp_knee_c: DEFAULT_RAMP_KNEE_C,
            time_step_s: 60.0,
        }
    }
}

impl SurrogateConstants {
    fn check(&self) -> Result<(), ProblemError> {
        let bad = |msg: &str| Err(ProblemError::InvalidSurrogateConfig(msg.into()));
        if self.rod_height < 1 {
            return bad("rod_height must be at least 1 step");
        }
        if !(self.calib_low_power > 0.0 && self.calib_low_power < 1.0) {
            return bad("calib_low_power must lie strictly between 0 and 1");
        }
        if self.calib_max_totalizer < 0.0 {
            return bad("calib_max_totalizer must be nonnegative");
        }
        if !(self.temp_lag_s > 0.0) || !(self.time_step_s > 0.0) {
            return bad("temp_lag_s and time_step_s must be positive");
        }
        if !(self.ao_relax_rate > 0.0) || self.ao_absorber_gain < 0.0 {
            return bad("ao_relax_rate must be positive and ao_absorber_gain nonnegative");
        }
        if !(self.tr_speed_scale > 0.0) || self.tr_speed_offset < 0.0 {
            return bad("tr_speed_scale must be positive and tr_speed_offset nonnegative");
        }
        if !(self.dead_band_scale_c > 0.0) || !(self.ramp_knee_c > 0.0) {
            return bad("dead_band_scale_c and ramp_knee_c must be positive");
        }
        if self.temp_error_gain_c < 0.0 || self.tr_cooling_gain_c < 0.0 {
            return bad("temperature gains must be nonnegative");
        }
        Ok(())
    }
}

/// Demanded relative power over the transient, piecewise linear in hours.
#[derive(Debug, Clone, PartialEq)]
pub struct DemandProfile {
    points: Vec<(f64, f64)>,
}

impl Default for DemandProfile {
    fn default() -> Self {
        // Trapezoid load follow: hold full power, ramp to 50% in 12 minutes,
        // hold, ramp back, hold to the 11-hour mark.
        Self {
            points: vec![
                (0.0, 1.0),
                (1.0, 1.0),
                (1.2, 0.5),
                (8.2, 0.5),
                (8.4, 1.0),
                (11.0, 1.0),
            ],
        }
    }
}

impl DemandProfile {
    pub fn new(points: Vec<(f64, f64)>) -> Result<Self, ProblemError> {
        let bad = |msg: String| Err(ProblemError::InvalidSurrogateConfig(msg));
        if points.len() < 2 {
            return bad("demand profile needs at least 2 points".into());
        }
        for i in 0..points.len() {
            let (h, p) = points[i];
            if !(0.0..=1.05).contains(&p) {
                return bad(format!("demand power {p} at point {i} outside [0, 1.05]"));
            }
            if i > 0 && h <= points[i - 1].0 {
                return bad(format!("demand profile hours must strictly increase at point {i}"));
            }
        }
        if points[0].0 != 0.0 {
            return bad("demand profile must start at hour 0".into());
        }
        Ok(Self { points })
    }

    pub fn points(&self) -> &[(f64, f64)] {
        &self.points
    }

    pub fn duration_s(&self) -> f64 {
        self.points.last().unwrap().0 * 3600.0
    }

    /// Demanded relative power at `t` seconds, clamped to the profile ends.
    pub fn power_at(&self, t_s: f64) -> f64 {
        let h = t_s / 3600.0;
        if h <= self.points[0].0 {
            return self.points[0].1;
        }
        for pair in self.points.windows(2) {
            let ((h0, p0), (h1, p1)) = (pair[0], pair[1]);
            if h <= h1 {
                return p0 + (p1 - p0) * (h - h0) / (h1 - h0);
            }
        }
        self.points.last().unwrap().1
    }
}

/// The load-following surrogate fitness problem over eleven integer design
/// variables: three group overlaps, four shim speeds, the two regulation rod
/// speeds, the maneuvering band width, and the dead band half-width.
#[derive(Debug, Clone)]
pub struct LoadFollowProblem {
    bounds: BoundsSpec,
    constants: SurrogateConstants,
    profile: DemandProfile,
    reference_fitness: f64,
    name: String,
}

/// Indices of the design variables inside a candidate.
const O1: usize = 0;
const V1: usize = 3;
const TR_VMAX: usize = 7;
const TR_VMIN: usize = 8;
const MB: usize = 9;
const DB: usize = 10;

impl LoadFollowProblem {
    pub fn new(
        bounds: BoundsSpec,
        constants: SurrogateConstants,
        profile: DemandProfile,
    ) -> Result<Self, ProblemError> {
        constants.check()?;
        if bounds.dimension() != 11 {
            return Err(ProblemError::InvalidSurrogateConfig(format!(
                "the surrogate needs 11 design variables, bounds declare {}",
                bounds.dimension()
            )));
        }
        for j in [O1, O1 + 1, O1 + 2] {
            if bounds.lb()[j] < 0 || bounds.ub()[j] > constants.rod_height {
                return Err(ProblemError::InvalidSurrogateConfig(format!(
                    "overlap bounds at variable {j} exceed [0, rod_height]"
                )));
            }
        }
        let mut problem = Self {
            bounds,
            constants,
            profile,
            reference_fitness: f64::NAN,
            name: "load-follow".into(),
        };
        let reference = problem.bounds.reference().to_vec();
        if !problem.bounds.validate(&reference) {
            return Err(ProblemError::InvalidSurrogateConfig(
                "reference configuration fails validation".into(),
            ));
        }
        let out = problem.simulate(&reference)?;
        let f = control_diagram_criterion(&out.trajectory)?;
        if !f.is_finite() {
            return Err(ProblemError::InvalidSurrogateConfig(
                "reference fitness is not finite".into(),
            ));
        }
        problem.reference_fitness = f;
        Ok(problem)
    }

    /// The bundled 11-variable instance with default constants and profile.
    pub fn default_instance() -> Self {
        Self::new(
            Self::default_bounds(),
            SurrogateConstants::default(),
            DemandProfile::default(),
        )
        .expect("bundled instance is valid")
    }

    /// Bounds of the bundled instance.
    ///
    /// The two regulation rod speed variables carry reference values outside
    /// their search bounds and are therefore exempt: the reference row is kept
    /// verbatim for normalization while the search stays inside the printed
    /// bounds.
    pub fn default_bounds() -> BoundsSpec {
        BoundsSpec::named(
            ["o1", "o2", "o3", "v1", "v2", "v3", "v4", "V", "v", "mb", "db"]
                .into_iter()
                .map(String::from)
                .collect(),
            vec![0, 0, 0, 10, 10, 10, 10, 3, 3, 7, 8],
            vec![255, 255, 255, 110, 110, 110, 110, 13, 13, 117, 16],
            vec![185, 175, 160, 60, 60, 60, 60, 72, 8, 27, 8],
            &[TR_VMAX, TR_VMIN],
        )
        .expect("bundled bounds are valid")
    }

    pub fn constants(&self) -> &SurrogateConstants {
        &self.constants
    }

    pub fn profile(&self) -> &DemandProfile {
        &self.profile
    }

    fn calibration_target(&self, p: f64, total_travel: f64) -> f64 {
        let k = &self.constants;
        let raw = k.calib_max_totalizer * (1.0 - p) / (1.0 - k.calib_low_power);
        raw.clamp(0.0, total_travel)
    }

    /// Runs the transient and returns the trajectory with the rod states.
    ///
    /// Deterministic: identical candidates produce bitwise-identical output.
    pub fn simulate(&self, c: &[i64]) -> Result<SimulationOutput, ProblemError> {
        if !self.bounds.validate(c) {
            return Err(ProblemError::InvalidSurrogateConfig(
                "candidate violates the problem bounds".into(),
            ));
        }
        let k = &self.constants;
        let height = k.rod_height as f64;
        let overlaps = [c[O1], c[O1 + 1], c[O1 + 2]];
        let starts_i = group_starts(&overlaps, k.rod_height);
        let starts = starts_i.map(|s| s as f64);
        let total_travel = starts[3] + height;
        let ps_speed: [f64; 4] = [
            (c[V1] as f64).max(0.0),
            (c[V1 + 1] as f64).max(0.0),
            (c[V1 + 2] as f64).max(0.0),
            (c[V1 + 3] as f64).max(0.0),
        ];
        let decode_speed = |x: i64| k.tr_speed_scale * x as f64 + k.tr_speed_offset;
        let (a, b) = (decode_speed(c[TR_VMAX]), decode_speed(c[TR_VMIN]));
        let tr_vmax = a.max(b);
        let tr_vmin = a.min(b).max(1e-9);
        let band = (c[MB].max(0)) as f64;
        let dead_band = (k.dead_band_scale_c * c[DB] as f64).max(1e-9);

        let dt = k.time_step_s;
        let steps = (self.profile.duration_s() / dt).round() as usize;
        let temp_program = |p: f64| k.temp_program_base_c + k.temp_program_slope_c * (p - 1.0);

        // Initial state: calibrated totalizer, band midpoint, programmed
        // temperature, axial offset at its drift/relaxation equilibrium.
        let p0 = self.profile.power_at(0.0);
        let mut tot = self.calibration_target(p0, total_travel);
        let mut tr = band / 2.0;
        let mut t_m = temp_program(p0);
        let absorber_norm = 4.0 * height + band.max(1.0);
        let inserted = |tot: f64, tr: f64| -> f64 {
            let sum: f64 = starts
                .iter()
                .map(|&s| (tot - s).clamp(0.0, height))
                .sum();
            (sum + tr) / absorber_norm
        };
        let mut ao = k.ao_equilibrium + (k.ao_absorber_gain / k.ao_relax_rate) * inserted(tot, tr);

        let mut states = Vec::with_capacity(steps + 1);
        let mut rods = Vec::with_capacity(steps + 1);
        for i in 0..=steps {
            let t = i as f64 * dt;
            let p = self.profile.power_at(t);
            states.push((t, p, ao.clamp(-1.0, 1.0)));
            rods.push(RodState {
                totalizer: tot.round() as i64,
                insertions: ps_insertion(tot.round() as i64, (overlaps[0], overlaps[1], overlaps[2]), k.rod_height)
                    .expect("overlaps validated against rod_height"),
                tr_position: tr.round() as i64,
            });
            if i == steps {
                break;
            }

            // Shim rods chase the calibration target, rate-limited by the
            // slowest currently engaged group.
            let target = self.calibration_target(p, total_travel);
            let err = target - tot;
            if err != 0.0 {
                let engaged_limit = starts
                    .iter()
                    .zip(&ps_speed)
                    .filter(|(&s, _)| {
                        if err > 0.0 {
                            s <= tot && tot < s + height
                        } else {
                            s < tot && tot <= s + height
                        }
                    })
                    .map(|(_, &v)| v)
                    .fold(f64::INFINITY, f64::min);
                let limit = if engaged_limit.is_finite() { engaged_limit } else { ps_speed[0] };
                let max_move = limit * dt / 60.0;
                tot += err.clamp(-max_move, max_move);
            }

            // First-order coolant temperature toward an equilibrium shifted by
            // the tracking error and cooled by regulation rod insertion.
            let track_err = target - tot;
            let t_prog = temp_program(p);
            let t_equil =
                t_prog + k.temp_error_gain_c * track_err - k.tr_cooling_gain_c * (tr - band / 2.0);
            t_m += (dt / k.temp_lag_s) * (t_equil - t_m);

            // Regulation rod moves per the dead-band speed program.
            let d_t = t_m - t_prog;
            let speed = if tr_vmax > 0.0 {
                tr_speed_with_knee(d_t, dead_band, tr_vmax, tr_vmin, k.ramp_knee_c)
            } else {
                0.0
            };
            tr = (tr + speed * dt / 60.0).clamp(0.0, band);

            // Axial offset drifts with inserted absorber and relaxes back.
            let afrac = inserted(tot, tr);
            ao += dt * (k.ao_absorber_gain * afrac - k.ao_relax_rate * (ao - k.ao_equilibrium));
            ao = ao.clamp(-1.0, 1.0);
        }
        Ok(SimulationOutput { trajectory: Trajectory::from_states(states)?, rod_states: rods })
    }

    /// Trajectory of a candidate on the configured demand profile.
    pub fn simulate_transient(&self, c: &[i64]) -> Result<Trajectory, ProblemError> {
        Ok(self.simulate(c)?.trajectory)
    }
}

impl FitnessProblem for LoadFollowProblem {
    fn name(&self) -> &str {
        &self.name
    }

    fn bounds(&self) -> &BoundsSpec {
        &self.bounds
    }

    fn evaluate(&self, c: &[i64]) -> f64 {
        let out = self.simulate(c).expect("candidate must satisfy the bounds");
        control_diagram_criterion(&out.trajectory).expect("simulated trajectory is well-formed")
    }

    fn reference_fitness(&self) -> Option<f64> {
        Some(self.reference_fitness)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ps_insertion_is_zero_at_zero_totalizer() {
        assert_eq!(ps_insertion(0, (185, 175, 160), 255).unwrap(), [0, 0, 0, 0]);
    }

    #[test]
    fn ps_insertion_full_overlap_moves_groups_together() {
        assert_eq!(
            ps_insertion(100, (255, 255, 255), 255).unwrap(),
            [100, 100, 100, 100]
        );
    }

    #[test]
    fn ps_insertion_matches_the_hand_computed_overlap_case() {
        // With height 255 and o1 = 185, group 2 starts after 70 steps.
        let ins = ps_insertion(100, (185, 175, 160), 255).unwrap();
        assert_eq!(ins[0], 100);
        assert_eq!(ins[1], 30);
        assert_eq!(ins[2], 0);
        assert_eq!(ins[3], 0);
    }

    #[test]
    fn ps_insertion_rejects_overlaps_outside_the_height() {
        assert!(ps_insertion(0, (256, 0, 0), 255).is_err());
        assert!(ps_insertion(0, (0, -1, 0), 255).is_err());
    }

    #[test]
    fn ps_insertion_is_monotone_and_saturates() {
        let overlaps = (185, 175, 160);
        let total = 4 * 255 - (185 + 175 + 160);
        let mut prev = [0i64; 4];
        for t in 0..=total {
            let ins = ps_insertion(t, overlaps, 255).unwrap();
            for g in 0..4 {
                assert!(ins[g] >= prev[g], "group {g} regressed at T={t}");
                assert!((0..=255).contains(&ins[g]));
            }
            prev = ins;
        }
        assert_eq!(prev, [255, 255, 255, 255]);
        assert_eq!(ps_insertion(total + 50, overlaps, 255).unwrap(), prev);
    }

    #[test]
    fn tr_speed_obeys_the_dead_band_and_saturation() {
        assert_eq!(tr_speed(0.5, 0.8, 72.0, 8.0), 0.0);
        assert_eq!(tr_speed(3.0, 0.8, 72.0, 8.0), 72.0);
        assert_eq!(tr_speed(-3.0, 0.8, 72.0, 8.0), -72.0);
    }

    #[test]
    fn tr_speed_ramps_linearly_between_dead_band_and_knee() {
        let half = tr_speed(1.8, 0.8, 72.0, 8.0);
        assert!((half - (8.0 + (72.0 - 8.0) * 0.5)).abs() < 1e-12);
        let just_out = tr_speed(0.8000001, 0.8, 72.0, 8.0);
        assert!((just_out - 8.0).abs() < 1e-4);
    }

    #[test]
    fn constant_demand_keeps_the_trajectory_on_one_point() {
        let profile = DemandProfile::new(vec![(0.0, 1.0), (2.0, 1.0)]).unwrap();
        let problem = LoadFollowProblem::new(
            LoadFollowProblem::default_bounds(),
            SurrogateConstants::default(),
            profile,
        )
        .unwrap();
        let reference = problem.bounds().reference().to_vec();
        let traj = problem.simulate_transient(&reference).unwrap();
        let ao_0 = traj.points()[0].ao;
        for pt in traj.points() {
            assert!((pt.ao - ao_0).abs() < 1e-12);
            assert_eq!(pt.p_r, 1.0);
        }
        assert_eq!(control_diagram_criterion(&traj).unwrap(), 0.0);
    }

    #[test]
    fn reference_fitness_is_positive_and_finite() {
        let problem = LoadFollowProblem::default_instance();
        let f = problem.reference_fitness().unwrap();
        assert!(f.is_finite());
        assert!(f > 0.0, "reference fitness {f}");
        let reference = problem.bounds().reference().to_vec();
        assert_eq!(problem.evaluate(&reference), f);
    }

    #[test]
    fn faster_shim_rods_do_not_worsen_the_axial_excursion() {
        let problem = LoadFollowProblem::default_instance();
        let max_dev = |candidate: &[i64]| {
            let traj = problem.simulate_transient(candidate).unwrap();
            let ao_0 = traj.points()[0].ao;
            traj.points()
                .iter()
                .map(|p| (p.ao - ao_0).abs())
                .fold(0.0f64, f64::max)
        };
        let mut doubled = problem.bounds().reference().to_vec();
        let mut halved = doubled.clone();
        for j in V1..V1 + 4 {
            doubled[j] = (doubled[j] * 2).min(problem.bounds().ub()[j]);
            halved[j] = (halved[j] / 2).max(problem.bounds().lb()[j]);
        }
        assert!(max_dev(&doubled) <= max_dev(&halved));
    }

    #[test]
    fn simulation_is_deterministic() {
        let problem = LoadFollowProblem::default_instance();
        let candidate = vec![40, 80, 120, 25, 35, 45, 55, 5, 4, 60, 12];
        let a = problem.simulate(&candidate).unwrap();
        let b = problem.simulate(&candidate).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn rod_states_respect_travel_limits() {
        let problem = LoadFollowProblem::default_instance();
        let candidate = vec![0, 0, 0, 10, 10, 10, 10, 13, 3, 117, 16];
        let out = problem.simulate(&candidate).unwrap();
        for state in &out.rod_states {
            for ins in state.insertions {
                assert!((0..=255).contains(&ins));
            }
            assert!((0..=117).contains(&state.tr_position));
        }
        // The slow-rod transient must actually move the shim banks.
        assert!(out.rod_states.iter().any(|s| s.totalizer > 0));
    }

    #[test]
    fn simulate_rejects_invalid_candidates() {
        let problem = LoadFollowProblem::default_instance();
        let mut candidate = problem.bounds().reference().to_vec();
        candidate[0] = -1;
        assert!(problem.simulate(&candidate).is_err());
    }

    #[test]
    fn demand_profile_interpolates_and_validates() {
        let p = DemandProfile::default();
        assert_eq!(p.power_at(0.0), 1.0);
        assert_eq!(p.power_at(3600.0), 1.0);
        assert!((p.power_at(1.1 * 3600.0) - 0.75).abs() < 1e-12);
        assert_eq!(p.power_at(5.0 * 3600.0), 0.5);
        assert_eq!(p.power_at(11.0 * 3600.0), 1.0);
        assert_eq!(p.power_at(20.0 * 3600.0), 1.0);
        assert!(DemandProfile::new(vec![(0.0, 1.0)]).is_err());
        assert!(DemandProfile::new(vec![(0.0, 1.0), (0.0, 0.5)]).is_err());
        assert!(DemandProfile::new(vec![(0.0, 2.0), (1.0, 0.5)]).is_err());
        assert!(DemandProfile::new(vec![(1.0, 1.0), (2.0, 0.5)]).is_err());
    }
}
