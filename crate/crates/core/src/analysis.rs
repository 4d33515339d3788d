//! Experiment methodology: the (p, r) mutation-parameter grid with paired
//! seeded repeats, normalized best fitness, average-rank aggregation, and
//! the correlation study linking landscape features to optimizer
//! performance.

use thiserror::Error;

use crate::engine::{run_ea, EngineError, RunConfig, SimTransport};
use crate::landscape::{features, LandscapeError, LandscapeFeatures};
use crate::problems::FitnessProblem;
use crate::space::{MutationParams, SpaceError};

/// Reference fitness magnitudes below this normalize to 1 (raw fitness).
const MIN_NORMALIZER: f64 = 1e-12;

#[derive(Debug, Error)]
pub enum AnalysisError {
    #[error("grid needs at least one p value, one r value and one repeat")]
    EmptyGrid,
    #[error("value lists must have equal length, got {0} and {1}")]
    MismatchedLengths(usize, usize),
    #[error("need at least {needed} points, got {got}")]
    TooFewPoints { needed: usize, got: usize },
    #[error("degenerate input: {0}")]
    DegenerateInput(&'static str),
    #[error(transparent)]
    Space(#[from] SpaceError),
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error(transparent)]
    Landscape(#[from] LandscapeError),
}

/// One optimization run of the grid.
#[derive(Debug, Clone, PartialEq)]
pub struct CellRun {
    pub p: f64,
    pub r: f64,
    pub repeat: usize,
    pub seed: u64,
    /// Best fitness of the run; `None` when the run failed or never
    /// completed an evaluation.
    pub best_fitness: Option<f64>,
    pub normalized_best: Option<f64>,
    /// Rank of this setting within its repeat, 1 = best, ties averaged;
    /// `None` when the run is missing.
    pub rank: Option<f64>,
}

/// Aggregated statistics of one (p, r) cell.
#[derive(Debug, Clone, PartialEq)]
pub struct CellStats {
    pub p: f64,
    pub r: f64,
    /// Normalized best fitness of the available repeats.
    pub normalized: Vec<f64>,
    pub mean: Option<f64>,
    /// Sample standard deviation; 0 for a single repeat.
    pub std_dev: Option<f64>,
    pub mean_rank: Option<f64>,
    /// True when every repeat produced a result.
    pub complete: bool,
}

/// Full grid outcome: every run plus per-cell aggregation.
#[derive(Debug, Clone, PartialEq)]
pub struct GridResult {
    pub p_values: Vec<f64>,
    pub r_values: Vec<f64>,
    pub repeats: usize,
    pub base_seed: u64,
    /// Normalization constant: the problem's reference fitness, or 1 when
    /// the problem has none (or it is effectively zero).
    pub reference_fitness: f64,
    /// Row-major runs: for each p, for each r, for each repeat.
    pub runs: Vec<CellRun>,
    /// One entry per (p, r), in the same p-major order.
    pub cells: Vec<CellStats>,
    pub complete: bool,
}

impl GridResult {
    pub fn cell(&self, p_index: usize, r_index: usize) -> &CellStats {
        &self.cells[p_index * self.r_values.len() + r_index]
    }
}

/// Simple correlation and linear-fit summary of paired observations.
#[derive(Debug, Clone, PartialEq)]
pub struct RegressionReport {
    pub pearson: f64,
    pub spearman: f64,
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    /// True when the response had zero variance and the correlations were
    /// reported as 0.
    pub degenerate: bool,
}

/// One scatter point of the feature-performance study.
#[derive(Debug, Clone, PartialEq)]
pub struct StudyRow {
    pub p: f64,
    pub r: f64,
    pub nr: f64,
    pub tau: Option<usize>,
    pub tau_saturated: bool,
    pub mean_normalized_best: f64,
}

/// Feature-performance study: scatter rows plus both regression reports.
#[derive(Debug, Clone, PartialEq)]
pub struct StudyResult {
    pub rows: Vec<StudyRow>,
    /// Neutral rate versus mean normalized best fitness.
    pub nr_report: RegressionReport,
    /// Autocorrelation length versus mean normalized best fitness; settings
    /// whose walk was degenerate (no τ) are left out.
    pub tau_report: RegressionReport,
    /// True when at least one setting had no τ or no grid mean.
    pub incomplete_features: bool,
}

/// Runs the engine over every (p, r) × repeat in simulated mode.
///
/// Repeat k uses seed `base_seed + k` in every cell, so all settings share
/// the same initial populations (paired design). Best fitness is normalized
/// by the problem's reference fitness; within each repeat all settings are
/// ranked (1 = lowest normalized fitness, ties share the average rank). A
/// failed run leaves its cell-repeat missing and clears the completeness
/// flags; statistics cover the available repeats.
pub fn run_grid(
    problem: &dyn FitnessProblem,
    p_values: &[f64],
    r_values: &[f64],
    repeats: usize,
    base_seed: u64,
    base_cfg: &RunConfig,
) -> Result<GridResult, AnalysisError> {
    if p_values.is_empty() || r_values.is_empty() || repeats == 0 {
        return Err(AnalysisError::EmptyGrid);
    }
    base_cfg.validate()?;
    let settings: Vec<MutationParams> = p_values
        .iter()
        .flat_map(|&p| r_values.iter().map(move |&r| (p, r)))
        .map(|(p, r)| MutationParams::new(p, r))
        .collect::<Result<_, _>>()?;
    let reference_fitness = problem
        .reference_fitness()
        .filter(|f| f.abs() > MIN_NORMALIZER)
        .unwrap_or(1.0);

    let mut per_setting: Vec<Vec<CellRun>> = settings
        .iter()
        .map(|m| {
            Vec::from_iter((0..repeats).map(|repeat| CellRun {
                p: m.p(),
                r: m.r(),
                repeat,
                seed: base_seed.wrapping_add(repeat as u64),
                best_fitness: None,
                normalized_best: None,
                rank: None,
            }))
        })
        .collect();

    for (setting_index, &m) in settings.iter().enumerate() {
        for repeat in 0..repeats {
            let run = &mut per_setting[setting_index][repeat];
            let cfg = RunConfig { mutation: m, seed: run.seed, ..base_cfg.clone() };
            let outcome = SimTransport::from_config(&cfg, problem)
                .and_then(|mut farm| run_ea(&cfg, problem, &mut farm));
            match outcome {
                Ok(trace) => {
                    if let Some((_, best)) = trace.best {
                        run.best_fitness = Some(best);
                        run.normalized_best = Some(best / reference_fitness);
                    } else {
                        log::warn!(
                            "grid run p = {}, r = {}, seed = {} ended with no successful evaluation",
                            m.p(),
                            m.r(),
                            run.seed
                        );
                    }
                }
                Err(err) => {
                    log::warn!(
                        "grid run p = {}, r = {}, seed = {} failed: {err}",
                        m.p(),
                        m.r(),
                        run.seed
                    );
                }
            }
        }
    }

    for repeat in 0..repeats {
        let available: Vec<usize> = (0..settings.len())
            .filter(|&s| per_setting[s][repeat].normalized_best.is_some())
            .collect();
        let values: Vec<f64> = available
            .iter()
            .map(|&s| per_setting[s][repeat].normalized_best.expect("filtered above"))
            .collect();
        let ranks = average_ranks(&values);
        for (&setting_index, rank) in available.iter().zip(ranks) {
            per_setting[setting_index][repeat].rank = Some(rank);
        }
    }

    let cells: Vec<CellStats> = per_setting
        .iter()
        .zip(&settings)
        .map(|(runs, m)| {
            let normalized: Vec<f64> =
                runs.iter().filter_map(|run| run.normalized_best).collect();
            let ranks: Vec<f64> = runs.iter().filter_map(|run| run.rank).collect();
            let mean = mean_of(&normalized);
            let std_dev = sample_std_dev(&normalized);
            CellStats {
                p: m.p(),
                r: m.r(),
                mean,
                std_dev,
                mean_rank: mean_of(&ranks),
                complete: normalized.len() == repeats,
                normalized,
            }
        })
        .collect();

    let complete = cells.iter().all(|c| c.complete);
    Ok(GridResult {
        p_values: p_values.to_vec(),
        r_values: r_values.to_vec(),
        repeats,
        base_seed,
        reference_fitness,
        runs: per_setting.into_iter().flatten().collect(),
        cells,
        complete,
    })
}

fn mean_of(values: &[f64]) -> Option<f64> {
    if values.is_empty() {
        None
    } else {
        Some(values.iter().sum::<f64>() / values.len() as f64)
    }
}

fn sample_std_dev(values: &[f64]) -> Option<f64> {
    let mean = mean_of(values)?;
    if values.len() < 2 {
        return Some(0.0);
    }
    let ss: f64 = values.iter().map(|&v| (v - mean) * (v - mean)).sum();
    Some((ss / (values.len() - 1) as f64).sqrt())
}

/// Ranks with 1 for the smallest value; tied values share the average of
/// the positions they span.
fn average_ranks(values: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&i, &j| values[i].total_cmp(&values[j]));
    let mut ranks = vec![0.0; values.len()];
    let mut start = 0;
    while start < order.len() {
        let mut end = start + 1;
        while end < order.len() && values[order[end]] == values[order[start]] {
            end += 1;
        }
        let rank = (start + 1 + end) as f64 / 2.0;
        for &original in &order[start..end] {
            ranks[original] = rank;
        }
        start = end;
    }
    ranks
}

fn pearson_raw(x: &[f64], y: &[f64]) -> (f64, f64, f64, f64, f64) {
    let n = x.len() as f64;
    let mean_x = x.iter().sum::<f64>() / n;
    let mean_y = y.iter().sum::<f64>() / n;
    let mut sxx = 0.0;
    let mut syy = 0.0;
    let mut sxy = 0.0;
    for (&a, &b) in x.iter().zip(y) {
        sxx += (a - mean_x) * (a - mean_x);
        syy += (b - mean_y) * (b - mean_y);
        sxy += (a - mean_x) * (b - mean_y);
    }
    (mean_x, mean_y, sxx, syy, sxy)
}

/// Spearman rank correlation: Pearson correlation of average-ranked data.
pub fn spearman(a: &[f64], b: &[f64]) -> Result<f64, AnalysisError> {
    if a.len() != b.len() {
        return Err(AnalysisError::MismatchedLengths(a.len(), b.len()));
    }
    if a.len() < 3 {
        return Err(AnalysisError::TooFewPoints { needed: 3, got: a.len() });
    }
    let ranks_a = average_ranks(a);
    let ranks_b = average_ranks(b);
    let (_, _, sxx, syy, sxy) = pearson_raw(&ranks_a, &ranks_b);
    if sxx == 0.0 || syy == 0.0 {
        return Err(AnalysisError::DegenerateInput("zero rank variance"));
    }
    Ok(sxy / (sxx * syy).sqrt())
}

/// Pearson correlation plus the least-squares line of y on x.
///
/// `r_squared` comes from the residual sum of squares and must equal
/// pearson² for a simple linear fit; both routes are computed and compared.
/// A zero-variance response is reported as pearson = spearman = 0 with the
/// degenerate flag set; a zero-variance predictor is an error.
pub fn pearson_and_fit(x: &[f64], y: &[f64]) -> Result<RegressionReport, AnalysisError> {
    if x.len() != y.len() {
        return Err(AnalysisError::MismatchedLengths(x.len(), y.len()));
    }
    if x.len() < 3 {
        return Err(AnalysisError::TooFewPoints { needed: 3, got: x.len() });
    }
    let (mean_x, mean_y, sxx, syy, sxy) = pearson_raw(x, y);
    if sxx == 0.0 {
        return Err(AnalysisError::DegenerateInput("zero variance in x"));
    }
    if syy == 0.0 {
        return Ok(RegressionReport {
            pearson: 0.0,
            spearman: 0.0,
            slope: 0.0,
            intercept: mean_y,
            r_squared: 0.0,
            degenerate: true,
        });
    }
    let pearson = sxy / (sxx * syy).sqrt();
    let slope = sxy / sxx;
    let intercept = mean_y - slope * mean_x;
    let ss_res: f64 = x
        .iter()
        .zip(y)
        .map(|(&a, &b)| {
            let residual = b - (intercept + slope * a);
            residual * residual
        })
        .sum();
    let r_squared = 1.0 - ss_res / syy;
    debug_assert!(
        (r_squared - pearson * pearson).abs() <= 1e-9,
        "the two r² routes disagree: {r_squared} vs {}",
        pearson * pearson
    );
    let spearman = match spearman(x, y) {
        Ok(value) => value,
        Err(AnalysisError::DegenerateInput(_)) => 0.0,
        Err(err) => return Err(err),
    };
    Ok(RegressionReport { pearson, spearman, slope, intercept, r_squared, degenerate: false })
}

/// Regression that tolerates a flat or too-short predictor: such inputs
/// yield an all-zero report with the degenerate flag set instead of an
/// error, so one featureless landscape cannot sink a whole study.
fn regress_or_degenerate(x: &[f64], y: &[f64]) -> Result<RegressionReport, AnalysisError> {
    match pearson_and_fit(x, y) {
        Ok(report) => Ok(report),
        Err(AnalysisError::DegenerateInput(_)) | Err(AnalysisError::TooFewPoints { .. }) => {
            let intercept =
                if y.is_empty() { 0.0 } else { y.iter().sum::<f64>() / y.len() as f64 };
            Ok(RegressionReport {
                pearson: 0.0,
                spearman: 0.0,
                slope: 0.0,
                intercept,
                r_squared: 0.0,
                degenerate: true,
            })
        }
        Err(err) => Err(err),
    }
}

/// Correlates landscape features with grid performance.
///
/// Walks once per (p, r) setting (all walks share `walk_seed`, so settings
/// differ only through the operator), pairs nr and τ with the cell's mean
/// normalized best fitness, and regresses performance on each feature.
/// Settings lacking τ or a grid mean are dropped from the corresponding
/// regression and flagged; a flat feature column yields a degenerate
/// report.
pub fn feature_performance_study(
    problem: &dyn FitnessProblem,
    grid: &GridResult,
    walk_length: usize,
    walk_seed: u64,
) -> Result<StudyResult, AnalysisError> {
    let mut rows = Vec::with_capacity(grid.cells.len());
    let mut incomplete = false;
    for cell in &grid.cells {
        let m = MutationParams::new(cell.p, cell.r)?;
        let feats: LandscapeFeatures = features(problem, m, walk_length, walk_seed)?;
        let Some(mean) = cell.mean else {
            incomplete = true;
            continue;
        };
        if feats.tau.is_none() {
            incomplete = true;
        }
        rows.push(StudyRow {
            p: cell.p,
            r: cell.r,
            nr: feats.nr,
            tau: feats.tau,
            tau_saturated: feats.tau_saturated,
            mean_normalized_best: mean,
        });
    }
    let nr_x: Vec<f64> = rows.iter().map(|row| row.nr).collect();
    let nr_y: Vec<f64> = rows.iter().map(|row| row.mean_normalized_best).collect();
    let nr_report = regress_or_degenerate(&nr_x, &nr_y)?;
    let tau_pairs: Vec<(f64, f64)> = rows
        .iter()
        .filter_map(|row| row.tau.map(|t| (t as f64, row.mean_normalized_best)))
        .collect();
    let tau_x: Vec<f64> = tau_pairs.iter().map(|&(t, _)| t).collect();
    let tau_y: Vec<f64> = tau_pairs.iter().map(|&(_, f)| f).collect();
    let tau_report = regress_or_degenerate(&tau_x, &tau_y)?;
    Ok(StudyResult { rows, nr_report, tau_report, incomplete_features: incomplete })
}
