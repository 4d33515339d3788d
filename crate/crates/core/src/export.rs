//! CSV and gnuplot artifact writers.
//!
//! Every file is UTF-8 with LF line endings, uses '.' as the decimal
//! separator, starts with a comment naming the config hash, and contains no
//! timestamps, so identical inputs produce byte-identical files.

use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::Path;

use crate::analysis::{GridResult, StudyResult};
use crate::engine::{RunConfig, RunTrace};
use crate::landscape::{LandscapeFeatures, WalkTrace};

fn opt_f64(value: Option<f64>) -> String {
    value.map(|v| v.to_string()).unwrap_or_default()
}

fn opt_u64(value: Option<u64>) -> String {
    value.map(|v| v.to_string()).unwrap_or_default()
}

fn write_file(path: &Path, content: &str) -> io::Result<()> {
    fs::write(path, content)
}

/// Optimization trace: one row per received result in arrival order.
pub fn write_trace_csv(path: &Path, trace: &RunTrace, config_hash: &str) -> io::Result<()> {
    let mut out = String::new();
    let _ = writeln!(out, "# config_hash = {config_hash}");
    let _ = writeln!(out, "eval_index,virtual_time_s,fitness,best_fitness,is_best_update,worker_id");
    for row in &trace.rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            row.eval_index,
            row.virtual_time_s,
            opt_f64(row.fitness),
            opt_f64(row.best_fitness),
            row.is_best_update,
            row.worker_id
        );
    }
    write_file(path, &out)
}

/// Best candidate as (variable, value) rows; only a header when the run
/// never succeeded.
pub fn write_best_csv(
    path: &Path,
    trace: &RunTrace,
    names: &[String],
    config_hash: &str,
) -> io::Result<()> {
    let mut out = String::new();
    let _ = writeln!(out, "# config_hash = {config_hash}");
    let _ = writeln!(out, "variable,value");
    if let Some((candidate, _)) = &trace.best {
        for (name, value) in names.iter().zip(candidate) {
            let _ = writeln!(out, "{name},{value}");
        }
    }
    write_file(path, &out)
}

/// Run summary as (key, value) rows.
pub fn write_summary_csv(
    path: &Path,
    trace: &RunTrace,
    cfg: &RunConfig,
    reference_fitness: Option<f64>,
    config_hash: &str,
) -> io::Result<()> {
    let best_fitness = trace.best.as_ref().map(|(_, f)| *f);
    let normalized = match (best_fitness, reference_fitness) {
        (Some(best), Some(reference)) if reference.abs() > 0.0 => Some(best / reference),
        _ => None,
    };
    let mut out = String::new();
    let _ = writeln!(out, "# config_hash = {config_hash}");
    let _ = writeln!(out, "key,value");
    let _ = writeln!(out, "problem,{}", trace.problem_name);
    let _ = writeln!(out, "workers,{}", cfg.workers);
    let _ = writeln!(out, "seed,{}", cfg.seed);
    let _ = writeln!(out, "time_limit_s,{}", cfg.time_limit_s);
    let _ = writeln!(out, "max_evaluations,{}", opt_u64(cfg.max_evaluations));
    let _ = writeln!(out, "mutation_p,{}", cfg.mutation.p());
    let _ = writeln!(out, "mutation_r,{}", cfg.mutation.r());
    let _ = writeln!(out, "crash_probability,{}", cfg.crash_probability);
    let _ = writeln!(out, "received_results,{}", trace.rows.len());
    let _ = writeln!(out, "completed_evaluations,{}", trace.completed_evaluations());
    let _ = writeln!(out, "crash_count,{}", trace.crash_count);
    let _ = writeln!(out, "dispatched,{}", trace.dispatched);
    let _ = writeln!(out, "strict_improvements,{}", trace.strict_improvements());
    let _ = writeln!(out, "mutation_saturations,{}", trace.mutation_saturations);
    let _ = writeln!(out, "truncated,{}", trace.truncated);
    let _ = writeln!(out, "final_virtual_time_s,{}", trace.final_time_s);
    let _ = writeln!(out, "best_fitness,{}", opt_f64(best_fitness));
    let _ = writeln!(out, "reference_fitness,{}", opt_f64(reference_fitness));
    let _ = writeln!(out, "normalized_best,{}", opt_f64(normalized));
    write_file(path, &out)
}

/// Walk trace: step index, fitness, then one column per variable.
pub fn write_walk_csv(
    path: &Path,
    walk: &WalkTrace,
    names: &[String],
    config_hash: &str,
) -> io::Result<()> {
    let mut out = String::new();
    let _ = writeln!(out, "# config_hash = {config_hash}");
    let _ = writeln!(out, "step,fitness,{}", names.join(","));
    for (index, (candidate, fitness)) in walk.candidates.iter().zip(&walk.fitness).enumerate() {
        let coords: Vec<String> = candidate.iter().map(|v| v.to_string()).collect();
        let _ = writeln!(out, "{},{},{}", index + 1, fitness, coords.join(","));
    }
    write_file(path, &out)
}

/// Landscape features as a single row.
pub fn write_features_csv(
    path: &Path,
    features: &LandscapeFeatures,
    config_hash: &str,
) -> io::Result<()> {
    let mut out = String::new();
    let _ = writeln!(out, "# config_hash = {config_hash}");
    let _ = writeln!(out, "p,r,length,epsilon,tau,tau_saturated,nr");
    let _ = writeln!(
        out,
        "{},{},{},{},{},{},{}",
        features.p,
        features.r,
        features.length,
        features.epsilon,
        features.tau.map(|t| t.to_string()).unwrap_or_default(),
        features.tau_saturated,
        features.nr
    );
    write_file(path, &out)
}

/// Every grid run: one row per (p, r, repeat).
pub fn write_grid_runs_csv(path: &Path, grid: &GridResult, config_hash: &str) -> io::Result<()> {
    let mut out = String::new();
    let _ = writeln!(out, "# config_hash = {config_hash}");
    let _ = writeln!(out, "p,r,repeat,seed,best_fitness,normalized_best,rank");
    for run in &grid.runs {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{}",
            run.p,
            run.r,
            run.repeat,
            run.seed,
            opt_f64(run.best_fitness),
            opt_f64(run.normalized_best),
            opt_f64(run.rank)
        );
    }
    write_file(path, &out)
}

/// Per-cell aggregation of the grid.
pub fn write_grid_cells_csv(path: &Path, grid: &GridResult, config_hash: &str) -> io::Result<()> {
    let mut out = String::new();
    let _ = writeln!(out, "# config_hash = {config_hash}");
    let _ = writeln!(out, "p,r,repeats_available,mean_normalized_best,std_dev,mean_rank,complete");
    for cell in &grid.cells {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{}",
            cell.p,
            cell.r,
            cell.normalized.len(),
            opt_f64(cell.mean),
            opt_f64(cell.std_dev),
            opt_f64(cell.mean_rank),
            cell.complete
        );
    }
    write_file(path, &out)
}

/// Feature-performance scatter rows.
pub fn write_study_csv(path: &Path, study: &StudyResult, config_hash: &str) -> io::Result<()> {
    let mut out = String::new();
    let _ = writeln!(out, "# config_hash = {config_hash}");
    let _ = writeln!(out, "p,r,nr,tau,tau_saturated,mean_normalized_best");
    for row in &study.rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            row.p,
            row.r,
            row.nr,
            row.tau.map(|t| t.to_string()).unwrap_or_default(),
            row.tau_saturated,
            row.mean_normalized_best
        );
    }
    write_file(path, &out)
}

/// Both regression reports of the study as (key, value) rows.
pub fn write_study_reports_csv(
    path: &Path,
    study: &StudyResult,
    config_hash: &str,
) -> io::Result<()> {
    let mut out = String::new();
    let _ = writeln!(out, "# config_hash = {config_hash}");
    let _ = writeln!(out, "feature,pearson,spearman,slope,intercept,r_squared,degenerate");
    for (feature, report) in [("nr", &study.nr_report), ("tau", &study.tau_report)] {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{}",
            feature,
            report.pearson,
            report.spearman,
            report.slope,
            report.intercept,
            report.r_squared,
            report.degenerate
        );
    }
    write_file(path, &out)
}

/// Throughput comparison of the asynchronous loop and the round-based
/// baseline on identical farms.
pub fn write_sync_compare_csv(
    path: &Path,
    async_trace: &RunTrace,
    sync_trace: &RunTrace,
    config_hash: &str,
) -> io::Result<()> {
    let mut out = String::new();
    let _ = writeln!(out, "# config_hash = {config_hash}");
    let _ = writeln!(
        out,
        "mode,received_results,completed_evaluations,crash_count,best_fitness,final_virtual_time_s"
    );
    for (mode, trace) in [("async", async_trace), ("sync", sync_trace)] {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            mode,
            trace.rows.len(),
            trace.completed_evaluations(),
            trace.crash_count,
            opt_f64(trace.best.as_ref().map(|(_, f)| *f)),
            trace.final_time_s
        );
    }
    write_file(path, &out)
}

/// gnuplot script plotting best fitness against evaluation index.
pub fn write_trace_plot(path: &Path, csv_name: &str) -> io::Result<()> {
    let content = format!(
        "set datafile separator \",\"\n\
         set key autotitle columnhead\n\
         set xlabel \"evaluation\"\n\
         set ylabel \"fitness\"\n\
         plot \"{csv_name}\" using 1:4 with steps title \"best fitness\", \\\n\
              \"{csv_name}\" using 1:3 with dots title \"fitness\"\n\
         pause -1\n"
    );
    write_file(path, &content)
}

/// gnuplot script plotting walk fitness against step.
pub fn write_walk_plot(path: &Path, csv_name: &str) -> io::Result<()> {
    let content = format!(
        "set datafile separator \",\"\n\
         set key autotitle columnhead\n\
         set xlabel \"step\"\n\
         set ylabel \"fitness\"\n\
         plot \"{csv_name}\" using 1:2 with lines title \"walk fitness\"\n\
         pause -1\n"
    );
    write_file(path, &content)
}

/// gnuplot script with both feature-performance scatter panels.
pub fn write_study_plot(path: &Path, csv_name: &str) -> io::Result<()> {
    let content = format!(
        "set datafile separator \",\"\n\
         set key autotitle columnhead\n\
         set multiplot layout 1,2\n\
         set xlabel \"neutral rate\"\n\
         set ylabel \"mean normalized best fitness\"\n\
         plot \"{csv_name}\" using 3:6 with points pt 7 title \"nr\"\n\
         set xlabel \"autocorrelation length\"\n\
         plot \"{csv_name}\" using 4:6 with points pt 7 title \"tau\"\n\
         unset multiplot\n\
         pause -1\n"
    );
    write_file(path, &content)
}
