//! Run configuration: the TOML schema, problem registry, and config hash.
//!
//! A config resolves bottom-up: built-in defaults, then an optional TOML
//! file, then command-line overrides. The hash of the fully resolved config
//! is stamped into every output file so artifacts can be traced back to the
//! exact settings that produced them.

use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::engine::{EngineError, LatencyModel, RunConfig};
use crate::problems::{
    FitnessProblem, LoadFollowProblem, NkLandscape, ProblemError, Quantized, SeparableQuadratic,
};
use crate::space::{BoundsSpec, MutationParams, SpaceError};

/// Plateau grain applied to the load-following problem by default.
///
/// Chosen so that the baseline mutation setting walks a visibly neutral
/// landscape without collapsing the whole fitness range onto one level:
/// the reference program's fitness spans roughly 130 levels, and a baseline
/// random walk sees neutral steps about 70% of the time.
pub const DEFAULT_QUANTIZE_GRAIN: f64 = 0.001;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config file {path}: {source}")]
    Read {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("config parse error: {0}")]
    Parse(#[from] toml::de::Error),
    #[error("config serialize error: {0}")]
    Serialize(#[from] toml::ser::Error),
    #[error("unknown problem '{0}' (expected load-follow, nk, or quadratic)")]
    UnknownProblem(String),
    #[error("invalid [problem] section: {0}")]
    Problem(#[from] ProblemError),
    #[error("invalid [engine] section: {0}")]
    Engine(#[from] EngineError),
    #[error("invalid [mutation] section: {0}")]
    Mutation(#[from] SpaceError),
    #[error("invalid [engine] section: virtual_hours must be positive, got {0}")]
    VirtualHours(f64),
    #[error("invalid [problem] section: quantize_grain must be finite and non-negative, got {0}")]
    QuantizeGrain(f64),
}

/// `[problem]` section: which fitness function to optimize.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ProblemConfig {
    /// Registry key: `load-follow`, `nk`, or `quadratic`.
    pub name: String,
    /// Fitness plateau width; 0 disables quantization.
    pub quantize_grain: f64,
    /// Bit count of the `nk` problem.
    pub nk_n: usize,
    /// Epistasis degree of the `nk` problem.
    pub nk_k: usize,
    /// Table seed of the `nk` problem.
    pub nk_seed: u64,
}

impl Default for ProblemConfig {
    fn default() -> Self {
        ProblemConfig {
            name: "load-follow".to_string(),
            quantize_grain: DEFAULT_QUANTIZE_GRAIN,
            nk_n: 16,
            nk_k: 2,
            nk_seed: 7,
        }
    }
}

/// `[engine]` section: farm size, budgets, and seeding.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EngineConfig {
    pub workers: usize,
    /// Virtual wall-clock budget in hours; `inf` leaves the run bounded by
    /// `max_evaluations` alone.
    pub virtual_hours: f64,
    /// Optional cap on received results; unset means time-limited only.
    pub max_evaluations: Option<u64>,
    pub seed: u64,
    /// Probability that a dispatched evaluation crashes instead of
    /// returning a fitness.
    pub crash_probability: f64,
}

impl Default for EngineConfig {
    fn default() -> Self {
        EngineConfig {
            workers: 64,
            virtual_hours: 24.0,
            max_evaluations: None,
            seed: 1,
            crash_probability: 0.0,
        }
    }
}

/// `[mutation]` section: the two knobs of the integer mutation operator.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MutationConfig {
    /// Per-coordinate mutation probability.
    pub p: f64,
    /// Step radius as a fraction of each coordinate's range.
    pub r: f64,
}

impl Default for MutationConfig {
    fn default() -> Self {
        MutationConfig { p: 0.1, r: 0.05 }
    }
}

/// `[latency]` section: the clamped log-normal evaluation-time model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LatencyConfig {
    pub min_s: f64,
    pub mean_s: f64,
    pub max_s: f64,
}

impl Default for LatencyConfig {
    fn default() -> Self {
        LatencyConfig { min_s: 1629.0, mean_s: 2426.0, max_s: 6169.0 }
    }
}

/// `[analysis]` section: mutation grid and walk settings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AnalysisConfig {
    pub p_values: Vec<f64>,
    pub r_values: Vec<f64>,
    /// Repeats per grid cell.
    pub repeats: usize,
    /// Base seed; repeat k of every cell uses base_seed + k.
    pub base_seed: u64,
    /// Random-walk length for feature estimation.
    pub walk_length: usize,
    /// Seed shared by all feature walks.
    pub walk_seed: u64,
}

impl Default for AnalysisConfig {
    fn default() -> Self {
        AnalysisConfig {
            p_values: vec![0.1, 0.2, 0.3, 0.4],
            r_values: vec![0.05, 0.1, 0.2, 0.5],
            repeats: 5,
            base_seed: 1000,
            walk_length: 1024,
            walk_seed: 1,
        }
    }
}

/// The complete resolved configuration.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AppConfig {
    pub problem: ProblemConfig,
    pub engine: EngineConfig,
    pub mutation: MutationConfig,
    pub latency: LatencyConfig,
    pub analysis: AnalysisConfig,
}

impl AppConfig {
    /// Parses a TOML config file.
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Read {
            path: path.display().to_string(),
            source,
        })?;
        Ok(toml::from_str(&text)?)
    }

    /// Builds the configured fitness problem, applying quantization when a
    /// positive grain is set.
    pub fn build_problem(&self) -> Result<Box<dyn FitnessProblem>, ConfigError> {
        let p = &self.problem;
        if !p.quantize_grain.is_finite() || p.quantize_grain < 0.0 {
            return Err(ConfigError::QuantizeGrain(p.quantize_grain));
        }
        let base: Box<dyn FitnessProblem> = match p.name.as_str() {
            "load-follow" => Box::new(LoadFollowProblem::default_instance()),
            "nk" => Box::new(NkLandscape::new(p.nk_n, p.nk_k, p.nk_seed)?),
            "quadratic" => {
                let bounds = BoundsSpec::new(vec![-100; 8], vec![100; 8], vec![0; 8])
                    .expect("constant quadratic bounds are valid");
                Box::new(SeparableQuadratic::new(bounds)?)
            }
            other => return Err(ConfigError::UnknownProblem(other.to_string())),
        };
        if p.quantize_grain > 0.0 {
            Ok(Box::new(Quantized::new(base, p.quantize_grain)?))
        } else {
            Ok(base)
        }
    }

    /// Mutation knobs as validated parameters.
    pub fn mutation_params(&self) -> Result<MutationParams, ConfigError> {
        Ok(MutationParams::new(self.mutation.p, self.mutation.r)?)
    }

    /// Latency model fitted to the configured clamp and mean.
    pub fn latency_model(&self) -> Result<LatencyModel, ConfigError> {
        let l = &self.latency;
        Ok(LatencyModel::fit(l.min_s, l.mean_s, l.max_s)?)
    }

    /// Virtual time budget in seconds. `inf` is allowed so a run can be
    /// bounded by the evaluation cap alone.
    pub fn time_limit_s(&self) -> Result<f64, ConfigError> {
        let hours = self.engine.virtual_hours;
        if hours.is_nan() || hours <= 0.0 {
            return Err(ConfigError::VirtualHours(hours));
        }
        Ok(hours * 3600.0)
    }

    /// The fully validated engine run configuration.
    pub fn run_config(&self) -> Result<RunConfig, ConfigError> {
        let cfg = RunConfig {
            workers: self.engine.workers,
            time_limit_s: self.time_limit_s()?,
            max_evaluations: self.engine.max_evaluations,
            mutation: self.mutation_params()?,
            seed: self.engine.seed,
            crash_probability: self.engine.crash_probability,
            latency: self.latency_model()?,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    /// Validates every section without running anything.
    pub fn validate(&self) -> Result<(), ConfigError> {
        self.build_problem()?;
        self.run_config()?;
        Ok(())
    }

    /// First 16 hex digits of the SHA-256 of the canonical serialized
    /// config. Stamped into every output file.
    pub fn config_hash(&self) -> Result<String, ConfigError> {
        let canonical = toml::to_string(self)?;
        let digest = Sha256::digest(canonical.as_bytes());
        let mut hash = String::with_capacity(16);
        for byte in &digest[..8] {
            let _ = fmt::Write::write_fmt(&mut hash, format_args!("{byte:02x}"));
        }
        Ok(hash)
    }
}
