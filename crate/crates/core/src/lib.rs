//! Asynchronous master-worker (1+λ)-EA for expensive integer black-box
//! optimization, with a deterministic load-following reactor surrogate and a
//! fitness-landscape analysis toolkit.
//!
//! The crate is organized around six pieces:
//!
//! * [`space`]: integer box search spaces, the bounded-range mutation
//!   operator, Sobol initialization, and canonical candidate hashing.
//! * [`problems`]: pluggable fitness functions, including the load-following
//!   surrogate, an NK-landscape benchmark with an exhaustive oracle, a
//!   separable quadratic, and a plateau-inducing quantization wrapper.
//! * [`engine`]: the asynchronous master-worker evolutionary algorithm over an
//!   abstract transport, a deterministic discrete-event worker-farm simulator,
//!   a synchronous round-based baseline, and a thread-backed local transport.
//! * [`landscape`]: random-walk estimation of fitness-landscape features
//!   (autocorrelation, autocorrelation length, neutral rate).
//! * [`analysis`]: mutation-parameter grid experiments with paired seeds, rank
//!   aggregation, and correlation/regression between landscape features and
//!   optimizer performance.
//! * [`config`] and [`export`]: TOML run configuration and CSV/gnuplot
//!   artifact emission, shared by the `mwea` command-line binary.

pub mod analysis;
pub mod config;
pub mod engine;
pub mod export;
pub mod landscape;
pub mod problems;
pub mod sobol;
mod sobol_directions;
pub mod space;
