//! Asynchronous master-worker (1+λ) evolutionary engine.
//!
//! The master owns the parent, the seen-set and the trace; workers only
//! evaluate. Results travel through a [`Transport`]: either a deterministic
//! discrete-event simulator with heterogeneous latencies and crashes
//! ([`SimTransport`]) or real OS threads ([`LocalTransport`]). The master
//! never blocks on sends, so the control loop is the same in both modes;
//! only the clock differs (virtual seconds versus wall seconds).

use std::cmp::Ordering;
use std::collections::{BinaryHeap, HashSet};
use std::sync::mpsc;
use std::sync::Arc;
use std::thread;
use std::time::Instant;

use rand::{Rng as _, SeedableRng as _};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution as _, LogNormal};
use statrs::distribution::{ContinuousCDF as _, Normal};
use thiserror::Error;

use crate::problems::FitnessProblem;
use crate::space::{mutate, BoundsSpec, Candidate, MutationParams, SobolSampler, SpaceError};

/// Attempt cap for each stage of the unseen-candidate search: mutation
/// retries, then fresh Sobol points, then uniform redraws.
///
/// A stage that fails this many consecutive draws is treated as exhausted.
/// The cap also bounds the master's per-dispatch work on small spaces whose
/// parent neighborhood has been fully crawled, where every mutation retry
/// is a guaranteed miss; 128 keeps that worst case cheap while the uniform
/// stage still misses 128 straight draws with probability under 1e-15
/// whenever at least a quarter of the space is unseen.
pub const RETRY_CAP: usize = 128;

/// Shortest observed evaluation latency, in seconds.
pub const DEFAULT_LATENCY_MIN_S: f64 = 1629.0;
/// Mean evaluation latency, in seconds.
pub const DEFAULT_LATENCY_MEAN_S: f64 = 2426.0;
/// Longest observed evaluation latency, in seconds.
pub const DEFAULT_LATENCY_MAX_S: f64 = 6169.0;

/// XOR tag deriving the mutation RNG stream from the run seed.
const MUTATION_STREAM_TAG: u64 = 0x9e37_79b9_7f4a_7c15;
/// XOR tag deriving the transport RNG stream from the run seed.
const TRANSPORT_STREAM_TAG: u64 = 0xd1b5_4a32_d192_ed03;

#[derive(Debug, Error)]
pub enum EngineError {
    #[error("worker count must be at least 2 (master plus one worker), got {0}")]
    InvalidWorkerCount(usize),
    #[error("time limit must be positive seconds, got {0}")]
    InvalidTimeLimit(f64),
    #[error("crash probability must lie in [0, 1], got {0}")]
    InvalidCrashProbability(f64),
    #[error("latency parameters must satisfy 0 < min <= mean <= max, got {min}/{mean}/{max}")]
    InvalidLatency { min: f64, mean: f64, max: f64 },
    #[error("transport provides {got} workers but the run needs {expected}")]
    WorkerMismatch { expected: usize, got: usize },
    #[error("worker {0} already holds an outstanding evaluation")]
    WorkerBusy(usize),
    #[error("worker {0} is outside the transport's worker range")]
    UnknownWorker(usize),
    #[error("transport channel closed unexpectedly")]
    TransportClosed,
    #[error(transparent)]
    Space(#[from] SpaceError),
}

/// Shifted lognormal latency clamped to an observed range.
///
/// A draw is `min(min_s + X, max_s)` with `X ~ LogNormal(mu, 1)`; `mu` is
/// fitted by bisection so the clamped mean equals `mean_s`. When the three
/// parameters admit no spread (`min == mean`, `mean == max`, or `min == max`)
/// every draw equals `mean_s`.
#[derive(Debug, Clone, Copy)]
pub struct LatencyModel {
    min_s: f64,
    mean_s: f64,
    max_s: f64,
    mu: f64,
    sigma: f64,
    dist: Option<LogNormal<f64>>,
}

impl LatencyModel {
    pub fn fit(min_s: f64, mean_s: f64, max_s: f64) -> Result<Self, EngineError> {
        let ordered = min_s.is_finite()
            && mean_s.is_finite()
            && max_s.is_finite()
            && min_s > 0.0
            && min_s <= mean_s
            && mean_s <= max_s;
        if !ordered {
            return Err(EngineError::InvalidLatency { min: min_s, mean: mean_s, max: max_s });
        }
        if min_s == max_s || mean_s == min_s || mean_s == max_s {
            return Ok(Self { min_s, mean_s, max_s, mu: 0.0, sigma: 0.0, dist: None });
        }
        let sigma = 1.0;
        let (mut lo, mut hi) = (-60.0_f64, 60.0_f64);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if Self::clamped_mean(mid, sigma, min_s, max_s) < mean_s {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let mu = 0.5 * (lo + hi);
        let dist = LogNormal::new(mu, sigma).expect("sigma is positive");
        Ok(Self { min_s, mean_s, max_s, mu, sigma, dist: Some(dist) })
    }

    /// Defaults from the observed worker-farm statistics.
    pub fn default_fit() -> Self {
        Self::fit(DEFAULT_LATENCY_MIN_S, DEFAULT_LATENCY_MEAN_S, DEFAULT_LATENCY_MAX_S)
            .expect("default latency statistics are ordered")
    }

    /// Mean of `min(shift + X, cap)` for `X ~ LogNormal(mu, sigma)`.
    fn clamped_mean(mu: f64, sigma: f64, shift: f64, cap: f64) -> f64 {
        let c = cap - shift;
        let z = (c.ln() - mu) / sigma;
        let unit = Normal::new(0.0, 1.0).expect("unit normal");
        shift + (mu + 0.5 * sigma * sigma).exp() * unit.cdf(z - sigma) + c * (1.0 - unit.cdf(z))
    }

    pub fn sample<R: rand::Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match &self.dist {
            None => self.mean_s,
            Some(dist) => (self.min_s + dist.sample(rng)).min(self.max_s),
        }
    }

    pub fn min_s(&self) -> f64 {
        self.min_s
    }

    pub fn mean_s(&self) -> f64 {
        self.mean_s
    }

    pub fn max_s(&self) -> f64 {
        self.max_s
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }
}

/// What a worker reported for one candidate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Outcome {
    Fitness(f64),
    Crashed,
}

/// A candidate on its way to a worker.
#[derive(Debug, Clone, PartialEq)]
pub struct EvalMessage {
    pub worker_id: usize,
    pub candidate: Candidate,
    pub dispatch_time: f64,
}

/// A finished (or crashed) evaluation on its way back to the master.
#[derive(Debug, Clone, PartialEq)]
pub struct EvalResult {
    pub worker_id: usize,
    pub candidate: Candidate,
    pub outcome: Outcome,
    pub dispatch_time: f64,
    pub completion_time: f64,
}

/// Delivery boundary between the master and its workers.
///
/// `dispatch` must never block; `receive` returns results one at a time in
/// completion order and `Ok(None)` once no evaluation is outstanding. A
/// transport instance serves a single run.
pub trait Transport {
    /// Number of workers, λ in the (1+λ) scheme.
    fn workers(&self) -> usize;

    /// Current time in seconds: virtual for simulated transports, wall-clock
    /// otherwise.
    fn now(&self) -> f64;

    fn dispatch(&mut self, msg: EvalMessage) -> Result<(), EngineError>;

    fn receive(&mut self) -> Result<Option<EvalResult>, EngineError>;
}

struct PendingResult {
    completion_time: f64,
    worker_id: usize,
    candidate: Candidate,
    dispatch_time: f64,
    outcome: Outcome,
}

impl Ord for PendingResult {
    fn cmp(&self, other: &Self) -> Ordering {
        self.completion_time
            .total_cmp(&other.completion_time)
            .then_with(|| self.worker_id.cmp(&other.worker_id))
            .reverse()
    }
}

impl PartialOrd for PendingResult {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl PartialEq for PendingResult {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for PendingResult {}

/// Deterministic discrete-event worker farm.
///
/// Evaluations complete at `dispatch_time + L` with `L` drawn from the
/// latency model; with the configured probability a dispatch crashes instead
/// of producing a fitness. Simultaneous completions are delivered in
/// ascending worker id. The whole farm is a pure function of its seed.
pub struct SimTransport<'a> {
    problem: &'a dyn FitnessProblem,
    latency: LatencyModel,
    crash_probability: f64,
    rng: ChaCha8Rng,
    pending: BinaryHeap<PendingResult>,
    busy: Vec<bool>,
    now: f64,
}

impl<'a> SimTransport<'a> {
    pub fn new(
        problem: &'a dyn FitnessProblem,
        workers: usize,
        latency: LatencyModel,
        crash_probability: f64,
        seed: u64,
    ) -> Result<Self, EngineError> {
        if workers == 0 {
            return Err(EngineError::InvalidWorkerCount(workers + 1));
        }
        if !(0.0..=1.0).contains(&crash_probability) || crash_probability.is_nan() {
            return Err(EngineError::InvalidCrashProbability(crash_probability));
        }
        Ok(Self {
            problem,
            latency,
            crash_probability,
            rng: ChaCha8Rng::seed_from_u64(seed),
            pending: BinaryHeap::new(),
            busy: vec![false; workers],
            now: 0.0,
        })
    }

    /// Farm matching a run configuration: λ = workers − 1 units, transport
    /// RNG stream derived from the run seed.
    pub fn from_config(cfg: &RunConfig, problem: &'a dyn FitnessProblem) -> Result<Self, EngineError> {
        cfg.validate()?;
        Self::new(
            problem,
            cfg.workers - 1,
            cfg.latency,
            cfg.crash_probability,
            cfg.seed ^ TRANSPORT_STREAM_TAG,
        )
    }
}

impl Transport for SimTransport<'_> {
    fn workers(&self) -> usize {
        self.busy.len()
    }

    fn now(&self) -> f64 {
        self.now
    }

    fn dispatch(&mut self, msg: EvalMessage) -> Result<(), EngineError> {
        let Some(slot) = self.busy.get_mut(msg.worker_id) else {
            return Err(EngineError::UnknownWorker(msg.worker_id));
        };
        if *slot {
            return Err(EngineError::WorkerBusy(msg.worker_id));
        }
        *slot = true;
        let latency = self.latency.sample(&mut self.rng);
        let crashed = self.rng.gen::<f64>() < self.crash_probability;
        let outcome = if crashed {
            Outcome::Crashed
        } else {
            Outcome::Fitness(self.problem.evaluate(&msg.candidate))
        };
        self.pending.push(PendingResult {
            completion_time: msg.dispatch_time + latency,
            worker_id: msg.worker_id,
            candidate: msg.candidate,
            dispatch_time: msg.dispatch_time,
            outcome,
        });
        Ok(())
    }

    fn receive(&mut self) -> Result<Option<EvalResult>, EngineError> {
        let Some(event) = self.pending.pop() else {
            return Ok(None);
        };
        debug_assert!(event.completion_time >= self.now);
        self.now = event.completion_time;
        self.busy[event.worker_id] = false;
        Ok(Some(EvalResult {
            worker_id: event.worker_id,
            candidate: event.candidate,
            outcome: event.outcome,
            dispatch_time: event.dispatch_time,
            completion_time: event.completion_time,
        }))
    }
}

type Job = (Candidate, f64);

/// Worker pool on OS threads, for running the loop against real concurrency.
///
/// Latencies are whatever the machine produces, so traces are not
/// reproducible across runs; crashes only arise from worker panics, which
/// surface as a closed channel.
pub struct LocalTransport {
    senders: Vec<mpsc::Sender<Job>>,
    results: mpsc::Receiver<EvalResult>,
    busy: Vec<bool>,
    outstanding: usize,
    start: Instant,
    handles: Vec<thread::JoinHandle<()>>,
}

impl LocalTransport {
    pub fn new(problem: Arc<dyn FitnessProblem>, workers: usize) -> Result<Self, EngineError> {
        if workers == 0 {
            return Err(EngineError::InvalidWorkerCount(workers + 1));
        }
        let start = Instant::now();
        let (result_tx, results) = mpsc::channel::<EvalResult>();
        let mut senders = Vec::with_capacity(workers);
        let mut handles = Vec::with_capacity(workers);
        for worker_id in 0..workers {
            let (job_tx, job_rx) = mpsc::channel::<Job>();
            let problem = Arc::clone(&problem);
            let result_tx = result_tx.clone();
            let handle = thread::spawn(move || {
                while let Ok((candidate, dispatch_time)) = job_rx.recv() {
                    let fitness = problem.evaluate(&candidate);
                    let sent = result_tx.send(EvalResult {
                        worker_id,
                        candidate,
                        outcome: Outcome::Fitness(fitness),
                        dispatch_time,
                        completion_time: start.elapsed().as_secs_f64(),
                    });
                    if sent.is_err() {
                        return;
                    }
                }
            });
            senders.push(job_tx);
            handles.push(handle);
        }
        Ok(Self { senders, results, busy: vec![false; workers], outstanding: 0, start, handles })
    }
}

impl Transport for LocalTransport {
    fn workers(&self) -> usize {
        self.senders.len()
    }

    fn now(&self) -> f64 {
        self.start.elapsed().as_secs_f64()
    }

    fn dispatch(&mut self, msg: EvalMessage) -> Result<(), EngineError> {
        let Some(slot) = self.busy.get_mut(msg.worker_id) else {
            return Err(EngineError::UnknownWorker(msg.worker_id));
        };
        if *slot {
            return Err(EngineError::WorkerBusy(msg.worker_id));
        }
        *slot = true;
        self.senders[msg.worker_id]
            .send((msg.candidate, msg.dispatch_time))
            .map_err(|_| EngineError::TransportClosed)?;
        self.outstanding += 1;
        Ok(())
    }

    fn receive(&mut self) -> Result<Option<EvalResult>, EngineError> {
        if self.outstanding == 0 {
            return Ok(None);
        }
        let result = self.results.recv().map_err(|_| EngineError::TransportClosed)?;
        self.outstanding -= 1;
        self.busy[result.worker_id] = false;
        Ok(Some(result))
    }
}

impl Drop for LocalTransport {
    fn drop(&mut self) {
        self.senders.clear();
        for handle in self.handles.drain(..) {
            let _ = handle.join();
        }
    }
}

/// Resolved parameters of one optimization run.
#[derive(Debug, Clone)]
pub struct RunConfig {
    /// Computation units including the master; λ = workers − 1.
    pub workers: usize,
    /// Time budget in seconds (virtual in simulated mode, wall otherwise).
    pub time_limit_s: f64,
    /// Optional cap on received results; `None` leaves only the time budget.
    pub max_evaluations: Option<u64>,
    pub mutation: MutationParams,
    pub seed: u64,
    pub crash_probability: f64,
    pub latency: LatencyModel,
}

impl RunConfig {
    pub fn validate(&self) -> Result<(), EngineError> {
        if self.workers < 2 {
            return Err(EngineError::InvalidWorkerCount(self.workers));
        }
        if !(self.time_limit_s > 0.0) {
            return Err(EngineError::InvalidTimeLimit(self.time_limit_s));
        }
        if !(0.0..=1.0).contains(&self.crash_probability) || self.crash_probability.is_nan() {
            return Err(EngineError::InvalidCrashProbability(self.crash_probability));
        }
        Ok(())
    }
}

/// One received result, in arrival order.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceRow {
    /// 1-based arrival index.
    pub eval_index: u64,
    /// Completion time in seconds.
    pub virtual_time_s: f64,
    pub worker_id: usize,
    /// Time the candidate left the master, in seconds.
    pub dispatch_time_s: f64,
    pub candidate: Candidate,
    /// `None` marks a crashed evaluation.
    pub fitness: Option<f64>,
    /// Best fitness after absorbing this row; `None` before the first
    /// successful result.
    pub best_fitness: Option<f64>,
    /// Whether this row replaced the parent (ties replace, enabling plateau
    /// drift).
    pub is_best_update: bool,
}

/// Full record of one run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunTrace {
    pub problem_name: String,
    pub rows: Vec<TraceRow>,
    /// Best candidate and fitness ever accepted; `None` when no evaluation
    /// succeeded.
    pub best: Option<(Candidate, f64)>,
    /// Candidates sent to workers, including ones never received back.
    pub dispatched: u64,
    pub crash_count: u64,
    /// Times the mutation retry loop hit [`RETRY_CAP`] and fell back to the
    /// Sobol stream.
    pub mutation_saturations: u64,
    /// True when the run ended early: transport failure or a fully seen
    /// search space.
    pub truncated: bool,
    /// Transport clock when the run ended, in seconds.
    pub final_time_s: f64,
}

impl RunTrace {
    /// Received results that produced a fitness.
    pub fn completed_evaluations(&self) -> u64 {
        self.rows.iter().filter(|r| r.fitness.is_some()).count() as u64
    }

    /// Accepted results that strictly lowered the best fitness.
    pub fn strict_improvements(&self) -> u64 {
        let mut count = 0;
        let mut best: Option<f64> = None;
        for row in &self.rows {
            if let (true, Some(f)) = (row.is_best_update, row.fitness) {
                if best.map_or(true, |b| f < b) {
                    count += 1;
                }
                best = Some(best.map_or(f, |b| f.min(b)));
            }
        }
        count
    }
}

struct Master<'a> {
    cfg: &'a RunConfig,
    bounds: &'a BoundsSpec,
    problem_name: String,
    sobol: SobolSampler,
    rng: ChaCha8Rng,
    seen: HashSet<Candidate>,
    best: Option<(Candidate, f64)>,
    rows: Vec<TraceRow>,
    dispatched: u64,
    crash_count: u64,
    mutation_saturations: u64,
    truncated: bool,
}

impl<'a> Master<'a> {
    fn new(cfg: &'a RunConfig, problem: &'a dyn FitnessProblem) -> Result<Self, EngineError> {
        Ok(Self {
            cfg,
            bounds: problem.bounds(),
            problem_name: problem.name().to_owned(),
            sobol: SobolSampler::new(problem.bounds(), cfg.seed)?,
            rng: ChaCha8Rng::seed_from_u64(cfg.seed ^ MUTATION_STREAM_TAG),
            seen: HashSet::new(),
            best: None,
            rows: Vec::new(),
            dispatched: 0,
            crash_count: 0,
            mutation_saturations: 0,
            truncated: false,
        })
    }

    fn budget_reached(&self) -> bool {
        self.cfg.max_evaluations.is_some_and(|cap| self.rows.len() as u64 >= cap)
    }

    /// Applies selection to one received result and appends its trace row.
    fn absorb(&mut self, res: EvalResult) {
        log::debug!(
            "receive worker={} t={:.3} outcome={:?}",
            res.worker_id,
            res.completion_time,
            res.outcome
        );
        let (fitness, accepted) = match res.outcome {
            Outcome::Fitness(f) => {
                let accepted = self.best.as_ref().map_or(true, |(_, fb)| f <= *fb);
                if accepted {
                    self.best = Some((res.candidate.clone(), f));
                }
                (Some(f), accepted)
            }
            Outcome::Crashed => {
                self.crash_count += 1;
                (None, false)
            }
        };
        self.rows.push(TraceRow {
            eval_index: self.rows.len() as u64 + 1,
            virtual_time_s: res.completion_time,
            worker_id: res.worker_id,
            dispatch_time_s: res.dispatch_time,
            candidate: res.candidate,
            fitness,
            best_fitness: self.best.as_ref().map(|(_, f)| *f),
            is_best_update: accepted,
        });
    }

    /// Next never-dispatched candidate: a mutant of the parent, then fresh
    /// Sobol points, then uniform redraws, each stage capped at
    /// [`RETRY_CAP`]. `None` means every stage ran dry.
    fn next_candidate(&mut self) -> Option<Candidate> {
        if let Some((parent, _)) = &self.best {
            let parent = parent.clone();
            for _ in 0..RETRY_CAP {
                let child = mutate(&parent, self.bounds, self.cfg.mutation, &mut self.rng);
                if !self.seen.contains(&child) {
                    self.seen.insert(child.clone());
                    return Some(child);
                }
            }
            self.mutation_saturations += 1;
            log::debug!("mutation retries exhausted after {RETRY_CAP} attempts, switching to the Sobol stream");
        }
        for _ in 0..RETRY_CAP {
            let Ok(point) = self.sobol.next_candidate() else {
                break;
            };
            if !self.seen.contains(&point) {
                self.seen.insert(point.clone());
                return Some(point);
            }
        }
        for _ in 0..RETRY_CAP {
            let point: Candidate = self
                .bounds
                .lb()
                .iter()
                .zip(self.bounds.ub())
                .map(|(&lo, &hi)| self.rng.gen_range(lo..=hi))
                .collect();
            if !self.seen.contains(&point) {
                self.seen.insert(point.clone());
                return Some(point);
            }
        }
        self.truncated = true;
        log::warn!("no unseen candidate found after {} fallback attempts, run truncated", 2 * RETRY_CAP);
        None
    }

    fn finish(self, final_time_s: f64) -> RunTrace {
        RunTrace {
            problem_name: self.problem_name,
            rows: self.rows,
            best: self.best,
            dispatched: self.dispatched,
            crash_count: self.crash_count,
            mutation_saturations: self.mutation_saturations,
            truncated: self.truncated,
            final_time_s,
        }
    }
}

/// Runs the asynchronous (1+λ) loop until the time limit or evaluation cap.
///
/// Every worker is primed with a distinct Sobol point; from then on each
/// received result is absorbed (a fitness less than or equal to the parent's
/// replaces the parent, crashes only count) and the same worker immediately
/// receives a never-seen candidate. Results completing after the time limit
/// are discarded. A transport failure ends the run early with the trace
/// collected so far and the `truncated` flag set.
pub fn run_ea(
    cfg: &RunConfig,
    problem: &dyn FitnessProblem,
    transport: &mut dyn Transport,
) -> Result<RunTrace, EngineError> {
    cfg.validate()?;
    let lambda = cfg.workers - 1;
    if transport.workers() != lambda {
        return Err(EngineError::WorkerMismatch { expected: lambda, got: transport.workers() });
    }
    let mut master = Master::new(cfg, problem)?;
    for worker_id in 0..lambda {
        let Some(candidate) = master.next_candidate() else {
            break;
        };
        let msg = EvalMessage { worker_id, candidate, dispatch_time: transport.now() };
        log::debug!("dispatch worker={} t={:.3}", msg.worker_id, msg.dispatch_time);
        if let Err(err) = transport.dispatch(msg) {
            log::warn!("transport failed while priming worker {worker_id}: {err}");
            master.truncated = true;
            return Ok(master.finish(transport.now()));
        }
        master.dispatched += 1;
    }
    loop {
        if master.budget_reached() {
            break;
        }
        let res = match transport.receive() {
            Ok(Some(res)) => res,
            Ok(None) => break,
            Err(err) => {
                log::warn!("transport failed mid-run: {err}");
                master.truncated = true;
                break;
            }
        };
        if res.completion_time > cfg.time_limit_s {
            break;
        }
        let worker_id = res.worker_id;
        master.absorb(res);
        if master.budget_reached() || transport.now() >= cfg.time_limit_s {
            continue;
        }
        let Some(candidate) = master.next_candidate() else {
            continue;
        };
        let msg = EvalMessage { worker_id, candidate, dispatch_time: transport.now() };
        log::debug!("dispatch worker={} t={:.3}", msg.worker_id, msg.dispatch_time);
        match transport.dispatch(msg) {
            Ok(()) => master.dispatched += 1,
            Err(err) => {
                log::warn!("transport failed on redispatch: {err}");
                master.truncated = true;
                break;
            }
        }
    }
    Ok(master.finish(transport.now()))
}

/// Round-based baseline: dispatch to every worker, wait for the full round,
/// repeat. Selection and mutation rules match [`run_ea`]; only the barrier
/// differs, so the two are directly comparable on idle time.
pub fn run_sync_baseline(
    cfg: &RunConfig,
    problem: &dyn FitnessProblem,
    transport: &mut dyn Transport,
) -> Result<RunTrace, EngineError> {
    cfg.validate()?;
    let lambda = cfg.workers - 1;
    if transport.workers() != lambda {
        return Err(EngineError::WorkerMismatch { expected: lambda, got: transport.workers() });
    }
    let mut master = Master::new(cfg, problem)?;
    'rounds: loop {
        if master.budget_reached() || transport.now() >= cfg.time_limit_s {
            break;
        }
        let mut outstanding = 0;
        for worker_id in 0..lambda {
            let Some(candidate) = master.next_candidate() else {
                break;
            };
            let msg = EvalMessage { worker_id, candidate, dispatch_time: transport.now() };
            log::debug!("dispatch worker={} t={:.3}", msg.worker_id, msg.dispatch_time);
            if let Err(err) = transport.dispatch(msg) {
                log::warn!("transport failed while dispatching a round: {err}");
                master.truncated = true;
                break 'rounds;
            }
            master.dispatched += 1;
            outstanding += 1;
        }
        if outstanding == 0 {
            break;
        }
        for _ in 0..outstanding {
            let res = match transport.receive() {
                Ok(Some(res)) => res,
                Ok(None) => break 'rounds,
                Err(err) => {
                    log::warn!("transport failed mid-round: {err}");
                    master.truncated = true;
                    break 'rounds;
                }
            };
            if res.completion_time > cfg.time_limit_s || master.budget_reached() {
                break 'rounds;
            }
            master.absorb(res);
        }
    }
    Ok(master.finish(transport.now()))
}

/// Runs the asynchronous loop and the synchronous baseline on identical
/// simulated farms (same seed, same latency stream construction) and returns
/// both traces, asynchronous first.
pub fn sync_compare(
    cfg: &RunConfig,
    problem: &dyn FitnessProblem,
) -> Result<(RunTrace, RunTrace), EngineError> {
    let mut async_farm = SimTransport::from_config(cfg, problem)?;
    let async_trace = run_ea(cfg, problem, &mut async_farm)?;
    let mut sync_farm = SimTransport::from_config(cfg, problem)?;
    let sync_trace = run_sync_baseline(cfg, problem, &mut sync_farm)?;
    Ok((async_trace, sync_trace))
}
