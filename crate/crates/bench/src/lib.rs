//! Benchmark harness: warms the graph store, replays a synthesized request
//! list under one of eight configurations, and reports per-request
//! latency with trace counters.

pub mod configuration;
pub mod stats;
pub mod warmup;

use std::io::Write;
use std::time::Instant;

use rebac_core::{check, AccessRequest, AuthorizationGraph, EngineError, PolicyStore};
use rebac_synth::{Stream, SynthConfig, SynthError, SynthRng, Workload};
use serde::Serialize;
use thiserror::Error;

pub use configuration::BenchConfiguration;
pub use stats::mean_ci95;
pub use warmup::{neighbor_queries, NeighborStats, WARMUP_QUERIES};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BenchConfig {
    pub configuration: BenchConfiguration,
    pub seed: u64,
    pub scale: f64,
    pub repetitions: usize,
}

impl BenchConfig {
    pub fn new(configuration: BenchConfiguration, seed: u64, scale: f64) -> Self {
        BenchConfig {
            configuration,
            seed,
            scale,
            repetitions: 1,
        }
    }
}

#[derive(Debug, Error)]
pub enum BenchError {
    #[error(transparent)]
    Synth(#[from] SynthError),
    #[error("request {index} ({resource}, {user}): {source}")]
    Engine {
        index: usize,
        resource: String,
        user: String,
        source: EngineError,
    },
    #[error("writing report: {0}")]
    Csv(#[from] csv::Error),
    #[error("writing report: {0}")]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Sample {
    pub request_index: usize,
    pub allow: bool,
    pub latency_us: f64,
    pub formula_evals: usize,
    pub cache_hits: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchReport {
    pub configuration: BenchConfiguration,
    /// Measured requests only, across all repetitions.
    pub samples: Vec<Sample>,
    pub mean_us: f64,
    pub ci95_us: f64,
    pub mean_formula_evals: f64,
    pub mean_cache_hits: f64,
    pub warmup: NeighborStats,
}

impl BenchReport {
    pub fn decisions(&self) -> Vec<bool> {
        self.samples.iter().map(|s| s.allow).collect()
    }

    pub fn allow_rate(&self) -> f64 {
        mean(self.samples.iter().map(|s| s.allow as u8 as f64))
    }

    /// CSV with one row per sample followed by a `mean` row and a `ci95`
    /// row (latency half-width) in the same columns.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<(), BenchError> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["config", "request_index", "allow", "latency_us", "formula_evals", "cache_hits"])?;
        let name = self.configuration.name();
        for s in &self.samples {
            w.write_record([
                name,
                &s.request_index.to_string(),
                if s.allow { "true" } else { "false" },
                &format!("{:.3}", s.latency_us),
                &s.formula_evals.to_string(),
                &s.cache_hits.to_string(),
            ])?;
        }
        w.write_record([
            name,
            "mean",
            &format!("{:.4}", self.allow_rate()),
            &format!("{:.3}", self.mean_us),
            &format!("{:.3}", self.mean_formula_evals),
            &format!("{:.3}", self.mean_cache_hits),
        ])?;
        w.write_record([name, "ci95", "", &format!("{:.3}", self.ci95_us), "", ""])?;
        w.flush()?;
        Ok(())
    }
}

fn mean(xs: impl Iterator<Item = f64>) -> f64 {
    let (sum, n) = xs.fold((0.0, 0usize), |(s, n), x| (s + x, n + 1));
    if n == 0 {
        0.0
    } else {
        sum / n as f64
    }
}

/// Synthesizes the workload for `cfg` and benchmarks it.
pub fn run_bench(cfg: &BenchConfig) -> Result<BenchReport, BenchError> {
    let mut workload = Workload::generate(&SynthConfig::new(cfg.seed, cfg.scale))?;
    let store = workload.store()?;
    let requests = workload.requests(cfg.configuration.guard_kind()).to_vec();
    run_on_workload(&store, &workload.graph, &requests, cfg.configuration, cfg.repetitions, cfg.seed)
}

/// Warms the store with [`WARMUP_QUERIES`] neighbour queries, then replays
/// `requests` in order `repetitions` times. The first half of each replay
/// is warmup and is not recorded.
pub fn run_on_workload(
    store: &PolicyStore,
    graph: &AuthorizationGraph,
    requests: &[AccessRequest],
    configuration: BenchConfiguration,
    repetitions: usize,
    seed: u64,
) -> Result<BenchReport, BenchError> {
    let mut rng = SynthRng::stream(seed, Stream::Warmup);
    let warmup = neighbor_queries(graph, &mut rng, WARMUP_QUERIES);
    let engine = configuration.engine_config();
    let skip = requests.len() / 2;
    let mut samples = Vec::with_capacity((requests.len() - skip) * repetitions);
    for _ in 0..repetitions {
        for (index, req) in requests.iter().enumerate() {
            let start = Instant::now();
            let decision = check(store, graph, req, &engine);
            let elapsed = start.elapsed();
            let decision = decision.map_err(|source| BenchError::Engine {
                index,
                resource: req.resource.clone(),
                user: req.user.clone(),
                source,
            })?;
            if index < skip {
                continue;
            }
            samples.push(Sample {
                request_index: index,
                allow: decision.allow,
                latency_us: elapsed.as_secs_f64() * 1e6,
                formula_evals: decision.trace.formulas_evaluated,
                cache_hits: decision.trace.cache_hits,
            });
        }
    }
    let latencies: Vec<f64> = samples.iter().map(|s| s.latency_us).collect();
    let (mean_us, ci95_us) = mean_ci95(&latencies);
    Ok(BenchReport {
        configuration,
        mean_formula_evals: mean(samples.iter().map(|s| s.formula_evals as f64)),
        mean_cache_hits: mean(samples.iter().map(|s| s.cache_hits as f64)),
        samples,
        mean_us,
        ci95_us,
        warmup,
    })
}
