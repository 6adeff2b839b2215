use std::path::PathBuf;

use crate::SynthError;

/// Node and edge counts of the default generated graph at scale 1.
pub const DEFAULT_NODES: f64 = 100_000.0;
pub const DEFAULT_EDGES: f64 = 1_000_000.0;
/// Users per node in the social-network dataset the workload imitates
/// (10,000 of 1.6 million).
pub const USER_FRACTION: f64 = 10_000.0 / 1_600_000.0;
pub const REQUESTS_PER_KIND: f64 = 400.0;

#[derive(Debug, Clone, PartialEq)]
pub enum GraphSource {
    Generated { nodes: usize, edges: usize },
    /// Whitespace-separated `src dst` integer pairs, `#` comments.
    EdgeList(PathBuf),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SynthConfig {
    pub seed: u64,
    pub scale: f64,
    pub graph_source: GraphSource,
    /// Overrides the scaled request count per guard kind.
    pub request_count: Option<usize>,
}

impl SynthConfig {
    pub fn new(seed: u64, scale: f64) -> Self {
        SynthConfig {
            seed,
            scale,
            graph_source: GraphSource::Generated {
                nodes: scaled(DEFAULT_NODES, scale),
                edges: scaled(DEFAULT_EDGES, scale),
            },
            request_count: None,
        }
    }

    pub fn with_graph(mut self, source: GraphSource) -> Self {
        self.graph_source = source;
        self
    }

    pub fn with_request_count(mut self, n: usize) -> Self {
        self.request_count = Some(n);
        self
    }

    pub fn validate(&self) -> Result<(), SynthError> {
        if !(self.scale.is_finite() && self.scale > 0.0) {
            return Err(SynthError::InvalidScale(self.scale));
        }
        Ok(())
    }

    pub fn scaled(&self, base: f64) -> usize {
        scaled(base, self.scale)
    }

    pub fn requests_per_kind(&self) -> usize {
        self.request_count.unwrap_or_else(|| self.scaled(REQUESTS_PER_KIND))
    }
}

/// `base * scale` rounded to the nearest integer, at least 1.
pub fn scaled(base: f64, scale: f64) -> usize {
    ((base * scale).round() as usize).max(1)
}
