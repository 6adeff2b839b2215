use std::collections::HashSet;
use std::time::{Duration, Instant};

use rebac_core::{AuthorizationGraph, Direction};
use rebac_synth::SynthRng;

pub const WARMUP_QUERIES: usize = 250;

#[derive(Debug, Clone, PartialEq)]
pub struct NeighborStats {
    pub queries: usize,
    pub total: Duration,
    pub neighbors_returned: usize,
}

impl NeighborStats {
    pub fn mean_us(&self) -> f64 {
        if self.queries == 0 {
            0.0
        } else {
            self.total.as_secs_f64() * 1e6 / self.queries as f64
        }
    }
}

/// Runs up to `count` distinct random neighbour-retrieval queries, each a
/// (vertex, relation, direction) triple, and times them.
pub fn neighbor_queries(graph: &AuthorizationGraph, rng: &mut SynthRng, count: usize) -> NeighborStats {
    let vertices = graph.vertices();
    let relations = graph.relations();
    let space = vertices.len() * relations.len() * 2;
    let count = count.min(space);
    let mut seen = HashSet::with_capacity(count);
    let mut stats = NeighborStats {
        queries: 0,
        total: Duration::ZERO,
        neighbors_returned: 0,
    };
    while seen.len() < count {
        let (v, r) = (rng.index(vertices.len()), rng.index(relations.len()));
        let dir = if rng.below(2) == 0 { Direction::Forward } else { Direction::Inverse };
        if !seen.insert((v, r, dir)) {
            continue;
        }
        let start = Instant::now();
        let found = graph
            .neighbors(&vertices[v].id, &relations[r].name, dir)
            .expect("vertex and relation come from the graph");
        stats.total += start.elapsed();
        stats.queries += 1;
        stats.neighbors_returned += found.len();
    }
    stats
}
