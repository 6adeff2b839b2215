//! Deterministic generator for the benchmark workload: RBAC tables, a
//! labelled social graph, the formula corpus with one principal per role,
//! and request lists for both guard kinds.
//!
//! Output depends only on `(seed, scale, graph source)`.

pub mod config;
pub mod graph;
pub mod policy;
pub mod rbac;
pub mod requests;
pub mod rng;
pub mod workload;

use thiserror::Error;

pub use config::{GraphSource, SynthConfig};
pub use graph::{synth_graph, RawDigraph};
pub use policy::{corpus, corpus_file, synth_policy};
pub use rbac::{synth_rbac, RbacCounts, SynthRbac};
pub use requests::synth_requests;
pub use rng::{Stream, SynthRng};
pub use workload::Workload;

#[derive(Debug, Error)]
pub enum SynthError {
    #[error("scale must be a positive finite number, got {0}")]
    InvalidScale(f64),
    #[error("scale {scale} is infeasible: {counts:?} needs more assignment pairs than exist")]
    InfeasibleScale { scale: f64, counts: RbacCounts },
    #[error("cannot place {edges} distinct edges on {nodes} nodes")]
    InfeasibleGraph { nodes: usize, edges: usize },
    #[error("{users} users requested but the graph has only {nodes} nodes")]
    TooManyUsers { users: usize, nodes: usize },
    #[error("edge list line {line}: expected two integer node ids")]
    EdgeList { line: usize },
    #[error("graph has no users or no patients, or there are no privileges")]
    EmptyPopulation,
    #[error("{0}: {1}")]
    Io(String, #[source] std::io::Error),
    #[error(transparent)]
    Graph(#[from] rebac_core::GraphError),
    #[error(transparent)]
    Policy(#[from] rebac_core::policy::PolicyError),
    #[error(transparent)]
    Attach(#[from] rebac_core::policy::AttachError),
}
