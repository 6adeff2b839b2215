//! Raw digraph generation, top in-degree user selection and edge labelling.

use std::collections::HashSet;
use std::fs;
use std::path::Path;

use rebac_core::{AuthorizationGraph, RelationCategory, VertexKind};

use crate::config::{GraphSource, USER_FRACTION};
use crate::rbac::{user_id, RbacCounts};
use crate::rng::{Stream, SynthRng};
use crate::{SynthConfig, SynthError};

/// Unlabelled directed graph over integer node ids.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RawDigraph {
    /// Sorted, distinct.
    pub nodes: Vec<u64>,
    pub edges: Vec<(u64, u64)>,
}

impl RawDigraph {
    pub fn in_degrees(&self) -> Vec<(u64, usize)> {
        let mut deg: Vec<(u64, usize)> = self.nodes.iter().map(|&n| (n, 0)).collect();
        for &(_, d) in &self.edges {
            let i = self.nodes.binary_search(&d).expect("edge endpoint is a node");
            deg[i].1 += 1;
        }
        deg
    }
}

/// Labels for each (source kind, target kind) edge type. Patients are `p`,
/// users are `u`.
pub const PATIENT_USER: &[&str] = &["gp", "register-ward"];
pub const USER_USER: &[&str] = &["referrer", "ward-nurse", "appoint-team", "team"];
pub const PATIENT_PATIENT: &[&str] = &["agent"];
pub const USER_PATIENT: &[&str] = &["dummy"];
/// Used by one corpus formula but never assigned to an edge.
pub const MEMBER: &str = "member";

pub fn labels_for(src: VertexKind, dst: VertexKind) -> &'static [&'static str] {
    match (src, dst) {
        (VertexKind::Patient, VertexKind::User) => PATIENT_USER,
        (VertexKind::User, VertexKind::User) => USER_USER,
        (VertexKind::Patient, VertexKind::Patient) => PATIENT_PATIENT,
        (VertexKind::User, VertexKind::Patient) => USER_PATIENT,
        _ => &[],
    }
}

/// Every relation a synthesized graph declares, all user-managed.
pub fn relation_names() -> Vec<&'static str> {
    let mut names: Vec<&str> = [PATIENT_USER, USER_USER, PATIENT_PATIENT, USER_PATIENT].concat();
    names.push(MEMBER);
    names
}

/// Preferential-attachment digraph on nodes `0..nodes`. Each edge picks a
/// uniform source; its target is, with equal probability, a uniform node or
/// the target of a uniformly chosen earlier edge, which selects nodes in
/// proportion to their in-degree. Self-loops and duplicates are redrawn.
pub fn generate_digraph(seed: u64, nodes: usize, edges: usize) -> Result<RawDigraph, SynthError> {
    let n = nodes as u64;
    if nodes == 0 || edges as u64 > n * (n - 1) {
        return Err(SynthError::InfeasibleGraph { nodes, edges });
    }
    let mut rng = SynthRng::stream(seed, Stream::Graph);
    let mut seen: HashSet<(u64, u64)> = HashSet::with_capacity(edges);
    let mut out: Vec<(u64, u64)> = Vec::with_capacity(edges);
    let budget = edges.saturating_mul(64).max(1 << 16);
    let mut attempts = 0usize;
    while out.len() < edges {
        attempts += 1;
        if attempts > budget {
            return Err(SynthError::InfeasibleGraph { nodes, edges });
        }
        let src = rng.below(n);
        let dst = if !out.is_empty() && rng.below(2) == 0 {
            out[rng.index(out.len())].1
        } else {
            rng.below(n)
        };
        if src != dst && seen.insert((src, dst)) {
            out.push((src, dst));
        }
    }
    Ok(RawDigraph {
        nodes: (0..n).collect(),
        edges: out,
    })
}

/// Reads a SNAP-style edge list. Duplicate pairs keep their first
/// occurrence.
pub fn load_edge_list(path: &Path) -> Result<RawDigraph, SynthError> {
    let text = fs::read_to_string(path).map_err(|e| SynthError::Io(path.display().to_string(), e))?;
    parse_edge_list(&text)
}

pub fn parse_edge_list(text: &str) -> Result<RawDigraph, SynthError> {
    let mut seen = HashSet::new();
    let mut nodes = Vec::new();
    let mut edges = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut fields = line.split_whitespace().map(str::parse::<u64>);
        let (Some(Ok(a)), Some(Ok(b)), None) = (fields.next(), fields.next(), fields.next()) else {
            return Err(SynthError::EdgeList { line: i + 1 });
        };
        if seen.insert((a, b)) {
            nodes.extend([a, b]);
            edges.push((a, b));
        }
    }
    nodes.sort_unstable();
    nodes.dedup();
    Ok(RawDigraph { nodes, edges })
}

/// The `k` nodes of highest in-degree, ties broken by ascending node id,
/// ordered by rank.
pub fn select_users(raw: &RawDigraph, k: usize) -> Result<Vec<u64>, SynthError> {
    if k > raw.nodes.len() {
        return Err(SynthError::TooManyUsers {
            users: k,
            nodes: raw.nodes.len(),
        });
    }
    let mut deg = raw.in_degrees();
    deg.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));
    Ok(deg.into_iter().take(k).map(|(n, _)| n).collect())
}

pub fn patient_id(node: u64) -> String {
    format!("p{node}")
}

/// Turns a raw digraph into an authorization graph: the `users` become
/// `u{rank}`, every other node becomes patient `p{node}`, and each edge gets
/// a label drawn uniformly from those allowed for its endpoint kinds.
pub fn label_graph(seed: u64, raw: &RawDigraph, users: &[u64]) -> Result<AuthorizationGraph, SynthError> {
    let mut rank = std::collections::HashMap::with_capacity(users.len());
    for (i, &u) in users.iter().enumerate() {
        rank.insert(u, i);
    }
    let name = |node: u64| -> (String, VertexKind) {
        match rank.get(&node) {
            Some(&r) => (user_id(r), VertexKind::User),
            None => (patient_id(node), VertexKind::Patient),
        }
    };

    let mut g = AuthorizationGraph::new();
    for rel in relation_names() {
        g.declare_relation(rel, RelationCategory::UserManaged)?;
    }
    for (i, _) in users.iter().enumerate() {
        g.add_vertex(user_id(i), VertexKind::User)?;
    }
    for &node in &raw.nodes {
        if !rank.contains_key(&node) {
            g.add_vertex(patient_id(node), VertexKind::Patient)?;
        }
    }
    let mut rng = SynthRng::stream(seed, Stream::Labels);
    for &(s, d) in &raw.edges {
        let (src, sk) = name(s);
        let (dst, dk) = name(d);
        let label = rng.choose(labels_for(sk, dk));
        g.add_edge(&src, label, &dst)?;
    }
    Ok(g)
}

/// Number of graph vertices labelled as users for a graph of `nodes` nodes.
pub fn graph_user_count(cfg: &SynthConfig, nodes: usize) -> usize {
    let rbac_users = RbacCounts::at_scale(cfg.scale).users;
    let wanted = match cfg.graph_source {
        GraphSource::Generated { .. } => ((nodes as f64 * USER_FRACTION).round() as usize).max(1),
        GraphSource::EdgeList(_) => rbac_users,
    };
    wanted.min(rbac_users).min(nodes)
}

pub fn synth_raw_graph(cfg: &SynthConfig) -> Result<RawDigraph, SynthError> {
    cfg.validate()?;
    match &cfg.graph_source {
        GraphSource::Generated { nodes, edges } => generate_digraph(cfg.seed, *nodes, *edges),
        GraphSource::EdgeList(path) => load_edge_list(path),
    }
}

pub fn synth_graph(cfg: &SynthConfig) -> Result<AuthorizationGraph, SynthError> {
    let raw = synth_raw_graph(cfg)?;
    let users = select_users(&raw, graph_user_count(cfg, raw.nodes.len()))?;
    label_graph(cfg.seed, &raw, &users)
}

/// Edges whose label is not allowed for their endpoint kinds.
pub fn type_violations(g: &AuthorizationGraph) -> Vec<rebac_core::Edge> {
    g.edges()
        .into_iter()
        .filter(|e| {
            let kind = |v: &str| g.vertex(v).map(|v| v.kind);
            match (kind(&e.src), kind(&e.dst)) {
                (Some(s), Some(d)) => !labels_for(s, d).contains(&e.rel.as_str()),
                _ => true,
            }
        })
        .collect()
}
