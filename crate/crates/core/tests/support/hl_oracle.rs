//! Brute-force reference semantics for hybrid-logic formulas.
//!
//! Computes the full satisfaction set of every subformula over an explicit
//! edge list, independently of the graph index and the local model checker.

#![allow(dead_code)]

use std::collections::BTreeSet;

use rand::rngs::StdRng;
use rand::Rng;
use rebac_core::graph::{AuthorizationGraph, RelationCategory, VertexKind};
use rebac_core::hl::{Formula, Node};

pub struct Instance {
    pub vertices: Vec<String>,
    pub relations: Vec<String>,
    pub edges: Vec<(usize, usize, usize)>,
    pub vars: Vec<String>,
    pub valuation: Vec<usize>,
    pub formula: Formula,
}

impl Instance {
    pub fn graph(&self) -> AuthorizationGraph {
        let mut g = AuthorizationGraph::new();
        for r in &self.relations {
            g.declare_relation(r.clone(), RelationCategory::UserManaged).unwrap();
        }
        for v in &self.vertices {
            g.add_vertex(v.clone(), VertexKind::Entity).unwrap();
        }
        for &(s, r, d) in &self.edges {
            g.add_edge(&self.vertices[s], &self.relations[r], &self.vertices[d]).unwrap();
        }
        g
    }

    pub fn valuation(&self) -> rebac_core::hl::Valuation {
        self.vars
            .iter()
            .zip(&self.valuation)
            .map(|(x, &v)| (x.clone(), self.vertices[v].clone()))
            .collect()
    }

    /// Truth value via satisfaction sets. Anchored formulas hold at every
    /// world or at none; this checks that too.
    pub fn brute_force(&self) -> bool {
        let sat = self.sat(self.formula.body());
        let n = self.vertices.len();
        assert!(sat.is_empty() || sat.len() == n, "anchored formula depends on world");
        sat.len() == n
    }

    fn var_world(&self, x: &str) -> usize {
        let i = self.vars.iter().position(|v| v == x).expect("declared");
        self.valuation[i]
    }

    fn sat(&self, node: &Node) -> BTreeSet<usize> {
        let all: BTreeSet<usize> = (0..self.vertices.len()).collect();
        match node {
            Node::True => all,
            Node::False => BTreeSet::new(),
            Node::Var(x) => BTreeSet::from([self.var_world(x)]),
            Node::Not(inner) => all.difference(&self.sat(inner)).copied().collect(),
            Node::And(l, r) => self.sat(l).intersection(&self.sat(r)).copied().collect(),
            Node::Or(l, r) => self.sat(l).union(&self.sat(r)).copied().collect(),
            Node::Diamond { rel, inverse, body } => {
                let ri = self.relations.iter().position(|r| r == rel).expect("declared");
                let target = self.sat(body);
                self.edges
                    .iter()
                    .filter(|&&(_, r, _)| r == ri)
                    .filter_map(|&(s, _, d)| {
                        let (from, to) = if *inverse { (d, s) } else { (s, d) };
                        target.contains(&to).then_some(from)
                    })
                    .collect()
            }
            Node::At(x, inner) => {
                if self.sat(inner).contains(&self.var_world(x)) {
                    all
                } else {
                    BTreeSet::new()
                }
            }
        }
    }
}

fn any_node(rng: &mut StdRng, depth: usize, vars: &[String], rels: &[String]) -> Node {
    if depth <= 1 {
        return match rng.gen_range(0..6) {
            0 => Node::True,
            1 => Node::False,
            _ => Node::var(vars[rng.gen_range(0..vars.len())].clone()),
        };
    }
    match rng.gen_range(0..10) {
        0 => Node::var(vars[rng.gen_range(0..vars.len())].clone()),
        1 => Node::not(any_node(rng, depth - 1, vars, rels)),
        2 => Node::and(any_node(rng, depth - 1, vars, rels), any_node(rng, depth - 1, vars, rels)),
        3 => Node::or(any_node(rng, depth - 1, vars, rels), any_node(rng, depth - 1, vars, rels)),
        4 => Node::at(vars[rng.gen_range(0..vars.len())].clone(), any_node(rng, depth - 1, vars, rels)),
        _ => {
            let rel = rels[rng.gen_range(0..rels.len())].clone();
            let body = any_node(rng, depth - 1, vars, rels);
            if rng.gen_bool(0.5) {
                Node::inverse(rel, body)
            } else {
                Node::diamond(rel, body)
            }
        }
    }
}

/// A random anchored body of AST depth at most `depth` (≥ 2).
pub fn anchored_node(rng: &mut StdRng, depth: usize, vars: &[String], rels: &[String]) -> Node {
    match rng.gen_range(0..8) {
        0 if depth > 2 => Node::not(anchored_node(rng, depth - 1, vars, rels)),
        1 if depth > 2 => Node::and(
            anchored_node(rng, depth - 1, vars, rels),
            anchored_node(rng, depth - 1, vars, rels),
        ),
        2 if depth > 2 => Node::or(
            anchored_node(rng, depth - 1, vars, rels),
            anchored_node(rng, depth - 1, vars, rels),
        ),
        3 => {
            if rng.gen_bool(0.5) {
                Node::True
            } else {
                Node::False
            }
        }
        _ => Node::at(vars[rng.gen_range(0..vars.len())].clone(), any_node(rng, depth - 1, vars, rels)),
    }
}

/// Graph with 1..=8 vertices and 1..=3 relations, anchored formula of depth
/// at most 5, total valuation.
pub fn random_instance(rng: &mut StdRng) -> Instance {
    let n = rng.gen_range(1..=8);
    let vertices: Vec<String> = (0..n).map(|i| format!("v{i}")).collect();
    let relations: Vec<String> = (0..rng.gen_range(1..=3)).map(|i| format!("r{i}")).collect();
    let density = rng.gen_range(0.0..0.5);
    let mut edges = Vec::new();
    for s in 0..n {
        for r in 0..relations.len() {
            for d in 0..n {
                if rng.gen_bool(density) {
                    edges.push((s, r, d));
                }
            }
        }
    }
    let vars: Vec<String> = (0..rng.gen_range(1..=3)).map(|i| format!("x{i}")).collect();
    let valuation = vars.iter().map(|_| rng.gen_range(0..n)).collect();
    let depth = rng.gen_range(2..=5);
    let body = anchored_node(rng, depth, &vars, &relations);
    assert!(body.depth() <= 5);
    let formula = Formula::new(vars.clone(), body).expect("generated formula validates");
    Instance {
        vertices,
        relations,
        edges,
        vars,
        valuation,
        formula,
    }
}
