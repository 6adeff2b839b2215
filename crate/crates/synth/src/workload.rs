use std::fs;
use std::path::Path;

use rebac_core::policy::{attach, PolicyDocument, PolicyStore};
use rebac_core::{save_graph, AccessRequest, AuthorizationGraph, GuardKind};

use crate::graph::synth_graph;
use crate::policy::{corpus_file, synth_policy};
use crate::rbac::{synth_rbac, SynthRbac};
use crate::requests::synth_requests;
use crate::{SynthConfig, SynthError};

pub const GRAPH_FILE: &str = "graph.txt";
pub const POLICY_FILE: &str = "policy.json";
pub const ONE_OF_FILE: &str = "requests-one-of.json";
pub const ALL_OF_FILE: &str = "requests-all-of.json";
pub const FORMULAS_FILE: &str = "formulas.hl";

/// Everything one benchmark run needs.
#[derive(Debug)]
pub struct Workload {
    pub rbac: SynthRbac,
    pub graph: AuthorizationGraph,
    pub policy: PolicyDocument,
    pub one_of: Vec<AccessRequest>,
    pub all_of: Vec<AccessRequest>,
}

impl Workload {
    pub fn generate(cfg: &SynthConfig) -> Result<Self, SynthError> {
        let rbac = synth_rbac(cfg)?;
        let graph = synth_graph(cfg)?;
        let policy = synth_policy(cfg, &rbac);
        let one_of = synth_requests(cfg, &graph, &rbac.privileges, GuardKind::OneOf)?;
        let all_of = synth_requests(cfg, &graph, &rbac.privileges, GuardKind::AllOf)?;
        Ok(Workload {
            rbac,
            graph,
            policy,
            one_of,
            all_of,
        })
    }

    pub fn requests(&self, kind: GuardKind) -> &[AccessRequest] {
        match kind {
            GuardKind::OneOf => &self.one_of,
            GuardKind::AllOf => &self.all_of,
        }
    }

    /// Loads the policy and attaches it to the graph.
    pub fn store(&mut self) -> Result<PolicyStore, SynthError> {
        let store = PolicyStore::from_document(self.policy.clone())?;
        attach(&store, &mut self.graph)?;
        Ok(store)
    }

    pub fn write_to(&self, dir: &Path) -> Result<(), SynthError> {
        let io = |e| SynthError::Io(dir.display().to_string(), e);
        fs::create_dir_all(dir).map_err(io)?;
        let files: [(&str, String); 5] = [
            (GRAPH_FILE, save_graph(&self.graph)),
            (POLICY_FILE, pretty(&self.policy)),
            (ONE_OF_FILE, pretty(&self.one_of)),
            (ALL_OF_FILE, pretty(&self.all_of)),
            (FORMULAS_FILE, corpus_file()),
        ];
        for (name, contents) in files {
            let path = dir.join(name);
            fs::write(&path, contents).map_err(|e| SynthError::Io(path.display().to_string(), e))?;
        }
        Ok(())
    }
}

fn pretty<T: serde::Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("plain data serializes");
    s.push('\n');
    s
}
