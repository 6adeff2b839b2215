use std::sync::Arc;
use std::time::Instant;

use rebac_core::admin::execute_shared;
use rebac_core::{
    check, enabled_actions, enabled_principals, filter_collection, AccessRequest, AdminError, EngineConfig,
    EngineError, PolicyStore, SharedGraph,
};
use serde_json::{json, Value};

use crate::wire::{Overrides, WireRequest, WireResponse};

/// Decision point state shared by every connection.
#[derive(Debug, Clone)]
pub struct Pdp {
    graph: Arc<SharedGraph>,
    store: Arc<PolicyStore>,
    config: EngineConfig,
}

impl Pdp {
    pub fn new(graph: SharedGraph, store: PolicyStore, config: EngineConfig) -> Self {
        Pdp {
            graph: Arc::new(graph),
            store: Arc::new(store),
            config,
        }
    }

    pub fn graph(&self) -> &SharedGraph {
        &self.graph
    }

    pub fn store(&self) -> &PolicyStore {
        &self.store
    }

    pub fn config(&self) -> EngineConfig {
        self.config
    }

    fn effective(&self, o: &Overrides) -> EngineConfig {
        EngineConfig {
            mode: o.mode.unwrap_or(self.config.mode),
            semantics: o.semantics.unwrap_or(self.config.semantics),
            strategy: o.strategy.unwrap_or(self.config.strategy),
        }
    }

    /// Answers one request line.
    pub fn handle_line(&self, line: &str) -> WireResponse {
        let start = Instant::now();
        let mut response = match serde_json::from_str::<Value>(line) {
            Err(e) => WireResponse::failure("parse", e.to_string()),
            Ok(value) => match serde_json::from_value::<WireRequest>(value) {
                Err(e) => WireResponse::failure("bad_request", e.to_string()),
                Ok(req) => self.handle(&req),
            },
        };
        response.latency_us = start.elapsed().as_secs_f64() * 1e6;
        response
    }

    pub fn handle(&self, req: &WireRequest) -> WireResponse {
        let result = match req {
            WireRequest::Check {
                resource,
                user,
                guard,
                overrides,
            } => {
                let access = AccessRequest::new(resource.clone(), user.clone(), guard.clone());
                let graph = self.graph.read();
                check(&self.store, &graph, &access, &self.effective(overrides))
                    .map(|d| serde_json::to_value(d).expect("decision serializes"))
                    .map_err(engine_error)
            }
            WireRequest::Filter {
                user,
                guard,
                resources,
                overrides,
            } => {
                let graph = self.graph.read();
                filter_collection(&self.store, &graph, user, guard, resources, &self.effective(overrides))
                    .map(|allowed| json!({ "allowed": allowed }))
                    .map_err(engine_error)
            }
            WireRequest::Match { resource, user } => {
                let graph = self.graph.read();
                enabled_principals(&self.store, &graph, resource, user)
                    .map(|principals| json!({ "principals": principals }))
                    .map_err(engine_error)
            }
            WireRequest::AdminEnabled { user, patient } => {
                let graph = self.graph.read();
                enabled_actions(&self.store, &graph, user, patient)
                    .map(|actions| json!({ "actions": actions }))
                    .map_err(admin_error)
            }
            WireRequest::AdminExec {
                action,
                user,
                patient,
                bindings,
            } => {
                let binding = WireRequest::binding(user, patient, bindings);
                execute_shared(&self.store, &self.graph, action, &binding)
                    .map(|report| serde_json::to_value(report).expect("report serializes"))
                    .map_err(admin_error)
            }
        };
        match result {
            Ok(value) => WireResponse::success(value),
            Err(failure) => failure,
        }
    }
}

pub fn engine_error_code(e: &EngineError) -> &'static str {
    match e {
        EngineError::UnknownVertex(_) => "unknown_vertex",
        EngineError::MissingFormula { .. } => "missing_formula",
        EngineError::Formula { .. } => "formula",
    }
}

pub fn admin_error_code(e: &AdminError) -> &'static str {
    match e {
        AdminError::UnknownAction(_) => "unknown_action",
        AdminError::NotEnabled(_) => "not_enabled",
        AdminError::NotApplicable(_) => "not_applicable",
        AdminError::UnboundParticipant(_) => "unbound_participant",
        AdminError::MissingFormula { .. } => "missing_formula",
        AdminError::Formula { .. } => "formula",
        AdminError::AddExistingEdge(_) => "add_existing_edge",
        AdminError::DeleteMissingEdge(_) => "delete_missing_edge",
        AdminError::Graph(_) => "graph",
        AdminError::Aborted(_) => "aborted",
    }
}

fn engine_error(e: EngineError) -> WireResponse {
    WireResponse::failure(engine_error_code(&e), e.to_string())
}

fn admin_error(e: AdminError) -> WireResponse {
    WireResponse::failure(admin_error_code(&e), e.to_string())
}
