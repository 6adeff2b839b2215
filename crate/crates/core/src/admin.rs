//! Administrative actions.
//!
//! An action is performed by a `user` against a `patient`, possibly with
//! auxiliary participants. It is *enabled* when its enabling precondition
//! holds over `{user, patient}` and *applicable* when, in addition, its
//! applicability precondition holds over all participants. Execution
//! re-checks both preconditions and applies every effect inside a single
//! write transaction: either all updates land or none do.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{AuthorizationGraph, Edge, GraphError, RelationCategory, SharedGraph};
use crate::hl::{evaluate, EvalError, FormulaLibrary, Valuation};
use crate::policy::{Diagnostic, DiagnosticCode, PolicyStore};

pub const USER: &str = "user";
pub const PATIENT: &str = "patient";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum UpdateOp {
    Add,
    Del,
}

impl fmt::Display for UpdateOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            UpdateOp::Add => "add",
            UpdateOp::Del => "del",
        })
    }
}

/// `add rel(x, y)` or `del rel(x, y)` over participant names.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Update {
    pub op: UpdateOp,
    pub rel: String,
    pub x: String,
    pub y: String,
}

impl fmt::Display for Update {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}({}, {})", self.op, self.rel, self.x, self.y)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AdminActionDecl {
    pub id: String,
    /// Formula id over `[user, patient]`.
    pub enabling: String,
    #[serde(default)]
    pub participants: Vec<String>,
    /// Formula id over `user`, `patient` and every participant.
    pub applicability: String,
    pub effects: Vec<Update>,
}

impl AdminActionDecl {
    fn names(&self) -> impl Iterator<Item = &str> {
        [USER, PATIENT]
            .into_iter()
            .chain(self.participants.iter().map(String::as_str))
    }

    /// Declaration-level checks. `relations` holds the categories declared in
    /// the policy document; relations declared only in the graph are checked
    /// when the policy is attached.
    pub(crate) fn lint(
        &self,
        formulas: &FormulaLibrary,
        relations: &BTreeMap<&str, RelationCategory>,
    ) -> Vec<Diagnostic> {
        let mut out = Vec::new();
        let mut report = |code, message: String| {
            out.push(Diagnostic {
                code,
                message: format!("action `{}`: {message}", self.id),
            })
        };

        let mut seen = BTreeSet::new();
        for p in &self.participants {
            if p == USER || p == PATIENT || !seen.insert(p.as_str()) {
                report(
                    DiagnosticCode::InvalidParticipants,
                    format!("participant `{p}` is duplicated or clashes with a primary participant"),
                );
            }
        }

        let primary: BTreeSet<&str> = [USER, PATIENT].into();
        let all: BTreeSet<&str> = self.names().collect();
        for (label, id, expected) in [
            ("enabling", &self.enabling, &primary),
            ("applicability", &self.applicability, &all),
        ] {
            match formulas.get(id) {
                None => report(
                    DiagnosticCode::DanglingFormula,
                    format!("dangling formula id `{id}` for {label} precondition"),
                ),
                Some(f) => {
                    let vars: BTreeSet<&str> = f.vars().iter().map(String::as_str).collect();
                    if vars != *expected || vars.len() != f.arity() {
                        report(
                            DiagnosticCode::FormulaVariables,
                            format!(
                                "{label} formula `{id}` declares {:?}, expected {:?}",
                                f.vars(),
                                expected
                            ),
                        );
                    }
                }
            }
        }

        if self.effects.is_empty() {
            report(DiagnosticCode::InvalidEffect, "no effects".to_string());
        }
        for u in &self.effects {
            for name in [&u.x, &u.y] {
                if !all.contains(name.as_str()) {
                    report(
                        DiagnosticCode::InvalidEffect,
                        format!("`{u}` references undeclared participant `{name}`"),
                    );
                }
            }
            if let Some(cat) = relations.get(u.rel.as_str()) {
                if *cat != RelationCategory::AccessControl {
                    report(
                        DiagnosticCode::InvalidEffect,
                        format!("`{u}` updates {cat} relation `{}`", u.rel),
                    );
                }
            }
        }

        // Replaying the effect list symbolically catches add/del of the same
        // named triple, which can never succeed.
        let mut present: BTreeMap<(&str, &str, &str), UpdateOp> = BTreeMap::new();
        for u in &self.effects {
            let key = (u.rel.as_str(), u.x.as_str(), u.y.as_str());
            if let Some(prev) = present.insert(key, u.op) {
                report(
                    DiagnosticCode::ConflictingEffects,
                    format!("`{u}` conflicts with an earlier `{prev}` of the same edge"),
                );
            }
        }
        out
    }
}

/// Vertices chosen for the primary and auxiliary participants.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Binding {
    pub user: String,
    pub patient: String,
    #[serde(default)]
    pub participants: BTreeMap<String, String>,
}

impl Binding {
    pub fn new(user: impl Into<String>, patient: impl Into<String>) -> Self {
        Binding {
            user: user.into(),
            patient: patient.into(),
            participants: BTreeMap::new(),
        }
    }

    pub fn with(mut self, name: impl Into<String>, vertex: impl Into<String>) -> Self {
        self.participants.insert(name.into(), vertex.into());
        self
    }

    fn resolve(&self, name: &str) -> Option<&str> {
        match name {
            USER => Some(&self.user),
            PATIENT => Some(&self.patient),
            other => self.participants.get(other).map(String::as_str),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ExecutionReport {
    pub action: String,
    pub applied: Vec<AppliedUpdate>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AppliedUpdate {
    pub op: UpdateOp,
    pub edge: Edge,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AdminError {
    #[error("unknown administrative action `{0}`")]
    UnknownAction(String),
    #[error("action `{0}` is not enabled")]
    NotEnabled(String),
    #[error("action `{0}` is not applicable")]
    NotApplicable(String),
    #[error("participant `{0}` is not bound")]
    UnboundParticipant(String),
    #[error("action `{action}` references missing formula `{formula}`")]
    MissingFormula { action: String, formula: String },
    #[error("action `{action}`: {source}")]
    Formula { action: String, source: EvalError },
    #[error("edge {0} already exists")]
    AddExistingEdge(Edge),
    #[error("edge {0} does not exist")]
    DeleteMissingEdge(Edge),
    #[error(transparent)]
    Graph(GraphError),
    #[error("aborted: {0}")]
    Aborted(String),
}

impl From<GraphError> for AdminError {
    fn from(e: GraphError) -> Self {
        match e {
            GraphError::AddExistingEdge(edge) => AdminError::AddExistingEdge(edge),
            GraphError::DeleteMissingEdge(edge) => AdminError::DeleteMissingEdge(edge),
            other => AdminError::Graph(other),
        }
    }
}

fn precondition(
    store: &PolicyStore,
    graph: &AuthorizationGraph,
    action: &AdminActionDecl,
    formula_id: &str,
    binding: &Binding,
) -> Result<bool, AdminError> {
    let formula = store
        .formulas()
        .get(formula_id)
        .ok_or_else(|| AdminError::MissingFormula {
            action: action.id.clone(),
            formula: formula_id.to_string(),
        })?;
    let mut valuation = Valuation::new();
    for var in formula.vars() {
        let vertex = binding
            .resolve(var)
            .ok_or_else(|| AdminError::UnboundParticipant(var.clone()))?;
        valuation.insert(var.clone(), vertex);
    }
    evaluate(formula, graph, &valuation).map_err(|source| AdminError::Formula {
        action: action.id.clone(),
        source,
    })
}

/// Actions whose enabling precondition holds for `(user, patient)`, in
/// declaration order.
pub fn enabled_actions(
    store: &PolicyStore,
    graph: &AuthorizationGraph,
    user: &str,
    patient: &str,
) -> Result<Vec<String>, AdminError> {
    let binding = Binding::new(user, patient);
    let mut enabled = Vec::new();
    for action in store.admin_actions() {
        if precondition(store, graph, action, &action.enabling, &binding)? {
            enabled.push(action.id.clone());
        }
    }
    Ok(enabled)
}

pub fn execute_action(
    store: &PolicyStore,
    graph: &mut AuthorizationGraph,
    action_id: &str,
    binding: &Binding,
) -> Result<ExecutionReport, AdminError> {
    execute_action_observed(store, graph, action_id, binding, |_, _| Ok(()))
}

/// [`execute_action`] with a hook called before each effect is applied.
/// An error from the hook aborts execution and rolls back every update
/// applied so far.
pub fn execute_action_observed<F>(
    store: &PolicyStore,
    graph: &mut AuthorizationGraph,
    action_id: &str,
    binding: &Binding,
    mut before_apply: F,
) -> Result<ExecutionReport, AdminError>
where
    F: FnMut(usize, &Update) -> Result<(), AdminError>,
{
    let action = store
        .admin_action(action_id)
        .ok_or_else(|| AdminError::UnknownAction(action_id.to_string()))?;

    for p in &action.participants {
        if !binding.participants.contains_key(p) {
            return Err(AdminError::UnboundParticipant(p.clone()));
        }
    }

    // The caller holds `&mut` for the whole call, so the checks below and
    // the updates form one exclusive transaction.
    if !precondition(store, graph, action, &action.enabling, binding)? {
        return Err(AdminError::NotEnabled(action.id.clone()));
    }
    if !precondition(store, graph, action, &action.applicability, binding)? {
        return Err(AdminError::NotApplicable(action.id.clone()));
    }

    let mut planned = Vec::with_capacity(action.effects.len());
    for u in &action.effects {
        let x = binding.resolve(&u.x).ok_or_else(|| AdminError::UnboundParticipant(u.x.clone()))?;
        let y = binding.resolve(&u.y).ok_or_else(|| AdminError::UnboundParticipant(u.y.clone()))?;
        planned.push(AppliedUpdate {
            op: u.op,
            edge: Edge::new(x, u.rel.clone(), y),
        });
    }

    // Validation pass against the pre-state plus the earlier effects of
    // this action.
    let mut added: HashSet<&Edge> = HashSet::new();
    let mut deleted: HashSet<&Edge> = HashSet::new();
    for step in &planned {
        let e = &step.edge;
        if graph.relation(&e.rel).map(|r| r.category) != Some(RelationCategory::AccessControl) {
            return Err(match graph.relation(&e.rel) {
                None => AdminError::Graph(GraphError::UnknownRelation(e.rel.clone())),
                Some(_) => AdminError::Graph(GraphError::ReadOnlyRelation(e.rel.clone())),
            });
        }
        let exists =
            (graph.has_edge(&e.src, &e.rel, &e.dst)? || added.contains(e)) && !deleted.contains(e);
        match step.op {
            UpdateOp::Add if exists => return Err(AdminError::AddExistingEdge(e.clone())),
            UpdateOp::Del if !exists => return Err(AdminError::DeleteMissingEdge(e.clone())),
            UpdateOp::Add => {
                deleted.remove(e);
                added.insert(e);
            }
            UpdateOp::Del => {
                added.remove(e);
                deleted.insert(e);
            }
        }
    }

    let mut tx = graph.transaction();
    for (i, (step, u)) in planned.iter().zip(&action.effects).enumerate() {
        before_apply(i, u)?;
        let e = &step.edge;
        match step.op {
            UpdateOp::Add => tx.add_edge(&e.src, &e.rel, &e.dst)?,
            UpdateOp::Del => tx.del_edge(&e.src, &e.rel, &e.dst)?,
        }
    }
    tx.commit();

    Ok(ExecutionReport {
        action: action.id.clone(),
        applied: planned,
    })
}

/// Runs [`execute_action`] under the shared graph's write lock.
pub fn execute_shared(
    store: &PolicyStore,
    graph: &SharedGraph,
    action_id: &str,
    binding: &Binding,
) -> Result<ExecutionReport, AdminError> {
    let mut guard = graph.write();
    execute_action(store, &mut guard, action_id, binding)
}
