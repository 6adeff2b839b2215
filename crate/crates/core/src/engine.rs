//! Authorization of access requests `(resource, user, guard)`.
//!
//! Two semantics decide how privileges from several enabled principals
//! combine: *liberal* pools them, *strict* requires a single principal to
//! satisfy the guard alone. Each semantics has an eager implementation that
//! computes every enabled principal first and a lazy one that evaluates
//! relationship predicates only for principals that can still contribute,
//! stopping as soon as the outcome is known. Both strategies reach the same
//! decision for every request.
//!
//! Principals are visited in lexicographic order of their ids. Relationship
//! predicates are memoized per request by formula id, so principals sharing
//! a formula cost one evaluation.

use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::AuthorizationGraph;
use crate::hl::{relationship_predicate, EvalError};
use crate::policy::{Guard, GuardKind, PolicyStore};

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct AccessRequest {
    pub resource: String,
    pub user: String,
    pub guard: Guard,
}

impl AccessRequest {
    pub fn new(resource: impl Into<String>, user: impl Into<String>, guard: Guard) -> Self {
        AccessRequest {
            resource: resource.into(),
            user: user.into(),
            guard,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Semantics {
    #[default]
    Liberal,
    Strict,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Strategy {
    Eager,
    #[default]
    Lazy,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    RbacOnly,
    RebacOnly,
    #[default]
    Both,
}

macro_rules! keyword_enum {
    ($ty:ty { $($variant:ident => $text:literal),+ $(,)? }) => {
        impl $ty {
            pub fn as_str(self) -> &'static str {
                match self { $(<$ty>::$variant => $text),+ }
            }
        }

        impl fmt::Display for $ty {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(self.as_str())
            }
        }

        impl FromStr for $ty {
            type Err = String;

            fn from_str(s: &str) -> Result<Self, Self::Err> {
                match s {
                    $($text => Ok(<$ty>::$variant),)+
                    other => Err(format!("unknown value `{other}`")),
                }
            }
        }
    };
}

keyword_enum!(Semantics { Liberal => "liberal", Strict => "strict" });
keyword_enum!(Strategy { Eager => "eager", Lazy => "lazy" });
keyword_enum!(Mode { RbacOnly => "rbac-only", RebacOnly => "rebac-only", Both => "both" });

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct EngineConfig {
    pub semantics: Semantics,
    pub strategy: Strategy,
    pub mode: Mode,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Trace {
    pub principals_considered: usize,
    pub formulas_evaluated: usize,
    pub cache_hits: usize,
    /// Set only when the full enabled set was computed (eager strategy).
    pub enabled_principals: Option<Vec<String>>,
    #[serde(skip)]
    pub elapsed: Duration,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Decision {
    pub allow: bool,
    pub trace: Trace,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EngineError {
    #[error("unknown vertex `{0}`")]
    UnknownVertex(String),
    #[error("principal `{principal}` references missing formula `{formula}`")]
    MissingFormula { principal: String, formula: String },
    #[error("principal `{principal}`: {source}")]
    Formula { principal: String, source: EvalError },
}

struct Matcher<'a> {
    store: &'a PolicyStore,
    graph: &'a AuthorizationGraph,
    resource: &'a str,
    user: &'a str,
    memo: Vec<Option<bool>>,
}

impl<'a> Matcher<'a> {
    fn new(
        store: &'a PolicyStore,
        graph: &'a AuthorizationGraph,
        resource: &'a str,
        user: &'a str,
    ) -> Result<Self, EngineError> {
        for v in [resource, user] {
            if !graph.contains_vertex(v) {
                return Err(EngineError::UnknownVertex(v.to_string()));
            }
        }
        Ok(Matcher {
            store,
            graph,
            resource,
            user,
            memo: vec![None; store.index().slot_count()],
        })
    }

    fn is_cached(&self, principal: usize) -> bool {
        self.memo[self.store.index().formula_slot(principal)].is_some()
    }

    /// Evaluates the relationship predicate of the `i`-th principal, at
    /// most once per distinct formula id.
    fn is_enabled(&mut self, i: usize, trace: &mut Trace) -> Result<bool, EngineError> {
        let slot = self.store.index().formula_slot(i);
        if let Some(value) = self.memo[slot] {
            trace.cache_hits += 1;
            return Ok(value);
        }
        let principal = &self.store.principals()[i];
        let formula = self
            .store
            .formulas()
            .get(&principal.formula_id)
            .ok_or_else(|| EngineError::MissingFormula {
                principal: principal.id.clone(),
                formula: principal.formula_id.clone(),
            })?;
        let value = relationship_predicate(formula, self.graph, self.resource, self.user).map_err(
            |source| EngineError::Formula {
                principal: principal.id.clone(),
                source,
            },
        )?;
        trace.formulas_evaluated += 1;
        self.memo[slot] = Some(value);
        Ok(value)
    }
}

/// The guard's privileges as principal-index bits. A privilege no
/// principal grants has no bit and can never be covered.
struct Required<'a> {
    store: &'a PolicyStore,
    kind: GuardKind,
    bits: Vec<Option<usize>>,
    covered: Vec<bool>,
}

impl<'a> Required<'a> {
    fn new(store: &'a PolicyStore, guard: &Guard) -> Self {
        let bits: Vec<Option<usize>> = guard.privileges().iter().map(|p| store.index().privilege(p)).collect();
        let covered = vec![false; bits.len()];
        Required {
            store,
            kind: guard.kind(),
            bits,
            covered,
        }
    }

    fn granted_by(&self, principal: usize, k: usize) -> bool {
        self.bits[k].is_some_and(|b| self.store.index().grants(principal, b))
    }

    /// Guard satisfied by the principal's privileges alone.
    fn satisfied_by(&self, principal: usize) -> bool {
        let mut ks = 0..self.bits.len();
        match self.kind {
            GuardKind::OneOf => ks.any(|k| self.granted_by(principal, k)),
            GuardKind::AllOf => ks.all(|k| self.granted_by(principal, k)),
        }
    }

    /// Whether the principal grants a required privilege not yet covered.
    fn adds_to(&self, principal: usize) -> bool {
        (0..self.bits.len()).any(|k| !self.covered[k] && self.granted_by(principal, k))
    }

    fn cover(&mut self, principal: usize) {
        for k in 0..self.bits.len() {
            if self.granted_by(principal, k) {
                self.covered[k] = true;
            }
        }
    }

    /// Guard satisfied by the pooled privileges covered so far.
    fn met(&self) -> bool {
        match self.kind {
            GuardKind::OneOf => self.covered.iter().any(|&c| c),
            GuardKind::AllOf => self.covered.iter().all(|&c| c),
        }
    }
}

/// Indices of the enabled principals, with every predicate evaluated.
fn enabled_with_trace(
    store: &PolicyStore,
    graph: &AuthorizationGraph,
    resource: &str,
    user: &str,
    trace: &mut Trace,
) -> Result<Vec<usize>, EngineError> {
    let mut matcher = Matcher::new(store, graph, resource, user)?;
    let mut enabled = Vec::new();
    for i in 0..store.principals().len() {
        trace.principals_considered += 1;
        if matcher.is_enabled(i, trace)? {
            enabled.push(i);
        }
    }
    trace.enabled_principals = Some(enabled.iter().map(|&i| store.principals()[i].id.clone()).collect());
    Ok(enabled)
}

/// Ids of every principal whose relationship predicate holds for
/// `(resource, user)`.
pub fn enabled_principals(
    store: &PolicyStore,
    graph: &AuthorizationGraph,
    resource: &str,
    user: &str,
) -> Result<Vec<String>, EngineError> {
    let mut trace = Trace::default();
    let enabled = enabled_with_trace(store, graph, resource, user, &mut trace)?;
    Ok(enabled.into_iter().map(|i| store.principals()[i].id.clone()).collect())
}

fn timed(run: impl FnOnce(&mut Trace) -> Result<bool, EngineError>) -> Result<Decision, EngineError> {
    let start = Instant::now();
    let mut trace = Trace::default();
    let allow = run(&mut trace)?;
    trace.elapsed = start.elapsed();
    Ok(Decision { allow, trace })
}

pub fn check_eager_liberal(
    store: &PolicyStore,
    graph: &AuthorizationGraph,
    req: &AccessRequest,
) -> Result<Decision, EngineError> {
    timed(|trace| eager_liberal(store, graph, req, trace))
}

pub fn check_eager_strict(
    store: &PolicyStore,
    graph: &AuthorizationGraph,
    req: &AccessRequest,
) -> Result<Decision, EngineError> {
    timed(|trace| eager_strict(store, graph, req, trace))
}

pub fn check_lazy_liberal(
    store: &PolicyStore,
    graph: &AuthorizationGraph,
    req: &AccessRequest,
) -> Result<Decision, EngineError> {
    timed(|trace| lazy_liberal(store, graph, req, trace))
}

pub fn check_lazy_strict(
    store: &PolicyStore,
    graph: &AuthorizationGraph,
    req: &AccessRequest,
) -> Result<Decision, EngineError> {
    timed(|trace| lazy_strict(store, graph, req, trace))
}

fn eager_liberal(
    store: &PolicyStore,
    graph: &AuthorizationGraph,
    req: &AccessRequest,
    trace: &mut Trace,
) -> Result<bool, EngineError> {
    let enabled = enabled_with_trace(store, graph, &req.resource, &req.user, trace)?;
    let mut required = Required::new(store, &req.guard);
    for i in enabled {
        required.cover(i);
    }
    Ok(required.met())
}

fn eager_strict(
    store: &PolicyStore,
    graph: &AuthorizationGraph,
    req: &AccessRequest,
    trace: &mut Trace,
) -> Result<bool, EngineError> {
    let enabled = enabled_with_trace(store, graph, &req.resource, &req.user, trace)?;
    let required = Required::new(store, &req.guard);
    Ok(enabled.into_iter().any(|i| required.satisfied_by(i)))
}

/// Evaluates a principal only when it would grant a required privilege
/// not yet granted, and stops as soon as the pooled grant meets the guard.
fn lazy_liberal(
    store: &PolicyStore,
    graph: &AuthorizationGraph,
    req: &AccessRequest,
    trace: &mut Trace,
) -> Result<bool, EngineError> {
    let mut matcher = Matcher::new(store, graph, &req.resource, &req.user)?;
    let mut required = Required::new(store, &req.guard);
    for i in 0..store.principals().len() {
        trace.principals_considered += 1;
        if !required.adds_to(i) {
            continue;
        }
        if matcher.is_enabled(i, trace)? {
            required.cover(i);
            if required.met() {
                return Ok(true);
            }
        }
    }
    Ok(false)
}

/// Evaluates only principals whose own privileges meet the guard.
fn lazy_strict(
    store: &PolicyStore,
    graph: &AuthorizationGraph,
    req: &AccessRequest,
    trace: &mut Trace,
) -> Result<bool, EngineError> {
    let mut matcher = Matcher::new(store, graph, &req.resource, &req.user)?;
    let required = Required::new(store, &req.guard);
    for i in 0..store.principals().len() {
        trace.principals_considered += 1;
        if !required.satisfied_by(i) {
            continue;
        }
        let cached = matcher.is_cached(i);
        let enabled = matcher.is_enabled(i, trace)?;
        debug_assert!(!(cached && enabled), "a memoized true would already have allowed");
        if enabled {
            return Ok(true);
        }
    }
    Ok(false)
}

fn rebac(
    store: &PolicyStore,
    graph: &AuthorizationGraph,
    req: &AccessRequest,
    cfg: &EngineConfig,
    trace: &mut Trace,
) -> Result<bool, EngineError> {
    match (cfg.strategy, cfg.semantics) {
        (Strategy::Eager, Semantics::Liberal) => eager_liberal(store, graph, req, trace),
        (Strategy::Eager, Semantics::Strict) => eager_strict(store, graph, req, trace),
        (Strategy::Lazy, Semantics::Liberal) => lazy_liberal(store, graph, req, trace),
        (Strategy::Lazy, Semantics::Strict) => lazy_strict(store, graph, req, trace),
    }
}

/// Full decision flow. In [`Mode::Both`] RBAC runs first and ReBAC is
/// consulted only when RBAC allows.
pub fn check(
    store: &PolicyStore,
    graph: &AuthorizationGraph,
    req: &AccessRequest,
    cfg: &EngineConfig,
) -> Result<Decision, EngineError> {
    timed(|trace| match cfg.mode {
        Mode::RbacOnly => Ok(store.rbac_index().check(&req.user, &req.guard)),
        Mode::RebacOnly => rebac(store, graph, req, cfg, trace),
        Mode::Both => Ok(store.rbac_index().check(&req.user, &req.guard)
            && rebac(store, graph, req, cfg, trace)?),
    })
}

/// Keeps, in order, the resources `user` may access under `guard`.
pub fn filter_collection(
    store: &PolicyStore,
    graph: &AuthorizationGraph,
    user: &str,
    guard: &Guard,
    resources: &[String],
    cfg: &EngineConfig,
) -> Result<Vec<String>, EngineError> {
    let mut allowed = Vec::new();
    for r in resources {
        let req = AccessRequest::new(r.clone(), user, guard.clone());
        if check(store, graph, &req, cfg)?.allow {
            allowed.push(r.clone());
        }
    }
    Ok(allowed)
}
