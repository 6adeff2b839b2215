//! Privileges, guards, authorization principals and the policy document.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::admin::AdminActionDecl;
use crate::graph::{AuthorizationGraph, GraphError, OwnerProvider, RelationCategory};
use crate::hl::{FormulaLibrary, LibraryError};
use crate::rbac::{RbacDocument, RbacIndex, RbacTables};

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Privilege(String);

impl Privilege {
    pub fn new(name: impl Into<String>) -> Self {
        Privilege(name.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl From<&str> for Privilege {
    fn from(s: &str) -> Self {
        Privilege(s.to_string())
    }
}

impl From<String> for Privilege {
    fn from(s: String) -> Self {
        Privilege(s)
    }
}

impl fmt::Display for Privilege {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

pub type PrivilegeSet = BTreeSet<Privilege>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum GuardKind {
    #[serde(rename = "one-of")]
    OneOf,
    #[serde(rename = "all-of")]
    AllOf,
}

impl GuardKind {
    pub fn as_str(self) -> &'static str {
        match self {
            GuardKind::OneOf => "one-of",
            GuardKind::AllOf => "all-of",
        }
    }
}

impl fmt::Display for GuardKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("a guard needs at least one privilege")]
pub struct EmptyGuard;

/// Privilege requirement of an operation: `one-of(P)` or `all-of(P)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "GuardWire", into = "GuardWire")]
pub struct Guard {
    kind: GuardKind,
    privileges: PrivilegeSet,
}

#[derive(Serialize, Deserialize)]
struct GuardWire {
    kind: GuardKind,
    privileges: Vec<Privilege>,
}

impl TryFrom<GuardWire> for Guard {
    type Error = EmptyGuard;

    fn try_from(w: GuardWire) -> Result<Self, Self::Error> {
        Guard::new(w.kind, w.privileges)
    }
}

impl From<Guard> for GuardWire {
    fn from(g: Guard) -> Self {
        GuardWire {
            kind: g.kind,
            privileges: g.privileges.into_iter().collect(),
        }
    }
}

impl Guard {
    pub fn new<I, P>(kind: GuardKind, privileges: I) -> Result<Self, EmptyGuard>
    where
        I: IntoIterator<Item = P>,
        P: Into<Privilege>,
    {
        let privileges: PrivilegeSet = privileges.into_iter().map(Into::into).collect();
        if privileges.is_empty() {
            return Err(EmptyGuard);
        }
        Ok(Guard { kind, privileges })
    }

    pub fn one_of<I: IntoIterator<Item = P>, P: Into<Privilege>>(privileges: I) -> Result<Self, EmptyGuard> {
        Self::new(GuardKind::OneOf, privileges)
    }

    pub fn all_of<I: IntoIterator<Item = P>, P: Into<Privilege>>(privileges: I) -> Result<Self, EmptyGuard> {
        Self::new(GuardKind::AllOf, privileges)
    }

    pub fn kind(&self) -> GuardKind {
        self.kind
    }

    pub fn privileges(&self) -> &PrivilegeSet {
        &self.privileges
    }
}

/// `Q ⊨ one-of(P)` iff `P ∩ Q ≠ ∅`; `Q ⊨ all-of(P)` iff `P ⊆ Q`.
pub fn satisfies(granted: &PrivilegeSet, guard: &Guard) -> bool {
    match guard.kind {
        GuardKind::OneOf => guard.privileges.iter().any(|p| granted.contains(p)),
        GuardKind::AllOf => guard.privileges.iter().all(|p| granted.contains(p)),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrincipalMatchingRule {
    pub principal: String,
    pub formula_id: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AuthorizationRule {
    pub principal: String,
    pub privileges: Vec<Privilege>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FormulaEntry {
    pub id: String,
    pub vars: Vec<String>,
    pub text: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RelationEntry {
    pub name: String,
    pub category: RelationCategory,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OwnerEntry {
    pub resource: String,
    pub owner: String,
}

/// The JSON policy document.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PolicyDocument {
    #[serde(default)]
    pub relations: Vec<RelationEntry>,
    #[serde(default)]
    pub formulas: Vec<FormulaEntry>,
    #[serde(default)]
    pub matching_rules: Vec<PrincipalMatchingRule>,
    #[serde(default)]
    pub authorization_rules: Vec<AuthorizationRule>,
    #[serde(default)]
    pub rbac: RbacDocument,
    #[serde(default)]
    pub admin_actions: Vec<AdminActionDecl>,
    #[serde(default)]
    pub owners: Vec<OwnerEntry>,
}

/// A principal with both of its rules resolved.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Principal {
    pub id: String,
    pub formula_id: String,
    pub privileges: PrivilegeSet,
}

#[derive(Debug, Error)]
pub enum PolicyError {
    #[error("malformed policy document: {0}")]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Formula(#[from] LibraryError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum DiagnosticCode {
    UnpairedPrincipal,
    DuplicatePrincipal,
    DanglingFormula,
    FormulaArity,
    UndeclaredRole,
    InvalidRelation,
    DuplicateAction,
    InvalidParticipants,
    FormulaVariables,
    InvalidEffect,
    ConflictingEffects,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Diagnostic {
    pub code: DiagnosticCode,
    pub message: String,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

/// Loaded policy: formula library, principal rules, RBAC tables, admin
/// actions and the owner table. Immutable once built.
#[derive(Debug, Clone, Default)]
pub struct PolicyStore {
    relations: Vec<RelationEntry>,
    formulas: FormulaLibrary,
    matching_rules: Vec<PrincipalMatchingRule>,
    authorization_rules: Vec<AuthorizationRule>,
    rbac: RbacTables,
    admin_actions: Vec<AdminActionDecl>,
    owners: Vec<OwnerEntry>,
    principals: Vec<Principal>,
    index: PrincipalIndex,
    rbac_index: RbacIndex,
}

/// Dense numbering of the privileges principals grant and of the formulas
/// they reference, so decisions test bits instead of comparing strings.
#[derive(Debug, Clone, Default)]
pub(crate) struct PrincipalIndex {
    privileges: HashMap<Privilege, usize>,
    words: usize,
    grants: Vec<u64>,
    formula_slot: Vec<usize>,
    slots: usize,
}

impl PrincipalIndex {
    fn build(principals: &[Principal]) -> Self {
        let mut privileges = HashMap::new();
        for p in principals.iter().flat_map(|p| &p.privileges) {
            let next = privileges.len();
            privileges.entry(p.clone()).or_insert(next);
        }
        let words = privileges.len().div_ceil(64);
        let mut grants = vec![0u64; words * principals.len()];
        let mut slot_of: HashMap<&str, usize> = HashMap::new();
        let mut formula_slot = Vec::with_capacity(principals.len());
        for (i, p) in principals.iter().enumerate() {
            for privilege in &p.privileges {
                let bit = privileges[privilege];
                grants[i * words + bit / 64] |= 1 << (bit % 64);
            }
            let next = slot_of.len();
            formula_slot.push(*slot_of.entry(&p.formula_id).or_insert(next));
        }
        PrincipalIndex {
            privileges,
            words,
            grants,
            formula_slot,
            slots: slot_of.len(),
        }
    }

    pub(crate) fn privilege(&self, p: &Privilege) -> Option<usize> {
        self.privileges.get(p).copied()
    }

    pub(crate) fn grants(&self, principal: usize, privilege: usize) -> bool {
        self.grants[principal * self.words + privilege / 64] >> (privilege % 64) & 1 == 1
    }

    pub(crate) fn formula_slot(&self, principal: usize) -> usize {
        self.formula_slot[principal]
    }

    pub(crate) fn slot_count(&self) -> usize {
        self.slots
    }
}

/// Parses a JSON policy document. Structural problems that do not prevent
/// loading are reported by [`validate`].
pub fn load_policy(json: &str) -> Result<PolicyStore, PolicyError> {
    let doc: PolicyDocument = serde_json::from_str(json)?;
    PolicyStore::from_document(doc)
}

impl PolicyStore {
    pub fn from_document(doc: PolicyDocument) -> Result<Self, PolicyError> {
        let mut formulas = FormulaLibrary::new();
        for f in &doc.formulas {
            let vars: Vec<&str> = f.vars.iter().map(String::as_str).collect();
            formulas.define(&f.id, &vars, &f.text)?;
        }

        // first rule wins for duplicated principals; validate() reports them
        let mut matching: BTreeMap<&str, &str> = BTreeMap::new();
        for rule in &doc.matching_rules {
            matching.entry(&rule.principal).or_insert(&rule.formula_id);
        }
        let mut granted: BTreeMap<&str, &[Privilege]> = BTreeMap::new();
        for rule in &doc.authorization_rules {
            granted.entry(&rule.principal).or_insert(&rule.privileges);
        }
        let principals: Vec<Principal> = matching
            .iter()
            .filter_map(|(id, formula_id)| {
                granted.get(id).map(|ps| Principal {
                    id: id.to_string(),
                    formula_id: formula_id.to_string(),
                    privileges: ps.iter().cloned().collect(),
                })
            })
            .collect();

        let rbac = RbacTables::from_document(&doc.rbac);
        Ok(PolicyStore {
            rbac_index: RbacIndex::build(&rbac),
            rbac,
            relations: doc.relations,
            formulas,
            matching_rules: doc.matching_rules,
            authorization_rules: doc.authorization_rules,
            admin_actions: doc.admin_actions,
            owners: doc.owners,
            index: PrincipalIndex::build(&principals),
            principals,
        })
    }

    pub fn to_document(&self) -> PolicyDocument {
        PolicyDocument {
            relations: self.relations.clone(),
            formulas: self
                .formulas
                .iter()
                .map(|(id, f)| FormulaEntry {
                    id: id.to_string(),
                    vars: f.vars().to_vec(),
                    text: f.to_string(),
                })
                .collect(),
            matching_rules: self.matching_rules.clone(),
            authorization_rules: self.authorization_rules.clone(),
            rbac: self.rbac.to_document(),
            admin_actions: self.admin_actions.clone(),
            owners: self.owners.clone(),
        }
    }

    /// Principals having both a matching rule and an authorization rule,
    /// ordered by id.
    pub fn principals(&self) -> &[Principal] {
        &self.principals
    }

    pub(crate) fn index(&self) -> &PrincipalIndex {
        &self.index
    }

    pub(crate) fn rbac_index(&self) -> &RbacIndex {
        &self.rbac_index
    }

    pub fn formulas(&self) -> &FormulaLibrary {
        &self.formulas
    }

    pub fn rbac(&self) -> &RbacTables {
        &self.rbac
    }

    pub fn admin_actions(&self) -> &[AdminActionDecl] {
        &self.admin_actions
    }

    pub fn admin_action(&self, id: &str) -> Option<&AdminActionDecl> {
        self.admin_actions.iter().find(|a| a.id == id)
    }

    pub fn owners(&self) -> &[OwnerEntry] {
        &self.owners
    }

    pub fn relations(&self) -> &[RelationEntry] {
        &self.relations
    }
}

/// Checks the store's internal invariants. An empty list means valid.
pub fn validate(store: &PolicyStore) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    let mut report = |code, message: String| out.push(Diagnostic { code, message });

    let mut declared: BTreeMap<&str, RelationCategory> = BTreeMap::new();
    for rel in &store.relations {
        if !crate::graph::is_identifier(&rel.name) {
            report(
                DiagnosticCode::InvalidRelation,
                format!("invalid relation name `{}`", rel.name),
            );
        }
        if let Some(prev) = declared.insert(&rel.name, rel.category) {
            if prev != rel.category {
                report(
                    DiagnosticCode::InvalidRelation,
                    format!("relation `{}` declared as both {prev} and {}", rel.name, rel.category),
                );
            }
        }
    }

    let mut matched = BTreeSet::new();
    for rule in &store.matching_rules {
        if !matched.insert(rule.principal.as_str()) {
            report(
                DiagnosticCode::DuplicatePrincipal,
                format!("duplicate principal `{}` in matching rules", rule.principal),
            );
        }
        match store.formulas.get(&rule.formula_id) {
            None => report(
                DiagnosticCode::DanglingFormula,
                format!(
                    "dangling formula id `{}` in matching rule for `{}`",
                    rule.formula_id, rule.principal
                ),
            ),
            Some(f) if f.arity() != 2 => report(
                DiagnosticCode::FormulaArity,
                format!(
                    "formula `{}` for principal `{}` has arity {}, expected 2",
                    rule.formula_id,
                    rule.principal,
                    f.arity()
                ),
            ),
            Some(_) => {}
        }
    }
    let mut authorized = BTreeSet::new();
    for rule in &store.authorization_rules {
        if !authorized.insert(rule.principal.as_str()) {
            report(
                DiagnosticCode::DuplicatePrincipal,
                format!("duplicate principal `{}` in authorization rules", rule.principal),
            );
        }
    }
    for p in matched.symmetric_difference(&authorized) {
        report(
            DiagnosticCode::UnpairedPrincipal,
            format!("unpaired principal `{p}`: needs both a matching rule and an authorization rule"),
        );
    }

    for (user, role) in store.rbac.undeclared_roles() {
        report(
            DiagnosticCode::UndeclaredRole,
            format!("user `{user}` assigned undeclared role `{role}`"),
        );
    }

    let mut action_ids = BTreeSet::new();
    for action in &store.admin_actions {
        if !action_ids.insert(action.id.as_str()) {
            report(
                DiagnosticCode::DuplicateAction,
                format!("duplicate administrative action `{}`", action.id),
            );
        }
        for d in action.lint(&store.formulas, &declared) {
            report(d.code, d.message);
        }
    }
    out
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AttachError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("owner table references unknown vertex `{0}`")]
    UnknownOwnerVertex(String),
    #[error("action `{action}` updates relation `{rel}`, which is not an access-control relation")]
    EffectRelation { action: String, rel: String },
}

/// Installs the policy's relation declarations and owner table into `graph`.
pub fn attach(store: &PolicyStore, graph: &mut AuthorizationGraph) -> Result<(), AttachError> {
    for rel in &store.relations {
        graph.declare_relation(rel.name.clone(), rel.category)?;
    }
    if !store.owners.is_empty() {
        for o in &store.owners {
            for v in [&o.resource, &o.owner] {
                if !graph.contains_vertex(v) {
                    return Err(AttachError::UnknownOwnerVertex(v.clone()));
                }
            }
        }
        let provider = OwnerProvider::new(store.owners.iter().map(|o| (o.resource.clone(), o.owner.clone())));
        graph.register_provider(Arc::new(provider))?;
    }
    for action in &store.admin_actions {
        for effect in &action.effects {
            let ok = graph
                .relation(&effect.rel)
                .is_some_and(|r| r.category == RelationCategory::AccessControl);
            if !ok {
                return Err(AttachError::EffectRelation {
                    action: action.id.clone(),
                    rel: effect.rel.clone(),
                });
            }
        }
    }
    Ok(())
}
