//! Relationship-based access control.
//!
//! The protection state is an [`graph::AuthorizationGraph`]. Authorization
//! principals are matched against it with hybrid-logic relationship
//! predicates ([`hl`]), granted privileges by authorization rules
//! ([`policy`]), and combined with a flat RBAC baseline ([`rbac`]) by the
//! decision [`engine`]. Access-control edges are maintained through
//! declared administrative actions ([`admin`]).

pub mod admin;
pub mod engine;
pub mod graph;
pub mod hl;
pub mod policy;
pub mod rbac;

pub use admin::{enabled_actions, execute_action, AdminActionDecl, AdminError, Binding, ExecutionReport, Update, UpdateOp};
pub use engine::{
    check, check_eager_liberal, check_eager_strict, check_lazy_liberal, check_lazy_strict, enabled_principals,
    filter_collection, AccessRequest, Decision, EngineConfig, EngineError, Mode, Semantics, Strategy, Trace,
};
pub use graph::{
    load_graph, save_graph, AuthorizationGraph, Direction, Edge, GraphError, RelationCategory, SharedGraph, VertexKind,
};
pub use hl::{evaluate, parse, relationship_predicate, Formula, FormulaError, FormulaLibrary, Node, Valuation};
pub use policy::{attach, load_policy, satisfies, validate, Guard, GuardKind, PolicyStore, Privilege, PrivilegeSet};
pub use rbac::{rbac_check, rbac_privileges, RbacTables};
