//! The authorization graph.
//!
//! Vertices are typed, edges are directed and labelled with a declared
//! relation. Relations fall into three categories: user-managed and
//! access-control relations are stored in a bidirectional adjacency index
//! owned by the graph, while system-induced relations are computed on demand
//! by registered [`RelationProvider`]s and can never be mutated through the
//! graph API.

use std::borrow::Cow;
use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use parking_lot::{RwLock, RwLockReadGuard, RwLockWriteGuard};
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub(crate) type Ix = u32;
pub(crate) type RelIx = u32;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("unknown vertex `{0}`")]
    UnknownVertex(String),
    #[error("unknown relation `{0}`")]
    UnknownRelation(String),
    #[error("vertex `{0}` already exists")]
    DuplicateVertex(String),
    #[error("invalid relation name `{0}`")]
    InvalidRelationName(String),
    #[error("relation `{name}` already declared as {existing}")]
    RelationConflict {
        name: String,
        existing: RelationCategory,
    },
    #[error("relation `{0}` is system-induced and read-only")]
    ReadOnlyRelation(String),
    #[error("edge {0} already exists")]
    AddExistingEdge(Edge),
    #[error("edge {0} does not exist")]
    DeleteMissingEdge(Edge),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum VertexKind {
    User,
    Patient,
    Resource,
    Entity,
}

impl VertexKind {
    pub fn as_str(self) -> &'static str {
        match self {
            VertexKind::User => "user",
            VertexKind::Patient => "patient",
            VertexKind::Resource => "resource",
            VertexKind::Entity => "entity",
        }
    }
}

impl fmt::Display for VertexKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for VertexKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "user" => Ok(VertexKind::User),
            "patient" => Ok(VertexKind::Patient),
            "resource" => Ok(VertexKind::Resource),
            "entity" => Ok(VertexKind::Entity),
            other => Err(format!("unknown vertex kind `{other}`")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RelationCategory {
    UserManaged,
    SystemInduced,
    AccessControl,
}

impl RelationCategory {
    pub fn as_str(self) -> &'static str {
        match self {
            RelationCategory::UserManaged => "user-managed",
            RelationCategory::SystemInduced => "system-induced",
            RelationCategory::AccessControl => "access-control",
        }
    }

    pub fn is_stored(self) -> bool {
        !matches!(self, RelationCategory::SystemInduced)
    }
}

impl fmt::Display for RelationCategory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for RelationCategory {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "user-managed" => Ok(RelationCategory::UserManaged),
            "system-induced" => Ok(RelationCategory::SystemInduced),
            "access-control" => Ok(RelationCategory::AccessControl),
            other => Err(format!("unknown relation category `{other}`")),
        }
    }
}

/// Checks `[A-Za-z][A-Za-z0-9_-]*`.
pub fn is_identifier(name: &str) -> bool {
    let mut chars = name.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-')
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Vertex {
    pub id: String,
    pub kind: VertexKind,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Relation {
    pub name: String,
    pub category: RelationCategory,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Edge {
    pub src: String,
    pub rel: String,
    pub dst: String,
}

impl Edge {
    pub fn new(src: impl Into<String>, rel: impl Into<String>, dst: impl Into<String>) -> Self {
        Edge {
            src: src.into(),
            rel: rel.into(),
            dst: dst.into(),
        }
    }
}

impl fmt::Display for Edge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}({}, {})", self.rel, self.src, self.dst)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Direction {
    Forward,
    Inverse,
}

/// Source of a system-induced relation.
///
/// Providers are pure functions of their backing data: the edges they
/// report never change through the graph's mutation API.
pub trait RelationProvider: fmt::Debug + Send + Sync {
    fn name(&self) -> &str;

    /// Relation names this provider answers for.
    fn relations(&self) -> Vec<String>;

    fn neighbors(&self, vertex: &str, rel: &str, direction: Direction) -> Vec<&str>;
}

/// The built-in `owner` relation: resource → owner, backed by a table.
#[derive(Debug, Default, Clone)]
pub struct OwnerProvider {
    owner_of: HashMap<String, Vec<String>>,
    owned_by: HashMap<String, Vec<String>>,
}

impl OwnerProvider {
    pub const RELATION: &'static str = "owner";

    pub fn new<I, S, T>(pairs: I) -> Self
    where
        I: IntoIterator<Item = (S, T)>,
        S: Into<String>,
        T: Into<String>,
    {
        let mut provider = OwnerProvider::default();
        for (resource, owner) in pairs {
            let (resource, owner) = (resource.into(), owner.into());
            let owners = provider.owner_of.entry(resource.clone()).or_default();
            if owners.contains(&owner) {
                continue;
            }
            owners.push(owner.clone());
            provider.owned_by.entry(owner).or_default().push(resource);
        }
        provider
    }

    pub fn pairs(&self) -> impl Iterator<Item = (&str, &str)> {
        self.owner_of
            .iter()
            .flat_map(|(r, os)| os.iter().map(move |o| (r.as_str(), o.as_str())))
    }
}

impl RelationProvider for OwnerProvider {
    fn name(&self) -> &str {
        "owner-table"
    }

    fn relations(&self) -> Vec<String> {
        vec![Self::RELATION.to_string()]
    }

    fn neighbors(&self, vertex: &str, rel: &str, direction: Direction) -> Vec<&str> {
        if rel != Self::RELATION {
            return Vec::new();
        }
        let table = match direction {
            Direction::Forward => &self.owner_of,
            Direction::Inverse => &self.owned_by,
        };
        table
            .get(vertex)
            .map(|vs| vs.iter().map(String::as_str).collect())
            .unwrap_or_default()
    }
}

#[derive(Debug, Default, Clone)]
pub struct AuthorizationGraph {
    vertices: Vec<Vertex>,
    vertex_index: HashMap<String, Ix>,
    relations: Vec<Relation>,
    relation_index: HashMap<String, RelIx>,
    out: HashMap<(Ix, RelIx), Vec<Ix>>,
    inc: HashMap<(Ix, RelIx), Vec<Ix>>,
    edges: HashSet<(Ix, RelIx, Ix)>,
    providers: Vec<Arc<dyn RelationProvider>>,
    // relation index -> provider indices answering for it
    provided_by: HashMap<RelIx, Vec<usize>>,
}

impl AuthorizationGraph {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_vertex(&mut self, id: impl Into<String>, kind: VertexKind) -> Result<(), GraphError> {
        let id = id.into();
        if self.vertex_index.contains_key(&id) {
            return Err(GraphError::DuplicateVertex(id));
        }
        let ix = self.vertices.len() as Ix;
        self.vertex_index.insert(id.clone(), ix);
        self.vertices.push(Vertex { id, kind });
        Ok(())
    }

    /// Declares a relation. Re-declaring with the same category is a no-op.
    pub fn declare_relation(
        &mut self,
        name: impl Into<String>,
        category: RelationCategory,
    ) -> Result<(), GraphError> {
        let name = name.into();
        if !is_identifier(&name) {
            return Err(GraphError::InvalidRelationName(name));
        }
        if let Some(&rx) = self.relation_index.get(&name) {
            let existing = self.relations[rx as usize].category;
            if existing != category {
                return Err(GraphError::RelationConflict { name, existing });
            }
            return Ok(());
        }
        let rx = self.relations.len() as RelIx;
        self.relation_index.insert(name.clone(), rx);
        self.relations.push(Relation { name, category });
        Ok(())
    }

    /// Registers a provider and declares its relations as system-induced.
    pub fn register_provider(&mut self, provider: Arc<dyn RelationProvider>) -> Result<(), GraphError> {
        let relations = provider.relations();
        for rel in &relations {
            self.declare_relation(rel.clone(), RelationCategory::SystemInduced)?;
        }
        let slot = self.providers.len();
        self.providers.push(provider);
        for rel in relations {
            let rx = self.relation_index[&rel];
            self.provided_by.entry(rx).or_default().push(slot);
        }
        Ok(())
    }

    pub fn providers(&self) -> &[Arc<dyn RelationProvider>] {
        &self.providers
    }

    pub fn vertex(&self, id: &str) -> Option<&Vertex> {
        self.vertex_index.get(id).map(|&ix| &self.vertices[ix as usize])
    }

    pub fn contains_vertex(&self, id: &str) -> bool {
        self.vertex_index.contains_key(id)
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    pub fn relation(&self, name: &str) -> Option<&Relation> {
        self.relation_index
            .get(name)
            .map(|&rx| &self.relations[rx as usize])
    }

    pub fn relations(&self) -> &[Relation] {
        &self.relations
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    /// Number of stored (user-managed and access-control) edges.
    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Stored edges, ordered by vertex insertion order then relation
    /// declaration order.
    pub fn edges(&self) -> Vec<Edge> {
        let mut triples: Vec<_> = self.edges.iter().copied().collect();
        triples.sort_unstable();
        triples
            .into_iter()
            .map(|(s, r, d)| Edge {
                src: self.vertices[s as usize].id.clone(),
                rel: self.relations[r as usize].name.clone(),
                dst: self.vertices[d as usize].id.clone(),
            })
            .collect()
    }

    pub fn out_neighbors(&self, v: &str, rel: &str) -> Result<BTreeSet<&str>, GraphError> {
        self.neighbors(v, rel, Direction::Forward)
    }

    pub fn in_neighbors(&self, v: &str, rel: &str) -> Result<BTreeSet<&str>, GraphError> {
        self.neighbors(v, rel, Direction::Inverse)
    }

    pub fn neighbors(
        &self,
        v: &str,
        rel: &str,
        direction: Direction,
    ) -> Result<BTreeSet<&str>, GraphError> {
        let ix = self.vertex_ix(v)?;
        let rx = self.relation_ix(rel)?;
        Ok(self
            .neighbors_ix(ix, rx, direction)
            .iter()
            .map(|&n| self.vertices[n as usize].id.as_str())
            .collect())
    }

    pub fn has_edge(&self, src: &str, rel: &str, dst: &str) -> Result<bool, GraphError> {
        let s = self.vertex_ix(src)?;
        let r = self.relation_ix(rel)?;
        let d = self.vertex_ix(dst)?;
        Ok(self.has_edge_ix(s, r, d))
    }

    pub fn add_edge(&mut self, src: &str, rel: &str, dst: &str) -> Result<(), GraphError> {
        let (s, r, d) = self.resolve_mutable(src, rel, dst)?;
        if !self.edges.insert((s, r, d)) {
            return Err(GraphError::AddExistingEdge(Edge::new(src, rel, dst)));
        }
        self.out.entry((s, r)).or_default().push(d);
        self.inc.entry((d, r)).or_default().push(s);
        Ok(())
    }

    pub fn del_edge(&mut self, src: &str, rel: &str, dst: &str) -> Result<(), GraphError> {
        let (s, r, d) = self.resolve_mutable(src, rel, dst)?;
        if !self.edges.remove(&(s, r, d)) {
            return Err(GraphError::DeleteMissingEdge(Edge::new(src, rel, dst)));
        }
        remove_from(&mut self.out, (s, r), d);
        remove_from(&mut self.inc, (d, r), s);
        Ok(())
    }

    /// Opens a write transaction. Mutations made through it are rolled back
    /// unless [`Transaction::commit`] is called.
    pub fn transaction(&mut self) -> Transaction<'_> {
        Transaction {
            graph: self,
            undo: Vec::new(),
        }
    }

    fn resolve_mutable(&self, src: &str, rel: &str, dst: &str) -> Result<(Ix, RelIx, Ix), GraphError> {
        let r = self.relation_ix(rel)?;
        if !self.relations[r as usize].category.is_stored() {
            return Err(GraphError::ReadOnlyRelation(rel.to_string()));
        }
        Ok((self.vertex_ix(src)?, r, self.vertex_ix(dst)?))
    }

    pub(crate) fn vertex_ix(&self, id: &str) -> Result<Ix, GraphError> {
        self.vertex_index
            .get(id)
            .copied()
            .ok_or_else(|| GraphError::UnknownVertex(id.to_string()))
    }

    pub(crate) fn relation_ix(&self, name: &str) -> Result<RelIx, GraphError> {
        self.relation_index
            .get(name)
            .copied()
            .ok_or_else(|| GraphError::UnknownRelation(name.to_string()))
    }

    pub(crate) fn vertex_id(&self, ix: Ix) -> &str {
        &self.vertices[ix as usize].id
    }

    pub(crate) fn neighbors_ix(&self, v: Ix, r: RelIx, direction: Direction) -> Cow<'_, [Ix]> {
        if let Some(slots) = self.provided_by.get(&r) {
            let id = self.vertex_id(v);
            let name = &self.relations[r as usize].name;
            let mut found: Vec<Ix> = slots
                .iter()
                .flat_map(|&slot| self.providers[slot].neighbors(id, name, direction))
                .filter_map(|n| self.vertex_index.get(n).copied())
                .collect();
            found.sort_unstable();
            found.dedup();
            return Cow::Owned(found);
        }
        let table = match direction {
            Direction::Forward => &self.out,
            Direction::Inverse => &self.inc,
        };
        match table.get(&(v, r)) {
            Some(ns) => Cow::Borrowed(ns.as_slice()),
            None => Cow::Borrowed(&[]),
        }
    }

    pub(crate) fn has_edge_ix(&self, s: Ix, r: RelIx, d: Ix) -> bool {
        if self.provided_by.contains_key(&r) {
            return self.neighbors_ix(s, r, Direction::Forward).contains(&d);
        }
        self.edges.contains(&(s, r, d))
    }
}

fn remove_from(table: &mut HashMap<(Ix, RelIx), Vec<Ix>>, key: (Ix, RelIx), value: Ix) {
    if let Some(list) = table.get_mut(&key) {
        if let Some(pos) = list.iter().position(|&x| x == value) {
            list.swap_remove(pos);
        }
        if list.is_empty() {
            table.remove(&key);
        }
    }
}

#[derive(Debug, Clone)]
enum Undo {
    Added(Edge),
    Deleted(Edge),
}

/// An exclusive write transaction over a graph with an undo log.
///
/// Dropping an uncommitted transaction restores the pre-transaction edge set.
pub struct Transaction<'g> {
    graph: &'g mut AuthorizationGraph,
    undo: Vec<Undo>,
}

impl Transaction<'_> {
    pub fn graph(&self) -> &AuthorizationGraph {
        self.graph
    }

    pub fn add_edge(&mut self, src: &str, rel: &str, dst: &str) -> Result<(), GraphError> {
        self.graph.add_edge(src, rel, dst)?;
        self.undo.push(Undo::Added(Edge::new(src, rel, dst)));
        Ok(())
    }

    pub fn del_edge(&mut self, src: &str, rel: &str, dst: &str) -> Result<(), GraphError> {
        self.graph.del_edge(src, rel, dst)?;
        self.undo.push(Undo::Deleted(Edge::new(src, rel, dst)));
        Ok(())
    }

    pub fn commit(mut self) {
        self.undo.clear();
    }

    pub fn rollback(self) {}
}

impl Drop for Transaction<'_> {
    fn drop(&mut self) {
        while let Some(step) = self.undo.pop() {
            // Inverse operations of successful mutations cannot fail.
            let result = match step {
                Undo::Added(e) => self.graph.del_edge(&e.src, &e.rel, &e.dst),
                Undo::Deleted(e) => self.graph.add_edge(&e.src, &e.rel, &e.dst),
            };
            debug_assert!(result.is_ok(), "rollback failed: {result:?}");
        }
    }
}

/// A graph shared between readers and a single writer at a time.
#[derive(Debug, Default)]
pub struct SharedGraph {
    inner: RwLock<AuthorizationGraph>,
}

impl SharedGraph {
    pub fn new(graph: AuthorizationGraph) -> Self {
        SharedGraph {
            inner: RwLock::new(graph),
        }
    }

    pub fn read(&self) -> RwLockReadGuard<'_, AuthorizationGraph> {
        self.inner.read()
    }

    pub fn write(&self) -> RwLockWriteGuard<'_, AuthorizationGraph> {
        self.inner.write()
    }

    pub fn into_inner(self) -> AuthorizationGraph {
        self.inner.into_inner()
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("line {line}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub message: String,
}

/// Parses the line-based edge-list format:
///
/// ```text
/// # comment
/// R <name> <category>
/// V <id> <kind>
/// E <src> <rel> <dst>
/// ```
pub fn load_graph(source: &str) -> Result<AuthorizationGraph, ParseError> {
    let mut graph = AuthorizationGraph::new();
    for (n, raw) in source.lines().enumerate() {
        let line = n + 1;
        let err = |message: String| ParseError { line, message };
        let text = raw.trim();
        if text.is_empty() || text.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = text.split_whitespace().collect();
        match fields.as_slice() {
            ["R", name, category] => {
                let category = category.parse().map_err(err)?;
                graph
                    .declare_relation(*name, category)
                    .map_err(|e| err(e.to_string()))?;
            }
            ["V", id, kind] => {
                let kind = kind.parse().map_err(err)?;
                graph.add_vertex(*id, kind).map_err(|e| err(e.to_string()))?;
            }
            ["E", src, rel, dst] => {
                graph.add_edge(src, rel, dst).map_err(|e| err(e.to_string()))?;
            }
            [tag, ..] if matches!(*tag, "R" | "V" | "E") => {
                return Err(err(format!("wrong number of fields for `{tag}` record")));
            }
            _ => return Err(err(format!("unrecognized record `{text}`"))),
        }
    }
    Ok(graph)
}

/// Serializes declarations, vertices and stored edges. Provider-backed edges
/// are not written.
pub fn save_graph(graph: &AuthorizationGraph) -> String {
    let mut out = String::new();
    for rel in &graph.relations {
        out.push_str(&format!("R {} {}\n", rel.name, rel.category));
    }
    for v in &graph.vertices {
        out.push_str(&format!("V {} {}\n", v.id, v.kind));
    }
    for e in graph.edges() {
        out.push_str(&format!("E {} {} {}\n", e.src, e.rel, e.dst));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> AuthorizationGraph {
        load_graph(
            "R gp user-managed\nR referrer user-managed\nR owner system-induced\n\
             V p patient\nV d user\nV d2 user\nV s user\n\
             E p gp d\n",
        )
        .unwrap()
    }

    #[test]
    fn out_neighbors_enumerates_edges() {
        let mut g = sample();
        assert_eq!(g.out_neighbors("p", "gp").unwrap(), BTreeSet::from(["d"]));
        assert!(g.out_neighbors("p", "referrer").unwrap().is_empty());
        g.add_edge("p", "gp", "d2").unwrap();
        assert_eq!(g.out_neighbors("p", "gp").unwrap(), BTreeSet::from(["d", "d2"]));
    }

    #[test]
    fn in_neighbors_mirror_out() {
        let mut g = sample();
        g.add_edge("s", "referrer", "d").unwrap();
        assert_eq!(g.in_neighbors("d", "referrer").unwrap(), BTreeSet::from(["s"]));
        assert!(g.in_neighbors("d2", "gp").unwrap().is_empty());
        for e in g.edges() {
            assert!(g.in_neighbors(&e.dst, &e.rel).unwrap().contains(e.src.as_str()));
        }
    }

    #[test]
    fn lookups_reject_unknown_names() {
        let g = sample();
        assert_eq!(
            g.out_neighbors("nobody", "gp"),
            Err(GraphError::UnknownVertex("nobody".into()))
        );
        assert_eq!(
            g.out_neighbors("p", "friend"),
            Err(GraphError::UnknownRelation("friend".into()))
        );
    }

    #[test]
    fn add_and_delete_follow_existence_rules() {
        let mut g = sample();
        assert!(!g.has_edge("d", "gp", "p").unwrap());
        g.add_edge("d", "gp", "p").unwrap();
        assert!(g.has_edge("d", "gp", "p").unwrap());
        assert!(matches!(
            g.add_edge("d", "gp", "p"),
            Err(GraphError::AddExistingEdge(_))
        ));
        g.del_edge("d", "gp", "p").unwrap();
        assert!(matches!(
            g.del_edge("d", "gp", "p"),
            Err(GraphError::DeleteMissingEdge(_))
        ));
        assert!(g.out_neighbors("d", "gp").unwrap().is_empty());
        assert!(g.in_neighbors("p", "gp").unwrap().is_empty());
    }

    #[test]
    fn system_induced_relations_are_read_only() {
        let mut g = sample();
        g.add_vertex("rec", VertexKind::Resource).unwrap();
        g.register_provider(Arc::new(OwnerProvider::new([("rec", "p")])))
            .unwrap();
        assert_eq!(
            g.add_edge("rec", "owner", "p"),
            Err(GraphError::ReadOnlyRelation("owner".into()))
        );
        assert!(g.has_edge("rec", "owner", "p").unwrap());
        assert_eq!(g.in_neighbors("p", "owner").unwrap(), BTreeSet::from(["rec"]));
        // provider edges are not stored
        assert_eq!(g.edge_count(), 1);
    }

    #[test]
    fn providers_union() {
        let mut g = AuthorizationGraph::new();
        for v in ["r", "a", "b"] {
            g.add_vertex(v, VertexKind::Entity).unwrap();
        }
        g.register_provider(Arc::new(OwnerProvider::new([("r", "a")])))
            .unwrap();
        g.register_provider(Arc::new(OwnerProvider::new([("r", "b"), ("r", "a")])))
            .unwrap();
        assert_eq!(g.out_neighbors("r", "owner").unwrap(), BTreeSet::from(["a", "b"]));
    }

    #[test]
    fn transaction_rolls_back_on_drop() {
        let mut g = sample();
        let before = g.edges();
        {
            let mut tx = g.transaction();
            tx.add_edge("d", "referrer", "s").unwrap();
            tx.del_edge("p", "gp", "d").unwrap();
        }
        assert_eq!(g.edges(), before);
        let mut tx = g.transaction();
        tx.add_edge("d", "referrer", "s").unwrap();
        tx.commit();
        assert!(g.has_edge("d", "referrer", "s").unwrap());
    }

    #[test]
    fn parse_small_file() {
        assert_eq!(load_graph("").unwrap().vertex_count(), 0);
        let g = load_graph("R gp user-managed\nV p patient\nV d user\nE p gp d\n").unwrap();
        assert_eq!(g.vertex_count(), 2);
        assert_eq!(g.edge_count(), 1);
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        let dup = "R gp user-managed\nV p patient\nV d user\nE p gp d\nE p gp d\n";
        assert_eq!(load_graph(dup).unwrap_err().line, 5);
        assert_eq!(load_graph("V p patient\nV p user\n").unwrap_err().line, 2);
        assert_eq!(load_graph("# c\nX a b\n").unwrap_err().line, 2);
        assert_eq!(load_graph("V p alien\n").unwrap_err().line, 1);
        assert_eq!(load_graph("V p patient\nE p gp p\n").unwrap_err().line, 2);
        assert_eq!(load_graph("R owner system-induced\nV p patient\nE p owner p\n").unwrap_err().line, 3);
        assert_eq!(load_graph("R 9x user-managed\n").unwrap_err().line, 1);
    }

    #[test]
    fn identifiers() {
        assert!(is_identifier("register-ward"));
        assert!(is_identifier("a_1"));
        assert!(!is_identifier("-agent"));
        assert!(!is_identifier(""));
        assert!(!is_identifier("a b"));
    }
}
