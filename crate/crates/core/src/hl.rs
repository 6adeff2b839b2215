//! Hybrid-logic graph predicates.
//!
//! A [`Formula`] is a body over declared free variables. Bodies must be
//! Boolean combinations of `@x`-rooted subformulas so that their truth value
//! does not depend on the world evaluation starts from.
//!
//! Concrete syntax:
//!
//! ```text
//! formula := disj
//! disj    := conj ('|' conj)*
//! conj    := unary ('&' unary)*
//! unary   := '!' unary | '@' IDENT unary | '<' '-'? IDENT '>' unary | primary
//! primary := 'true' | 'false' | IDENT | '(' formula ')'
//! ```

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::graph::{is_identifier, AuthorizationGraph, Direction, GraphError, Ix, RelIx};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Node {
    True,
    False,
    Var(String),
    Not(Box<Node>),
    And(Box<Node>, Box<Node>),
    Or(Box<Node>, Box<Node>),
    Diamond {
        rel: String,
        inverse: bool,
        body: Box<Node>,
    },
    At(String, Box<Node>),
}

impl Node {
    pub fn var(name: impl Into<String>) -> Node {
        Node::Var(name.into())
    }

    pub fn not(inner: Node) -> Node {
        Node::Not(Box::new(inner))
    }

    pub fn and(lhs: Node, rhs: Node) -> Node {
        Node::And(Box::new(lhs), Box::new(rhs))
    }

    pub fn or(lhs: Node, rhs: Node) -> Node {
        Node::Or(Box::new(lhs), Box::new(rhs))
    }

    pub fn diamond(rel: impl Into<String>, body: Node) -> Node {
        Node::Diamond {
            rel: rel.into(),
            inverse: false,
            body: Box::new(body),
        }
    }

    pub fn inverse(rel: impl Into<String>, body: Node) -> Node {
        Node::Diamond {
            rel: rel.into(),
            inverse: true,
            body: Box::new(body),
        }
    }

    pub fn at(var: impl Into<String>, body: Node) -> Node {
        Node::At(var.into(), Box::new(body))
    }

    /// True when the node is a Boolean combination of `@`-rooted subtrees
    /// (constants included).
    pub fn is_anchored(&self) -> bool {
        match self {
            Node::At(..) | Node::True | Node::False => true,
            Node::Not(inner) => inner.is_anchored(),
            Node::And(l, r) | Node::Or(l, r) => l.is_anchored() && r.is_anchored(),
            Node::Var(_) | Node::Diamond { .. } => false,
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            Node::True | Node::False | Node::Var(_) => 1,
            Node::Not(inner) | Node::At(_, inner) | Node::Diamond { body: inner, .. } => {
                1 + inner.depth()
            }
            Node::And(l, r) | Node::Or(l, r) => 1 + l.depth().max(r.depth()),
        }
    }

    fn collect_names<'a>(&'a self, vars: &mut BTreeSet<&'a str>, rels: &mut BTreeSet<&'a str>) {
        match self {
            Node::True | Node::False => {}
            Node::Var(x) => {
                vars.insert(x);
            }
            Node::Not(inner) => inner.collect_names(vars, rels),
            Node::And(l, r) | Node::Or(l, r) => {
                l.collect_names(vars, rels);
                r.collect_names(vars, rels);
            }
            Node::Diamond { rel, body, .. } => {
                rels.insert(rel);
                body.collect_names(vars, rels);
            }
            Node::At(x, inner) => {
                vars.insert(x);
                inner.collect_names(vars, rels);
            }
        }
    }

    fn precedence(&self) -> u8 {
        match self {
            Node::Or(..) => 0,
            Node::And(..) => 1,
            _ => 2,
        }
    }

    fn write(&self, f: &mut fmt::Formatter<'_>, min: u8) -> fmt::Result {
        let parens = self.precedence() < min;
        if parens {
            f.write_str("(")?;
        }
        match self {
            Node::True => f.write_str("true")?,
            Node::False => f.write_str("false")?,
            Node::Var(x) => f.write_str(x)?,
            Node::Not(inner) => {
                f.write_str("!")?;
                inner.write(f, 2)?;
            }
            // `&` and `|` parse left-associatively, so right operands at the
            // same level need parentheses.
            Node::And(l, r) => {
                l.write(f, 1)?;
                f.write_str(" & ")?;
                r.write(f, 2)?;
            }
            Node::Or(l, r) => {
                l.write(f, 0)?;
                f.write_str(" | ")?;
                r.write(f, 1)?;
            }
            Node::Diamond { rel, inverse, body } => {
                write!(f, "<{}{}> ", if *inverse { "-" } else { "" }, rel)?;
                body.write(f, 2)?;
            }
            Node::At(x, inner) => {
                write!(f, "@{x} ")?;
                inner.write(f, 2)?;
            }
        }
        if parens {
            f.write_str(")")?;
        }
        Ok(())
    }
}

impl fmt::Display for Node {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.write(f, 0)
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FormulaError {
    #[error("parse error at {position}: {message}")]
    Parse { position: usize, message: String },
    #[error("undeclared variable `{0}`")]
    UnknownVariable(String),
    #[error("variable `{0}` declared twice")]
    DuplicateVariable(String),
    #[error("invalid variable name `{0}`")]
    InvalidVariable(String),
    #[error("formula is not a Boolean combination of anchored (@) subformulas")]
    NotAnchored,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EvalError {
    #[error("unknown relation `{0}`")]
    UnknownRelation(String),
    #[error("unknown vertex `{0}`")]
    UnknownVertex(String),
    #[error("variable `{0}` is not bound")]
    Unbound(String),
    #[error("expected a formula of arity {expected}, found arity {found}")]
    ArityMismatch { expected: usize, found: usize },
}

impl From<GraphError> for EvalError {
    fn from(e: GraphError) -> Self {
        match e {
            GraphError::UnknownRelation(r) => EvalError::UnknownRelation(r),
            GraphError::UnknownVertex(v) => EvalError::UnknownVertex(v),
            other => EvalError::UnknownVertex(other.to_string()),
        }
    }
}

/// A validated k-ary graph predicate.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Formula {
    vars: Vec<String>,
    body: Node,
}

impl Formula {
    /// Validates `body` against the declared variables.
    pub fn new(vars: Vec<String>, body: Node) -> Result<Self, FormulaError> {
        let mut seen = BTreeSet::new();
        for v in &vars {
            if !is_identifier(v) || v == "true" || v == "false" {
                return Err(FormulaError::InvalidVariable(v.clone()));
            }
            if !seen.insert(v.as_str()) {
                return Err(FormulaError::DuplicateVariable(v.clone()));
            }
        }
        let (mut used, mut rels) = (BTreeSet::new(), BTreeSet::new());
        body.collect_names(&mut used, &mut rels);
        if let Some(unknown) = used.iter().find(|u| !seen.contains(*u)) {
            return Err(FormulaError::UnknownVariable(unknown.to_string()));
        }
        if !body.is_anchored() {
            return Err(FormulaError::NotAnchored);
        }
        Ok(Formula { vars, body })
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    pub fn arity(&self) -> usize {
        self.vars.len()
    }

    pub fn body(&self) -> &Node {
        &self.body
    }

    /// Relation names mentioned in the body.
    pub fn relations(&self) -> BTreeSet<&str> {
        let (mut vars, mut rels) = (BTreeSet::new(), BTreeSet::new());
        self.body.collect_names(&mut vars, &mut rels);
        rels
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.body.fmt(f)
    }
}

pub fn parse(text: &str, vars: &[&str]) -> Result<Formula, FormulaError> {
    let body = parse_body(text)?;
    Formula::new(vars.iter().map(|v| v.to_string()).collect(), body)
}

/// Parses syntax only; no variable or anchoring checks.
pub fn parse_body(text: &str) -> Result<Node, FormulaError> {
    let tokens = lex(text)?;
    let mut parser = Parser {
        tokens,
        pos: 0,
        end: text.len(),
    };
    let node = parser.disj()?;
    if let Some((at, tok)) = parser.tokens.get(parser.pos) {
        return Err(FormulaError::Parse {
            position: *at,
            message: format!("unexpected {tok}"),
        });
    }
    Ok(node)
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Token {
    Ident(String),
    Bang,
    At,
    Amp,
    Pipe,
    LAngle,
    RAngle,
    Minus,
    LParen,
    RParen,
}

impl fmt::Display for Token {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Token::Ident(s) => write!(f, "identifier `{s}`"),
            Token::Bang => f.write_str("`!`"),
            Token::At => f.write_str("`@`"),
            Token::Amp => f.write_str("`&`"),
            Token::Pipe => f.write_str("`|`"),
            Token::LAngle => f.write_str("`<`"),
            Token::RAngle => f.write_str("`>`"),
            Token::Minus => f.write_str("`-`"),
            Token::LParen => f.write_str("`(`"),
            Token::RParen => f.write_str("`)`"),
        }
    }
}

fn lex(text: &str) -> Result<Vec<(usize, Token)>, FormulaError> {
    let mut tokens = Vec::new();
    let mut chars = text.char_indices().peekable();
    while let Some(&(i, c)) = chars.peek() {
        let simple = match c {
            '!' => Some(Token::Bang),
            '@' => Some(Token::At),
            '&' => Some(Token::Amp),
            '|' => Some(Token::Pipe),
            '<' => Some(Token::LAngle),
            '>' => Some(Token::RAngle),
            '-' => Some(Token::Minus),
            '(' => Some(Token::LParen),
            ')' => Some(Token::RParen),
            _ => None,
        };
        if let Some(tok) = simple {
            tokens.push((i, tok));
            chars.next();
        } else if c.is_whitespace() {
            chars.next();
        } else if c.is_ascii_alphabetic() {
            let mut ident = String::new();
            while let Some(&(_, c)) = chars.peek() {
                if c.is_ascii_alphanumeric() || c == '_' || c == '-' {
                    ident.push(c);
                    chars.next();
                } else {
                    break;
                }
            }
            tokens.push((i, Token::Ident(ident)));
        } else {
            return Err(FormulaError::Parse {
                position: i,
                message: format!("unexpected character `{c}`"),
            });
        }
    }
    Ok(tokens)
}

struct Parser {
    tokens: Vec<(usize, Token)>,
    pos: usize,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos).map(|(_, t)| t)
    }

    fn position(&self) -> usize {
        self.tokens.get(self.pos).map_or(self.end, |(p, _)| *p)
    }

    fn error<T>(&self, message: impl Into<String>) -> Result<T, FormulaError> {
        Err(FormulaError::Parse {
            position: self.position(),
            message: message.into(),
        })
    }

    fn bump(&mut self) -> Option<Token> {
        let tok = self.tokens.get(self.pos).map(|(_, t)| t.clone());
        self.pos += 1;
        tok
    }

    fn expect(&mut self, want: Token) -> Result<(), FormulaError> {
        match self.peek() {
            Some(t) if *t == want => {
                self.pos += 1;
                Ok(())
            }
            Some(t) => {
                let msg = format!("expected {want}, found {t}");
                self.error(msg)
            }
            None => self.error(format!("expected {want}, found end of input")),
        }
    }

    fn ident(&mut self) -> Result<String, FormulaError> {
        match self.peek() {
            Some(Token::Ident(s)) if s != "true" && s != "false" => {
                let s = s.clone();
                self.pos += 1;
                Ok(s)
            }
            Some(t) => {
                let msg = format!("expected identifier, found {t}");
                self.error(msg)
            }
            None => self.error("expected identifier, found end of input"),
        }
    }

    fn disj(&mut self) -> Result<Node, FormulaError> {
        let mut lhs = self.conj()?;
        while self.peek() == Some(&Token::Pipe) {
            self.pos += 1;
            lhs = Node::or(lhs, self.conj()?);
        }
        Ok(lhs)
    }

    fn conj(&mut self) -> Result<Node, FormulaError> {
        let mut lhs = self.unary()?;
        while self.peek() == Some(&Token::Amp) {
            self.pos += 1;
            lhs = Node::and(lhs, self.unary()?);
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Node, FormulaError> {
        match self.peek() {
            Some(Token::Bang) => {
                self.pos += 1;
                Ok(Node::not(self.unary()?))
            }
            Some(Token::At) => {
                self.pos += 1;
                let var = self.ident()?;
                Ok(Node::at(var, self.unary()?))
            }
            Some(Token::LAngle) => {
                self.pos += 1;
                let inverse = self.peek() == Some(&Token::Minus);
                if inverse {
                    self.pos += 1;
                }
                let rel = self.ident()?;
                self.expect(Token::RAngle)?;
                let body = Box::new(self.unary()?);
                Ok(Node::Diamond { rel, inverse, body })
            }
            _ => self.primary(),
        }
    }

    fn primary(&mut self) -> Result<Node, FormulaError> {
        match self.peek() {
            Some(Token::LParen) => {
                self.pos += 1;
                let inner = self.disj()?;
                self.expect(Token::RParen)?;
                Ok(inner)
            }
            Some(Token::Ident(_)) => match self.bump() {
                Some(Token::Ident(s)) if s == "true" => Ok(Node::True),
                Some(Token::Ident(s)) if s == "false" => Ok(Node::False),
                Some(Token::Ident(s)) => Ok(Node::Var(s)),
                _ => unreachable!(),
            },
            Some(t) => {
                let msg = format!("expected formula, found {t}");
                self.error(msg)
            }
            None => self.error("expected formula, found end of input"),
        }
    }
}

/// Assignment of free variables to vertex ids.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Valuation(BTreeMap<String, String>);

impl Valuation {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn bind(mut self, var: impl Into<String>, vertex: impl Into<String>) -> Self {
        self.0.insert(var.into(), vertex.into());
        self
    }

    pub fn insert(&mut self, var: impl Into<String>, vertex: impl Into<String>) {
        self.0.insert(var.into(), vertex.into());
    }

    pub fn get(&self, var: &str) -> Option<&str> {
        self.0.get(var).map(String::as_str)
    }
}

impl<K: Into<String>, V: Into<String>> FromIterator<(K, V)> for Valuation {
    fn from_iter<I: IntoIterator<Item = (K, V)>>(iter: I) -> Self {
        Valuation(iter.into_iter().map(|(k, v)| (k.into(), v.into())).collect())
    }
}

// Body with relation names and variables resolved against a graph.
enum Bound {
    Const(bool),
    Var(Ix),
    Not(Box<Bound>),
    And(Box<Bound>, Box<Bound>),
    Or(Box<Bound>, Box<Bound>),
    Diamond(RelIx, Direction, Box<Bound>),
    At(Ix, Box<Bound>),
}

fn bind(node: &Node, graph: &AuthorizationGraph, vars: &BTreeMap<&str, Ix>) -> Result<Bound, EvalError> {
    let lookup = |x: &String| vars.get(x.as_str()).copied().ok_or_else(|| EvalError::Unbound(x.clone()));
    Ok(match node {
        Node::True => Bound::Const(true),
        Node::False => Bound::Const(false),
        Node::Var(x) => Bound::Var(lookup(x)?),
        Node::Not(inner) => Bound::Not(Box::new(bind(inner, graph, vars)?)),
        Node::And(l, r) => Bound::And(Box::new(bind(l, graph, vars)?), Box::new(bind(r, graph, vars)?)),
        Node::Or(l, r) => Bound::Or(Box::new(bind(l, graph, vars)?), Box::new(bind(r, graph, vars)?)),
        Node::Diamond { rel, inverse, body } => {
            let rx = graph.relation_ix(rel)?;
            let dir = if *inverse { Direction::Inverse } else { Direction::Forward };
            Bound::Diamond(rx, dir, Box::new(bind(body, graph, vars)?))
        }
        Node::At(x, inner) => Bound::At(lookup(x)?, Box::new(bind(inner, graph, vars)?)),
    })
}

fn holds(node: &Bound, graph: &AuthorizationGraph, world: Ix) -> bool {
    match node {
        Bound::Const(b) => *b,
        Bound::Var(v) => *v == world,
        Bound::Not(inner) => !holds(inner, graph, world),
        Bound::And(l, r) => holds(l, graph, world) && holds(r, graph, world),
        Bound::Or(l, r) => holds(l, graph, world) || holds(r, graph, world),
        Bound::Diamond(rel, dir, body) => match **body {
            // a single edge lookup decides `<r> x`
            Bound::Var(target) => match dir {
                Direction::Forward => graph.has_edge_ix(world, *rel, target),
                Direction::Inverse => graph.has_edge_ix(target, *rel, world),
            },
            _ => graph
                .neighbors_ix(world, *rel, *dir)
                .iter()
                .any(|&n| holds(body, graph, n)),
        },
        Bound::At(v, inner) => holds(inner, graph, *v),
    }
}

/// Local model checking of `formula` under `valuation`.
pub fn evaluate(
    formula: &Formula,
    graph: &AuthorizationGraph,
    valuation: &Valuation,
) -> Result<bool, EvalError> {
    let mut vars = BTreeMap::new();
    for name in &formula.vars {
        let vertex = valuation
            .get(name)
            .ok_or_else(|| EvalError::Unbound(name.clone()))?;
        vars.insert(name.as_str(), graph.vertex_ix(vertex)?);
    }
    let bound = bind(&formula.body, graph, &vars)?;
    // Anchored bodies never read the starting world.
    Ok(holds(&bound, graph, Ix::MAX))
}

/// Evaluates an arity-2 predicate with the first declared variable bound to
/// `resource` and the second to `requestor`.
pub fn relationship_predicate(
    formula: &Formula,
    graph: &AuthorizationGraph,
    resource: &str,
    requestor: &str,
) -> Result<bool, EvalError> {
    match formula.vars.as_slice() {
        [res, req] => evaluate(
            formula,
            graph,
            &Valuation::new().bind(res.as_str(), resource).bind(req.as_str(), requestor),
        ),
        other => Err(EvalError::ArityMismatch {
            expected: 2,
            found: other.len(),
        }),
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LibraryError {
    #[error("formula `{0}` already defined")]
    Duplicate(String),
    #[error("formula `{id}`: {source}")]
    Invalid { id: String, source: FormulaError },
}

/// Named, reusable formulas.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct FormulaLibrary {
    formulas: BTreeMap<String, Formula>,
}

impl FormulaLibrary {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, id: impl Into<String>, formula: Formula) -> Result<(), LibraryError> {
        let id = id.into();
        if self.formulas.contains_key(&id) {
            return Err(LibraryError::Duplicate(id));
        }
        self.formulas.insert(id, formula);
        Ok(())
    }

    pub fn define(&mut self, id: &str, vars: &[&str], text: &str) -> Result<(), LibraryError> {
        let formula = parse(text, vars).map_err(|source| LibraryError::Invalid {
            id: id.to_string(),
            source,
        })?;
        self.insert(id, formula)
    }

    pub fn get(&self, id: &str) -> Option<&Formula> {
        self.formulas.get(id)
    }

    pub fn contains(&self, id: &str) -> bool {
        self.formulas.contains_key(id)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &Formula)> {
        self.formulas.iter().map(|(k, v)| (k.as_str(), v))
    }

    pub fn len(&self) -> usize {
        self.formulas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.formulas.is_empty()
    }
}
