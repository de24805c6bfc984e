//! Abstract syntax of RML specifications.

use indexmap::IndexMap;

use crate::value::Value;

/// Unary operators of data expressions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum UnaryOp {
    Neg,
    Not,
}

/// Binary operators of data expressions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum BinaryOp {
    Add,
    Sub,
    Mul,
    Div,
    Lt,
    Gt,
    Le,
    Ge,
    Eq,
    Ne,
    And,
    Or,
}

impl BinaryOp {
    pub fn symbol(self) -> &'static str {
        match self {
            BinaryOp::Add => "+",
            BinaryOp::Sub => "-",
            BinaryOp::Mul => "*",
            BinaryOp::Div => "/",
            BinaryOp::Lt => "<",
            BinaryOp::Gt => ">",
            BinaryOp::Le => "<=",
            BinaryOp::Ge => ">=",
            BinaryOp::Eq => "==",
            BinaryOp::Ne => "!=",
            BinaryOp::And => "&&",
            BinaryOp::Or => "||",
        }
    }

    /// Binding strength; larger binds tighter.
    pub fn precedence(self) -> u8 {
        match self {
            BinaryOp::Or => 1,
            BinaryOp::And => 2,
            BinaryOp::Eq | BinaryOp::Ne => 3,
            BinaryOp::Lt | BinaryOp::Gt | BinaryOp::Le | BinaryOp::Ge => 4,
            BinaryOp::Add | BinaryOp::Sub => 5,
            BinaryOp::Mul | BinaryOp::Div => 6,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum DataExpr {
    Var(String),
    Lit(Value),
    Unary(UnaryOp, Box<DataExpr>),
    Binary(BinaryOp, Box<DataExpr>, Box<DataExpr>),
}

impl DataExpr {
    pub fn var(name: impl Into<String>) -> Self {
        DataExpr::Var(name.into())
    }

    pub fn num(x: f64) -> Self {
        DataExpr::Lit(Value::num(x))
    }

    pub fn binary(op: BinaryOp, l: DataExpr, r: DataExpr) -> Self {
        DataExpr::Binary(op, Box::new(l), Box::new(r))
    }

    pub fn is_closed(&self) -> bool {
        match self {
            DataExpr::Var(_) => false,
            DataExpr::Lit(_) => true,
            DataExpr::Unary(_, e) => e.is_closed(),
            DataExpr::Binary(_, l, r) => l.is_closed() && r.is_closed(),
        }
    }

    pub fn free_vars(&self, out: &mut Vec<String>) {
        match self {
            DataExpr::Var(x) => {
                if !out.contains(x) {
                    out.push(x.clone())
                }
            }
            DataExpr::Lit(_) => {}
            DataExpr::Unary(_, e) => e.free_vars(out),
            DataExpr::Binary(_, l, r) => {
                l.free_vars(out);
                r.free_vars(out);
            }
        }
    }
}

/// Argument of an event-type pattern inside a term, e.g. the `n` in `b(n)`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum EventArg {
    Var(String),
    Lit(Value),
    Wildcard,
}

/// An event-type pattern `name(arg, ...)` as used in terms and filters.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EventPattern {
    pub name: String,
    pub args: Vec<EventArg>,
}

impl EventPattern {
    pub fn new(name: impl Into<String>, args: Vec<EventArg>) -> Self {
        Self {
            name: name.into(),
            args,
        }
    }
}

/// A trace expression. Doubles as the residual monitor state.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Term {
    Empty,
    All,
    None,
    Event(EventPattern),
    DefRef(String),
    Generic(String, Vec<DataExpr>),
    Concat(Box<Term>, Box<Term>),
    And(Box<Term>, Box<Term>),
    Or(Box<Term>, Box<Term>),
    Shuffle(Box<Term>, Box<Term>),
    Let(Vec<String>, Box<Term>),
    Optional(Box<Term>),
    Plus(Box<Term>),
    Star(Box<Term>),
    Closure(Box<Term>),
    CondFilter(EventPattern, Box<Term>, Box<Term>),
    Filter(EventPattern, Box<Term>),
    IfElse(DataExpr, Box<Term>, Box<Term>),
}

impl Term {
    pub fn event(name: impl Into<String>) -> Self {
        Term::Event(EventPattern::new(name, Vec::new()))
    }

    pub fn concat(a: Term, b: Term) -> Self {
        Term::Concat(Box::new(a), Box::new(b))
    }

    pub fn or(a: Term, b: Term) -> Self {
        Term::Or(Box::new(a), Box::new(b))
    }

    pub fn and(a: Term, b: Term) -> Self {
        Term::And(Box::new(a), Box::new(b))
    }

    pub fn shuffle(a: Term, b: Term) -> Self {
        Term::Shuffle(Box::new(a), Box::new(b))
    }

    pub fn star(t: Term) -> Self {
        Term::Star(Box::new(t))
    }

    pub fn generic(name: impl Into<String>, args: Vec<DataExpr>) -> Self {
        Term::Generic(name.into(), args)
    }

    /// Visits every direct subterm.
    pub fn children(&self) -> Vec<&Term> {
        match self {
            Term::Empty
            | Term::All
            | Term::None
            | Term::Event(_)
            | Term::DefRef(_)
            | Term::Generic(..) => vec![],
            Term::Concat(a, b) | Term::And(a, b) | Term::Or(a, b) | Term::Shuffle(a, b) => {
                vec![a, b]
            }
            Term::Let(_, t)
            | Term::Optional(t)
            | Term::Plus(t)
            | Term::Star(t)
            | Term::Closure(t)
            | Term::Filter(_, t) => vec![t],
            Term::CondFilter(_, a, b) | Term::IfElse(_, a, b) => vec![a, b],
        }
    }

    /// Number of nodes; used by generators and diagnostics.
    pub fn size(&self) -> usize {
        1 + self.children().iter().map(|c| c.size()).sum::<usize>()
    }
}

/// Kind of body of an event-type declaration.
#[derive(Debug, Clone, PartialEq)]
pub enum EventTypeBody {
    /// `matches {k: p, ...}`: one object pattern, matched by subset.
    Object(Vec<(String, ValuePattern)>),
    /// `matches e1 | e2 | ...`: a disjunction of other event types.
    Disjuncts(Vec<DisjunctPattern>),
}

/// `etp` inside a disjunct declaration: `name(vp, ...)`.
#[derive(Debug, Clone, PartialEq)]
pub struct DisjunctPattern {
    pub name: String,
    pub args: Vec<ValuePattern>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ValuePattern {
    Var(String),
    Lit(Value),
    Object(Vec<(String, ValuePattern)>),
    /// Array pattern; `ellipsis` allows extra trailing elements.
    Array {
        items: Vec<ValuePattern>,
        ellipsis: bool,
    },
    Wildcard,
}

impl ValuePattern {
    pub fn vars(&self, out: &mut Vec<String>) {
        match self {
            ValuePattern::Var(x) => {
                if !out.contains(x) {
                    out.push(x.clone())
                }
            }
            ValuePattern::Lit(_) | ValuePattern::Wildcard => {}
            ValuePattern::Object(fields) => fields.iter().for_each(|(_, p)| p.vars(out)),
            ValuePattern::Array { items, .. } => items.iter().for_each(|p| p.vars(out)),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EventTypeDecl {
    pub name: String,
    pub params: Vec<String>,
    pub negated: bool,
    pub body: EventTypeBody,
    pub guard: Option<DataExpr>,
}

impl EventTypeDecl {
    /// Variables the declaration's body can bind.
    pub fn pattern_vars(&self) -> Vec<String> {
        let mut out = Vec::new();
        match &self.body {
            EventTypeBody::Object(fields) => fields.iter().for_each(|(_, p)| p.vars(&mut out)),
            EventTypeBody::Disjuncts(ds) => ds
                .iter()
                .flat_map(|d| d.args.iter())
                .for_each(|p| p.vars(&mut out)),
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Definition {
    pub params: Vec<String>,
    pub body: Term,
}

/// A parsed RML specification: event types, `Main`, and named definitions.
#[derive(Debug, Clone, PartialEq)]
pub struct Specification {
    pub event_types: Vec<EventTypeDecl>,
    pub definitions: IndexMap<String, Definition>,
    pub main: Term,
}

impl Specification {
    pub fn event_type(&self, name: &str) -> Option<&EventTypeDecl> {
        self.event_types.iter().find(|d| d.name == name)
    }

    pub fn definition(&self, name: &str) -> Option<&Definition> {
        self.definitions.get(name)
    }
}
