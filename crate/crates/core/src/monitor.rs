//! Trace-expression monitor: derivatives, verdicts and canonical state ids.

use std::cell::{Cell, RefCell};
use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::ast::*;
use crate::eval::{eval_condition, eval_data, substitute_data, EvalError};
use crate::matcher::{label, MatchError};
use crate::printer::{render_term, render_value};
use crate::value::{Bindings, Event, Value};

/// Unfoldings of definitions allowed while processing a single event.
pub const MAX_UNFOLDS: usize = 10_000;
/// Definitions nested inside one another without consuming an event.
pub const MAX_NESTING: usize = 256;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Verdict {
    False,
    CurrentlyFalse,
    CurrentlyTrue,
    True,
}

impl Verdict {
    pub const ALL: [Verdict; 4] = [
        Verdict::False,
        Verdict::CurrentlyFalse,
        Verdict::CurrentlyTrue,
        Verdict::True,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Verdict::False => "False",
            Verdict::CurrentlyFalse => "CurrentlyFalse",
            Verdict::CurrentlyTrue => "CurrentlyTrue",
            Verdict::True => "True",
        }
    }

    pub fn is_accepting(self) -> bool {
        matches!(self, Verdict::CurrentlyTrue | Verdict::True)
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Verdict {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let key: String = s
            .chars()
            .filter(|c| c.is_ascii_alphanumeric())
            .collect::<String>()
            .to_ascii_lowercase();
        Verdict::ALL
            .into_iter()
            .find(|v| v.name().to_ascii_lowercase() == key)
            .ok_or_else(|| format!("unknown verdict `{s}`"))
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MonitorError {
    #[error(transparent)]
    Match(#[from] MatchError),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error("unfolding `{0}` does not terminate without consuming an event")]
    Divergence(String),
    #[error("undefined definition `{0}`")]
    UndefinedDefinition(String),
    #[error("`{name}` expects {expected} argument(s), got {got}")]
    Arity {
        name: String,
        expected: usize,
        got: usize,
    },
}

/// A residual term together with the bindings made along the run.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MonitorState {
    pub term: Term,
    pub env: Bindings,
    id: Arc<str>,
}

impl MonitorState {
    pub fn new(term: Term, env: Bindings) -> Self {
        let term = normalize(&term);
        let id = render_state(&term, &env).into();
        Self { term, env, id }
    }

    pub fn id(&self) -> &Arc<str> {
        &self.id
    }
}

pub fn state_id(state: &MonitorState) -> &str {
    &state.id
}

fn render_state(term: &Term, env: &Bindings) -> String {
    let mut s = render_term(term);
    if !env.is_empty() {
        let parts: Vec<String> = env
            .iter()
            .map(|(k, v)| format!("{k}={}", render_value(v)))
            .collect();
        s.push_str(" | ");
        s.push_str(&parts.join(", "));
    }
    s
}

/// A specification ready to be executed.
#[derive(Debug, Clone)]
pub struct Monitor {
    spec: Arc<Specification>,
}

impl Monitor {
    pub fn new(spec: Specification) -> Self {
        Self {
            spec: Arc::new(spec),
        }
    }

    pub fn spec(&self) -> &Specification {
        &self.spec
    }

    pub fn initial(&self) -> MonitorState {
        MonitorState::new(self.spec.main.clone(), Bindings::new())
    }

    pub fn labels(&self, event: &Event) -> Result<Vec<(String, Bindings)>, MonitorError> {
        Ok(label(&self.spec.event_types, event, &Bindings::new())?)
    }

    pub fn step(
        &self,
        state: &MonitorState,
        event: &Event,
    ) -> Result<(MonitorState, Verdict), MonitorError> {
        let labels = self.labels(event)?;
        self.step_labelled(state, &labels)
    }

    /// Like [`Monitor::step`] for an event that has already been labelled.
    pub fn step_labelled(
        &self,
        state: &MonitorState,
        labels: &[(String, Bindings)],
    ) -> Result<(MonitorState, Verdict), MonitorError> {
        match state.term {
            Term::None => return Ok((state.clone(), Verdict::False)),
            Term::All => return Ok((state.clone(), Verdict::True)),
            _ => {}
        }
        let alts = Deriver::new(&self.spec, labels, &state.env).derive(&state.term)?;

        // keep only bindings every surviving alternative agrees on
        let mut env = state.env.clone();
        if let Some((_, first)) = alts.first() {
            for (k, v) in first {
                if alts.iter().all(|(_, s)| s.get(k) == Some(v)) {
                    env.insert(k.clone(), v.clone());
                }
            }
        }
        let residual = join_or(alts.into_iter().map(|(t, s)| subst_term(&t, &s)).collect());
        let next = MonitorState::new(residual, env);
        let verdict = classify(&self.spec, &next.term, &next.env)?;
        Ok((next, verdict))
    }

    /// Runs a whole trace, returning the state and verdict after each event.
    pub fn run(
        &self,
        trace: &[Event],
    ) -> Result<Vec<(MonitorState, Verdict)>, MonitorError> {
        let mut state = self.initial();
        let mut out = Vec::with_capacity(trace.len());
        for ev in trace {
            let (next, v) = self.step(&state, ev)?;
            out.push((next.clone(), v));
            state = next;
        }
        Ok(out)
    }
}

fn join_or(mut ts: Vec<Term>) -> Term {
    match ts.len() {
        0 => Term::None,
        1 => ts.pop().unwrap(),
        _ => {
            let last = ts.pop().unwrap();
            ts.into_iter().rev().fold(last, |acc, t| Term::or(t, acc))
        }
    }
}

/// One-event derivative. Each alternative is substituted with the bindings it
/// made; the result is not normalized.
pub fn derivative(
    spec: &Specification,
    term: &Term,
    labels: &[(String, Bindings)],
    env: &Bindings,
) -> Result<Term, MonitorError> {
    let alts = Deriver::new(spec, labels, env).derive(term)?;
    Ok(join_or(alts.into_iter().map(|(t, s)| subst_term(&t, &s)).collect()))
}

type Alts = Vec<(Term, Bindings)>;

struct Deriver<'a> {
    spec: &'a Specification,
    labels: &'a [(String, Bindings)],
    env: &'a Bindings,
    unfolds: Cell<usize>,
    path: RefCell<Vec<(String, Vec<Value>)>>,
}

impl<'a> Deriver<'a> {
    fn new(spec: &'a Specification, labels: &'a [(String, Bindings)], env: &'a Bindings) -> Self {
        Self {
            spec,
            labels,
            env,
            unfolds: Cell::new(0),
            path: RefCell::new(Vec::new()),
        }
    }

    /// Derives the body of a definition. Re-entering the same instance
    /// before an event is consumed can never terminate.
    fn derive_unfolded(&self, name: &str, args: &[DataExpr]) -> Result<Alts, MonitorError> {
        let n = self.unfolds.get() + 1;
        self.unfolds.set(n);
        let (body, key) = instantiate(self.spec, name, args, self.env)?;
        {
            let mut path = self.path.borrow_mut();
            if n > MAX_UNFOLDS || path.len() >= MAX_NESTING || path.contains(&key) {
                return Err(MonitorError::Divergence(name.to_string()));
            }
            path.push(key);
        }
        let r = self.derive(&body);
        self.path.borrow_mut().pop();
        r
    }

    fn nullable(&self, t: &Term) -> Result<bool, MonitorError> {
        Nullable {
            spec: self.spec,
            env: self.env,
            stack: Vec::new(),
            unfolds: 0,
        }
        .check(t)
    }

    fn derive(&self, t: &Term) -> Result<Alts, MonitorError> {
        Ok(match t {
            Term::Empty | Term::None => vec![],
            Term::All => vec![(Term::All, Bindings::new())],
            Term::Event(p) => match unify(self.spec, p, self.labels, self.env) {
                Some(s) => vec![(Term::Empty, s)],
                None => vec![],
            },
            Term::DefRef(name) => self.derive_unfolded(name, &[])?,
            Term::Generic(name, args) => self.derive_unfolded(name, args)?,
            Term::Concat(a, b) => {
                let mut out: Alts = self
                    .derive(a)?
                    .into_iter()
                    .map(|(r, s)| (Term::Concat(Box::new(r), b.clone()), s))
                    .collect();
                if self.nullable(a)? {
                    out.extend(self.derive(b)?);
                }
                out
            }
            Term::Or(a, b) => {
                let mut out = self.derive(a)?;
                out.extend(self.derive(b)?);
                out
            }
            Term::And(a, b) => {
                let left = self.derive(a)?;
                if left.is_empty() {
                    return Ok(vec![]);
                }
                let right = self.derive(b)?;
                let mut out = Vec::new();
                for (ra, sa) in &left {
                    for (rb, sb) in &right {
                        if let Some(s) = merge(sa, sb) {
                            out.push((Term::and(ra.clone(), rb.clone()), s));
                        }
                    }
                }
                out
            }
            Term::Shuffle(a, b) => {
                let mut out: Alts = self
                    .derive(a)?
                    .into_iter()
                    .map(|(r, s)| (Term::Shuffle(Box::new(r), b.clone()), s))
                    .collect();
                out.extend(
                    self.derive(b)?
                        .into_iter()
                        .map(|(r, s)| (Term::Shuffle(a.clone(), Box::new(r)), s)),
                );
                out
            }
            Term::Let(vars, body) => self
                .derive(body)?
                .into_iter()
                .map(|(r, mut s)| {
                    let mine: Bindings = vars
                        .iter()
                        .filter_map(|v| s.remove(v).map(|x| (v.clone(), x)))
                        .collect();
                    let r = subst_term(&r, &mine);
                    let rest: Vec<String> =
                        vars.iter().filter(|v| !mine.contains_key(*v)).cloned().collect();
                    let r = if rest.is_empty() {
                        r
                    } else {
                        Term::Let(rest, Box::new(r))
                    };
                    (r, s)
                })
                .collect(),
            Term::Optional(x) => self.derive(x)?,
            Term::Plus(x) | Term::Star(x) => self
                .derive(x)?
                .into_iter()
                .map(|(r, s)| (Term::concat(r, Term::Star(x.clone())), s))
                .collect(),
            Term::Closure(x) => self
                .derive(x)?
                .into_iter()
                .filter_map(|(r, s)| {
                    let r = normalize(&subst_term(&r, &s));
                    (r != Term::None).then(|| (Term::Closure(Box::new(r)), s))
                })
                .collect(),
            Term::IfElse(c, a, b) => {
                if eval_condition(c, self.env)? {
                    self.derive(a)?
                } else {
                    self.derive(b)?
                }
            }
            Term::Filter(p, x) => match unify_filter(self.spec, p, self.labels, self.env) {
                true => self
                    .derive(x)?
                    .into_iter()
                    .map(|(r, s)| (Term::Filter(p.clone(), Box::new(r)), s))
                    .collect(),
                false => vec![(t.clone(), Bindings::new())],
            },
            Term::CondFilter(p, a, b) => {
                if unify_filter(self.spec, p, self.labels, self.env) {
                    self.derive(a)?
                        .into_iter()
                        .map(|(r, s)| (Term::CondFilter(p.clone(), Box::new(r), b.clone()), s))
                        .collect()
                } else {
                    self.derive(b)?
                        .into_iter()
                        .map(|(r, s)| (Term::CondFilter(p.clone(), a.clone(), Box::new(r)), s))
                        .collect()
                }
            }
        })
    }
}

/// Expands a definition reference with its arguments evaluated under `env`.
/// Also returns the instance key (name and argument values).
fn instantiate(
    spec: &Specification,
    name: &str,
    args: &[DataExpr],
    env: &Bindings,
) -> Result<(Term, (String, Vec<Value>)), MonitorError> {
    let def = spec
        .definition(name)
        .ok_or_else(|| MonitorError::UndefinedDefinition(name.to_string()))?;
    if def.params.len() != args.len() {
        return Err(MonitorError::Arity {
            name: name.to_string(),
            expected: def.params.len(),
            got: args.len(),
        });
    }
    let mut values = Bindings::new();
    let mut key = Vec::with_capacity(args.len());
    for (p, a) in def.params.iter().zip(args) {
        let v = eval_data(a, env).map_err(|e| e.at(format!("an argument of `{name}`")))?;
        key.push(v.clone());
        values.insert(p.clone(), v);
    }
    Ok((subst_term(&def.body, &values), (name.to_string(), key)))
}

fn merge(a: &Bindings, b: &Bindings) -> Option<Bindings> {
    let mut out = a.clone();
    for (k, v) in b {
        match out.get(k) {
            Some(old) if old != v => return None,
            Some(_) => {}
            None => {
                out.insert(k.clone(), v.clone());
            }
        }
    }
    Some(out)
}

/// Unifies an event pattern against the labels of the current event. Returns
/// the new bindings for variables not yet bound.
fn unify(
    spec: &Specification,
    p: &EventPattern,
    labels: &[(String, Bindings)],
    env: &Bindings,
) -> Option<Bindings> {
    let (_, found) = labels.iter().find(|(n, _)| *n == p.name)?;
    let decl = spec.event_type(&p.name)?;
    let mut s = Bindings::new();
    for (arg, param) in p.args.iter().zip(&decl.params) {
        let actual = found.get(param);
        match arg {
            EventArg::Wildcard => {}
            EventArg::Lit(v) => {
                if actual.is_some_and(|a| a != v) {
                    return None;
                }
            }
            EventArg::Var(x) => {
                let known = env.get(x).or_else(|| s.get(x));
                match (known, actual) {
                    (Some(k), Some(a)) if k != a => return None,
                    (None, Some(a)) => {
                        s.insert(x.clone(), a.clone());
                    }
                    _ => {}
                }
            }
        }
    }
    Some(s)
}

/// Filter patterns test membership only: unbound variables act as wildcards.
fn unify_filter(
    spec: &Specification,
    p: &EventPattern,
    labels: &[(String, Bindings)],
    env: &Bindings,
) -> bool {
    unify(spec, p, labels, env).is_some()
}

struct Nullable<'a> {
    spec: &'a Specification,
    env: &'a Bindings,
    stack: Vec<(String, Vec<Value>)>,
    unfolds: usize,
}

impl Nullable<'_> {
    fn check(&mut self, t: &Term) -> Result<bool, MonitorError> {
        Ok(match t {
            Term::Empty | Term::All | Term::Star(_) | Term::Optional(_) | Term::Closure(_) => true,
            Term::None | Term::Event(_) => false,
            Term::Concat(a, b) | Term::And(a, b) | Term::Shuffle(a, b) => {
                self.check(a)? && self.check(b)?
            }
            Term::CondFilter(_, a, b) => self.check(a)? && self.check(b)?,
            Term::Or(a, b) => self.check(a)? || self.check(b)?,
            Term::Plus(x) | Term::Let(_, x) | Term::Filter(_, x) => self.check(x)?,
            Term::IfElse(c, a, b) => {
                if eval_condition(c, self.env)? {
                    self.check(a)?
                } else {
                    self.check(b)?
                }
            }
            Term::DefRef(name) => self.unfold(name, &[])?,
            Term::Generic(name, args) => self.unfold(name, args)?,
        })
    }

    fn unfold(&mut self, name: &str, args: &[DataExpr]) -> Result<bool, MonitorError> {
        self.unfolds += 1;
        if self.unfolds > MAX_UNFOLDS {
            return Err(MonitorError::Divergence(name.to_string()));
        }
        let (body, key) = instantiate(self.spec, name, args, self.env)?;
        if self.stack.len() >= MAX_NESTING || self.stack.contains(&key) {
            return Err(MonitorError::Divergence(name.to_string()));
        }
        self.stack.push(key);
        let r = self.check(&body);
        self.stack.pop();
        r
    }
}

/// Whether `term` accepts the empty continuation.
pub fn nullable(spec: &Specification, term: &Term, env: &Bindings) -> Result<bool, MonitorError> {
    Nullable {
        spec,
        env,
        stack: Vec::new(),
        unfolds: 0,
    }
    .check(term)
}

/// Verdict of a normalized residual. `True` is reported only for a residual
/// that is literally `all`, and `False` only for `none`.
pub fn classify(spec: &Specification, term: &Term, env: &Bindings) -> Result<Verdict, MonitorError> {
    Ok(match term {
        Term::None => Verdict::False,
        Term::All => Verdict::True,
        t if nullable(spec, t, env)? => Verdict::CurrentlyTrue,
        _ => Verdict::CurrentlyFalse,
    })
}

/// Substitutes values for free variables, respecting `let` shadowing, and
/// folds data expressions that become closed.
pub fn subst_term(t: &Term, s: &Bindings) -> Term {
    if s.is_empty() {
        return t.clone();
    }
    let arg = |a: &EventArg| match a {
        EventArg::Var(x) => match s.get(x) {
            Some(v) => EventArg::Lit(v.clone()),
            None => a.clone(),
        },
        _ => a.clone(),
    };
    let pat = |p: &EventPattern| EventPattern {
        name: p.name.clone(),
        args: p.args.iter().map(arg).collect(),
    };
    let b = |x: &Term| Box::new(subst_term(x, s));
    match t {
        Term::Empty | Term::All | Term::None | Term::DefRef(_) => t.clone(),
        Term::Event(p) => Term::Event(pat(p)),
        Term::Generic(n, args) => {
            Term::Generic(n.clone(), args.iter().map(|a| substitute_data(a, s)).collect())
        }
        Term::Concat(x, y) => Term::Concat(b(x), b(y)),
        Term::And(x, y) => Term::And(b(x), b(y)),
        Term::Or(x, y) => Term::Or(b(x), b(y)),
        Term::Shuffle(x, y) => Term::Shuffle(b(x), b(y)),
        Term::Let(vars, body) => {
            let inner: Bindings = s
                .iter()
                .filter(|(k, _)| !vars.contains(k))
                .map(|(k, v)| (k.clone(), v.clone()))
                .collect();
            Term::Let(vars.clone(), Box::new(subst_term(body, &inner)))
        }
        Term::Optional(x) => Term::Optional(b(x)),
        Term::Plus(x) => Term::Plus(b(x)),
        Term::Star(x) => Term::Star(b(x)),
        Term::Closure(x) => Term::Closure(b(x)),
        Term::CondFilter(p, x, y) => Term::CondFilter(pat(p), b(x), b(y)),
        Term::Filter(p, x) => Term::Filter(pat(p), b(x)),
        Term::IfElse(c, x, y) => Term::IfElse(substitute_data(c, s), b(x), b(y)),
    }
}

/// Free variables of a term.
pub fn term_free_vars(t: &Term) -> BTreeSet<String> {
    let mut out = BTreeSet::new();
    collect_free(t, &mut out);
    out
}

fn collect_free(t: &Term, out: &mut BTreeSet<String>) {
    let pat = |p: &EventPattern, out: &mut BTreeSet<String>| {
        for a in &p.args {
            if let EventArg::Var(x) = a {
                out.insert(x.clone());
            }
        }
    };
    let data = |e: &DataExpr, out: &mut BTreeSet<String>| {
        let mut v = Vec::new();
        e.free_vars(&mut v);
        out.extend(v);
    };
    match t {
        Term::Event(p) => pat(p, out),
        Term::Generic(_, args) => args.iter().for_each(|a| data(a, out)),
        Term::IfElse(c, _, _) => data(c, out),
        Term::Filter(p, _) | Term::CondFilter(p, _, _) => pat(p, out),
        Term::Let(vars, body) => {
            let mut inner = BTreeSet::new();
            collect_free(body, &mut inner);
            out.extend(inner.into_iter().filter(|x| !vars.contains(x)));
            return;
        }
        _ => {}
    }
    for c in t.children() {
        collect_free(c, out);
    }
}

/// Canonical form: unit and zero laws, right-nested concatenation, sorted and
/// deduplicated unions and intersections, collapsed repetition operators,
/// folded closed conditions and arguments. Language-preserving and idempotent.
pub fn normalize(t: &Term) -> Term {
    match t {
        Term::Empty | Term::All | Term::None | Term::Event(_) | Term::DefRef(_) => t.clone(),
        Term::Generic(n, args) => Term::Generic(
            n.clone(),
            args.iter()
                .map(|a| substitute_data(a, &Bindings::new()))
                .collect(),
        ),
        Term::Concat(a, b) => concat_n(normalize(a), normalize(b)),
        Term::Or(a, b) => {
            let mut leaves = Vec::new();
            flatten_or(normalize(a), &mut leaves);
            flatten_or(normalize(b), &mut leaves);
            leaves.retain(|x| *x != Term::None);
            if leaves.contains(&Term::All) {
                return Term::All;
            }
            leaves.sort();
            leaves.dedup();
            rebuild(leaves, Term::None, Term::or)
        }
        Term::And(a, b) => {
            let mut leaves = Vec::new();
            flatten_and(normalize(a), &mut leaves);
            flatten_and(normalize(b), &mut leaves);
            if leaves.contains(&Term::None) {
                return Term::None;
            }
            leaves.retain(|x| *x != Term::All);
            leaves.sort();
            leaves.dedup();
            rebuild(leaves, Term::All, Term::and)
        }
        Term::Shuffle(a, b) => match (normalize(a), normalize(b)) {
            (Term::None, _) | (_, Term::None) => Term::None,
            (Term::Empty, x) | (x, Term::Empty) => x,
            (x, y) => Term::shuffle(x, y),
        },
        Term::Star(x) => match strip_repeat(normalize(x)) {
            Term::Empty | Term::None => Term::Empty,
            Term::All => Term::All,
            x => Term::star(x),
        },
        Term::Plus(x) => match normalize(x) {
            x @ (Term::None | Term::Empty | Term::All | Term::Star(_) | Term::Plus(_)) => x,
            Term::Optional(y) => Term::star(*y),
            x => Term::Plus(Box::new(x)),
        },
        Term::Optional(x) => match normalize(x) {
            Term::None | Term::Empty => Term::Empty,
            x @ (Term::All | Term::Star(_) | Term::Optional(_)) => x,
            Term::Plus(y) => Term::star(*y),
            x => Term::Optional(Box::new(x)),
        },
        Term::Closure(x) => match normalize(x) {
            x @ (Term::None | Term::Empty | Term::All | Term::Closure(_)) => x,
            x => Term::Closure(Box::new(x)),
        },
        Term::Let(vars, body) => {
            let body = normalize(body);
            let free = term_free_vars(&body);
            let keep: Vec<String> = vars.iter().filter(|v| free.contains(*v)).cloned().collect();
            if keep.is_empty() {
                body
            } else {
                Term::Let(keep, Box::new(body))
            }
        }
        Term::IfElse(c, a, b) => {
            let c = substitute_data(c, &Bindings::new());
            match &c {
                DataExpr::Lit(Value::Bool(true)) => normalize(a),
                DataExpr::Lit(Value::Bool(false)) => normalize(b),
                _ => Term::IfElse(c, Box::new(normalize(a)), Box::new(normalize(b))),
            }
        }
        Term::Filter(p, x) => match normalize(x) {
            x @ (Term::None | Term::All) => x,
            x => Term::Filter(p.clone(), Box::new(x)),
        },
        Term::CondFilter(p, a, b) => {
            Term::CondFilter(p.clone(), Box::new(normalize(a)), Box::new(normalize(b)))
        }
    }
}

fn concat_n(a: Term, b: Term) -> Term {
    match (a, b) {
        (Term::None, _) | (_, Term::None) => Term::None,
        (Term::Empty, x) | (x, Term::Empty) => x,
        (Term::Concat(x, y), b) => Term::Concat(x, Box::new(concat_n(*y, b))),
        (a, b) => Term::concat(a, b),
    }
}

fn strip_repeat(mut t: Term) -> Term {
    loop {
        t = match t {
            Term::Star(x) | Term::Plus(x) | Term::Optional(x) => *x,
            other => return other,
        };
    }
}

fn flatten_or(t: Term, out: &mut Vec<Term>) {
    match t {
        Term::Or(a, b) => {
            flatten_or(*a, out);
            flatten_or(*b, out);
        }
        t => out.push(t),
    }
}

fn flatten_and(t: Term, out: &mut Vec<Term>) {
    match t {
        Term::And(a, b) => {
            flatten_and(*a, out);
            flatten_and(*b, out);
        }
        t => out.push(t),
    }
}

fn rebuild(mut leaves: Vec<Term>, unit: Term, join: fn(Term, Term) -> Term) -> Term {
    let Some(last) = leaves.pop() else {
        return unit;
    };
    leaves.into_iter().rev().fold(last, |acc, t| join(t, acc))
}
