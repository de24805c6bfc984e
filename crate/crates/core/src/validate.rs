//! Static checks over a parsed specification.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use crate::ast::*;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SemanticError {
    UndefinedIdentifier(String),
    ArityMismatch {
        name: String,
        expected: usize,
        got: usize,
    },
    /// A data expression reads a variable that no enclosing scope binds first.
    UnboundVariable { var: String, site: String },
    /// A declaration parameter that its patterns never bind.
    UnusedParameter { event_type: String, param: String },
    DuplicateParameter { site: String, param: String },
    /// A definition name that is also an event-type name.
    AmbiguousName(String),
    CyclicEventType(String),
}

impl fmt::Display for SemanticError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SemanticError::UndefinedIdentifier(n) => write!(f, "undefined identifier `{n}`"),
            SemanticError::ArityMismatch {
                name,
                expected,
                got,
            } => write!(f, "`{name}` expects {expected} argument(s), got {got}"),
            SemanticError::UnboundVariable { var, site } => {
                write!(f, "variable `{var}` is not bound in {site}")
            }
            SemanticError::UnusedParameter { event_type, param } => {
                write!(f, "parameter `{param}` of `{event_type}` is never bound by its pattern")
            }
            SemanticError::DuplicateParameter { site, param } => {
                write!(f, "parameter `{param}` declared twice in {site}")
            }
            SemanticError::AmbiguousName(n) => {
                write!(f, "`{n}` names both an event type and a definition")
            }
            SemanticError::CyclicEventType(n) => {
                write!(f, "event type `{n}` refers to itself through its disjuncts")
            }
        }
    }
}

/// Returns every semantic error; an empty list means the specification is valid.
pub fn validate(spec: &Specification) -> Vec<SemanticError> {
    let mut v = Validator {
        spec,
        errors: Vec::new(),
    };
    v.event_types();
    for (name, def) in &spec.definitions {
        if spec.event_type(name).is_some() {
            v.push(SemanticError::AmbiguousName(name.clone()));
        }
        v.duplicates(&def.params, name);
        let scope: BTreeSet<String> = def.params.iter().cloned().collect();
        v.term(&def.body, &scope, &scope, name);
    }
    v.term(&spec.main, &BTreeSet::new(), &BTreeSet::new(), "Main");
    v.errors
}

struct Validator<'a> {
    spec: &'a Specification,
    errors: Vec<SemanticError>,
}

impl Validator<'_> {
    fn push(&mut self, e: SemanticError) {
        if !self.errors.contains(&e) {
            self.errors.push(e);
        }
    }

    fn duplicates(&mut self, params: &[String], site: &str) {
        for (i, p) in params.iter().enumerate() {
            if params[..i].contains(p) {
                self.push(SemanticError::DuplicateParameter {
                    site: site.to_string(),
                    param: p.clone(),
                });
            }
        }
    }

    fn event_types(&mut self) {
        for decl in &self.spec.event_types {
            self.duplicates(&decl.params, &decl.name);
            let mut bound = decl.pattern_vars();
            if let EventTypeBody::Disjuncts(ds) = &decl.body {
                for d in ds {
                    match self.spec.event_type(&d.name) {
                        None => self.push(SemanticError::UndefinedIdentifier(d.name.clone())),
                        Some(target) => {
                            if !d.args.is_empty() && d.args.len() != target.params.len() {
                                self.push(SemanticError::ArityMismatch {
                                    name: d.name.clone(),
                                    expected: target.params.len(),
                                    got: d.args.len(),
                                });
                            }
                        }
                    }
                }
                if self.reaches(&decl.name, &decl.name, &mut BTreeSet::new()) {
                    self.push(SemanticError::CyclicEventType(decl.name.clone()));
                }
            }
            // negated declarations produce no bindings, so their parameters are free
            if !decl.negated {
                for p in &decl.params {
                    if !bound.contains(p) {
                        self.push(SemanticError::UnusedParameter {
                            event_type: decl.name.clone(),
                            param: p.clone(),
                        });
                    }
                }
            }
            bound.extend(decl.params.iter().cloned());
            if let Some(g) = &decl.guard {
                let mut vars = Vec::new();
                g.free_vars(&mut vars);
                for var in vars {
                    if !bound.contains(&var) {
                        self.push(SemanticError::UnboundVariable {
                            var,
                            site: format!("the guard of `{}`", decl.name),
                        });
                    }
                }
            }
        }
    }

    fn reaches(&self, from: &str, target: &str, seen: &mut BTreeSet<String>) -> bool {
        let Some(decl) = self.spec.event_type(from) else {
            return false;
        };
        let EventTypeBody::Disjuncts(ds) = &decl.body else {
            return false;
        };
        for d in ds {
            if d.name == target {
                return true;
            }
            if seen.insert(d.name.clone()) && self.reaches(&d.name, target, seen) {
                return true;
            }
        }
        false
    }

    fn data(&mut self, e: &DataExpr, bound: &BTreeSet<String>, site: &str) {
        let mut vars = Vec::new();
        e.free_vars(&mut vars);
        for var in vars {
            if !bound.contains(&var) {
                self.push(SemanticError::UnboundVariable {
                    var,
                    site: site.to_string(),
                });
            }
        }
    }

    fn event_pattern(&mut self, p: &EventPattern, bound: &BTreeSet<String>) -> BTreeSet<String> {
        let mut out = bound.clone();
        match self.spec.event_type(&p.name) {
            None => self.push(SemanticError::UndefinedIdentifier(p.name.clone())),
            Some(decl) => {
                if p.args.len() != decl.params.len() {
                    self.push(SemanticError::ArityMismatch {
                        name: p.name.clone(),
                        expected: decl.params.len(),
                        got: p.args.len(),
                    });
                }
            }
        }
        for a in &p.args {
            if let EventArg::Var(x) = a {
                out.insert(x.clone());
            }
        }
        out
    }

    /// Checks `t` and returns the variables definitely bound after it.
    /// `declared` holds variables introduced by `let` or parameters.
    fn term(
        &mut self,
        t: &Term,
        declared: &BTreeSet<String>,
        bound: &BTreeSet<String>,
        site: &str,
    ) -> BTreeSet<String> {
        match t {
            Term::Empty | Term::All | Term::None => bound.clone(),
            Term::Event(p) => self.event_pattern(p, bound),
            Term::DefRef(name) => {
                match self.spec.definition(name) {
                    Some(def) if !def.params.is_empty() => {
                        self.push(SemanticError::ArityMismatch {
                            name: name.clone(),
                            expected: def.params.len(),
                            got: 0,
                        })
                    }
                    Some(_) => {}
                    None if name == "Main" => {}
                    None => self.push(SemanticError::UndefinedIdentifier(name.clone())),
                }
                bound.clone()
            }
            Term::Generic(name, args) => {
                match self.spec.definition(name) {
                    Some(def) if def.params.len() != args.len() => {
                        self.push(SemanticError::ArityMismatch {
                            name: name.clone(),
                            expected: def.params.len(),
                            got: args.len(),
                        })
                    }
                    Some(_) => {}
                    None => self.push(SemanticError::UndefinedIdentifier(name.clone())),
                }
                for a in args {
                    self.data(a, bound, &format!("the arguments of `{name}` in `{site}`"));
                }
                bound.clone()
            }
            Term::Concat(a, b) => {
                let mid = self.term(a, declared, bound, site);
                self.term(b, declared, &mid, site)
            }
            Term::And(a, b) | Term::Shuffle(a, b) => {
                let x = self.term(a, declared, bound, site);
                let y = self.term(b, declared, bound, site);
                x.union(&y).cloned().collect()
            }
            Term::Or(a, b) => {
                let x = self.term(a, declared, bound, site);
                let y = self.term(b, declared, bound, site);
                x.intersection(&y).cloned().collect()
            }
            Term::Let(vars, body) => {
                self.duplicates(vars, site);
                let mut inner_declared = declared.clone();
                let mut inner_bound = bound.clone();
                for v in vars {
                    inner_declared.insert(v.clone());
                    // shadowing: an inner `let x` starts unbound
                    inner_bound.remove(v);
                }
                let after = self.term(body, &inner_declared, &inner_bound, site);
                let mut out = bound.clone();
                out.extend(after.into_iter().filter(|x| !vars.contains(x)));
                out
            }
            Term::Optional(x) | Term::Star(x) => {
                self.term(x, declared, bound, site);
                bound.clone()
            }
            Term::Plus(x) => self.term(x, declared, bound, site),
            Term::Closure(x) => {
                self.term(x, declared, bound, site);
                bound.clone()
            }
            Term::IfElse(c, a, b) => {
                self.data(c, bound, &format!("an if-else condition in `{site}`"));
                let x = self.term(a, declared, bound, site);
                let y = self.term(b, declared, bound, site);
                x.intersection(&y).cloned().collect()
            }
            Term::Filter(p, body) => {
                self.event_pattern(p, bound);
                self.term(body, declared, bound, site);
                bound.clone()
            }
            Term::CondFilter(p, a, b) => {
                self.event_pattern(p, bound);
                self.term(a, declared, bound, site);
                self.term(b, declared, bound, site);
                bound.clone()
            }
        }
    }
}

/// Convenience: a map from name to arity for every definition.
pub fn definition_arities(spec: &Specification) -> HashMap<&str, usize> {
    spec.definitions
        .iter()
        .map(|(k, d)| (k.as_str(), d.params.len()))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::parse_specification;

    fn errors(src: &str) -> Vec<SemanticError> {
        validate(&parse_specification(src).unwrap())
    }

    #[test]
    fn corpus_is_clean() {
        for (name, text) in crate::corpus::ALL {
            assert_eq!(errors(text), vec![], "{name}");
        }
    }

    #[test]
    fn undefined_identifier() {
        assert_eq!(
            errors("Main = X;"),
            vec![SemanticError::UndefinedIdentifier("X".into())]
        );
    }

    #[test]
    fn generic_arity() {
        assert_eq!(
            errors("a matches {e: 1}; Main = A<1, 2>; A<n> = a;"),
            vec![SemanticError::ArityMismatch {
                name: "A".into(),
                expected: 1,
                got: 2
            }]
        );
    }

    #[test]
    fn unbound_data_variable() {
        let errs = errors("a matches {e: 1}; Main = if (n > 1) a else a;");
        assert_eq!(
            errs,
            vec![SemanticError::UnboundVariable {
                var: "n".into(),
                site: "an if-else condition in `Main`".into()
            }]
        );
        // bound by an earlier event pattern inside the let
        assert!(errors("b(n) matches {v: n}; Main = {let n; b(n) if (n > 1) b(1) else b(2)};").is_empty());
        // the `let` alone is not enough: the condition precedes the binding
        assert!(!errors("b(n) matches {v: n}; Main = {let n; if (n > 1) b(n) else b(2)};").is_empty());
    }

    #[test]
    fn decl_checks() {
        let errs = errors("a(x) matches {e: 1} with y > 0; Main = a(1);");
        assert!(errs.contains(&SemanticError::UnusedParameter {
            event_type: "a".into(),
            param: "x".into()
        }));
        assert!(errs.iter().any(|e| matches!(e, SemanticError::UnboundVariable { var, .. } if var == "y")));
        let errs = errors("a not matches b; b matches a; Main = a;");
        assert!(errs.contains(&SemanticError::CyclicEventType("a".into())));
    }

    #[test]
    fn ambiguous_names() {
        let errs = errors("a matches {e: 1}; Main = a; a = empty;");
        assert_eq!(errs, vec![SemanticError::AmbiguousName("a".into())]);
    }
}
