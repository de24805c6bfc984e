//! Matching observed events against event-type declarations.

use thiserror::Error;

use crate::ast::{EventTypeBody, EventTypeDecl, ValuePattern};
use crate::eval::{eval_data, EvalError};
use crate::printer::render_data;
use crate::value::{Bindings, Event, Value};

const MAX_DEPTH: usize = 64;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MatchError {
    #[error("guard of `{decl}` failed to evaluate: {source}")]
    Guard { decl: String, source: EvalError },
    #[error("guard of `{decl}` is not boolean: `{guard}`")]
    NonBooleanGuard { decl: String, guard: String },
    #[error("unknown event type `{0}`")]
    UnknownEventType(String),
    #[error("event type `{0}` nests too deeply")]
    TooDeep(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct MatchResult {
    pub matched: bool,
    pub bindings: Bindings,
}

impl MatchResult {
    fn no() -> Self {
        Self::default()
    }
}

/// Decides whether `event` matches `decl`. `args[i]`, when present, fixes the
/// value of the i-th parameter before matching. `decls` resolves disjunct
/// references.
pub fn match_event_type(
    decls: &[EventTypeDecl],
    decl: &EventTypeDecl,
    args: &[Option<Value>],
    event: &Event,
    env: &Bindings,
) -> Result<MatchResult, MatchError> {
    match_at(decls, decl, args, event, env, 0)
}

fn match_at(
    decls: &[EventTypeDecl],
    decl: &EventTypeDecl,
    args: &[Option<Value>],
    event: &Event,
    env: &Bindings,
    depth: usize,
) -> Result<MatchResult, MatchError> {
    if depth > MAX_DEPTH {
        return Err(MatchError::TooDeep(decl.name.clone()));
    }
    let mut local = env.clone();
    for (p, a) in decl.params.iter().zip(args) {
        if let Some(v) = a {
            if let Some(old) = local.get(p) {
                if old != v {
                    return Ok(MatchResult::no());
                }
            }
            local.insert(p.clone(), v.clone());
        }
    }

    let body_ok = match &decl.body {
        EventTypeBody::Object(fields) => match_fields(fields, &event.0, &mut local),
        EventTypeBody::Disjuncts(ds) => {
            let mut any = false;
            for d in ds {
                let target = decls
                    .iter()
                    .find(|x| x.name == d.name)
                    .ok_or_else(|| MatchError::UnknownEventType(d.name.clone()))?;
                let r = match_at(decls, target, &[], event, &Bindings::new(), depth + 1)?;
                if !r.matched {
                    continue;
                }
                if decl.negated {
                    any = true;
                    break;
                }
                // unify the disjunct's parameter values with the written patterns
                let mut trial = local.clone();
                let ok = d.args.iter().zip(&target.params).all(|(vp, p)| {
                    r.bindings
                        .get(p)
                        .is_some_and(|v| match_value(vp, v, &mut trial))
                });
                if ok {
                    local = trial;
                    any = true;
                    break;
                }
            }
            any != decl.negated
        }
    };
    if !body_ok {
        return Ok(MatchResult::no());
    }

    if let Some(g) = &decl.guard {
        let v = eval_data(g, &local).map_err(|source| MatchError::Guard {
            decl: decl.name.clone(),
            source,
        })?;
        match v.as_bool() {
            Some(true) => {}
            Some(false) => return Ok(MatchResult::no()),
            None => {
                return Err(MatchError::NonBooleanGuard {
                    decl: decl.name.clone(),
                    guard: render_data(g),
                })
            }
        }
    }

    if decl.negated {
        return Ok(MatchResult {
            matched: true,
            bindings: Bindings::new(),
        });
    }
    let bindings = local
        .into_iter()
        .filter(|(k, _)| !env.contains_key(k))
        .collect();
    Ok(MatchResult {
        matched: true,
        bindings,
    })
}

fn match_fields(
    fields: &[(String, ValuePattern)],
    obj: &std::collections::BTreeMap<String, Value>,
    local: &mut Bindings,
) -> bool {
    let mut trial = local.clone();
    for (k, p) in fields {
        match obj.get(k) {
            Some(v) if match_value(p, v, &mut trial) => {}
            _ => return false,
        }
    }
    *local = trial;
    true
}

/// Matches one value against a pattern, extending `local` on success.
/// On failure `local` may hold partial bindings; callers pass a scratch copy.
pub fn match_value(p: &ValuePattern, v: &Value, local: &mut Bindings) -> bool {
    match p {
        ValuePattern::Wildcard => true,
        ValuePattern::Lit(l) => l == v,
        ValuePattern::Var(x) => match local.get(x) {
            Some(old) => old == v,
            None => {
                local.insert(x.clone(), v.clone());
                true
            }
        },
        ValuePattern::Object(fields) => match v {
            Value::Object(obj) => match_fields(fields, obj, local),
            _ => false,
        },
        ValuePattern::Array { items, ellipsis } => match v {
            Value::Array(xs) => {
                let len_ok = if *ellipsis {
                    xs.len() >= items.len()
                } else {
                    xs.len() == items.len()
                };
                len_ok && items.iter().zip(xs).all(|(p, x)| match_value(p, x, local))
            }
            _ => false,
        },
    }
}

/// The labelling function: every declared type `event` matches, in
/// declaration order, with the bindings each one produced.
pub fn label(
    decls: &[EventTypeDecl],
    event: &Event,
    env: &Bindings,
) -> Result<Vec<(String, Bindings)>, MatchError> {
    let mut out = Vec::new();
    for d in decls {
        let r = match_event_type(decls, d, &[], event, env)?;
        if r.matched {
            out.push((d.name.clone(), r.bindings));
        }
    }
    Ok(out)
}
