//! Source rendering. `parse_specification(pretty_print(s)) == s` for every
//! specification the parser can produce.

use std::fmt::Write;

use crate::ast::*;
use crate::value::Value;

pub fn pretty_print(spec: &Specification) -> String {
    let mut out = String::new();
    for decl in &spec.event_types {
        out.push_str(&render_decl(decl));
        out.push_str(";\n");
    }
    if !spec.event_types.is_empty() {
        out.push('\n');
    }
    let _ = writeln!(out, "Main = {};", render_term(&spec.main));
    for (name, def) in &spec.definitions {
        if def.params.is_empty() {
            let _ = writeln!(out, "{name} = {};", render_term(&def.body));
        } else {
            let _ = writeln!(
                out,
                "{name}<{}> = {};",
                def.params.join(", "),
                render_term(&def.body)
            );
        }
    }
    out
}

pub fn render_decl(decl: &EventTypeDecl) -> String {
    let mut s = decl.name.clone();
    if !decl.params.is_empty() {
        let _ = write!(s, "({})", decl.params.join(", "));
    }
    s.push_str(if decl.negated { " not matches " } else { " matches " });
    match &decl.body {
        EventTypeBody::Object(fields) => s.push_str(&render_object_pattern(fields)),
        EventTypeBody::Disjuncts(ds) => {
            let parts: Vec<String> = ds
                .iter()
                .map(|d| {
                    if d.args.is_empty() {
                        d.name.clone()
                    } else {
                        let args: Vec<_> = d.args.iter().map(render_value_pattern).collect();
                        format!("{}({})", d.name, args.join(", "))
                    }
                })
                .collect();
            s.push_str(&parts.join(" | "));
        }
    }
    if let Some(g) = &decl.guard {
        let _ = write!(s, " with {}", render_data(g));
    }
    s
}

fn render_key(k: &str) -> String {
    let is_ident = k
        .chars()
        .next()
        .is_some_and(|c| c.is_ascii_alphabetic() || c == '_')
        && k.chars().all(|c| c.is_ascii_alphanumeric() || c == '_')
        && k != "_";
    if is_ident {
        k.to_string()
    } else {
        render_value(&Value::Str(k.to_string()))
    }
}

fn render_object_pattern(fields: &[(String, ValuePattern)]) -> String {
    let parts: Vec<String> = fields
        .iter()
        .map(|(k, p)| format!("{}: {}", render_key(k), render_value_pattern(p)))
        .collect();
    format!("{{{}}}", parts.join(", "))
}

fn render_value_pattern(p: &ValuePattern) -> String {
    match p {
        ValuePattern::Var(x) => x.clone(),
        ValuePattern::Lit(v) => render_value(v),
        ValuePattern::Object(fields) => render_object_pattern(fields),
        ValuePattern::Array { items, ellipsis } => {
            let mut parts: Vec<String> = items.iter().map(render_value_pattern).collect();
            if *ellipsis {
                parts.push("...".into());
            }
            format!("[{}]", parts.join(", "))
        }
        ValuePattern::Wildcard => "_".into(),
    }
}

/// Literal rendering. Object and array values only arise in residual
/// monitor states (from bound variables) and are rendered for identity only.
pub fn render_value(v: &Value) -> String {
    v.to_string()
}

pub fn render_data(e: &DataExpr) -> String {
    let mut s = String::new();
    write_data(&mut s, e, 0);
    s
}

fn write_data(out: &mut String, e: &DataExpr, min_prec: u8) {
    match e {
        DataExpr::Var(x) => out.push_str(x),
        DataExpr::Lit(v) => out.push_str(&render_value(v)),
        DataExpr::Unary(op, inner) => {
            out.push(match op {
                UnaryOp::Neg => '-',
                UnaryOp::Not => '!',
            });
            // `-1` would re-parse as a literal, and `--x` as nothing sensible
            let needs_parens = !matches!(**inner, DataExpr::Var(_))
                && !matches!(&**inner, DataExpr::Lit(v) if !matches!(v, Value::Num(_)));
            if needs_parens {
                out.push('(');
                write_data(out, inner, 0);
                out.push(')');
            } else {
                write_data(out, inner, 7);
            }
        }
        DataExpr::Binary(op, l, r) => {
            let prec = op.precedence();
            let paren = prec < min_prec;
            if paren {
                out.push('(');
            }
            write_data(out, l, prec);
            let _ = write!(out, " {} ", op.symbol());
            write_data(out, r, prec + 1);
            if paren {
                out.push(')');
            }
        }
    }
}

fn render_event_pattern(p: &EventPattern) -> String {
    if p.args.is_empty() {
        return p.name.clone();
    }
    let args: Vec<String> = p
        .args
        .iter()
        .map(|a| match a {
            EventArg::Var(x) => x.clone(),
            EventArg::Lit(v) => render_value(v),
            EventArg::Wildcard => "_".into(),
        })
        .collect();
    format!("{}({})", p.name, args.join(", "))
}

pub fn render_term(t: &Term) -> String {
    let mut s = String::new();
    write_term(&mut s, t, Level::Top, true);
    s
}

/// Syntactic level a subterm is printed at; higher binds tighter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Level {
    Top,
    Union,
    Inter,
    Shuffle,
    Concat,
    Postfix,
}

fn level_of(t: &Term) -> Level {
    match t {
        Term::IfElse(..) | Term::Filter(..) | Term::CondFilter(..) => Level::Top,
        Term::Or(..) => Level::Union,
        Term::And(..) => Level::Inter,
        Term::Shuffle(..) => Level::Shuffle,
        Term::Concat(..) => Level::Concat,
        _ => Level::Postfix,
    }
}

/// `tail` means nothing follows this subterm before a closing delimiter,
/// so a prefix form (`if`, `>>`) may be printed without parentheses.
fn write_term(out: &mut String, t: &Term, min: Level, tail: bool) {
    let lvl = level_of(t);
    let bare = if lvl == Level::Top { tail } else { lvl >= min };
    if !bare {
        out.push('(');
        write_term(out, t, Level::Top, true);
        out.push(')');
        return;
    }
    let binary = |out: &mut String, a: &Term, b: &Term, op: &str, lvl: Level, next: Level| {
        write_term(out, a, lvl, false);
        out.push_str(op);
        write_term(out, b, next, tail);
    };
    match t {
        Term::Empty => out.push_str("empty"),
        Term::All => out.push_str("all"),
        Term::None => out.push_str("none"),
        Term::Event(p) => out.push_str(&render_event_pattern(p)),
        Term::DefRef(n) => out.push_str(n),
        Term::Generic(n, args) => {
            let args: Vec<String> = args
                .iter()
                .map(|a| {
                    let mut s = String::new();
                    // comparisons inside `<...>` must be parenthesized
                    write_data(&mut s, a, 5);
                    s
                })
                .collect();
            let _ = write!(out, "{n}<{}>", args.join(", "));
        }
        Term::Or(a, b) => binary(out, a, b, " \\/ ", Level::Union, Level::Inter),
        Term::And(a, b) => binary(out, a, b, " /\\ ", Level::Inter, Level::Shuffle),
        Term::Shuffle(a, b) => binary(out, a, b, " | ", Level::Shuffle, Level::Concat),
        Term::Concat(a, b) => binary(out, a, b, " ", Level::Concat, Level::Postfix),
        Term::Let(vars, body) => {
            let _ = write!(out, "{{let {}; ", vars.join(", "));
            write_term(out, body, Level::Top, true);
            out.push('}');
        }
        Term::Optional(x) | Term::Plus(x) | Term::Star(x) | Term::Closure(x) => {
            write_term(out, x, Level::Postfix, false);
            out.push(match t {
                Term::Optional(_) => '?',
                Term::Plus(_) => '+',
                Term::Star(_) => '*',
                _ => '!',
            });
        }
        Term::IfElse(c, a, b) => {
            let _ = write!(out, "if ({}) ", render_data(c));
            write_term(out, a, Level::Top, false);
            out.push_str(" else ");
            write_term(out, b, Level::Top, tail);
        }
        Term::Filter(p, body) => {
            let _ = write!(out, "{} >> ", render_event_pattern(p));
            write_term(out, body, Level::Top, tail);
        }
        Term::CondFilter(p, a, b) => {
            let _ = write!(out, "{} >> ", render_event_pattern(p));
            write_term(out, a, Level::Top, false);
            out.push_str(" : ");
            write_term(out, b, Level::Top, tail);
        }
    }
}
