//! Recursive-descent parser for RML specifications.
//!
//! Concrete syntax:
//!
//! ```text
//! a_match(n) matches {a: n};
//! b_match matches {b: t} with t = 1.0;
//! not_abcd not matches a_match | b_match;
//! Main = not_abcd* {let n; a_match(n) B<n>};
//! B<n> = if (n > 0) b_match B<n-1> else all;
//! ```
//!
//! Term operators from loosest to tightest: `if`/`>>` (prefix forms that
//! extend as far right as possible), `\/`, `/\`, `|` (shuffle), juxtaposition,
//! postfix `? + * !`.

use std::collections::HashMap;
use std::fmt;

use indexmap::IndexMap;
use thiserror::Error;

use crate::ast::*;
use crate::lexer::{tokenize, Tok, Token};
use crate::value::Value;

#[derive(Debug, Clone, PartialEq, Error)]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub message: String,
    pub expected: Vec<String>,
}

impl ParseError {
    pub fn new(line: usize, col: usize, message: impl Into<String>, expected: Vec<String>) -> Self {
        Self {
            line,
            col,
            message: message.into(),
            expected,
        }
    }

    /// `file:line:col: message`
    pub fn render(&self, file: &str) -> String {
        format!("{file}:{self}")
    }
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}: {}", self.line, self.col, self.message)?;
        if !self.expected.is_empty() {
            write!(f, " (expected {})", self.expected.join(", "))?;
        }
        Ok(())
    }
}

const KEYWORDS: &[&str] = &[
    "empty", "all", "none", "let", "if", "else", "matches", "not", "with", "true", "false",
];

pub fn parse_specification(text: &str) -> Result<Specification, ParseError> {
    let tokens = tokenize(text)?;
    let (events, defs) = scan_item_arities(&tokens);
    let mut p = Parser {
        tokens,
        pos: 0,
        event_names: events.into_iter().map(|(k, n)| (k, Some(n))).collect(),
        def_arity: defs,
    };
    p.specification()
}

/// Parses a standalone term against a set of known event-type names.
pub fn parse_term(text: &str, event_names: &[&str]) -> Result<Term, ParseError> {
    let mut p = Parser {
        tokens: tokenize(text)?,
        pos: 0,
        event_names: event_names.iter().map(|s| (s.to_string(), None)).collect(),
        def_arity: HashMap::new(),
    };
    let t = p.term()?;
    p.expect(Tok::Eof, "end of input")?;
    Ok(t)
}

/// Parses a standalone data expression.
pub fn parse_data_expr(text: &str) -> Result<DataExpr, ParseError> {
    let mut p = Parser {
        tokens: tokenize(text)?,
        pos: 0,
        event_names: HashMap::new(),
        def_arity: HashMap::new(),
    };
    let e = p.data_expr(0)?;
    p.expect(Tok::Eof, "end of input")?;
    Ok(e)
}

/// Event-type and definition names are collected up front, with their
/// arities, so that `name(...)` in a term can be told apart from `name`
/// followed by a parenthesized term.
fn scan_item_arities(tokens: &[Token]) -> (HashMap<String, usize>, HashMap<String, usize>) {
    let mut events = HashMap::new();
    let mut defs = HashMap::new();
    let mut depth = 0i32;
    let mut item_start = true;
    let tok = |j: usize| tokens.get(j).map(|t| &t.tok);
    for i in 0..tokens.len() {
        if item_start && depth == 0 {
            if let Some(Tok::Ident(name)) = tok(i) {
                let mut j = i + 1;
                let mut arity = 0;
                if let Some(open @ (Tok::LParen | Tok::Lt)) = tok(j) {
                    let close = if *open == Tok::LParen { Tok::RParen } else { Tok::Gt };
                    j += 1;
                    // `A<n>= ...` lexes its closing angle and `=` together as `>=`
                    while j < tokens.len() && tokens[j].tok != close && tokens[j].tok != Tok::Ge {
                        if matches!(tokens[j].tok, Tok::Ident(_)) {
                            arity += 1;
                        }
                        j += 1;
                    }
                    if tok(j) != Some(&Tok::Ge) {
                        j += 1;
                    }
                }
                match tok(j) {
                    Some(Tok::Ident(kw)) if kw == "matches" || kw == "not" => {
                        events.insert(name.clone(), arity);
                    }
                    Some(Tok::Assign | Tok::Ge) => {
                        defs.insert(name.clone(), arity);
                    }
                    _ => {}
                }
            }
        }
        item_start = false;
        match tokens[i].tok {
            Tok::LParen | Tok::LBrace | Tok::LBracket => depth += 1,
            Tok::RParen | Tok::RBrace | Tok::RBracket => depth -= 1,
            Tok::Semi if depth == 0 => item_start = true,
            _ => {}
        }
    }
    (events, defs)
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
    /// Known event types; `None` arity means unknown, so arguments are parsed if present.
    event_names: HashMap<String, Option<usize>>,
    def_arity: HashMap<String, usize>,
}

type PResult<T> = Result<T, ParseError>;

impl Parser {
    fn peek(&self) -> &Tok {
        &self.tokens[self.pos].tok
    }

    fn peek_at(&self, k: usize) -> &Tok {
        let i = (self.pos + k).min(self.tokens.len() - 1);
        &self.tokens[i].tok
    }

    fn advance(&mut self) -> Tok {
        let t = self.tokens[self.pos].tok.clone();
        if self.pos < self.tokens.len() - 1 {
            self.pos += 1;
        }
        t
    }

    fn error(&self, message: impl Into<String>, expected: &[&str]) -> ParseError {
        let t = &self.tokens[self.pos];
        ParseError::new(
            t.line,
            t.col,
            message,
            expected.iter().map(|s| s.to_string()).collect(),
        )
    }

    fn unexpected(&self, expected: &[&str]) -> ParseError {
        self.error(format!("unexpected {}", self.peek()), expected)
    }

    fn eat(&mut self, tok: &Tok) -> bool {
        if self.peek() == tok {
            self.advance();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, tok: Tok, what: &str) -> PResult<()> {
        if self.eat(&tok) {
            Ok(())
        } else {
            Err(self.unexpected(&[what]))
        }
    }

    fn is_keyword(&self, kw: &str) -> bool {
        matches!(self.peek(), Tok::Ident(s) if s == kw)
    }

    fn eat_keyword(&mut self, kw: &str) -> bool {
        if self.is_keyword(kw) {
            self.advance();
            true
        } else {
            false
        }
    }

    /// Closing `>` of a generic; splits `>=` and `>>` so `A<n>= ...` lexes sensibly.
    fn expect_close_angle(&mut self) -> PResult<()> {
        let rest = match self.peek() {
            Tok::Gt => None,
            Tok::Ge => Some(Tok::Assign),
            Tok::Filter => Some(Tok::Gt),
            _ => return Err(self.unexpected(&["`>`"])),
        };
        match rest {
            None => {
                self.advance();
            }
            Some(t) => {
                self.tokens[self.pos].tok = t;
                self.tokens[self.pos].col += 1;
            }
        }
        Ok(())
    }

    fn ident(&mut self, what: &str) -> PResult<String> {
        match self.peek().clone() {
            Tok::Ident(s) if !KEYWORDS.contains(&s.as_str()) => {
                self.advance();
                Ok(s)
            }
            _ => Err(self.unexpected(&[what])),
        }
    }

    fn ident_list(&mut self, close: Tok, close_name: &str) -> PResult<Vec<String>> {
        let mut out = Vec::new();
        if self.peek() == &close {
            self.advance();
            return Ok(out);
        }
        loop {
            out.push(self.ident("identifier")?);
            if self.eat(&Tok::Comma) {
                continue;
            }
            if close == Tok::Gt {
                self.expect_close_angle()?;
            } else {
                self.expect(close, close_name)?;
            }
            return Ok(out);
        }
    }

    // ---- items ----

    fn specification(&mut self) -> PResult<Specification> {
        let mut event_types: Vec<EventTypeDecl> = Vec::new();
        let mut definitions: IndexMap<String, Definition> = IndexMap::new();
        let mut main: Option<Term> = None;

        while self.peek() != &Tok::Eof {
            let (line, col) = (self.tokens[self.pos].line, self.tokens[self.pos].col);
            let name = self.ident("event type or definition name")?;
            let mut params = Vec::new();
            let mut angle = false;
            if self.eat(&Tok::Lt) {
                angle = true;
                params = self.ident_list(Tok::Gt, "`>`")?;
            } else if self.eat(&Tok::LParen) {
                params = self.ident_list(Tok::RParen, "`)`")?;
            }
            if !angle && (self.is_keyword("matches") || self.is_keyword("not")) {
                let decl = self.event_type_decl(name, params)?;
                if event_types.iter().any(|d| d.name == decl.name) {
                    return Err(ParseError::new(
                        line,
                        col,
                        format!("duplicate event type `{}`", decl.name),
                        vec![],
                    ));
                }
                event_types.push(decl);
            } else {
                self.expect(Tok::Assign, "`=`, `matches` or `not matches`")?;
                let body = self.term()?;
                if name == "Main" {
                    if main.is_some() {
                        return Err(ParseError::new(
                            line,
                            col,
                            "duplicate definition `Main`",
                            vec![],
                        ));
                    }
                    if !params.is_empty() {
                        return Err(ParseError::new(
                            line,
                            col,
                            "`Main` cannot take parameters",
                            vec![],
                        ));
                    }
                    main = Some(body);
                } else {
                    if definitions.contains_key(&name) {
                        return Err(ParseError::new(
                            line,
                            col,
                            format!("duplicate definition `{name}`"),
                            vec![],
                        ));
                    }
                    definitions.insert(name, Definition { params, body });
                }
            }
            if !self.eat(&Tok::Semi) && self.peek() != &Tok::Eof {
                return Err(self.unexpected(&["`;`"]));
            }
        }
        let main = main.ok_or_else(|| self.error("missing `Main` definition", &["`Main = ...;`"]))?;
        Ok(Specification {
            event_types,
            definitions,
            main,
        })
    }

    fn event_type_decl(&mut self, name: String, params: Vec<String>) -> PResult<EventTypeDecl> {
        let negated = self.eat_keyword("not");
        if !self.eat_keyword("matches") {
            return Err(self.unexpected(&["`matches`"]));
        }
        let body = if self.peek() == &Tok::LBrace {
            EventTypeBody::Object(self.object_pattern()?)
        } else {
            let mut ds = vec![self.disjunct()?];
            while self.eat(&Tok::Bar) {
                ds.push(self.disjunct()?);
            }
            EventTypeBody::Disjuncts(ds)
        };
        let guard = if self.eat_keyword("with") {
            Some(self.data_expr(0)?)
        } else {
            None
        };
        Ok(EventTypeDecl {
            name,
            params,
            negated,
            body,
            guard,
        })
    }

    fn disjunct(&mut self) -> PResult<DisjunctPattern> {
        let name = self.ident("event type name")?;
        let mut args = Vec::new();
        let takes_args = self.event_names.get(&name) != Some(&Some(0));
        if takes_args && self.eat(&Tok::LParen) && !self.eat(&Tok::RParen) {
            loop {
                args.push(self.value_pattern()?);
                if !self.eat(&Tok::Comma) {
                    break;
                }
            }
            self.expect(Tok::RParen, "`)`")?;
        }
        Ok(DisjunctPattern { name, args })
    }

    fn object_pattern(&mut self) -> PResult<Vec<(String, ValuePattern)>> {
        self.expect(Tok::LBrace, "`{`")?;
        let mut fields = Vec::new();
        if self.eat(&Tok::RBrace) {
            return Ok(fields);
        }
        loop {
            let key = match self.advance() {
                Tok::Ident(s) => s,
                Tok::Str(s) => s,
                _ => {
                    self.pos -= 1;
                    return Err(self.unexpected(&["key"]));
                }
            };
            self.expect(Tok::Colon, "`:`")?;
            fields.push((key, self.value_pattern()?));
            if !self.eat(&Tok::Comma) {
                break;
            }
        }
        self.expect(Tok::RBrace, "`}`")?;
        Ok(fields)
    }

    fn value_pattern(&mut self) -> PResult<ValuePattern> {
        match self.peek().clone() {
            Tok::Underscore => {
                self.advance();
                Ok(ValuePattern::Wildcard)
            }
            Tok::LBrace => Ok(ValuePattern::Object(self.object_pattern()?)),
            Tok::LBracket => {
                self.advance();
                let mut items = Vec::new();
                let mut ellipsis = false;
                if !self.eat(&Tok::RBracket) {
                    loop {
                        if self.eat(&Tok::Ellipsis) {
                            ellipsis = true;
                            break;
                        }
                        items.push(self.value_pattern()?);
                        if !self.eat(&Tok::Comma) {
                            break;
                        }
                    }
                    self.expect(Tok::RBracket, "`]`")?;
                }
                Ok(ValuePattern::Array { items, ellipsis })
            }
            Tok::Ident(ref s) if s != "true" && s != "false" => {
                Ok(ValuePattern::Var(self.ident("variable")?))
            }
            _ => Ok(ValuePattern::Lit(self.literal()?)),
        }
    }

    fn literal(&mut self) -> PResult<Value> {
        match self.peek().clone() {
            Tok::Number(n) => {
                self.advance();
                Ok(Value::num(n))
            }
            Tok::Minus => {
                if let Tok::Number(n) = self.peek_at(1).clone() {
                    self.advance();
                    self.advance();
                    Ok(Value::num(-n))
                } else {
                    Err(self.unexpected(&["literal"]))
                }
            }
            Tok::Str(s) => {
                self.advance();
                Ok(Value::Str(s))
            }
            Tok::Ident(s) if s == "true" || s == "false" => {
                self.advance();
                Ok(Value::Bool(s == "true"))
            }
            _ => Err(self.unexpected(&["literal"])),
        }
    }

    // ---- terms ----

    pub(crate) fn term(&mut self) -> PResult<Term> {
        self.union()
    }

    fn union(&mut self) -> PResult<Term> {
        let mut l = self.intersection()?;
        while self.eat(&Tok::Union) {
            let r = self.intersection()?;
            l = Term::or(l, r);
        }
        Ok(l)
    }

    fn intersection(&mut self) -> PResult<Term> {
        let mut l = self.shuffle()?;
        while self.eat(&Tok::Inter) {
            let r = self.shuffle()?;
            l = Term::and(l, r);
        }
        Ok(l)
    }

    fn shuffle(&mut self) -> PResult<Term> {
        let mut l = self.concat()?;
        while self.eat(&Tok::Bar) {
            let r = self.concat()?;
            l = Term::shuffle(l, r);
        }
        Ok(l)
    }

    fn starts_term(&self) -> bool {
        match self.peek() {
            Tok::LParen | Tok::LBrace => true,
            Tok::Ident(s) => !matches!(s.as_str(), "else" | "matches" | "not" | "with"),
            _ => false,
        }
    }

    /// True when the upcoming tokens are `etp >>`.
    fn at_filter(&self) -> bool {
        let Tok::Ident(name) = self.peek() else {
            return false;
        };
        let Some(arity) = self.event_names.get(name) else {
            return false;
        };
        let mut k = 1;
        if self.peek_at(k) == &Tok::LParen && *arity != Some(0) {
            let mut depth = 0;
            loop {
                match self.peek_at(k) {
                    Tok::LParen => depth += 1,
                    Tok::RParen => {
                        depth -= 1;
                        if depth == 0 {
                            break;
                        }
                    }
                    Tok::Eof => return false,
                    _ => {}
                }
                k += 1;
            }
            k += 1;
        }
        self.peek_at(k) == &Tok::Filter
    }

    fn concat(&mut self) -> PResult<Term> {
        let mut items = Vec::new();
        loop {
            if self.is_keyword("if") {
                items.push(self.if_else()?);
                break;
            }
            if self.at_filter() {
                items.push(self.filter()?);
                break;
            }
            if items.is_empty() || self.starts_term() {
                items.push(self.postfix()?);
            } else {
                break;
            }
        }
        let mut it = items.into_iter();
        let first = it.next().expect("at least one item");
        Ok(it.fold(first, Term::concat))
    }

    fn if_else(&mut self) -> PResult<Term> {
        self.advance(); // if
        self.expect(Tok::LParen, "`(`")?;
        let cond = self.data_expr(0)?;
        self.expect(Tok::RParen, "`)`")?;
        let then = self.term()?;
        if !self.eat_keyword("else") {
            return Err(self.unexpected(&["`else`"]));
        }
        let otherwise = self.term()?;
        Ok(Term::IfElse(cond, Box::new(then), Box::new(otherwise)))
    }

    fn filter(&mut self) -> PResult<Term> {
        let pat = self.event_pattern()?;
        self.expect(Tok::Filter, "`>>`")?;
        let then = self.term()?;
        if self.eat(&Tok::Colon) {
            let otherwise = self.term()?;
            Ok(Term::CondFilter(pat, Box::new(then), Box::new(otherwise)))
        } else {
            Ok(Term::Filter(pat, Box::new(then)))
        }
    }

    fn postfix(&mut self) -> PResult<Term> {
        let mut t = self.primary()?;
        loop {
            t = match self.peek() {
                Tok::Question => Term::Optional(Box::new(t)),
                Tok::Plus => Term::Plus(Box::new(t)),
                Tok::Star => Term::Star(Box::new(t)),
                Tok::Bang => Term::Closure(Box::new(t)),
                _ => return Ok(t),
            };
            self.advance();
        }
    }

    fn event_pattern(&mut self) -> PResult<EventPattern> {
        let name = self.ident("event type name")?;
        let mut args = Vec::new();
        let takes_args = self.event_names.get(&name) != Some(&Some(0));
        if takes_args && self.eat(&Tok::LParen) && !self.eat(&Tok::RParen) {
            loop {
                args.push(match self.peek().clone() {
                    Tok::Underscore => {
                        self.advance();
                        EventArg::Wildcard
                    }
                    Tok::Ident(s) if s != "true" && s != "false" => {
                        EventArg::Var(self.ident("variable")?)
                    }
                    _ => EventArg::Lit(self.literal()?),
                });
                if !self.eat(&Tok::Comma) {
                    break;
                }
            }
            self.expect(Tok::RParen, "`)`")?;
        }
        Ok(EventPattern { name, args })
    }

    fn primary(&mut self) -> PResult<Term> {
        match self.peek().clone() {
            Tok::LParen => {
                self.advance();
                let t = self.term()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(t)
            }
            Tok::LBrace => {
                self.advance();
                if !self.eat_keyword("let") {
                    return Err(self.unexpected(&["`let`"]));
                }
                let mut vars = vec![self.ident("variable")?];
                while self.eat(&Tok::Comma) {
                    vars.push(self.ident("variable")?);
                }
                self.expect(Tok::Semi, "`;`")?;
                let body = self.term()?;
                self.expect(Tok::RBrace, "`}`")?;
                Ok(Term::Let(vars, Box::new(body)))
            }
            Tok::Ident(s) => match s.as_str() {
                "empty" => {
                    self.advance();
                    Ok(Term::Empty)
                }
                "all" => {
                    self.advance();
                    Ok(Term::All)
                }
                "none" => {
                    self.advance();
                    Ok(Term::None)
                }
                _ if self.event_names.contains_key(&s) => Ok(Term::Event(self.event_pattern()?)),
                _ => {
                    let name = self.ident("term")?;
                    if self.def_arity.get(&name) == Some(&0) {
                        Ok(Term::DefRef(name))
                    } else if self.eat(&Tok::Lt) {
                        let args = self.generic_args(true)?;
                        Ok(Term::Generic(name, args))
                    } else if self.eat(&Tok::LParen) {
                        let args = self.generic_args(false)?;
                        Ok(Term::Generic(name, args))
                    } else {
                        Ok(Term::DefRef(name))
                    }
                }
            },
            _ => Err(self.unexpected(&["term"])),
        }
    }

    fn generic_args(&mut self, angle: bool) -> PResult<Vec<DataExpr>> {
        let mut args = Vec::new();
        // inside `<...>` comparisons need parentheses
        let min_prec = if angle { 5 } else { 0 };
        loop {
            args.push(self.data_expr(min_prec)?);
            if !self.eat(&Tok::Comma) {
                break;
            }
        }
        if angle {
            self.expect_close_angle()?;
        } else {
            self.expect(Tok::RParen, "`)`")?;
        }
        Ok(args)
    }

    // ---- data expressions ----

    fn binary_op(&self) -> Option<BinaryOp> {
        Some(match self.peek() {
            Tok::Plus => BinaryOp::Add,
            Tok::Minus => BinaryOp::Sub,
            Tok::Star => BinaryOp::Mul,
            Tok::Slash => BinaryOp::Div,
            Tok::Lt => BinaryOp::Lt,
            Tok::Gt => BinaryOp::Gt,
            Tok::Le => BinaryOp::Le,
            Tok::Ge => BinaryOp::Ge,
            Tok::EqEq | Tok::Assign => BinaryOp::Eq,
            Tok::Ne => BinaryOp::Ne,
            Tok::AndAnd => BinaryOp::And,
            Tok::OrOr => BinaryOp::Or,
            _ => return None,
        })
    }

    /// Precedence climbing; only operators binding at least `min_prec` are consumed.
    fn data_expr(&mut self, min_prec: u8) -> PResult<DataExpr> {
        let mut lhs = self.data_unary()?;
        while let Some(op) = self.binary_op() {
            let prec = op.precedence();
            if prec < min_prec {
                break;
            }
            self.advance();
            let rhs = self.data_expr(prec + 1)?;
            lhs = DataExpr::binary(op, lhs, rhs);
        }
        Ok(lhs)
    }

    fn data_unary(&mut self) -> PResult<DataExpr> {
        match self.peek().clone() {
            Tok::Minus => {
                if let Tok::Number(n) = self.peek_at(1).clone() {
                    self.advance();
                    self.advance();
                    return Ok(DataExpr::num(-n));
                }
                self.advance();
                Ok(DataExpr::Unary(UnaryOp::Neg, Box::new(self.data_unary()?)))
            }
            Tok::Bang => {
                self.advance();
                Ok(DataExpr::Unary(UnaryOp::Not, Box::new(self.data_unary()?)))
            }
            Tok::LParen => {
                self.advance();
                let e = self.data_expr(0)?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(e)
            }
            Tok::Ident(s) if s != "true" && s != "false" => {
                Ok(DataExpr::Var(self.ident("variable")?))
            }
            Tok::Number(_) | Tok::Str(_) | Tok::Ident(_) => Ok(DataExpr::Lit(self.literal()?)),
            _ => Err(self.unexpected(&["data expression"])),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ev(name: &str) -> Term {
        Term::event(name)
    }

    #[test]
    fn smallest_spec() {
        let s = parse_specification("Main = empty;").unwrap();
        assert_eq!(s.main, Term::Empty);
        assert!(s.event_types.is_empty());
        assert!(s.definitions.is_empty());
    }

    #[test]
    fn counting_spec_structure() {
        let s = parse_specification(crate::corpus::COUNTING).unwrap();
        assert_eq!(s.main, Term::generic("A", vec![DataExpr::num(1.0)]));
        let names: Vec<_> = s.definitions.keys().cloned().collect();
        assert_eq!(names, vec!["A", "B"]);
        let a = &s.definitions["A"];
        assert_eq!(a.params, vec!["n"]);
        let n = || DataExpr::var("n");
        assert_eq!(
            a.body,
            Term::concat(
                ev("a"),
                Term::or(
                    Term::generic(
                        "A",
                        vec![DataExpr::binary(BinaryOp::Add, n(), DataExpr::num(1.0))]
                    ),
                    Term::generic(
                        "B",
                        vec![DataExpr::binary(BinaryOp::Sub, n(), DataExpr::num(1.0))]
                    ),
                )
            )
        );
    }

    #[test]
    fn numerical_spec_declarations() {
        let s = parse_specification(crate::corpus::NUMERICAL).unwrap();
        assert_eq!(s.event_types.len(), 5);
        assert_eq!(s.event_types[0].params, vec!["n"]);
        let not = &s.event_types[4];
        assert!(not.negated);
        assert!(matches!(&not.body, EventTypeBody::Disjuncts(d) if d.len() == 4));
        assert!(s.event_types[1].guard.is_some());
        let names: Vec<_> = s.definitions.keys().cloned().collect();
        assert_eq!(names, vec!["B", "C", "D"]);
    }

    #[test]
    fn if_else_is_a_trailing_concat_item() {
        let s = parse_specification(crate::corpus::CONDITIONAL_EXAMPLE).unwrap();
        let Term::Concat(a, rest) = &s.main else {
            panic!("{:?}", s.main)
        };
        assert_eq!(**a, ev("a"));
        let Term::Let(vars, body) = &**rest else {
            panic!()
        };
        assert_eq!(vars, &vec!["n".to_string()]);
        assert!(matches!(&**body, Term::Concat(_, r) if matches!(**r, Term::IfElse(..))));
    }

    #[test]
    fn precedence_levels() {
        let t = parse_term("a b | c /\\ d \\/ e*", &["a", "b", "c", "d", "e"]).unwrap();
        assert_eq!(
            t,
            Term::or(
                Term::and(
                    Term::shuffle(Term::concat(ev("a"), ev("b")), ev("c")),
                    ev("d")
                ),
                Term::star(ev("e"))
            )
        );
    }

    #[test]
    fn filters() {
        let t = parse_term("x(1) >> a : b", &["x", "a", "b"]).unwrap();
        assert!(matches!(t, Term::CondFilter(ref p, _, _) if p.args == vec![EventArg::Lit(Value::num(1.0))]));
        let t = parse_term("a x >> b*", &["x", "a", "b"]).unwrap();
        assert!(matches!(t, Term::Concat(_, ref f) if matches!(**f, Term::Filter(..))));
    }

    #[test]
    fn generic_close_angle_split() {
        let s = parse_specification("Main = A<1>; A<n>= empty;").unwrap();
        assert_eq!(s.definitions["A"].params, vec!["n"]);
    }

    #[test]
    fn errors_carry_position_and_expectations() {
        let e = parse_specification("Main = a\n  (b;").unwrap_err();
        assert_eq!(e.line, 2);
        assert!(e.expected.iter().any(|x| x.contains(')')), "{e}");
        assert!(e.render("x.rml").starts_with("x.rml:2:"));

        let e = parse_specification("Main = empty; Main = all;").unwrap_err();
        assert!(e.message.contains("duplicate definition"));
        let e = parse_specification("a matches {x: 1}; a matches {y: 1}; Main = a;").unwrap_err();
        assert!(e.message.contains("duplicate event type"));
        let e = parse_specification("A = empty;").unwrap_err();
        assert!(e.message.contains("Main"));
    }

    #[test]
    fn patterns() {
        let s = parse_specification(
            "e(x) matches {k: [1, _, ...], o: {p: x}, s: 'str', b: true} with !(x == 2); Main = e(_)*;",
        )
        .unwrap();
        let EventTypeBody::Object(fields) = &s.event_types[0].body else {
            panic!()
        };
        assert_eq!(
            fields[0].1,
            ValuePattern::Array {
                items: vec![ValuePattern::Lit(Value::num(1.0)), ValuePattern::Wildcard],
                ellipsis: true
            }
        );
        assert_eq!(fields[3].1, ValuePattern::Lit(Value::Bool(true)));
    }

    #[test]
    fn never_panics_on_garbage() {
        for src in ["", ";", "Main", "Main =", "Main = (", "Main = {let", "a matches", "Main = A<", "Main = if (x) a"] {
            assert!(parse_specification(src).is_err(), "{src}");
        }
    }
}
