//! Brute-force language membership for closed terms over the symbols a, b, c.
//! Written directly from the set semantics of each operator, with no shared
//! code from the monitor.

use proptest::prelude::*;
use rml_core::ast::*;
use rml_core::{parse_specification, Event, Specification, Value};

pub const SYMBOLS: [char; 3] = ['a', 'b', 'c'];

/// Longest word (prefix plus extension) considered for prefix closures.
pub const CLOSURE_HORIZON: usize = 5;

pub fn alphabet_spec(main: Term) -> Specification {
    let mut s = parse_specification(
        "a matches {s: 'a'}; b matches {s: 'b'}; c matches {s: 'c'}; Main = empty;",
    )
    .unwrap();
    s.main = main;
    s
}

pub fn event(c: char) -> Event {
    Event::new().with("s", c.to_string().as_str())
}

pub fn words(max_len: usize) -> Vec<Vec<char>> {
    let mut out = vec![vec![]];
    let mut frontier = vec![vec![]];
    for _ in 0..max_len {
        let mut next = Vec::new();
        for w in &frontier {
            for c in SYMBOLS {
                let mut v: Vec<char> = w.clone();
                v.push(c);
                next.push(v);
            }
        }
        out.extend(next.iter().cloned());
        frontier = next;
    }
    out
}

fn cond_value(c: &DataExpr) -> bool {
    let num = |e: &DataExpr| match e {
        DataExpr::Lit(Value::Num(n)) => n.0,
        _ => panic!("oracle supports numeric literal comparisons only"),
    };
    match c {
        DataExpr::Lit(Value::Bool(b)) => *b,
        DataExpr::Binary(BinaryOp::Lt, l, r) => num(l) < num(r),
        DataExpr::Binary(BinaryOp::Gt, l, r) => num(l) > num(r),
        DataExpr::Binary(BinaryOp::Eq, l, r) => num(l) == num(r),
        _ => panic!("unsupported condition {c:?}"),
    }
}

fn sym(p: &EventPattern) -> char {
    p.name.chars().next().unwrap()
}

pub fn accepts(t: &Term, w: &[char]) -> bool {
    match t {
        Term::Empty => w.is_empty(),
        Term::All => true,
        Term::None => false,
        Term::Event(p) => w.len() == 1 && w[0] == sym(p),
        Term::Concat(x, y) => (0..=w.len()).any(|i| accepts(x, &w[..i]) && accepts(y, &w[i..])),
        Term::Or(x, y) => accepts(x, w) || accepts(y, w),
        Term::And(x, y) => accepts(x, w) && accepts(y, w),
        Term::Shuffle(x, y) => (0u32..1 << w.len()).any(|mask| {
            let (mut l, mut r) = (Vec::new(), Vec::new());
            for (i, c) in w.iter().enumerate() {
                if mask & (1 << i) != 0 {
                    l.push(*c)
                } else {
                    r.push(*c)
                }
            }
            accepts(x, &l) && accepts(y, &r)
        }),
        Term::Optional(x) => w.is_empty() || accepts(x, w),
        Term::Star(x) => star(x, w),
        Term::Plus(x) => (0..=w.len()).any(|i| accepts(x, &w[..i]) && star(x, &w[i..])),
        Term::Closure(x) => extensions(CLOSURE_HORIZON.saturating_sub(w.len()))
            .iter()
            .any(|u| {
                let mut full = w.to_vec();
                full.extend(u);
                accepts(x, &full)
            }),
        Term::Filter(p, x) => {
            let kept: Vec<char> = w.iter().copied().filter(|c| *c == sym(p)).collect();
            accepts(x, &kept)
        }
        Term::CondFilter(p, x, y) => {
            let (hit, miss): (Vec<char>, Vec<char>) = w.iter().partition(|c| **c == sym(p));
            accepts(x, &hit) && accepts(y, &miss)
        }
        Term::IfElse(c, x, y) => {
            if cond_value(c) {
                accepts(x, w)
            } else {
                accepts(y, w)
            }
        }
        Term::Let(..) | Term::DefRef(_) | Term::Generic(..) => {
            panic!("oracle handles closed, definition-free terms only")
        }
    }
}

fn star(x: &Term, w: &[char]) -> bool {
    w.is_empty() || (1..=w.len()).any(|i| accepts(x, &w[..i]) && star(x, &w[i..]))
}

pub fn extensions(max_len: usize) -> Vec<Vec<char>> {
    words(max_len)
}

fn pattern() -> impl Strategy<Value = EventPattern> {
    prop::sample::select(SYMBOLS.to_vec()).prop_map(|c| EventPattern::new(c.to_string(), vec![]))
}

fn condition() -> impl Strategy<Value = DataExpr> {
    prop_oneof![
        any::<bool>().prop_map(|b| DataExpr::Lit(Value::Bool(b))),
        (
            prop::sample::select(vec![BinaryOp::Lt, BinaryOp::Gt, BinaryOp::Eq]),
            0i32..3,
            0i32..3
        )
            .prop_map(|(op, a, b)| DataExpr::binary(op, DataExpr::num(a as f64), DataExpr::num(b as f64))),
    ]
}

/// Closed terms. `closure` controls whether prefix closures are generated.
pub fn closed_term(closure: bool) -> impl Strategy<Value = Term> {
    let leaf = prop_oneof![
        1 => Just(Term::Empty),
        1 => Just(Term::All),
        1 => Just(Term::None),
        5 => pattern().prop_map(Term::Event),
    ];
    leaf.prop_recursive(4, 16, 2, move |inner| {
        let b = |t: Term| Box::new(t);
        let unary_kinds: Vec<u8> = if closure { vec![0, 1, 2, 3] } else { vec![0, 1, 2] };
        prop_oneof![
            3 => (inner.clone(), inner.clone()).prop_map(|(x, y)| Term::concat(x, y)),
            2 => (inner.clone(), inner.clone()).prop_map(|(x, y)| Term::or(x, y)),
            1 => (inner.clone(), inner.clone()).prop_map(|(x, y)| Term::and(x, y)),
            1 => (inner.clone(), inner.clone()).prop_map(|(x, y)| Term::shuffle(x, y)),
            2 => (prop::sample::select(unary_kinds), inner.clone()).prop_map(move |(k, t)| match k {
                0 => Term::Optional(b(t)),
                1 => Term::Plus(b(t)),
                2 => Term::Star(b(t)),
                _ => Term::Closure(b(t)),
            }),
            1 => (pattern(), inner.clone()).prop_map(move |(p, x)| Term::Filter(p, b(x))),
            1 => (pattern(), inner.clone(), inner.clone())
                .prop_map(move |(p, x, y)| Term::CondFilter(p, b(x), b(y))),
            1 => (condition(), inner.clone(), inner)
                .prop_map(move |(c, x, y)| Term::IfElse(c, b(x), b(y))),
        ]
    })
}
