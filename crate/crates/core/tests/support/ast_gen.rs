//! Random well-formed specification ASTs.

use indexmap::IndexMap;
use proptest::prelude::*;
use rml_core::ast::*;
use rml_core::Value;

pub fn ident() -> impl Strategy<Value = String> {
    prop::sample::select(vec!["x", "y", "n", "val", "t"]).prop_map(String::from)
}

pub fn literal() -> impl Strategy<Value = Value> {
    prop_oneof![
        (-20i32..20).prop_map(|n| Value::num(n as f64)),
        (-40i32..40).prop_map(|n| Value::num(n as f64 / 4.0)),
        prop::sample::select(vec!["a", "north", "B c", "q'x"]).prop_map(Value::str),
        any::<bool>().prop_map(Value::Bool),
    ]
}

pub fn data_expr() -> impl Strategy<Value = DataExpr> {
    let leaf = prop_oneof![ident().prop_map(DataExpr::Var), literal().prop_map(DataExpr::Lit)];
    leaf.prop_recursive(3, 12, 2, |inner| {
        let ops = prop::sample::select(vec![
            BinaryOp::Add,
            BinaryOp::Sub,
            BinaryOp::Mul,
            BinaryOp::Div,
            BinaryOp::Lt,
            BinaryOp::Gt,
            BinaryOp::Le,
            BinaryOp::Ge,
            BinaryOp::Eq,
            BinaryOp::Ne,
            BinaryOp::And,
            BinaryOp::Or,
        ]);
        prop_oneof![
            (prop::sample::select(vec![UnaryOp::Neg, UnaryOp::Not]), inner.clone())
                .prop_map(|(op, e)| DataExpr::Unary(op, Box::new(e))),
            (ops, inner.clone(), inner).prop_map(|(op, l, r)| DataExpr::binary(op, l, r)),
        ]
    })
}

pub fn value_pattern() -> impl Strategy<Value = ValuePattern> {
    let leaf = prop_oneof![
        ident().prop_map(ValuePattern::Var),
        literal().prop_map(ValuePattern::Lit),
        Just(ValuePattern::Wildcard),
    ];
    leaf.prop_recursive(2, 8, 3, |inner| {
        prop_oneof![
            prop::collection::vec(("[a-z]{1,3}|\"k y\"", inner.clone()), 1..3).prop_map(|fs| {
                ValuePattern::Object(
                    fs.into_iter()
                        .map(|(k, p)| (k.trim_matches('"').to_string(), p))
                        .collect(),
                )
            }),
            (prop::collection::vec(inner, 0..3), any::<bool>())
                .prop_map(|(items, ellipsis)| ValuePattern::Array { items, ellipsis }),
        ]
    })
}

/// Event types e0, e1, e2 take 0, 1 and 2 parameters.
pub fn event_pattern() -> impl Strategy<Value = EventPattern> {
    let arg = prop_oneof![
        ident().prop_map(EventArg::Var),
        literal().prop_map(EventArg::Lit),
        Just(EventArg::Wildcard),
    ];
    (0usize..3, prop::collection::vec(arg, 2)).prop_map(|(k, args)| {
        EventPattern::new(format!("e{k}"), args.into_iter().take(k).collect())
    })
}

/// Definitions P, Q, R take 0, 1 and 2 parameters.
pub fn term() -> impl Strategy<Value = Term> {
    let leaf = prop_oneof![
        Just(Term::Empty),
        Just(Term::All),
        Just(Term::None),
        event_pattern().prop_map(Term::Event),
        Just(Term::DefRef("P".into())),
        (1usize..3, prop::collection::vec(data_expr(), 2)).prop_map(|(k, args)| {
            Term::Generic(
                if k == 1 { "Q" } else { "R" }.into(),
                args.into_iter().take(k).collect(),
            )
        }),
    ];
    leaf.prop_recursive(4, 24, 3, |inner| {
        let b = |t: Term| Box::new(t);
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(x, y)| Term::concat(x, y)),
            (inner.clone(), inner.clone()).prop_map(|(x, y)| Term::or(x, y)),
            (inner.clone(), inner.clone()).prop_map(|(x, y)| Term::and(x, y)),
            (inner.clone(), inner.clone()).prop_map(|(x, y)| Term::shuffle(x, y)),
            (prop::collection::btree_set(ident(), 1..3), inner.clone())
                .prop_map(move |(vs, t)| Term::Let(vs.into_iter().collect(), b(t))),
            (0u8..4, inner.clone()).prop_map(move |(k, t)| match k {
                0 => Term::Optional(b(t)),
                1 => Term::Plus(b(t)),
                2 => Term::Star(b(t)),
                _ => Term::Closure(b(t)),
            }),
            (event_pattern(), inner.clone(), inner.clone())
                .prop_map(move |(p, x, y)| Term::CondFilter(p, b(x), b(y))),
            (event_pattern(), inner.clone()).prop_map(move |(p, x)| Term::Filter(p, b(x))),
            (data_expr(), inner.clone(), inner)
                .prop_map(move |(c, x, y)| Term::IfElse(c, b(x), b(y))),
        ]
    })
}

pub fn decls() -> impl Strategy<Value = Vec<EventTypeDecl>> {
    let object = || prop::collection::vec(("[a-z]{1,4}", value_pattern()), 1..3);
    (
        object(),
        object(),
        prop::option::of(data_expr()),
        any::<bool>(),
    )
        .prop_map(|(f1, f2, guard, negated)| {
            vec![
                EventTypeDecl {
                    name: "e0".into(),
                    params: vec![],
                    negated: false,
                    body: EventTypeBody::Object(f1),
                    guard: None,
                },
                EventTypeDecl {
                    name: "e1".into(),
                    params: vec!["x".into()],
                    negated: false,
                    body: EventTypeBody::Object(f2),
                    guard,
                },
                EventTypeDecl {
                    name: "e2".into(),
                    params: vec!["x".into(), "y".into()],
                    negated,
                    body: EventTypeBody::Disjuncts(vec![
                        DisjunctPattern {
                            name: "e0".into(),
                            args: vec![],
                        },
                        DisjunctPattern {
                            name: "e1".into(),
                            args: vec![ValuePattern::Var("x".into())],
                        },
                    ]),
                    guard: None,
                },
            ]
        })
}

pub fn specification() -> impl Strategy<Value = Specification> {
    (decls(), term(), term(), term(), term()).prop_map(|(event_types, main, p, q, r)| {
        let mut definitions = IndexMap::new();
        definitions.insert("P".to_string(), Definition { params: vec![], body: p });
        definitions.insert(
            "Q".to_string(),
            Definition {
                params: vec!["n".into()],
                body: q,
            },
        );
        definitions.insert(
            "R".to_string(),
            Definition {
                params: vec!["n".into(), "t".into()],
                body: r,
            },
        );
        Specification {
            event_types,
            definitions,
            main,
        }
    })
}

