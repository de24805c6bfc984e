//! RML: event-type declarations, trace expressions and a derivative-based
//! monitor with four-valued verdicts.

pub mod ast;
pub mod corpus;
pub mod eval;
pub mod lexer;
pub mod matcher;
pub mod monitor;
pub mod parser;
pub mod printer;
pub mod validate;
pub mod value;

pub use ast::{DataExpr, EventTypeDecl, Specification, Term};
pub use eval::{eval_data, EvalError};
pub use matcher::{label, match_event_type, MatchError, MatchResult};
pub use monitor::{
    classify, derivative, normalize, nullable, state_id, Monitor, MonitorError, MonitorState,
    Verdict,
};
pub use parser::{parse_specification, ParseError};
pub use printer::pretty_print;
pub use validate::{validate, SemanticError};
pub use value::{parse_trace, Bindings, Event, Value};
