//! Evaluation of data expressions.

use thiserror::Error;

use crate::ast::{BinaryOp, DataExpr, UnaryOp};
use crate::printer::render_data;
use crate::value::{Bindings, Value};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EvalError {
    #[error("unbound variable `{0}`")]
    Unbound(String),
    #[error("type mismatch: `{op}` applied to {found}")]
    TypeMismatch { op: &'static str, found: String },
    #[error("division by zero")]
    DivisionByZero,
    #[error("{source} in {site}")]
    At {
        site: String,
        #[source]
        source: Box<EvalError>,
    },
}

impl EvalError {
    pub fn at(self, site: impl Into<String>) -> Self {
        match self {
            e @ EvalError::At { .. } => e,
            e => EvalError::At {
                site: site.into(),
                source: Box::new(e),
            },
        }
    }
}

pub fn eval_data(expr: &DataExpr, env: &Bindings) -> Result<Value, EvalError> {
    match expr {
        DataExpr::Var(x) => env.get(x).cloned().ok_or_else(|| EvalError::Unbound(x.clone())),
        DataExpr::Lit(v) => Ok(v.clone()),
        DataExpr::Unary(op, e) => {
            let v = eval_data(e, env)?;
            match op {
                UnaryOp::Neg => num(&v, "-").map(|x| Value::num(-x)),
                UnaryOp::Not => boolean(&v, "!").map(|b| Value::Bool(!b)),
            }
        }
        DataExpr::Binary(op, l, r) => {
            let a = eval_data(l, env)?;
            // short-circuit, so `x != 0 && 1 / x > 2` is safe
            match op {
                BinaryOp::And if !boolean(&a, "&&")? => return Ok(Value::Bool(false)),
                BinaryOp::Or if boolean(&a, "||")? => return Ok(Value::Bool(true)),
                _ => {}
            }
            let b = eval_data(r, env)?;
            binary(*op, &a, &b)
        }
    }
}

fn num(v: &Value, op: &'static str) -> Result<f64, EvalError> {
    v.as_f64().ok_or_else(|| EvalError::TypeMismatch {
        op,
        found: v.type_name().to_string(),
    })
}

fn boolean(v: &Value, op: &'static str) -> Result<bool, EvalError> {
    v.as_bool().ok_or_else(|| EvalError::TypeMismatch {
        op,
        found: v.type_name().to_string(),
    })
}

fn binary(op: BinaryOp, a: &Value, b: &Value) -> Result<Value, EvalError> {
    let sym = op.symbol();
    Ok(match op {
        BinaryOp::Eq => Value::Bool(a == b),
        BinaryOp::Ne => Value::Bool(a != b),
        BinaryOp::And | BinaryOp::Or => Value::Bool(boolean(b, sym)?),
        _ => {
            let (x, y) = (num(a, sym)?, num(b, sym)?);
            match op {
                BinaryOp::Add => Value::num(x + y),
                BinaryOp::Sub => Value::num(x - y),
                BinaryOp::Mul => Value::num(x * y),
                BinaryOp::Div if y == 0.0 => return Err(EvalError::DivisionByZero),
                BinaryOp::Div => Value::num(x / y),
                BinaryOp::Lt => Value::Bool(x < y),
                BinaryOp::Gt => Value::Bool(x > y),
                BinaryOp::Le => Value::Bool(x <= y),
                BinaryOp::Ge => Value::Bool(x >= y),
                _ => unreachable!(),
            }
        }
    })
}

/// Evaluates a condition that must produce a boolean.
pub fn eval_condition(expr: &DataExpr, env: &Bindings) -> Result<bool, EvalError> {
    let site = || format!("condition `{}`", render_data(expr));
    let v = eval_data(expr, env).map_err(|e| e.at(site()))?;
    v.as_bool().ok_or_else(|| {
        EvalError::TypeMismatch {
            op: "if",
            found: v.type_name().to_string(),
        }
        .at(site())
    })
}

/// Replaces variables bound in `env` with their values and folds closed
/// subexpressions. Subexpressions whose evaluation fails are left as they are.
pub fn substitute_data(expr: &DataExpr, env: &Bindings) -> DataExpr {
    let out = match expr {
        DataExpr::Var(x) => match env.get(x) {
            Some(v) => return DataExpr::Lit(v.clone()),
            None => return expr.clone(),
        },
        DataExpr::Lit(_) => return expr.clone(),
        DataExpr::Unary(op, e) => DataExpr::Unary(*op, Box::new(substitute_data(e, env))),
        DataExpr::Binary(op, l, r) => DataExpr::Binary(
            *op,
            Box::new(substitute_data(l, env)),
            Box::new(substitute_data(r, env)),
        ),
    };
    if out.is_closed() {
        if let Ok(v) = eval_data(&out, &Bindings::new()) {
            return DataExpr::Lit(v);
        }
    }
    out
}
