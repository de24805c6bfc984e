//! Runtime values carried by events, bindings and data expressions.

use std::collections::BTreeMap;
use std::fmt;

use ordered_float::OrderedFloat;
use thiserror::Error;

/// A data value. Numbers are double precision, so `1` and `1.0` are the same value.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Value {
    Num(OrderedFloat<f64>),
    Str(String),
    Bool(bool),
    Object(BTreeMap<String, Value>),
    Array(Vec<Value>),
}

impl Value {
    pub fn num(x: f64) -> Self {
        // -0.0 and 0.0 must render and hash identically
        Value::Num(OrderedFloat(if x == 0.0 { 0.0 } else { x }))
    }

    pub fn str(s: impl Into<String>) -> Self {
        Value::Str(s.into())
    }

    pub fn as_f64(&self) -> Option<f64> {
        match self {
            Value::Num(n) => Some(n.0),
            _ => None,
        }
    }

    pub fn as_bool(&self) -> Option<bool> {
        match self {
            Value::Bool(b) => Some(*b),
            _ => None,
        }
    }

    pub fn type_name(&self) -> &'static str {
        match self {
            Value::Num(_) => "number",
            Value::Str(_) => "string",
            Value::Bool(_) => "boolean",
            Value::Object(_) => "object",
            Value::Array(_) => "array",
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        match self {
            Value::Num(n) => serde_json::Number::from_f64(n.0)
                .map(serde_json::Value::Number)
                .unwrap_or(serde_json::Value::Null),
            Value::Str(s) => serde_json::Value::String(s.clone()),
            Value::Bool(b) => serde_json::Value::Bool(*b),
            Value::Object(m) => serde_json::Value::Object(
                m.iter().map(|(k, v)| (k.clone(), v.to_json())).collect(),
            ),
            Value::Array(a) => serde_json::Value::Array(a.iter().map(Value::to_json).collect()),
        }
    }
}

impl From<f64> for Value {
    fn from(x: f64) -> Self {
        Value::num(x)
    }
}

impl From<i64> for Value {
    fn from(x: i64) -> Self {
        Value::num(x as f64)
    }
}

impl From<bool> for Value {
    fn from(b: bool) -> Self {
        Value::Bool(b)
    }
}

impl From<&str> for Value {
    fn from(s: &str) -> Self {
        Value::Str(s.to_string())
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum JsonError {
    #[error("invalid JSON: {0}")]
    Syntax(String),
    #[error("an event must be a JSON object, found {0}")]
    NotAnObject(&'static str),
    #[error("null is not a supported value (key `{0}`)")]
    Null(String),
}

impl TryFrom<&serde_json::Value> for Value {
    type Error = JsonError;

    fn try_from(v: &serde_json::Value) -> Result<Self, JsonError> {
        Ok(match v {
            serde_json::Value::Null => return Err(JsonError::Null(String::new())),
            serde_json::Value::Bool(b) => Value::Bool(*b),
            serde_json::Value::Number(n) => Value::num(n.as_f64().unwrap_or(f64::NAN)),
            serde_json::Value::String(s) => Value::Str(s.clone()),
            serde_json::Value::Array(a) => {
                Value::Array(a.iter().map(Value::try_from).collect::<Result<_, _>>()?)
            }
            serde_json::Value::Object(m) => {
                let mut out = BTreeMap::new();
                for (k, v) in m {
                    let v = Value::try_from(v).map_err(|e| match e {
                        JsonError::Null(_) => JsonError::Null(k.clone()),
                        e => e,
                    })?;
                    out.insert(k.clone(), v);
                }
                Value::Object(out)
            }
        })
    }
}

/// Canonical rendering: integral numbers print without a fractional part,
/// strings are JSON-quoted, object keys are sorted.
impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Num(n) => write!(f, "{}", n.0),
            Value::Str(s) => write!(f, "{}", serde_json::Value::String(s.clone())),
            Value::Bool(b) => write!(f, "{b}"),
            Value::Object(m) => {
                f.write_str("{")?;
                for (i, (k, v)) in m.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{}: {v}", serde_json::Value::String(k.clone()))?;
                }
                f.write_str("}")
            }
            Value::Array(a) => {
                f.write_str("[")?;
                for (i, v) in a.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{v}")?;
                }
                f.write_str("]")
            }
        }
    }
}

/// An observed event: a finite key-value map.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Event(pub BTreeMap<String, Value>);

impl Event {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with(mut self, key: impl Into<String>, value: impl Into<Value>) -> Self {
        self.0.insert(key.into(), value.into());
        self
    }

    pub fn get(&self, key: &str) -> Option<&Value> {
        self.0.get(key)
    }

    /// Parses one JSON object, e.g. one line of a JSON Lines trace.
    pub fn from_json_str(line: &str) -> Result<Self, JsonError> {
        let v: serde_json::Value =
            serde_json::from_str(line).map_err(|e| JsonError::Syntax(e.to_string()))?;
        Self::from_json(&v)
    }

    pub fn from_json(v: &serde_json::Value) -> Result<Self, JsonError> {
        match Value::try_from(v)? {
            Value::Object(m) => Ok(Event(m)),
            other => Err(JsonError::NotAnObject(other.type_name())),
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        Value::Object(self.0.clone()).to_json()
    }
}

impl fmt::Display for Event {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        // reuse the object rendering
        let obj = Value::Object(self.0.clone());
        write!(f, "{obj}")
    }
}

/// Variable environment produced by matching and consumed by data expressions.
pub type Bindings = BTreeMap<String, Value>;

/// Parses a JSON Lines trace; blank lines are skipped.
pub fn parse_trace(text: &str) -> Result<Vec<Event>, (usize, JsonError)> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| Event::from_json_str(l).map_err(|e| (i + 1, e)))
        .collect()
}
