//! Offline trace checking against a specification.

use std::fmt;

use rml_core::{classify, parse_specification, parse_trace, validate, Monitor, MonitorError, Verdict};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CheckError {
    #[error("specification: {0}")]
    Parse(#[from] rml_core::ParseError),
    #[error("specification: {}", .0.iter().map(|e| e.to_string()).collect::<Vec<_>>().join("; "))]
    Invalid(Vec<rml_core::SemanticError>),
    #[error("trace line {line}: {message}")]
    Trace { line: usize, message: String },
    #[error("event {index}: {source}")]
    Monitor { index: usize, source: MonitorError },
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckLine {
    /// 1-based event index.
    pub index: usize,
    pub matched: Vec<String>,
    pub state_id: String,
    pub verdict: Verdict,
}

impl fmt::Display for CheckLine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let matched = if self.matched.is_empty() {
            "-".to_string()
        } else {
            self.matched.join(",")
        };
        write!(f, "{}\t{}\t{}\t{}", self.index, matched, self.state_id, self.verdict)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckReport {
    pub lines: Vec<CheckLine>,
    /// Verdict after the last event, or on the empty trace.
    pub verdict: Verdict,
}

impl CheckReport {
    pub fn exit_code(&self) -> i32 {
        exit_code(self.verdict)
    }
}

pub fn exit_code(v: Verdict) -> i32 {
    match v {
        Verdict::True | Verdict::CurrentlyTrue => 0,
        Verdict::CurrentlyFalse => 1,
        Verdict::False => 2,
    }
}

/// Exit code for a check that could not be carried out.
pub const EXIT_ERROR: i32 = 3;

/// Runs the monitor for `spec_text` over a JSON-lines trace.
pub fn check_trace(spec_text: &str, trace_text: &str) -> Result<CheckReport, CheckError> {
    let spec = parse_specification(spec_text)?;
    let errs = validate(&spec);
    if !errs.is_empty() {
        return Err(CheckError::Invalid(errs));
    }
    let trace = parse_trace(trace_text).map_err(|(line, e)| CheckError::Trace {
        line,
        message: e.to_string(),
    })?;
    let monitor = Monitor::new(spec);
    let mut state = monitor.initial();
    let mut verdict = classify(monitor.spec(), &state.term, &state.env)
        .map_err(|source| CheckError::Monitor { index: 0, source })?;
    let mut lines = Vec::with_capacity(trace.len());
    for (i, ev) in trace.iter().enumerate() {
        let index = i + 1;
        let labels = monitor.labels(ev).map_err(|source| CheckError::Monitor { index, source })?;
        let (next, v) = monitor
            .step_labelled(&state, &labels)
            .map_err(|source| CheckError::Monitor { index, source })?;
        let mut matched: Vec<String> = labels.into_iter().map(|(n, _)| n).collect();
        matched.dedup();
        lines.push(CheckLine {
            index,
            matched,
            state_id: next.id().to_string(),
            verdict: v,
        });
        state = next;
        verdict = v;
    }
    Ok(CheckReport { lines, verdict })
}
