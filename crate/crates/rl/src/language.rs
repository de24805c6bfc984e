//! The letter sequences each LetterEnv task asks for, written out by hand.

use crate::env::{LetterEnvConfig, Obs, Variant};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TaskLanguage {
    /// Blank* A(N) Blank* B Blank* C (Blank* D)^N, then anything, for N in 1..=n_max.
    Numerical { n_max: u32 },
    /// Blank* (A Blank*)^k B Blank* C (Blank* D)^k, then anything, for k >= 1.
    Standard,
    /// Blank* (A Blank*)^k B Blank* C if k < m, D otherwise, and nothing after.
    Conditional { m: u32 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Phase {
    Start,
    /// k letters A seen.
    InA(u32),
    /// After B, having seen k letters A.
    AfterB(u32),
    /// After C, with r letters D still owed.
    InD(u32),
    /// Task complete; anything may follow.
    Open,
    /// Task complete; nothing may follow.
    Closed,
    Dead,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Sym {
    A(u32),
    B,
    C,
    D,
    Blank,
}

pub fn expected_task_language(config: &LetterEnvConfig) -> TaskLanguage {
    match config.variant {
        Variant::Numerical { range: (_, hi), n, .. } => TaskLanguage::Numerical { n_max: hi.max(n.unwrap_or(0)) },
        Variant::Standard { .. } => TaskLanguage::Standard,
        Variant::Conditional { m, .. } => TaskLanguage::Conditional { m },
    }
}

impl TaskLanguage {
    /// How the task's event types read an observation. Standard and conditional
    /// tasks only recognize `a: 1`; any other A value is not a letter to them.
    fn sym(&self, o: Obs) -> Option<Sym> {
        Some(match o {
            Obs::A(x) => match self {
                TaskLanguage::Numerical { n_max } => {
                    if x.fract() == 0.0 && x >= 1.0 && x <= *n_max as f64 {
                        Sym::A(x as u32)
                    } else {
                        return None;
                    }
                }
                _ if x == 1.0 => Sym::A(1),
                _ => Sym::Blank,
            },
            Obs::B => Sym::B,
            Obs::C => Sym::C,
            Obs::D => Sym::D,
            Obs::Blank => Sym::Blank,
        })
    }

    fn next(&self, p: Phase, o: Obs) -> Phase {
        use Phase::*;
        let Some(s) = self.sym(o) else { return Dead };
        match (self, p, s) {
            (_, Dead, _) => Dead,
            (_, Open, _) => Open,
            (_, Closed, _) => Dead,
            (_, Start | InA(_) | AfterB(_), Sym::Blank) => p,
            (_, InD(r), Sym::Blank) if r > 0 => p,

            (TaskLanguage::Numerical { .. }, Start, Sym::A(n)) => InA(n),
            (TaskLanguage::Numerical { .. }, InA(_), Sym::A(_)) => Dead,
            (_, Start, Sym::A(_)) => InA(1),
            (_, InA(k), Sym::A(_)) => InA(k + 1),

            (_, InA(k), Sym::B) => AfterB(k),
            (TaskLanguage::Conditional { m }, AfterB(k), Sym::C) if k < *m => Closed,
            (TaskLanguage::Conditional { m }, AfterB(k), Sym::D) if k >= *m => Closed,
            (TaskLanguage::Conditional { .. }, _, _) => Dead,
            (_, AfterB(k), Sym::C) => InD(k),
            (_, InD(r), Sym::D) if r > 1 => InD(r - 1),
            (_, InD(1), Sym::D) => Open,
            _ => Dead,
        }
    }

    fn run(&self, trace: &[Obs]) -> Phase {
        trace.iter().fold(Phase::Start, |p, o| self.next(p, *o))
    }

    /// Whether the observed trace completes the task.
    pub fn accepts(&self, trace: &[Obs]) -> bool {
        matches!(self.run(trace), Phase::Open | Phase::Closed)
    }

    /// Whether some continuation of the trace completes the task.
    pub fn is_viable_prefix(&self, trace: &[Obs]) -> bool {
        self.run(trace) != Phase::Dead
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use Obs::*;

    #[test]
    fn numerical_examples() {
        let l = TaskLanguage::Numerical { n_max: 10 };
        assert!(l.accepts(&[A(2.0), B, C, D, D]));
        assert!(!l.accepts(&[A(2.0), B, C, D]));
        assert!(l.is_viable_prefix(&[A(2.0), B, C, D]));
        assert!(l.accepts(&[Blank, A(1.0), Blank, B, Blank, C, Blank, D, A(3.0), B]));
        assert!(!l.is_viable_prefix(&[A(1.0), C]));
        assert!(!l.is_viable_prefix(&[A(11.0)]));
        assert!(!l.is_viable_prefix(&[A(1.0), A(1.0)]));
    }

    #[test]
    fn conditional_examples() {
        let l = TaskLanguage::Conditional { m: 3 };
        assert!(l.accepts(&[A(1.0), A(1.0), B, C]));
        assert!(!l.accepts(&[A(1.0), A(1.0), B, D]));
        assert!(l.accepts(&[A(1.0), Blank, A(1.0), A(1.0), B, Blank, D]));
        assert!(!l.accepts(&[A(1.0), B, C, Blank]));
        assert!(!l.is_viable_prefix(&[B]));
        assert!(l.is_viable_prefix(&[Blank, A(1.0), Blank]));
    }

    #[test]
    fn standard_counts_d() {
        let l = TaskLanguage::Standard;
        assert!(l.accepts(&[A(1.0), A(1.0), B, C, D, Blank, D]));
        assert!(!l.accepts(&[A(1.0), A(1.0), B, C, D]));
        assert!(l.accepts(&[A(1.0), B, C, D, C]));
    }
}
