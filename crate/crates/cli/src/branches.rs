//! How many branches each formalism needs for the conditional task as M grows.
//!
//! A branch is a machine state (or counter test) that stands for a particular
//! value of N. Both machines below are built explicitly and can be run on
//! letter traces, so their counts are counts of real, working constructions.

use rml_core::{corpus, parse_specification, ParseError, Term};
use rml_rl::Obs;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Sym {
    A,
    B,
    C,
    D,
    Blank,
}

fn sym(o: Obs) -> Sym {
    match o {
        Obs::A(_) => Sym::A,
        Obs::B => Sym::B,
        Obs::C => Sym::C,
        Obs::D => Sym::D,
        Obs::Blank => Sym::Blank,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Guard {
    Any,
    Zero,
    NonZero,
}

#[derive(Debug, Clone)]
struct Edge {
    from: usize,
    /// `None` moves without reading an event.
    on: Option<Sym>,
    /// Tested after the increment is applied.
    guard: Guard,
    inc: i32,
    to: usize,
}

#[derive(Debug, Clone)]
struct State {
    name: String,
    /// Stands for one value (or the top range) of N.
    branch: bool,
}

/// A deterministic machine with at most one counter.
#[derive(Debug, Clone)]
pub struct CounterMachine {
    states: Vec<State>,
    edges: Vec<Edge>,
    start: usize,
    accept: usize,
}

impl CounterMachine {
    fn new() -> Self {
        Self {
            states: Vec::new(),
            edges: Vec::new(),
            start: 0,
            accept: 0,
        }
    }

    fn add(&mut self, name: impl Into<String>, branch: bool) -> usize {
        self.states.push(State {
            name: name.into(),
            branch,
        });
        self.states.len() - 1
    }

    fn edge(&mut self, from: usize, on: Option<Sym>, guard: Guard, inc: i32, to: usize) {
        self.edges.push(Edge { from, on, guard, inc, to });
    }

    pub fn branches(&self) -> usize {
        self.states.iter().filter(|s| s.branch).count()
    }

    pub fn branch_names(&self) -> Vec<&str> {
        self.states.iter().filter(|s| s.branch).map(|s| s.name.as_str()).collect()
    }

    fn fire(&self, q: usize, c: u32, on: Option<Sym>) -> Option<(usize, u32)> {
        self.edges.iter().filter(|e| e.from == q && e.on == on).find_map(|e| {
            let c2 = c.checked_add_signed(e.inc)?;
            let ok = match e.guard {
                Guard::Any => true,
                Guard::Zero => c2 == 0,
                Guard::NonZero => c2 != 0,
            };
            ok.then_some((e.to, c2))
        })
    }

    fn settle(&self, mut q: usize, mut c: u32) -> (usize, u32) {
        while let Some(next) = self.fire(q, c, None) {
            (q, c) = next;
        }
        (q, c)
    }

    /// Whether the machine ends in its accepting state after `trace`.
    pub fn accepts(&self, trace: &[Obs]) -> bool {
        let (mut q, mut c) = self.settle(self.start, 0);
        for o in trace {
            match self.fire(q, c, Some(sym(*o))) {
                Some((q2, c2)) => (q, c) = self.settle(q2, c2),
                None => return false,
            }
        }
        q == self.accept
    }
}

fn blank_loop(m: &mut CounterMachine, q: usize) {
    m.edge(q, Some(Sym::Blank), Guard::Any, 0, q);
}

/// A plain reward machine: one state per A count below M, plus one for M or more.
pub fn reward_machine(m: u32) -> CounterMachine {
    let mut rm = CounterMachine::new();
    let start = rm.add("start", false);
    let counts: Vec<usize> = (1..=m)
        .map(|k| rm.add(if k < m { format!("a{k}") } else { format!("a{k}+") }, true))
        .collect();
    let want_c = rm.add("want_c", false);
    let want_d = rm.add("want_d", false);
    let accept = rm.add("accept", false);
    blank_loop(&mut rm, start);
    rm.edge(start, Some(Sym::A), Guard::Any, 0, counts[0]);
    for (i, &q) in counts.iter().enumerate() {
        blank_loop(&mut rm, q);
        rm.edge(q, Some(Sym::A), Guard::Any, 0, counts[(i + 1).min(counts.len() - 1)]);
        let k = i as u32 + 1;
        rm.edge(q, Some(Sym::B), Guard::Any, 0, if k < m { want_c } else { want_d });
    }
    for (q, s) in [(want_c, Sym::C), (want_d, Sym::D)] {
        blank_loop(&mut rm, q);
        rm.edge(q, Some(s), Guard::Any, 0, accept);
    }
    rm.accept = accept;
    rm
}

/// A counting automaton: A increments, and after B a chain of zero tests
/// decides N < M, one test per value of N it must tell apart.
pub fn counting_automaton(m: u32) -> CounterMachine {
    let mut cra = CounterMachine::new();
    let start = cra.add("start", false);
    let counting = cra.add("counting", false);
    let want_c = cra.add("want_c", false);
    let want_d = cra.add("want_d", false);
    let accept = cra.add("accept", false);
    let tests: Vec<usize> = (1..=m)
        .map(|j| cra.add(if j < m { format!("n={j}?") } else { format!("n>={j}") }, true))
        .collect();
    blank_loop(&mut cra, start);
    cra.edge(start, Some(Sym::A), Guard::Any, 1, counting);
    blank_loop(&mut cra, counting);
    cra.edge(counting, Some(Sym::A), Guard::Any, 1, counting);
    cra.edge(counting, Some(Sym::B), Guard::Any, 0, tests[0]);
    for (i, &q) in tests.iter().enumerate() {
        if i + 1 < tests.len() {
            cra.edge(q, None, Guard::Zero, -1, want_c);
            cra.edge(q, None, Guard::NonZero, -1, tests[i + 1]);
        } else {
            cra.edge(q, None, Guard::Any, 0, want_d);
        }
    }
    for (q, s) in [(want_c, Sym::C), (want_d, Sym::D)] {
        blank_loop(&mut cra, q);
        cra.edge(q, Some(s), Guard::Any, 0, accept);
    }
    cra.accept = accept;
    cra
}

/// Branches of every conditional in a term: two per if-else.
fn conditional_branches(t: &Term) -> usize {
    match t {
        Term::IfElse(_, a, b) => 2 + conditional_branches(a) + conditional_branches(b),
        Term::Concat(a, b) | Term::And(a, b) | Term::Or(a, b) | Term::Shuffle(a, b) | Term::CondFilter(_, a, b) => {
            conditional_branches(a) + conditional_branches(b)
        }
        Term::Let(_, a) | Term::Optional(a) | Term::Plus(a) | Term::Star(a) | Term::Closure(a) | Term::Filter(_, a) => {
            conditional_branches(a)
        }
        Term::Empty | Term::All | Term::None | Term::Event(_) | Term::DefRef(_) | Term::Generic(..) => 0,
    }
}

/// Branches in the RML conditional specification for threshold `m`.
pub fn rml_branches(m: u32) -> Result<usize, ParseError> {
    let spec = parse_specification(&corpus::conditional_task(m))?;
    Ok(conditional_branches(&spec.main) + spec.definitions.values().map(|d| conditional_branches(&d.body)).sum::<usize>())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BranchRow {
    pub m: u32,
    pub rm_branches: usize,
    pub cra_branches: usize,
    pub rml_branches: usize,
}

pub fn run_branch_analysis(ms: &[u32]) -> Result<Vec<BranchRow>, ParseError> {
    ms.iter()
        .map(|&m| {
            Ok(BranchRow {
                m,
                rm_branches: reward_machine(m).branches(),
                cra_branches: counting_automaton(m).branches(),
                rml_branches: rml_branches(m)?,
            })
        })
        .collect()
}

pub fn write_branches(rows: &[BranchRow], w: impl std::io::Write) -> Result<(), csv::Error> {
    let mut w = csv::Writer::from_writer(w);
    w.write_record(["m", "rm_branches", "cra_branches", "rml_branches"])?;
    for r in rows {
        w.write_record([
            r.m.to_string(),
            r.rm_branches.to_string(),
            r.cra_branches.to_string(),
            r.rml_branches.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}
