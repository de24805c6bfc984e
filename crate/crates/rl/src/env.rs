//! LetterEnv: a deterministic gridworld whose cells carry letters.

use std::collections::BTreeMap;
use std::fmt;

use rand::Rng;
use rml_core::Event;
use thiserror::Error;

pub type Pos = (usize, usize);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Letter {
    A,
    B,
    C,
    D,
}

impl Letter {
    pub const ALL: [Letter; 4] = [Letter::A, Letter::B, Letter::C, Letter::D];

    pub fn key(self) -> &'static str {
        match self {
            Letter::A => "a",
            Letter::B => "b",
            Letter::C => "c",
            Letter::D => "d",
        }
    }

    pub fn from_char(c: char) -> Option<Letter> {
        match c.to_ascii_uppercase() {
            'A' => Some(Letter::A),
            'B' => Some(Letter::B),
            'C' => Some(Letter::C),
            'D' => Some(Letter::D),
            _ => None,
        }
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.key().to_uppercase())
    }
}

/// What the agent sees after a move: the content of the cell it stands on.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Obs {
    A(f64),
    B,
    C,
    D,
    Blank,
}

impl Obs {
    pub fn event(self) -> Event {
        match self {
            Obs::A(x) => Event::new().with("a", x),
            Obs::B => Event::new().with("b", 1.0),
            Obs::C => Event::new().with("c", 1.0),
            Obs::D => Event::new().with("d", 1.0),
            Obs::Blank => Event::new().with("blank", 1.0),
        }
    }
}

impl fmt::Display for Obs {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Obs::A(x) => write!(f, "A({x})"),
            Obs::B => f.write_str("B"),
            Obs::C => f.write_str("C"),
            Obs::D => f.write_str("D"),
            Obs::Blank => f.write_str("_"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Action {
    Up,
    Down,
    Left,
    Right,
}

impl Action {
    pub const ALL: [Action; 4] = [Action::Up, Action::Down, Action::Left, Action::Right];

    pub fn index(self) -> usize {
        self as usize
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Variant {
    /// A is seen `n` times, then turns into B.
    Standard { n: u32 },
    /// A shows its count once and then goes blank. `None` draws N from `range` at reset.
    Numerical { n: Option<u32>, range: (u32, u32) },
    /// Like `Standard`, with the branch after B decided by `m`.
    Conditional { n: u32, m: u32 },
}

/// Letter `from` becomes `to` (blank when `None`) once it has been observed `after` times.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Replacement {
    pub from: Letter,
    pub after: u32,
    pub to: Option<Letter>,
}

#[derive(Debug, Error, PartialEq)]
pub enum EnvError {
    #[error("grid must be at least 1x1")]
    EmptyGrid,
    #[error("cell ({0}, {1}) is outside the grid")]
    OutOfBounds(usize, usize),
    #[error("N must be at least 1")]
    ZeroN,
    #[error("M must be at least 1")]
    ZeroM,
    #[error("numerical range {0}..={1} is empty or starts at 0")]
    BadRange(u32, u32),
    #[error("no {0} cell placed")]
    MissingLetter(Letter),
    #[error("episode already terminated")]
    Terminated,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LetterEnvConfig {
    pub rows: usize,
    pub cols: usize,
    pub start: Pos,
    pub placements: BTreeMap<Pos, Letter>,
    pub variant: Variant,
    pub step_cap: u32,
}

pub const DEFAULT_STEP_CAP: u32 = 500;

fn layout(cells: &[(Pos, Letter)]) -> BTreeMap<Pos, Letter> {
    cells.iter().copied().collect()
}

impl LetterEnvConfig {
    /// 6x6 board with A, C and D; B appears where A was.
    pub fn standard(n: u32) -> Self {
        Self {
            rows: 6,
            cols: 6,
            start: (0, 0),
            placements: layout(&[((1, 4), Letter::A), ((4, 1), Letter::C), ((5, 5), Letter::D)]),
            variant: Variant::Standard { n },
            step_cap: DEFAULT_STEP_CAP,
        }
    }

    pub fn conditional(n: u32, m: u32) -> Self {
        Self {
            variant: Variant::Conditional { n, m },
            ..Self::standard(n)
        }
    }

    /// 6x6 board with all four letters; A vanishes after one look.
    pub fn numerical(n: Option<u32>) -> Self {
        Self {
            rows: 6,
            cols: 6,
            start: (0, 0),
            placements: layout(&[
                ((1, 4), Letter::A),
                ((4, 1), Letter::B),
                ((4, 4), Letter::C),
                ((5, 5), Letter::D),
            ]),
            variant: Variant::Numerical { n, range: (1, 10) },
            step_cap: DEFAULT_STEP_CAP,
        }
    }

    pub fn validate(&self) -> Result<(), EnvError> {
        if self.rows == 0 || self.cols == 0 {
            return Err(EnvError::EmptyGrid);
        }
        for &(r, c) in self.placements.keys().chain([&self.start]) {
            if r >= self.rows || c >= self.cols {
                return Err(EnvError::OutOfBounds(r, c));
            }
        }
        let needed: &[Letter] = match self.variant {
            Variant::Standard { n } | Variant::Conditional { n, .. } if n == 0 => return Err(EnvError::ZeroN),
            Variant::Conditional { m: 0, .. } => return Err(EnvError::ZeroM),
            Variant::Numerical { n: Some(0), .. } => return Err(EnvError::ZeroN),
            Variant::Numerical { range: (lo, hi), .. } if lo == 0 || lo > hi => {
                return Err(EnvError::BadRange(lo, hi))
            }
            Variant::Numerical { .. } => &Letter::ALL,
            Variant::Standard { .. } => &[Letter::A, Letter::C, Letter::D],
            Variant::Conditional { .. } => &[Letter::A, Letter::C, Letter::D],
        };
        for l in needed {
            if !self.placements.values().any(|x| x == l) {
                return Err(EnvError::MissingLetter(*l));
            }
        }
        Ok(())
    }

    pub fn replacement(&self, n: u32) -> Replacement {
        match self.variant {
            Variant::Numerical { .. } => Replacement { from: Letter::A, after: 1, to: None },
            _ => Replacement { from: Letter::A, after: n, to: Some(Letter::B) },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct EnvState {
    pub agent_pos: Pos,
    pub counts: BTreeMap<Letter, u32>,
    /// The N in force for this episode.
    pub n: u32,
    pub steps: u32,
    pub terminated: bool,
}

impl EnvState {
    pub fn count(&self, l: Letter) -> u32 {
        self.counts.get(&l).copied().unwrap_or(0)
    }
}

#[derive(Debug, Clone)]
pub struct LetterEnv {
    config: LetterEnvConfig,
}

impl LetterEnv {
    pub fn new(config: LetterEnvConfig) -> Result<Self, EnvError> {
        config.validate()?;
        Ok(Self { config })
    }

    pub fn config(&self) -> &LetterEnvConfig {
        &self.config
    }

    pub fn reset(&self, rng: &mut impl Rng) -> EnvState {
        let n = match self.config.variant {
            Variant::Standard { n } | Variant::Conditional { n, .. } => n,
            Variant::Numerical { n: Some(n), .. } => n,
            Variant::Numerical { n: None, range: (lo, hi) } => rng.gen_range(lo..=hi),
        };
        EnvState {
            agent_pos: self.config.start,
            counts: BTreeMap::new(),
            n,
            steps: 0,
            terminated: false,
        }
    }

    /// Cell content at `pos` given what has been observed so far.
    pub fn cell(&self, state: &EnvState, pos: Pos) -> Option<Letter> {
        let l = *self.config.placements.get(&pos)?;
        let rep = self.config.replacement(state.n);
        if l == rep.from && state.count(l) >= rep.after {
            rep.to
        } else {
            Some(l)
        }
    }

    fn emit(&self, state: &EnvState, letter: Option<Letter>) -> Obs {
        match letter {
            None => Obs::Blank,
            Some(Letter::A) => match self.config.variant {
                Variant::Numerical { .. } => Obs::A(state.n as f64),
                _ => Obs::A(1.0),
            },
            Some(Letter::B) => Obs::B,
            Some(Letter::C) => Obs::C,
            Some(Letter::D) => Obs::D,
        }
    }

    pub fn moved(&self, pos: Pos, action: Action) -> Pos {
        let (r, c) = pos;
        match action {
            Action::Up if r > 0 => (r - 1, c),
            Action::Down if r + 1 < self.config.rows => (r + 1, c),
            Action::Left if c > 0 => (r, c - 1),
            Action::Right if c + 1 < self.config.cols => (r, c + 1),
            _ => pos,
        }
    }

    /// Moves the agent and reports what it now sees.
    pub fn step(&self, state: &mut EnvState, action: Action) -> Result<Obs, EnvError> {
        if state.terminated {
            return Err(EnvError::Terminated);
        }
        state.agent_pos = self.moved(state.agent_pos, action);
        let letter = self.cell(state, state.agent_pos);
        let obs = self.emit(state, letter);
        if let Some(l) = letter {
            *state.counts.entry(l).or_insert(0) += 1;
        }
        state.steps += 1;
        if state.steps >= self.config.step_cap {
            state.terminated = true;
        }
        Ok(obs)
    }

    /// Shortest walk from `from` to `to` that only crosses cells reported blank by `blank`.
    pub fn path(&self, from: Pos, to: Pos, blank: impl Fn(Pos) -> bool) -> Option<Vec<Action>> {
        use std::collections::VecDeque;
        let mut prev: BTreeMap<Pos, (Pos, Action)> = BTreeMap::new();
        let mut queue = VecDeque::from([from]);
        while let Some(p) = queue.pop_front() {
            if p == to {
                let mut out = Vec::new();
                let mut cur = to;
                while cur != from {
                    let (q, a) = prev[&cur];
                    out.push(a);
                    cur = q;
                }
                out.reverse();
                return Some(out);
            }
            for a in Action::ALL {
                let q = self.moved(p, a);
                if q == p || q == from || prev.contains_key(&q) {
                    continue;
                }
                if q != to && !blank(q) {
                    continue;
                }
                prev.insert(q, (p, a));
                queue.push_back(q);
            }
        }
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn rng() -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(7)
    }

    fn walk_to(env: &LetterEnv, s: &mut EnvState, to: Pos) -> Vec<Obs> {
        let path = env
            .path(s.agent_pos, to, |p| env.cell(s, p).is_none())
            .expect("reachable");
        path.into_iter().map(|a| env.step(s, a).unwrap()).collect()
    }

    #[test]
    fn numerical_a_emits_n_once() {
        let env = LetterEnv::new(LetterEnvConfig::numerical(Some(4))).unwrap();
        let mut s = env.reset(&mut rng());
        let obs = walk_to(&env, &mut s, (1, 4));
        assert_eq!(*obs.last().unwrap(), Obs::A(4.0));
        assert_eq!(obs.last().unwrap().event(), Event::new().with("a", 4.0));
        env.step(&mut s, Action::Left).unwrap();
        assert_eq!(env.step(&mut s, Action::Right).unwrap(), Obs::Blank);
    }

    #[test]
    fn walls_are_no_ops() {
        let env = LetterEnv::new(LetterEnvConfig::standard(1)).unwrap();
        let mut s = env.reset(&mut rng());
        assert_eq!(env.step(&mut s, Action::Up).unwrap(), Obs::Blank);
        assert_eq!(s.agent_pos, (0, 0));
        assert_eq!(env.step(&mut s, Action::Left).unwrap().event(), Event::new().with("blank", 1.0));
    }

    #[test]
    fn reset_is_deterministic() {
        let env = LetterEnv::new(LetterEnvConfig::standard(1)).unwrap();
        assert_eq!(env.reset(&mut rng()), env.reset(&mut rng()));
        let env = LetterEnv::new(LetterEnvConfig::numerical(None)).unwrap();
        assert_eq!(env.reset(&mut rng()), env.reset(&mut rng()));
    }

    #[test]
    fn sampled_n_stays_in_range() {
        let env = LetterEnv::new(LetterEnvConfig::numerical(None)).unwrap();
        let mut r = rng();
        for _ in 0..200 {
            let n = env.reset(&mut r).n;
            assert!((1..=10).contains(&n));
        }
    }

    #[test]
    fn a_turns_into_b_after_n_observations() {
        for n in 1..=3 {
            let env = LetterEnv::new(LetterEnvConfig::standard(n)).unwrap();
            let mut s = env.reset(&mut rng());
            walk_to(&env, &mut s, (1, 4));
            let mut seen = vec![Obs::A(1.0)];
            for _ in 0..n {
                env.step(&mut s, Action::Left).unwrap();
                seen.push(env.step(&mut s, Action::Right).unwrap());
            }
            let first_b = seen.iter().position(|o| *o == Obs::B).unwrap();
            assert_eq!(first_b, n as usize);
        }
    }

    #[test]
    fn conditional_a_is_plain() {
        let env = LetterEnv::new(LetterEnvConfig::conditional(2, 3)).unwrap();
        let mut s = env.reset(&mut rng());
        assert_eq!(*walk_to(&env, &mut s, (1, 4)).last().unwrap(), Obs::A(1.0));
    }

    #[test]
    fn step_cap_terminates() {
        let mut cfg = LetterEnvConfig::standard(1);
        cfg.step_cap = 3;
        let env = LetterEnv::new(cfg).unwrap();
        let mut s = env.reset(&mut rng());
        for _ in 0..3 {
            env.step(&mut s, Action::Up).unwrap();
        }
        assert!(s.terminated);
        assert_eq!(env.step(&mut s, Action::Up), Err(EnvError::Terminated));
    }

    #[test]
    fn invalid_configs_are_rejected() {
        let mut cfg = LetterEnvConfig::standard(1);
        cfg.placements.insert((9, 9), Letter::B);
        assert_eq!(LetterEnv::new(cfg).unwrap_err(), EnvError::OutOfBounds(9, 9));
        assert_eq!(LetterEnv::new(LetterEnvConfig::standard(0)).unwrap_err(), EnvError::ZeroN);
        assert_eq!(LetterEnv::new(LetterEnvConfig::conditional(1, 0)).unwrap_err(), EnvError::ZeroM);
        let mut cfg = LetterEnvConfig::numerical(None);
        cfg.placements.remove(&(4, 1));
        assert_eq!(LetterEnv::new(cfg).unwrap_err(), EnvError::MissingLetter(Letter::B));
    }
}
