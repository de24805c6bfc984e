//! Counting reward automaton for the numerical task, and the QL/CQL task wrapper.

use std::collections::{BTreeSet, HashSet};
use std::fmt;

use rand_chacha::ChaCha8Rng;
use rml_core::Verdict;
use thiserror::Error;

use crate::agent::{Experience, Task, TaskStep, TrainError};
use crate::env::{Action, EnvState, LetterEnv, Obs, Pos};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CraState {
    U0,
    U1,
    U2,
    Success,
    Failure,
}

impl CraState {
    pub fn is_final(self) -> bool {
        matches!(self, CraState::Success | CraState::Failure)
    }
}

impl fmt::Display for CraState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            CraState::U0 => "u0",
            CraState::U1 => "u1",
            CraState::U2 => "u2",
            CraState::Success => "success",
            CraState::Failure => "failure",
        };
        f.write_str(s)
    }
}

/// Observation classes the machine distinguishes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ObsClass {
    A,
    B,
    C,
    D,
    Blank,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CounterGuard {
    Any,
    Zero,
    NonZero,
}

impl CounterGuard {
    fn holds(self, c: u32) -> bool {
        match self {
            CounterGuard::Any => true,
            CounterGuard::Zero => c == 0,
            CounterGuard::NonZero => c != 0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Increment {
    By(i32),
    /// Add the N carried by an A observation.
    Observed,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CraTransition {
    pub from: CraState,
    pub obs: &'static [ObsClass],
    pub guard: CounterGuard,
    /// Test the guard on the counter after the increment instead of before.
    pub guard_after: bool,
    pub increment: Increment,
    pub reward: f64,
    pub to: CraState,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CraError {
    #[error("observation {0} is outside the machine's alphabet")]
    UndefinedObservation(String),
    #[error("no transition from {0} on {1} with counter {2}")]
    NoTransition(CraState, String, u32),
    #[error("machine already finished in {0}")]
    Finished(CraState),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CraConfig {
    pub state: CraState,
    pub counter: u32,
}

impl CraConfig {
    pub const INITIAL: CraConfig = CraConfig { state: CraState::U0, counter: 0 };
}

#[derive(Debug, Clone, PartialEq)]
pub struct CraStep {
    pub next: CraConfig,
    pub reward: f64,
    pub done: bool,
    pub success: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CountingRewardAutomaton {
    pub transitions: Vec<CraTransition>,
    /// Largest N an A observation may carry.
    pub max_n: u32,
}

impl CountingRewardAutomaton {
    /// The A(N) B C D^N machine, with A values defined up to `max_n`.
    pub fn numerical(max_n: u32) -> Self {
        use CounterGuard::*;
        use CraState::*;
        use ObsClass as O;
        let t = |from, obs, guard, guard_after, increment, reward, to| CraTransition {
            from,
            obs,
            guard,
            guard_after,
            increment,
            reward,
            to,
        };
        let transitions = vec![
            t(U0, &[O::Blank], Any, false, Increment::By(0), 0.0, U0),
            t(U0, &[O::A], Zero, false, Increment::Observed, 1.0, U0),
            t(U0, &[O::B], NonZero, false, Increment::By(0), 1.0, U1),
            t(U0, &[O::A], NonZero, false, Increment::By(0), -1.0, Failure),
            t(U0, &[O::B], Zero, false, Increment::By(0), -1.0, Failure),
            t(U0, &[O::C, O::D], Any, false, Increment::By(0), -1.0, Failure),
            t(U1, &[O::Blank], Any, false, Increment::By(0), 0.0, U1),
            t(U1, &[O::C], Any, false, Increment::By(0), 1.0, U2),
            t(U1, &[O::A, O::B, O::D], Any, false, Increment::By(0), -1.0, Failure),
            t(U2, &[O::Blank], Any, false, Increment::By(0), 0.0, U2),
            t(U2, &[O::D], NonZero, true, Increment::By(-1), 1.0, U2),
            t(U2, &[O::D], Zero, true, Increment::By(-1), 1.0, Success),
            t(U2, &[O::A, O::B, O::C], Any, false, Increment::By(0), -1.0, Failure),
        ];
        Self { transitions, max_n }
    }

    fn classify(&self, o: Obs) -> Result<(ObsClass, u32), CraError> {
        Ok(match o {
            Obs::A(x) => {
                if x.fract() != 0.0 || x < 1.0 || x > self.max_n as f64 {
                    return Err(CraError::UndefinedObservation(o.to_string()));
                }
                (ObsClass::A, x as u32)
            }
            Obs::B => (ObsClass::B, 0),
            Obs::C => (ObsClass::C, 0),
            Obs::D => (ObsClass::D, 0),
            Obs::Blank => (ObsClass::Blank, 0),
        })
    }

    /// Transitions whose guards hold for `obs` at `c`.
    pub fn enabled(&self, c: CraConfig, obs: Obs) -> Result<Vec<&CraTransition>, CraError> {
        let (class, n) = self.classify(obs)?;
        Ok(self
            .transitions
            .iter()
            .filter(|t| t.from == c.state && t.obs.contains(&class))
            .filter(|t| match apply(c.counter, t.increment, n) {
                Some(after) => t.guard.holds(if t.guard_after { after } else { c.counter }),
                None => false,
            })
            .collect())
    }

    pub fn step(&self, c: CraConfig, obs: Obs) -> Result<CraStep, CraError> {
        if c.state.is_final() {
            return Err(CraError::Finished(c.state));
        }
        let (_, n) = self.classify(obs)?;
        let t = self
            .enabled(c, obs)?
            .into_iter()
            .next()
            .ok_or_else(|| CraError::NoTransition(c.state, obs.to_string(), c.counter))?;
        let next = CraConfig {
            state: t.to,
            counter: apply(c.counter, t.increment, n).expect("guarded"),
        };
        Ok(CraStep {
            next,
            reward: t.reward,
            done: t.to.is_final(),
            success: t.to == CraState::Success,
        })
    }

    /// Like [`Self::step`], with an undefined observation read as failure.
    pub fn step_or_fail(&self, c: CraConfig, obs: Obs) -> Result<CraStep, CraError> {
        match self.step(c, obs) {
            Err(CraError::UndefinedObservation(_)) => Ok(CraStep {
                next: CraConfig { state: CraState::Failure, counter: c.counter },
                reward: -1.0,
                done: true,
                success: false,
            }),
            r => r,
        }
    }
}

fn apply(counter: u32, inc: Increment, n: u32) -> Option<u32> {
    match inc {
        Increment::Observed => counter.checked_add(n),
        Increment::By(d) => counter.checked_add_signed(d),
    }
}

pub type CraKey = (Pos, CraConfig);

/// The numerical LetterEnv driven by the automaton, for QL or counterfactual QL.
#[derive(Debug)]
pub struct CraTask {
    env: LetterEnv,
    machine: CountingRewardAutomaton,
    counterfactual: bool,
    novelty_bonus: f64,
    seen: HashSet<CraKey>,
    /// Non-final machine configurations reached so far in the run.
    configs: BTreeSet<CraConfig>,
    episode: Option<(EnvState, CraConfig, bool)>,
}

impl CraTask {
    pub const NOVELTY_BONUS: f64 = 0.1;

    pub fn new(env: LetterEnv, machine: CountingRewardAutomaton, counterfactual: bool) -> Self {
        Self {
            env,
            machine,
            counterfactual,
            novelty_bonus: Self::NOVELTY_BONUS,
            seen: HashSet::new(),
            configs: [CraConfig::INITIAL].into(),
            episode: None,
        }
    }

    pub fn configs(&self) -> &BTreeSet<CraConfig> {
        &self.configs
    }
}

fn verdict_of(s: &CraStep) -> Verdict {
    match s.next.state {
        CraState::Success => Verdict::CurrentlyTrue,
        CraState::Failure => Verdict::False,
        _ => Verdict::CurrentlyFalse,
    }
}

impl Task for CraTask {
    type Key = CraKey;

    fn reset(&mut self, rng: &mut ChaCha8Rng) -> CraKey {
        let env = self.env.reset(rng);
        let key = (env.agent_pos, CraConfig::INITIAL);
        self.episode = Some((env, CraConfig::INITIAL, false));
        key
    }

    fn step(&mut self, action: Action) -> Result<TaskStep<CraKey>, TrainError> {
        let (env, config, done) = match self.episode.as_mut() {
            Some(ep) if !ep.2 => ep,
            _ => return Err(CraError::Finished(CraState::Failure).into()),
        };
        let from = env.agent_pos;
        let obs = self.env.step(env, action).map_err(crate::bridge::BridgeError::from)?;
        let to = env.agent_pos;
        let real = self.machine.step_or_fail(*config, obs)?;

        let mut counterfactual = Vec::new();
        if self.counterfactual {
            for &c in self.configs.iter().filter(|c| **c != *config) {
                let s = self.machine.step_or_fail(c, obs)?;
                counterfactual.push(Experience {
                    state: (from, c),
                    action,
                    reward: s.reward,
                    next: (to, s.next),
                    terminal: s.done,
                });
            }
        }

        let next = (to, real.next);
        let mut reward = real.reward;
        if self.seen.insert(next) {
            reward += self.novelty_bonus;
        }
        if !real.done {
            self.configs.insert(real.next);
        }
        *config = real.next;
        *done = real.done || env.terminated;
        Ok(TaskStep {
            next,
            reward,
            done: *done,
            terminal: real.done,
            success: real.success,
            verdict: verdict_of(&real),
            counterfactual,
        })
    }
}
