//! Tabular Q-learning and the training loop shared by every method.

use std::collections::HashMap;
use std::hash::Hash;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rml_core::Verdict;
use thiserror::Error;

use crate::bridge::{BridgeError, ExtendedState, RmlBridge, StepOutcome};
use crate::cra::CraError;
use crate::env::{Action, Pos};
use crate::rng::stream;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AgentConfig {
    pub alpha: f64,
    pub epsilon0: f64,
    pub epsilon_decay: f64,
    pub gamma: f64,
}

#[derive(Debug, Error, PartialEq)]
pub enum AgentConfigError {
    #[error("alpha must lie in (0, 1], got {0}")]
    Alpha(f64),
    #[error("gamma must lie in (0, 1], got {0}")]
    Gamma(f64),
    #[error("epsilon0 must lie in [0, 1], got {0}")]
    Epsilon(f64),
    #[error("epsilon decay must lie in [0, 1], got {0}")]
    Decay(f64),
}

impl AgentConfig {
    pub const DEFAULT: AgentConfig = AgentConfig {
        alpha: 0.5,
        epsilon0: 0.4,
        epsilon_decay: 0.99,
        gamma: 0.9,
    };

    pub const RMLGYM: AgentConfig = AgentConfig {
        alpha: 0.01,
        epsilon0: 0.75,
        epsilon_decay: 0.999,
        gamma: 0.9,
    };

    pub fn validate(&self) -> Result<(), AgentConfigError> {
        let unit = |x: f64| x > 0.0 && x <= 1.0;
        if !unit(self.alpha) {
            return Err(AgentConfigError::Alpha(self.alpha));
        }
        if !unit(self.gamma) {
            return Err(AgentConfigError::Gamma(self.gamma));
        }
        if !(0.0..=1.0).contains(&self.epsilon0) {
            return Err(AgentConfigError::Epsilon(self.epsilon0));
        }
        if !(0.0..=1.0).contains(&self.epsilon_decay) {
            return Err(AgentConfigError::Decay(self.epsilon_decay));
        }
        Ok(())
    }

    /// Exploration rate for episode `k`, counting from 0.
    pub fn epsilon(&self, k: usize) -> f64 {
        (self.epsilon0 * self.epsilon_decay.powi(k as i32)).clamp(0.0, 1.0)
    }
}

impl Default for AgentConfig {
    fn default() -> Self {
        Self::DEFAULT
    }
}

/// Action values; unseen entries read as 0.
#[derive(Debug, Clone)]
pub struct QTable<K> {
    rows: HashMap<K, [f64; 4]>,
}

impl<K> Default for QTable<K> {
    fn default() -> Self {
        Self { rows: HashMap::new() }
    }
}

impl<K: Hash + Eq + Clone> QTable<K> {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn row(&self, s: &K) -> [f64; 4] {
        self.rows.get(s).copied().unwrap_or([0.0; 4])
    }

    pub fn get(&self, s: &K, a: Action) -> f64 {
        self.row(s)[a.index()]
    }

    pub fn set(&mut self, s: &K, a: Action, v: f64) {
        self.rows.entry(s.clone()).or_insert([0.0; 4])[a.index()] = v;
    }

    pub fn max(&self, s: &K) -> f64 {
        self.row(s).into_iter().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn keys(&self) -> impl Iterator<Item = &K> {
        self.rows.keys()
    }
}

/// Epsilon-greedy choice. Ties among greedy actions are broken uniformly with `tie`.
pub fn select_action<K: Hash + Eq + Clone>(
    q: &QTable<K>,
    s: &K,
    epsilon: f64,
    rng: &mut impl Rng,
    tie: &mut impl Rng,
) -> Action {
    if rng.gen::<f64>() < epsilon {
        return Action::ALL[rng.gen_range(0..4)];
    }
    let row = q.row(s);
    let best = q.max(s);
    let ties: Vec<Action> = Action::ALL.into_iter().filter(|a| row[a.index()] == best).collect();
    ties[tie.gen_range(0..ties.len())]
}

#[derive(Debug, Clone, PartialEq)]
pub struct Experience<K> {
    pub state: K,
    pub action: Action,
    pub reward: f64,
    pub next: K,
    /// No bootstrapping from `next`.
    pub terminal: bool,
}

pub fn q_update<K: Hash + Eq + Clone>(q: &mut QTable<K>, e: &Experience<K>, cfg: &AgentConfig) {
    let future = if e.terminal { 0.0 } else { cfg.gamma * q.max(&e.next) };
    let old = q.get(&e.state, e.action);
    q.set(&e.state, e.action, old + cfg.alpha * (e.reward + future - old));
}

#[derive(Debug, Error)]
pub enum TrainError {
    #[error(transparent)]
    Bridge(#[from] BridgeError),
    #[error(transparent)]
    Cra(#[from] CraError),
    #[error(transparent)]
    Config(#[from] AgentConfigError),
}

#[derive(Debug, Clone, PartialEq)]
pub struct TaskStep<K> {
    pub next: K,
    pub reward: f64,
    /// The episode is over.
    pub done: bool,
    /// The episode ended on a verdict rather than the step cap.
    pub terminal: bool,
    pub success: bool,
    pub verdict: Verdict,
    /// Further experiences to learn from besides the real one.
    pub counterfactual: Vec<Experience<K>>,
}

/// Anything the training loop can drive.
pub trait Task {
    type Key: Hash + Eq + Clone;
    fn reset(&mut self, rng: &mut ChaCha8Rng) -> Self::Key;
    fn step(&mut self, action: Action) -> Result<TaskStep<Self::Key>, TrainError>;
}

fn from_outcome<K>(o: &StepOutcome, next: K) -> TaskStep<K> {
    TaskStep {
        next,
        reward: o.reward,
        done: o.done,
        terminal: o.terminal,
        success: o.success,
        verdict: o.verdict,
        counterfactual: Vec::new(),
    }
}

impl Task for RmlBridge {
    type Key = ExtendedState;

    fn reset(&mut self, rng: &mut ChaCha8Rng) -> ExtendedState {
        self.extended_reset(rng)
    }

    fn step(&mut self, action: Action) -> Result<TaskStep<ExtendedState>, TrainError> {
        let o = self.extended_step(action)?;
        Ok(from_outcome(&o, o.state.clone()))
    }
}

/// The same run with the monitor state withheld from the agent.
#[derive(Debug)]
pub struct Hidden(pub RmlBridge);

impl Task for Hidden {
    type Key = Pos;

    fn reset(&mut self, rng: &mut ChaCha8Rng) -> Pos {
        self.0.extended_reset(rng).env_state
    }

    fn step(&mut self, action: Action) -> Result<TaskStep<Pos>, TrainError> {
        let o = self.0.extended_step(action)?;
        Ok(from_outcome(&o, o.state.env_state))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EpisodeOutcome {
    pub success: bool,
    pub steps: usize,
    pub total_reward: f64,
    pub verdict_trace: Vec<Verdict>,
    pub epsilon: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Logged<K> {
    pub state: K,
    pub action: Action,
    pub reward: f64,
    pub next: K,
}

/// Trains a fresh Q-table for `episodes` episodes. All randomness comes from `seed`.
pub fn train<T: Task>(
    task: &mut T,
    cfg: &AgentConfig,
    episodes: usize,
    seed: u64,
) -> Result<Vec<EpisodeOutcome>, TrainError> {
    train_logged(task, cfg, episodes, seed, None).map(|(c, _)| c)
}

/// As [`train`], optionally recording every real transition.
pub fn train_logged<T: Task>(
    task: &mut T,
    cfg: &AgentConfig,
    episodes: usize,
    seed: u64,
    mut log: Option<&mut Vec<Logged<T::Key>>>,
) -> Result<(Vec<EpisodeOutcome>, QTable<T::Key>), TrainError> {
    cfg.validate()?;
    let mut env_rng = stream(seed, "env");
    let mut agent_rng = stream(seed, "agent");
    let mut tie_rng = stream(seed, "tie-break");
    let mut q = QTable::new();
    let mut curve = Vec::with_capacity(episodes);
    for k in 0..episodes {
        let epsilon = cfg.epsilon(k);
        let mut s = task.reset(&mut env_rng);
        let mut out = EpisodeOutcome {
            success: false,
            steps: 0,
            total_reward: 0.0,
            verdict_trace: Vec::new(),
            epsilon,
        };
        loop {
            let a = select_action(&q, &s, epsilon, &mut agent_rng, &mut tie_rng);
            let step = task.step(a)?;
            q_update(
                &mut q,
                &Experience {
                    state: s.clone(),
                    action: a,
                    reward: step.reward,
                    next: step.next.clone(),
                    terminal: step.terminal,
                },
                cfg,
            );
            for e in &step.counterfactual {
                q_update(&mut q, e, cfg);
            }
            if let Some(log) = log.as_deref_mut() {
                log.push(Logged {
                    state: s,
                    action: a,
                    reward: step.reward,
                    next: step.next.clone(),
                });
            }
            out.steps += 1;
            out.total_reward += step.reward;
            out.verdict_trace.push(step.verdict);
            out.success |= step.success;
            s = step.next;
            if step.done {
                break;
            }
        }
        curve.push(out);
    }
    Ok((curve, q))
}
