//! The RML-extended MDP: a LetterEnv stepped in lockstep with a monitor.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::hash::Hash;
use std::sync::Arc;

use rand::Rng;
use rml_core::{Event, Monitor, MonitorError, MonitorState, Specification, Verdict};
use thiserror::Error;

use crate::env::{Action, EnvError, EnvState, LetterEnv, Obs, Pos};

/// The agent's view of the cross-product state.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ExtendedState {
    pub env_state: Pos,
    pub monitor_id: Arc<str>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RewardConfig {
    pub r_true: f64,
    pub r_currently_true: f64,
    pub r_currently_false: f64,
    pub r_false: f64,
    pub r_transition: f64,
    pub r_novelty: f64,
    pub terminal_verdicts: BTreeSet<Verdict>,
    pub success_verdicts: BTreeSet<Verdict>,
    /// Keep the novelty set across episodes of a run.
    pub novelty_per_run: bool,
}

impl Default for RewardConfig {
    fn default() -> Self {
        Self {
            r_true: 100.0,
            r_currently_true: 100.0,
            r_currently_false: 0.0,
            r_false: -40.0,
            r_transition: 10.0,
            r_novelty: 2.0,
            terminal_verdicts: [Verdict::False, Verdict::CurrentlyTrue, Verdict::True].into(),
            success_verdicts: [Verdict::CurrentlyTrue, Verdict::True].into(),
            novelty_per_run: true,
        }
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum RewardConfigError {
    #[error("terminal verdicts must include False")]
    FalseNotTerminal,
    #[error("success verdict {0} is neither terminal nor CurrentlyTrue")]
    BadSuccess(Verdict),
}

impl RewardConfig {
    /// Verdict rewards only: no transition or novelty bonus.
    pub fn verdict_only() -> Self {
        Self {
            r_transition: 0.0,
            r_novelty: 0.0,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<(), RewardConfigError> {
        if !self.terminal_verdicts.contains(&Verdict::False) {
            return Err(RewardConfigError::FalseNotTerminal);
        }
        for v in &self.success_verdicts {
            if !self.terminal_verdicts.contains(v) && *v != Verdict::CurrentlyTrue {
                return Err(RewardConfigError::BadSuccess(*v));
            }
        }
        Ok(())
    }

    pub fn base(&self, v: Verdict) -> f64 {
        match v {
            Verdict::True => self.r_true,
            Verdict::CurrentlyTrue => self.r_currently_true,
            Verdict::CurrentlyFalse => self.r_currently_false,
            Verdict::False => self.r_false,
        }
    }
}

/// Verdict reward, plus the transition bonus when the monitor moved, plus the
/// novelty bonus the first time `ext` is seen (which records it).
pub fn compute_reward<K: Hash + Eq + Clone>(
    cfg: &RewardConfig,
    verdict: Verdict,
    old_id: &str,
    new_id: &str,
    ext: &K,
    visited: &mut HashSet<K>,
) -> f64 {
    let mut r = cfg.base(verdict);
    if old_id != new_id {
        r += cfg.r_transition;
    }
    if visited.insert(ext.clone()) {
        r += cfg.r_novelty;
    }
    r
}

#[derive(Debug, Error)]
pub enum BridgeError {
    #[error("episode is finished; call extended_reset first")]
    Usage,
    #[error(transparent)]
    Env(#[from] EnvError),
    #[error(transparent)]
    Monitor(#[from] MonitorError),
    #[error(transparent)]
    Config(#[from] RewardConfigError),
}

/// Interned monitor states with a memo of their transitions.
#[derive(Debug, Default)]
struct StateCache {
    states: Vec<MonitorState>,
    index: HashMap<Arc<str>, usize>,
    steps: HashMap<(usize, Event), (usize, Verdict)>,
}

impl StateCache {
    fn intern(&mut self, s: MonitorState) -> usize {
        if let Some(&i) = self.index.get(s.id()) {
            return i;
        }
        let i = self.states.len();
        self.index.insert(s.id().clone(), i);
        self.states.push(s);
        i
    }

    fn step(&mut self, monitor: &Monitor, from: usize, ev: &Event) -> Result<(usize, Verdict), MonitorError> {
        if let Some(&hit) = self.steps.get(&(from, ev.clone())) {
            return Ok(hit);
        }
        let (next, v) = monitor.step(&self.states[from], ev)?;
        let to = self.intern(next);
        self.steps.insert((from, ev.clone()), (to, v));
        Ok((to, v))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StepOutcome {
    pub state: ExtendedState,
    pub reward: f64,
    pub done: bool,
    pub verdict: Verdict,
    pub success: bool,
    /// Ended by a terminal verdict rather than the step cap.
    pub terminal: bool,
    pub obs: Obs,
}

#[derive(Debug)]
struct Episode {
    env: EnvState,
    monitor: usize,
    done: bool,
}

/// One training run's environment, monitor and novelty memory.
#[derive(Debug)]
pub struct RmlBridge {
    env: LetterEnv,
    monitor: Monitor,
    rewards: RewardConfig,
    cache: StateCache,
    initial: usize,
    visited: HashSet<ExtendedState>,
    episode: Option<Episode>,
}

impl RmlBridge {
    pub fn new(env: LetterEnv, spec: Specification, rewards: RewardConfig) -> Result<Self, BridgeError> {
        rewards.validate()?;
        let monitor = Monitor::new(spec);
        let mut cache = StateCache::default();
        let initial = cache.intern(monitor.initial());
        Ok(Self {
            env,
            monitor,
            rewards,
            cache,
            initial,
            visited: HashSet::new(),
            episode: None,
        })
    }

    pub fn env(&self) -> &LetterEnv {
        &self.env
    }

    pub fn rewards(&self) -> &RewardConfig {
        &self.rewards
    }

    pub fn env_state(&self) -> Option<&EnvState> {
        self.episode.as_ref().map(|e| &e.env)
    }

    pub fn monitor_state(&self) -> Option<&MonitorState> {
        self.episode.as_ref().map(|e| &self.cache.states[e.monitor])
    }

    fn ext(&self, pos: Pos, monitor: usize) -> ExtendedState {
        ExtendedState {
            env_state: pos,
            monitor_id: self.cache.states[monitor].id().clone(),
        }
    }

    pub fn extended_reset(&mut self, rng: &mut impl Rng) -> ExtendedState {
        if !self.rewards.novelty_per_run {
            self.visited.clear();
        }
        let env = self.env.reset(rng);
        let ext = self.ext(env.agent_pos, self.initial);
        self.episode = Some(Episode {
            env,
            monitor: self.initial,
            done: false,
        });
        ext
    }

    pub fn extended_step(&mut self, action: Action) -> Result<StepOutcome, BridgeError> {
        let ep = match self.episode.as_mut() {
            Some(ep) if !ep.done => ep,
            _ => return Err(BridgeError::Usage),
        };
        let obs = self.env.step(&mut ep.env, action)?;
        let old = ep.monitor;
        let (new, verdict) = self.cache.step(&self.monitor, old, &obs.event())?;
        ep.monitor = new;
        let terminal = self.rewards.terminal_verdicts.contains(&verdict);
        ep.done = terminal || ep.env.terminated;
        let (done, pos) = (ep.done, ep.env.agent_pos);
        let ext = self.ext(pos, new);
        let reward = compute_reward(
            &self.rewards,
            verdict,
            self.cache.states[old].id(),
            self.cache.states[new].id(),
            &ext,
            &mut self.visited,
        );
        Ok(StepOutcome {
            state: ext,
            reward,
            done,
            verdict,
            success: self.rewards.success_verdicts.contains(&verdict),
            terminal,
            obs,
        })
    }
}
