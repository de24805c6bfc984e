//! LetterEnv gridworlds, RML reward machines, and the tabular learners trained on them.

pub mod agent;
pub mod bridge;
pub mod cra;
pub mod env;
pub mod language;
pub mod rng;

pub use agent::{
    q_update, select_action, train, train_logged, AgentConfig, EpisodeOutcome, Experience, Hidden, QTable, Task,
    TrainError,
};
pub use bridge::{compute_reward, BridgeError, ExtendedState, RewardConfig, RmlBridge, StepOutcome};
pub use cra::{CountingRewardAutomaton, CraConfig, CraError, CraState, CraTask};
pub use env::{Action, EnvError, EnvState, Letter, LetterEnv, LetterEnvConfig, Obs, Pos, Variant};
pub use language::{expected_task_language, TaskLanguage};
