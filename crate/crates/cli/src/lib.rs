//! Experiment runner and offline tools for RML reward machines.

pub mod branches;
pub mod check;
pub mod config;
pub mod experiments;
pub mod plots;
pub mod stats;

pub use branches::{run_branch_analysis, BranchRow};
pub use check::{check_trace, CheckReport};
pub use config::{Experiment, Method, RunConfig};
pub use experiments::{run_experiment, Results};
pub use plots::emit_plots;
