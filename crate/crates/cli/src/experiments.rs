//! Training sweeps and their CSV outputs.
//!
//! Every training experiment writes, under its output directory:
//! - `config.resolved.ini`: the configuration actually used
//! - `runs.csv`: `experiment,n,method,seed,final_success,episodes_to_threshold,reached`
//! - `summary.csv`: per `(n, method)` means and standard deviations over seeds
//! - `curves/<method>_n<N>_s<seed>.csv`: `episode,success,steps,total_reward,epsilon`
//!
//! The visibility experiment also writes `rolling.csv`
//! (`method,episode,mean,std` of the rolling success rate across seeds).

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use rml_core::{corpus, parse_specification, validate, Specification};
use rml_rl::{
    train, AgentConfig, CountingRewardAutomaton, CraTask, EpisodeOutcome, Hidden, LetterEnv, LetterEnvConfig,
    RewardConfig, RmlBridge, TrainError, Variant,
};
use thiserror::Error;

use crate::config::{ConfigError, Experiment, Method, RunConfig};
use crate::stats::{episodes_to_threshold, final_success, first_at_least, longest_run_at_least, mean_std, rolling};

pub const OUTPUT_ENV: &str = "RMLRM_OUTPUT";

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("specification {0}: {1}")]
    Spec(String, String),
    #[error("{method} N={n} seed={seed}: {source}")]
    Train {
        method: Method,
        n: u32,
        seed: u64,
        source: TrainError,
    },
    #[error("{0}")]
    Env(#[from] rml_rl::EnvError),
    #[error("writing {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("writing csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("the {0} experiment does not train agents")]
    NotTraining(Experiment),
}

fn io(path: &Path) -> impl FnOnce(std::io::Error) -> ExperimentError + '_ {
    move |source| ExperimentError::Io {
        path: path.to_path_buf(),
        source,
    }
}

/// Output directory for `cfg`, placed under `$RMLRM_OUTPUT` when it is set and the path is relative.
pub fn output_dir(cfg: &RunConfig) -> PathBuf {
    match std::env::var_os(OUTPUT_ENV) {
        Some(root) if cfg.output.is_relative() => PathBuf::from(root).join(&cfg.output),
        _ => cfg.output.clone(),
    }
}

fn parse_checked(name: &str, text: &str) -> Result<Specification, ExperimentError> {
    let spec = parse_specification(text).map_err(|e| ExperimentError::Spec(name.into(), e.to_string()))?;
    let errs = validate(&spec);
    if let Some(e) = errs.first() {
        return Err(ExperimentError::Spec(name.into(), e.to_string()));
    }
    Ok(spec)
}

/// The specification a run monitors.
pub fn load_spec(cfg: &RunConfig, env: &LetterEnvConfig) -> Result<Specification, ExperimentError> {
    if let Some(p) = &cfg.spec {
        let text = fs::read_to_string(p).map_err(io(p))?;
        return parse_checked(&p.display().to_string(), &text);
    }
    match env.variant {
        Variant::Numerical { .. } => parse_checked("numerical", corpus::NUMERICAL),
        Variant::Standard { .. } => parse_checked("letter_standard", corpus::LETTER_STANDARD),
        Variant::Conditional { m, .. } => parse_checked("conditional_task", &corpus::conditional_task(m)),
    }
}

/// The environment for sweep value `n`.
pub fn env_for(cfg: &RunConfig, n: u32) -> LetterEnvConfig {
    let mut env = cfg.env.clone();
    match (cfg.experiment, &mut env.variant) {
        (Experiment::Flexibility, Variant::Numerical { n: slot, .. }) => *slot = Some(n),
        (Experiment::Conditional, Variant::Conditional { n: slot, .. }) => *slot = n,
        _ => {}
    }
    env
}

fn sweep_values(cfg: &RunConfig) -> Vec<u32> {
    match (cfg.experiment, &cfg.env.variant) {
        (Experiment::Visibility, Variant::Numerical { n: Some(n), .. }) => vec![*n],
        (Experiment::Visibility, _) => vec![0],
        _ => cfg.sweep.clone(),
    }
}

/// Trains one method once.
pub fn run_method(
    cfg: &RunConfig,
    method: Method,
    env: &LetterEnvConfig,
    spec: &Specification,
    seed: u64,
) -> Result<Vec<EpisodeOutcome>, TrainError> {
    let letter_env = LetterEnv::new(env.clone()).map_err(rml_rl::BridgeError::from)?;
    let agent: &AgentConfig = &cfg.agents[&method];
    let quiet = RewardConfig {
        r_transition: 0.0,
        r_novelty: 0.0,
        ..cfg.rewards.clone()
    };
    match method {
        Method::Rml => train(&mut RmlBridge::new(letter_env, spec.clone(), cfg.rewards.clone())?, agent, cfg.episodes, seed),
        Method::RmlAblated => train(&mut RmlBridge::new(letter_env, spec.clone(), quiet)?, agent, cfg.episodes, seed),
        Method::RmlGym => train(&mut Hidden(RmlBridge::new(letter_env, spec.clone(), quiet)?), agent, cfg.episodes, seed),
        Method::CraQl | Method::CraCql => {
            let machine = CountingRewardAutomaton::numerical(cfg.cra_max_n);
            train(&mut CraTask::new(letter_env, machine, method == Method::CraCql), agent, cfg.episodes, seed)
        }
    }
}

#[derive(Debug, Clone)]
pub struct Run {
    pub n: u32,
    pub method: Method,
    pub seed: u64,
    pub curve: Vec<EpisodeOutcome>,
}

impl Run {
    pub fn successes(&self) -> Vec<bool> {
        self.curve.iter().map(|e| e.success).collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunRow {
    pub n: u32,
    pub method: Method,
    pub seed: u64,
    pub final_success: f64,
    /// Censored at the episode count when the threshold was never reached.
    pub episodes_to_threshold: usize,
    pub reached: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub n: u32,
    pub method: Method,
    pub seeds: usize,
    pub final_success_mean: f64,
    pub final_success_std: f64,
    pub threshold_mean: f64,
    pub threshold_std: f64,
    pub reached: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VisibilityRow {
    pub method: Method,
    /// First episode (1-based) at which the seed-mean rolling success reaches the level.
    pub cross_050: Option<usize>,
    pub cross_095: Option<usize>,
    /// Lowest seed-mean rolling success from the 0.95 crossing on.
    pub min_after_095: Option<f64>,
    /// Longest stretch of episodes with seed-mean rolling success at least 0.9.
    pub longest_090: usize,
    pub final_mean: f64,
}

#[derive(Debug, Clone)]
pub struct Results {
    pub dir: PathBuf,
    pub runs: Vec<Run>,
    pub rows: Vec<RunRow>,
    pub summary: Vec<SummaryRow>,
    /// Seed-mean and standard deviation of rolling success per method (visibility only).
    pub rolling: BTreeMap<Method, (Vec<f64>, Vec<f64>)>,
    pub visibility: Vec<VisibilityRow>,
}

impl Results {
    pub fn summary_for(&self, n: u32, method: Method) -> Option<&SummaryRow> {
        self.summary.iter().find(|r| r.n == n && r.method == method)
    }
}

/// Runs every `(n, method, seed)` job of a training experiment and writes its outputs.
pub fn run_experiment(cfg: &RunConfig) -> Result<Results, ExperimentError> {
    if !matches!(
        cfg.experiment,
        Experiment::Flexibility | Experiment::Visibility | Experiment::Conditional
    ) {
        return Err(ExperimentError::NotTraining(cfg.experiment));
    }
    cfg.validate()?;
    let mut jobs = Vec::new();
    for n in sweep_values(cfg) {
        for &method in &cfg.methods {
            for &seed in &cfg.seeds {
                jobs.push((n, method, seed));
            }
        }
    }
    let specs: BTreeMap<u32, Specification> = sweep_values(cfg)
        .into_iter()
        .map(|n| Ok((n, load_spec(cfg, &env_for(cfg, n))?)))
        .collect::<Result<_, ExperimentError>>()?;
    let runs: Vec<Run> = jobs
        .par_iter()
        .map(|&(n, method, seed)| {
            let curve = run_method(cfg, method, &env_for(cfg, n), &specs[&n], seed)
                .map_err(|source| ExperimentError::Train { method, n, seed, source })?;
            Ok(Run { n, method, seed, curve })
        })
        .collect::<Result<_, ExperimentError>>()?;

    let rows: Vec<RunRow> = runs
        .iter()
        .map(|r| {
            let s = r.successes();
            let hit = episodes_to_threshold(&s, cfg.window, cfg.threshold);
            RunRow {
                n: r.n,
                method: r.method,
                seed: r.seed,
                final_success: final_success(&s, cfg.window),
                episodes_to_threshold: hit.unwrap_or(cfg.episodes),
                reached: hit.is_some(),
            }
        })
        .collect();

    let mut summary = Vec::new();
    for n in sweep_values(cfg) {
        for &method in &cfg.methods {
            let group: Vec<&RunRow> = rows.iter().filter(|r| r.n == n && r.method == method).collect();
            let fin: Vec<f64> = group.iter().map(|r| r.final_success).collect();
            let thr: Vec<f64> = group.iter().map(|r| r.episodes_to_threshold as f64).collect();
            let (fm, fs) = mean_std(&fin);
            let (tm, ts) = mean_std(&thr);
            summary.push(SummaryRow {
                n,
                method,
                seeds: group.len(),
                final_success_mean: fm,
                final_success_std: fs,
                threshold_mean: tm,
                threshold_std: ts,
                reached: group.iter().filter(|r| r.reached).count(),
            });
        }
    }

    let mut rolling_curves = BTreeMap::new();
    let mut visibility = Vec::new();
    if cfg.experiment == Experiment::Visibility {
        for &method in &cfg.methods {
            let per_seed: Vec<Vec<f64>> = runs
                .iter()
                .filter(|r| r.method == method)
                .map(|r| rolling(&r.successes(), cfg.window))
                .collect();
            let (mean, std): (Vec<f64>, Vec<f64>) = (0..cfg.episodes)
                .map(|e| mean_std(&per_seed.iter().map(|c| c[e]).collect::<Vec<_>>()))
                .unzip();
            let c95 = first_at_least(&mean, 0.95);
            visibility.push(VisibilityRow {
                method,
                cross_050: first_at_least(&mean, 0.5).map(|i| i + 1),
                cross_095: c95.map(|i| i + 1),
                min_after_095: c95.map(|i| mean[i..].iter().copied().fold(f64::INFINITY, f64::min)),
                longest_090: longest_run_at_least(&mean, 0.9),
                final_mean: mean.last().copied().unwrap_or(0.0),
            });
            rolling_curves.insert(method, (mean, std));
        }
    }

    let results = Results {
        dir: output_dir(cfg),
        runs,
        rows,
        summary,
        rolling: rolling_curves,
        visibility,
    };
    write_results(cfg, &results)?;
    Ok(results)
}

fn opt<T: ToString>(x: Option<T>) -> String {
    x.map(|v| v.to_string()).unwrap_or_default()
}

fn write_results(cfg: &RunConfig, res: &Results) -> Result<(), ExperimentError> {
    let dir = &res.dir;
    fs::create_dir_all(dir).map_err(io(dir))?;
    let snap = dir.join("config.resolved.ini");
    fs::write(&snap, cfg.to_ini_string()).map_err(io(&snap))?;

    let exp = cfg.experiment.name();
    let mut w = csv::Writer::from_path(dir.join("runs.csv"))?;
    w.write_record(["experiment", "n", "method", "seed", "final_success", "episodes_to_threshold", "reached"])?;
    for r in &res.rows {
        w.write_record([
            exp.to_string(),
            r.n.to_string(),
            r.method.to_string(),
            r.seed.to_string(),
            r.final_success.to_string(),
            r.episodes_to_threshold.to_string(),
            r.reached.to_string(),
        ])?;
    }
    w.flush().map_err(io(dir))?;

    let mut w = csv::Writer::from_path(dir.join("summary.csv"))?;
    w.write_record([
        "experiment",
        "n",
        "method",
        "seeds",
        "final_success_mean",
        "final_success_std",
        "threshold_mean",
        "threshold_std",
        "reached",
    ])?;
    for r in &res.summary {
        w.write_record([
            exp.to_string(),
            r.n.to_string(),
            r.method.to_string(),
            r.seeds.to_string(),
            r.final_success_mean.to_string(),
            r.final_success_std.to_string(),
            r.threshold_mean.to_string(),
            r.threshold_std.to_string(),
            r.reached.to_string(),
        ])?;
    }
    w.flush().map_err(io(dir))?;

    if cfg.experiment == Experiment::Visibility {
        let mut w = csv::Writer::from_path(dir.join("rolling.csv"))?;
        w.write_record(["method", "episode", "mean", "std"])?;
        for (m, (mean, std)) in &res.rolling {
            for (e, (a, b)) in mean.iter().zip(std).enumerate() {
                w.write_record([m.to_string(), (e + 1).to_string(), a.to_string(), b.to_string()])?;
            }
        }
        w.flush().map_err(io(dir))?;

        let mut w = csv::Writer::from_path(dir.join("visibility.csv"))?;
        w.write_record(["method", "cross_050", "cross_095", "min_after_095", "longest_090", "final_mean"])?;
        for r in &res.visibility {
            w.write_record([
                r.method.to_string(),
                opt(r.cross_050),
                opt(r.cross_095),
                opt(r.min_after_095),
                r.longest_090.to_string(),
                r.final_mean.to_string(),
            ])?;
        }
        w.flush().map_err(io(dir))?;
    }

    if cfg.curves {
        let cdir = dir.join("curves");
        fs::create_dir_all(&cdir).map_err(io(&cdir))?;
        for r in &res.runs {
            let mut w = csv::Writer::from_path(cdir.join(format!("{}_n{}_s{}.csv", r.method, r.n, r.seed)))?;
            w.write_record(["episode", "success", "steps", "total_reward", "epsilon"])?;
            for (i, e) in r.curve.iter().enumerate() {
                w.write_record([
                    (i + 1).to_string(),
                    (e.success as u8).to_string(),
                    e.steps.to_string(),
                    e.total_reward.to_string(),
                    e.epsilon.to_string(),
                ])?;
            }
            w.flush().map_err(io(&cdir))?;
        }
    }
    Ok(())
}
