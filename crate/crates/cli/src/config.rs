//! Run configuration files: flat INI sections.
//!
//! ```ini
//! [run]
//! experiment = flexibility
//! episodes = 1000
//! seeds = 0..19
//! sweep = 1..10
//! methods = rml, cra-ql, cra-cql
//!
//! [env]
//! variant = numerical
//! step_cap = 500
//!
//! [placements]
//! 1,4 = A
//!
//! [agent.rml]
//! alpha = 0.5
//! ```
//!
//! Ranges written `a..b` include both ends.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use ini::{Ini, Properties};
use rml_core::Verdict;
use rml_rl::{AgentConfig, Letter, LetterEnvConfig, RewardConfig, Variant};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("malformed configuration: {0}")]
    Syntax(String),
    #[error("[{section}] {key}: {message}")]
    Value {
        section: String,
        key: String,
        message: String,
    },
    #[error("missing [run] key `{0}`")]
    Missing(&'static str),
    #[error("{0}")]
    Invalid(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Experiment {
    Flexibility,
    Visibility,
    Conditional,
    TraceCheck,
    BranchAnalysis,
}

impl Experiment {
    pub fn name(self) -> &'static str {
        match self {
            Experiment::Flexibility => "flexibility",
            Experiment::Visibility => "visibility",
            Experiment::Conditional => "conditional",
            Experiment::TraceCheck => "trace-check",
            Experiment::BranchAnalysis => "branch-analysis",
        }
    }
}

impl FromStr for Experiment {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        [
            Experiment::Flexibility,
            Experiment::Visibility,
            Experiment::Conditional,
            Experiment::TraceCheck,
            Experiment::BranchAnalysis,
        ]
        .into_iter()
        .find(|e| e.name() == s)
        .ok_or_else(|| format!("unknown experiment `{s}`"))
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Method {
    Rml,
    RmlAblated,
    RmlGym,
    CraQl,
    CraCql,
}

impl Method {
    pub const ALL: [Method; 5] = [Method::Rml, Method::RmlAblated, Method::RmlGym, Method::CraQl, Method::CraCql];

    pub fn name(self) -> &'static str {
        match self {
            Method::Rml => "rml",
            Method::RmlAblated => "rml-ablated",
            Method::RmlGym => "rmlgym",
            Method::CraQl => "cra-ql",
            Method::CraCql => "cra-cql",
        }
    }

    pub fn default_agent(self) -> AgentConfig {
        match self {
            Method::RmlGym => AgentConfig::RMLGYM,
            _ => AgentConfig::DEFAULT,
        }
    }
}

impl FromStr for Method {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Method::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| format!("unknown method `{s}`"))
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub experiment: Experiment,
    /// Specification file; the built-in task text is used when absent.
    pub spec: Option<PathBuf>,
    pub trace: Option<PathBuf>,
    pub env: LetterEnvConfig,
    pub rewards: RewardConfig,
    pub methods: Vec<Method>,
    pub agents: BTreeMap<Method, AgentConfig>,
    pub seeds: Vec<u64>,
    pub episodes: usize,
    pub sweep: Vec<u32>,
    pub window: usize,
    pub threshold: f64,
    /// Largest A value the counting automaton defines.
    pub cra_max_n: u32,
    pub output: PathBuf,
    /// Write one learning-curve CSV per run.
    pub curves: bool,
}

fn inclusive(s: &str) -> Result<Vec<u64>, String> {
    let mut out = Vec::new();
    for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        if let Some((a, b)) = part.split_once("..") {
            let a: u64 = a.trim().parse().map_err(|_| format!("bad range start in `{part}`"))?;
            let b: u64 = b.trim().trim_start_matches('=').parse().map_err(|_| format!("bad range end in `{part}`"))?;
            if a > b {
                return Err(format!("empty range `{part}`"));
            }
            out.extend(a..=b);
        } else {
            out.push(part.parse().map_err(|_| format!("bad number `{part}`"))?);
        }
    }
    Ok(out)
}

/// Parses `1..8`, `1,2,5` or a mix of both; range ends are included.
pub fn parse_list(s: &str) -> Result<Vec<u32>, String> {
    inclusive(s)?
        .into_iter()
        .map(|x| u32::try_from(x).map_err(|_| format!("{x} is too large")))
        .collect()
}

/// Writes a list back in the shortest `a..b` form.
pub fn format_list<T: Copy + Into<u64>>(xs: &[T]) -> String {
    let v: Vec<u64> = xs.iter().map(|x| (*x).into()).collect();
    if v.len() > 2 && v.windows(2).all(|w| w[1] == w[0] + 1) {
        return format!("{}..{}", v[0], v[v.len() - 1]);
    }
    v.iter().map(u64::to_string).collect::<Vec<_>>().join(", ")
}

fn parse_pos(s: &str) -> Result<(usize, usize), String> {
    let (r, c) = s.split_once(',').ok_or_else(|| format!("expected `row,col`, got `{s}`"))?;
    let p = |x: &str| x.trim().parse::<usize>().map_err(|_| format!("bad coordinate in `{s}`"));
    Ok((p(r)?, p(c)?))
}

fn parse_verdicts(s: &str) -> Result<std::collections::BTreeSet<Verdict>, String> {
    s.split(',')
        .map(str::trim)
        .filter(|p| !p.is_empty())
        .map(|p| p.parse::<Verdict>().map_err(|e| e.to_string()))
        .collect()
}

struct Section<'a> {
    name: &'a str,
    props: Option<&'a Properties>,
}

impl Section<'_> {
    fn raw(&self, key: &str) -> Option<&str> {
        self.props.and_then(|p| p.get(key)).map(str::trim).filter(|s| !s.is_empty())
    }

    fn err(&self, key: &str, message: impl Into<String>) -> ConfigError {
        ConfigError::Value {
            section: self.name.to_string(),
            key: key.to_string(),
            message: message.into(),
        }
    }

    fn get<T: FromStr>(&self, key: &str) -> Result<Option<T>, ConfigError>
    where
        T::Err: fmt::Display,
    {
        self.raw(key)
            .map(|s| s.parse::<T>().map_err(|e| self.err(key, e.to_string())))
            .transpose()
    }

    fn with<T>(&self, key: &str, f: impl Fn(&str) -> Result<T, String>) -> Result<Option<T>, ConfigError> {
        self.raw(key).map(|s| f(s).map_err(|e| self.err(key, e))).transpose()
    }
}

fn section<'a>(ini: &'a Ini, name: &'a str) -> Section<'a> {
    Section {
        name,
        props: ini.section(Some(name)),
    }
}

impl RunConfig {
    /// Defaults for `experiment` before any file overrides.
    pub fn defaults(experiment: Experiment) -> Self {
        let (env, methods, sweep) = match experiment {
            Experiment::Visibility => (
                LetterEnvConfig::numerical(Some(1)),
                vec![Method::Rml, Method::RmlAblated, Method::RmlGym],
                vec![1],
            ),
            Experiment::Conditional => (LetterEnvConfig::conditional(1, 3), vec![Method::Rml], (1..=5).collect()),
            Experiment::BranchAnalysis => (LetterEnvConfig::conditional(1, 3), vec![Method::Rml], (1..=8).collect()),
            _ => (
                LetterEnvConfig::numerical(None),
                vec![Method::Rml, Method::CraQl, Method::CraCql],
                (1..=10).collect(),
            ),
        };
        Self {
            experiment,
            spec: None,
            trace: None,
            env,
            rewards: RewardConfig::default(),
            agents: Method::ALL.iter().map(|m| (*m, m.default_agent())).collect(),
            methods,
            seeds: (0..20).collect(),
            episodes: 1000,
            sweep,
            window: 50,
            threshold: 0.9,
            cra_max_n: 3,
            output: PathBuf::from("results").join(experiment.name()),
            curves: true,
        }
    }

    pub fn from_file(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let mut cfg = Self::from_ini_str(&text)?;
        let base = path.parent().unwrap_or(Path::new(""));
        for p in [&mut cfg.spec, &mut cfg.trace].into_iter().flatten() {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_ini_str(text: &str) -> Result<Self, ConfigError> {
        let ini = Ini::load_from_str(text).map_err(|e| ConfigError::Syntax(e.to_string()))?;
        let run = section(&ini, "run");
        let experiment: Experiment = run.get("experiment")?.ok_or(ConfigError::Missing("experiment"))?;
        let mut cfg = Self::defaults(experiment);

        cfg.spec = run.get::<PathBuf>("spec")?;
        cfg.trace = run.get::<PathBuf>("trace")?;
        if let Some(v) = run.get("episodes")? {
            cfg.episodes = v;
        }
        if let Some(v) = run.with("seeds", inclusive)? {
            cfg.seeds = v;
        }
        if let Some(v) = run.with("sweep", parse_list)? {
            cfg.sweep = v;
        }
        if let Some(v) = run.with("methods", |s| s.split(',').map(|m| m.trim().parse()).collect())? {
            cfg.methods = v;
        }
        if let Some(v) = run.get("window")? {
            cfg.window = v;
        }
        if let Some(v) = run.get("threshold")? {
            cfg.threshold = v;
        }
        if let Some(v) = run.get("output")? {
            cfg.output = v;
        }
        if let Some(v) = run.get("curves")? {
            cfg.curves = v;
        }
        if let Some(v) = section(&ini, "cra").get("max_n")? {
            cfg.cra_max_n = v;
        }

        cfg.env = parse_env(&ini, &cfg.env)?;

        let r = section(&ini, "rewards");
        let w = &mut cfg.rewards;
        for (key, slot) in [
            ("r_true", &mut w.r_true),
            ("r_currently_true", &mut w.r_currently_true),
            ("r_currently_false", &mut w.r_currently_false),
            ("r_false", &mut w.r_false),
            ("r_transition", &mut w.r_transition),
            ("r_novelty", &mut w.r_novelty),
        ] {
            if let Some(v) = r.get(key)? {
                *slot = v;
            }
        }
        if let Some(v) = r.with("terminal_verdicts", parse_verdicts)? {
            w.terminal_verdicts = v;
        }
        if let Some(v) = r.with("success_verdicts", parse_verdicts)? {
            w.success_verdicts = v;
        }
        if let Some(v) = r.get("novelty_per_run")? {
            w.novelty_per_run = v;
        }

        for m in Method::ALL {
            let name = format!("agent.{}", m.name());
            let s = Section {
                name: &name,
                props: ini.section(Some(name.as_str())),
            };
            let a = cfg.agents.get_mut(&m).expect("all methods have defaults");
            for (key, slot) in [
                ("alpha", &mut a.alpha),
                ("epsilon0", &mut a.epsilon0),
                ("epsilon_decay", &mut a.epsilon_decay),
                ("gamma", &mut a.gamma),
            ] {
                if let Some(v) = s.get(key)? {
                    *slot = v;
                }
            }
        }
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let bad = |m: String| Err(ConfigError::Invalid(m));
        let trains = matches!(
            self.experiment,
            Experiment::Flexibility | Experiment::Visibility | Experiment::Conditional
        );
        if trains {
            if self.seeds.is_empty() {
                return bad("seeds must not be empty".into());
            }
            if self.methods.is_empty() {
                return bad("methods must not be empty".into());
            }
            if self.window == 0 {
                return bad("window must be positive".into());
            }
        }
        let allowed: &[Method] = match self.experiment {
            Experiment::Flexibility => &[Method::Rml, Method::CraQl, Method::CraCql],
            Experiment::Visibility | Experiment::Conditional => &[Method::Rml, Method::RmlAblated, Method::RmlGym],
            _ => &Method::ALL,
        };
        if let Some(m) = self.methods.iter().find(|m| !allowed.contains(m)) {
            return bad(format!("method {m} is not part of the {} experiment", self.experiment));
        }
        if matches!(self.experiment, Experiment::Flexibility | Experiment::Conditional | Experiment::BranchAnalysis) {
            if self.sweep.is_empty() {
                return bad("sweep must not be empty".into());
            }
            if self.sweep.contains(&0) {
                return bad("sweep values must be at least 1".into());
            }
        }
        match (self.experiment, &self.env.variant) {
            (Experiment::Flexibility | Experiment::Visibility, Variant::Numerical { .. }) => {}
            (Experiment::Conditional, Variant::Conditional { .. }) => {}
            (Experiment::Flexibility | Experiment::Visibility | Experiment::Conditional, v) => {
                return bad(format!("the {} experiment cannot use variant {v:?}", self.experiment))
            }
            _ => {}
        }
        if self.experiment == Experiment::TraceCheck && (self.spec.is_none() || self.trace.is_none()) {
            return bad("trace-check needs both `spec` and `trace`".into());
        }
        for p in [&self.spec, &self.trace].into_iter().flatten() {
            if !p.exists() {
                return bad(format!("{} does not exist", p.display()));
            }
        }
        if trains {
            self.env.validate().map_err(|e| ConfigError::Invalid(e.to_string()))?;
            self.rewards.validate().map_err(|e| ConfigError::Invalid(e.to_string()))?;
            for m in &self.methods {
                self.agents[m]
                    .validate()
                    .map_err(|e| ConfigError::Invalid(format!("agent.{m}: {e}")))?;
            }
        }
        Ok(())
    }

    /// The fully resolved configuration, in the same format it is read from.
    pub fn to_ini(&self) -> Ini {
        let mut ini = Ini::new();
        let num = |x: f64| format!("{x}");
        {
            let mut s = ini.with_section(Some("run"));
            s.set("experiment", self.experiment.name());
            if let Some(p) = &self.spec {
                s.set("spec", p.display().to_string());
            }
            if let Some(p) = &self.trace {
                s.set("trace", p.display().to_string());
            }
            s.set("episodes", self.episodes.to_string())
                .set("seeds", format_list(&self.seeds))
                .set("sweep", format_list(&self.sweep))
                .set(
                    "methods",
                    self.methods.iter().map(|m| m.name()).collect::<Vec<_>>().join(", "),
                )
                .set("window", self.window.to_string())
                .set("threshold", num(self.threshold))
                .set("output", self.output.display().to_string())
                .set("curves", self.curves.to_string());
        }
        {
            let e = &self.env;
            let mut s = ini.with_section(Some("env"));
            s.set("rows", e.rows.to_string())
                .set("cols", e.cols.to_string())
                .set("start", format!("{},{}", e.start.0, e.start.1))
                .set("step_cap", e.step_cap.to_string());
            match e.variant {
                Variant::Standard { n } => {
                    s.set("variant", "standard").set("n", n.to_string());
                }
                Variant::Numerical { n, range } => {
                    s.set("variant", "numerical");
                    if let Some(n) = n {
                        s.set("n", n.to_string());
                    }
                    s.set("n_min", range.0.to_string()).set("n_max", range.1.to_string());
                }
                Variant::Conditional { n, m } => {
                    s.set("variant", "conditional").set("n", n.to_string()).set("m", m.to_string());
                }
            }
        }
        {
            let mut s = ini.with_section(Some("placements"));
            for ((r, c), l) in &self.env.placements {
                s.set(format!("{r},{c}"), l.to_string());
            }
        }
        {
            let w = &self.rewards;
            let verdicts = |vs: &std::collections::BTreeSet<Verdict>| {
                vs.iter().map(|v| v.name()).collect::<Vec<_>>().join(", ")
            };
            ini.with_section(Some("rewards"))
                .set("r_true", num(w.r_true))
                .set("r_currently_true", num(w.r_currently_true))
                .set("r_currently_false", num(w.r_currently_false))
                .set("r_false", num(w.r_false))
                .set("r_transition", num(w.r_transition))
                .set("r_novelty", num(w.r_novelty))
                .set("terminal_verdicts", verdicts(&w.terminal_verdicts))
                .set("success_verdicts", verdicts(&w.success_verdicts))
                .set("novelty_per_run", w.novelty_per_run.to_string());
        }
        ini.with_section(Some("cra")).set("max_n", self.cra_max_n.to_string());
        for (m, a) in &self.agents {
            ini.with_section(Some(format!("agent.{}", m.name())))
                .set("alpha", num(a.alpha))
                .set("epsilon0", num(a.epsilon0))
                .set("epsilon_decay", num(a.epsilon_decay))
                .set("gamma", num(a.gamma));
        }
        ini
    }

    pub fn to_ini_string(&self) -> String {
        let mut buf = Vec::new();
        self.to_ini().write_to(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("ini output is utf-8")
    }
}

fn parse_env(ini: &Ini, default: &LetterEnvConfig) -> Result<LetterEnvConfig, ConfigError> {
    let s = section(ini, "env");
    let n: Option<u32> = s.get("n")?;
    let m: Option<u32> = s.get("m")?;
    let mut env = match s.raw("variant") {
        None => default.clone(),
        Some("standard") => LetterEnvConfig::standard(n.unwrap_or(1)),
        Some("numerical") => LetterEnvConfig::numerical(n),
        Some("conditional") => LetterEnvConfig::conditional(n.unwrap_or(1), m.unwrap_or(3)),
        Some(other) => return Err(s.err("variant", format!("unknown variant `{other}`"))),
    };
    match &mut env.variant {
        Variant::Standard { n: slot } | Variant::Conditional { n: slot, .. } => {
            if let Some(n) = n {
                *slot = n;
            }
        }
        Variant::Numerical { n: slot, range } => {
            if n.is_some() {
                *slot = n;
            }
            if let Some(lo) = s.get("n_min")? {
                range.0 = lo;
            }
            if let Some(hi) = s.get("n_max")? {
                range.1 = hi;
            }
        }
    }
    if let (Variant::Conditional { m: slot, .. }, Some(m)) = (&mut env.variant, m) {
        *slot = m;
    }
    if let Some(v) = s.get("rows")? {
        env.rows = v;
    }
    if let Some(v) = s.get("cols")? {
        env.cols = v;
    }
    if let Some(v) = s.with("start", parse_pos)? {
        env.start = v;
    }
    if let Some(v) = s.get("step_cap")? {
        env.step_cap = v;
    }
    if let Some(props) = ini.section(Some("placements")) {
        env.placements.clear();
        for (k, v) in props.iter() {
            let pos = parse_pos(k).map_err(|e| ConfigError::Value {
                section: "placements".into(),
                key: k.into(),
                message: e,
            })?;
            let letter = v
                .trim()
                .chars()
                .next()
                .and_then(Letter::from_char)
                .filter(|_| v.trim().len() == 1)
                .ok_or_else(|| ConfigError::Value {
                    section: "placements".into(),
                    key: k.into(),
                    message: format!("`{v}` is not one of A, B, C, D"),
                })?;
            env.placements.insert(pos, letter);
        }
    }
    Ok(env)
}
