use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use rml_cli::check::EXIT_ERROR;
use rml_cli::config::parse_list;
use rml_cli::experiments::{output_dir, run_experiment};
use rml_cli::{branches, check_trace, emit_plots, run_branch_analysis, Experiment, RunConfig};

#[derive(Parser)]
#[command(name = "rmlrm", about = "RML reward machine experiments and tools")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the experiment described by a configuration file.
    Run { config: PathBuf },
    /// Check a JSON-lines trace against a specification.
    Check { spec: PathBuf, trace: PathBuf },
    /// Print the branch-count table for the conditional task.
    Branches {
        /// Values of M, e.g. `1..8` or `1,3,5`.
        #[arg(long, default_value = "1..8")]
        m: String,
        /// Also write branches.csv into this directory.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write plot-ready series for a results directory.
    Plots { dir: PathBuf },
}

fn read(path: &Path) -> Result<String, String> {
    fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))
}

fn check(spec: &Path, trace: &Path) -> ExitCode {
    let result = read(spec)
        .and_then(|s| read(trace).map(|t| (s, t)))
        .and_then(|(s, t)| check_trace(&s, &t).map_err(|e| e.to_string()));
    match result {
        Ok(report) => {
            for line in &report.lines {
                println!("{line}");
            }
            println!("final\t{}", report.verdict);
            ExitCode::from(report.exit_code() as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_ERROR as u8)
        }
    }
}

fn branch_table(ms: &[u32], out: Option<&Path>) -> Result<(), String> {
    let rows = run_branch_analysis(ms).map_err(|e| e.to_string())?;
    branches::write_branches(&rows, std::io::stdout()).map_err(|e| e.to_string())?;
    if let Some(dir) = out {
        fs::create_dir_all(dir).map_err(|e| format!("{}: {e}", dir.display()))?;
        let f = fs::File::create(dir.join("branches.csv")).map_err(|e| e.to_string())?;
        branches::write_branches(&rows, f).map_err(|e| e.to_string())?;
    }
    Ok(())
}

fn run(path: &Path) -> Result<ExitCode, String> {
    let cfg = RunConfig::from_file(path).map_err(|e| e.to_string())?;
    match cfg.experiment {
        Experiment::TraceCheck => Ok(check(cfg.spec.as_deref().unwrap(), cfg.trace.as_deref().unwrap())),
        Experiment::BranchAnalysis => {
            let dir = output_dir(&cfg);
            branch_table(&cfg.sweep, Some(&dir))?;
            fs::write(dir.join("config.resolved.ini"), cfg.to_ini_string()).map_err(|e| e.to_string())?;
            Ok(ExitCode::SUCCESS)
        }
        _ => {
            let res = run_experiment(&cfg).map_err(|e| e.to_string())?;
            for r in &res.summary {
                println!(
                    "N={:<3} {:<12} final {:.3} (sd {:.3})  threshold {:.1} (sd {:.1})  reached {}/{}",
                    r.n, r.method, r.final_success_mean, r.final_success_std, r.threshold_mean, r.threshold_std, r.reached, r.seeds
                );
            }
            for v in &res.visibility {
                println!(
                    "{:<12} crosses 0.5 at {:?}, 0.95 at {:?}, longest run >= 0.9: {}",
                    v.method, v.cross_050, v.cross_095, v.longest_090
                );
            }
            println!("results in {}", res.dir.display());
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Check { spec, trace } => return check(&spec, &trace),
        Command::Run { config } => run(&config),
        Command::Branches { m, out } => parse_list(&m)
            .and_then(|ms| branch_table(&ms, out.as_deref()))
            .map(|_| ExitCode::SUCCESS),
        Command::Plots { dir } => emit_plots(&dir).map_err(|e| e.to_string()).map(|files| {
            for f in files {
                println!("{}", f.display());
            }
            ExitCode::SUCCESS
        }),
    };
    result.unwrap_or_else(|e| {
        eprintln!("error: {e}");
        ExitCode::FAILURE
    })
}
