//! `ncg-bench` command line.

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};

use crate::certify::{certify_suite, write_certificates};
use crate::config::ExperimentConfig;
use crate::error::{HarnessError, Result};
use crate::gradcheck::{run_gradcheck, GradcheckOptions};
use crate::output::{read_runs_csv, write_outputs, write_profiles, RUNS_CSV};
use crate::suite::{run_suite, SuiteSummary};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_VIOLATION: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "ncg-bench", version, about = "Restarted NCG benchmark harness")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct ConfigArgs {
    /// Experiment configuration (JSON).
    #[arg(long)]
    config: PathBuf,
    /// Overrides the configured worker count.
    #[arg(long)]
    parallelism: Option<usize>,
    /// Overrides the configured output directory.
    #[arg(long)]
    output_dir: Option<PathBuf>,
}

impl ConfigArgs {
    fn load(&self) -> Result<ExperimentConfig> {
        let mut cfg = ExperimentConfig::load(&self.config)?;
        if let Some(p) = self.parallelism {
            cfg.parallelism = p;
        }
        if let Some(d) = &self.output_dir {
            cfg.output_dir = d.clone();
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run a suite and write summary, runs and profile files.
    Run(ConfigArgs),
    /// Re-run a suite with the unit warm start and audit the certificates.
    Certify(ConfigArgs),
    /// Compute data and performance profiles from a stored runs CSV.
    Profile {
        /// A runs CSV, or a directory containing one.
        #[arg(long)]
        runs: PathBuf,
        /// Iteration budget closing the data-profile grid.
        #[arg(long, default_value_t = 10_000)]
        budget: usize,
        /// Defaults to the directory of the runs CSV.
        #[arg(long)]
        output_dir: Option<PathBuf>,
    },
    /// Finite-difference audit of both regression losses.
    Gradcheck {
        #[arg(long, default_value_t = 10)]
        instances: usize,
        #[arg(long, default_value_t = 100)]
        points: usize,
        #[arg(long, default_value_t = 30)]
        n: usize,
        #[arg(long, default_value_t = 60)]
        m: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1e-6)]
        tolerance: f64,
        /// Also write the report as JSON here.
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

fn print_paths(paths: &[PathBuf]) {
    for p in paths {
        println!("wrote {}", p.display());
    }
}

fn cmd_run(args: &ConfigArgs) -> Result<i32> {
    let cfg = args.load()?;
    let summary = run_suite(&cfg)?;
    for s in &summary.stats {
        println!(
            "{:<18} solved {:>4}/{:<4} restart {:>7.3}%  iters {:>9.1}  fevals {:>9.1}",
            s.solver, s.solved, s.instances, s.avg_restart_pct, s.mean_iterations, s.mean_function_evals
        );
    }
    print_paths(&write_outputs(&cfg, &summary)?);
    Ok(EXIT_OK)
}

fn cmd_certify(args: &ConfigArgs) -> Result<i32> {
    let cfg = args.load()?;
    let summary = certify_suite(&cfg)?;
    print_paths(&write_certificates(&cfg, &summary)?);
    for r in summary.runs.iter().filter(|r| r.violations() > 0 || r.error.is_some()) {
        eprintln!(
            "instance {} {}: {} violation(s){}",
            r.instance,
            r.solver,
            r.violations(),
            r.error.as_deref().map(|e| format!(", {e}")).unwrap_or_default()
        );
    }
    let total = summary.total_violations();
    println!("{} runs audited, {} violation(s)", summary.runs.len(), total);
    Ok(if summary.passed() { EXIT_OK } else { EXIT_VIOLATION })
}

fn cmd_profile(runs: &Path, budget: usize, output_dir: Option<&Path>) -> Result<i32> {
    let file = if runs.is_dir() { runs.join(RUNS_CSV) } else { runs.to_path_buf() };
    let rows = read_runs_csv(&file)?;
    if rows.is_empty() {
        return Err(HarnessError::Config(format!("{} holds no runs", file.display())));
    }
    let dir = output_dir
        .map(Path::to_path_buf)
        .unwrap_or_else(|| file.parent().map(Path::to_path_buf).unwrap_or_default());
    fs::create_dir_all(&dir)?;
    let summary = SuiteSummary::from_rows(rows);
    print_paths(&write_profiles(&summary, budget, &dir)?);
    Ok(EXIT_OK)
}

fn cmd_gradcheck(opts: &GradcheckOptions, output: Option<&Path>) -> Result<i32> {
    let rep = run_gradcheck(opts)?;
    for l in &rep.losses {
        println!(
            "{:<40} points {:>5}  max error {:.3e}  failures {}",
            l.loss, l.points, l.max_error, l.failures
        );
    }
    println!(
        "tukey boundary: value gap {:.3e}, slope {:.3e}",
        rep.boundary.max_value_gap, rep.boundary.max_slope
    );
    if let Some(path) = output {
        fs::write(path, serde_json::to_string_pretty(&rep)? + "\n")?;
        println!("wrote {}", path.display());
    }
    Ok(if rep.passed() { EXIT_OK } else { EXIT_VIOLATION })
}

fn dispatch(cli: Cli) -> Result<i32> {
    match cli.command {
        Command::Run(a) => cmd_run(&a),
        Command::Certify(a) => cmd_certify(&a),
        Command::Profile { runs, budget, output_dir } => cmd_profile(&runs, budget, output_dir.as_deref()),
        Command::Gradcheck {
            instances,
            points,
            n,
            m,
            seed,
            tolerance,
            output,
        } => {
            let opts = GradcheckOptions {
                instances,
                points,
                n,
                m,
                base_seed: seed,
                tolerance,
                ..Default::default()
            };
            cmd_gradcheck(&opts, output.as_deref())
        }
    }
}

/// Parses `args` (program name first), runs the subcommand and returns the
/// process exit code.
pub fn cli_main<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_USAGE,
            };
        }
    };
    match dispatch(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_USAGE
        }
    }
}
