//! CSV and JSON writers for suite results.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use ncg_core::trace::write_trace_csv;
use serde::Serialize;

use crate::config::ExperimentConfig;
use crate::error::Result;
use crate::profiles::{budget_grid, data_profile, performance_profile, tau_grid, Metric, Profile};
use crate::suite::{x0_policy, RunRow, SuiteSummary};

pub const SUMMARY_CSV: &str = "summary.csv";
pub const RUNS_CSV: &str = "runs.csv";
pub const SUMMARY_JSON: &str = "summary.json";
pub const METADATA_JSON: &str = "metadata.json";
pub const DATA_PROFILE_CSV: &str = "data_profile.csv";
pub const PERF_ITERATIONS_CSV: &str = "performance_profile_iterations.csv";
pub const PERF_FEVALS_CSV: &str = "performance_profile_function_evals.csv";

pub fn write_summary_csv<W: Write>(summary: &SuiteSummary, w: W) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    for s in &summary.stats {
        out.serialize(s)?;
    }
    out.flush()?;
    Ok(())
}

pub fn write_runs_csv<W: Write>(runs: &[RunRow], w: W) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    for r in runs {
        out.serialize(r)?;
    }
    out.flush()?;
    Ok(())
}

pub fn read_runs_csv(path: &Path) -> Result<Vec<RunRow>> {
    let mut rdr = csv::Reader::from_path(path)?;
    let rows = rdr.deserialize().collect::<std::result::Result<Vec<RunRow>, _>>()?;
    Ok(rows)
}

pub fn write_profile_csv<W: Write>(profile: &Profile, w: W) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    let mut header = vec!["budget_or_tau".to_string()];
    header.extend(profile.solvers.iter().cloned());
    out.write_record(&header)?;
    for (i, x) in profile.axis.iter().enumerate() {
        let mut rec = vec![x.to_string()];
        rec.extend(profile.curves.iter().map(|c| c[i].to_string()));
        out.write_record(&rec)?;
    }
    out.flush()?;
    Ok(())
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    Ok(BufWriter::new(File::create(path)?))
}

fn write_json<T: Serialize>(value: &T, path: &Path) -> Result<()> {
    let mut w = create(path)?;
    serde_json::to_writer_pretty(&mut w, value)?;
    writeln!(w)?;
    Ok(())
}

#[derive(Serialize)]
struct Metadata<'a> {
    harness_version: &'a str,
    x0_policy: &'a str,
    config: &'a ExperimentConfig,
}

/// Writes the data profile on the default budget grid and both performance
/// profiles into `dir`.
pub fn write_profiles(summary: &SuiteSummary, budget: usize, dir: &Path) -> Result<Vec<PathBuf>> {
    let taus = tau_grid();
    let profiles = [
        (DATA_PROFILE_CSV, data_profile(summary, &budget_grid(budget))),
        (PERF_ITERATIONS_CSV, performance_profile(summary, Metric::Iterations, &taus)),
        (PERF_FEVALS_CSV, performance_profile(summary, Metric::FunctionEvals, &taus)),
    ];
    let mut written = Vec::new();
    for (name, p) in &profiles {
        let path = dir.join(name);
        write_profile_csv(p, create(&path)?)?;
        written.push(path);
    }
    Ok(written)
}

fn slug(s: &str) -> String {
    s.chars()
        .filter_map(|c| match c {
            'a'..='z' | 'A'..='Z' | '0'..='9' => Some(c.to_ascii_lowercase()),
            '.' => Some('p'),
            ' ' | '-' | '(' => Some('_'),
            _ => None,
        })
        .collect()
}

/// Writes every output requested by `cfg` and returns the paths written.
pub fn write_outputs(cfg: &ExperimentConfig, summary: &SuiteSummary) -> Result<Vec<PathBuf>> {
    let dir = &cfg.output_dir;
    fs::create_dir_all(dir)?;
    let mut written = Vec::new();
    if cfg.emit.csv() {
        for (name, rows) in [(SUMMARY_CSV, None), (RUNS_CSV, Some(&summary.runs))] {
            let path = dir.join(name);
            match rows {
                None => write_summary_csv(summary, create(&path)?)?,
                Some(r) => write_runs_csv(r, create(&path)?)?,
            }
            written.push(path);
        }
        written.extend(write_profiles(summary, cfg.budget, dir)?);
    }
    if cfg.emit.json() {
        let path = dir.join(SUMMARY_JSON);
        write_json(summary, &path)?;
        written.push(path);
    }
    let path = dir.join(METADATA_JSON);
    write_json(
        &Metadata {
            harness_version: env!("CARGO_PKG_VERSION"),
            x0_policy: x0_policy(cfg.suite),
            config: cfg,
        },
        &path,
    )?;
    written.push(path);

    if let Some(traces) = &summary.traces {
        let tdir = dir.join("traces");
        fs::create_dir_all(&tdir)?;
        for (row, trace) in summary.runs.iter().zip(traces) {
            let path = tdir.join(format!("instance_{:04}_{}.csv", row.instance, slug(&row.solver)));
            let mut w = create(&path)?;
            write_trace_csv(trace, &mut w, true)?;
            w.flush()?;
            written.push(path);
        }
    }
    Ok(written)
}
