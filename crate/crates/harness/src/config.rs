//! Experiment configuration documents.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use ncg_core::{BetaFormula, RestartKind, SolverConfig, StopRule, WarmStart};
use serde::{Deserialize, Serialize};

use crate::error::{HarnessError, Result};

/// Environment variable overriding `base_seed`.
pub const SEED_ENV: &str = "NCG_SEED";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Suite {
    SmoothedBiweight,
    Tukey,
    Classic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Emit {
    #[default]
    Csv,
    Json,
    Both,
}

impl Emit {
    pub fn csv(&self) -> bool {
        matches!(self, Emit::Csv | Emit::Both)
    }
    pub fn json(&self) -> bool {
        matches!(self, Emit::Json | Emit::Both)
    }
}

/// A named solver preset.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SolverSpec {
    SemiAdaptiveGd,
    ArmijoGd,
    Standard,
    Orthog,
    /// Restarted NCG(p) with `q = (1 + p)/2`.
    Restarted(f64),
}

impl SolverSpec {
    /// Solver configuration for this preset under the experiment settings.
    pub fn solver_config(&self, exp: &ExperimentConfig) -> SolverConfig {
        let base = match *self {
            SolverSpec::SemiAdaptiveGd | SolverSpec::ArmijoGd => SolverConfig::gradient_descent(),
            SolverSpec::Standard => SolverConfig::standard(exp.beta),
            SolverSpec::Orthog => SolverConfig::orthogonality(exp.beta),
            SolverSpec::Restarted(p) => SolverConfig::restarted(p, exp.beta),
        };
        SolverConfig {
            epsilon: exp.epsilon,
            max_iterations: exp.budget,
            warm_start: exp.warm_start,
            stop_rule: exp.effective_stop_rule(),
            ..base
        }
    }

    pub fn restart_kind(&self) -> RestartKind {
        match self {
            SolverSpec::SemiAdaptiveGd | SolverSpec::ArmijoGd => RestartKind::Always,
            SolverSpec::Standard => RestartKind::Standard,
            SolverSpec::Orthog => RestartKind::Orthogonality,
            SolverSpec::Restarted(_) => RestartKind::Modified,
        }
    }
}

impl fmt::Display for SolverSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SolverSpec::SemiAdaptiveGd => f.write_str("Semi-adaptive GD"),
            SolverSpec::ArmijoGd => f.write_str("Armijo GD"),
            SolverSpec::Standard => f.write_str("Standard NCG"),
            SolverSpec::Orthog => f.write_str("Orthog NCG"),
            SolverSpec::Restarted(p) => write!(f, "NCG({p})"),
        }
    }
}

impl FromStr for SolverSpec {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self> {
        let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect::<String>().to_ascii_lowercase();
        // separators are dropped from the name but not from the argument
        let split = compact.find('(').unwrap_or(compact.len());
        let (head, tail) = compact.split_at(split);
        let key: String = head.chars().filter(|c| *c != '-' && *c != '_').collect::<String>() + tail;
        let spec = match key.as_str() {
            "semiadaptivegd" => SolverSpec::SemiAdaptiveGd,
            "armijogd" | "gd" => SolverSpec::ArmijoGd,
            "standard" | "standardncg" => SolverSpec::Standard,
            "orthog" | "orthogncg" => SolverSpec::Orthog,
            _ => {
                let inner = key
                    .strip_prefix("restartedncg(")
                    .or_else(|| key.strip_prefix("ncg("))
                    .and_then(|r| r.strip_suffix(')'))
                    .ok_or_else(|| HarnessError::Config(format!("unknown solver preset `{s}`")))?;
                let p: f64 = inner
                    .parse()
                    .map_err(|_| HarnessError::Config(format!("bad p in solver preset `{s}`")))?;
                if !(p >= 0.0 && p.is_finite()) {
                    return Err(HarnessError::Config(format!("p must be nonnegative in `{s}`")));
                }
                SolverSpec::Restarted(p)
            }
        };
        Ok(spec)
    }
}

impl Serialize for SolverSpec {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for SolverSpec {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

fn default_parallelism() -> usize {
    1
}

fn default_warm_start() -> WarmStart {
    WarmStart::DoublePrevious
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub suite: Suite,
    pub instances: usize,
    pub n: usize,
    /// Samples per regression instance (ignored by the classic suite).
    #[serde(default)]
    pub m: usize,
    #[serde(default)]
    pub base_seed: u64,
    pub solvers: Vec<SolverSpec>,
    #[serde(default = "default_beta")]
    pub beta: BetaFormula,
    pub epsilon: f64,
    pub budget: usize,
    pub output_dir: PathBuf,
    #[serde(default)]
    pub emit: Emit,
    #[serde(default = "default_parallelism")]
    pub parallelism: usize,
    #[serde(default = "default_warm_start")]
    pub warm_start: WarmStart,
    /// Defaults to absolute for regression suites and relative for the
    /// classic suite.
    #[serde(default)]
    pub stop_rule: Option<StopRule>,
    /// Tukey threshold; `√6` when absent.
    #[serde(default)]
    pub tukey_c: Option<f64>,
    /// Write one trace CSV per run.
    #[serde(default)]
    pub traces: bool,
}

fn default_beta() -> BetaFormula {
    BetaFormula::PolakRibierePlus
}

impl ExperimentConfig {
    /// Default regression setup: 100 instances of
    /// `n = 30`, `m = 60`, `ε = 1e-4`, 10000 iterations.
    pub fn regression(suite: Suite, beta: BetaFormula, solvers: Vec<SolverSpec>) -> Self {
        ExperimentConfig {
            suite,
            instances: 100,
            n: 30,
            m: 60,
            base_seed: 0,
            solvers,
            beta,
            epsilon: 1e-4,
            budget: 10_000,
            output_dir: PathBuf::from("results"),
            emit: Emit::Csv,
            parallelism: 1,
            warm_start: WarmStart::DoublePrevious,
            stop_rule: None,
            tukey_c: None,
            traces: false,
        }
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let cfg: ExperimentConfig = serde_json::from_str(s)?;
        Ok(cfg)
    }

    /// Reads a config file, applying the `NCG_SEED` override, and validates it.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let mut cfg = Self::from_json(&text)?;
        if let Ok(seed) = std::env::var(SEED_ENV) {
            cfg.base_seed = seed
                .trim()
                .parse()
                .map_err(|_| HarnessError::Config(format!("{SEED_ENV} must be an unsigned integer")))?;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn effective_stop_rule(&self) -> StopRule {
        self.stop_rule.unwrap_or(match self.suite {
            Suite::Classic => StopRule::Relative,
            _ => StopRule::Absolute,
        })
    }

    pub fn tukey_c(&self) -> f64 {
        self.tukey_c.unwrap_or_else(|| 6f64.sqrt())
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(HarnessError::Config(m.to_string()));
        if self.instances == 0 {
            return bad("instances must be at least 1");
        }
        if self.n == 0 {
            return bad("n must be positive");
        }
        if self.suite != Suite::Classic && self.m == 0 {
            return bad("m must be positive for regression suites");
        }
        if self.suite == Suite::Classic && self.n < 2 {
            return bad("the classic suite needs n >= 2");
        }
        if self.solvers.is_empty() {
            return bad("solver roster is empty");
        }
        if self.parallelism == 0 {
            return bad("parallelism must be at least 1");
        }
        if let Some(c) = self.tukey_c {
            if !(c > 0.0 && c.is_finite()) {
                return bad("tukey_c must be positive");
            }
        }
        for s in &self.solvers {
            s.solver_config(self).validate()?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn preset_names() {
        assert_eq!("Standard NCG".parse::<SolverSpec>().unwrap(), SolverSpec::Standard);
        assert_eq!("ncg(0.75)".parse::<SolverSpec>().unwrap(), SolverSpec::Restarted(0.75));
        assert_eq!("Restarted NCG(1)".parse::<SolverSpec>().unwrap(), SolverSpec::Restarted(1.0));
        assert_eq!("Semi-adaptive GD".parse::<SolverSpec>().unwrap(), SolverSpec::SemiAdaptiveGd);
        assert!("NCG(-1)".parse::<SolverSpec>().is_err());
        assert!("Newton".parse::<SolverSpec>().is_err());
        assert_eq!(SolverSpec::Restarted(0.5).to_string(), "NCG(0.5)");
        assert_eq!(SolverSpec::Restarted(0.0).to_string(), "NCG(0)");
    }

    #[test]
    fn parse_and_reject_unknown_keys() {
        let ok = r#"{"suite":"TUKEY","instances":3,"n":4,"m":8,"solvers":["Standard","NCG(0.5)"],
                    "beta":"HZ","epsilon":1e-4,"budget":100,"output_dir":"out"}"#;
        let cfg = ExperimentConfig::from_json(ok).unwrap();
        cfg.validate().unwrap();
        assert_eq!(cfg.beta, BetaFormula::HagerZhang);
        assert_eq!(cfg.warm_start, WarmStart::DoublePrevious);
        assert_eq!(cfg.effective_stop_rule(), StopRule::Absolute);

        let unknown = ok.replace("\"budget\"", "\"colour\":1,\"budget\"");
        assert!(ExperimentConfig::from_json(&unknown).is_err());
    }

    #[test]
    fn zero_instances_rejected() {
        let mut cfg = ExperimentConfig::regression(Suite::Tukey, BetaFormula::FletcherReeves, vec![SolverSpec::Standard]);
        cfg.validate().unwrap();
        cfg.instances = 0;
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn presets_carry_experiment_settings() {
        let cfg = ExperimentConfig::regression(Suite::SmoothedBiweight, BetaFormula::FletcherReeves, vec![]);
        let c = SolverSpec::Restarted(0.25).solver_config(&cfg);
        assert_eq!((c.p, c.q, c.sigma, c.kappa), (0.25, 0.625, 0.01, 100.0));
        assert_eq!(c.beta, BetaFormula::FletcherReeves);
        assert_eq!(c.max_iterations, 10_000);
        assert_eq!(SolverSpec::ArmijoGd.solver_config(&cfg).restart, RestartKind::Always);
    }
}
