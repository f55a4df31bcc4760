use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BetaFormula {
    #[serde(rename = "FR")]
    FletcherReeves,
    #[serde(rename = "PR")]
    PolakRibiere,
    #[serde(rename = "PRP+")]
    PolakRibierePlus,
    #[serde(rename = "HZ")]
    HagerZhang,
}

impl BetaFormula {
    pub fn label(&self) -> &'static str {
        match self {
            BetaFormula::FletcherReeves => "FR",
            BetaFormula::PolakRibiere => "PR",
            BetaFormula::PolakRibierePlus => "PRP+",
            BetaFormula::HagerZhang => "HZ",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "FR" => Ok(BetaFormula::FletcherReeves),
            "PR" | "PRP" => Ok(BetaFormula::PolakRibiere),
            "PRP+" | "PRP_PLUS" | "PR+" => Ok(BetaFormula::PolakRibierePlus),
            "HZ" => Ok(BetaFormula::HagerZhang),
            _ => Err(Error::InvalidConfig(format!("unknown beta formula `{s}`"))),
        }
    }
}

/// Which safeguard replaces the conjugate direction by `−g`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum RestartKind {
    /// Slope and length test with `(σ, κ, p, q)`.
    Modified,
    /// Restart on non-descent directions only.
    Standard,
    /// Restart when successive gradients lose orthogonality.
    Orthogonality,
    /// Every direction is `−g` (gradient descent).
    Always,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum WarmStart {
    /// Every line search starts at `α = 1`.
    Unit,
    /// Start at 1, then at twice the previously accepted step.
    DoublePrevious,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum StopRule {
    /// `‖g_k‖ ≤ ε`
    Absolute,
    /// `‖g_k‖ ≤ ε max{1, ‖g_0‖}`
    Relative,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SolverConfig {
    /// Armijo sufficient-decrease constant.
    pub eta: f64,
    /// Backtracking factor.
    pub theta: f64,
    pub sigma: f64,
    pub kappa: f64,
    pub p: f64,
    pub q: f64,
    /// Threshold of the orthogonality restart test.
    pub sigma_orth: f64,
    pub beta: BetaFormula,
    pub restart: RestartKind,
    pub epsilon: f64,
    pub max_iterations: usize,
    pub warm_start: WarmStart,
    pub max_backtracks: usize,
    pub stop_rule: StopRule,
}

impl Default for SolverConfig {
    fn default() -> Self {
        let p = 0.5;
        SolverConfig {
            eta: 0.5,
            theta: 0.5,
            sigma: 0.01,
            kappa: 100.0,
            p,
            q: (1.0 + p) / 2.0,
            sigma_orth: 0.01,
            beta: BetaFormula::PolakRibierePlus,
            restart: RestartKind::Modified,
            epsilon: 1e-4,
            max_iterations: 10_000,
            warm_start: WarmStart::DoublePrevious,
            max_backtracks: 60,
            stop_rule: StopRule::Absolute,
        }
    }
}

impl SolverConfig {
    /// Restarted NCG(p) with `q = (1 + p)/2` and the remaining defaults.
    pub fn restarted(p: f64, beta: BetaFormula) -> Self {
        SolverConfig {
            p,
            q: (1.0 + p) / 2.0,
            beta,
            ..Default::default()
        }
    }

    pub fn standard(beta: BetaFormula) -> Self {
        SolverConfig {
            beta,
            restart: RestartKind::Standard,
            ..Default::default()
        }
    }

    pub fn orthogonality(beta: BetaFormula) -> Self {
        SolverConfig {
            beta,
            restart: RestartKind::Orthogonality,
            ..Default::default()
        }
    }

    pub fn gradient_descent() -> Self {
        SolverConfig {
            restart: RestartKind::Always,
            ..Default::default()
        }
    }

    pub fn with_warm_start(mut self, w: WarmStart) -> Self {
        self.warm_start = w;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidConfig(msg));
        let open_unit = |v: f64| v > 0.0 && v < 1.0;
        if !open_unit(self.eta) {
            return bad(format!("eta must lie in (0,1), got {}", self.eta));
        }
        if !open_unit(self.theta) {
            return bad(format!("theta must lie in (0,1), got {}", self.theta));
        }
        if !(self.sigma > 0.0 && self.sigma <= 1.0) {
            return bad(format!("sigma must lie in (0,1], got {}", self.sigma));
        }
        if !(self.kappa >= 1.0 && self.kappa.is_finite()) {
            return bad(format!("kappa must be >= 1, got {}", self.kappa));
        }
        if !(self.p >= 0.0 && self.p.is_finite()) || !(self.q >= 0.0 && self.q.is_finite()) {
            return bad(format!("p and q must be nonnegative, got p={}, q={}", self.p, self.q));
        }
        if !(self.sigma_orth > 0.0 && self.sigma_orth.is_finite()) {
            return bad(format!("sigma_orth must be positive, got {}", self.sigma_orth));
        }
        if !(self.epsilon > 0.0 && self.epsilon.is_finite()) {
            return bad(format!("epsilon must be positive, got {}", self.epsilon));
        }
        if self.max_iterations == 0 {
            return bad("max_iterations must be positive".into());
        }
        if self.max_backtracks == 0 {
            return bad("max_backtracks must be positive".into());
        }
        Ok(())
    }

    /// Validation for runs whose iteration bound will be audited.
    ///
    /// Requires `1 + p − q ≥ 0`. Returns whether the evaluation bound also
    /// applies (`1 + p − 2q = 0`); a warning is logged when it does not.
    pub fn validate_for_certificate(&self) -> Result<bool> {
        self.validate()?;
        if 1.0 + self.p - self.q < 0.0 {
            return Err(Error::InvalidConfig(format!(
                "iteration bound needs 1 + p - q >= 0 (p={}, q={})",
                self.p, self.q
            )));
        }
        let exact = self.evaluation_bound_applies();
        if !exact {
            log::warn!(
                "1 + p - 2q = {} != 0: evaluation bound does not apply",
                1.0 + self.p - 2.0 * self.q
            );
        }
        Ok(exact)
    }

    pub fn evaluation_bound_applies(&self) -> bool {
        (1.0 + self.p - 2.0 * self.q).abs() <= 1e-12
    }

    /// Stationarity threshold given the initial gradient norm.
    pub fn threshold(&self, g0_norm: f64) -> f64 {
        match self.stop_rule {
            StopRule::Absolute => self.epsilon,
            StopRule::Relative => self.epsilon * g0_norm.max(1.0),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_valid() {
        let c = SolverConfig::default();
        c.validate().unwrap();
        assert_eq!((c.eta, c.theta, c.sigma, c.kappa), (0.5, 0.5, 0.01, 100.0));
        assert!(c.validate_for_certificate().unwrap());
    }

    #[test]
    fn range_violations() {
        let base = SolverConfig::default();
        for c in [
            SolverConfig { eta: 1.0, ..base.clone() },
            SolverConfig { theta: 0.0, ..base.clone() },
            SolverConfig { sigma: 1.5, ..base.clone() },
            SolverConfig { sigma: 0.0, ..base.clone() },
            SolverConfig { kappa: 0.5, ..base.clone() },
            SolverConfig { p: -0.1, ..base.clone() },
            SolverConfig { epsilon: 0.0, ..base.clone() },
            SolverConfig { max_iterations: 0, ..base.clone() },
        ] {
            assert!(c.validate().is_err(), "{c:?}");
        }
        let ok = SolverConfig { sigma: 1.0, kappa: 1.0, ..base };
        ok.validate().unwrap();
    }

    #[test]
    fn certificate_hypotheses() {
        let c = SolverConfig { p: 0.0, q: 1.5, ..Default::default() };
        assert!(c.validate_for_certificate().is_err());
        let c = SolverConfig { p: 1.0, q: 1.5, ..Default::default() };
        assert!(!c.validate_for_certificate().unwrap());
        for p in [0.0, 0.25, 0.5, 0.75, 1.0] {
            assert!(SolverConfig::restarted(p, BetaFormula::FletcherReeves).evaluation_bound_applies());
        }
    }

    #[test]
    fn json_shape() {
        let c: SolverConfig =
            serde_json::from_str(r#"{"beta":"HZ","restart":"STANDARD","warm_start":"UNIT"}"#).unwrap();
        assert_eq!(c.beta, BetaFormula::HagerZhang);
        assert_eq!(c.restart, RestartKind::Standard);
        assert!(serde_json::from_str::<SolverConfig>(r#"{"bogus":1}"#).is_err());
    }

    #[test]
    fn thresholds() {
        let c = SolverConfig { epsilon: 1e-5, stop_rule: StopRule::Relative, ..Default::default() };
        assert_eq!(c.threshold(0.5), 1e-5);
        assert_eq!(c.threshold(200.0), 2e-3);
    }
}
