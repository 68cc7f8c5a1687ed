//! Monte Carlo experiments that compare simulated ensembles against the
//! closed forms and limit laws.
//!
//! An [`ExperimentSpec`] names a check, the model parameters, the scales `n`
//! (used as `Z₀`), the path count and the check-specific grid. Running it
//! produces an [`McReport`] that is a pure function of the spec: path `i` at
//! scale `k` always uses the seed `derive_seed(derive_seed(master, k), i)`,
//! and results are gathered in index order whatever the worker count.

mod checks;
mod report;

pub use checks::{
    run_equivalence_check, run_fclt_check, run_flln_check, run_mgf_check, run_moment_check,
    run_passage_check, run_rescaled_check,
};
pub use report::{Entry, McReport, Measure, RawColumn, ScaleReport, StatSummary};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{HawkesError, Result};
use crate::model::HawkesParams;
use crate::rng::derive_seed;
use crate::simulator::DEFAULT_EVENT_CAP;

/// Seed used when a spec or the command line gives none.
pub const DEFAULT_SEED: u64 = 42;

/// Report version string.
pub const VERSION: &str = concat!("hawkes-core ", env!("CARGO_PKG_VERSION"));

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckKind {
    /// Empirical `E[Z_t]`, `Var(Z_t)`, `E[Z_t³]` against the closed forms (z-scores).
    Moment,
    /// Sup-deviation of `Z/n` and `N/n` from their fluid limits across scales.
    Flln,
    /// KS of the centred `Z`/`N` statistics against `G`/`H`, plus covariance z-tests.
    Fclt,
    /// Empirical `P(N_t ≥ K)` against the normal passage-time approximation.
    Passage,
    /// Large-time rescaled limits, dispatched on the regime.
    Rescaled,
    /// Direct vs cluster simulator on `N_T` (two-sample chi-square).
    Equivalence,
    /// Empirical `E[e^{-θ Z_t}]` against `e^{A(t,-θ) z0}` (relative error).
    Mgf,
}

impl CheckKind {
    pub fn name(&self) -> &'static str {
        match self {
            CheckKind::Moment => "moment",
            CheckKind::Flln => "flln",
            CheckKind::Fclt => "fclt",
            CheckKind::Passage => "passage",
            CheckKind::Rescaled => "rescaled",
            CheckKind::Equivalence => "equivalence",
            CheckKind::Mgf => "mgf",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Thresholds {
    /// Largest accepted `|z|` for moment and covariance z-tests.
    pub z_max: f64,
    /// Smallest accepted p-value for one-sample KS tests.
    pub ks_p: f64,
    /// Smallest accepted p-value for the simulator-equivalence chi-square.
    pub chi2_p: f64,
    /// Smallest accepted p-value for two-sample KS against the CIR ensemble.
    pub cir_ks_p: f64,
    /// Smallest accepted cross-time correlation (super-critical flatness).
    pub corr_min: f64,
    /// Largest accepted `|corr|` (sub-critical independence).
    pub corr_abs_max: f64,
    /// Largest accepted pointwise error of the passage-time approximation.
    pub passage_abs: f64,
    /// Largest accepted relative error of the transform.
    pub mgf_rel: f64,
    /// Accepted range of the fitted sup-deviation decay exponent.
    pub exponent_range: (f64, f64),
}

impl Default for Thresholds {
    fn default() -> Self {
        Thresholds {
            z_max: 4.0,
            ks_p: 0.01,
            chi2_p: 0.001,
            cir_ks_p: 0.001,
            corr_min: 0.8,
            corr_abs_max: 0.1,
            passage_abs: 0.02,
            mgf_rel: 0.01,
            exponent_range: (0.4, 0.6),
        }
    }
}

fn default_seed() -> u64 {
    DEFAULT_SEED
}

fn default_cap() -> u64 {
    DEFAULT_EVENT_CAP
}

/// One Monte Carlo experiment.
///
/// `times` holds observation times, or scaled times `s` for the rescaled
/// check. `levels` holds the offsets `c` of `K = nψ(t) + c√n` for the passage
/// check, and `thetas` the transform arguments for the mgf check. `gamma`
/// selects the nearly-critical rescaled check with `α_n = β + γ/n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSpec {
    pub name: String,
    pub check: CheckKind,
    pub params: HawkesParams,
    pub scales: Vec<f64>,
    pub paths_per_scale: u64,
    #[serde(default)]
    pub times: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub horizon: Option<f64>,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default)]
    pub thresholds: Thresholds,
    #[serde(default = "default_cap")]
    pub event_cap: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma: Option<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub thetas: Vec<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub levels: Vec<f64>,
    /// CIR reference paths for the critical rescaled check (default `10 × paths`).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reference_paths: Option<u64>,
    /// Grid step of the CIR reference (default `1e-3`).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cir_step: Option<f64>,
    /// Keep the per-path statistics in the report for CSV export.
    #[serde(default)]
    pub keep_raw: bool,
}

impl ExperimentSpec {
    pub fn new(name: impl Into<String>, check: CheckKind, params: HawkesParams, scales: Vec<f64>, paths_per_scale: u64) -> Self {
        ExperimentSpec {
            name: name.into(),
            check,
            params,
            scales,
            paths_per_scale,
            times: Vec::new(),
            horizon: None,
            seed: DEFAULT_SEED,
            thresholds: Thresholds::default(),
            event_cap: DEFAULT_EVENT_CAP,
            gamma: None,
            thetas: Vec::new(),
            levels: Vec::new(),
            reference_paths: None,
            cir_step: None,
            keep_raw: false,
        }
    }

    pub fn with_times(mut self, times: Vec<f64>) -> Self {
        self.times = times;
        self
    }

    pub fn with_horizon(mut self, horizon: f64) -> Self {
        self.horizon = Some(horizon);
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.paths_per_scale < 100 {
            return Err(HawkesError::invalid("paths_per_scale", format!("must be >= 100, got {}", self.paths_per_scale)));
        }
        if self.scales.is_empty() {
            return Err(HawkesError::invalid("scales", "must be nonempty"));
        }
        if self.scales.iter().any(|n| !(n.is_finite() && *n >= 0.0)) {
            return Err(HawkesError::invalid("scales", "every scale must be finite and >= 0"));
        }
        if self.times.iter().any(|t| !(t.is_finite() && *t >= 0.0)) || self.times.windows(2).any(|w| w[1] <= w[0]) {
            return Err(HawkesError::invalid("times", "must be finite, >= 0 and strictly increasing"));
        }
        if let Some(h) = self.horizon {
            if !(h.is_finite() && h > 0.0) {
                return Err(HawkesError::invalid("horizon", format!("must be finite and > 0, got {h}")));
            }
        }
        let needs_times = matches!(self.check, CheckKind::Moment | CheckKind::Fclt | CheckKind::Passage | CheckKind::Rescaled | CheckKind::Mgf);
        if needs_times && self.times.is_empty() {
            return Err(HawkesError::invalid("times", format!("required by the {} check", self.check.name())));
        }
        if matches!(self.check, CheckKind::Fclt) && self.times[0] == 0.0 {
            return Err(HawkesError::invalid("times", "the fluctuation statistic is degenerate at t = 0"));
        }
        if matches!(self.check, CheckKind::Passage) && self.levels.is_empty() {
            return Err(HawkesError::invalid("levels", "required by the passage check"));
        }
        if matches!(self.check, CheckKind::Mgf) && self.thetas.is_empty() {
            return Err(HawkesError::invalid("thetas", "required by the mgf check"));
        }
        if self.event_cap == 0 {
            return Err(HawkesError::invalid("event_cap", "must be > 0"));
        }
        self.params_at(self.scales[0]).map(|_| ())
    }

    /// Model parameters at scale `n`: `Z₀ = n`, and `α_n = β + γ/n` when `gamma` is set.
    pub fn params_at(&self, n: f64) -> Result<HawkesParams> {
        match self.gamma {
            Some(gamma) => HawkesParams::nearly_critical(self.params.mu(), self.params.beta(), gamma, n),
            None => self.params.with_z0(n),
        }
    }
}

pub fn run_experiment(spec: &ExperimentSpec) -> Result<McReport> {
    match spec.check {
        CheckKind::Moment => run_moment_check(spec),
        CheckKind::Flln => run_flln_check(spec),
        CheckKind::Fclt => run_fclt_check(spec),
        CheckKind::Passage => run_passage_check(spec),
        CheckKind::Rescaled => run_rescaled_check(spec),
        CheckKind::Equivalence => run_equivalence_check(spec),
        CheckKind::Mgf => run_mgf_check(spec),
    }
}

/// Runs `f(i)` for `i in 0..count` on the current rayon pool and returns the
/// results in index order. The first error by index wins, so failures are
/// reported identically for every worker count.
pub(crate) fn ensemble<T: Send>(count: u64, f: impl Fn(u64) -> Result<T> + Sync + Send) -> Result<Vec<T>> {
    let results: Vec<Result<T>> = (0..count).into_par_iter().map(f).collect();
    results.into_iter().collect()
}

/// Seed of stream `stream` at scale index `k`.
pub(crate) fn scale_seed(master: u64, k: usize, stream: u64) -> u64 {
    derive_seed(derive_seed(master, k as u64), stream)
}

/// A sequence of experiments preceded by a simulator-equivalence gate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteSpec {
    pub name: String,
    #[serde(default = "default_seed")]
    pub seed: u64,
    /// Gate experiments; when empty, one equivalence check per distinct
    /// parameter set is derived from the experiments.
    #[serde(default)]
    pub gates: Vec<ExperimentSpec>,
    pub experiments: Vec<ExperimentSpec>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteAttempt {
    pub seed: u64,
    pub gates: Vec<McReport>,
    pub gate_passed: bool,
    pub reports: Vec<McReport>,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub name: String,
    pub master_seed: u64,
    pub version: String,
    pub attempts: Vec<SuiteAttempt>,
    pub passed: bool,
}

impl SuiteReport {
    pub fn to_table(&self) -> String {
        let mut out = format!(
            "suite {} (seed {}, {}): {}\n",
            self.name,
            self.master_seed,
            self.version,
            if self.passed { "PASS" } else { "FAIL" }
        );
        for (k, attempt) in self.attempts.iter().enumerate() {
            out.push_str(&format!("attempt {} (seed {}): {}\n", k + 1, attempt.seed, if attempt.passed { "PASS" } else { "FAIL" }));
            for r in attempt.gates.iter().chain(&attempt.reports) {
                out.push_str(&r.to_table());
            }
        }
        out
    }
}

fn default_gates(experiments: &[ExperimentSpec]) -> Vec<ExperimentSpec> {
    let mut seen: Vec<HawkesParams> = Vec::new();
    let mut gates = Vec::new();
    for e in experiments {
        let Ok(p) = e.params.with_z0(100.0) else { continue };
        if seen.contains(&p) {
            continue;
        }
        seen.push(p);
        let name = format!("gate-{}", gates.len() + 1);
        gates.push(ExperimentSpec::new(name, CheckKind::Equivalence, p, vec![100.0], 2000).with_horizon(1.0));
    }
    gates
}

fn run_attempt(suite: &SuiteSpec, seed: u64) -> Result<SuiteAttempt> {
    let gate_specs = if suite.gates.is_empty() { default_gates(&suite.experiments) } else { suite.gates.clone() };
    let mut gates = Vec::with_capacity(gate_specs.len());
    for (k, g) in gate_specs.iter().enumerate() {
        gates.push(run_experiment(&g.clone().with_seed(derive_seed(seed, k as u64)))?);
    }
    let gate_passed = gates.iter().all(|g| g.passed);
    let mut reports = Vec::new();
    if gate_passed {
        for (k, e) in suite.experiments.iter().enumerate() {
            let s = derive_seed(seed, (gate_specs.len() + k) as u64);
            reports.push(run_experiment(&e.clone().with_seed(s))?);
        }
    }
    let passed = gate_passed && reports.iter().all(|r| r.passed);
    Ok(SuiteAttempt {
        seed,
        gates,
        gate_passed,
        reports,
        passed,
    })
}

/// Runs the gate and the experiments. A failed attempt is retried once with
/// a fresh master seed; a second failure is final.
pub fn run_suite(suite: &SuiteSpec) -> Result<SuiteReport> {
    for e in suite.gates.iter().chain(&suite.experiments) {
        e.validate()?;
    }
    let mut attempts = vec![run_attempt(suite, suite.seed)?];
    if !attempts[0].passed {
        attempts.push(run_attempt(suite, derive_seed(suite.seed, u64::MAX))?);
    }
    let passed = attempts.iter().any(|a| a.passed);
    Ok(SuiteReport {
        name: suite.name.clone(),
        master_seed: suite.seed,
        version: VERSION.to_string(),
        attempts,
        passed,
    })
}

#[cfg(test)]
mod tests;
