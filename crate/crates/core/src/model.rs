//! Model parameters, regime classification and the deterministic curves
//! shared by the rest of the crate.

use serde::{Deserialize, Serialize};

use crate::error::{HawkesError, Result};

/// Relative tolerance on `|α - β|` below which the critical branch is used.
pub const CRITICAL_TOLERANCE: f64 = 1e-12;

/// Below this value of `|δ t|` the growth integral is evaluated by series.
const SERIES_SWITCH: f64 = 1e-6;

/// Parameters of `λ_t = μ + Z_{t-}`, `dZ = -βZ dt + α dN`, `Z_0 = z0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawParams", into = "RawParams")]
pub struct HawkesParams {
    mu: f64,
    alpha: f64,
    beta: f64,
    z0: f64,
}

#[derive(Serialize, Deserialize)]
struct RawParams {
    mu: f64,
    alpha: f64,
    beta: f64,
    z0: f64,
}

impl TryFrom<RawParams> for HawkesParams {
    type Error = HawkesError;

    fn try_from(raw: RawParams) -> Result<Self> {
        HawkesParams::new(raw.mu, raw.alpha, raw.beta, raw.z0)
    }
}

impl From<HawkesParams> for RawParams {
    fn from(p: HawkesParams) -> Self {
        RawParams {
            mu: p.mu,
            alpha: p.alpha,
            beta: p.beta,
            z0: p.z0,
        }
    }
}

impl HawkesParams {
    pub fn new(mu: f64, alpha: f64, beta: f64, z0: f64) -> Result<Self> {
        if !(mu.is_finite() && mu >= 0.0) {
            return Err(HawkesError::invalid("mu", format!("must be finite and >= 0, got {mu}")));
        }
        if !(alpha.is_finite() && alpha > 0.0) {
            return Err(HawkesError::invalid("alpha", format!("must be finite and > 0, got {alpha}")));
        }
        if !(beta.is_finite() && beta > 0.0) {
            return Err(HawkesError::invalid("beta", format!("must be finite and > 0, got {beta}")));
        }
        if !(z0.is_finite() && z0 >= 0.0) {
            return Err(HawkesError::invalid("z0", format!("must be finite and >= 0, got {z0}")));
        }
        Ok(HawkesParams { mu, alpha, beta, z0 })
    }

    /// Parameters of the nearly critical family `α_n = β + γ/n`, `Z_0 = n`.
    pub fn nearly_critical(mu: f64, beta: f64, gamma: f64, n: f64) -> Result<Self> {
        if !(n >= 1.0) {
            return Err(HawkesError::invalid("n", format!("scale index must be >= 1, got {n}")));
        }
        let alpha = beta + gamma / n;
        if !(alpha > 0.0) {
            return Err(HawkesError::invalid(
                "gamma",
                format!("alpha_n = beta + gamma/n = {alpha} is not positive"),
            ));
        }
        HawkesParams::new(mu, alpha, beta, n)
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn z0(&self) -> f64 {
        self.z0
    }

    /// Initial intensity `λ_0 = μ + Z_0`.
    pub fn initial_intensity(&self) -> f64 {
        self.mu + self.z0
    }

    pub fn with_z0(self, z0: f64) -> Result<Self> {
        HawkesParams::new(self.mu, self.alpha, self.beta, z0)
    }

    pub fn with_mu(self, mu: f64) -> Result<Self> {
        HawkesParams::new(mu, self.alpha, self.beta, self.z0)
    }

    /// Branching ratio `‖h‖_{L¹} = α/β`.
    pub fn branching_ratio(&self) -> f64 {
        self.alpha / self.beta
    }

    /// `α - β`, the exponential growth rate of `E[Z_t]`.
    pub fn drift(&self) -> f64 {
        self.alpha - self.beta
    }

    /// True when `|α - β|` is within the classification tolerance.
    pub fn is_critical(&self) -> bool {
        (self.alpha - self.beta).abs() <= CRITICAL_TOLERANCE * self.alpha.max(self.beta)
    }

    /// Growth rate with the critical branch snapped to exactly zero.
    pub fn effective_drift(&self) -> f64 {
        if self.is_critical() {
            0.0
        } else {
            self.drift()
        }
    }

    pub(crate) fn require_zero_mu(&self, what: &str) -> Result<()> {
        if self.mu > 0.0 {
            Err(HawkesError::UnsupportedCase(format!(
                "{what} is only available in closed form for mu = 0 (got mu = {})",
                self.mu
            )))
        } else {
            Ok(())
        }
    }
}

/// Long-time regime of the process.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "regime", rename_all = "snake_case")]
pub enum Regime {
    SubCritical,
    Critical,
    SuperCritical,
    /// `α_n = β + γ/n`; only ever constructed explicitly.
    NearlyCritical { gamma: f64, n: f64 },
}

impl Regime {
    pub fn nearly_critical(beta: f64, gamma: f64, n: f64) -> Result<Self> {
        if !(n >= 1.0) {
            return Err(HawkesError::invalid("n", format!("scale index must be >= 1, got {n}")));
        }
        if !(beta + gamma / n > 0.0) {
            return Err(HawkesError::invalid("gamma", "beta + gamma/n must be positive"));
        }
        Ok(Regime::NearlyCritical { gamma, n })
    }

    pub fn name(&self) -> &'static str {
        match self {
            Regime::SubCritical => "sub-critical",
            Regime::Critical => "critical",
            Regime::SuperCritical => "super-critical",
            Regime::NearlyCritical { .. } => "nearly-critical",
        }
    }
}

impl std::fmt::Display for Regime {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

pub fn classify_regime(p: &HawkesParams) -> Regime {
    if p.is_critical() {
        Regime::Critical
    } else if p.alpha > p.beta {
        Regime::SuperCritical
    } else {
        Regime::SubCritical
    }
}

/// Strictly increasing sample times `t0 = points[0] < … < points[last] = t1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct TimeGrid {
    points: Vec<f64>,
}

impl TryFrom<Vec<f64>> for TimeGrid {
    type Error = HawkesError;

    fn try_from(points: Vec<f64>) -> Result<Self> {
        TimeGrid::new(points)
    }
}

impl From<TimeGrid> for Vec<f64> {
    fn from(g: TimeGrid) -> Self {
        g.points
    }
}

impl TimeGrid {
    pub fn new(points: Vec<f64>) -> Result<Self> {
        if points.len() < 2 {
            return Err(HawkesError::InvalidGrid("need at least two points".into()));
        }
        if !(points[0].is_finite() && points[0] >= 0.0) {
            return Err(HawkesError::InvalidGrid(format!("start {} must be >= 0", points[0])));
        }
        for w in points.windows(2) {
            if !(w[1] > w[0]) || !w[1].is_finite() {
                return Err(HawkesError::InvalidGrid(format!(
                    "points must be strictly increasing ({} then {})",
                    w[0], w[1]
                )));
            }
        }
        Ok(TimeGrid { points })
    }

    /// `steps + 1` equally spaced points on `[t0, t1]`.
    pub fn uniform(t0: f64, t1: f64, steps: usize) -> Result<Self> {
        if steps == 0 {
            return Err(HawkesError::InvalidGrid("steps must be positive".into()));
        }
        if !(t1 > t0) {
            return Err(HawkesError::InvalidGrid(format!("t1 = {t1} must exceed t0 = {t0}")));
        }
        let h = (t1 - t0) / steps as f64;
        let mut points: Vec<f64> = (0..=steps).map(|i| t0 + h * i as f64).collect();
        points[steps] = t1;
        TimeGrid::new(points)
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn start(&self) -> f64 {
        self.points[0]
    }

    pub fn end(&self) -> f64 {
        self.points[self.points.len() - 1]
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

/// `∫₀ᵗ e^{δ s} ds` for a growth rate `δ` that has already been snapped
/// (exact zero selects the critical branch).
pub fn growth_integral(delta: f64, t: f64) -> f64 {
    if delta == 0.0 {
        return t;
    }
    let x = delta * t;
    if x.abs() < SERIES_SWITCH {
        t * (1.0 + x / 2.0 * (1.0 + x / 3.0 * (1.0 + x / 4.0)))
    } else {
        x.exp_m1() / delta
    }
}

/// `E[Z_t | Z_0] = z0 e^{(α-β)t}` (closed form requires `μ = 0`).
pub fn mean_curve(p: &HawkesParams, t: f64) -> Result<f64> {
    p.require_zero_mu("mean_curve")?;
    check_time(t)?;
    Ok(p.z0 * (p.effective_drift() * t).exp())
}

/// `ψ(t) = (e^{(α-β)t} - 1)/(α - β)`, or `t` on the critical branch.
pub fn psi(p: &HawkesParams, t: f64) -> f64 {
    growth_integral(p.effective_drift(), t)
}

pub(crate) fn check_time(t: f64) -> Result<()> {
    if t.is_finite() && t >= 0.0 {
        Ok(())
    } else {
        Err(HawkesError::invalid("t", format!("must be finite and >= 0, got {t}")))
    }
}
