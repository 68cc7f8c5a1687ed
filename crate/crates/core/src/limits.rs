//! Limit-law objects: the FLLN curve, the Gaussian fluctuation laws `G` and
//! `H`, the first-passage approximation and the large-time rescaled limits.
//!
//! Covariances are per unit of `n = Z₀`: `Cov(Z_s, Z_t) ≈ n·cov_g(s, t)`.

use serde::{Deserialize, Serialize};

use crate::cir::CirParams;
use crate::error::{HawkesError, Result};
use crate::model::{check_time, classify_regime, psi, HawkesParams, Regime};
use crate::quadrature::integrate;
use crate::stats::normal_sf;

const INNER_TOL: f64 = 1e-13;

/// `Cov(G_s, G_t) = α² e^{(α-β) max(s,t)} ψ(min(s,t))`.
pub fn cov_g(p: &HawkesParams, s: f64, t: f64) -> f64 {
    let (lo, hi) = if s <= t { (s, t) } else { (t, s) };
    p.alpha() * p.alpha() * (p.effective_drift() * hi).exp() * psi(p, lo)
}

/// Centered Gaussian law of the `Z`-fluctuation `(Z_t - n e^{(α-β)t})/√n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaussianLawG {
    pub params: HawkesParams,
}

impl GaussianLawG {
    pub fn new(params: HawkesParams) -> Self {
        GaussianLawG { params }
    }

    pub fn cov(&self, s: f64, t: f64) -> f64 {
        cov_g(&self.params, s, t)
    }

    pub fn var(&self, t: f64) -> f64 {
        self.cov(t, t)
    }
}

/// Centered Gaussian law of the `N`-fluctuation `(N_t - nψ(t))/√n`, i.e. of
/// `H_t = G_t/α + (β/α)∫₀ᵗ G_s ds`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaussianLawH {
    pub params: HawkesParams,
}

impl GaussianLawH {
    pub fn new(params: HawkesParams) -> Self {
        GaussianLawH { params }
    }

    fn g(&self, s: f64, t: f64) -> f64 {
        cov_g(&self.params, s, t)
    }

    /// `∫₀ᵗ Γ(u, v) dv`, split at the kink `v = u`.
    fn integrated_once(&self, u: f64, t: f64) -> f64 {
        let k = u.min(t);
        let left = integrate(|v| self.g(v, u), 0.0, k, INNER_TOL, INNER_TOL).value;
        let right = integrate(|v| self.g(u, v), k, t, INNER_TOL, INNER_TOL).value;
        left + right
    }

    /// `∫₀ˢ∫₀ᵗ Γ(u, v) dv du`.
    fn integrated_twice(&self, s: f64, t: f64, tol: f64) -> f64 {
        let kink = s.min(t);
        let a = integrate(|u| self.integrated_once(u, t), 0.0, kink, tol, 1e-12).value;
        let b = integrate(|u| self.integrated_once(u, t), kink, s, tol, 1e-12).value;
        a + b
    }

    pub fn cov_h(&self, s: f64, t: f64) -> f64 {
        let (alpha, beta) = (self.params.alpha(), self.params.beta());
        let tol = 1e-10 * (1.0 + s.max(t).powi(2));
        let cross = self.integrated_once(s, t) + self.integrated_once(t, s);
        (self.g(s, t) + beta * cross + beta * beta * self.integrated_twice(s, t, tol)) / (alpha * alpha)
    }

    /// `Var(H_t)`; the double integral runs over the triangle `u ≤ v` and is doubled.
    pub fn var_h(&self, t: f64) -> f64 {
        if t == 0.0 {
            return 0.0;
        }
        let (alpha, beta) = (self.params.alpha(), self.params.beta());
        let tol = 1e-10 * (1.0 + t * t);
        let once = self.integrated_once(t, t);
        let triangle = integrate(
            |v| integrate(|u| self.g(u, v), 0.0, v, INNER_TOL, INNER_TOL).value,
            0.0,
            t,
            tol / 4.0,
            1e-12,
        )
        .value;
        (self.g(t, t) + 2.0 * beta * once + 2.0 * beta * beta * triangle) / (alpha * alpha)
    }
}

pub fn var_h(p: &HawkesParams, t: f64) -> f64 {
    GaussianLawH::new(*p).var_h(t)
}

/// Normal approximation `P(τ_K ≤ t) = P(N_t ≥ K) ≈ 1 - Φ((K - nψ(t))/√(n Var(H_t)))`
/// with `n = z0`. A vanishing variance returns the degenerate limit `1{K ≤ nψ(t)}`.
pub fn passage_time_cdf(p: &HawkesParams, k: f64, t: f64) -> Result<f64> {
    p.require_zero_mu("passage_time_cdf")?;
    if !(k.is_finite() && k > 0.0) {
        return Err(HawkesError::invalid("K", format!("must be finite and > 0, got {k}")));
    }
    check_time(t)?;
    let n = p.z0();
    if n <= 0.0 {
        return Err(HawkesError::invalid("z0", "must be > 0 for the passage-time approximation"));
    }
    let centre = n * psi(p, t);
    let sd = (n * var_h(p, t)).sqrt();
    if !(sd > 1e-150) {
        return Ok(if k <= centre { 1.0 } else { 0.0 });
    }
    Ok(normal_sf((k - centre) / sd))
}

/// Large-time scale `log n / |α - β|` (`τ_n` super-critical, `t_n` sub-critical).
pub fn rescaling_time(p: &HawkesParams, n: f64) -> Result<f64> {
    match classify_regime(p) {
        Regime::SuperCritical | Regime::SubCritical => Ok(n.ln() / p.drift().abs()),
        other => Err(HawkesError::WrongRegime {
            expected: "sub-critical or super-critical".into(),
            found: other.name().into(),
        }),
    }
}

/// Deterministic limits of the log-rescaled processes at scaled time `s`:
/// `(Z/n^{1+s}, N/n^{1+s})` super-critically and `(Z/n^{1-s}, N/n)` sub-critically.
pub fn lln_rescaled_curves(p: &HawkesParams, s: f64, n: f64) -> Result<(f64, f64)> {
    if !(s.is_finite() && s >= 0.0) {
        return Err(HawkesError::invalid("s", format!("must be finite and >= 0, got {s}")));
    }
    if !(n.is_finite() && n >= 1.0) {
        return Err(HawkesError::invalid("n", format!("must be finite and >= 1, got {n}")));
    }
    let rate = p.drift().abs();
    match classify_regime(p) {
        Regime::SuperCritical => Ok((1.0, (1.0 - n.powf(-s)) / rate)),
        Regime::SubCritical => {
            if s >= 1.0 {
                return Err(HawkesError::invalid("s", "sub-critical rescaling requires s < 1"));
            }
            Ok((1.0, (1.0 - n.powf(-s)) / rate))
        }
        other => Err(HawkesError::WrongRegime {
            expected: "sub-critical or super-critical".into(),
            found: other.name().into(),
        }),
    }
}

/// Functional of `X` that the rescaled counting process converges to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CountingLimit {
    /// `N_{tn}/n² → ∫₀ᵗ X_s ds`.
    IntegralOfX,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "law", rename_all = "snake_case")]
pub enum RescaledLimitLaw {
    /// `(Z_{sτ_n} - n^{1+s})/n^{1/2+s} → ξ ~ N(0, α²/(α-β))`, constant in `s > 0`.
    SuperCriticalXi { variance: f64 },
    /// `(Z_{st_n} - n^{1-s})/n^{(1-s)/2} → R_s`, independent across `s` with variance `α²/(β-α)`.
    SubCriticalR { variance: f64 },
    /// `Z_{tn}/n → X`, a CIR process started at 1.
    CriticalCir { process: CirParams, counting_limit: CountingLimit },
}

impl RescaledLimitLaw {
    pub fn variance(&self) -> Option<f64> {
        match *self {
            RescaledLimitLaw::SuperCriticalXi { variance } | RescaledLimitLaw::SubCriticalR { variance } => Some(variance),
            RescaledLimitLaw::CriticalCir { .. } => None,
        }
    }
}

pub fn rescaled_limit_law(p: &HawkesParams, regime: Regime) -> Result<RescaledLimitLaw> {
    let found = classify_regime(p);
    let mismatch = |expected: &Regime| HawkesError::WrongRegime {
        expected: expected.name().into(),
        found: found.name().into(),
    };
    let a2 = p.alpha() * p.alpha();
    match regime {
        Regime::SuperCritical if found == Regime::SuperCritical => Ok(RescaledLimitLaw::SuperCriticalXi {
            variance: a2 / p.drift(),
        }),
        Regime::SubCritical if found == Regime::SubCritical => Ok(RescaledLimitLaw::SubCriticalR {
            variance: a2 / -p.drift(),
        }),
        Regime::Critical if found == Regime::Critical => Ok(critical_cir(p, 0.0)),
        Regime::NearlyCritical { gamma, n } => {
            let expected = p.beta() + gamma / n;
            if (p.alpha() - expected).abs() > 1e-9 * expected {
                return Err(mismatch(&regime));
            }
            Ok(critical_cir(p, gamma))
        }
        _ => Err(mismatch(&regime)),
    }
}

fn critical_cir(p: &HawkesParams, gamma: f64) -> RescaledLimitLaw {
    RescaledLimitLaw::CriticalCir {
        process: CirParams {
            beta: p.beta(),
            gamma,
            mu: p.mu(),
            x0: 1.0,
        },
        counting_limit: CountingLimit::IntegralOfX,
    }
}
