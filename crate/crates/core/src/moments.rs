//! Conditional moments of `Z_t` given `Z_0` for `μ = 0`.
//!
//! With `x = e^{(α-β)t}` and `ψ = ψ(t)` the three moments factor as
//!
//! ```text
//! E[Z_t]   = Z₀ x
//! E[Z_t²]  = Z₀² x² + α² Z₀ x ψ
//! E[Z_t³]  = Z₀³ x³ + 3α² Z₀² x² ψ + (α³ Z₀ / 2) x (x + 1) ψ + (3α⁴ Z₀ / 2) x ψ²
//! ```
//!
//! which is algebraically identical to the separate `α = β` and `α ≠ β`
//! expressions but has no `1/(α-β)` factors, so it is continuous across the
//! critical branch and free of cancellation near it.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::model::{check_time, psi, HawkesParams};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MomentSet {
    pub t: f64,
    pub ez: f64,
    pub ez2: f64,
    pub ez3: f64,
}

impl MomentSet {
    pub fn variance(&self) -> f64 {
        clamp_variance(self.ez2 - self.ez * self.ez, self.ez2)
    }
}

fn clamp_variance(v: f64, scale: f64) -> f64 {
    if v < 0.0 && -v <= 1e-9 * scale.abs() {
        0.0
    } else {
        v
    }
}

pub fn moments_of_z(p: &HawkesParams, t: f64) -> Result<MomentSet> {
    p.require_zero_mu("moments_of_z")?;
    check_time(t)?;
    let (z, a) = (p.z0(), p.alpha());
    let x = (p.effective_drift() * t).exp();
    let g = psi(p, t);
    let a2 = a * a;
    Ok(MomentSet {
        t,
        ez: z * x,
        ez2: z * z * x * x + a2 * z * x * g,
        ez3: z * z * z * x * x * x
            + 3.0 * a2 * z * z * x * x * g
            + 0.5 * a2 * a * z * x * (x + 1.0) * g
            + 1.5 * a2 * a2 * z * x * g * g,
    })
}

/// `Var(Z_t | Z_0) = α² Z₀ e^{(α-β)t} ψ(t)`, i.e. `E[Z²] - E[Z]²` without the
/// subtraction.
pub fn variance_of_z(p: &HawkesParams, t: f64) -> Result<f64> {
    p.require_zero_mu("variance_of_z")?;
    check_time(t)?;
    let x = (p.effective_drift() * t).exp();
    Ok(p.alpha() * p.alpha() * p.z0() * x * psi(p, t))
}
