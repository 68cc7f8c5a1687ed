//! The affine transform of `Z_t`.
//!
//! For `μ = 0`, `E[e^{-θ Z_t} | Z_0 = z] = e^{A(t,-θ) z}` where
//!
//! ```text
//! A'(t) = -β A + e^{α A} - 1,    A(0) = -θ.
//! ```
//!
//! Solutions started at a positive value explode in finite time
//! `∫_{a0}^∞ dA / F(A)` (with `F(A) = -βA + e^{αA} - 1`) unless they lie
//! below the positive root `A_c` of `F`, which only exists for `α < β`.
//! `θ_c(t)` is the starting value whose explosion time is exactly `t`.

use serde::{Deserialize, Serialize};

use crate::error::{HawkesError, Result};
use crate::model::{classify_regime, psi, HawkesParams, Regime, TimeGrid};
use crate::ode::{self, DenseSolution, Tolerances};
use crate::quadrature::integrate;

/// Relative gap to `A_c` under which `θ_c` is reported as saturated.
pub const SATURATION_GAP: f64 = 1e-9;
const BISECTION_RTOL: f64 = 1e-10;
const QUAD_ABS_TOL: f64 = 1e-12;
const QUAD_REL_TOL: f64 = 1e-12;

/// `|A|` beyond which integration stops and a blow-up is recorded.
pub fn blow_up_bound(p: &HawkesParams) -> f64 {
    500.0 / p.alpha()
}

/// `e^x - 1 - x` without cancellation for small `|x|`.
fn expm1_minus_x(x: f64) -> f64 {
    if x.abs() >= 0.5 {
        return x.exp_m1() - x;
    }
    let mut term = x * x / 2.0;
    let mut sum = term;
    let mut k = 2.0;
    while term.abs() > 1e-18 * sum.abs() {
        k += 1.0;
        term *= x / k;
        sum += term;
    }
    sum
}

/// Right-hand side `F(A) = (α - β)A + (e^{αA} - 1 - αA)`.
pub fn a_rhs(p: &HawkesParams, a: f64) -> f64 {
    p.effective_drift() * a + expm1_minus_x(p.alpha() * a)
}

fn ode_tolerances() -> Tolerances {
    Tolerances::default()
}

fn integrate_a(p: &HawkesParams, a0: f64, t0: f64, t1: f64) -> DenseSolution {
    let p = *p;
    ode::integrate(move |a| a_rhs(&p, a), t0, a0, t1, blow_up_bound(&p), ode_tolerances())
}

/// `t ↦ A(t)` on a grid, with `A(grid.start()) = a0`.
#[derive(Debug, Clone)]
pub struct OdeSolutionA {
    a0: f64,
    grid: TimeGrid,
    values: Vec<f64>,
    blew_up_at: Option<f64>,
    dense: DenseSolution,
}

impl OdeSolutionA {
    pub fn a0(&self) -> f64 {
        self.a0
    }

    pub fn grid(&self) -> &TimeGrid {
        &self.grid
    }

    /// Values at the grid points reached before any blow-up.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn blew_up_at(&self) -> Option<f64> {
        self.blew_up_at
    }

    /// Dense evaluation; `None` outside the solved range.
    pub fn eval(&self, t: f64) -> Option<f64> {
        self.dense.eval(t)
    }
}

pub fn solve_a(p: &HawkesParams, a0: f64, grid: &TimeGrid) -> OdeSolutionA {
    let dense = integrate_a(p, a0, grid.start(), grid.end());
    let values = grid
        .points()
        .iter()
        .map_while(|&t| dense.eval(t))
        .collect();
    OdeSolutionA {
        a0,
        grid: grid.clone(),
        values,
        blew_up_at: dense.blew_up_at(),
        dense,
    }
}

/// `A(t, a0)`, or `None` when the solution explodes before `t`.
pub fn a_at(p: &HawkesParams, a0: f64, t: f64) -> Option<f64> {
    if t == 0.0 {
        return Some(a0);
    }
    let dense = integrate_a(p, a0, 0.0, t);
    match dense.blew_up_at() {
        Some(_) => None,
        None => Some(dense.y_end()),
    }
}

/// Positive root `A_c` of `F` (sub-critical only).
pub fn critical_root(p: &HawkesParams) -> Option<f64> {
    if classify_regime(p) != Regime::SubCritical {
        return None;
    }
    // F(0) = 0, F'(0) < 0 and F is convex: one sign change on (0, ∞).
    let mut hi = 1.0 / p.alpha();
    while a_rhs(p, hi) <= 0.0 {
        hi *= 2.0;
    }
    let mut lo = hi / 2.0;
    while a_rhs(p, lo) > 0.0 {
        lo /= 2.0;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if a_rhs(p, mid) > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Some(0.5 * (lo + hi))
}

/// `∫_A^∞ dA'/F(A')` for `A ≥ lo`, via `u = e^{-αA}`; the integrand tends
/// to `1/α` as `u → 0`.
fn tail_integral(p: &HawkesParams, lo: f64) -> f64 {
    let (alpha, beta) = (p.alpha(), p.beta());
    let u0 = (-alpha * lo).exp();
    let f = |u: f64| {
        let a = -u.ln() / alpha;
        1.0 / (alpha * (1.0 - u * (1.0 + beta * a)))
    };
    integrate(f, 0.0, u0, QUAD_ABS_TOL, QUAD_REL_TOL).value
}

/// Structure of the explosion-time integral for one parameter set.
enum Explosion {
    /// `F > 0` on `(0, ∞)`.
    FromZero,
    /// `F < 0` on `(0, A_c)`; offsets are measured from `A_c`.
    FromRoot { root: f64, e_root: f64, slope: f64 },
}

impl Explosion {
    fn new(p: &HawkesParams) -> Self {
        match critical_root(p) {
            Some(root) => {
                let e_root = (p.alpha() * root).exp();
                Explosion::FromRoot {
                    root,
                    e_root,
                    slope: p.alpha() * e_root - p.beta(),
                }
            }
            None => Explosion::FromZero,
        }
    }

    /// Explosion time from `A(0) = base + offset`, `base` being 0 or `A_c`.
    fn time(&self, p: &HawkesParams, offset: f64) -> f64 {
        match *self {
            Explosion::FromZero => {
                if offset >= 1.0 {
                    return tail_integral(p, offset);
                }
                // A = e^w on [offset, 1]; A/F(A) stays bounded for α > β.
                let f = |w: f64| {
                    let a = w.exp();
                    1.0 / (p.effective_drift() + expm1_minus_x(p.alpha() * a) / a)
                };
                integrate(f, offset.ln(), 0.0, QUAD_ABS_TOL, QUAD_REL_TOL).value + tail_integral(p, 1.0)
            }
            Explosion::FromRoot { root, e_root, slope } => {
                let (alpha, beta) = (p.alpha(), p.beta());
                let split = 1.0;
                if offset >= split {
                    return tail_integral(p, root + offset);
                }
                // F(A_c + h) = -βh + e^{αA_c}(e^{αh} - 1); subtract the simple pole 1/(κh).
                let regular = |h: f64| {
                    let fh = -beta * h + e_root * (alpha * h).exp_m1();
                    -e_root * expm1_minus_x(alpha * h) / (fh * slope * h)
                };
                let near = integrate(regular, offset, split, QUAD_ABS_TOL, QUAD_REL_TOL).value
                    + (split / offset).ln() / slope;
                near + tail_integral(p, root + split)
            }
        }
    }
}

/// Time at which the solution started from `a0` explodes (`∞` if never).
pub fn explosion_time(p: &HawkesParams, a0: f64) -> f64 {
    let shape = Explosion::new(p);
    let base = match shape {
        Explosion::FromZero => 0.0,
        Explosion::FromRoot { root, .. } => root,
    };
    if a0 <= base {
        return f64::INFINITY;
    }
    shape.time(p, a0 - base)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThetaCritical {
    pub t: f64,
    pub value: f64,
    /// Set when `θ_c(t)` is indistinguishable from `A_c` (sub-critical, large `t`).
    pub saturated: bool,
}

pub fn theta_critical(p: &HawkesParams, t: f64) -> Result<ThetaCritical> {
    if !(t.is_finite() && t > 0.0) {
        return Err(HawkesError::invalid("t", format!("must be finite and > 0, got {t}")));
    }
    let shape = Explosion::new(p);
    let (base, lo_start) = match shape {
        Explosion::FromZero => (0.0, 1.0),
        Explosion::FromRoot { root, .. } => {
            let floor = SATURATION_GAP * root.max(1.0);
            if shape.time(p, floor) <= t {
                return Ok(ThetaCritical {
                    t,
                    value: root,
                    saturated: true,
                });
            }
            (root, floor)
        }
    };
    let time = |offset: f64| shape.time(p, offset);

    // Explosion time decreases in the offset; bracket then bisect in log space.
    let mut hi = lo_start.max(1.0);
    while time(hi) >= t {
        hi *= 2.0;
    }
    let mut lo = lo_start.min(hi / 2.0);
    while time(lo) <= t {
        lo /= 2.0;
        if lo < 1e-300 {
            break;
        }
    }
    while (hi - lo) > BISECTION_RTOL * (base + hi) {
        let mid = (lo * hi).sqrt();
        let mid = if mid <= lo || mid >= hi { 0.5 * (lo + hi) } else { mid };
        if time(mid) > t {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(ThetaCritical {
        t,
        value: base + 0.5 * (lo + hi),
        saturated: false,
    })
}

/// `log E[e^{-θ Z_t}] = A(t, -θ) z0`.
pub fn log_mgf(p: &HawkesParams, t: f64, theta: f64) -> Result<f64> {
    p.require_zero_mu("mgf")?;
    crate::model::check_time(t)?;
    if theta == 0.0 {
        return Ok(0.0);
    }
    if theta < 0.0 && t > 0.0 {
        let tc = theta_critical(p, t)?;
        if -theta >= tc.value {
            return Err(HawkesError::BeyondCriticalThreshold {
                neg_theta: -theta,
                theta_c: tc.value,
            });
        }
    }
    let a = a_at(p, -theta, t).ok_or(HawkesError::BeyondCriticalThreshold {
        neg_theta: -theta,
        theta_c: f64::NAN,
    })?;
    Ok(a * p.z0())
}

/// `E[e^{-θ Z_t} | Z_0 = z0] = e^{A(t,-θ) z0}`.
pub fn mgf(p: &HawkesParams, t: f64, theta: f64) -> Result<f64> {
    log_mgf(p, t, theta).map(f64::exp)
}

/// First two coefficients of `A(t, -θ/√n) = f₁(t)(-θ/√n) + f₂(t) θ²/n + …`.
pub fn expansion_f(p: &HawkesParams, t: f64) -> (f64, f64) {
    let f1 = (p.effective_drift() * t).exp();
    let f2 = 0.5 * p.alpha() * p.alpha() * f1 * psi(p, t);
    (f1, f2)
}

#[cfg(test)]
mod tests;
