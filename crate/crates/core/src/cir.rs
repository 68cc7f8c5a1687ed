//! The square-root diffusion `dX = (βμ + γX)dt + β√X dB`, sampled exactly on
//! a grid or by full-truncation Euler.

use rand::Rng;
use rand_distr::{Distribution, Gamma, Poisson, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{HawkesError, Result};
use crate::model::TimeGrid;
use crate::rng::{rng_from_seed, PathRng};

const GAMMA_SERIES_SWITCH: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CirParams {
    pub beta: f64,
    pub gamma: f64,
    pub mu: f64,
    pub x0: f64,
}

impl CirParams {
    pub fn new(beta: f64, gamma: f64, mu: f64, x0: f64) -> Result<Self> {
        let c = CirParams { beta, gamma, mu, x0 };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.beta.is_finite() && self.beta > 0.0) {
            return Err(HawkesError::invalid("beta", format!("must be finite and > 0, got {}", self.beta)));
        }
        if !self.gamma.is_finite() {
            return Err(HawkesError::invalid("gamma", "must be finite"));
        }
        if !(self.mu.is_finite() && self.mu >= 0.0) {
            return Err(HawkesError::invalid("mu", format!("must be finite and >= 0, got {}", self.mu)));
        }
        if !(self.x0.is_finite() && self.x0 >= 0.0) {
            return Err(HawkesError::invalid("x0", format!("must be finite and >= 0, got {}", self.x0)));
        }
        Ok(())
    }

    /// `E[X_t] = x0 e^{γt} + βμ (e^{γt} - 1)/γ`.
    pub fn mean(&self, t: f64) -> f64 {
        self.x0 * (self.gamma * t).exp() + self.beta * self.mu * growth(self.gamma, t)
    }

    /// Scale `c` of the transition `X_{t+h} = c·χ'²_d(X_t e^{γh}/c)`.
    fn transition_scale(&self, h: f64) -> f64 {
        self.beta * self.beta * growth(self.gamma, h) / 4.0
    }

    fn degrees_of_freedom(&self) -> f64 {
        4.0 * self.mu / self.beta
    }
}

/// `(e^{γh} - 1)/γ`, `h` at `γ = 0`.
fn growth(gamma: f64, h: f64) -> f64 {
    let x = gamma * h;
    if x.abs() < GAMMA_SERIES_SWITCH {
        h * (1.0 + x / 2.0 + x * x / 6.0)
    } else {
        x.exp_m1() / gamma
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CirPath {
    pub grid: TimeGrid,
    pub x_values: Vec<f64>,
    /// Trapezoid-rule `∫₀ᵗ X ds` at each grid point.
    pub integral_x: Vec<f64>,
}

impl CirPath {
    fn from_values(grid: &TimeGrid, x_values: Vec<f64>) -> Self {
        let pts = grid.points();
        let mut integral_x = Vec::with_capacity(pts.len());
        let mut acc = 0.0;
        integral_x.push(acc);
        for k in 1..pts.len() {
            acc += 0.5 * (pts[k] - pts[k - 1]) * (x_values[k] + x_values[k - 1]);
            integral_x.push(acc);
        }
        CirPath {
            grid: grid.clone(),
            x_values,
            integral_x,
        }
    }

    pub fn x_end(&self) -> f64 {
        *self.x_values.last().expect("a grid has at least two points")
    }

    pub fn integral_end(&self) -> f64 {
        *self.integral_x.last().expect("a grid has at least two points")
    }
}

fn exact_step(c: &CirParams, x: f64, h: f64, rng: &mut PathRng) -> f64 {
    let scale = c.transition_scale(h);
    let lambda = x * (c.gamma * h).exp() / scale;
    let k = if lambda > 0.0 {
        Poisson::new(lambda / 2.0).expect("finite positive rate").sample(rng)
    } else {
        0.0
    };
    let shape = (c.degrees_of_freedom() + 2.0 * k) / 2.0;
    if shape <= 0.0 {
        return 0.0;
    }
    let y = 2.0 * Gamma::new(shape, 1.0).expect("positive shape").sample(rng);
    scale * y
}

pub fn simulate_cir_exact(c: &CirParams, grid: &TimeGrid, seed: u64) -> CirPath {
    let mut rng = rng_from_seed(seed);
    let pts = grid.points();
    let mut xs = Vec::with_capacity(pts.len());
    let mut x = c.x0;
    xs.push(x);
    for w in pts.windows(2) {
        x = exact_step(c, x, w[1] - w[0], &mut rng);
        xs.push(x);
    }
    CirPath::from_values(grid, xs)
}

/// Full-truncation Euler on the grid itself: the state may go negative but
/// drift and diffusion see `max(X, 0)`, and the stored values are truncated.
pub fn simulate_cir_euler(c: &CirParams, grid: &TimeGrid, seed: u64) -> CirPath {
    let mut rng = rng_from_seed(seed);
    let pts = grid.points();
    let mut xs = Vec::with_capacity(pts.len());
    let mut state = c.x0;
    xs.push(state.max(0.0));
    for w in pts.windows(2) {
        let h = w[1] - w[0];
        let pos = state.max(0.0);
        let z: f64 = rng.sample(StandardNormal);
        state += (c.beta * c.mu + c.gamma * pos) * h + c.beta * (pos * h).sqrt() * z;
        xs.push(state.max(0.0));
    }
    CirPath::from_values(grid, xs)
}
