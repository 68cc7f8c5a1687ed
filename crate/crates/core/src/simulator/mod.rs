//! Exact sample paths of `(Z, N)`.
//!
//! Two independent generators produce the same law:
//!
//! * [`simulate_direct`] walks forward event by event, inverting the
//!   compensator `Λ(Δ) = μΔ + (Z/β)(1 - e^{-βΔ})` against an `Exp(1)` draw.
//! * [`simulate_cluster`] builds the immigration–birth cascade: immigrants
//!   at rate `z0 e^{-βt}` and `μ`, each point spawning `Poisson(α/β)` children
//!   at `Exp(β)` delays.
//!
//! Paths store post-jump values of `Z`; everything else is recomputed from
//! the event times by exact exponential decay.

mod cluster;
mod csv;
mod direct;

pub use cluster::{simulate_cluster, simulate_cluster_with_genealogy, ClusterRealization};
pub use csv::{read_ensemble_csv, read_path_csv, write_ensemble_csv, write_path_csv};
pub use direct::{
    interarrival, observe_direct, simulate_direct, simulate_direct_with_cap, DirectEvents, Event,
    Snapshot,
};

use serde::{Deserialize, Serialize};

use crate::error::{HawkesError, Result};
use crate::model::HawkesParams;

/// Default explosion guard: maximum number of events per path.
pub const DEFAULT_EVENT_CAP: u64 = 10_000_000;

/// One realized trajectory on `[0, horizon]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimPath {
    params: HawkesParams,
    horizon: f64,
    event_times: Vec<f64>,
    z_at_events: Vec<f64>,
    seed: u64,
}

impl SimPath {
    /// Builds a path from its event times, recomputing the post-jump `Z` values.
    pub fn from_event_times(
        params: HawkesParams,
        horizon: f64,
        event_times: Vec<f64>,
        seed: u64,
    ) -> Result<Self> {
        check_horizon(horizon)?;
        check_times(&event_times, horizon)?;
        let beta = params.beta();
        let alpha = params.alpha();
        let mut z_at_events = Vec::with_capacity(event_times.len());
        let (mut t_prev, mut z_prev) = (0.0, params.z0());
        for &t in &event_times {
            z_prev = z_prev * (-beta * (t - t_prev)).exp() + alpha;
            t_prev = t;
            z_at_events.push(z_prev);
        }
        Ok(SimPath {
            params,
            horizon,
            event_times,
            z_at_events,
            seed,
        })
    }

    /// Builds a path from stored `(event_time, z_after)` rows, checking the
    /// jump/decay recursion to `1e-9` relative.
    pub fn from_parts(
        params: HawkesParams,
        horizon: f64,
        event_times: Vec<f64>,
        z_at_events: Vec<f64>,
        seed: u64,
    ) -> Result<Self> {
        check_horizon(horizon)?;
        check_times(&event_times, horizon)?;
        if event_times.len() != z_at_events.len() {
            return Err(HawkesError::Parse("event_times and z_at_events differ in length".into()));
        }
        let (mut t_prev, mut z_prev) = (0.0, params.z0());
        for (k, (&t, &z)) in event_times.iter().zip(&z_at_events).enumerate() {
            let expected = z_prev * (-params.beta() * (t - t_prev)).exp() + params.alpha();
            if (z - expected).abs() > 1e-9 * expected.abs() {
                return Err(HawkesError::Parse(format!(
                    "event {k}: z_after = {z} inconsistent with recursion ({expected})"
                )));
            }
            t_prev = t;
            z_prev = z;
        }
        Ok(SimPath {
            params,
            horizon,
            event_times,
            z_at_events,
            seed,
        })
    }

    pub fn params(&self) -> &HawkesParams {
        &self.params
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    pub fn event_times(&self) -> &[f64] {
        &self.event_times
    }

    pub fn z_at_events(&self) -> &[f64] {
        &self.z_at_events
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// `N(T)`.
    pub fn count(&self) -> usize {
        self.event_times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.event_times.is_empty()
    }

    /// Value of `Z` just before event `k`.
    pub fn z_before_event(&self, k: usize) -> f64 {
        self.z_at_events[k] - self.params.alpha()
    }
}

fn check_horizon(horizon: f64) -> Result<()> {
    if horizon.is_finite() && horizon > 0.0 {
        Ok(())
    } else {
        Err(HawkesError::invalid("horizon", format!("must be finite and > 0, got {horizon}")))
    }
}

fn check_times(times: &[f64], horizon: f64) -> Result<()> {
    let mut prev = 0.0;
    for &t in times {
        if !(t > prev) || t > horizon {
            return Err(HawkesError::Parse(format!(
                "event times must be strictly increasing in (0, {horizon}], found {t} after {prev}"
            )));
        }
        prev = t;
    }
    Ok(())
}

/// Evaluators for `N_t`, `Z_t`, `∫₀ᵗ Z_s ds` and `M_t` on a fixed path.
#[derive(Debug, Clone)]
pub struct PathFunctionals<'a> {
    path: &'a SimPath,
    /// `∫₀^{τ_k} Z_s ds` at each event time.
    cumulative: Vec<f64>,
}

pub fn evaluate_path(path: &SimPath) -> PathFunctionals<'_> {
    let beta = path.params.beta();
    let mut cumulative = Vec::with_capacity(path.count());
    let (mut acc, mut t_prev, mut z_prev) = (0.0, 0.0, path.params.z0());
    for (&t, &z) in path.event_times.iter().zip(&path.z_at_events) {
        acc += segment_integral(z_prev, beta, t - t_prev);
        cumulative.push(acc);
        t_prev = t;
        z_prev = z;
    }
    PathFunctionals { path, cumulative }
}

/// `∫₀^Δ z e^{-βs} ds`.
pub(crate) fn segment_integral(z: f64, beta: f64, dt: f64) -> f64 {
    -z * (-beta * dt).exp_m1() / beta
}

impl PathFunctionals<'_> {
    fn locate(&self, t: f64) -> Result<(usize, f64, f64, f64)> {
        if !(0.0..=self.path.horizon).contains(&t) {
            return Err(HawkesError::QueryOutOfRange {
                t,
                horizon: self.path.horizon,
            });
        }
        let k = self.path.event_times.partition_point(|&s| s <= t);
        Ok(if k == 0 {
            (0, 0.0, self.path.params.z0(), 0.0)
        } else {
            (
                k,
                self.path.event_times[k - 1],
                self.path.z_at_events[k - 1],
                self.cumulative[k - 1],
            )
        })
    }

    pub fn n_of_t(&self, t: f64) -> Result<u64> {
        Ok(self.locate(t)?.0 as u64)
    }

    pub fn z_of_t(&self, t: f64) -> Result<f64> {
        let (_, tau, z, _) = self.locate(t)?;
        Ok(z * (-self.path.params.beta() * (t - tau)).exp())
    }

    pub fn integral_z(&self, t: f64) -> Result<f64> {
        let (_, tau, z, acc) = self.locate(t)?;
        Ok(acc + segment_integral(z, self.path.params.beta(), t - tau))
    }

    /// `M_t = N_t - ∫₀ᵗ (μ + Z_s) ds`.
    pub fn martingale_residual(&self, t: f64) -> Result<f64> {
        let n = self.n_of_t(t)? as f64;
        Ok(n - self.path.params.mu() * t - self.integral_z(t)?)
    }
}
