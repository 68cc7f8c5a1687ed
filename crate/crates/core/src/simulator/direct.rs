use rand::Rng;
use rand_distr::Exp1;

use super::{check_horizon, segment_integral, SimPath, DEFAULT_EVENT_CAP};
use crate::error::{HawkesError, Result};
use crate::model::HawkesParams;
use crate::rng::{rng_from_seed, PathRng};

const NEWTON_RTOL: f64 = 1e-12;
const NEWTON_MAX_ITER: usize = 60;

/// One jump: its time and the post-jump value of `Z`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Event {
    pub time: f64,
    pub z_after: f64,
}

/// Time to the next event given current excitation `z` and an `Exp(1)` draw.
///
/// Solves `μΔ + (z/β)(1 - e^{-βΔ}) = e`. Returns `None` when the total
/// remaining compensator is below `e` (only possible for `μ = 0`).
pub fn interarrival(mu: f64, beta: f64, z: f64, e: f64) -> Option<f64> {
    if mu == 0.0 {
        if z <= 0.0 {
            return None;
        }
        let r = beta * e / z;
        if r >= 1.0 {
            return None;
        }
        return Some(-(-r).ln_1p() / beta);
    }
    let lambda = |d: f64| mu * d - z * (-beta * d).exp_m1() / beta;
    // Λ is concave, so Newton from the left never overshoots the root.
    let mut d = e / (mu + z);
    for _ in 0..NEWTON_MAX_ITER {
        let slope = mu + z * (-beta * d).exp();
        let step = (lambda(d) - e) / slope;
        d -= step;
        if step.abs() <= NEWTON_RTOL * d {
            return Some(d);
        }
    }
    Some(bisect_interarrival(&lambda, e, e / (mu + z)))
}

fn bisect_interarrival(lambda: &impl Fn(f64) -> f64, e: f64, start: f64) -> f64 {
    let mut lo = start;
    let mut hi = start.max(f64::MIN_POSITIVE) * 2.0;
    while lambda(hi) < e {
        lo = hi;
        hi *= 2.0;
    }
    while hi - lo > NEWTON_RTOL * hi {
        let mid = 0.5 * (lo + hi);
        if lambda(mid) < e {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Event stream of the direct simulator on `(0, horizon]`.
pub struct DirectEvents {
    mu: f64,
    alpha: f64,
    beta: f64,
    horizon: f64,
    rng: PathRng,
    t: f64,
    z: f64,
    done: bool,
}

impl DirectEvents {
    pub fn new(p: &HawkesParams, horizon: f64, seed: u64) -> Self {
        DirectEvents {
            mu: p.mu(),
            alpha: p.alpha(),
            beta: p.beta(),
            horizon,
            rng: rng_from_seed(seed),
            t: 0.0,
            z: p.z0(),
            done: false,
        }
    }
}

impl Iterator for DirectEvents {
    type Item = Event;

    #[inline]
    fn next(&mut self) -> Option<Event> {
        if self.done {
            return None;
        }
        // The intensity is the superposition of the decaying excitation and the
        // constant baseline, so the next event is the earlier of their first
        // points. For the excitation part e^{-βΔ} = 1 - βE/Z exactly.
        let e: f64 = self.rng.sample(Exp1);
        let r = self.beta * e / self.z;
        let excited = (r < 1.0).then(|| -(-r).ln_1p() / self.beta);
        let baseline = if self.mu > 0.0 {
            Some(self.rng.sample::<f64, _>(Exp1) / self.mu)
        } else {
            None
        };
        let (d, z_before) = match (excited, baseline) {
            (Some(d), Some(b)) if b < d => (b, self.z * (-self.beta * b).exp()),
            (None, Some(b)) => (b, self.z * (-self.beta * b).exp()),
            (Some(d), _) => (d, (self.z - self.beta * e).max(0.0)),
            (None, None) => (f64::INFINITY, 0.0),
        };
        if self.t + d > self.horizon {
            self.done = true;
            return None;
        }
        self.t += d;
        self.z = z_before + self.alpha;
        Some(Event {
            time: self.t,
            z_after: self.z,
        })
    }
}

pub fn simulate_direct(p: &HawkesParams, horizon: f64, seed: u64) -> Result<SimPath> {
    simulate_direct_with_cap(p, horizon, seed, DEFAULT_EVENT_CAP)
}

pub fn simulate_direct_with_cap(
    p: &HawkesParams,
    horizon: f64,
    seed: u64,
    cap: u64,
) -> Result<SimPath> {
    check_horizon(horizon)?;
    let mut times = Vec::new();
    let mut zs = Vec::new();
    for ev in DirectEvents::new(p, horizon, seed) {
        if times.len() as u64 >= cap {
            let time = ev.time;
            let partial = SimPath {
                params: *p,
                horizon: time,
                event_times: times,
                z_at_events: zs,
                seed,
            };
            return Err(HawkesError::EventCapExceeded {
                cap,
                time,
                partial: Box::new(partial),
            });
        }
        times.push(ev.time);
        zs.push(ev.z_after);
    }
    Ok(SimPath {
        params: *p,
        horizon,
        event_times: times,
        z_at_events: zs,
        seed,
    })
}

/// State of a path at an observation time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Snapshot {
    pub t: f64,
    pub n: u64,
    pub z: f64,
    pub integral_z: f64,
}

/// Runs the direct simulator to the last of `times` without storing the
/// path and records `(N_t, Z_t, ∫Z)` at each requested time.
///
/// Bit-identical to evaluating [`simulate_direct`] with the same seed and a
/// horizon equal to the last observation time.
pub fn observe_direct(
    p: &HawkesParams,
    times: &[f64],
    seed: u64,
    cap: u64,
) -> Result<Vec<Snapshot>> {
    let Some(&horizon) = times.last() else {
        return Ok(Vec::new());
    };
    if times.windows(2).any(|w| w[1] < w[0]) || times[0] < 0.0 {
        return Err(HawkesError::invalid("times", "observation times must be sorted and >= 0"));
    }
    let beta = p.beta();
    let mut out = Vec::with_capacity(times.len());
    let mut next = 0;
    let (mut n, mut t_last, mut z_last, mut acc) = (0u64, 0.0, p.z0(), 0.0);
    let record = |t: f64, n: u64, t_last: f64, z_last: f64, acc: f64| Snapshot {
        t,
        n,
        z: z_last * (-beta * (t - t_last)).exp(),
        integral_z: acc + segment_integral(z_last, beta, t - t_last),
    };
    if horizon > 0.0 {
        for ev in DirectEvents::new(p, horizon, seed) {
            while next < times.len() && times[next] < ev.time {
                out.push(record(times[next], n, t_last, z_last, acc));
                next += 1;
            }
            if n >= cap {
                return Err(HawkesError::EventCapExceeded {
                    cap,
                    time: ev.time,
                    partial: Box::new(SimPath {
                        params: *p,
                        horizon: ev.time,
                        event_times: Vec::new(),
                        z_at_events: Vec::new(),
                        seed,
                    }),
                });
            }
            // ∫Z over the gap is the decay of Z divided by β.
            acc += (z_last - (ev.z_after - p.alpha())) / beta;
            n += 1;
            t_last = ev.time;
            z_last = ev.z_after;
        }
    }
    while next < times.len() {
        out.push(record(times[next], n, t_last, z_last, acc));
        next += 1;
    }
    Ok(out)
}
