use rand::Rng;
use rand_distr::{Distribution, Exp1, Poisson};

use super::{check_horizon, SimPath, DEFAULT_EVENT_CAP};
use crate::error::{HawkesError, Result};
use crate::model::HawkesParams;
use crate::rng::rng_from_seed;

/// A cluster-built path plus the raw offspring draw of every generated point
/// (before children past the horizon are discarded), in generation order.
#[derive(Debug, Clone)]
pub struct ClusterRealization {
    pub path: SimPath,
    pub offspring_drawn: Vec<u32>,
}

pub fn simulate_cluster(p: &HawkesParams, horizon: f64, seed: u64) -> Result<SimPath> {
    simulate_cluster_with_genealogy(p, horizon, seed, DEFAULT_EVENT_CAP).map(|c| c.path)
}

fn poisson_draw<R: Rng>(rng: &mut R, mean: f64) -> u64 {
    if mean <= 0.0 {
        return 0;
    }
    let d = Poisson::new(mean).expect("finite positive Poisson mean");
    d.sample(rng) as u64
}

pub fn simulate_cluster_with_genealogy(
    p: &HawkesParams,
    horizon: f64,
    seed: u64,
    cap: u64,
) -> Result<ClusterRealization> {
    check_horizon(horizon)?;
    let mut rng = rng_from_seed(seed);
    let beta = p.beta();

    // Immigrants carried by z0: rate z0 e^{-βt} on (0, T].
    let decay_mass = -(-beta * horizon).exp_m1();
    let n_initial = poisson_draw(&mut rng, p.z0() * decay_mass / beta);
    // Immigrants from the base rate μ on (0, T].
    let n_base = poisson_draw(&mut rng, p.mu() * horizon);
    if n_initial + n_base > cap {
        return Err(cap_error(p, horizon, seed, cap, Vec::new()));
    }

    let mut queue: Vec<f64> = Vec::with_capacity((n_initial + n_base) as usize);
    for _ in 0..n_initial {
        let u = 1.0 - rng.random::<f64>();
        queue.push(-(-u * decay_mass).ln_1p() / beta);
    }
    for _ in 0..n_base {
        let u = 1.0 - rng.random::<f64>();
        queue.push(horizon * u);
    }

    let offspring = (p.branching_ratio() > 0.0)
        .then(|| Poisson::new(p.branching_ratio()).expect("finite positive branching ratio"));
    let mut times = Vec::with_capacity(queue.len());
    let mut drawn = Vec::with_capacity(queue.len());
    while let Some(t) = queue.pop() {
        times.push(t);
        if times.len() as u64 > cap {
            times.pop();
            return Err(cap_error(p, horizon, seed, cap, times));
        }
        let k = offspring.as_ref().map_or(0, |d| d.sample(&mut rng) as u32);
        drawn.push(k);
        for _ in 0..k {
            let delay: f64 = rng.sample::<f64, _>(Exp1) / beta;
            let child = t + delay;
            if child <= horizon {
                queue.push(child);
            }
        }
    }
    times.sort_unstable_by(f64::total_cmp);
    let path = SimPath::from_event_times(*p, horizon, times, seed)?;
    Ok(ClusterRealization {
        path,
        offspring_drawn: drawn,
    })
}

fn cap_error(p: &HawkesParams, horizon: f64, seed: u64, cap: u64, mut times: Vec<f64>) -> HawkesError {
    times.sort_unstable_by(f64::total_cmp);
    times.dedup();
    let partial = SimPath::from_event_times(*p, horizon, times, seed)
        .unwrap_or_else(|_| SimPath::from_event_times(*p, horizon, Vec::new(), seed).unwrap());
    HawkesError::EventCapExceeded {
        cap,
        time: horizon,
        partial: Box::new(partial),
    }
}
