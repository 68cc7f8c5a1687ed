use rand::Rng;

use super::report::{Entry, McReport, Measure, RawColumn, ScaleReport, StatSummary};
use super::{ensemble, scale_seed, CheckKind, ExperimentSpec};
use crate::affine_mgf::mgf;
use crate::cir::{simulate_cir_exact, CirParams};
use crate::error::{HawkesError, Result};
use crate::limits::{cov_g, lln_rescaled_curves, passage_time_cdf, rescaled_limit_law, var_h};
use crate::model::{classify_regime, psi, HawkesParams, Regime, TimeGrid};
use crate::moments::{moments_of_z, variance_of_z};
use crate::rng::{derive_seed, rng_from_seed};
use crate::simulator::{evaluate_path, observe_direct, simulate_cluster_with_genealogy, simulate_direct_with_cap, Snapshot};
use crate::stats::{chi_square_two_sample, correlation, covariance, ks_one_sample, ks_two_sample, ks_two_sample_from, log_log_slope, normal_cdf, summarize};

const PATHS: u64 = 0;
const CLUSTER: u64 = 1;
const JITTER: u64 = 2;
const CIR: u64 = 3;

/// Points of the uniform grid used for sup-deviation statistics.
const SUP_GRID: usize = 1000;
const DEFAULT_CIR_STEP: f64 = 1e-3;

/// Turns an exceeded event cap into a diagnosis; every other error propagates.
fn capped<T>(r: Result<T>) -> Result<std::result::Result<T, String>> {
    match r {
        Ok(v) => Ok(Ok(v)),
        Err(HawkesError::EventCapExceeded { cap, time, .. }) => Ok(Err(format!(
            "event cap of {cap} exceeded at t = {time}; raise event_cap or shorten the horizon"
        ))),
        Err(e) => Err(e),
    }
}

macro_rules! or_fail {
    ($report:ident, $expr:expr) => {
        match capped($expr)? {
            Ok(v) => v,
            Err(note) => return Ok($report.fail_with(note)),
        }
    };
}

fn begin(spec: &ExperimentSpec, expected: CheckKind) -> Result<McReport> {
    spec.validate()?;
    if spec.check != expected {
        return Err(HawkesError::invalid("check", format!("expected {}, got {}", expected.name(), spec.check.name())));
    }
    Ok(McReport::new(&spec.name, spec.check, spec.params, spec.seed))
}

fn observe_ensemble(spec: &ExperimentSpec, p: &HawkesParams, times: &[f64], seed: u64) -> Result<Vec<Vec<Snapshot>>> {
    ensemble(spec.paths_per_scale, |i| observe_direct(p, times, derive_seed(seed, i), spec.event_cap))
}

fn column(snaps: &[Vec<Snapshot>], j: usize, f: impl Fn(&Snapshot) -> f64) -> Vec<f64> {
    snaps.iter().map(|s| f(&s[j])).collect()
}

fn keep_raw(report: &mut McReport, spec: &ExperimentSpec, n: f64, quantity: String, values: &[f64]) {
    if spec.keep_raw {
        report.raw.push(RawColumn {
            n,
            quantity,
            values: values.to_vec(),
        });
    }
}

fn gate(e: Entry, gating: bool) -> Entry {
    if gating {
        e
    } else {
        e.informational()
    }
}

fn require_zero_mu(p: &HawkesParams, check: CheckKind) -> Result<()> {
    if p.mu() != 0.0 {
        return Err(HawkesError::UnsupportedCase(format!(
            "the {} check compares against closed forms stated for mu = 0",
            check.name()
        )));
    }
    Ok(())
}

pub fn run_moment_check(spec: &ExperimentSpec) -> Result<McReport> {
    let mut report = begin(spec, CheckKind::Moment)?;
    let z_max = spec.thresholds.z_max;
    for (k, &n) in spec.scales.iter().enumerate() {
        let p = spec.params_at(n)?;
        require_zero_mu(&p, spec.check)?;
        let seed = scale_seed(spec.seed, k, PATHS);
        let snaps = or_fail!(report, observe_ensemble(spec, &p, &spec.times, seed));
        let mut entries = Vec::new();
        let mut summaries = Vec::new();
        for (j, &t) in spec.times.iter().enumerate() {
            let m = moments_of_z(&p, t)?;
            let z = column(&snaps, j, |s| s.z);
            let cubes: Vec<f64> = z.iter().map(|x| x * x * x).collect();
            let s = summarize(&z);
            let s3 = summarize(&cubes);
            entries.push(Entry::z_score("mean_z", Some(t), s.mean, m.ez, s.se_mean, z_max));
            entries.push(Entry::z_score("var_z", Some(t), s.variance, variance_of_z(&p, t)?, s.se_variance, z_max));
            entries.push(Entry::z_score("third_moment_z", Some(t), s3.mean, m.ez3, s3.se_mean, z_max));
            summaries.push(StatSummary::of("z", Some(t), &z));
            keep_raw(&mut report, spec, n, format!("z(t={t})"), &z);
        }
        report.scales.push(ScaleReport::new(n, spec.paths_per_scale, seed, entries, summaries));
    }
    Ok(report.finish())
}

/// Per-path `sup |Z_t/n - e^{δt}|` and `sup |N_t/n - ψ(t)|` over a uniform grid
/// plus both sides of every jump.
fn sup_deviations(p: &HawkesParams, horizon: f64, seed: u64, cap: u64) -> Result<(f64, f64)> {
    let path = simulate_direct_with_cap(p, horizon, seed, cap)?;
    let f = evaluate_path(&path);
    let n = p.z0();
    let delta = p.effective_drift();
    let (mut sz, mut sn) = (0.0f64, 0.0f64);
    for k in 0..=SUP_GRID {
        let t = horizon * k as f64 / SUP_GRID as f64;
        sz = sz.max((f.z_of_t(t)? / n - (delta * t).exp()).abs());
        sn = sn.max((f.n_of_t(t)? as f64 / n - psi(p, t)).abs());
    }
    for (k, (&t, &z)) in path.event_times().iter().zip(path.z_at_events()).enumerate() {
        let mean = (delta * t).exp();
        let fluid = psi(p, t);
        sz = sz.max(((z - p.alpha()) / n - mean).abs()).max((z / n - mean).abs());
        sn = sn.max((k as f64 / n - fluid).abs()).max(((k + 1) as f64 / n - fluid).abs());
    }
    Ok((sz, sn))
}

pub fn run_flln_check(spec: &ExperimentSpec) -> Result<McReport> {
    let mut report = begin(spec, CheckKind::Flln)?;
    let horizon = spec.horizon.unwrap_or(1.0);
    let (mut ns, mut mz, mut mn) = (Vec::new(), Vec::new(), Vec::new());
    for (k, &n) in spec.scales.iter().enumerate() {
        let p = spec.params_at(n)?;
        let seed = scale_seed(spec.seed, k, PATHS);
        if n == 0.0 {
            report.notes.push("scale n = 0 is the zero process; its deviation is identically zero".into());
            report.scales.push(ScaleReport::new(n, spec.paths_per_scale, seed, Vec::new(), Vec::new()));
            continue;
        }
        let sups = or_fail!(report, ensemble(spec.paths_per_scale, |i| sup_deviations(&p, horizon, derive_seed(seed, i), spec.event_cap)));
        let z: Vec<f64> = sups.iter().map(|s| s.0).collect();
        let c: Vec<f64> = sups.iter().map(|s| s.1).collect();
        let (sz, sc) = (summarize(&z), summarize(&c));
        ns.push(n);
        mz.push(sz.mean);
        mn.push(sc.mean);
        let entries = vec![
            Entry::info("mean_sup_dev_z", Some(horizon), sz.mean, 0.0),
            Entry::info("mean_sup_dev_n", Some(horizon), sc.mean, 0.0),
        ];
        let summaries = vec![StatSummary::of("sup_dev_z", Some(horizon), &z), StatSummary::of("sup_dev_n", Some(horizon), &c)];
        keep_raw(&mut report, spec, n, "sup_dev_z".into(), &z);
        keep_raw(&mut report, spec, n, "sup_dev_n".into(), &c);
        report.scales.push(ScaleReport::new(n, spec.paths_per_scale, seed, entries, summaries));
    }
    if ns.len() >= 2 {
        let (lo, hi) = spec.thresholds.exponent_range;
        for (label, means) in [("z", &mz), ("n", &mn)] {
            let monotone = means.windows(2).all(|w| w[1] < w[0]);
            report.overall.push(Entry::verdict(format!("sup_dev_{label}_decreasing"), Measure::Info, monotone as u8 as f64, 1.0, monotone));
            let exponent = -log_log_slope(&ns, means);
            report.overall.push(Entry::verdict(format!("sup_dev_{label}_exponent"), Measure::Exponent, exponent, lo, (lo..=hi).contains(&exponent)));
        }
    } else {
        report.notes.push("fewer than two positive scales; no decay exponent fitted".into());
    }
    Ok(report.finish())
}

pub fn run_fclt_check(spec: &ExperimentSpec) -> Result<McReport> {
    let mut report = begin(spec, CheckKind::Fclt)?;
    let last = spec.scales.len() - 1;
    for (k, &n) in spec.scales.iter().enumerate() {
        let p = spec.params_at(n)?;
        require_zero_mu(&p, spec.check)?;
        let seed = scale_seed(spec.seed, k, PATHS);
        let jitter_seed = scale_seed(spec.seed, k, JITTER);
        let runs = or_fail!(
            report,
            ensemble(spec.paths_per_scale, |i| {
                let snaps = observe_direct(&p, &spec.times, derive_seed(seed, i), spec.event_cap)?;
                let mut rng = rng_from_seed(derive_seed(jitter_seed, i));
                let jitter: Vec<f64> = spec.times.iter().map(|_| rng.random::<f64>() - 0.5).collect();
                Ok((snaps, jitter))
            })
        );
        let root = n.sqrt();
        let gating = k == last;
        let (mut entries, mut summaries) = (Vec::new(), Vec::new());
        let mut z_stats = Vec::new();
        for (j, &t) in spec.times.iter().enumerate() {
            let centre_z = n * (p.effective_drift() * t).exp();
            let centre_n = n * psi(&p, t);
            let zs: Vec<f64> = runs.iter().map(|(s, _)| (s[j].z - centre_z) / root).collect();
            // Uniform jitter spreads the integer count over unit cells for the continuous KS test.
            let cs: Vec<f64> = runs.iter().map(|(s, u)| (s[j].n as f64 + u[j] - centre_n) / root).collect();
            let (vg, vh) = (cov_g(&p, t, t), var_h(&p, t));
            let kz = ks_one_sample(&zs, |x| normal_cdf(x / vg.sqrt()));
            let kn = ks_one_sample(&cs, |x| normal_cdf(x / vh.sqrt()));
            entries.push(gate(Entry::p_value("ks_z_vs_g", Some(t), kz.statistic, kz.p_value, spec.thresholds.ks_p), gating));
            entries.push(gate(Entry::p_value("ks_n_vs_h", Some(t), kn.statistic, kn.p_value, spec.thresholds.ks_p), gating));
            entries.push(Entry::info("var_z_stat", Some(t), summarize(&zs).variance, vg));
            entries.push(Entry::info("var_n_stat", Some(t), summarize(&cs).variance, vh));
            summaries.push(StatSummary::of("z_stat", Some(t), &zs));
            summaries.push(StatSummary::of("n_stat", Some(t), &cs));
            keep_raw(&mut report, spec, n, format!("z_stat(t={t})"), &zs);
            keep_raw(&mut report, spec, n, format!("n_stat(t={t})"), &cs);
            z_stats.push(zs);
        }
        for i in 0..spec.times.len() {
            for j in i + 1..spec.times.len() {
                let (s, t) = (spec.times[i], spec.times[j]);
                let (c, se) = covariance(&z_stats[i], &z_stats[j]);
                let e = Entry::z_score(format!("cov_z(s={s})"), Some(t), c, cov_g(&p, s, t), se, spec.thresholds.z_max);
                entries.push(gate(e, gating));
            }
        }
        report.scales.push(ScaleReport::new(n, spec.paths_per_scale, seed, entries, summaries));
    }
    Ok(report.finish())
}

pub fn run_passage_check(spec: &ExperimentSpec) -> Result<McReport> {
    let mut report = begin(spec, CheckKind::Passage)?;
    let mut levels = spec.levels.clone();
    levels.sort_by(f64::total_cmp);
    for (k, &n) in spec.scales.iter().enumerate() {
        let p = spec.params_at(n)?;
        require_zero_mu(&p, spec.check)?;
        let seed = scale_seed(spec.seed, k, PATHS);
        let snaps = or_fail!(report, observe_ensemble(spec, &p, &spec.times, seed));
        let gating = n >= 1e4;
        let (mut entries, mut summaries) = (Vec::new(), Vec::new());
        for (j, &t) in spec.times.iter().enumerate() {
            let counts = column(&snaps, j, |s| s.n as f64);
            let mut empirical = Vec::new();
            for &c in &levels {
                let level = n * psi(&p, t) + c * n.sqrt();
                let hit = counts.iter().filter(|&&x| x >= level).count() as f64 / counts.len() as f64;
                let model = passage_time_cdf(&p, level, t)?;
                entries.push(gate(Entry::abs_error(format!("p_passage(c={c})"), Some(t), hit, model, spec.thresholds.passage_abs), gating));
                empirical.push(hit);
            }
            let monotone = empirical.windows(2).all(|w| w[1] <= w[0]);
            entries.push(Entry::verdict("p_passage_nonincreasing_in_c", Measure::Info, monotone as u8 as f64, 1.0, monotone));
            summaries.push(StatSummary::of("n", Some(t), &counts));
            keep_raw(&mut report, spec, n, format!("n(t={t})"), &counts);
        }
        report.scales.push(ScaleReport::new(n, spec.paths_per_scale, seed, entries, summaries));
    }
    Ok(report.finish())
}

pub fn run_equivalence_check(spec: &ExperimentSpec) -> Result<McReport> {
    let mut report = begin(spec, CheckKind::Equivalence)?;
    let horizon = spec.horizon.unwrap_or(1.0);
    for (k, &n) in spec.scales.iter().enumerate() {
        let p = spec.params_at(n)?;
        let seed = scale_seed(spec.seed, k, PATHS);
        let cluster_seed = scale_seed(spec.seed, k, CLUSTER);
        let direct = or_fail!(
            report,
            ensemble(spec.paths_per_scale, |i| Ok(observe_direct(&p, &[horizon], derive_seed(seed, i), spec.event_cap)?[0].n))
        );
        let cluster = or_fail!(
            report,
            ensemble(spec.paths_per_scale, |i| {
                Ok(simulate_cluster_with_genealogy(&p, horizon, derive_seed(cluster_seed, i), spec.event_cap)?.path.count() as u64)
            })
        );
        let chi = chi_square_two_sample(&direct, &cluster);
        let d: Vec<f64> = direct.iter().map(|&x| x as f64).collect();
        let c: Vec<f64> = cluster.iter().map(|&x| x as f64).collect();
        let entries = vec![
            Entry::p_value("chi2_direct_vs_cluster", Some(horizon), chi.statistic, chi.p_value, spec.thresholds.chi2_p),
            Entry::info("mean_n_direct", Some(horizon), summarize(&d).mean, n * psi(&p, horizon)),
            Entry::info("mean_n_cluster", Some(horizon), summarize(&c).mean, n * psi(&p, horizon)),
        ];
        let summaries = vec![StatSummary::of("n_direct", Some(horizon), &d), StatSummary::of("n_cluster", Some(horizon), &c)];
        keep_raw(&mut report, spec, n, "n_direct".into(), &d);
        keep_raw(&mut report, spec, n, "n_cluster".into(), &c);
        report.scales.push(ScaleReport::new(n, spec.paths_per_scale, seed, entries, summaries));
    }
    Ok(report.finish())
}

pub fn run_mgf_check(spec: &ExperimentSpec) -> Result<McReport> {
    let mut report = begin(spec, CheckKind::Mgf)?;
    for (k, &n) in spec.scales.iter().enumerate() {
        let p = spec.params_at(n)?;
        require_zero_mu(&p, spec.check)?;
        let seed = scale_seed(spec.seed, k, PATHS);
        let snaps = or_fail!(report, observe_ensemble(spec, &p, &spec.times, seed));
        let (mut entries, mut summaries) = (Vec::new(), Vec::new());
        for (j, &t) in spec.times.iter().enumerate() {
            let z = column(&snaps, j, |s| s.z);
            for &theta in &spec.thetas {
                let values: Vec<f64> = z.iter().map(|x| (-theta * x).exp()).collect();
                let s = summarize(&values);
                let model = mgf(&p, t, theta)?;
                entries.push(Entry::rel_error(format!("mgf(theta={theta})"), Some(t), s.mean, model, spec.thresholds.mgf_rel));
                entries.push(Entry::z_score(format!("mgf_z(theta={theta})"), Some(t), s.mean, model, s.se_mean, spec.thresholds.z_max).informational());
            }
            summaries.push(StatSummary::of("z", Some(t), &z));
        }
        report.scales.push(ScaleReport::new(n, spec.paths_per_scale, seed, entries, summaries));
    }
    Ok(report.finish())
}

/// Sorted union of a uniform grid on `[0, s_max]` and the requested points;
/// returns the union and the position of each requested point in it.
fn merged_grid(points: &[f64], steps: usize) -> (Vec<f64>, Vec<usize>) {
    let s_max = *points.last().expect("validated nonempty");
    let mut all: Vec<f64> = (0..=steps).map(|k| s_max * k as f64 / steps as f64).collect();
    all.extend_from_slice(points);
    all.sort_by(f64::total_cmp);
    all.dedup_by(|a, b| (*a - *b).abs() <= 1e-12 * b.abs().max(1.0));
    let index = points
        .iter()
        .map(|&s| all.iter().position(|&x| (x - s).abs() <= 1e-12 * s.abs().max(1.0)).expect("point was inserted"))
        .collect();
    (all, index)
}

/// Direction of the cross-time correlation verdict.
enum CorrelationRule {
    AtLeast(f64),
    AbsBelow(f64),
}

struct LargeTime {
    /// `|α - β|`.
    rate: f64,
    /// Sign of the centring exponent, `E[Z_{s t_n}] = n^{1 + sign·s}`.
    sign: f64,
    variance: f64,
    rule: CorrelationRule,
}

fn run_large_time(spec: &ExperimentSpec, mut report: McReport, shape: LargeTime) -> Result<McReport> {
    let last = spec.scales.len() - 1;
    let (grid_s, index) = merged_grid(&spec.times, 200);
    for (k, &n) in spec.scales.iter().enumerate() {
        let p = spec.params_at(n)?;
        let scale_time = n.ln() / shape.rate;
        let obs: Vec<f64> = grid_s.iter().map(|s| s * scale_time).collect();
        let seed = scale_seed(spec.seed, k, PATHS);
        let snaps = or_fail!(report, observe_ensemble(spec, &p, &obs, seed));
        let gating = k == last;
        let (mut entries, mut summaries) = (Vec::new(), Vec::new());

        let centre = |s: f64| n.powf(1.0 + shape.sign * s);
        let n_scale = |s: f64| if shape.sign > 0.0 { n.powf(1.0 + s) } else { n };
        let (mut sup_z, mut sup_n) = (Vec::new(), Vec::new());
        for path in &snaps {
            let (mut dz, mut dn) = (0.0f64, 0.0f64);
            for (snap, &s) in path.iter().zip(&grid_s) {
                let (_, n_pred) = lln_rescaled_curves(&p, s, n)?;
                dz = dz.max((snap.z / centre(s) - 1.0).abs());
                dn = dn.max((snap.n as f64 / n_scale(s) - n_pred).abs());
            }
            sup_z.push(dz);
            sup_n.push(dn);
        }
        let s_max = *spec.times.last().expect("validated nonempty");
        entries.push(Entry::info("mean_sup_dev_z_rescaled", Some(s_max), summarize(&sup_z).mean, 0.0));
        entries.push(Entry::info("mean_sup_dev_n_rescaled", Some(s_max), summarize(&sup_n).mean, 0.0));

        let mut stats = Vec::new();
        for (&s, &j) in spec.times.iter().zip(&index) {
            let c = centre(s);
            let spread = if shape.sign > 0.0 { n.powf(0.5 + s) } else { c.sqrt() };
            let stat: Vec<f64> = snaps.iter().map(|path| (path[j].z - c) / spread).collect();
            let ks = ks_one_sample(&stat, |x| normal_cdf(x / shape.variance.sqrt()));
            entries.push(gate(Entry::p_value("ks_rescaled_z", Some(s), ks.statistic, ks.p_value, spec.thresholds.ks_p), gating));
            entries.push(Entry::info("var_rescaled_z", Some(s), summarize(&stat).variance, shape.variance));
            summaries.push(StatSummary::of("rescaled_z", Some(s), &stat));
            keep_raw(&mut report, spec, n, format!("rescaled_z(s={s})"), &stat);
            stats.push(stat);
        }
        if stats.len() >= 2 {
            let r = correlation(&stats[0], &stats[stats.len() - 1]);
            let (threshold, ok) = match shape.rule {
                CorrelationRule::AtLeast(min) => (min, r >= min),
                CorrelationRule::AbsBelow(max) => (max, r.abs() < max),
            };
            let mut e = Entry::verdict(format!("corr(s={},s={})", spec.times[0], s_max), Measure::Correlation, r, threshold, ok);
            e.t = Some(s_max);
            entries.push(gate(e, gating));
        }
        report.scales.push(ScaleReport::new(n, spec.paths_per_scale, seed, entries, summaries));
    }
    Ok(report.finish())
}

/// Smallest positive value when the sample has an atom at zero, else `-∞`.
fn continuity_floor(sample: &[f64]) -> f64 {
    if sample.iter().any(|&v| v == 0.0) {
        sample.iter().copied().filter(|&v| v > 0.0).fold(f64::INFINITY, f64::min)
    } else {
        f64::NEG_INFINITY
    }
}

fn run_critical(spec: &ExperimentSpec, mut report: McReport, gamma: f64) -> Result<McReport> {
    let last = spec.scales.len() - 1;
    let step = spec.cir_step.unwrap_or(DEFAULT_CIR_STEP);
    let t_max = *spec.times.last().expect("validated nonempty");
    let (grid_pts, index) = merged_grid(&spec.times, (t_max / step).ceil() as usize);
    let grid = TimeGrid::new(grid_pts)?;
    let c = CirParams::new(spec.params.beta(), gamma, spec.params.mu(), 1.0)?;
    let reference_paths = spec.reference_paths.unwrap_or(10 * spec.paths_per_scale);
    for (k, &n) in spec.scales.iter().enumerate() {
        let p = spec.params_at(n)?;
        let obs: Vec<f64> = spec.times.iter().map(|t| t * n).collect();
        let seed = scale_seed(spec.seed, k, PATHS);
        let cir_seed = scale_seed(spec.seed, k, CIR);
        let snaps = or_fail!(report, observe_ensemble(spec, &p, &obs, seed));
        let reference = ensemble(reference_paths, |i| {
            let path = simulate_cir_exact(&c, &grid, derive_seed(cir_seed, i));
            Ok(index.iter().map(|&j| (path.x_values[j], path.integral_x[j])).collect::<Vec<_>>())
        })?;
        let gating = k == last;
        let (mut entries, mut summaries) = (Vec::new(), Vec::new());
        for (j, &t) in spec.times.iter().enumerate() {
            let z = column(&snaps, j, |s| s.z / n);
            let counts = column(&snaps, j, |s| s.n as f64 / (n * n));
            let x: Vec<f64> = reference.iter().map(|r| r[j].0).collect();
            let ix: Vec<f64> = reference.iter().map(|r| r[j].1).collect();
            let kz = ks_two_sample_from(&z, &x, continuity_floor(&x));
            let kn = ks_two_sample(&counts, &ix);
            entries.push(gate(Entry::p_value("ks_z_over_n_vs_cir", Some(t), kz.statistic, kz.p_value, spec.thresholds.cir_ks_p), gating));
            entries.push(gate(Entry::p_value("ks_n_over_n2_vs_int_cir", Some(t), kn.statistic, kn.p_value, spec.thresholds.cir_ks_p), gating));
            entries.push(Entry::info("mean_z_over_n", Some(t), summarize(&z).mean, c.mean(t)));
            entries.push(Entry::info("mean_n_over_n2", Some(t), summarize(&counts).mean, summarize(&ix).mean));
            summaries.push(StatSummary::of("z_over_n", Some(t), &z));
            summaries.push(StatSummary::of("cir_x", Some(t), &x));
            summaries.push(StatSummary::of("n_over_n2", Some(t), &counts));
            summaries.push(StatSummary::of("cir_integral", Some(t), &ix));
            keep_raw(&mut report, spec, n, format!("z_over_n(t={t})"), &z);
            keep_raw(&mut report, spec, n, format!("n_over_n2(t={t})"), &counts);
        }
        report.scales.push(ScaleReport::new(n, spec.paths_per_scale, seed, entries, summaries));
    }
    Ok(report.finish())
}

pub fn run_rescaled_check(spec: &ExperimentSpec) -> Result<McReport> {
    let report = begin(spec, CheckKind::Rescaled)?;
    let regime = match spec.gamma {
        Some(gamma) => Regime::nearly_critical(spec.params.beta(), gamma, spec.scales[0].max(1.0))?,
        None => classify_regime(&spec.params),
    };
    let p0 = spec.params_at(spec.scales[0])?;
    match regime {
        Regime::SuperCritical | Regime::SubCritical => {
            if spec.times[0] <= 0.0 {
                return Err(HawkesError::invalid("times", "scaled times must be > 0 for the rescaled statistic"));
            }
            let law = rescaled_limit_law(&p0, regime)?;
            let variance = law.variance().expect("Gaussian law");
            let shape = if regime == Regime::SuperCritical {
                LargeTime {
                    rate: p0.drift(),
                    sign: 1.0,
                    variance,
                    rule: CorrelationRule::AtLeast(spec.thresholds.corr_min),
                }
            } else {
                if *spec.times.last().expect("validated nonempty") >= 1.0 {
                    return Err(HawkesError::invalid("times", "sub-critical scaled times must be < 1"));
                }
                LargeTime {
                    rate: -p0.drift(),
                    sign: -1.0,
                    variance,
                    rule: CorrelationRule::AbsBelow(spec.thresholds.corr_abs_max),
                }
            };
            run_large_time(spec, report, shape)
        }
        Regime::Critical => run_critical(spec, report, 0.0),
        Regime::NearlyCritical { gamma, .. } => run_critical(spec, report, gamma),
    }
}
