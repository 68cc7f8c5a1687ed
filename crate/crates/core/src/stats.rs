//! Goodness-of-fit tests and ensemble summaries used by the validation harness.

use serde::{Deserialize, Serialize};
use libm::erfc;
use statrs::function::gamma::gamma_ur;

/// `Φ(z)`, evaluated through `erfc` so both tails keep full relative accuracy.
pub fn normal_cdf(z: f64) -> f64 {
    0.5 * erfc(-z / std::f64::consts::SQRT_2)
}

/// `1 - Φ(z)`.
pub fn normal_sf(z: f64) -> f64 {
    0.5 * erfc(z / std::f64::consts::SQRT_2)
}

/// Survival function of the Kolmogorov distribution, `P(K > x)`.
pub fn kolmogorov_sf(x: f64) -> f64 {
    if x <= 0.0 {
        return 1.0;
    }
    if x < 1.18 {
        // Small-argument form converges much faster here.
        let y = -std::f64::consts::PI.powi(2) / (8.0 * x * x);
        let w = y.exp();
        let cdf = (2.0 * std::f64::consts::PI).sqrt() / x
            * (w + w.powi(9) + w.powi(25) + w.powi(49));
        return (1.0 - cdf).clamp(0.0, 1.0);
    }
    let mut sum = 0.0;
    let mut sign = 1.0;
    for k in 1..=100 {
        let term = (-2.0 * (k * k) as f64 * x * x).exp();
        sum += sign * term;
        if term < 1e-18 {
            break;
        }
        sign = -sign;
    }
    (2.0 * sum).clamp(0.0, 1.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TestResult {
    pub statistic: f64,
    pub p_value: f64,
}

fn sorted(data: &[f64]) -> Vec<f64> {
    let mut v = data.to_vec();
    v.sort_unstable_by(f64::total_cmp);
    v
}

/// Asymptotic p-value with Stephens' small-sample correction.
fn ks_p_value(d: f64, effective_n: f64) -> f64 {
    let s = effective_n.sqrt();
    kolmogorov_sf((s + 0.12 + 0.11 / s) * d)
}

/// One-sample Kolmogorov–Smirnov test against a fully specified continuous CDF.
pub fn ks_one_sample(data: &[f64], cdf: impl Fn(f64) -> f64) -> TestResult {
    let x = sorted(data);
    let n = x.len() as f64;
    let mut d: f64 = 0.0;
    for (i, &v) in x.iter().enumerate() {
        let f = cdf(v);
        d = d.max(f - i as f64 / n).max((i + 1) as f64 / n - f);
    }
    TestResult {
        statistic: d,
        p_value: ks_p_value(d, n),
    }
}

pub fn ks_two_sample(a: &[f64], b: &[f64]) -> TestResult {
    ks_two_sample_from(a, b, f64::NEG_INFINITY)
}

/// Two-sample KS statistic with the supremum restricted to `x >= lower`.
///
/// For a reference law with an atom below `lower`.
pub fn ks_two_sample_from(a: &[f64], b: &[f64], lower: f64) -> TestResult {
    let (x, y) = (sorted(a), sorted(b));
    let (n, m) = (x.len(), y.len());
    let (mut i, mut j) = (0, 0);
    let mut d: f64 = 0.0;
    while i < n || j < m {
        let v = match (x.get(i), y.get(j)) {
            (Some(&p), Some(&q)) => p.min(q),
            (Some(&p), None) => p,
            (None, Some(&q)) => q,
            (None, None) => unreachable!(),
        };
        while i < n && x[i] <= v {
            i += 1;
        }
        while j < m && y[j] <= v {
            j += 1;
        }
        if v >= lower {
            d = d.max((i as f64 / n as f64 - j as f64 / m as f64).abs());
        }
    }
    let ne = (n * m) as f64 / (n + m) as f64;
    TestResult {
        statistic: d,
        p_value: ks_p_value(d, ne),
    }
}

/// Upper tail of the chi-square distribution with `df` degrees of freedom.
pub fn chi_square_sf(x: f64, df: f64) -> f64 {
    if x <= 0.0 {
        return 1.0;
    }
    gamma_ur(df / 2.0, x / 2.0)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChiSquareResult {
    pub statistic: f64,
    pub df: usize,
    pub p_value: f64,
    pub bins: usize,
}

/// Two-sample chi-square homogeneity test on integer-valued samples.
///
/// Adjacent values are merged into bins until each bin's expected count is
/// at least 5 in both samples.
pub fn chi_square_two_sample(a: &[u64], b: &[u64]) -> ChiSquareResult {
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let total = na + nb;
    let mut values: Vec<u64> = a.iter().chain(b).copied().collect();
    values.sort_unstable();
    values.dedup();
    let mut ca = std::collections::BTreeMap::<u64, f64>::new();
    let mut cb = std::collections::BTreeMap::<u64, f64>::new();
    for &v in a {
        *ca.entry(v).or_default() += 1.0;
    }
    for &v in b {
        *cb.entry(v).or_default() += 1.0;
    }

    let min_expected = |ra: f64, rb: f64| {
        let pooled = ra + rb;
        (pooled * na / total).min(pooled * nb / total)
    };
    let mut bins: Vec<(f64, f64)> = Vec::new();
    let (mut ra, mut rb) = (0.0, 0.0);
    for v in values {
        ra += ca.get(&v).copied().unwrap_or(0.0);
        rb += cb.get(&v).copied().unwrap_or(0.0);
        if min_expected(ra, rb) >= 5.0 {
            bins.push((ra, rb));
            ra = 0.0;
            rb = 0.0;
        }
    }
    if ra + rb > 0.0 {
        match bins.last_mut() {
            Some(last) => {
                last.0 += ra;
                last.1 += rb;
            }
            None => bins.push((ra, rb)),
        }
    }
    if bins.len() < 2 {
        return ChiSquareResult {
            statistic: 0.0,
            df: 0,
            p_value: 1.0,
            bins: bins.len(),
        };
    }
    let (fa, fb) = ((nb / na).sqrt(), (na / nb).sqrt());
    let statistic: f64 = bins
        .iter()
        .map(|&(x, y)| (fa * x - fb * y).powi(2) / (x + y))
        .sum();
    let df = bins.len() - 1;
    ChiSquareResult {
        statistic,
        df,
        p_value: chi_square_sf(statistic, df as f64),
        bins: bins.len(),
    }
}

/// Sample moments with standard errors of the usual estimators.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub count: usize,
    pub mean: f64,
    pub variance: f64,
    pub se_mean: f64,
    pub se_variance: f64,
}

pub fn summarize(data: &[f64]) -> Summary {
    let n = data.len() as f64;
    let mean = data.iter().sum::<f64>() / n;
    let (mut m2, mut m4) = (0.0, 0.0);
    for &x in data {
        let d = x - mean;
        m2 += d * d;
        m4 += d * d * d * d;
    }
    let variance = m2 / (n - 1.0);
    let m2n = m2 / n;
    let m4n = m4 / n;
    Summary {
        count: data.len(),
        mean,
        variance,
        se_mean: (variance / n).sqrt(),
        se_variance: ((m4n - m2n * m2n).max(0.0) / n).sqrt(),
    }
}

/// Sample covariance and the standard error of the product-moment estimator.
pub fn covariance(x: &[f64], y: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let prods: Vec<f64> = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).collect();
    let s = summarize(&prods);
    (s.mean * n / (n - 1.0), s.se_mean)
}

pub fn correlation(x: &[f64], y: &[f64]) -> f64 {
    let (c, _) = covariance(x, y);
    let vx = summarize(x).variance;
    let vy = summarize(y).variance;
    c / (vx * vy).sqrt()
}

/// Least-squares slope of `ln y` on `ln x`.
pub fn log_log_slope(x: &[f64], y: &[f64]) -> f64 {
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = lx.iter().map(|a| (a - mx).powi(2)).sum();
    sxy / sxx
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_distr::{Distribution, Normal, Poisson};

    #[test]
    fn normal_cdf_reference_values() {
        assert!((normal_cdf(0.0) - 0.5).abs() < 1e-16);
        assert!((normal_cdf(1.0) - 0.841_344_746_068_542_9).abs() < 1e-15);
        assert!((normal_cdf(-2.0) - 0.022_750_131_948_179_2).abs() < 1e-15);
        // Tail relative accuracy.
        let t = normal_sf(6.0);
        assert!((t / 9.865_876_450_376_98e-10 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn kolmogorov_branches_agree() {
        for x in [1.1, 1.18, 1.25] {
            let y = -std::f64::consts::PI.powi(2) / (8.0 * x * x);
            let w: f64 = y.exp();
            let small = 1.0
                - (2.0 * std::f64::consts::PI).sqrt() / x * (1..=6).map(|k| w.powi((2 * k - 1) * (2 * k - 1))).sum::<f64>();
            assert!((kolmogorov_sf(x) - small).abs() < 1e-12);
        }
        // Known critical values.
        assert!((kolmogorov_sf(1.3581) - 0.05).abs() < 1e-4);
        assert!((kolmogorov_sf(1.6276) - 0.01).abs() < 1e-4);
    }

    #[test]
    fn ks_accepts_correct_law_and_rejects_shift() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        let d = Normal::new(0.0, 1.0).unwrap();
        let x: Vec<f64> = (0..5000).map(|_| d.sample(&mut rng)).collect();
        assert!(ks_one_sample(&x, normal_cdf).p_value > 0.01);
        assert!(ks_one_sample(&x, |v| normal_cdf(v - 0.2)).p_value < 1e-6);
        let y: Vec<f64> = (0..4000).map(|_| d.sample(&mut rng)).collect();
        assert!(ks_two_sample(&x, &y).p_value > 0.01);
        let z: Vec<f64> = y.iter().map(|v| v + 0.2).collect();
        assert!(ks_two_sample(&x, &z).p_value < 1e-6);
    }

    #[test]
    fn restricted_ks_ignores_an_atom_below_the_cut() {
        let a: Vec<f64> = (0..1000).map(|i| if i < 200 { 0.0 } else { i as f64 / 1000.0 }).collect();
        let b: Vec<f64> = (0..1000).map(|i| if i < 200 { 1e-30 } else { i as f64 / 1000.0 }).collect();
        assert!((ks_two_sample(&a, &b).statistic - 0.2).abs() < 1e-12);
        assert_eq!(ks_two_sample_from(&a, &b, 0.2).statistic, 0.0);
        assert_eq!(ks_two_sample_from(&a, &b, f64::NEG_INFINITY), ks_two_sample(&a, &b));
    }

    #[test]
    fn chi_square_two_sample_behaviour() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(9);
        let p = Poisson::new(20.0).unwrap();
        let a: Vec<u64> = (0..5000).map(|_| p.sample(&mut rng) as u64).collect();
        let b: Vec<u64> = (0..5000).map(|_| p.sample(&mut rng) as u64).collect();
        let r = chi_square_two_sample(&a, &b);
        assert!(r.p_value > 0.001, "{r:?}");
        assert!(r.bins > 10);
        let q = Poisson::new(21.0).unwrap();
        let c: Vec<u64> = (0..5000).map(|_| q.sample(&mut rng) as u64).collect();
        assert!(chi_square_two_sample(&a, &c).p_value < 1e-6);
        // Degenerate: all values identical.
        let r = chi_square_two_sample(&[0; 10], &[0; 10]);
        assert_eq!(r.p_value, 1.0);
    }

    #[test]
    fn chi_square_sf_reference() {
        // P(chi2_2 > 2) = e^{-1}.
        assert!((chi_square_sf(2.0, 2.0) - (-1.0f64).exp()).abs() < 1e-14);
    }

    #[test]
    fn summary_and_slope() {
        let s = summarize(&[1.0, 2.0, 3.0, 4.0]);
        assert_eq!(s.mean, 2.5);
        assert!((s.variance - 5.0 / 3.0).abs() < 1e-15);
        let x = [10.0, 100.0, 1000.0];
        let y: Vec<f64> = x.iter().map(|v: &f64| 3.0 * v.powf(-0.5)).collect();
        assert!((log_log_slope(&x, &y) + 0.5).abs() < 1e-12);
        let c = correlation(&[1.0, 2.0, 3.0], &[2.0, 4.0, 6.5]);
        assert!(c > 0.99);
    }
}
