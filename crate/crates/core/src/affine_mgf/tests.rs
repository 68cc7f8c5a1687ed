use proptest::prelude::*;

use super::*;
use crate::moments::moments_of_z;
use crate::ode::rk4_fixed;

fn params(alpha: f64, beta: f64, z0: f64) -> HawkesParams {
    HawkesParams::new(0.0, alpha, beta, z0).unwrap()
}

#[test]
fn zero_initial_value_stays_zero() {
    for (a, b) in [(1.0, 3.0), (2.0, 1.0), (1.0, 1.0)] {
        let grid = TimeGrid::uniform(0.0, 5.0, 50).unwrap();
        let sol = solve_a(&params(a, b, 1.0), 0.0, &grid);
        assert!(sol.blew_up_at().is_none());
        assert_eq!(sol.values().len(), grid.len());
        assert!(sol.values().iter().all(|&v| v == 0.0));
        assert_eq!(sol.eval(2.345), Some(0.0));
    }
}

#[test]
fn laplace_side_matches_fine_fixed_step() {
    for (a, b) in [(1.0, 3.0), (2.0, 1.0), (1.0, 1.0)] {
        let p = params(a, b, 1.0);
        for a0 in [-0.05, -0.5, -2.0] {
            let grid = TimeGrid::uniform(0.0, 1.0, 4).unwrap();
            let sol = solve_a(&p, a0, &grid);
            assert!(sol.blew_up_at().is_none());
            assert_eq!(sol.values()[0], a0);
            let reference = rk4_fixed(|x| a_rhs(&p, x), a0, 1.0, 1e-6);
            let got = *sol.values().last().unwrap();
            assert!((got - reference).abs() < 1e-8, "{a} {b} {a0}: {got} vs {reference}");
            assert!(sol.values()[1..].iter().all(|&v| v < 0.0 && v > -3.0));
        }
    }
}

#[test]
fn sub_critical_laplace_side_stays_in_interval() {
    let p = params(1.0, 2.0, 1.0);
    let grid = TimeGrid::uniform(0.0, 20.0, 200).unwrap();
    let sol = solve_a(&p, -0.1, &grid);
    assert!(sol.values()[1..].iter().all(|&v| v > -0.1 && v < 0.0));
}

#[test]
fn critical_root_solves_rhs() {
    let p = params(1.0, 3.0, 1.0);
    let root = critical_root(&p).unwrap();
    assert!(root > 1.90 && root < 1.91, "{root}");
    assert!(a_rhs(&p, root).abs() < 1e-12);
    assert!(critical_root(&params(2.0, 1.0, 1.0)).is_none());
    assert!(critical_root(&params(1.0, 1.0, 1.0)).is_none());
}

#[test]
fn explosion_time_matches_ode_blow_up() {
    for (a, b, a0) in [(2.0, 1.0, 0.5), (1.0, 1.0, 1.0), (1.0, 3.0, 2.5)] {
        let p = params(a, b, 1.0);
        let tb = explosion_time(&p, a0);
        let sol = solve_a(&p, a0, &TimeGrid::uniform(0.0, 2.0 * tb, 10).unwrap());
        let hit = sol.blew_up_at().unwrap();
        // The ODE stops at A = 500/α; the remaining time is the integral beyond that point.
        let remaining = explosion_time(&p, blow_up_bound(&p));
        assert!((hit + remaining - tb).abs() < 1e-6 * tb.max(1.0), "{a} {b}: {hit} + {remaining} vs {tb}");
    }
    assert_eq!(explosion_time(&params(1.0, 3.0, 1.0), 1.0), f64::INFINITY);
    assert_eq!(explosion_time(&params(2.0, 1.0, 1.0), -1.0), f64::INFINITY);
}

#[test]
fn sub_critical_threshold_decreases_to_root() {
    let p = params(1.0, 3.0, 1.0);
    let root = critical_root(&p).unwrap();
    let mut previous = f64::INFINITY;
    for t in [0.1, 0.5, 1.0, 2.0, 4.0] {
        let tc = theta_critical(&p, t).unwrap();
        assert!(!tc.saturated && tc.value < previous && tc.value > root, "t={t}: {}", tc.value);
        previous = tc.value;
    }
    let far = theta_critical(&p, 50.0).unwrap();
    assert!(far.saturated);
    assert!((far.value - root).abs() < 1e-6);
}

#[test]
fn super_critical_threshold_lower_bound() {
    let p = params(2.0, 1.0, 1.0);
    let mut previous = f64::INFINITY;
    for t in [0.5, 1.0, 5.0, 10.0] {
        let tc = theta_critical(&p, t).unwrap();
        assert!(!tc.saturated && tc.value < previous);
        previous = tc.value;
    }
    // θ_c(t) e^{(α-β)t} settles to a constant, so the ε-bound holds once t is large.
    let scaled: Vec<f64> = [10.0, 15.0, 20.0].iter().map(|&t: &f64| theta_critical(&p, t).unwrap().value * t.exp()).collect();
    assert!((scaled[2] / scaled[1] - 1.0).abs() < 1e-4, "{scaled:?}");
    for t in [15.0, 20.0] {
        let tc = theta_critical(&p, t).unwrap();
        assert!(tc.value >= (-(1.0 + 0.1) * t).exp(), "{t}: {}", tc.value);
    }
    assert!((theta_critical(&p, 5.0).unwrap().value - 0.002_100_156_959_6).abs() < 1e-12);
}

#[test]
fn threshold_is_consistent_with_the_ode() {
    for (a, b, t) in [(2.0, 1.0, 1.0), (2.0, 1.0, 5.0), (1.0, 1.0, 2.0), (1.0, 3.0, 1.0)] {
        let p = params(a, b, 1.0);
        let tc = theta_critical(&p, t).unwrap().value;
        assert!(a_at(&p, tc * (1.0 - 1e-3), t).is_some(), "{a} {b} {t}");
        assert!(a_at(&p, -tc * (1.0 - 1e-3), t).is_some());
        let grid = TimeGrid::uniform(0.0, t, 10).unwrap();
        let sol = solve_a(&p, tc * (1.0 + 1e-2), &grid);
        assert!(sol.blew_up_at().unwrap() < t);
        assert!(sol.values().len() < grid.len());
    }
}

#[test]
fn threshold_rejects_bad_time() {
    let p = params(1.0, 1.0, 1.0);
    assert!(theta_critical(&p, 0.0).is_err());
    assert!(theta_critical(&p, f64::NAN).is_err());
}

#[test]
fn mgf_basic_values() {
    let p = params(1.0, 1.0, 200.0);
    assert_eq!(mgf(&p, 1.0, 0.0).unwrap(), 1.0);
    let mut previous = 1.0;
    for theta in [0.001, 0.01, 0.05, 0.5, 2.0] {
        let m = mgf(&p, 1.0, theta).unwrap();
        assert!(m > 0.0 && m <= previous);
        previous = m;
    }
    assert_eq!(mgf(&p, 0.0, 0.3).unwrap(), (-0.3f64 * 200.0).exp());
}

#[test]
fn log_mgf_is_linear_in_z0() {
    let unit = params(2.0, 1.0, 1.0);
    let base = log_mgf(&unit, 0.7, 0.2).unwrap();
    for z0 in [3.0, 100.0, 12345.0] {
        assert_eq!(log_mgf(&unit.with_z0(z0).unwrap(), 0.7, 0.2).unwrap(), base * z0);
    }
}

#[test]
fn mgf_errors() {
    let p = params(2.0, 1.0, 10.0);
    let tc = theta_critical(&p, 1.0).unwrap().value;
    assert!(matches!(
        mgf(&p, 1.0, -1.01 * tc),
        Err(HawkesError::BeyondCriticalThreshold { .. })
    ));
    assert!(mgf(&p, 1.0, -0.9 * tc).unwrap() > 1.0);
    let with_mu = HawkesParams::new(1.0, 2.0, 1.0, 10.0).unwrap();
    assert!(matches!(mgf(&with_mu, 1.0, 0.1), Err(HawkesError::UnsupportedCase(_))));
}

#[test]
fn derivative_at_zero_is_the_mean() {
    for (a, b) in [(1.0, 1.0), (2.0, 1.0), (1.0, 2.0)] {
        let p = params(a, b, 100.0);
        let t = 0.8;
        let h = 1e-6;
        let d = -(mgf(&p, t, h).unwrap() - mgf(&p, t, -h).unwrap()) / (2.0 * h);
        let ez = moments_of_z(&p, t).unwrap().ez;
        assert!((d - ez).abs() < 1e-5 * ez, "{a} {b}: {d} vs {ez}");
    }
}

#[test]
fn expansion_coefficients() {
    let crit = params(1.5, 1.5, 1.0);
    let (f1, f2) = expansion_f(&crit, 2.0);
    assert_eq!(f1, 1.0);
    assert!((f2 - 0.5 * 2.25 * 2.0).abs() < 1e-15);
    assert_eq!(expansion_f(&params(2.0, 1.0, 1.0), 0.0), (1.0, 0.0));
    let p = params(2.0, 1.0, 1.0);
    let (_, f2) = expansion_f(&p, 1.0);
    let e = std::f64::consts::E;
    assert!((f2 - 0.5 * 4.0 * (e * e - e)).abs() < 1e-12);
}

#[test]
fn expansion_error_shrinks_like_inverse_root_n() {
    for (a, b) in [(2.0, 1.0), (1.0, 2.0), (1.0, 1.0)] {
        let p = params(a, b, 1.0);
        let (t, theta) = (1.0, 1.5);
        let (f1, f2) = expansion_f(&p, t);
        let errors: Vec<f64> = [1e4, 1e6, 1e8]
            .iter()
            .map(|&n: &f64| {
                let value = a_at(&p, -theta / n.sqrt(), t).unwrap();
                (n * value + n.sqrt() * theta * f1 - theta * theta * f2).abs()
            })
            .collect();
        for w in errors.windows(2) {
            let ratio = w[1] / w[0];
            assert!(ratio > 0.07 && ratio < 0.13, "{a} {b}: {errors:?}");
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn comparison_principle(a0 in -3.0f64..0.3, gap in 1e-3f64..0.5, t in 0.05f64..2.0) {
        let p = params(1.2, 1.0, 1.0);
        if let (Some(lo), Some(hi)) = (a_at(&p, a0, t), a_at(&p, a0 + gap, t)) {
            prop_assert!(lo < hi);
        }
    }

    #[test]
    fn flow_property(a0 in -2.0f64..0.2, s in 0.0f64..1.5, t in 0.0f64..1.5, beta in 0.5f64..2.0) {
        let p = params(1.0, beta, 1.0);
        if let Some(mid) = a_at(&p, a0, s) {
            if let (Some(direct), Some(composed)) = (a_at(&p, a0, s + t), a_at(&p, mid, t)) {
                prop_assert!((direct - composed).abs() <= 1e-8 * (1.0 + direct.abs()));
            }
        }
    }
}
