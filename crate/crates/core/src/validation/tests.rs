use super::*;
use crate::error::HawkesError;

fn params(mu: f64, alpha: f64, beta: f64) -> HawkesParams {
    HawkesParams::new(mu, alpha, beta, 1.0).unwrap()
}

fn spec(check: CheckKind, alpha: f64, beta: f64, scales: Vec<f64>, paths: u64) -> ExperimentSpec {
    ExperimentSpec::new("t", check, params(0.0, alpha, beta), scales, paths)
}

fn gating(report: &McReport) -> impl Iterator<Item = &Entry> {
    report.scales.iter().flat_map(|s| &s.entries).chain(&report.overall).filter(|e| e.gating)
}

#[test]
fn spec_json_round_trip_and_defaults() {
    let json = r#"{"name":"m","check":"moment","params":{"mu":0.0,"alpha":1.0,"beta":2.0,"z0":1.0},
                   "scales":[10.0],"paths_per_scale":100,"times":[1.0]}"#;
    let s: ExperimentSpec = serde_json::from_str(json).unwrap();
    assert_eq!(s.seed, DEFAULT_SEED);
    assert_eq!(s.thresholds, Thresholds::default());
    assert_eq!(s.event_cap, DEFAULT_EVENT_CAP);
    s.validate().unwrap();
    let back: ExperimentSpec = serde_json::from_str(&serde_json::to_string(&s).unwrap()).unwrap();
    assert_eq!(back, s);
}

#[test]
fn validation_rejects_bad_specs() {
    let ok = spec(CheckKind::Moment, 1.0, 2.0, vec![10.0], 100).with_times(vec![0.5, 1.0]);
    ok.validate().unwrap();
    let bad = [
        ExperimentSpec { paths_per_scale: 99, ..ok.clone() },
        ExperimentSpec { scales: vec![], ..ok.clone() },
        ExperimentSpec { scales: vec![-1.0], ..ok.clone() },
        ok.clone().with_times(vec![1.0, 1.0]),
        ok.clone().with_times(vec![]),
        ExperimentSpec { check: CheckKind::Fclt, ..ok.clone().with_times(vec![0.0, 1.0]) },
        ExperimentSpec { check: CheckKind::Passage, ..ok.clone() },
        ExperimentSpec { check: CheckKind::Mgf, ..ok.clone() },
        ok.clone().with_horizon(0.0),
    ];
    for s in bad {
        assert!(matches!(s.validate(), Err(HawkesError::InvalidParameter { .. })), "{s:?}");
        assert!(run_experiment(&s).is_err());
    }
}

#[test]
fn moment_check_passes_and_is_exact_at_zero() {
    let s = spec(CheckKind::Moment, 1.0, 2.0, vec![20.0, 60.0], 800).with_times(vec![0.0, 0.5, 1.5]);
    let r = run_experiment(&s).unwrap();
    assert!(r.passed, "{}", r.to_table());
    assert_eq!(r.scales.len(), 2);
    for e in r.scales[0].entries.iter().filter(|e| e.t == Some(0.0)) {
        assert_eq!(e.value, 0.0);
    }
    assert!(r.to_table().contains("PASS"));
}

#[test]
fn moment_check_requires_zero_mu() {
    let mut s = spec(CheckKind::Moment, 1.0, 2.0, vec![10.0], 100).with_times(vec![1.0]);
    s.params = params(0.5, 1.0, 2.0);
    assert!(matches!(run_experiment(&s), Err(HawkesError::UnsupportedCase(_))));
}

#[test]
fn reports_do_not_depend_on_worker_count() {
    let s = spec(CheckKind::Fclt, 1.5, 1.0, vec![30.0], 300).with_times(vec![0.5, 1.0]).with_seed(7);
    let run = |threads| {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
        serde_json::to_string(&pool.install(|| run_experiment(&s)).unwrap()).unwrap()
    };
    assert_eq!(run(1), run(3));
}

#[test]
fn seed_changes_the_report() {
    let s = spec(CheckKind::Moment, 1.0, 2.0, vec![10.0], 200).with_times(vec![1.0]);
    let a = run_experiment(&s).unwrap();
    let b = run_experiment(&s.clone().with_seed(99)).unwrap();
    assert_ne!(a.scales[0].entries, b.scales[0].entries);
    assert_eq!(a.master_seed, DEFAULT_SEED);
}

#[test]
fn equivalence_check_passes() {
    for (alpha, beta) in [(1.0, 2.0), (1.0, 1.0), (2.0, 1.0)] {
        let s = spec(CheckKind::Equivalence, alpha, beta, vec![20.0], 1500);
        let r = run_experiment(&s).unwrap();
        assert!(r.passed, "{}", r.to_table());
    }
}

#[test]
fn flln_check_decays_like_root_n() {
    let s = spec(CheckKind::Flln, 1.0, 2.0, vec![0.0, 25.0, 100.0, 400.0], 300);
    let r = run_experiment(&s).unwrap();
    assert!(r.passed, "{}", r.to_table());
    assert!(r.scales[0].entries.is_empty());
    assert_eq!(r.overall.len(), 4);
    assert!(!r.notes.is_empty());
}

#[test]
fn flln_check_with_only_the_zero_scale_is_an_empty_pass() {
    let r = run_experiment(&spec(CheckKind::Flln, 1.0, 2.0, vec![0.0], 100)).unwrap();
    assert!(r.passed);
    assert!(r.overall.is_empty());
}

#[test]
fn fclt_check_passes() {
    for (alpha, beta) in [(1.0, 2.0), (1.0, 1.0), (1.5, 1.0)] {
        let s = spec(CheckKind::Fclt, alpha, beta, vec![50.0, 400.0], 1000).with_times(vec![0.5, 1.0]);
        let r = run_experiment(&s).unwrap();
        assert!(r.passed, "{}", r.to_table());
        assert!(r.scales[0].entries.iter().all(|e| !e.gating));
        assert!(r.scales[1].entries.iter().any(|e| e.quantity.starts_with("cov_z") && e.gating));
    }
}

#[test]
fn passage_check_tracks_the_gaussian_approximation() {
    let mut s = spec(CheckKind::Passage, 1.0, 1.0, vec![400.0], 1000).with_times(vec![1.0]);
    s.levels = vec![1.0, -1.0, 0.0];
    let r = run_experiment(&s).unwrap();
    assert!(r.passed, "{}", r.to_table());
    let probs: Vec<&Entry> = r.scales[0].entries.iter().filter(|e| e.measure == Measure::AbsError).collect();
    assert_eq!(probs.len(), 3);
    assert!(probs.iter().all(|e| !e.gating && e.value < 0.06));
    assert!(probs[0].empirical > probs[2].empirical);
}

#[test]
fn mgf_check_passes() {
    let mut s = spec(CheckKind::Mgf, 1.0, 2.0, vec![20.0], 2000).with_times(vec![0.5, 1.0]);
    s.thetas = vec![0.02, -0.02];
    let r = run_experiment(&s).unwrap();
    assert!(r.passed, "{}", r.to_table());
}

#[test]
fn rescaled_check_super_and_sub_critical() {
    let s = spec(CheckKind::Rescaled, 2.0, 1.0, vec![200.0], 400).with_times(vec![0.2, 0.4]);
    let r = run_experiment(&s).unwrap();
    assert!(gating(&r).any(|e| e.measure == Measure::Correlation));
    assert!(r.passed, "{}", r.to_table());

    // Sub-critical decorrelation is slow: at finite n the exact correlation is
    // sqrt(x₂/x₁)·sqrt((1-x₁)/(1-x₂)) with x = n^{-s}.
    let (n, s1, s2) = (1000.0f64, 0.2, 0.5);
    let s = spec(CheckKind::Rescaled, 1.0, 2.0, vec![n], 400).with_times(vec![s1, s2]);
    let r = run_experiment(&s).unwrap();
    let entries = &r.scales[0].entries;
    assert!(entries.iter().filter(|e| e.quantity == "ks_rescaled_z").all(|e| e.passed), "{}", r.to_table());
    let (x1, x2) = (n.powf(-s1), n.powf(-s2));
    let exact = (x2 / x1).sqrt() * ((1.0 - x1) / (1.0 - x2)).sqrt();
    let corr = entries.iter().find(|e| e.measure == Measure::Correlation).unwrap();
    assert!((corr.value - exact).abs() < 0.15, "{} vs {exact}", corr.value);

    let bad = spec(CheckKind::Rescaled, 1.0, 2.0, vec![1000.0], 400).with_times(vec![0.5, 1.0]);
    assert!(run_experiment(&bad).is_err());
}

#[test]
fn rescaled_check_critical_compares_with_cir() {
    let mut s = spec(CheckKind::Rescaled, 1.0, 1.0, vec![50.0], 300).with_times(vec![0.5, 1.0]);
    s.cir_step = Some(1e-2);
    s.reference_paths = Some(2000);
    let r = run_experiment(&s).unwrap();
    assert!(r.passed, "{}", r.to_table());

    s.gamma = Some(-0.5);
    let r = run_experiment(&s).unwrap();
    assert!(r.passed, "{}", r.to_table());
    assert!((r.scales[0].entries.iter().find(|e| e.quantity == "mean_z_over_n").unwrap().reference - (-0.25f64).exp()).abs() < 1e-12);
}

#[test]
fn event_cap_fails_with_a_note() {
    let mut s = spec(CheckKind::Moment, 2.0, 1.0, vec![100.0], 100).with_times(vec![5.0]);
    s.event_cap = 50;
    let r = run_experiment(&s).unwrap();
    assert!(!r.passed);
    assert!(r.notes[0].contains("event cap"));
}

#[test]
fn raw_columns_are_kept_on_request() {
    let mut s = spec(CheckKind::Moment, 1.0, 2.0, vec![10.0], 100).with_times(vec![1.0]);
    s.keep_raw = true;
    let r = run_experiment(&s).unwrap();
    assert_eq!(r.raw.len(), 1);
    assert_eq!(r.raw[0].values.len(), 100);
    assert_eq!(r.raw_csv().lines().count(), 101);
}

#[test]
fn suite_gates_and_retries() {
    let experiment = spec(CheckKind::Moment, 1.0, 2.0, vec![10.0], 200).with_times(vec![1.0]);
    let suite = SuiteSpec {
        name: "s".into(),
        seed: 3,
        gates: Vec::new(),
        experiments: vec![experiment.clone(), experiment.clone()],
    };
    let r = run_suite(&suite).unwrap();
    assert!(r.passed, "{}", r.to_table());
    assert_eq!(r.attempts.len(), 1);
    assert_eq!(r.attempts[0].gates.len(), 1);
    assert_eq!(r.attempts[0].reports.len(), 2);
    assert_ne!(r.attempts[0].reports[0].master_seed, r.attempts[0].reports[1].master_seed);

    let mut impossible = spec(CheckKind::Equivalence, 1.0, 2.0, vec![10.0], 100);
    impossible.thresholds.chi2_p = 1.0;
    let failing = SuiteSpec {
        gates: vec![impossible],
        ..suite
    };
    let r = run_suite(&failing).unwrap();
    assert!(!r.passed);
    assert_eq!(r.attempts.len(), 2);
    assert!(r.attempts.iter().all(|a| !a.gate_passed && a.reports.is_empty()));
    assert_ne!(r.attempts[0].seed, r.attempts[1].seed);
    assert!(r.to_table().contains("FAIL"));
}
