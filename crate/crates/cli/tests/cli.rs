use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn hawkes(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hawkes")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn csv_rows(text: &str) -> Vec<Vec<String>> {
    text.lines().skip(1).map(|l| l.split(',').map(str::to_string).collect()).collect()
}

fn write(dir: &Path, name: &str, content: &str) -> String {
    let path = dir.join(name);
    fs::write(&path, content).unwrap();
    path.to_str().unwrap().to_string()
}

const SPEC: &str = r#"{"name":"flln","check":"flln","params":{"mu":0,"alpha":1,"beta":2,"z0":1},
                       "scales":[25,100],"paths_per_scale":200}"#;

#[test]
fn help_lists_every_flag() {
    let o = hawkes(&["--help"]);
    assert!(o.status.success());
    let text = stdout(&o);
    for flag in ["--config", "--seed", "--workers", "--out", "--print-config"] {
        assert!(text.contains(flag), "{flag}");
    }
    for sub in ["simulate", "moments", "mgf", "theta-c", "limit-law", "passage-time", "cir", "validate"] {
        assert!(text.contains(sub), "{sub}");
    }
    let text = stdout(&hawkes(&["passage-time", "--help"]));
    for flag in ["--params", "--mu", "--alpha", "--beta", "--z0", "--n", "--K", "--t"] {
        assert!(text.contains(flag), "{flag}");
    }
}

#[test]
fn critical_mean_is_the_initial_value() {
    let o = hawkes(&["moments", "--mu", "0", "--alpha", "1", "--beta", "1", "--z0", "100", "--t", "1"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.starts_with("t,ez,ez2,ez3,var\n"));
    let row = &csv_rows(&text)[0];
    assert_eq!(row[1].parse::<f64>().unwrap(), 100.0);
    assert_eq!(row[4].parse::<f64>().unwrap(), 100.0);
}

#[test]
fn passage_probability_is_one_half_at_the_fluid_level() {
    let o = hawkes(&["passage-time", "--n", "10000", "--alpha", "1", "--beta", "1", "--K", "10000", "--t", "1"]);
    assert!(o.status.success());
    let rows = csv_rows(&stdout(&o));
    assert!((rows[0][1].parse::<f64>().unwrap() - 0.5).abs() < 1e-12);
}

#[test]
fn mgf_and_threshold_tables() {
    let rows = csv_rows(&stdout(&hawkes(&["mgf", "--alpha", "1", "--beta", "2", "--z0", "10", "--t", "0.5,1", "--theta", "0,0.1"])));
    assert_eq!(rows.len(), 4);
    assert_eq!(rows[0][3], "1");
    let a: f64 = rows[1][2].parse().unwrap();
    let m: f64 = rows[1][3].parse().unwrap();
    assert!((m - (10.0 * a).exp()).abs() < 1e-12);

    let rows = csv_rows(&stdout(&hawkes(&["theta-c", "--alpha", "1", "--beta", "3", "--t", "1,50"])));
    assert_eq!(rows[0][2], "false");
    assert_eq!(rows[1][2], "true");

    let o = hawkes(&["mgf", "--alpha", "1", "--beta", "3", "--t", "1", "--theta", "-5"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("diverges"));
}

#[test]
fn limit_law_descriptor() {
    let v: Value = serde_json::from_str(&stdout(&hawkes(&["limit-law", "--alpha", "1", "--beta", "2"]))).unwrap();
    assert_eq!(v["law"], "sub_critical_r");
    assert_eq!(v["variance"], 1.0);
    let v: Value = serde_json::from_str(&stdout(&hawkes(&["limit-law", "--alpha", "1", "--beta", "1", "--gamma", "-0.5", "--n", "100"]))).unwrap();
    assert_eq!(v["law"], "critical_cir");
    assert_eq!(v["process"]["gamma"], -0.5);
    assert_eq!(hawkes(&["limit-law", "--alpha", "2", "--beta", "1", "--regime", "critical"]).status.code(), Some(2));
}

#[test]
fn simulate_output_reads_back() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("paths.csv");
    let o = hawkes(&["simulate", "--alpha", "1", "--beta", "2", "--z0", "5", "--horizon", "2", "--paths", "20", "--out", out.to_str().unwrap()]);
    assert!(o.status.success());
    let paths = hawkes_core::simulator::read_ensemble_csv(std::io::BufReader::new(fs::File::open(&out).unwrap())).unwrap();
    assert_eq!(paths.len(), 20);
    let o = hawkes(&["simulate", "--alpha", "1", "--beta", "2", "--z0", "5", "--horizon", "2", "--method", "cluster"]);
    let path = hawkes_core::simulator::read_path_csv(o.stdout.as_slice()).unwrap();
    assert_eq!(path.horizon(), 2.0);
}

#[test]
fn cir_csv_shape_and_json_variant() {
    let rows = csv_rows(&stdout(&hawkes(&["cir", "--beta", "1", "--mu", "1", "--t-end", "1", "--steps", "10", "--paths", "3"])));
    assert_eq!(rows.len(), 33);
    assert!(rows.iter().all(|r| r[2].parse::<f64>().unwrap() >= 0.0));
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("cir.json");
    assert!(hawkes(&["cir", "--beta", "1", "--t-end", "1", "--steps", "4", "--out", out.to_str().unwrap()]).status.success());
    let v: Value = serde_json::from_str(&fs::read_to_string(out).unwrap()).unwrap();
    assert_eq!(v.as_array().unwrap().len(), 5);
    assert_eq!(v[0]["x"], 1.0);
}

#[test]
fn validate_is_reproducible_across_runs_and_workers() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write(dir.path(), "flln.json", SPEC);
    let mut reports = Vec::new();
    for (k, workers) in ["1", "1", "2"].iter().enumerate() {
        let out = dir.path().join(format!("report{k}.json"));
        let o = hawkes(&["validate", "--spec", &spec, "--seed", "42", "--workers", workers, "--out", out.to_str().unwrap()]);
        assert!(o.status.code().is_some_and(|c| c <= 1), "{}", String::from_utf8_lossy(&o.stderr));
        assert!(stdout(&o).contains("flln [flln] seed=42"));
        reports.push(fs::read(out).unwrap());
    }
    assert_eq!(reports[0], reports[1]);
    assert_eq!(reports[0], reports[2]);
    let v: Value = serde_json::from_slice(&reports[0]).unwrap();
    assert_eq!(v["master_seed"], 42);

    let out = dir.path().join("other.json");
    hawkes(&["validate", "--spec", &spec, "--seed", "7", "--out", out.to_str().unwrap()]);
    assert_ne!(fs::read(out).unwrap(), reports[0]);
}

#[test]
fn validate_failure_exits_one_and_suites_run() {
    let dir = tempfile::tempdir().unwrap();
    let failing = write(
        dir.path(),
        "fail.json",
        r#"{"name":"eq","check":"equivalence","params":{"mu":0,"alpha":1,"beta":2,"z0":1},
            "scales":[10],"paths_per_scale":100,"thresholds":{"chi2_p":1.0}}"#,
    );
    let o = hawkes(&["validate", "--spec", &failing]);
    assert_eq!(o.status.code(), Some(1));
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["passed"], false);

    let suite = write(
        dir.path(),
        "suite.json",
        &format!(
            r#"{{"name":"s","experiments":[{SPEC},
                {{"name":"m","check":"moment","params":{{"mu":0,"alpha":1,"beta":2,"z0":1}},"scales":[20],"paths_per_scale":500,"times":[1]}}]}}"#
        ),
    );
    let table = dir.path().join("suite.txt");
    let raw = dir.path().join("raw.csv");
    let o = hawkes(&["validate", "--spec", &suite, "--table", table.to_str().unwrap(), "--raw", raw.to_str().unwrap()]);
    assert!(o.status.code().is_some_and(|c| c <= 1));
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["attempts"][0]["reports"].as_array().unwrap().len(), 2);
    assert!(fs::read_to_string(table).unwrap().starts_with("suite s"));
    let raw = fs::read_to_string(raw).unwrap();
    assert!(raw.starts_with("experiment,n,quantity,index,value\n"));
    assert!(raw.lines().any(|l| l.starts_with("m,20,z(t=1)")));
}

#[test]
fn usage_errors_exit_two_without_output_files() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("m.csv");
    let o = hawkes(&["moments", "--alpha", "1", "--beta", "1", "--t", "-1", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("`t`"));
    assert!(!out.exists());
    assert_eq!(hawkes(&["moments", "--beta", "1", "--t", "1"]).status.code(), Some(2));
    assert_eq!(hawkes(&["moments", "--alpha", "1", "--beta", "1", "--t", "1", "--bogus"]).status.code(), Some(2));
    assert_eq!(hawkes(&["moments", "--alpha", "1", "--beta", "1", "--t", "1", "--out", "x.xml"]).status.code(), Some(2));
    assert_eq!(hawkes(&["validate", "--spec", "/nonexistent.json"]).status.code(), Some(2));
    assert_eq!(hawkes(&["moments", "--alpha", "1", "--beta", "1", "--t", "1", "--workers", "0"]).status.code(), Some(2));
    assert!(fs::read_dir(dir.path()).unwrap().next().is_none());
}

#[test]
fn config_round_trips_and_flags_take_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let o = hawkes(&["--print-config", "moments", "--alpha", "1.5", "--beta", "2", "--z0", "10", "--t", "1", "--seed", "9", "--workers", "2"]);
    let printed = stdout(&o);
    let config = write(dir.path(), "config.json", &printed);
    let again = stdout(&hawkes(&["--config", &config, "--print-config", "moments", "--t", "1"]));
    assert_eq!(printed, again);

    let override_ = stdout(&hawkes(&["--config", &config, "--print-config", "moments", "--t", "1", "--beta", "3", "--seed", "1"]));
    let v: Value = serde_json::from_str(&override_).unwrap();
    assert_eq!(v["params"]["beta"], 3.0);
    assert_eq!(v["params"]["alpha"], 1.5);
    assert_eq!(v["seed"], 1);

    let params = write(dir.path(), "p.json", r#"{"mu":0,"alpha":1,"beta":1,"z0":100}"#);
    let rows = csv_rows(&stdout(&hawkes(&["moments", "--params", &params, "--t", "1"])));
    assert_eq!(rows[0][1], "100");
    let bad = write(dir.path(), "bad.json", r#"{"seed":1,"colour":"red"}"#);
    assert_eq!(hawkes(&["--config", &bad, "moments", "--alpha", "1", "--beta", "1", "--t", "1"]).status.code(), Some(2));
}
