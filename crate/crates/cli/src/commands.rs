use std::path::Path;

use rayon::prelude::*;
use serde::Serialize;
use serde_json::Value;

use hawkes_core::affine_mgf::{log_mgf, theta_critical};
use hawkes_core::cir::{simulate_cir_euler, simulate_cir_exact};
use hawkes_core::limits::{passage_time_cdf, rescaled_limit_law};
use hawkes_core::model::classify_regime;
use hawkes_core::moments::moments_of_z;
use hawkes_core::rng::derive_seed;
use hawkes_core::simulator::{simulate_cluster, simulate_direct, write_ensemble_csv, write_path_csv};
use hawkes_core::validation::{run_experiment, run_suite, SuiteSpec};
use hawkes_core::{CirParams, ExperimentSpec, HawkesParams, Regime, SimPath, TimeGrid};

use crate::args::{CirMethod, Cli, Command, Method, ParamArgs, RegimeArg};
use crate::config::{read_json, FileConfig};
use crate::output::{emit, format_for, to_json, Cell, Format, Table};
use crate::CliError;

/// Runs the subcommand; `Ok(false)` means a validation run failed.
pub fn dispatch(cli: Cli) -> Result<bool, CliError> {
    let config = FileConfig::load(cli.config.as_deref())?;
    let workers = config.workers(cli.workers);
    if workers == Some(0) {
        return Err(CliError::Usage("--workers must be >= 1".into()));
    }
    let seed = config.seed(cli.seed);
    if cli.print_config {
        let resolved = FileConfig {
            params: param_args(&cli.command).map(|a| config.params(a)).transpose()?,
            seed: Some(seed),
            workers,
        };
        emit(cli.out.as_deref(), &to_json(&resolved)?)?;
        return Ok(true);
    }
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = workers {
        builder = builder.num_threads(n);
    }
    let pool = builder.build().map_err(|e| CliError::Usage(format!("worker pool: {e}")))?;
    let ctx = Context {
        config,
        seed,
        seed_flag: cli.seed,
        out: cli.out,
    };
    pool.install(|| run(&ctx, cli.command))
}

struct Context {
    config: FileConfig,
    seed: u64,
    /// Seed given explicitly on the command line or in the config.
    seed_flag: Option<u64>,
    out: Option<std::path::PathBuf>,
}

impl Context {
    fn out(&self) -> Option<&Path> {
        self.out.as_deref()
    }

    fn emit_table(&self, table: &Table) -> Result<bool, CliError> {
        let format = format_for(self.out(), Format::Csv)?;
        emit(self.out(), &table.render(format)?)?;
        Ok(true)
    }
}

fn param_args(command: &Command) -> Option<&ParamArgs> {
    match command {
        Command::Simulate { params, .. }
        | Command::Moments { params, .. }
        | Command::Mgf { params, .. }
        | Command::ThetaC { params, .. }
        | Command::LimitLaw { params, .. }
        | Command::PassageTime { params, .. } => Some(params),
        Command::Cir { .. } | Command::Validate { .. } => None,
    }
}

fn run(ctx: &Context, command: Command) -> Result<bool, CliError> {
    match command {
        Command::Simulate { params, horizon, paths, method } => simulate(ctx, &ctx.config.params(&params)?, horizon, paths, method),
        Command::Moments { params, times } => moments(ctx, &ctx.config.params(&params)?, &times),
        Command::Mgf { params, times, thetas } => mgf(ctx, &ctx.config.params(&params)?, &times, &thetas),
        Command::ThetaC { params, times } => theta_c(ctx, &ctx.config.params(&params)?, &times),
        Command::LimitLaw { params, regime, gamma, n } => limit_law(ctx, &ctx.config.params(&params)?, regime, gamma, n),
        Command::PassageTime { params, n, k, times } => passage(ctx, &ctx.config.params(&params)?, n, k, &times),
        Command::Cir {
            beta,
            gamma,
            mu,
            x0,
            t_end,
            steps,
            paths,
            method,
        } => cir(ctx, CirParams::new(beta, gamma, mu, x0)?, t_end, steps, paths, method),
        Command::Validate { spec, table, raw } => validate(ctx, &spec, table.as_deref(), raw.as_deref()),
    }
}

fn simulate(ctx: &Context, p: &HawkesParams, horizon: f64, paths: u64, method: Method) -> Result<bool, CliError> {
    if format_for(ctx.out(), Format::Csv)? != Format::Csv {
        return Err(CliError::Usage("simulate writes CSV only; use a .csv output".into()));
    }
    if paths == 0 {
        return Err(CliError::Usage("--paths must be >= 1".into()));
    }
    let sim = match method {
        Method::Direct => simulate_direct,
        Method::Cluster => simulate_cluster,
    };
    let mut bytes = Vec::new();
    if paths == 1 {
        write_path_csv(&sim(p, horizon, ctx.seed)?, &mut bytes)?;
    } else {
        let ensemble: Vec<SimPath> = (0..paths)
            .into_par_iter()
            .map(|i| sim(p, horizon, derive_seed(ctx.seed, i)))
            .collect::<Result<_, _>>()?;
        write_ensemble_csv(&ensemble, ctx.seed, &mut bytes)?;
    }
    emit(ctx.out(), &bytes)?;
    Ok(true)
}

fn moments(ctx: &Context, p: &HawkesParams, times: &[f64]) -> Result<bool, CliError> {
    let mut table = Table::new(&["t", "ez", "ez2", "ez3", "var"]);
    for &t in times {
        let m = moments_of_z(p, t)?;
        table.push(vec![Cell::Num(t), Cell::Num(m.ez), Cell::Num(m.ez2), Cell::Num(m.ez3), Cell::Num(m.variance())]);
    }
    ctx.emit_table(&table)
}

fn mgf(ctx: &Context, p: &HawkesParams, times: &[f64], thetas: &[f64]) -> Result<bool, CliError> {
    let mut table = Table::new(&["t", "theta", "A", "mgf"]);
    for &t in times {
        for &theta in thetas {
            // log_mgf returns A·z0.
            let exponent = log_mgf(&p.with_z0(1.0)?, t, theta)?;
            table.push(vec![Cell::Num(t), Cell::Num(theta), Cell::Num(exponent), Cell::Num((exponent * p.z0()).exp())]);
        }
    }
    ctx.emit_table(&table)
}

fn theta_c(ctx: &Context, p: &HawkesParams, times: &[f64]) -> Result<bool, CliError> {
    let mut table = Table::new(&["t", "theta_c", "saturated"]);
    for &t in times {
        let tc = theta_critical(p, t)?;
        table.push(vec![Cell::Num(t), Cell::Num(tc.value), Cell::Bool(tc.saturated)]);
    }
    ctx.emit_table(&table)
}

fn limit_law(ctx: &Context, p: &HawkesParams, regime: Option<RegimeArg>, gamma: Option<f64>, n: Option<f64>) -> Result<bool, CliError> {
    if format_for(ctx.out(), Format::Json)? != Format::Json {
        return Err(CliError::Usage("limit-law writes JSON only; use a .json output".into()));
    }
    let near = |gamma: Option<f64>, n: Option<f64>| -> Result<(HawkesParams, Regime), CliError> {
        let gamma = gamma.ok_or_else(|| CliError::Usage("nearly-critical regime needs --gamma".into()))?;
        let n = n.ok_or_else(|| CliError::Usage("nearly-critical regime needs --n".into()))?;
        let params = HawkesParams::nearly_critical(p.mu(), p.beta(), gamma, n)?;
        Ok((params, Regime::nearly_critical(p.beta(), gamma, n)?))
    };
    let (params, regime) = match regime {
        Some(RegimeArg::NearlyCritical) => near(gamma, n)?,
        None if gamma.is_some() => near(gamma, n)?,
        Some(RegimeArg::SubCritical) => (*p, Regime::SubCritical),
        Some(RegimeArg::Critical) => (*p, Regime::Critical),
        Some(RegimeArg::SuperCritical) => (*p, Regime::SuperCritical),
        None => (*p, classify_regime(p)),
    };
    #[derive(Serialize)]
    struct Descriptor<'a> {
        regime: &'a str,
        params: HawkesParams,
        #[serde(flatten)]
        law: hawkes_core::RescaledLimitLaw,
    }
    let law = rescaled_limit_law(&params, regime)?;
    emit(ctx.out(), &to_json(&Descriptor { regime: regime.name(), params, law })?)?;
    Ok(true)
}

fn passage(ctx: &Context, p: &HawkesParams, n: f64, k: f64, times: &[f64]) -> Result<bool, CliError> {
    let p = p.with_z0(n)?;
    let mut table = Table::new(&["t", "prob"]);
    for &t in times {
        table.push(vec![Cell::Num(t), Cell::Num(passage_time_cdf(&p, k, t)?)]);
    }
    ctx.emit_table(&table)
}

fn cir(ctx: &Context, c: CirParams, t_end: f64, steps: usize, paths: u64, method: CirMethod) -> Result<bool, CliError> {
    if paths == 0 {
        return Err(CliError::Usage("--paths must be >= 1".into()));
    }
    let grid = TimeGrid::uniform(0.0, t_end, steps)?;
    let sampler = match method {
        CirMethod::Exact => simulate_cir_exact,
        CirMethod::Euler => simulate_cir_euler,
    };
    let sampled: Vec<_> = (0..paths).into_par_iter().map(|i| sampler(&c, &grid, derive_seed(ctx.seed, i))).collect();
    let mut table = Table::new(&["path_id", "t", "x", "integral_x"]);
    for (id, path) in sampled.iter().enumerate() {
        for ((&t, &x), &ix) in grid.points().iter().zip(&path.x_values).zip(&path.integral_x) {
            table.push(vec![Cell::Int(id as u64), Cell::Num(t), Cell::Num(x), Cell::Num(ix)]);
        }
    }
    ctx.emit_table(&table)
}

fn validate(ctx: &Context, spec_path: &Path, table_path: Option<&Path>, raw_path: Option<&Path>) -> Result<bool, CliError> {
    let format = format_for(ctx.out(), Format::Json)?;
    if format == Format::Csv {
        return Err(CliError::Usage("validate writes a .json report or a .txt table; use --raw for CSV".into()));
    }
    let value: Value = read_json(spec_path, "--spec")?;
    let is_suite = value.get("experiments").is_some();
    let (report_json, table, raw_csv, passed) = if is_suite {
        let mut suite: SuiteSpec = serde_json::from_value(value).map_err(|e| CliError::Usage(format!("--spec {}: {e}", spec_path.display())))?;
        if let Some(seed) = ctx.seed_flag.or(ctx.config.seed) {
            suite.seed = seed;
        }
        if raw_path.is_some() {
            suite.experiments.iter_mut().for_each(|e| e.keep_raw = true);
        }
        let report = run_suite(&suite)?;
        let mut raw = String::from("experiment,n,quantity,index,value\n");
        if let Some(last) = report.attempts.last() {
            for r in &last.reports {
                for line in r.raw_csv().lines().skip(1) {
                    raw.push_str(&format!("{},{line}\n", r.name));
                }
            }
        }
        (to_json(&report)?, report.to_table(), raw, report.passed)
    } else {
        let mut spec: ExperimentSpec = serde_json::from_value(value).map_err(|e| CliError::Usage(format!("--spec {}: {e}", spec_path.display())))?;
        if let Some(seed) = ctx.seed_flag.or(ctx.config.seed) {
            spec.seed = seed;
        }
        spec.keep_raw |= raw_path.is_some();
        let report = run_experiment(&spec)?;
        (to_json(&report)?, report.to_table(), report.raw_csv(), report.passed)
    };
    match ctx.out() {
        Some(_) => {
            emit(ctx.out(), if format == Format::Table { table.as_bytes() } else { &report_json })?;
            if format != Format::Table {
                print!("{table}");
            }
        }
        None => {
            emit(None, &report_json)?;
            eprint!("{table}");
        }
    }
    if let Some(path) = table_path {
        emit(Some(path), table.as_bytes())?;
    }
    if let Some(path) = raw_path {
        emit(Some(path), raw_csv.as_bytes())?;
    }
    Ok(passed)
}
