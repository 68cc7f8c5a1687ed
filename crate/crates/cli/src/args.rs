use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

/// Simulate and analyse Markovian Hawkes processes with exponential kernel.
#[derive(Debug, Parser)]
#[command(name = "hawkes", version, about)]
pub struct Cli {
    /// JSON file with defaults for params, seed and workers; flags take precedence.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,

    /// Master seed [default: 42].
    #[arg(long, global = true)]
    pub seed: Option<u64>,

    /// Worker threads [default: available parallelism].
    #[arg(long, global = true)]
    pub workers: Option<usize>,

    /// Output file; the extension (.csv, .json, .txt) picks the format. Stdout when absent.
    #[arg(long, short, global = true, value_name = "FILE")]
    pub out: Option<PathBuf>,

    /// Print the resolved configuration as JSON and exit.
    #[arg(long, global = true)]
    pub print_config: bool,

    #[command(subcommand)]
    pub command: Command,
}

/// Model parameters: a JSON file and/or inline values; inline values win.
#[derive(Debug, Clone, Default, Args)]
pub struct ParamArgs {
    /// JSON file `{"mu":…,"alpha":…,"beta":…,"z0":…}`.
    #[arg(long, value_name = "FILE")]
    pub params: Option<PathBuf>,
    #[arg(long)]
    pub mu: Option<f64>,
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub beta: Option<f64>,
    #[arg(long)]
    pub z0: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Method {
    Direct,
    Cluster,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CirMethod {
    Exact,
    Euler,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum RegimeArg {
    SubCritical,
    Critical,
    SuperCritical,
    NearlyCritical,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Simulate event paths; writes `event_time,z_after` rows (with `path_id` for ensembles).
    Simulate {
        #[command(flatten)]
        params: ParamArgs,
        /// Horizon T.
        #[arg(long)]
        horizon: f64,
        #[arg(long, default_value_t = 1)]
        paths: u64,
        #[arg(long, value_enum, default_value_t = Method::Direct)]
        method: Method,
    },
    /// Closed-form moments of Z_t: `t,ez,ez2,ez3,var`.
    Moments {
        #[command(flatten)]
        params: ParamArgs,
        /// Comma-separated times.
        #[arg(long = "t", value_delimiter = ',', required = true, allow_negative_numbers = true)]
        times: Vec<f64>,
    },
    /// Laplace transform E[exp(-θ Z_t)] = exp(A z0): `t,theta,A,mgf`.
    Mgf {
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long = "t", value_delimiter = ',', required = true, allow_negative_numbers = true)]
        times: Vec<f64>,
        /// Comma-separated θ values; negative θ probes exponential moments.
        #[arg(long = "theta", value_delimiter = ',', required = true, allow_negative_numbers = true)]
        thetas: Vec<f64>,
    },
    /// Blow-up threshold of the exponential moment: `t,theta_c,saturated`.
    ThetaC {
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long = "t", value_delimiter = ',', required = true, allow_negative_numbers = true)]
        times: Vec<f64>,
    },
    /// Limit law of the rescaled process as JSON.
    LimitLaw {
        #[command(flatten)]
        params: ParamArgs,
        /// Regime; classified from the parameters when absent.
        #[arg(long, value_enum)]
        regime: Option<RegimeArg>,
        /// γ for the nearly-critical regime α_n = β + γ/n.
        #[arg(long, allow_negative_numbers = true)]
        gamma: Option<f64>,
        /// Scale n for the nearly-critical regime.
        #[arg(long)]
        n: Option<f64>,
    },
    /// Normal approximation of P(τ_K ≤ t): `t,prob`.
    PassageTime {
        #[command(flatten)]
        params: ParamArgs,
        /// Scale n (sets z0).
        #[arg(long)]
        n: f64,
        /// Count level K.
        #[arg(long = "K", visible_alias = "k")]
        k: f64,
        #[arg(long = "t", value_delimiter = ',', required = true, allow_negative_numbers = true)]
        times: Vec<f64>,
    },
    /// Square-root diffusion dX = (βμ + γX)dt + β√X dB: `path_id,t,x,integral_x`.
    Cir {
        #[arg(long)]
        beta: f64,
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        gamma: f64,
        #[arg(long, default_value_t = 0.0)]
        mu: f64,
        #[arg(long, default_value_t = 1.0)]
        x0: f64,
        /// End of the uniform grid on [0, t-end].
        #[arg(long)]
        t_end: f64,
        #[arg(long, default_value_t = 1000)]
        steps: usize,
        #[arg(long, default_value_t = 1)]
        paths: u64,
        #[arg(long, value_enum, default_value_t = CirMethod::Exact)]
        method: CirMethod,
    },
    /// Run a validation experiment or suite from a JSON spec. Exit status 1 when it fails.
    Validate {
        #[arg(long, value_name = "FILE")]
        spec: PathBuf,
        /// Also write the table to this file.
        #[arg(long, value_name = "FILE")]
        table: Option<PathBuf>,
        /// Write raw per-path statistics as CSV (implies keep_raw).
        #[arg(long, value_name = "FILE")]
        raw: Option<PathBuf>,
    },
}
