use std::fs;
use std::path::Path;

use hawkes_core::validation::DEFAULT_SEED;
use hawkes_core::HawkesParams;
use serde::{Deserialize, Serialize};

use crate::args::ParamArgs;
use crate::CliError;

/// Contents of `--config`; also what `--print-config` emits.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub params: Option<HawkesParams>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub workers: Option<usize>,
}

pub fn read_json<T: serde::de::DeserializeOwned>(path: &Path, what: &str) -> Result<T, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::Usage(format!("{what} {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("{what} {}: {e}", path.display())))
}

impl FileConfig {
    pub fn load(path: Option<&Path>) -> Result<Self, CliError> {
        path.map_or_else(|| Ok(FileConfig::default()), |p| read_json(p, "--config"))
    }

    /// Flag over config over default.
    pub fn seed(&self, flag: Option<u64>) -> u64 {
        flag.or(self.seed).unwrap_or(DEFAULT_SEED)
    }

    pub fn workers(&self, flag: Option<usize>) -> Option<usize> {
        flag.or(self.workers)
    }

    /// Inline flags over `--params` over the config file; `mu` and `z0`
    /// default to 0 and 1, `alpha` and `beta` are required.
    pub fn params(&self, args: &ParamArgs) -> Result<HawkesParams, CliError> {
        let base = match &args.params {
            Some(path) => Some(read_json::<HawkesParams>(path, "--params")?),
            None => self.params,
        };
        let pick = |flag: Option<f64>, from: fn(&HawkesParams) -> f64| flag.or(base.as_ref().map(from));
        let missing = |name: &str| CliError::Usage(format!("missing --{name} (or a --params/--config file)"));
        let mu = pick(args.mu, HawkesParams::mu).unwrap_or(0.0);
        let alpha = pick(args.alpha, HawkesParams::alpha).ok_or_else(|| missing("alpha"))?;
        let beta = pick(args.beta, HawkesParams::beta).ok_or_else(|| missing("beta"))?;
        let z0 = pick(args.z0, HawkesParams::z0).unwrap_or(1.0);
        Ok(HawkesParams::new(mu, alpha, beta, z0)?)
    }
}
