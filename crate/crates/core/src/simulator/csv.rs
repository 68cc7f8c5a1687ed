//! `# hawkes-path v1` text format.
//!
//! ```text
//! # hawkes-path v1
//! # mu=0,alpha=1,beta=1,z0=100,horizon=2,seed=42
//! event_time,z_after
//! 0.0031,100.68
//! ```
//!
//! Ensembles use the same header followed by `path_id,event_time,z_after`
//! rows; the params line then carries the master seed and a `paths=` count.

use std::io::{BufRead, Write};

use super::SimPath;
use crate::error::{HawkesError, Result};
use crate::model::HawkesParams;

const MAGIC: &str = "# hawkes-path v1";

fn params_line(p: &HawkesParams, horizon: f64, seed: u64) -> String {
    format!(
        "# mu={},alpha={},beta={},z0={},horizon={},seed={}",
        p.mu(),
        p.alpha(),
        p.beta(),
        p.z0(),
        horizon,
        seed
    )
}

pub fn write_path_csv<W: Write>(path: &SimPath, mut w: W) -> Result<()> {
    writeln!(w, "{MAGIC}")?;
    writeln!(w, "{}", params_line(path.params(), path.horizon(), path.seed()))?;
    writeln!(w, "event_time,z_after")?;
    for (t, z) in path.event_times().iter().zip(path.z_at_events()) {
        writeln!(w, "{t},{z}")?;
    }
    Ok(())
}

/// Writes paths that share params and horizon; `master_seed` goes in the header.
pub fn write_ensemble_csv<W: Write>(paths: &[SimPath], master_seed: u64, mut w: W) -> Result<()> {
    let first = paths
        .first()
        .ok_or_else(|| HawkesError::invalid("paths", "ensemble is empty"))?;
    writeln!(w, "{MAGIC}")?;
    writeln!(
        w,
        "{},paths={}",
        params_line(first.params(), first.horizon(), master_seed),
        paths.len()
    )?;
    writeln!(w, "path_id,event_time,z_after")?;
    for (id, path) in paths.iter().enumerate() {
        for (t, z) in path.event_times().iter().zip(path.z_at_events()) {
            writeln!(w, "{id},{t},{z}")?;
        }
    }
    Ok(())
}

struct Header {
    params: HawkesParams,
    horizon: f64,
    seed: u64,
    paths: Option<usize>,
}

fn parse_header(lines: &mut impl Iterator<Item = std::io::Result<String>>) -> Result<(Header, String)> {
    let mut next = || -> Result<String> {
        lines
            .next()
            .ok_or_else(|| HawkesError::Parse("unexpected end of file".into()))?
            .map_err(HawkesError::from)
    };
    if next()?.trim() != MAGIC {
        return Err(HawkesError::Parse(format!("missing `{MAGIC}` header")));
    }
    let line = next()?;
    let body = line
        .trim()
        .strip_prefix('#')
        .ok_or_else(|| HawkesError::Parse("missing params line".into()))?;
    let mut fields = std::collections::HashMap::new();
    for kv in body.trim().split(',') {
        let (k, v) = kv
            .split_once('=')
            .ok_or_else(|| HawkesError::Parse(format!("bad params field `{kv}`")))?;
        fields.insert(k.trim().to_string(), v.trim().to_string());
    }
    let get = |k: &str| -> Result<f64> {
        fields
            .get(k)
            .ok_or_else(|| HawkesError::Parse(format!("params line lacks `{k}`")))?
            .parse::<f64>()
            .map_err(|e| HawkesError::Parse(format!("`{k}`: {e}")))
    };
    let params = HawkesParams::new(get("mu")?, get("alpha")?, get("beta")?, get("z0")?)?;
    let horizon = get("horizon")?;
    let seed = fields
        .get("seed")
        .ok_or_else(|| HawkesError::Parse("params line lacks `seed`".into()))?
        .parse::<u64>()
        .map_err(|e| HawkesError::Parse(format!("`seed`: {e}")))?;
    let paths = match fields.get("paths") {
        Some(v) => Some(
            v.parse::<usize>()
                .map_err(|e| HawkesError::Parse(format!("`paths`: {e}")))?,
        ),
        None => None,
    };
    let columns = next()?;
    Ok((
        Header {
            params,
            horizon,
            seed,
            paths,
        },
        columns.trim().to_string(),
    ))
}

fn parse_f64(s: &str, line_no: usize) -> Result<f64> {
    s.trim()
        .parse()
        .map_err(|e| HawkesError::Parse(format!("line {line_no}: {e}")))
}

pub fn read_path_csv<R: BufRead>(r: R) -> Result<SimPath> {
    let mut lines = r.lines();
    let (h, columns) = parse_header(&mut lines)?;
    if columns != "event_time,z_after" {
        return Err(HawkesError::Parse(format!("unexpected columns `{columns}`")));
    }
    let (mut times, mut zs) = (Vec::new(), Vec::new());
    for (i, line) in lines.enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let (t, z) = line
            .split_once(',')
            .ok_or_else(|| HawkesError::Parse(format!("line {}: expected two columns", i + 4)))?;
        times.push(parse_f64(t, i + 4)?);
        zs.push(parse_f64(z, i + 4)?);
    }
    SimPath::from_parts(h.params, h.horizon, times, zs, h.seed)
}

/// Reads a concatenated ensemble. Per-path seeds are not stored in the file,
/// so every returned path carries the master seed from the header.
pub fn read_ensemble_csv<R: BufRead>(r: R) -> Result<Vec<SimPath>> {
    let mut lines = r.lines();
    let (h, columns) = parse_header(&mut lines)?;
    if columns != "path_id,event_time,z_after" {
        return Err(HawkesError::Parse(format!("unexpected columns `{columns}`")));
    }
    let mut groups: Vec<(Vec<f64>, Vec<f64>)> = Vec::new();
    groups.resize_with(h.paths.unwrap_or(0), Default::default);
    for (i, line) in lines.enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let cols: Vec<&str> = line.split(',').collect();
        if cols.len() != 3 {
            return Err(HawkesError::Parse(format!("line {}: expected three columns", i + 4)));
        }
        let id: usize = cols[0]
            .trim()
            .parse()
            .map_err(|e| HawkesError::Parse(format!("line {}: {e}", i + 4)))?;
        if id >= groups.len() {
            groups.resize_with(id + 1, Default::default);
        }
        groups[id].0.push(parse_f64(cols[1], i + 4)?);
        groups[id].1.push(parse_f64(cols[2], i + 4)?);
    }
    groups
        .into_iter()
        .map(|(t, z)| SimPath::from_parts(h.params, h.horizon, t, z, h.seed))
        .collect()
}
