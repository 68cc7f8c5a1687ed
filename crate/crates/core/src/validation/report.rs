use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::{CheckKind, VERSION};
use crate::model::HawkesParams;
use crate::stats::summarize;

/// What an [`Entry`]'s `value` measures and how it is compared to `threshold`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Measure {
    /// `(empirical - reference)/se`; passes when `|value| ≤ threshold`.
    ZScore,
    /// p-value; passes when `value > threshold`.
    PValue,
    /// `|empirical - reference|`; passes when `value ≤ threshold`.
    AbsError,
    /// `|empirical/reference - 1|`; passes when `value ≤ threshold`.
    RelError,
    /// Correlation; bound direction depends on the check.
    Correlation,
    /// Fitted decay exponent; passes inside the threshold range.
    Exponent,
    /// Reported without a verdict.
    Info,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Entry {
    pub quantity: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub t: Option<f64>,
    pub empirical: f64,
    pub reference: f64,
    pub measure: Measure,
    pub value: f64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub threshold: Option<f64>,
    pub passed: bool,
    /// Whether the entry counts towards the verdict.
    pub gating: bool,
}

impl Entry {
    pub(crate) fn z_score(quantity: impl Into<String>, t: Option<f64>, empirical: f64, reference: f64, se: f64, z_max: f64) -> Self {
        let value = if se > 0.0 {
            (empirical - reference) / se
        } else if (empirical - reference).abs() <= 1e-12 * reference.abs() {
            0.0
        } else {
            f64::INFINITY
        };
        Entry {
            quantity: quantity.into(),
            t,
            empirical,
            reference,
            measure: Measure::ZScore,
            value,
            threshold: Some(z_max),
            passed: value.abs() <= z_max,
            gating: true,
        }
    }

    pub(crate) fn p_value(quantity: impl Into<String>, t: Option<f64>, statistic: f64, p: f64, min_p: f64) -> Self {
        Entry {
            quantity: quantity.into(),
            t,
            empirical: statistic,
            reference: 0.0,
            measure: Measure::PValue,
            value: p,
            threshold: Some(min_p),
            passed: p > min_p,
            gating: true,
        }
    }

    pub(crate) fn abs_error(quantity: impl Into<String>, t: Option<f64>, empirical: f64, reference: f64, max: f64) -> Self {
        let value = (empirical - reference).abs();
        Entry {
            quantity: quantity.into(),
            t,
            empirical,
            reference,
            measure: Measure::AbsError,
            value,
            threshold: Some(max),
            passed: value <= max,
            gating: true,
        }
    }

    pub(crate) fn rel_error(quantity: impl Into<String>, t: Option<f64>, empirical: f64, reference: f64, max: f64) -> Self {
        let value = (empirical / reference - 1.0).abs();
        Entry {
            quantity: quantity.into(),
            t,
            empirical,
            reference,
            measure: Measure::RelError,
            value,
            threshold: Some(max),
            passed: value <= max,
            gating: true,
        }
    }

    pub(crate) fn info(quantity: impl Into<String>, t: Option<f64>, empirical: f64, reference: f64) -> Self {
        Entry {
            quantity: quantity.into(),
            t,
            empirical,
            reference,
            measure: Measure::Info,
            value: empirical,
            threshold: None,
            passed: true,
            gating: false,
        }
    }

    pub(crate) fn verdict(quantity: impl Into<String>, measure: Measure, value: f64, threshold: f64, passed: bool) -> Self {
        Entry {
            quantity: quantity.into(),
            t: None,
            empirical: value,
            reference: threshold,
            measure,
            value,
            threshold: Some(threshold),
            passed,
            gating: true,
        }
    }

    /// Keeps the entry in the report but drops it from the verdict.
    pub(crate) fn informational(mut self) -> Self {
        self.gating = false;
        self
    }
}

/// Summary of one ensemble statistic.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StatSummary {
    pub quantity: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub t: Option<f64>,
    pub mean: f64,
    pub variance: f64,
    /// Empirical quantiles at 5%, 25%, 50%, 75% and 95%.
    pub quantiles: [f64; 5],
}

impl StatSummary {
    pub(crate) fn of(quantity: impl Into<String>, t: Option<f64>, data: &[f64]) -> Self {
        let s = summarize(data);
        let mut sorted = data.to_vec();
        sorted.sort_unstable_by(f64::total_cmp);
        let q = |p: f64| {
            let h = p * (sorted.len() - 1) as f64;
            let lo = h.floor() as usize;
            let hi = (lo + 1).min(sorted.len() - 1);
            sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
        };
        StatSummary {
            quantity: quantity.into(),
            t,
            mean: s.mean,
            variance: s.variance,
            quantiles: [q(0.05), q(0.25), q(0.5), q(0.75), q(0.95)],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RawColumn {
    pub n: f64,
    pub quantity: String,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScaleReport {
    pub n: f64,
    pub paths: u64,
    pub seed: u64,
    pub entries: Vec<Entry>,
    pub summaries: Vec<StatSummary>,
    pub passed: bool,
}

impl ScaleReport {
    pub(crate) fn new(n: f64, paths: u64, seed: u64, entries: Vec<Entry>, summaries: Vec<StatSummary>) -> Self {
        let passed = entries.iter().filter(|e| e.gating).all(|e| e.passed);
        ScaleReport {
            n,
            paths,
            seed,
            entries,
            summaries,
            passed,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct McReport {
    pub name: String,
    pub check: CheckKind,
    pub params: HawkesParams,
    pub master_seed: u64,
    pub version: String,
    pub scales: Vec<ScaleReport>,
    /// Verdicts that span scales.
    pub overall: Vec<Entry>,
    pub notes: Vec<String>,
    pub passed: bool,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub raw: Vec<RawColumn>,
}

impl McReport {
    pub(crate) fn new(name: &str, check: CheckKind, params: HawkesParams, master_seed: u64) -> Self {
        McReport {
            name: name.to_string(),
            check,
            params,
            master_seed,
            version: VERSION.to_string(),
            scales: Vec::new(),
            overall: Vec::new(),
            notes: Vec::new(),
            passed: false,
            raw: Vec::new(),
        }
    }

    pub(crate) fn finish(mut self) -> Self {
        self.passed = self.scales.iter().all(|s| s.passed) && self.overall.iter().filter(|e| e.gating).all(|e| e.passed);
        self
    }

    pub(crate) fn fail_with(mut self, note: String) -> Self {
        self.notes.push(note);
        self.passed = false;
        self
    }

    pub fn to_table(&self) -> String {
        let mut out = String::new();
        let verdict = if self.passed { "PASS" } else { "FAIL" };
        let _ = writeln!(out, "{} [{}] seed={} {}", self.name, self.check.name(), self.master_seed, verdict);
        let _ = writeln!(
            out,
            "  {:>10} {:<28} {:>8} {:>14} {:>14} {:>10} {:>12} {:>10} {}",
            "n", "quantity", "t", "empirical", "reference", "measure", "value", "threshold", "ok"
        );
        let rows = self.scales.iter().flat_map(|s| s.entries.iter().map(move |e| (Some(s.n), e)));
        for (n, e) in rows.chain(self.overall.iter().map(|e| (None, e))) {
            let _ = writeln!(
                out,
                "  {:>10} {:<28} {:>8} {:>14.6e} {:>14.6e} {:>10} {:>12.4e} {:>10} {}",
                n.map_or("all".to_string(), |n| format!("{n}")),
                e.quantity,
                e.t.map_or("-".to_string(), |t| format!("{t}")),
                e.empirical,
                e.reference,
                measure_name(e.measure),
                e.value,
                e.threshold.map_or("-".to_string(), |t| format!("{t}")),
                if !e.gating {
                    "info"
                } else if e.passed {
                    "yes"
                } else {
                    "NO"
                }
            );
        }
        for note in &self.notes {
            let _ = writeln!(out, "  note: {note}");
        }
        out
    }

    /// Raw statistics as CSV rows `n,quantity,index,value`.
    pub fn raw_csv(&self) -> String {
        let mut out = String::from("n,quantity,index,value\n");
        for col in &self.raw {
            for (i, v) in col.values.iter().enumerate() {
                let _ = writeln!(out, "{},{},{},{}", col.n, col.quantity, i, v);
            }
        }
        out
    }
}

fn measure_name(m: Measure) -> &'static str {
    match m {
        Measure::ZScore => "z",
        Measure::PValue => "p",
        Measure::AbsError => "abs_err",
        Measure::RelError => "rel_err",
        Measure::Correlation => "corr",
        Measure::Exponent => "exponent",
        Measure::Info => "info",
    }
}
