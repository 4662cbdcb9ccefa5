//! Convergence reports: per-order (or per-offset) Monte Carlo statistics.

use std::io::Write;

use serde::Serialize;

use super::conditions::ConditionReport;
use super::estimators::DiagnosticConfig;
use crate::error::Result;
use crate::stats::Estimate;

/// Shortest round-trip decimal, in scientific notation outside [1e-4, 1e6).
pub(crate) fn format_number(v: f64) -> String {
    let a = v.abs();
    if v == 0.0 || !v.is_finite() || (1e-4..1e6).contains(&a) {
        format!("{v}")
    } else {
        format!("{v:e}")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Mode {
    InProbability,
    QuadraticMean,
    AlmostSure,
    WeakContinuityProb,
    QMContinuity,
    ASContinuity,
}

impl Mode {
    /// Name of the row key: truncation order or offset.
    pub fn key_name(self) -> &'static str {
        match self {
            Mode::InProbability | Mode::QuadraticMean | Mode::AlmostSure => "n",
            _ => "h",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReportRow {
    /// Order n or offset h.
    pub key: f64,
    pub estimate: f64,
    pub std_error: f64,
    pub oracle: Option<f64>,
    pub verdict: Option<String>,
    /// Median, for the quantile-based modes.
    pub median: Option<Estimate>,
}

/// Comparison of the first and last rows.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Signal {
    pub first: f64,
    pub last: f64,
    /// (first − last) / √(se_first² + se_last²); infinite for an exact gap.
    pub gap_in_joint_se: f64,
    /// first / last
    pub shrink_factor: f64,
    /// Estimates never increase from one row to the next.
    pub monotone: bool,
}

impl Signal {
    pub fn from_rows(rows: &[ReportRow]) -> Option<Signal> {
        let (a, b) = (rows.first()?, rows.last()?);
        let joint = (a.std_error.powi(2) + b.std_error.powi(2)).sqrt();
        let gap = a.estimate - b.estimate;
        Some(Signal {
            first: a.estimate,
            last: b.estimate,
            gap_in_joint_se: if gap == 0.0 { 0.0 } else { gap / joint },
            shrink_factor: a.estimate / b.estimate,
            monotone: rows.windows(2).all(|w| w[1].estimate <= w[0].estimate),
        })
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ConvergenceReport {
    pub mode: Mode,
    pub key_name: &'static str,
    pub rows: Vec<ReportRow>,
    pub epsilon: Option<f64>,
    /// Display-only companion 0.9 ε.
    pub epsilon_prime: Option<f64>,
    /// Evaluation point for the continuity modes.
    pub x: Option<f64>,
    pub conditions: Vec<ConditionReport<f64>>,
    pub signal: Option<Signal>,
    pub notes: Vec<String>,
    pub config: DiagnosticConfig,
}

impl ConvergenceReport {
    pub fn conditions_satisfied(&self) -> bool {
        self.conditions.iter().all(|c| c.satisfied())
    }

    /// Header `n|h,estimate,stderr,oracle,verdict`, plus median columns when present.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let with_median = self.rows.iter().any(|r| r.median.is_some());
        let mut header = vec![self.key_name, "estimate", "stderr", "oracle", "verdict"];
        if with_median {
            header.extend(["median", "median_stderr"]);
        }
        w.write_record(&header)?;
        for r in &self.rows {
            let key = if self.key_name == "n" {
                format!("{}", r.key as u64)
            } else {
                format_number(r.key)
            };
            let mut rec = vec![
                key,
                format_number(r.estimate),
                format_number(r.std_error),
                r.oracle.map(format_number).unwrap_or_default(),
                r.verdict.clone().unwrap_or_default(),
            ];
            if with_median {
                let m = r.median.unwrap_or(Estimate {
                    estimate: f64::NAN,
                    std_error: f64::NAN,
                });
                rec.push(format_number(m.estimate));
                rec.push(format_number(m.std_error));
            }
            w.write_record(&rec)?;
        }
        w.flush()?;
        Ok(())
    }
}
