//! Experiment configurations, built-in presets and report files.
//!
//! A configuration is a flat TOML table. Reports embed the fully resolved
//! configuration in their provenance block, so a report can be fed back in
//! as a configuration and regenerates byte for byte.

use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::basis::{Domain, ExponentPair, JacobiIndex};
use crate::diagnostics::report::format_number;
use crate::diagnostics::{
    continuity_probe, default_intervals, estimate_almost_sure, estimate_in_probability,
    estimate_quadratic_mean, test_stable_dependence, test_wiener_independence, CoefficientSource,
    ContinuityMode, ConvergenceReport, CovarianceTest, DependenceReport, DiagnosticConfig,
    DEFAULT_CF_GRID, DEFAULT_EPSILON, DEFAULT_N_REF, DEFAULT_ORDERS, DEFAULT_REPLICAS, DEFAULT_Y,
    MIN_TAIL_WINDOW,
};
use crate::error::{Error, Result};
use crate::quadrature::{FunctionSpec, Side, UserTable};
use crate::stochastic::{replica_path, write_paths_csv, ProcessDescriptor, TimeGrid};

pub const SCHEMA_VERSION: u32 = 1;
pub const REPORT_JSON: &str = "report.json";
pub const REPORT_CSV: &str = "report.csv";
pub const PATHS_CSV: &str = "paths.csv";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentKind {
    InProbability,
    QuadraticMean,
    AlmostSure,
    WienerIndependence,
    StableDependence,
    Continuity,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProcessKind {
    Wiener,
    Stable,
}

fn one() -> f64 {
    1.0
}
fn two() -> f64 {
    2.0
}
fn default_alpha() -> f64 {
    1.5
}
fn default_function() -> String {
    "exp:1".to_string()
}
fn default_orders() -> Vec<usize> {
    DEFAULT_ORDERS.to_vec()
}
fn default_epsilon() -> f64 {
    DEFAULT_EPSILON
}
fn default_replicas() -> usize {
    DEFAULT_REPLICAS
}
fn default_n_ref() -> usize {
    DEFAULT_N_REF
}
fn default_x_grid() -> Vec<f64> {
    DEFAULT_CF_GRID.to_vec()
}

/// One experiment. `output` and `workers` steer the run but are not part of
/// the provenance echo.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub kind: ExperimentKind,
    pub process: ProcessKind,
    #[serde(default = "one")]
    pub beta: f64,
    #[serde(default = "default_alpha")]
    pub alpha: f64,
    #[serde(default = "one")]
    pub c: f64,
    #[serde(default)]
    pub gamma: f64,
    #[serde(default)]
    pub delta: f64,
    #[serde(default)]
    pub eta: f64,
    #[serde(default)]
    pub tau: f64,
    /// Coefficient source, e.g. `exp:1`, `monomial:2`, `geometric:0.5`.
    #[serde(default = "default_function")]
    pub function: String,
    #[serde(default = "two")]
    pub p: f64,
    #[serde(default = "default_orders")]
    pub orders: Vec<usize>,
    #[serde(default = "default_epsilon")]
    pub epsilon: f64,
    #[serde(default = "default_replicas")]
    pub replicas: usize,
    #[serde(default)]
    pub intervals: Option<usize>,
    #[serde(default = "default_n_ref")]
    pub n_ref: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub y: Option<f64>,
    #[serde(default)]
    pub x: Option<f64>,
    #[serde(default)]
    pub h: Vec<f64>,
    #[serde(default)]
    pub continuity_mode: Option<ContinuityMode>,
    #[serde(default)]
    pub n: Option<usize>,
    #[serde(default)]
    pub m: Option<usize>,
    #[serde(default = "default_x_grid")]
    pub x_grid: Vec<f64>,
    /// Number of sample paths to dump into paths.csv (0 for none).
    #[serde(default)]
    pub dump_paths: usize,
    #[serde(default, skip_serializing)]
    pub output: Option<PathBuf>,
    #[serde(default, skip_serializing)]
    pub workers: Option<usize>,
}

impl ExperimentConfig {
    pub fn from_table(table: toml::Table) -> Result<Self> {
        let cfg: ExperimentConfig = toml::Value::Table(table)
            .try_into()
            .map_err(|e: toml::de::Error| Error::Config(e.message().to_string()))?;
        Ok(cfg.resolved())
    }

    pub fn from_toml_str(text: &str) -> Result<Self> {
        Self::from_table(parse_table(text)?)
    }

    /// Fills the process-dependent defaults (grid size, evaluation point).
    pub fn resolved(mut self) -> Self {
        let domain = self.domain();
        let (a, b) = domain.bounds::<f64>();
        if self.intervals.is_none() {
            self.intervals = Some(match self.descriptor() {
                Ok(d) => default_intervals(&d),
                Err(_) => 1 << 12,
            });
        }
        if self.y.is_none() {
            self.y = Some(a + DEFAULT_Y * (b - a));
        }
        if self.kind == ExperimentKind::Continuity && self.x.is_none() {
            self.x = self.y;
        }
        self
    }

    pub fn domain(&self) -> Domain {
        match self.process {
            ProcessKind::Wiener => Domain::Shifted,
            ProcessKind::Stable => Domain::Standard,
        }
    }

    pub fn descriptor(&self) -> Result<ProcessDescriptor> {
        match self.process {
            ProcessKind::Wiener => ProcessDescriptor::wiener(self.beta),
            ProcessKind::Stable => ProcessDescriptor::stable(self.alpha, self.c),
        }
    }

    fn index(&self) -> Result<JacobiIndex<f64>> {
        JacobiIndex::new(self.gamma, self.delta)
    }

    fn exponents(&self) -> Result<ExponentPair<f64>> {
        ExponentPair::new(self.eta, self.tau)
    }

    fn intervals(&self) -> usize {
        self.intervals.unwrap_or(1 << 12)
    }

    fn diagnostic(&self) -> Result<DiagnosticConfig> {
        let process = self.descriptor()?;
        let index = self.index()?;
        let source = parse_source(&self.function, &index)?;
        let mut d = DiagnosticConfig::new(process, index, self.exponents()?, source);
        d.p = self.p;
        d.orders = self.orders.clone();
        d.epsilon = self.epsilon;
        d.replicas = self.replicas;
        d.intervals = self.intervals();
        d.n_ref = self.n_ref;
        d.seed = self.seed;
        if let Some(y) = self.y {
            d.y = y;
        }
        Ok(d)
    }

    fn require(&self, process: ProcessKind) -> Result<()> {
        if self.process != process {
            return Err(Error::invalid(
                "process",
                format!("{:?} experiments need process = {:?}", self.kind, process).to_lowercase(),
            ));
        }
        Ok(())
    }

    /// Validates every precondition of the target operation and returns the
    /// ready-to-run plan. Nothing is sampled here.
    pub fn plan(&self) -> Result<Plan> {
        if self.workers == Some(0) {
            return Err(Error::invalid("workers", "must be at least 1"));
        }
        let intervals = self.intervals();
        if intervals == 0 {
            return Err(Error::invalid("intervals", "need at least one interval"));
        }
        match self.kind {
            ExperimentKind::InProbability
            | ExperimentKind::QuadraticMean
            | ExperimentKind::AlmostSure => {
                if self.kind != ExperimentKind::InProbability {
                    self.require(ProcessKind::Wiener)?;
                }
                let d = self.diagnostic()?;
                d.validate()?;
                if self.kind == ExperimentKind::AlmostSure && d.n_ref < MIN_TAIL_WINDOW {
                    return Err(Error::invalid(
                        "n_ref",
                        format!("almost-sure runs need n_ref >= {}", MIN_TAIL_WINDOW),
                    ));
                }
                Ok(Plan::Convergence(self.kind, d))
            }
            ExperimentKind::Continuity => {
                let mode = self.continuity_mode.ok_or_else(|| {
                    Error::invalid("continuity_mode", "required: weak_prob, qm or as")
                })?;
                if mode != ContinuityMode::WeakProb {
                    self.require(ProcessKind::Wiener)?;
                }
                let d = self.diagnostic()?;
                d.validate_common()?;
                let x = self.x.ok_or_else(|| Error::invalid("x", "required"))?;
                if self.h.is_empty()
                    || self.h.iter().any(|h| !(*h > 0.0))
                    || self.h.windows(2).any(|w| w[1] >= w[0])
                {
                    return Err(Error::invalid(
                        "h",
                        "offsets must be positive and strictly decreasing",
                    ));
                }
                for p in std::iter::once(x).chain(self.h.iter().map(|h| x + h)) {
                    if !d.domain().contains(p) {
                        return Err(Error::invalid(
                            "x",
                            format!("x + h = {p} leaves the domain"),
                        ));
                    }
                }
                Ok(Plan::Continuity {
                    mode,
                    config: d,
                    x,
                    h: self.h.clone(),
                })
            }
            ExperimentKind::WienerIndependence | ExperimentKind::StableDependence => {
                let n = self.n.ok_or_else(|| Error::invalid("n", "required"))?;
                let m = self.m.ok_or_else(|| Error::invalid("m", "required"))?;
                if n == m {
                    return Err(Error::invalid("m", "must differ from n"));
                }
                if self.replicas < 2 {
                    return Err(Error::invalid("replicas", "need at least 2 replicas"));
                }
                self.descriptor()?;
                let index = self.index()?;
                let exponents = self.exponents()?;
                if self.kind == ExperimentKind::WienerIndependence {
                    self.require(ProcessKind::Wiener)?;
                    Ok(Plan::Independence {
                        n,
                        m,
                        index,
                        exponents,
                        beta: self.beta,
                    })
                } else {
                    self.require(ProcessKind::Stable)?;
                    if self.x_grid.is_empty() || self.x_grid.iter().any(|x| !x.is_finite()) {
                        return Err(Error::invalid("x_grid", "need finite frequencies"));
                    }
                    Ok(Plan::Dependence {
                        n,
                        m,
                        index,
                        exponents,
                        alpha: self.alpha,
                        c: self.c,
                    })
                }
            }
        }
    }
}

/// A validated experiment.
#[derive(Debug, Clone)]
pub enum Plan {
    Convergence(ExperimentKind, DiagnosticConfig),
    Continuity {
        mode: ContinuityMode,
        config: DiagnosticConfig,
        x: f64,
        h: Vec<f64>,
    },
    Independence {
        n: usize,
        m: usize,
        index: JacobiIndex<f64>,
        exponents: ExponentPair<f64>,
        beta: f64,
    },
    Dependence {
        n: usize,
        m: usize,
        index: JacobiIndex<f64>,
        exponents: ExponentPair<f64>,
        alpha: f64,
        c: f64,
    },
}

fn parse_number(field: &'static str, s: &str) -> Result<f64> {
    s.trim()
        .parse::<f64>()
        .map_err(|_| Error::invalid(field, format!("'{s}' is not a number")))
}

/// Parses a coefficient source:
///
/// `constant:c`, `monomial:k`, `singular:left|right:s`, `step:p`, `basis:n`,
/// `exp:r`, `table:path.csv`, `geometric:r`, `power:s`.
pub fn parse_source(text: &str, index: &JacobiIndex<f64>) -> Result<CoefficientSource> {
    let (head, rest) = text.split_once(':').unwrap_or((text, ""));
    let f =
        match head {
            "constant" => FunctionSpec::constant(parse_number("function", rest)?),
            "monomial" => FunctionSpec::monomial(rest.trim().parse().map_err(|_| {
                Error::invalid("function", format!("bad monomial degree '{rest}'"))
            })?),
            "singular" => {
                let (side, s) = rest.split_once(':').ok_or_else(|| {
                    Error::invalid("function", "use singular:left:s or singular:right:s")
                })?;
                let side = match side {
                    "left" => Side::Left,
                    "right" => Side::Right,
                    other => {
                        return Err(Error::invalid(
                            "function",
                            format!("unknown side '{other}'"),
                        ))
                    }
                };
                FunctionSpec::singular(side, parse_number("function", s)?)
                    .map_err(|e| Error::invalid("function", e.to_string()))?
            }
            "step" => FunctionSpec::step(parse_number("function", rest)?),
            "basis" => FunctionSpec::basis_element(
                rest.trim().parse().map_err(|_| {
                    Error::invalid("function", format!("bad basis degree '{rest}'"))
                })?,
                *index,
            ),
            "exp" => FunctionSpec::exponential(parse_number("function", rest)?),
            "table" => {
                let file = fs::File::open(rest).map_err(|e| {
                    Error::invalid("function", format!("cannot open table '{rest}': {e}"))
                })?;
                FunctionSpec::table(UserTable::from_csv(file)?, text)
            }
            "geometric" => {
                return Ok(CoefficientSource::Geometric {
                    ratio: parse_number("function", rest)?,
                })
            }
            "power" => {
                return Ok(CoefficientSource::Power {
                    exponent: parse_number("function", rest)?,
                })
            }
            other => {
                return Err(Error::invalid(
                    "function",
                    format!("unknown function kind '{other}'"),
                ))
            }
        };
    Ok(CoefficientSource::Function(f))
}

pub fn parse_table(text: &str) -> Result<toml::Table> {
    text.parse::<toml::Table>()
        .map_err(|e| Error::Config(e.message().to_string()))
}

/// Loads a configuration table from TOML, or from the provenance block of a
/// JSON report.
pub fn load_config_table(path: &Path) -> Result<toml::Table> {
    let text = fs::read_to_string(path)
        .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
    if path.extension().is_some_and(|e| e == "json") {
        let v: serde_json::Value = serde_json::from_str(&text)?;
        let cfg = v.pointer("/provenance/config").ok_or_else(|| {
            Error::Config(format!("{} has no provenance.config block", path.display()))
        })?;
        json_to_table(cfg)
    } else {
        parse_table(&text)
    }
}

fn json_to_table(v: &serde_json::Value) -> Result<toml::Table> {
    let obj = v
        .as_object()
        .ok_or_else(|| Error::Config("provenance.config is not an object".into()))?;
    let mut table = toml::Table::new();
    for (k, v) in obj {
        if v.is_null() {
            continue;
        }
        let tv = toml::Value::try_from(v).map_err(|e| Error::Config(e.to_string()))?;
        table.insert(k.clone(), tv);
    }
    Ok(table)
}

/// Applies a `key=value` override. The value is read as a TOML value, and as
/// a bare string if that fails.
pub fn apply_override(table: &mut toml::Table, assignment: &str) -> Result<()> {
    let (key, value) = assignment
        .split_once('=')
        .ok_or_else(|| Error::Config(format!("override '{assignment}' is not key=value")))?;
    let key = key.trim();
    if key.is_empty() {
        return Err(Error::Config(format!(
            "override '{assignment}' has an empty key"
        )));
    }
    let value = value.trim();
    let parsed = format!("v = {value}")
        .parse::<toml::Table>()
        .ok()
        .and_then(|mut t| t.remove("v"))
        .unwrap_or_else(|| toml::Value::String(value.to_string()));
    table.insert(key.to_string(), parsed);
    Ok(())
}

#[derive(Debug, Clone, Serialize)]
pub struct Provenance {
    pub library: &'static str,
    pub version: &'static str,
    pub seed: u64,
    pub config: ExperimentConfig,
}

#[derive(Debug, Clone, Serialize)]
#[serde(untagged)]
pub enum ExperimentResult {
    Convergence(Box<ConvergenceReport>),
    Covariance(CovarianceTest),
    Dependence(DependenceReport),
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub schema_version: u32,
    pub kind: ExperimentKind,
    pub provenance: Provenance,
    pub result: ExperimentResult,
}

/// Rendered report files.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReportFiles {
    pub json: String,
    pub csv: String,
    pub paths_csv: Option<String>,
}

/// Runs a configuration on the current rayon pool.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ReportFiles> {
    let plan = cfg.plan()?;
    let intervals = cfg.intervals();
    let result = match &plan {
        Plan::Convergence(kind, d) => ExperimentResult::Convergence(Box::new(match kind {
            ExperimentKind::InProbability => estimate_in_probability(d)?,
            ExperimentKind::QuadraticMean => estimate_quadratic_mean(d)?,
            _ => estimate_almost_sure(d)?,
        })),
        Plan::Continuity { mode, config, x, h } => {
            ExperimentResult::Convergence(Box::new(continuity_probe(*mode, config, *x, h)?))
        }
        Plan::Independence {
            n,
            m,
            index,
            exponents,
            beta,
        } => ExperimentResult::Covariance(test_wiener_independence(
            *n,
            *m,
            index,
            exponents,
            *beta,
            cfg.replicas,
            intervals,
            cfg.seed,
        )?),
        Plan::Dependence {
            n,
            m,
            index,
            exponents,
            alpha,
            c,
        } => ExperimentResult::Dependence(test_stable_dependence(
            *n,
            *m,
            index,
            exponents,
            *alpha,
            *c,
            cfg.replicas,
            intervals,
            &cfg.x_grid,
            cfg.seed,
        )?),
    };
    let csv = render_csv(&result)?;
    let report = Report {
        schema_version: SCHEMA_VERSION,
        kind: cfg.kind,
        provenance: Provenance {
            library: env!("CARGO_PKG_NAME"),
            version: env!("CARGO_PKG_VERSION"),
            seed: cfg.seed,
            config: cfg.clone(),
        },
        result,
    };
    let mut json = serde_json::to_string_pretty(&report)?;
    json.push('\n');
    let paths_csv = if cfg.dump_paths > 0 {
        let d = cfg.descriptor()?;
        let grid = Arc::new(TimeGrid::for_domain(cfg.domain(), intervals)?);
        let paths = (0..cfg.dump_paths as u64)
            .map(|r| replica_path(&d, &grid, cfg.seed, r))
            .collect::<Result<Vec<_>>>()?;
        let mut buf = Vec::new();
        write_paths_csv(&paths, &mut buf)?;
        Some(String::from_utf8(buf).expect("csv output is utf-8"))
    } else {
        None
    };
    Ok(ReportFiles {
        json,
        csv,
        paths_csv,
    })
}

/// Runs a configuration on a dedicated pool of `workers` threads (available
/// parallelism when `None`). The output does not depend on the pool size.
pub fn run_with_workers(cfg: &ExperimentConfig, workers: Option<usize>) -> Result<ReportFiles> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.unwrap_or(0))
        .build()
        .map_err(|e| Error::Config(e.to_string()))?;
    pool.install(|| run_experiment(cfg))
}

fn render_csv(result: &ExperimentResult) -> Result<String> {
    let mut buf = Vec::new();
    match result {
        ExperimentResult::Convergence(r) => r.write_csv(&mut buf)?,
        ExperimentResult::Covariance(t) => {
            let mut w = csv::Writer::from_writer(&mut buf);
            w.write_record(["n", "m", "estimate", "stderr", "oracle", "verdict"])?;
            w.write_record([
                t.n.to_string(),
                t.m.to_string(),
                format_number(t.empirical.estimate),
                format_number(t.empirical.std_error),
                format_number(t.analytic),
                if t.agrees { "agree" } else { "disagree" }.to_string(),
            ])?;
            w.flush()?;
        }
        ExperimentResult::Dependence(d) => {
            let mut w = csv::Writer::from_writer(&mut buf);
            w.write_record([
                "x",
                "empirical_cf",
                "empirical_cf_imag",
                "sum_cf",
                "product_cf",
                "theoretical_gap",
                "empirical_gap",
                "verdict",
            ])?;
            for r in &d.rows {
                w.write_record([
                    format_number(r.x),
                    format_number(r.empirical_cf),
                    format_number(r.empirical_cf_imag),
                    format_number(r.sum_cf),
                    format_number(r.product_cf),
                    format_number(r.theoretical_gap),
                    format_number(r.empirical_gap),
                    if r.agrees { "agree" } else { "disagree" }.to_string(),
                ])?;
            }
            w.flush()?;
        }
    }
    Ok(String::from_utf8(buf).expect("csv output is utf-8"))
}

/// Writes the report files into `dir`. On failure every file written by this
/// call is removed again.
pub fn write_report(dir: &Path, files: &ReportFiles) -> Result<Vec<PathBuf>> {
    let mut written = Vec::new();
    let outcome = (|| -> Result<()> {
        fs::create_dir_all(dir)?;
        let mut put = |name: &str, text: &str| -> Result<()> {
            let path = dir.join(name);
            written.push(path.clone());
            fs::write(&path, text)?;
            Ok(())
        };
        put(REPORT_JSON, &files.json)?;
        put(REPORT_CSV, &files.csv)?;
        if let Some(p) = &files.paths_csv {
            put(PATHS_CSV, p)?;
        }
        Ok(())
    })();
    match outcome {
        Ok(()) => Ok(written),
        Err(e) => {
            for p in &written {
                let _ = fs::remove_file(p);
            }
            Err(e)
        }
    }
}

/// A built-in configuration, one per summarized result.
#[derive(Debug, Clone, Copy)]
pub struct Preset {
    pub name: &'static str,
    pub summary: &'static str,
    pub toml: &'static str,
}

impl Preset {
    pub fn table(&self) -> toml::Table {
        parse_table(self.toml).expect("built-in presets parse")
    }
}

pub const PRESETS: [Preset; 7] = [
    Preset {
        name: "remark-a-cauchy-in-probability",
        summary: "Cauchy-driven series (alpha = 1) with gamma >= eta, delta >= tau: convergence in probability",
        toml: r#"
kind = "in_probability"
process = "stable"
alpha = 1.0
c = 1.0
gamma = 1.0
delta = 1.0
function = "exp:1"
"#,
    },
    Preset {
        name: "remark-b-stable-in-probability",
        summary: "1.5-stable series under the p-dependent weight inequalities: convergence in probability",
        toml: r#"
kind = "in_probability"
process = "stable"
alpha = 1.5
c = 1.0
p = 2.0
function = "exp:1"
"#,
    },
    Preset {
        name: "remark-c-stable-weak-continuity",
        summary: "stable sum function: weak continuity in probability",
        toml: r#"
kind = "continuity"
continuity_mode = "weak_prob"
process = "stable"
alpha = 1.5
function = "exp:1"
epsilon = 0.05
replicas = 10000
intervals = 1024
x = 0.2
h = [0.4, 0.2, 0.1, 0.05, 0.025]
"#,
    },
    Preset {
        name: "remark-d-wiener-quadratic-mean",
        summary: "Wiener-driven series: convergence in quadratic mean against the isometry oracle",
        toml: r#"
kind = "quadratic_mean"
process = "wiener"
beta = 1.0
function = "exp:1"
"#,
    },
    Preset {
        name: "remark-e-wiener-qm-continuity",
        summary: "Wiener sum function: continuity in quadratic mean",
        toml: r#"
kind = "continuity"
continuity_mode = "qm"
process = "wiener"
function = "exp:1"
x = 0.3
h = [0.2, 0.1, 0.05, 0.025, 0.0125]
"#,
    },
    Preset {
        name: "remark-f-wiener-almost-sure",
        summary: "Wiener series with summable coefficients: almost-sure convergence of the tail sup",
        toml: r#"
kind = "almost_sure"
process = "wiener"
function = "geometric:0.5"
orders = [4, 8, 16]
n_ref = 64
"#,
    },
    Preset {
        name: "remark-g-wiener-as-continuity",
        summary: "Wiener sum function with absolutely summable weighted coefficients: almost-sure continuity",
        toml: r#"
kind = "continuity"
continuity_mode = "as"
process = "wiener"
function = "geometric:0.5"
n_ref = 64
x = 0.3
h = [0.2, 0.1, 0.05, 0.025, 0.0125]
"#,
    },
];

pub fn preset(name: &str) -> Option<&'static Preset> {
    PRESETS.iter().find(|p| p.name == name)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(text: &str) -> ExperimentConfig {
        let mut t = parse_table(text).unwrap();
        apply_override(&mut t, "replicas=64").unwrap();
        apply_override(&mut t, "intervals=128").unwrap();
        ExperimentConfig::from_table(t).unwrap()
    }

    #[test]
    fn every_preset_plans() {
        assert_eq!(PRESETS.len(), 7);
        for p in &PRESETS {
            let cfg = ExperimentConfig::from_table(p.table()).unwrap();
            cfg.plan().unwrap_or_else(|e| panic!("{}: {e}", p.name));
        }
        assert!(preset("remark-b-stable-in-probability").is_some());
        assert!(preset("remark-f-wiener-almost-sure").is_some());
    }

    #[test]
    fn overrides_are_typed() {
        let mut t = toml::Table::new();
        apply_override(&mut t, "eta=0.25").unwrap();
        apply_override(&mut t, "orders=[1,2]").unwrap();
        apply_override(&mut t, "function=exp:2").unwrap();
        assert_eq!(t["eta"].as_float(), Some(0.25));
        assert_eq!(t["orders"].as_array().unwrap().len(), 2);
        assert_eq!(t["function"].as_str(), Some("exp:2"));
        assert!(apply_override(&mut t, "novalue").is_err());
    }

    #[test]
    fn negative_eta_names_the_field() {
        let cfg = small("kind = \"quadratic_mean\"\nprocess = \"wiener\"\neta = -0.5\n");
        match cfg.plan() {
            Err(Error::InvalidParameter { name, .. }) => assert_eq!(name, "eta"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let t =
            parse_table("kind = \"quadratic_mean\"\nprocess = \"wiener\"\nbogus = 1\n").unwrap();
        assert!(matches!(
            ExperimentConfig::from_table(t),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn sources_parse() {
        let idx = JacobiIndex::new(0.0, 0.0).unwrap();
        for s in [
            "constant:2",
            "monomial:3",
            "singular:right:-0.3",
            "step:0.5",
            "basis:2",
            "exp:1",
            "geometric:0.5",
            "power:0.4",
        ] {
            let src = parse_source(s, &idx).unwrap();
            assert!(!src.id().is_empty());
        }
        for s in [
            "monomial:x",
            "singular:up:-0.3",
            "singular:left:0.5",
            "wave:1",
        ] {
            assert!(parse_source(s, &idx).is_err(), "{s}");
        }
    }

    #[test]
    fn report_replays_from_provenance() {
        let cfg = small(preset("remark-d-wiener-quadratic-mean").unwrap().toml);
        let files = run_experiment(&cfg).unwrap();
        let v: serde_json::Value = serde_json::from_str(&files.json).unwrap();
        assert_eq!(v["schema_version"], 1);
        let table = json_to_table(v.pointer("/provenance/config").unwrap()).unwrap();
        let again = run_experiment(&ExperimentConfig::from_table(table).unwrap()).unwrap();
        assert_eq!(files, again);
        assert_eq!(files.csv.lines().count(), 1 + 5);
    }

    #[test]
    fn write_report_creates_files() {
        let dir = tempfile::tempdir().unwrap();
        let files = ReportFiles {
            json: "{}\n".into(),
            csv: "n\n".into(),
            paths_csv: Some("replica\n".into()),
        };
        let written = write_report(dir.path(), &files).unwrap();
        assert_eq!(written.len(), 3);
        assert!(dir.path().join(PATHS_CSV).exists());
    }
}
