//! Monte Carlo estimators for the convergence modes, the coefficient
//! dependence structure and the continuity of the sum function.
//!
//! Every estimator works on the kernel form: the quantity of interest is a
//! stochastic integral of a deterministic integrand tabulated once on the
//! grid, so each replica costs one path and one dot product per row.

use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize, Serializer};

use super::conditions::{
    check_coefficient_summability, check_stable_conditions, check_wiener_conditions, ConditionId,
    ConditionReport,
};
use super::report::{ConvergenceReport, Mode, ReportRow, Signal};
use crate::basis::{BasisSpec, Domain, ExponentPair, JacobiIndex};
use crate::error::{Error, Result};
use crate::integrate::{
    kernel_difference_integrand, kernel_integrand, map_replicas, sample_random_coefficients,
    CoefficientKind, GridIntegrand,
};
use crate::quadrature::{gauss_jacobi_rule, CoefficientVector, FunctionSpec};
use crate::stats::{covariance, exceedance, quantile_estimate, second_moment, Estimate};
use crate::stochastic::{
    empirical_cf, replica_path, stable_integral_cf, ProcessDescriptor, TimeGrid,
};

pub const DEFAULT_EPSILON: f64 = 0.1;
pub const DEFAULT_REPLICAS: usize = 20_000;
pub const DEFAULT_ORDERS: [usize; 5] = [2, 4, 8, 16, 32];
pub const DEFAULT_N_REF: usize = 128;
pub const DEFAULT_Y: f64 = 0.3;
pub const DEFAULT_CF_GRID: [f64; 5] = [0.25, 0.5, 1.0, 2.0, 4.0];
/// Agreement gate between Monte Carlo and oracle values, in standard errors.
pub const AGREEMENT_SE: f64 = 4.0;
/// ε′ = EPSILON_PRIME_FACTOR · ε, reported for display only.
pub const EPSILON_PRIME_FACTOR: f64 = 0.9;
/// Smallest N_max accepted by the almost-sure estimator.
pub const MIN_TAIL_WINDOW: usize = 64;

/// 2¹⁴ grid intervals for the Cauchy case, 2¹² otherwise.
pub fn default_intervals(process: &ProcessDescriptor) -> usize {
    if process.alpha() == 1.0 {
        1 << 14
    } else {
        1 << 12
    }
}

/// Deterministic coefficients a_n / b_n: from a function, or a synthetic sequence.
#[derive(Debug, Clone)]
pub enum CoefficientSource {
    Function(FunctionSpec<f64>),
    /// b_n = ratio^n
    Geometric {
        ratio: f64,
    },
    /// b_0 = 1, b_n = n^{−exponent}
    Power {
        exponent: f64,
    },
}

impl CoefficientSource {
    pub fn id(&self) -> String {
        match self {
            CoefficientSource::Function(f) => f.id.clone(),
            CoefficientSource::Geometric { ratio } => format!("geometric:{ratio}"),
            CoefficientSource::Power { exponent } => format!("power:{exponent}"),
        }
    }

    pub fn coefficients(&self, basis: BasisSpec<f64>) -> Result<CoefficientVector<f64>> {
        let n = basis.max_degree;
        match self {
            CoefficientSource::Function(f) => CoefficientVector::from_function(f, basis),
            CoefficientSource::Geometric { ratio } => CoefficientVector::from_values(
                (0..=n).map(|k| ratio.powi(k as i32)).collect(),
                basis,
                self.id(),
            ),
            CoefficientSource::Power { exponent } => CoefficientVector::from_values(
                (0..=n)
                    .map(|k| {
                        if k == 0 {
                            1.0
                        } else {
                            (k as f64).powf(-exponent)
                        }
                    })
                    .collect(),
                basis,
                self.id(),
            ),
        }
    }
}

impl Serialize for CoefficientSource {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.id())
    }
}

/// Everything a convergence or continuity estimator needs.
#[derive(Debug, Clone, Serialize)]
pub struct DiagnosticConfig {
    pub process: ProcessDescriptor,
    pub index: JacobiIndex<f64>,
    pub exponents: ExponentPair<f64>,
    pub source: CoefficientSource,
    /// L^p exponent for the stable conditions.
    pub p: f64,
    pub orders: Vec<usize>,
    pub epsilon: f64,
    pub replicas: usize,
    pub intervals: usize,
    pub n_ref: usize,
    pub seed: u64,
    /// Evaluation point of the series.
    pub y: f64,
}

impl DiagnosticConfig {
    /// Defaults: p = 2, orders {2, 4, 8, 16, 32}, ε = 0.1, M = 2·10⁴,
    /// N_ref = 128, seed 0, y at 0.3 of the way across the domain.
    pub fn new(
        process: ProcessDescriptor,
        index: JacobiIndex<f64>,
        exponents: ExponentPair<f64>,
        source: CoefficientSource,
    ) -> Self {
        let (a, b) = process.natural_domain().bounds::<f64>();
        DiagnosticConfig {
            intervals: default_intervals(&process),
            process,
            index,
            exponents,
            source,
            p: 2.0,
            orders: DEFAULT_ORDERS.to_vec(),
            epsilon: DEFAULT_EPSILON,
            replicas: DEFAULT_REPLICAS,
            n_ref: DEFAULT_N_REF,
            seed: 0,
            y: a + DEFAULT_Y * (b - a),
        }
    }

    pub fn domain(&self) -> Domain {
        self.process.natural_domain()
    }

    /// Checks every precondition of the order-based estimators.
    pub fn validate(&self) -> Result<()> {
        self.validate_common()?;
        if self.orders.is_empty() {
            return Err(Error::invalid("orders", "need at least one order"));
        }
        if self.orders.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::invalid(
                "orders",
                "orders must be strictly increasing",
            ));
        }
        let largest = *self.orders.last().expect("non-empty");
        if self.n_ref < 4 * largest {
            return Err(Error::invalid(
                "n_ref",
                format!(
                    "must be at least 4 x the largest order ({largest}), got {}",
                    self.n_ref
                ),
            ));
        }
        Ok(())
    }

    /// Checks the preconditions that do not involve the study orders.
    pub fn validate_common(&self) -> Result<()> {
        self.process.validate()?;
        self.index.validate()?;
        self.exponents.validate()?;
        match self.source {
            CoefficientSource::Geometric { ratio } if !ratio.is_finite() => {
                return Err(Error::invalid("ratio", "must be finite"))
            }
            CoefficientSource::Power { exponent } if !exponent.is_finite() => {
                return Err(Error::invalid("exponent", "must be finite"))
            }
            _ => {}
        }
        if !(self.p >= 1.0) || !self.p.is_finite() {
            return Err(Error::invalid(
                "p",
                format!("must be a finite number >= 1, got {}", self.p),
            ));
        }
        if !(self.epsilon > 0.0) {
            return Err(Error::invalid(
                "epsilon",
                format!("must be positive, got {}", self.epsilon),
            ));
        }
        if self.replicas < 2 {
            return Err(Error::invalid("replicas", "need at least 2 replicas"));
        }
        if self.intervals == 0 {
            return Err(Error::invalid("intervals", "need at least one interval"));
        }
        if !self.domain().contains(self.y) {
            return Err(Error::invalid(
                "y",
                format!("{} lies outside the {:?} domain", self.y, self.domain()),
            ));
        }
        Ok(())
    }

    pub fn basis(&self, max_degree: usize) -> Result<BasisSpec<f64>> {
        BasisSpec::new(self.index, self.domain(), max_degree)
    }

    pub fn coefficients(&self) -> Result<CoefficientVector<f64>> {
        self.source.coefficients(self.basis(self.n_ref)?)
    }

    pub fn grid(&self) -> Result<Arc<TimeGrid>> {
        Ok(Arc::new(TimeGrid::for_domain(
            self.domain(),
            self.intervals,
        )?))
    }

    /// The weight conditions of the configured process.
    pub fn process_conditions(&self) -> ConditionReport<f64> {
        match self.process {
            ProcessDescriptor::Wiener { .. } => {
                check_wiener_conditions(&self.index, &self.exponents)
            }
            ProcessDescriptor::StableSymmetric { alpha, .. } => {
                check_stable_conditions(&self.index, &self.exponents, self.p, alpha)
            }
        }
    }

    fn require_wiener(&self) -> Result<f64> {
        match self.process {
            ProcessDescriptor::Wiener { beta } => Ok(beta),
            other => Err(Error::DescriptorMismatch {
                expected: "wiener",
                found: other.name().to_string(),
            }),
        }
    }
}

/// ∫ |Σ_k c_k φ_k(t)|^q w^{(qη,qτ)}(t) dt over the basis domain, by Gauss–Jacobi
/// quadrature. Exact up to rounding for q = 2.
pub fn weighted_power_integral(
    basis: &BasisSpec<f64>,
    c: &[f64],
    exp: &ExponentPair<f64>,
    q: f64,
) -> Result<f64> {
    let degree = c.iter().rposition(|v| *v != 0.0).unwrap_or(0);
    let k = if q == 2.0 {
        degree + 2
    } else {
        (4 * (degree + 1)).max(64)
    };
    let rule = gauss_jacobi_rule(k, (q * exp.eta, q * exp.tau), basis.domain)?;
    let spec = BasisSpec::new(basis.index, basis.domain, degree)?;
    let ev = spec.evaluator();
    let mut buf = Vec::new();
    let mut acc = 0.0;
    for (&t, &w) in rule.nodes().iter().zip(rule.weights()) {
        ev.eval_all_into(t, &mut buf)?;
        let s: f64 = c[..=degree].iter().zip(&buf).map(|(ck, pk)| ck * pk).sum();
        acc += w * s.abs().powf(q);
    }
    Ok(acc)
}

/// a_k φ_k(y) for k in `lo..=hi`, zero elsewhere.
fn tail_weights(coeffs: &CoefficientVector<f64>, y: f64, lo: usize, hi: usize) -> Result<Vec<f64>> {
    let phi = coeffs.basis.evaluator().eval_all(y)?;
    Ok((0..=hi)
        .map(|k| {
            if k >= lo {
                coeffs.values[k] * phi[k]
            } else {
                0.0
            }
        })
        .collect())
}

/// Law-specific size of ∫ g dX for g = Σ c_k φ_k · w: β²∫g² for Wiener,
/// c∫|g|^α for the stable process.
fn integral_oracle(
    process: &ProcessDescriptor,
    basis: &BasisSpec<f64>,
    c: &[f64],
    exp: &ExponentPair<f64>,
) -> Result<f64> {
    if c.iter().all(|v| *v == 0.0) {
        return Ok(0.0);
    }
    match *process {
        ProcessDescriptor::Wiener { beta } => {
            Ok(beta * beta * weighted_power_integral(basis, c, exp, 2.0)?)
        }
        ProcessDescriptor::StableSymmetric { alpha, c: scale } => {
            Ok(scale * weighted_power_integral(basis, c, exp, alpha)?)
        }
    }
}

/// β²∫|(s_{N_ref} − s_n)(y, t) σ^{(η,τ)}(t)|² dt (Wiener) or the matching
/// stable dispersion, for the configured coefficients.
pub fn tail_oracle(
    cfg: &DiagnosticConfig,
    coeffs: &CoefficientVector<f64>,
    n: usize,
) -> Result<f64> {
    let c = tail_weights(coeffs, cfg.y, n + 1, cfg.n_ref)?;
    integral_oracle(&cfg.process, &coeffs.basis, &c, &cfg.exponents)
}

/// Integrals of each integrand against the same replica paths (integrand × replica).
fn replica_integrals(
    cfg: &DiagnosticConfig,
    grid: &Arc<TimeGrid>,
    integrands: &[GridIntegrand],
) -> Result<Vec<Vec<f64>>> {
    let per_replica = map_replicas(cfg.replicas, |r| {
        let path = replica_path(&cfg.process, grid, cfg.seed, r)?;
        integrands
            .iter()
            .map(|g| g.integrate(&path))
            .collect::<Result<Vec<f64>>>()
    })?;
    Ok(transpose(&per_replica, integrands.len()))
}

fn transpose(rows: &[Vec<f64>], width: usize) -> Vec<Vec<f64>> {
    (0..width)
        .map(|j| rows.iter().map(|row| row[j]).collect())
        .collect()
}

/// reference − S_n per replica for each configured order (order × replica).
pub fn tail_errors(
    cfg: &DiagnosticConfig,
    coeffs: &CoefficientVector<f64>,
) -> Result<Vec<Vec<f64>>> {
    let grid = cfg.grid()?;
    let integrands = cfg
        .orders
        .iter()
        .map(|&n| kernel_integrand(coeffs, cfg.y, &cfg.exponents, &grid, n + 1..=cfg.n_ref))
        .collect::<Result<Vec<_>>>()?;
    replica_integrals(cfg, &grid, &integrands)
}

const REFERENCE_NOTE: &str =
    "limit integral approximated by the kernel partial sum of order n_ref; f(y,t) is read as the weighted L^p limit of s_n(f,y,t)";

fn abs_all(xs: &[f64]) -> Vec<f64> {
    xs.iter().map(|x| x.abs()).collect()
}

fn agreement(e: &Estimate, oracle: f64) -> String {
    if e.within(oracle, AGREEMENT_SE) {
        "agree".to_string()
    } else {
        "disagree".to_string()
    }
}

fn finish(
    mode: Mode,
    rows: Vec<ReportRow>,
    epsilon: Option<f64>,
    x: Option<f64>,
    conditions: Vec<ConditionReport<f64>>,
    notes: Vec<String>,
    cfg: &DiagnosticConfig,
) -> Result<ConvergenceReport> {
    for r in &rows {
        if !r.estimate.is_finite() {
            return Err(Error::NonFinite { at: r.key });
        }
    }
    Ok(ConvergenceReport {
        mode,
        key_name: mode.key_name(),
        signal: Signal::from_rows(&rows),
        rows,
        epsilon,
        epsilon_prime: epsilon.map(|e| EPSILON_PRIME_FACTOR * e),
        x,
        conditions,
        notes,
        config: cfg.clone(),
    })
}

/// P(|reference − S_n| > ε) per order, with binomial standard errors. The
/// oracle column is the law's size of the error integral (β²∫D² or c∫|D|^α).
pub fn estimate_in_probability(cfg: &DiagnosticConfig) -> Result<ConvergenceReport> {
    cfg.validate()?;
    let coeffs = cfg.coefficients()?;
    let errors = tail_errors(cfg, &coeffs)?;
    let rows = cfg
        .orders
        .iter()
        .zip(&errors)
        .map(|(&n, e)| {
            let est = exceedance(&abs_all(e), cfg.epsilon);
            Ok(ReportRow {
                key: n as f64,
                estimate: est.estimate,
                std_error: est.std_error,
                oracle: Some(tail_oracle(cfg, &coeffs, n)?),
                verdict: None,
                median: None,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    finish(
        Mode::InProbability,
        rows,
        Some(cfg.epsilon),
        None,
        vec![cfg.process_conditions()],
        vec![REFERENCE_NOTE.to_string()],
        cfg,
    )
}

/// E|reference − T_n|² per order against the isometry oracle β²∫|(v_{N_ref} − v_n)σ|².
pub fn estimate_quadratic_mean(cfg: &DiagnosticConfig) -> Result<ConvergenceReport> {
    cfg.validate()?;
    cfg.require_wiener()?;
    let coeffs = cfg.coefficients()?;
    let errors = tail_errors(cfg, &coeffs)?;
    let rows = cfg
        .orders
        .iter()
        .zip(&errors)
        .map(|(&n, e)| {
            let est = second_moment(e);
            let oracle = tail_oracle(cfg, &coeffs, n)?;
            Ok(ReportRow {
                key: n as f64,
                estimate: est.estimate,
                std_error: est.std_error,
                oracle: Some(oracle),
                verdict: Some(agreement(&est, oracle)),
                median: None,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    finish(
        Mode::QuadraticMean,
        rows,
        None,
        None,
        vec![cfg.process_conditions()],
        vec![REFERENCE_NOTE.to_string()],
        cfg,
    )
}

/// Tail sup max_{n ≤ m ≤ N_max} |T_m − T_n| per replica, with N_max = n_ref;
/// rows report its 95% quantile and median.
pub fn estimate_almost_sure(cfg: &DiagnosticConfig) -> Result<ConvergenceReport> {
    cfg.validate()?;
    cfg.require_wiener()?;
    if cfg.n_ref < MIN_TAIL_WINDOW {
        return Err(Error::invalid(
            "n_ref",
            format!(
                "almost-sure tail window needs n_ref >= {MIN_TAIL_WINDOW}, got {}",
                cfg.n_ref
            ),
        ));
    }
    let coeffs = cfg.coefficients()?;
    let grid = cfg.grid()?;
    let c = tail_weights(&coeffs, cfg.y, 0, cfg.n_ref)?;
    let active: Vec<usize> = (0..=cfg.n_ref).filter(|&k| c[k] != 0.0).collect();
    let integrands = active
        .iter()
        .map(|&k| {
            let mut unit = vec![0.0; cfg.n_ref + 1];
            unit[k] = 1.0;
            let v = CoefficientVector::from_values(unit, coeffs.basis, "unit")?;
            kernel_integrand(&v, cfg.y, &cfg.exponents, &grid, k..=k).map(|g| (k, g))
        })
        .collect::<Result<Vec<_>>>()?;
    // φ_k(y) is folded into the tabulated integrand, so B_k φ_k(y) comes out directly.
    let sups = map_replicas(cfg.replicas, |r| {
        let path = replica_path(&cfg.process, &grid, cfg.seed, r)?;
        let mut terms = vec![0.0; cfg.n_ref + 1];
        for (k, g) in &integrands {
            terms[*k] = coeffs.values[*k] * g.integrate(&path)?;
        }
        Ok(tail_sups(&terms, &cfg.orders))
    })?;
    let sups = transpose(&sups, cfg.orders.len());
    let rows = cfg
        .orders
        .iter()
        .zip(&sups)
        .map(|(&n, s)| {
            let q95 = quantile_estimate(s, 0.95);
            ReportRow {
                key: n as f64,
                estimate: q95.estimate,
                std_error: q95.std_error,
                oracle: None,
                verdict: None,
                median: Some(quantile_estimate(s, 0.5)),
            }
        })
        .collect();
    let summability = check_coefficient_summability(&coeffs, cfg.index.gamma, ConditionId::C220)?;
    finish(
        Mode::AlmostSure,
        rows,
        None,
        None,
        vec![cfg.process_conditions(), summability],
        vec![REFERENCE_NOTE.to_string()],
        cfg,
    )
}

/// max_{n ≤ m ≤ N} |Σ_{n<k≤m} terms_k| for each n in `orders`.
fn tail_sups(terms: &[f64], orders: &[usize]) -> Vec<f64> {
    orders
        .iter()
        .map(|&n| {
            let mut acc = 0.0f64;
            let mut sup = 0.0f64;
            for t in &terms[n + 1..] {
                acc += t;
                sup = sup.max(acc.abs());
            }
            sup
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ContinuityMode {
    #[serde(rename = "weak_prob")]
    WeakProb,
    #[serde(rename = "qm")]
    QM,
    #[serde(rename = "as")]
    AS,
}

/// Moduli of continuity of the reference integral I(x) = ∫ s_{N_ref}(f, x, t) w dX
/// over the offsets `h_list` (strictly decreasing, positive).
///
/// WeakProb: P(|I(x+h) − I(x)| > ε). QM: E|I(x+h) − I(x)|² against its
/// isometry oracle. AS: 95% quantile and median of |I(x+h) − I(x)|.
pub fn continuity_probe(
    mode: ContinuityMode,
    cfg: &DiagnosticConfig,
    x: f64,
    h_list: &[f64],
) -> Result<ConvergenceReport> {
    cfg.validate_common()?;
    if mode != ContinuityMode::WeakProb {
        cfg.require_wiener()?;
    }
    if h_list.is_empty()
        || h_list.iter().any(|h| !(*h > 0.0))
        || h_list.windows(2).any(|w| w[1] >= w[0])
    {
        return Err(Error::invalid(
            "h_list",
            "offsets must be positive and strictly decreasing",
        ));
    }
    let domain = cfg.domain();
    for p in std::iter::once(x).chain(h_list.iter().map(|h| x + h)) {
        if !domain.contains(p) {
            return Err(Error::invalid(
                "x",
                format!("{p} lies outside the {domain:?} domain"),
            ));
        }
    }
    let coeffs = cfg.coefficients()?;
    let grid = cfg.grid()?;
    let integrands = h_list
        .iter()
        .map(|h| kernel_difference_integrand(&coeffs, x, x + h, &cfg.exponents, &grid))
        .collect::<Result<Vec<_>>>()?;
    let diffs = replica_integrals(cfg, &grid, &integrands)?;
    let phi = coeffs.basis.evaluator();
    let px = phi.eval_all(x)?;
    let mut rows = Vec::with_capacity(h_list.len());
    for (&h, d) in h_list.iter().zip(&diffs) {
        let ph = phi.eval_all(x + h)?;
        let c: Vec<f64> = (0..=cfg.n_ref)
            .map(|k| coeffs.values[k] * (ph[k] - px[k]))
            .collect();
        let oracle = integral_oracle(&cfg.process, &coeffs.basis, &c, &cfg.exponents)?;
        let row = match mode {
            ContinuityMode::WeakProb => {
                let e = exceedance(&abs_all(d), cfg.epsilon);
                ReportRow {
                    key: h,
                    estimate: e.estimate,
                    std_error: e.std_error,
                    oracle: Some(oracle),
                    verdict: None,
                    median: None,
                }
            }
            ContinuityMode::QM => {
                let e = second_moment(d);
                ReportRow {
                    key: h,
                    estimate: e.estimate,
                    std_error: e.std_error,
                    oracle: Some(oracle),
                    verdict: Some(agreement(&e, oracle)),
                    median: None,
                }
            }
            ContinuityMode::AS => {
                let a = abs_all(d);
                let q = quantile_estimate(&a, 0.95);
                ReportRow {
                    key: h,
                    estimate: q.estimate,
                    std_error: q.std_error,
                    oracle: None,
                    verdict: None,
                    median: Some(quantile_estimate(&a, 0.5)),
                }
            }
        };
        rows.push(row);
    }
    let (report_mode, epsilon) = match mode {
        ContinuityMode::WeakProb => (Mode::WeakContinuityProb, Some(cfg.epsilon)),
        ContinuityMode::QM => (Mode::QMContinuity, None),
        ContinuityMode::AS => (Mode::ASContinuity, None),
    };
    let mut conditions = vec![cfg.process_conditions()];
    if mode == ContinuityMode::AS {
        conditions.push(check_coefficient_summability(
            &coeffs,
            cfg.index.gamma,
            ConditionId::C222,
        )?);
    }
    finish(
        report_mode,
        rows,
        epsilon,
        Some(x),
        conditions,
        vec![REFERENCE_NOTE.to_string()],
        cfg,
    )
}

/// Empirical covariance of (B_n, B_m) against β²∫q̂_n q̂_m (σ^{(η,τ)})².
#[derive(Debug, Clone, Serialize)]
pub struct CovarianceTest {
    pub n: usize,
    pub m: usize,
    pub empirical: Estimate,
    pub analytic: f64,
    pub z_score: f64,
    pub agrees: bool,
    /// 2η = γ and 2τ = δ, where the analytic covariance vanishes identically.
    pub matched_exponents: bool,
}

#[allow(clippy::too_many_arguments)]
pub fn test_wiener_independence(
    n: usize,
    m: usize,
    idx: &JacobiIndex<f64>,
    exp: &ExponentPair<f64>,
    beta: f64,
    replicas: usize,
    intervals: usize,
    seed: u64,
) -> Result<CovarianceTest> {
    if n == m {
        return Err(Error::invalid("m", "degrees must differ"));
    }
    if replicas < 2 {
        return Err(Error::invalid("replicas", "need at least 2 replicas"));
    }
    let basis = BasisSpec::new(*idx, Domain::Shifted, n.max(m))?;
    let process = ProcessDescriptor::wiener(beta)?;
    let sample = sample_random_coefficients(
        CoefficientKind::B,
        basis,
        *exp,
        process,
        intervals,
        seed,
        replicas,
    )?;
    let empirical = covariance(&sample.degree(n), &sample.degree(m));
    let analytic = beta * beta * cross_moment(&basis, n, m, exp)?;
    let z_score = empirical.z_score(analytic);
    Ok(CovarianceTest {
        n,
        m,
        empirical,
        analytic,
        z_score,
        agrees: z_score <= AGREEMENT_SE,
        matched_exponents: 2.0 * exp.eta == idx.gamma && 2.0 * exp.tau == idx.delta,
    })
}

/// ∫ φ_n φ_m w^{(2η,2τ)} over the basis domain, exact by Gauss–Jacobi.
pub fn cross_moment(
    basis: &BasisSpec<f64>,
    n: usize,
    m: usize,
    exp: &ExponentPair<f64>,
) -> Result<f64> {
    let rule = gauss_jacobi_rule(
        (n + m) / 2 + 2,
        (2.0 * exp.eta, 2.0 * exp.tau),
        basis.domain,
    )?;
    let mut acc = 0.0;
    for (&t, &w) in rule.nodes().iter().zip(rule.weights()) {
        acc += w * basis.eval(n, t)? * basis.eval(m, t)?;
    }
    Ok(acc)
}

#[derive(Debug, Clone, Serialize)]
pub struct CfGapRow {
    pub x: f64,
    pub empirical_cf: f64,
    pub empirical_cf_imag: f64,
    /// exp(−c|x|^α ∫|φ_n ρ + φ_m ρ|^α)
    pub sum_cf: f64,
    /// exp(−c|x|^α (∫|φ_n ρ|^α + ∫|φ_m ρ|^α))
    pub product_cf: f64,
    pub theoretical_gap: f64,
    pub empirical_gap: f64,
    pub agrees: bool,
}

/// CF of A_n + A_m against the product of the marginal CFs.
#[derive(Debug, Clone, Serialize)]
pub struct DependenceReport {
    pub n: usize,
    pub m: usize,
    pub alpha: f64,
    pub c: f64,
    pub replicas: usize,
    pub intervals: usize,
    pub seed: u64,
    pub integral_n: f64,
    pub integral_m: f64,
    pub integral_sum: f64,
    /// 4/√M
    pub tolerance: f64,
    pub rows: Vec<CfGapRow>,
    pub max_theoretical_gap: f64,
    pub max_empirical_gap: f64,
}

impl DependenceReport {
    pub fn all_agree(&self) -> bool {
        self.rows.iter().all(|r| r.agrees)
    }
}

#[allow(clippy::too_many_arguments)]
pub fn test_stable_dependence(
    n: usize,
    m: usize,
    idx: &JacobiIndex<f64>,
    exp: &ExponentPair<f64>,
    alpha: f64,
    c: f64,
    replicas: usize,
    intervals: usize,
    x_grid: &[f64],
    seed: u64,
) -> Result<DependenceReport> {
    if n == m {
        return Err(Error::invalid("m", "degrees must differ"));
    }
    if x_grid.is_empty() {
        return Err(Error::invalid("x_grid", "need at least one frequency"));
    }
    let process = ProcessDescriptor::stable(alpha, c)?;
    let basis = BasisSpec::new(*idx, Domain::Standard, n.max(m))?;
    let sample = sample_random_coefficients(
        CoefficientKind::A,
        basis,
        *exp,
        process,
        intervals,
        seed,
        replicas,
    )?;
    let sums: Vec<f64> = sample.values.iter().map(|row| row[n] + row[m]).collect();
    let unit = |ks: &[usize]| {
        let mut v = vec![0.0; basis.max_degree + 1];
        for &k in ks {
            v[k] = 1.0;
        }
        v
    };
    let integral_n = weighted_power_integral(&basis, &unit(&[n]), exp, alpha)?;
    let integral_m = weighted_power_integral(&basis, &unit(&[m]), exp, alpha)?;
    let integral_sum = weighted_power_integral(&basis, &unit(&[n, m]), exp, alpha)?;
    let tolerance = AGREEMENT_SE / (replicas as f64).sqrt();
    let rows = x_grid
        .iter()
        .map(|&x| {
            let e: Complex64 = empirical_cf(&sums, x)?;
            let sum_cf = stable_integral_cf(x, alpha, c, integral_sum);
            let product_cf = stable_integral_cf(x, alpha, c, integral_n + integral_m);
            let theoretical_gap = (sum_cf - product_cf).abs();
            let empirical_gap = (e - Complex64::new(product_cf, 0.0)).norm();
            Ok(CfGapRow {
                x,
                empirical_cf: e.re,
                empirical_cf_imag: e.im,
                sum_cf,
                product_cf,
                theoretical_gap,
                empirical_gap,
                agrees: (empirical_gap - theoretical_gap).abs() <= tolerance,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let max_of = |f: fn(&CfGapRow) -> f64| rows.iter().map(f).fold(0.0, f64::max);
    Ok(DependenceReport {
        n,
        m,
        alpha,
        c,
        replicas,
        intervals,
        seed,
        integral_n,
        integral_m,
        integral_sum,
        tolerance,
        max_theoretical_gap: max_of(|r| r.theoretical_gap),
        max_empirical_gap: max_of(|r| r.empirical_gap),
        rows,
    })
}
