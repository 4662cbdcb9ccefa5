//! Weight conditions on (γ, δ, η, τ, p, α) and coefficient summability.
//!
//! The closed-form checks are generic over [`OrderedField`] so they can run
//! on exact rationals as well as on floats.

use serde::Serialize;

use crate::basis::{ExponentPair, JacobiIndex};
use crate::error::{Error, Result};
use crate::quadrature::CoefficientVector;
use crate::scalar::OrderedField;
use crate::stats::least_squares_slope;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum ConditionId {
    /// |η − γ/2 − 1/2 + 1/p| < min(1/4, 1/2 + γ/2), stable index α > 1.
    C24,
    /// |τ − δ/2 − 1/2 + 1/p| < min(1/4, 1/2 + δ/2), stable index α > 1.
    C25,
    /// γ − η ≥ 0 and δ − τ ≥ 0, stable index α = 1.
    C27,
    /// |η − γ/2| < min(1/4, 1/2 + γ/2) and |τ − δ/2| < min(1/4, 1/2 + δ/2), Wiener.
    C213,
    /// Σ (n^{2γ} |b_n|)² < ∞.
    C220,
    /// Σ n^γ |b_n| < ∞.
    C222,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Satisfied,
    Violated,
    Inconclusive,
}

impl Verdict {
    pub fn is_satisfied(self) -> bool {
        self == Verdict::Satisfied
    }

    fn all<I: IntoIterator<Item = bool>>(xs: I) -> Verdict {
        if xs.into_iter().all(|b| b) {
            Verdict::Satisfied
        } else {
            Verdict::Violated
        }
    }
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Verdict::Satisfied => "satisfied",
            Verdict::Violated => "violated",
            Verdict::Inconclusive => "inconclusive",
        })
    }
}

/// One inequality: `lhs` compared against `rhs`, `margin = rhs − lhs`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct InequalityCheck<T> {
    pub id: ConditionId,
    pub lhs: T,
    pub rhs: T,
    pub margin: T,
    pub satisfied: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConditionInputs<T> {
    pub gamma: T,
    pub delta: T,
    pub eta: Option<T>,
    pub tau: Option<T>,
    pub p: Option<T>,
    pub alpha: Option<T>,
}

/// Fit details of a summability check.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SummabilityFit {
    /// s in |b_n| ≈ C n^{−s}; `None` when the tail is below the noise floor.
    pub fitted_exponent: Option<f64>,
    /// The series converges iff s exceeds this.
    pub boundary: f64,
    pub truncated_sum: f64,
    pub fitted_terms: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConditionReport<T> {
    pub checks: Vec<InequalityCheck<T>>,
    pub verdict: Verdict,
    /// Minimum margin over the checks.
    pub margin: T,
    /// Whether p ≥ α ≥ 1 holds; `None` for conditions without p and α.
    pub p_at_least_alpha: Option<bool>,
    pub inputs: ConditionInputs<T>,
    pub fit: Option<SummabilityFit>,
}

impl<T: OrderedField> ConditionReport<T> {
    pub fn satisfied(&self) -> bool {
        self.verdict.is_satisfied()
    }

    fn from_checks(
        checks: Vec<InequalityCheck<T>>,
        inputs: ConditionInputs<T>,
        p_at_least_alpha: Option<bool>,
    ) -> Self {
        let margin = checks
            .iter()
            .map(|c| c.margin)
            .reduce(T::min_of)
            .expect("at least one check");
        ConditionReport {
            verdict: Verdict::all(checks.iter().map(|c| c.satisfied)),
            checks,
            margin,
            p_at_least_alpha,
            inputs,
            fit: None,
        }
    }
}

fn strict<T: OrderedField>(id: ConditionId, lhs: T, rhs: T) -> InequalityCheck<T> {
    InequalityCheck {
        id,
        lhs,
        rhs,
        margin: rhs - lhs,
        satisfied: lhs < rhs,
    }
}

/// min(1/4, 1/2 + g/2)
fn cap<T: OrderedField>(g: T) -> T {
    T::min_of(T::quarter(), T::half() + g / T::two())
}

/// Conditions for the stable-driven series: the α > 1 pair of inequalities,
/// or the α = 1 ordering γ ≥ η, δ ≥ τ.
///
/// `p_at_least_alpha` records whether p ≥ α ≥ 1; the inequalities are
/// evaluated either way.
pub fn check_stable_conditions<T: OrderedField>(
    idx: &JacobiIndex<T>,
    exp: &ExponentPair<T>,
    p: T,
    alpha: T,
) -> ConditionReport<T> {
    let inputs = ConditionInputs {
        gamma: idx.gamma,
        delta: idx.delta,
        eta: Some(exp.eta),
        tau: Some(exp.tau),
        p: Some(p),
        alpha: Some(alpha),
    };
    let range_ok = p >= alpha && alpha >= T::one() && alpha <= T::two();
    if alpha == T::one() {
        let m_eta = idx.gamma - exp.eta;
        let m_tau = idx.delta - exp.tau;
        let margin = T::min_of(m_eta, m_tau);
        let check = InequalityCheck {
            id: ConditionId::C27,
            lhs: T::zero(),
            rhs: margin,
            margin,
            satisfied: margin >= T::zero(),
        };
        return ConditionReport::from_checks(vec![check], inputs, Some(range_ok));
    }
    let inv_p = T::one() / p;
    let lhs_eta = (exp.eta - idx.gamma / T::two() - T::half() + inv_p).abs();
    let lhs_tau = (exp.tau - idx.delta / T::two() - T::half() + inv_p).abs();
    let checks = vec![
        strict(ConditionId::C24, lhs_eta, cap(idx.gamma)),
        strict(ConditionId::C25, lhs_tau, cap(idx.delta)),
    ];
    ConditionReport::from_checks(checks, inputs, Some(range_ok))
}

/// Conditions for the Wiener-driven series (both inequalities under one id).
pub fn check_wiener_conditions<T: OrderedField>(
    idx: &JacobiIndex<T>,
    exp: &ExponentPair<T>,
) -> ConditionReport<T> {
    let inputs = ConditionInputs {
        gamma: idx.gamma,
        delta: idx.delta,
        eta: Some(exp.eta),
        tau: Some(exp.tau),
        p: None,
        alpha: None,
    };
    let checks = vec![
        strict(
            ConditionId::C213,
            (exp.eta - idx.gamma / T::two()).abs(),
            cap(idx.gamma),
        ),
        strict(
            ConditionId::C213,
            (exp.tau - idx.delta / T::two()).abs(),
            cap(idx.delta),
        ),
    ];
    ConditionReport::from_checks(checks, inputs, None)
}

/// Width of the band above the summability boundary where no verdict is given.
pub const SUMMABILITY_BAND: f64 = 0.1;
/// Fitted exponents this close to the boundary count as on it.
const BOUNDARY_TOLERANCE: f64 = 1e-6;
/// Coefficients below this fraction of the largest one are treated as zero.
const NOISE_FLOOR: f64 = 1e-13;
const MIN_COEFFICIENTS: usize = 16;

/// Three-state check of Σ (n^{2γ}|b_n|)² < ∞ (C220) or Σ n^γ|b_n| < ∞ (C222).
///
/// Fits |b_n| ≈ C n^{−s} on the last half of the coefficients. Violated when
/// s is at or below the boundary, satisfied when it clears the boundary by
/// more than [`SUMMABILITY_BAND`], inconclusive in between. A tail that has
/// decayed below the noise floor counts as satisfied.
pub fn check_coefficient_summability(
    coeffs: &CoefficientVector<f64>,
    gamma: f64,
    which: ConditionId,
) -> Result<ConditionReport<f64>> {
    let b = &coeffs.values;
    if b.len() < MIN_COEFFICIENTS {
        return Err(Error::InsufficientData {
            needed: MIN_COEFFICIENTS,
            got: b.len(),
        });
    }
    let (boundary, truncated_sum) = match which {
        ConditionId::C220 => (
            2.0 * gamma + 0.5,
            b.iter()
                .enumerate()
                .map(|(n, v)| (npow(n, 2.0 * gamma) * v.abs()).powi(2))
                .sum::<f64>(),
        ),
        ConditionId::C222 => (
            gamma + 1.0,
            b.iter()
                .enumerate()
                .map(|(n, v)| npow(n, gamma) * v.abs())
                .sum::<f64>(),
        ),
        other => {
            return Err(Error::invalid(
                "which",
                format!("{other:?} is not a summability condition"),
            ))
        }
    };
    let floor = NOISE_FLOOR * b.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let (xs, ys): (Vec<f64>, Vec<f64>) = b
        .iter()
        .enumerate()
        .skip(b.len() / 2)
        .filter(|(n, v)| *n > 0 && v.abs() > floor)
        .map(|(n, v)| ((n as f64).ln(), v.abs().ln()))
        .unzip();
    let (fitted, verdict) = if xs.len() < 4 {
        (None, Verdict::Satisfied)
    } else {
        let s = -least_squares_slope(&xs, &ys)?;
        let v = if s <= boundary + BOUNDARY_TOLERANCE {
            Verdict::Violated
        } else if s <= boundary + SUMMABILITY_BAND {
            Verdict::Inconclusive
        } else {
            Verdict::Satisfied
        };
        (Some(s), v)
    };
    let margin = fitted.map_or(f64::INFINITY, |s| s - boundary);
    Ok(ConditionReport {
        checks: vec![InequalityCheck {
            id: which,
            lhs: boundary,
            rhs: fitted.unwrap_or(f64::INFINITY),
            margin,
            satisfied: verdict.is_satisfied(),
        }],
        verdict,
        margin,
        p_at_least_alpha: None,
        inputs: ConditionInputs {
            gamma,
            delta: coeffs.basis.index.delta,
            eta: None,
            tau: None,
            p: None,
            alpha: None,
        },
        fit: Some(SummabilityFit {
            fitted_exponent: fitted,
            boundary,
            truncated_sum,
            fitted_terms: xs.len(),
        }),
    })
}

/// n^e with 0^e read as 0 for e > 0 and 1 otherwise.
fn npow(n: usize, e: f64) -> f64 {
    if n == 0 {
        if e > 0.0 {
            0.0
        } else {
            1.0
        }
    } else {
        (n as f64).powf(e)
    }
}
