//! Gauss–Jacobi quadrature and the deterministic integration oracle built on
//! it: Fourier–Jacobi coefficients, weighted L^p norms and kernel partial sums.

mod coefficients;
mod function;
mod tridiagonal;

pub use coefficients::{
    coefficient_node_count, fourier_jacobi_coefficient, kernel_partial_sum, shifted_coefficient,
    weighted_lp_norm, CoefficientVector, LpNorm,
};
pub use function::{integrate_weighted, FunctionKind, FunctionSpec, Side, UserTable};

use serde::Serialize;

use crate::basis::Domain;
use crate::error::{Error, Result};
use crate::scalar::{ln_beta, Scalar};

/// Nodes and weights of a K-point Gauss rule for (1−y)^a (1+y)^b on [−1, 1]
/// or (1−t)^a t^b on [0, 1].
#[derive(Debug, Clone, Serialize)]
pub struct QuadratureRule<T> {
    nodes: Vec<T>,
    weights: Vec<T>,
    exponents: (T, T),
    domain: Domain,
}

impl<T: Scalar> QuadratureRule<T> {
    pub fn nodes(&self) -> &[T] {
        &self.nodes
    }

    pub fn weights(&self) -> &[T] {
        &self.weights
    }

    pub fn exponents(&self) -> (T, T) {
        self.exponents
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    /// Σ wᵢ g(xᵢ); the rule's weight measure is implicit.
    pub fn integrate<F: FnMut(T) -> T>(&self, mut g: F) -> T {
        self.nodes
            .iter()
            .zip(&self.weights)
            .fold(T::zero(), |acc, (&x, &w)| acc + w * g(x))
    }

    /// Like [`integrate`](Self::integrate) but refuses non-finite integrand values.
    pub fn try_integrate<F: FnMut(T) -> T>(&self, mut g: F) -> Result<T> {
        let mut acc = T::zero();
        for (&x, &w) in self.nodes.iter().zip(&self.weights) {
            let v = g(x);
            if !v.is_finite() {
                return Err(Error::NonFinite {
                    at: x.to_f64().unwrap_or(f64::NAN),
                });
            }
            acc = acc + w * v;
        }
        Ok(acc)
    }
}

/// Total mass of the rule's measure: 2^{a+b+1} B(a+1, b+1) on [−1, 1] and
/// B(a+1, b+1) on [0, 1].
pub fn jacobi_mass<T: Scalar>(a: T, b: T, domain: Domain) -> T {
    let one = T::one();
    let beta = ln_beta(a + one, b + one);
    match domain {
        Domain::Standard => ((a + b + one) * T::LN_2() + beta).exp(),
        Domain::Shifted => beta.exp(),
    }
}

/// Diagonal and squared off-diagonal of the monic Jacobi recurrence:
/// x π_j = π_{j+1} + α_j π_j + β_j π_{j−1}. `beta[0]` holds the mass μ₀.
pub(crate) fn jacobi_recurrence<T: Scalar>(k: usize, a: T, b: T) -> (Vec<T>, Vec<T>) {
    let one = T::one();
    let two = T::of(2.0);
    let four = T::of(4.0);
    let mut alpha = Vec::with_capacity(k);
    let mut beta = Vec::with_capacity(k);
    for j in 0..k {
        let jf = T::of(j as f64);
        let s = two * jf + a + b;
        let aj = if j == 0 {
            (b - a) / (a + b + two)
        } else {
            (b * b - a * a) / (s * (s + two))
        };
        alpha.push(aj);
        let bj = match j {
            0 => jacobi_mass(a, b, Domain::Standard),
            1 => four * (one + a) * (one + b) / ((two + a + b).powi(2) * (T::of(3.0) + a + b)),
            _ => four * jf * (jf + a) * (jf + b) * (jf + a + b) / (s * s * (s + one) * (s - one)),
        };
        beta.push(bj);
    }
    (alpha, beta)
}

/// Orthonormal polynomial of degree k and its derivative at x, from the
/// recurrence coefficients. Also returns Σ_{j<k} π_j(x)² (inverse Christoffel).
fn orthonormal_eval<T: Scalar>(alpha: &[T], beta: &[T], x: T) -> (T, T, T) {
    let k = alpha.len();
    let mut p_prev = T::zero();
    let mut d_prev = T::zero();
    let mut p = T::one() / beta[0].sqrt();
    let mut d = T::zero();
    let mut sum_sq = T::zero();
    for j in 0..k {
        sum_sq = sum_sq + p * p;
        let sb_next = if j + 1 < k {
            beta[j + 1].sqrt()
        } else {
            T::one()
        };
        let sb = if j == 0 { T::zero() } else { beta[j].sqrt() };
        let p_next = ((x - alpha[j]) * p - sb * p_prev) / sb_next;
        let d_next = ((x - alpha[j]) * d + p - sb * d_prev) / sb_next;
        p_prev = p;
        d_prev = d;
        p = p_next;
        d = d_next;
    }
    (p, d, sum_sq)
}

/// K-point Gauss–Jacobi rule by Golub–Welsch.
///
/// Nodes are the eigenvalues of the symmetric tridiagonal Jacobi matrix,
/// polished by Newton steps on the degree-K orthonormal polynomial; weights
/// are the Christoffel numbers 1/Σ_{j<K} π_j(x)².
pub fn gauss_jacobi_rule<T: Scalar>(
    k: usize,
    exponents: (T, T),
    domain: Domain,
) -> Result<QuadratureRule<T>> {
    let (a, b) = exponents;
    if k == 0 {
        return Err(Error::invalid("node_count", "must be at least 1"));
    }
    if !(a > -T::one()) || !(b > -T::one()) {
        return Err(Error::invalid(
            "exponents",
            "both rule exponents must be > -1",
        ));
    }
    let (alpha, beta) = jacobi_recurrence(k, a, b);
    let off: Vec<T> = beta.iter().skip(1).map(|v| v.sqrt()).collect();
    let mut nodes = tridiagonal::eigenvalues(&alpha, &off)?;
    nodes.sort_by(|x, y| x.partial_cmp(y).expect("finite eigenvalues"));

    let mut weights = Vec::with_capacity(k);
    for x in nodes.iter_mut() {
        for _ in 0..3 {
            let (p, d, _) = orthonormal_eval(&alpha, &beta, *x);
            if d == T::zero() {
                break;
            }
            let step = p / d;
            *x = *x - step;
            if step.abs() <= T::eps() * x.abs().max(T::one()) {
                break;
            }
        }
        let (_, _, sum_sq) = orthonormal_eval(&alpha, &beta, *x);
        weights.push(T::one() / sum_sq);
    }

    if domain == Domain::Shifted {
        let half = T::of(0.5);
        let scale = (-(a + b + T::one()) * T::LN_2()).exp();
        for (x, w) in nodes.iter_mut().zip(weights.iter_mut()) {
            *x = half * (*x + T::one());
            *w = *w * scale;
        }
    }

    let rule = QuadratureRule {
        nodes,
        weights,
        exponents,
        domain,
    };
    rule.check_invariants()?;
    Ok(rule)
}

impl<T: Scalar> QuadratureRule<T> {
    fn check_invariants(&self) -> Result<()> {
        let (lo, hi) = self.domain.bounds::<T>();
        let k = self.nodes.len();
        for i in 0..k {
            let x = self.nodes[i];
            if !(x > lo && x < hi) || (i > 0 && !(x > self.nodes[i - 1])) {
                return Err(Error::EigenNoConvergence { size: k });
            }
            if !(self.weights[i] > T::zero()) {
                return Err(Error::EigenNoConvergence { size: k });
            }
        }
        let mass = jacobi_mass(self.exponents.0, self.exponents.1, self.domain);
        let total = self.weights.iter().fold(T::zero(), |s, &w| s + w);
        let tol = T::of(1e-10).max(T::of(64.0) * T::eps() * T::of(k as f64));
        if ((total - mass) / mass).abs() > tol {
            return Err(Error::EigenNoConvergence { size: k });
        }
        Ok(())
    }
}
