use serde::Serialize;

use super::function::{FunctionSpec, Side};
use super::gauss_jacobi_rule;
use crate::basis::{BasisSpec, Domain, ExponentPair, JacobiIndex};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Node count used for the coefficient of degree n: exact for polynomial f up
/// to degree n + 31.
pub fn coefficient_node_count(n: usize) -> usize {
    n + 16
}

/// a_n = ∫_{−1}^{1} f p̂_n ρ^{(γ,δ)} dy with a K-node Gauss–Jacobi rule.
pub fn fourier_jacobi_coefficient<T: Scalar>(
    f: &FunctionSpec<T>,
    n: usize,
    idx: &JacobiIndex<T>,
    k: usize,
) -> Result<T> {
    coefficient_on(Domain::Standard, f, n, idx, k)
}

/// b_n = ∫_0^1 f q̂_n σ^{(γ,δ)} dt with a K-node shifted Gauss–Jacobi rule.
pub fn shifted_coefficient<T: Scalar>(
    f: &FunctionSpec<T>,
    n: usize,
    idx: &JacobiIndex<T>,
    k: usize,
) -> Result<T> {
    coefficient_on(Domain::Shifted, f, n, idx, k)
}

fn coefficient_on<T: Scalar>(
    domain: Domain,
    f: &FunctionSpec<T>,
    n: usize,
    idx: &JacobiIndex<T>,
    k: usize,
) -> Result<T> {
    idx.validate()?;
    if matches!(f.polynomial_degree(), Some(d) if n > d) {
        return Ok(T::zero());
    }
    if f.has_unabsorbed_singularity() {
        return Err(Error::NotIntegrable(format!(
            "{}: endpoint singularity inside a combination cannot be moved into the measure",
            f.id
        )));
    }
    let basis = BasisSpec::new(*idx, domain, n)?;
    match f.singular_factor() {
        Some((side, s)) => {
            let (a, b) = absorb(idx.gamma, idx.delta, side, s);
            if !(a > -T::one() && b > -T::one()) {
                return Err(Error::NotIntegrable(format!(
                    "{} against the Jacobi weight: combined endpoint exponent <= -1",
                    f.id
                )));
            }
            let rule = gauss_jacobi_rule(k, (a, b), domain)?;
            rule.try_integrate(|x| basis.eval(n, x).unwrap_or(T::nan()))
        }
        None => {
            let rule = gauss_jacobi_rule(k, (idx.gamma, idx.delta), domain)?;
            let mut acc = T::zero();
            for (&x, &w) in rule.nodes().iter().zip(rule.weights()) {
                acc = acc + w * f.eval(x, domain)? * basis.eval(n, x)?;
            }
            Ok(acc)
        }
    }
}

fn absorb<T: Scalar>(a: T, b: T, side: Side, s: T) -> (T, T) {
    match side {
        Side::Right => (a + s, b),
        Side::Left => (a, b + s),
    }
}

/// Deterministic coefficients a_0..a_N (or b_0..b_N) of a function in a basis.
#[derive(Debug, Clone, Serialize)]
pub struct CoefficientVector<T> {
    pub values: Vec<T>,
    pub basis: BasisSpec<T>,
    pub source: String,
}

impl<T: Scalar> CoefficientVector<T> {
    /// Fourier–Jacobi coefficients of `f` up to the basis' maximal degree,
    /// using [`coefficient_node_count`] nodes per degree.
    pub fn from_function(f: &FunctionSpec<T>, basis: BasisSpec<T>) -> Result<Self> {
        let values = (0..=basis.max_degree)
            .map(|n| coefficient_on(basis.domain, f, n, &basis.index, coefficient_node_count(n)))
            .collect::<Result<Vec<T>>>()?;
        Self::from_values(values, basis, f.id.clone())
    }

    /// Wraps explicitly given coefficients (for synthetic sequences).
    pub fn from_values(
        values: Vec<T>,
        basis: BasisSpec<T>,
        source: impl Into<String>,
    ) -> Result<Self> {
        if values.len() != basis.max_degree + 1 {
            return Err(Error::invalid(
                "coefficients",
                format!(
                    "expected {} values, got {}",
                    basis.max_degree + 1,
                    values.len()
                ),
            ));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("coefficients", "all values must be finite"));
        }
        Ok(CoefficientVector {
            values,
            basis,
            source: source.into(),
        })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn max_order(&self) -> usize {
        self.values.len() - 1
    }

    pub(crate) fn check_order(&self, n: usize) -> Result<()> {
        if n > self.max_order() {
            Err(Error::DegreeOutOfRange {
                n,
                max: self.max_order(),
            })
        } else {
            Ok(())
        }
    }

    /// Plain partial sum Σ_{k≤n} a_k φ_k(y).
    pub fn partial_sum(&self, n: usize, y: T) -> Result<T> {
        self.check_order(n)?;
        let phi = self.basis.evaluator().eval_all(y)?;
        Ok(self.values[..=n]
            .iter()
            .zip(&phi)
            .fold(T::zero(), |acc, (&a, &p)| acc + a * p))
    }
}

/// s_n(f, y, t) = Σ_{k≤n} a_k φ_k(y) φ_k(t) (v_n on the shifted domain).
pub fn kernel_partial_sum<T: Scalar>(
    coeffs: &CoefficientVector<T>,
    y: T,
    t: T,
    n: usize,
) -> Result<T> {
    coeffs.check_order(n)?;
    let ev = coeffs.basis.evaluator();
    let py = ev.eval_all(y)?;
    let pt = ev.eval_all(t)?;
    Ok((0..=n).fold(T::zero(), |acc, k| acc + coeffs.values[k] * py[k] * pt[k]))
}

/// Outcome of a weighted L^p norm: finite value or certified divergence.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum LpNorm<T> {
    Finite(T),
    Divergent,
}

impl<T: Copy> LpNorm<T> {
    pub fn value(&self) -> Option<T> {
        match self {
            LpNorm::Finite(v) => Some(*v),
            LpNorm::Divergent => None,
        }
    }
}

/// (∫ |f w^{(η,τ)}|^p)^{1/p} over the domain.
///
/// For an endpoint-singular f the divergence decision is exponent arithmetic:
/// the combined exponent p(s + η) (or p(s + τ)) must exceed −1.
pub fn weighted_lp_norm<T: Scalar>(
    f: &FunctionSpec<T>,
    p: T,
    exp: &ExponentPair<T>,
    domain: Domain,
    k: usize,
) -> Result<LpNorm<T>> {
    if !(p >= T::one()) {
        return Err(Error::invalid("p", "L^p exponent must be >= 1"));
    }
    exp.validate()?;
    if f.has_unabsorbed_singularity() {
        return Err(Error::NotIntegrable(format!(
            "{}: endpoint singularity inside a combination cannot be moved into the measure",
            f.id
        )));
    }
    let (a, b) = (p * exp.eta, p * exp.tau);
    let integral = match f.singular_factor() {
        Some((side, s)) => {
            let (a, b) = absorb(a, b, side, p * s);
            if !(a > -T::one() && b > -T::one()) {
                return Ok(LpNorm::Divergent);
            }
            gauss_jacobi_rule(k, (a, b), domain)?.integrate(|_| T::one())
        }
        None => {
            let rule = gauss_jacobi_rule(k, (a, b), domain)?;
            let mut acc = T::zero();
            for (&x, &w) in rule.nodes().iter().zip(rule.weights()) {
                acc = acc + w * f.eval(x, domain)?.abs().powf(p);
            }
            acc
        }
    };
    Ok(LpNorm::Finite(integral.powf(T::one() / p)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis::jacobi_orthonormal;
    use approx::assert_relative_eq;

    fn idx(g: f64, d: f64) -> JacobiIndex<f64> {
        JacobiIndex::new(g, d).unwrap()
    }

    #[test]
    fn coefficient_examples() {
        let l = idx(0.0, 0.0);
        assert_relative_eq!(
            fourier_jacobi_coefficient(&FunctionSpec::constant(1.0), 0, &l, 16).unwrap(),
            2f64.sqrt(),
            max_relative = 1e-13
        );
        assert_relative_eq!(
            fourier_jacobi_coefficient(&FunctionSpec::monomial(1), 1, &l, 17).unwrap(),
            (2.0f64 / 3.0).sqrt(),
            max_relative = 1e-13
        );
        assert_relative_eq!(
            shifted_coefficient(&FunctionSpec::constant(1.0), 0, &l, 16).unwrap(),
            1.0,
            max_relative = 1e-13
        );
        for n in 3..8 {
            assert!(
                shifted_coefficient(&FunctionSpec::monomial(2), n, &l, n + 16)
                    .unwrap()
                    .abs()
                    < 1e-12
            );
        }
    }

    #[test]
    fn basis_element_coefficients_are_kronecker() {
        let j = idx(0.5, -0.25);
        let f = FunctionSpec::basis_element(2, j);
        for n in 0..6 {
            let a = fourier_jacobi_coefficient(&f, n, &j, coefficient_node_count(n)).unwrap();
            let want = if n == 2 { 1.0 } else { 0.0 };
            assert!((a - want).abs() < 1e-12, "n={n}: {a}");
        }
        let g = FunctionSpec::basis_element(3, j);
        for n in 0..6 {
            let b = shifted_coefficient(&g, n, &j, coefficient_node_count(n)).unwrap();
            let want = if n == 3 { 1.0 } else { 0.0 };
            assert!((b - want).abs() < 1e-12, "n={n}: {b}");
        }
    }

    #[test]
    fn singular_coefficient_is_absorbed() {
        // a_0 of (1−y)^{−1/2} against Legendre: ∫(1−y)^{−1/2} dy / √2 = 2√2/√2 = 2
        let f = FunctionSpec::singular(Side::Right, -0.5).unwrap();
        let a0 = fourier_jacobi_coefficient(&f, 0, &idx(0.0, 0.0), 16).unwrap();
        assert_relative_eq!(a0, 2.0, max_relative = 1e-12);
        // combined exponent −0.5 + (−0.6) ≤ −1
        assert!(matches!(
            fourier_jacobi_coefficient(
                &FunctionSpec::singular(Side::Right, -0.6).unwrap(),
                0,
                &idx(-0.5, 0.0),
                16
            ),
            Err(Error::NotIntegrable(_))
        ));
    }

    #[test]
    fn lp_norm_examples() {
        let flat = ExponentPair::new(0.0, 0.0).unwrap();
        let n = weighted_lp_norm(
            &FunctionSpec::constant(1.0),
            2.0,
            &flat,
            Domain::Standard,
            8,
        )
        .unwrap();
        assert_relative_eq!(n.value().unwrap(), 2f64.sqrt(), max_relative = 1e-13);
        let f = FunctionSpec::singular(Side::Right, -0.5).unwrap();
        assert_eq!(
            weighted_lp_norm(&f, 2.0, &flat, Domain::Standard, 8).unwrap(),
            LpNorm::Divergent
        );
        let tamed = ExponentPair::new(0.75, 0.0).unwrap();
        // ∫ (1−y)^{1/2} dy = (2/3)·2^{3/2}
        let v = weighted_lp_norm(&f, 2.0, &tamed, Domain::Standard, 8)
            .unwrap()
            .value()
            .unwrap();
        assert_relative_eq!(v * v, 2.0 / 3.0 * 2f64.powf(1.5), max_relative = 1e-12);
        assert!(weighted_lp_norm(&f, 0.5, &tamed, Domain::Standard, 8).is_err());
    }

    #[test]
    fn kernel_examples() {
        let j = idx(0.0, 0.0);
        let basis = BasisSpec::new(j, Domain::Standard, 4).unwrap();
        let unit =
            CoefficientVector::from_function(&FunctionSpec::basis_element(1, j), basis).unwrap();
        let (y, t) = (0.3, -0.7);
        let want = jacobi_orthonormal(1, &j, y).unwrap() * jacobi_orthonormal(1, &j, t).unwrap();
        assert_relative_eq!(
            kernel_partial_sum(&unit, y, t, 4).unwrap(),
            want,
            epsilon = 1e-13
        );
        let c = CoefficientVector::from_function(&FunctionSpec::exponential(1.0), basis).unwrap();
        assert_eq!(
            kernel_partial_sum(&c, y, t, 3).unwrap(),
            kernel_partial_sum(&c, t, y, 3).unwrap()
        );
        let zero = c.values[0]
            * jacobi_orthonormal(0, &j, y).unwrap()
            * jacobi_orthonormal(0, &j, t).unwrap();
        assert_relative_eq!(kernel_partial_sum(&c, y, t, 0).unwrap(), zero);
        assert!(kernel_partial_sum(&c, y, t, 5).is_err());
    }

    #[test]
    fn coefficient_vector_validation() {
        let basis = BasisSpec::new(idx(0.0, 0.0), Domain::Shifted, 2).unwrap();
        assert!(CoefficientVector::from_values(vec![1.0, 2.0], basis, "x").is_err());
        assert!(CoefficientVector::from_values(vec![1.0, f64::NAN, 0.0], basis, "x").is_err());
    }
}
