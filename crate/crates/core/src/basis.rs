//! Jacobi polynomials: classical, orthonormal on [−1, 1], and orthonormal on
//! [0, 1], together with the weights (1−y)^η(1+y)^τ and (1−t)^η t^τ.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{ln_gamma, OrderedField, Scalar};
use crate::stats::least_squares_slope;

/// Above this degree the values at y = ±1 come from the closed form instead of
/// the recurrence.
pub const ENDPOINT_CLOSED_FORM_MIN_DEGREE: usize = 20;

/// Jacobi exponents (γ, δ): the weight (1−y)^γ (1+y)^δ.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JacobiIndex<T> {
    pub gamma: T,
    pub delta: T,
}

impl<T: OrderedField> JacobiIndex<T> {
    /// Both exponents must exceed −1.
    pub fn new(gamma: T, delta: T) -> Result<Self> {
        let idx = JacobiIndex { gamma, delta };
        idx.validate()?;
        Ok(idx)
    }

    pub fn validate(&self) -> Result<()> {
        let minus_one = -T::one();
        if !(self.gamma > minus_one) {
            return Err(Error::invalid(
                "gamma",
                format!("{:?} must be > -1", self.gamma),
            ));
        }
        if !(self.delta > minus_one) {
            return Err(Error::invalid(
                "delta",
                format!("{:?} must be > -1", self.delta),
            ));
        }
        Ok(())
    }

    /// The index with γ and δ exchanged.
    pub fn swapped(&self) -> Self {
        JacobiIndex {
            gamma: self.delta,
            delta: self.gamma,
        }
    }
}

/// Weight exponents (η, τ) of the measure ρ^{(η,τ)} or σ^{(η,τ)}.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExponentPair<T> {
    pub eta: T,
    pub tau: T,
}

impl<T: OrderedField> ExponentPair<T> {
    /// Both exponents must be non-negative.
    pub fn new(eta: T, tau: T) -> Result<Self> {
        let e = ExponentPair { eta, tau };
        e.validate()?;
        Ok(e)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.eta >= T::zero()) {
            return Err(Error::invalid(
                "eta",
                format!("{:?} must be >= 0", self.eta),
            ));
        }
        if !(self.tau >= T::zero()) {
            return Err(Error::invalid(
                "tau",
                format!("{:?} must be >= 0", self.tau),
            ));
        }
        Ok(())
    }

    pub fn scaled(&self, k: T) -> Self {
        ExponentPair {
            eta: self.eta * k,
            tau: self.tau * k,
        }
    }
}

/// Where a basis lives: [−1, 1] (`Standard`) or [0, 1] (`Shifted`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Domain {
    Standard,
    Shifted,
}

impl Domain {
    pub fn bounds<T: Scalar>(self) -> (T, T) {
        match self {
            Domain::Standard => (-T::one(), T::one()),
            Domain::Shifted => (T::zero(), T::one()),
        }
    }

    pub fn contains<T: Scalar>(self, x: T) -> bool {
        let (lo, hi) = self.bounds::<T>();
        x >= lo && x <= hi
    }

    pub(crate) fn check<T: Scalar>(self, x: T) -> Result<()> {
        if self.contains(x) {
            Ok(())
        } else {
            let (lo, hi) = self.bounds::<f64>();
            Err(Error::OutOfDomain {
                value: x.to_f64().unwrap_or(f64::NAN),
                lo,
                hi,
            })
        }
    }

    /// Maps a point of this domain onto [−1, 1].
    pub fn to_standard<T: Scalar>(self, x: T) -> T {
        match self {
            Domain::Standard => x,
            Domain::Shifted => T::of(2.0) * x - T::one(),
        }
    }
}

/// A finite orthonormal Jacobi family: index, domain and maximal degree.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BasisSpec<T> {
    pub index: JacobiIndex<T>,
    pub domain: Domain,
    pub max_degree: usize,
}

impl<T: Scalar> BasisSpec<T> {
    pub fn new(index: JacobiIndex<T>, domain: Domain, max_degree: usize) -> Result<Self> {
        index.validate()?;
        Ok(BasisSpec {
            index,
            domain,
            max_degree,
        })
    }

    /// Orthonormal basis value φ_n(x) on this spec's domain.
    pub fn eval(&self, n: usize, x: T) -> Result<T> {
        if n > self.max_degree {
            return Err(Error::DegreeOutOfRange {
                n,
                max: self.max_degree,
            });
        }
        match self.domain {
            Domain::Standard => jacobi_orthonormal(n, &self.index, x),
            Domain::Shifted => jacobi_shifted_orthonormal(n, &self.index, x),
        }
    }

    /// The Jacobi weight of the basis itself (ρ^{(γ,δ)} or σ^{(γ,δ)}).
    pub fn basis_weight(&self, x: T) -> T {
        let exp = ExponentPair {
            eta: self.index.gamma,
            tau: self.index.delta,
        };
        weight(self.domain, &exp, x)
    }

    pub fn evaluator(&self) -> BasisEvaluator<T> {
        BasisEvaluator::new(*self)
    }
}

/// Evaluates every degree 0..=N of a [`BasisSpec`] at a point in one pass,
/// with the normalization constants cached.
#[derive(Debug, Clone)]
pub struct BasisEvaluator<T> {
    spec: BasisSpec<T>,
    scale: Vec<T>,
}

impl<T: Scalar> BasisEvaluator<T> {
    pub fn new(spec: BasisSpec<T>) -> Self {
        let shift = match spec.domain {
            Domain::Standard => T::zero(),
            Domain::Shifted => shifted_log_scale(&spec.index),
        };
        let scale = (0..=spec.max_degree)
            .map(|n| (shift - T::of(0.5) * ln_normalization_constant(n, &spec.index)).exp())
            .collect();
        BasisEvaluator { spec, scale }
    }

    pub fn spec(&self) -> &BasisSpec<T> {
        &self.spec
    }

    /// φ_0(x), …, φ_N(x).
    pub fn eval_all(&self, x: T) -> Result<Vec<T>> {
        let mut out = Vec::with_capacity(self.spec.max_degree + 1);
        self.eval_all_into(x, &mut out)?;
        Ok(out)
    }

    pub fn eval_all_into(&self, x: T, out: &mut Vec<T>) -> Result<()> {
        self.spec.domain.check(x)?;
        let y = self.spec.domain.to_standard(x);
        classical_upto(self.spec.max_degree, &self.spec.index, y, out);
        for (v, s) in out.iter_mut().zip(&self.scale) {
            *v = *v * *s;
        }
        Ok(())
    }
}

/// Fills `out` with P_0(y), …, P_n(y) by the three-term recurrence in the degree.
fn classical_upto<T: Scalar>(n: usize, idx: &JacobiIndex<T>, y: T, out: &mut Vec<T>) {
    out.clear();
    let (a, b) = (idx.gamma, idx.delta);
    let one = T::one();
    let two = T::of(2.0);
    out.push(one);
    if n == 0 {
        return;
    }
    out.push(((a + b + two) * y + a - b) / two);
    for k in 2..=n {
        let kf = T::of(k as f64);
        let s = two * kf + a + b;
        let c1 = two * kf * (kf + a + b) * (s - two);
        let c2 = (s - one) * (s * (s - two) * y + a * a - b * b);
        let c3 = two * (kf + a - one) * (kf + b - one) * s;
        let next = (c2 * out[k - 1] - c3 * out[k - 2]) / c1;
        out.push(next);
    }
    let at_upper = y == one;
    let at_lower = y == -one;
    if (at_upper || at_lower) && n > ENDPOINT_CLOSED_FORM_MIN_DEGREE {
        for (k, v) in out
            .iter_mut()
            .enumerate()
            .skip(ENDPOINT_CLOSED_FORM_MIN_DEGREE + 1)
        {
            *v = endpoint_value(k, idx, at_upper);
        }
    }
}

/// P_n(1) = Γ(n+γ+1)/(n! Γ(γ+1)); P_n(−1) = (−1)^n Γ(n+δ+1)/(n! Γ(δ+1)).
fn endpoint_value<T: Scalar>(n: usize, idx: &JacobiIndex<T>, upper: bool) -> T {
    let e = if upper { idx.gamma } else { idx.delta };
    let nf = T::of(n as f64);
    let one = T::one();
    let mag = (ln_gamma(nf + e + one) - ln_gamma(nf + one) - ln_gamma(e + one)).exp();
    if !upper && n % 2 == 1 {
        -mag
    } else {
        mag
    }
}

/// Classical (unnormalized) Jacobi polynomial P_n^{(γ,δ)}(y).
pub fn jacobi_classical<T: Scalar>(n: usize, idx: &JacobiIndex<T>, y: T) -> Result<T> {
    idx.validate()?;
    Domain::Standard.check(y)?;
    if n > ENDPOINT_CLOSED_FORM_MIN_DEGREE && (y == T::one() || y == -T::one()) {
        return Ok(endpoint_value(n, idx, y == T::one()));
    }
    let mut buf = Vec::with_capacity(n + 1);
    classical_upto(n, idx, y, &mut buf);
    Ok(buf[n])
}

fn ln_normalization_constant<T: Scalar>(n: usize, idx: &JacobiIndex<T>) -> T {
    let (a, b) = (idx.gamma, idx.delta);
    let one = T::one();
    let ln2 = T::LN_2();
    if n == 0 {
        return (a + b + one) * ln2 + ln_gamma(a + one) + ln_gamma(b + one)
            - ln_gamma(a + b + T::of(2.0));
    }
    let nf = T::of(n as f64);
    (a + b + one) * ln2 - (T::of(2.0) * nf + a + b + one).ln()
        + ln_gamma(nf + a + one)
        + ln_gamma(nf + b + one)
        - ln_gamma(nf + a + b + one)
        - ln_gamma(nf + one)
}

/// h_n = ∫_{−1}^{1} P_n² (1−y)^γ (1+y)^δ dy, computed through log-gamma.
pub fn normalization_constant<T: Scalar>(n: usize, idx: &JacobiIndex<T>) -> T {
    ln_normalization_constant(n, idx).exp()
}

/// Orthonormal p̂_n(y) = P_n(y)/√h_n on [−1, 1] against ρ^{(γ,δ)}.
pub fn jacobi_orthonormal<T: Scalar>(n: usize, idx: &JacobiIndex<T>, y: T) -> Result<T> {
    let p = jacobi_classical(n, idx, y)?;
    Ok(p * (-T::of(0.5) * ln_normalization_constant(n, idx)).exp())
}

/// ln 2^{(γ+δ+1)/2}: turns p̂_n(2t−1) into a family orthonormal against σ^{(γ,δ)}.
fn shifted_log_scale<T: Scalar>(idx: &JacobiIndex<T>) -> T {
    T::of(0.5) * (idx.gamma + idx.delta + T::one()) * T::LN_2()
}

/// Orthonormal q̂_n(t) = 2^{(γ+δ+1)/2} p̂_n(2t−1) on [0, 1] against (1−t)^γ t^δ.
pub fn jacobi_shifted_orthonormal<T: Scalar>(n: usize, idx: &JacobiIndex<T>, t: T) -> Result<T> {
    Domain::Shifted.check(t)?;
    let p = jacobi_orthonormal(n, idx, Domain::Shifted.to_standard(t))?;
    Ok(p * shifted_log_scale(idx).exp())
}

/// ρ^{(η,τ)}(y) = (1−y)^η (1+y)^τ.
pub fn weight_standard<T: Scalar>(exp: &ExponentPair<T>, y: T) -> T {
    (T::one() - y).powf(exp.eta) * (T::one() + y).powf(exp.tau)
}

/// σ^{(η,τ)}(t) = (1−t)^η t^τ.
pub fn weight_shifted<T: Scalar>(exp: &ExponentPair<T>, t: T) -> T {
    (T::one() - t).powf(exp.eta) * t.powf(exp.tau)
}

pub fn weight<T: Scalar>(domain: Domain, exp: &ExponentPair<T>, x: T) -> T {
    match domain {
        Domain::Standard => weight_standard(exp, x),
        Domain::Shifted => weight_shifted(exp, x),
    }
}

/// Result of [`sup_norm_scan`].
#[derive(Debug, Clone, Serialize)]
pub struct SupNormScan<T> {
    /// (degree, max |φ_n| over the grid)
    pub rows: Vec<(usize, T)>,
    /// Least-squares slope of ln max|φ_n| against ln n.
    pub fitted_exponent: T,
    /// The exponent γ of the bound |q_n| ≤ C n^γ.
    pub stated_exponent: T,
    /// Classical growth exponent max(γ, δ, −1/2) + 1/2.
    pub classical_exponent: T,
}

/// Measures sup |φ_n| on a uniform grid and fits its growth exponent in n.
pub fn sup_norm_scan<T: Scalar>(
    idx: &JacobiIndex<T>,
    domain: Domain,
    n_list: &[usize],
    grid_size: usize,
) -> Result<SupNormScan<T>> {
    idx.validate()?;
    if n_list.len() < 3 {
        return Err(Error::InsufficientData {
            needed: 3,
            got: n_list.len(),
        });
    }
    if grid_size < 64 {
        return Err(Error::invalid("grid_size", "must be at least 64"));
    }
    if n_list[0] == 0 || n_list.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::invalid(
            "n_list",
            "degrees must be positive and strictly increasing",
        ));
    }
    let max_n = *n_list.last().unwrap();
    let eval = BasisSpec::new(*idx, domain, max_n)?.evaluator();
    let (lo, hi) = domain.bounds::<T>();
    let mut sup = vec![T::zero(); max_n + 1];
    let mut buf = Vec::new();
    for i in 0..grid_size {
        let x = if i + 1 == grid_size {
            hi
        } else {
            lo + (hi - lo) * T::of(i as f64) / T::of((grid_size - 1) as f64)
        };
        eval.eval_all_into(x, &mut buf)?;
        for (s, v) in sup.iter_mut().zip(&buf) {
            *s = s.max(v.abs());
        }
    }
    let rows: Vec<(usize, T)> = n_list.iter().map(|&n| (n, sup[n])).collect();
    let xs: Vec<T> = rows.iter().map(|(n, _)| T::of(*n as f64).ln()).collect();
    let ys: Vec<T> = rows.iter().map(|(_, s)| s.ln()).collect();
    let fitted_exponent = least_squares_slope(&xs, &ys)?;
    let half = T::of(0.5);
    Ok(SupNormScan {
        rows,
        fitted_exponent,
        stated_exponent: idx.gamma,
        classical_exponent: idx.gamma.max(idx.delta).max(-half) + half,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn idx(g: f64, d: f64) -> JacobiIndex<f64> {
        JacobiIndex::new(g, d).unwrap()
    }

    #[test]
    fn classical_examples() {
        assert_eq!(jacobi_classical(0, &idx(0.3, -0.2), 0.3).unwrap(), 1.0);
        assert_relative_eq!(
            jacobi_classical(1, &idx(1.0, 0.0), 1.0).unwrap(),
            2.0,
            epsilon = 1e-15
        );
        assert_relative_eq!(
            jacobi_classical(3, &idx(0.0, 0.0), 0.5).unwrap(),
            -0.4375,
            epsilon = 1e-15
        );
    }

    #[test]
    fn classical_matches_closed_form_p1_and_legendre() {
        for &(g, d) in &[(0.0, 0.0), (0.5, -0.5), (2.0, 1.5)] {
            for i in 0..=20 {
                let y = -1.0 + 0.1 * i as f64;
                let want = ((g + d + 2.0) * y + g - d) / 2.0;
                assert_relative_eq!(
                    jacobi_classical(1, &idx(g, d), y).unwrap(),
                    want,
                    epsilon = 1e-14
                );
            }
        }
        let y: f64 = 0.37;
        let p4 = (35.0 * y.powi(4) - 30.0 * y * y + 3.0) / 8.0;
        assert_relative_eq!(
            jacobi_classical(4, &idx(0.0, 0.0), y).unwrap(),
            p4,
            epsilon = 1e-14
        );
    }

    #[test]
    fn endpoint_closed_form_agrees_with_recurrence() {
        let j = idx(0.7, 1.3);
        let mut buf = Vec::new();
        // recurrence evaluated just inside the endpoint versus the closed form
        classical_upto(40, &j, 1.0 - 1e-13, &mut buf);
        let closed = endpoint_value(40, &j, true);
        assert_relative_eq!(buf[40], closed, max_relative = 1e-9);
        classical_upto(40, &j, -1.0 + 1e-13, &mut buf);
        let closed = endpoint_value(40, &j, false);
        assert_relative_eq!(buf[40], closed, max_relative = 1e-9);
    }

    #[test]
    fn out_of_domain_and_invalid_index() {
        assert!(matches!(
            jacobi_classical(2, &idx(0.0, 0.0), 1.5),
            Err(Error::OutOfDomain { .. })
        ));
        assert!(jacobi_shifted_orthonormal(2, &idx(0.0, 0.0), -0.1).is_err());
        assert!(JacobiIndex::new(-1.0, 0.0).is_err());
        assert!(JacobiIndex::new(0.0, -1.5).is_err());
        assert!(ExponentPair::new(-0.5, 0.0).is_err());
        let bad = JacobiIndex {
            gamma: -2.0,
            delta: 0.0,
        };
        assert!(jacobi_classical(1, &bad, 0.0).is_err());
    }

    #[test]
    fn normalization_examples() {
        assert_relative_eq!(
            normalization_constant(0, &idx(0.0, 0.0)),
            2.0,
            max_relative = 1e-14
        );
        assert_relative_eq!(
            normalization_constant(1, &idx(0.0, 0.0)),
            2.0 / 3.0,
            max_relative = 1e-14
        );
        assert_relative_eq!(
            normalization_constant(0, &idx(1.0, 0.0)),
            2.0,
            max_relative = 1e-14
        );
        // Chebyshev first kind: h_0 = π, h_n = π/2
        let cheb = idx(-0.5, -0.5);
        assert_relative_eq!(
            normalization_constant(0, &cheb),
            std::f64::consts::PI,
            max_relative = 1e-14
        );
        assert_relative_eq!(
            normalization_constant(5, &cheb),
            std::f64::consts::PI / 2.0 * chebyshev_scale(5),
            max_relative = 1e-12
        );
    }

    // P_n^{(−1/2,−1/2)}(1) = (2n)!/(2^{2n} n!²), so h_n = (π/2)·P_n(1)².
    fn chebyshev_scale(n: u32) -> f64 {
        let mut c = 1.0;
        for k in 1..=n {
            c *= (2 * k - 1) as f64 / (2 * k) as f64;
        }
        c * c
    }

    #[test]
    fn normalization_does_not_overflow() {
        let h = normalization_constant(400, &idx(3.0, 2.5));
        assert!(h.is_finite() && h > 0.0);
    }

    #[test]
    fn orthonormal_examples() {
        let l = idx(0.0, 0.0);
        assert_relative_eq!(
            jacobi_orthonormal(0, &l, 0.42).unwrap(),
            0.5f64.sqrt(),
            max_relative = 1e-14
        );
        assert_relative_eq!(
            jacobi_orthonormal(1, &l, 1.0).unwrap(),
            1.5f64.sqrt(),
            max_relative = 1e-14
        );
        assert_relative_eq!(
            jacobi_shifted_orthonormal(0, &l, 0.8).unwrap(),
            1.0,
            max_relative = 1e-14
        );
        assert_relative_eq!(
            jacobi_shifted_orthonormal(1, &l, 1.0).unwrap(),
            3f64.sqrt(),
            max_relative = 1e-14
        );
    }

    #[test]
    fn weights() {
        let flat = ExponentPair::new(0.0, 0.0).unwrap();
        assert_eq!(weight_standard(&flat, 0.7), 1.0);
        assert_relative_eq!(
            weight_standard(&ExponentPair::new(1.0, 2.0).unwrap(), 0.5),
            1.125
        );
        assert_eq!(
            weight_standard(&ExponentPair::new(1.0, 0.0).unwrap(), 1.0),
            0.0
        );
        assert_eq!(weight_shifted(&flat, 0.2), 1.0);
        assert_relative_eq!(
            weight_shifted(&ExponentPair::new(1.0, 1.0).unwrap(), 0.5),
            0.25
        );
        assert_eq!(
            weight_shifted(&ExponentPair::new(0.0, 2.0).unwrap(), 0.0),
            0.0
        );
    }

    #[test]
    fn evaluator_agrees_with_single_degree_calls() {
        let spec = BasisSpec::new(idx(0.5, 1.5), Domain::Shifted, 30).unwrap();
        let ev = spec.evaluator();
        for &t in &[0.0, 0.13, 0.5, 0.97, 1.0] {
            let all = ev.eval_all(t).unwrap();
            for (n, v) in all.iter().enumerate() {
                assert_relative_eq!(
                    *v,
                    spec.eval(n, t).unwrap(),
                    max_relative = 1e-12,
                    epsilon = 1e-14
                );
            }
        }
        assert!(matches!(
            spec.eval(31, 0.5),
            Err(Error::DegreeOutOfRange { .. })
        ));
    }

    #[test]
    fn sup_norm_legendre_grows_like_sqrt_n() {
        let scan =
            sup_norm_scan(&idx(0.0, 0.0), Domain::Standard, &[4, 8, 16, 32, 64], 513).unwrap();
        assert!(
            (scan.fitted_exponent - 0.5).abs() < 0.1,
            "{}",
            scan.fitted_exponent
        );
        assert_eq!(scan.classical_exponent, 0.5);
        for (n, s) in &scan.rows {
            assert_relative_eq!(*s, (*n as f64 + 0.5).sqrt(), max_relative = 1e-10);
        }
    }

    #[test]
    fn sup_norm_chebyshev_is_bounded() {
        let scan = sup_norm_scan(
            &idx(-0.5, -0.5),
            Domain::Standard,
            &[4, 8, 16, 32, 64],
            1025,
        )
        .unwrap();
        for (_, s) in &scan.rows {
            assert!(*s <= (2.0 / std::f64::consts::PI).sqrt() * (1.0 + 1e-10));
        }
        assert!(scan.fitted_exponent.abs() < 0.05);
    }

    #[test]
    fn sup_norm_needs_three_degrees() {
        assert!(sup_norm_scan(&idx(0.0, 0.0), Domain::Standard, &[1], 128).is_err());
        assert!(sup_norm_scan(&idx(0.0, 0.0), Domain::Standard, &[1, 2, 3], 16).is_err());
    }

    #[test]
    fn reflection_identity_swaps_exponents() {
        let j = idx(0.8, -0.3);
        for n in 0..=20 {
            for i in 0..=10 {
                let y = -1.0 + 0.2 * i as f64;
                let lhs = jacobi_orthonormal(n, &j, -y).unwrap();
                let rhs = if n % 2 == 0 { 1.0 } else { -1.0 }
                    * jacobi_orthonormal(n, &j.swapped(), y).unwrap();
                assert!((lhs - rhs).abs() < 1e-12 * (1.0 + lhs.abs()), "n={n} y={y}");
            }
        }
    }

    #[test]
    fn f32_evaluation() {
        let j = JacobiIndex::new(0.0f32, 0.0f32).unwrap();
        let v = jacobi_classical(3, &j, 0.5f32).unwrap();
        assert!((v + 0.4375).abs() < 1e-6);
    }
}
