//! Deterministic test functions f on [−1, 1] or [0, 1].

use std::io::Read;

use serde::Serialize;

use super::QuadratureRule;
use crate::basis::{jacobi_orthonormal, jacobi_shifted_orthonormal, Domain, JacobiIndex};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Which endpoint a singular factor sits on. `Right` is (1−y)^s (or (1−t)^s),
/// `Left` is (1+y)^s (or t^s).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Left,
    Right,
}

#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FunctionKind<T> {
    Constant(T),
    /// x^k in the domain's own variable.
    Monomial(u32),
    /// (1−x)^s or (1+x)^s (t^s on [0, 1]) with −1 < s < 0.
    EndpointSingular {
        side: Side,
        exponent: T,
    },
    /// Indicator of x ≥ point.
    StepAt(T),
    /// The orthonormal basis polynomial of the given degree on the evaluation domain.
    BasisElement {
        degree: usize,
        index: JacobiIndex<T>,
    },
    /// e^{rate·x}
    Exponential {
        rate: T,
    },
    UserTable(UserTable<T>),
    /// Linear combination Σ cᵢ fᵢ.
    Sum(Vec<(T, FunctionSpec<T>)>),
}

/// A function together with a descriptive id used in provenance records.
#[derive(Debug, Clone, Serialize)]
pub struct FunctionSpec<T> {
    pub kind: FunctionKind<T>,
    pub id: String,
}

impl<T: Scalar> FunctionSpec<T> {
    pub fn new(kind: FunctionKind<T>, id: impl Into<String>) -> Result<Self> {
        if let FunctionKind::EndpointSingular { exponent, .. } = &kind {
            if !(*exponent > -T::one() && *exponent < T::zero()) {
                return Err(Error::invalid(
                    "exponent",
                    "endpoint singularity exponent must lie in (-1, 0)",
                ));
            }
        }
        Ok(FunctionSpec {
            kind,
            id: id.into(),
        })
    }

    pub fn constant(c: T) -> Self {
        FunctionSpec {
            kind: FunctionKind::Constant(c),
            id: format!("constant:{c}"),
        }
    }

    pub fn monomial(k: u32) -> Self {
        FunctionSpec {
            kind: FunctionKind::Monomial(k),
            id: format!("monomial:{k}"),
        }
    }

    pub fn singular(side: Side, exponent: T) -> Result<Self> {
        let id = format!(
            "singular:{}:{exponent}",
            if side == Side::Left { "left" } else { "right" }
        );
        Self::new(FunctionKind::EndpointSingular { side, exponent }, id)
    }

    pub fn step(at: T) -> Self {
        FunctionSpec {
            kind: FunctionKind::StepAt(at),
            id: format!("step:{at}"),
        }
    }

    pub fn basis_element(degree: usize, index: JacobiIndex<T>) -> Self {
        FunctionSpec {
            kind: FunctionKind::BasisElement { degree, index },
            id: format!("basis:{degree}:{}:{}", index.gamma, index.delta),
        }
    }

    pub fn exponential(rate: T) -> Self {
        FunctionSpec {
            kind: FunctionKind::Exponential { rate },
            id: format!("exp:{rate}"),
        }
    }

    pub fn table(table: UserTable<T>, id: impl Into<String>) -> Self {
        FunctionSpec {
            kind: FunctionKind::UserTable(table),
            id: id.into(),
        }
    }

    pub fn sum(terms: Vec<(T, FunctionSpec<T>)>) -> Self {
        let id = terms
            .iter()
            .map(|(c, f)| format!("{c}*{}", f.id))
            .collect::<Vec<_>>()
            .join("+");
        FunctionSpec {
            kind: FunctionKind::Sum(terms),
            id,
        }
    }

    /// f(x) with x in the given domain's own variable.
    pub fn eval(&self, x: T, domain: Domain) -> Result<T> {
        let one = T::one();
        let v = match &self.kind {
            FunctionKind::Constant(c) => *c,
            FunctionKind::Monomial(k) => x.powi(*k as i32),
            FunctionKind::EndpointSingular { side, exponent } => {
                let base = match (domain, side) {
                    (Domain::Standard, Side::Right) | (Domain::Shifted, Side::Right) => one - x,
                    (Domain::Standard, Side::Left) => one + x,
                    (Domain::Shifted, Side::Left) => x,
                };
                base.powf(*exponent)
            }
            FunctionKind::StepAt(p) => {
                if x >= *p {
                    one
                } else {
                    T::zero()
                }
            }
            FunctionKind::BasisElement { degree, index } => match domain {
                Domain::Standard => jacobi_orthonormal(*degree, index, x)?,
                Domain::Shifted => jacobi_shifted_orthonormal(*degree, index, x)?,
            },
            FunctionKind::Exponential { rate } => (*rate * x).exp(),
            FunctionKind::UserTable(t) => t.eval(x)?,
            FunctionKind::Sum(terms) => {
                let mut acc = T::zero();
                for (c, f) in terms {
                    acc = acc + *c * f.eval(x, domain)?;
                }
                acc
            }
        };
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::NonFinite {
                at: x.to_f64().unwrap_or(f64::NAN),
            })
        }
    }

    /// Exact polynomial degree when the kind is a polynomial.
    pub fn polynomial_degree(&self) -> Option<usize> {
        match &self.kind {
            FunctionKind::Constant(_) => Some(0),
            FunctionKind::Monomial(k) => Some(*k as usize),
            FunctionKind::BasisElement { degree, .. } => Some(*degree),
            FunctionKind::Sum(terms) => terms
                .iter()
                .map(|(_, f)| f.polynomial_degree())
                .try_fold(0usize, |acc, d| d.map(|d| acc.max(d))),
            _ => None,
        }
    }

    /// The endpoint factor that can be folded into a quadrature measure, if any.
    pub fn singular_factor(&self) -> Option<(Side, T)> {
        match &self.kind {
            FunctionKind::EndpointSingular { side, exponent } => Some((*side, *exponent)),
            _ => None,
        }
    }

    /// True when an endpoint singularity is buried somewhere the measure cannot absorb it.
    pub fn has_unabsorbed_singularity(&self) -> bool {
        match &self.kind {
            FunctionKind::Sum(terms) => terms
                .iter()
                .any(|(_, f)| f.singular_factor().is_some() || f.has_unabsorbed_singularity()),
            _ => false,
        }
    }
}

/// Σ wᵢ f(xᵢ) over the rule's nodes.
pub fn integrate_weighted<T: Scalar>(f: &FunctionSpec<T>, rule: &QuadratureRule<T>) -> Result<T> {
    let mut acc = T::zero();
    for (&x, &w) in rule.nodes().iter().zip(rule.weights()) {
        acc = acc + w * f.eval(x, rule.domain())?;
    }
    Ok(acc)
}

/// Tabulated function, evaluated by a natural cubic spline.
#[derive(Debug, Clone, Serialize)]
pub struct UserTable<T> {
    points: Vec<T>,
    values: Vec<T>,
    #[serde(skip)]
    second: Vec<T>,
}

impl<T: Scalar> UserTable<T> {
    pub fn from_points(points: Vec<T>, values: Vec<T>) -> Result<Self> {
        if points.len() != values.len() {
            return Err(Error::Table("column lengths differ".into()));
        }
        if points.len() < 2 {
            return Err(Error::InsufficientData {
                needed: 2,
                got: points.len(),
            });
        }
        if let Some(i) = points.windows(2).position(|w| !(w[1] > w[0])) {
            return Err(Error::Table(format!(
                "first column not strictly increasing at row {}",
                i + 1
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Table("non-finite value".into()));
        }
        let second = natural_spline_second_derivatives(&points, &values);
        Ok(UserTable {
            points,
            values,
            second,
        })
    }

    /// Two-column CSV `(t, f(t))`; a non-numeric first row is taken as a header.
    pub fn from_csv<R: Read>(reader: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(false)
            .trim(csv::Trim::All)
            .from_reader(reader);
        let mut pts = Vec::new();
        let mut vals = Vec::new();
        for (row, rec) in rdr.records().enumerate() {
            let rec = rec?;
            if rec.len() != 2 {
                return Err(Error::Table(format!(
                    "row {} has {} columns, expected 2",
                    row + 1,
                    rec.len()
                )));
            }
            let parsed = (rec[0].parse::<f64>(), rec[1].parse::<f64>());
            match parsed {
                (Ok(t), Ok(v)) => {
                    pts.push(T::of(t));
                    vals.push(T::of(v));
                }
                _ if row == 0 => continue,
                _ => return Err(Error::Table(format!("row {} is not numeric", row + 1))),
            }
        }
        Self::from_points(pts, vals)
    }

    pub fn points(&self) -> &[T] {
        &self.points
    }

    pub fn eval(&self, x: T) -> Result<T> {
        let n = self.points.len();
        let (lo, hi) = (self.points[0], self.points[n - 1]);
        if !(x >= lo && x <= hi) {
            return Err(Error::OutOfDomain {
                value: x.to_f64().unwrap_or(f64::NAN),
                lo: lo.to_f64().unwrap_or(f64::NAN),
                hi: hi.to_f64().unwrap_or(f64::NAN),
            });
        }
        let k = match self.points.partition_point(|&p| p <= x) {
            0 => 0,
            i if i >= n => n - 2,
            i => i - 1,
        };
        let h = self.points[k + 1] - self.points[k];
        let a = (self.points[k + 1] - x) / h;
        let b = (x - self.points[k]) / h;
        let six = T::of(6.0);
        Ok(a * self.values[k]
            + b * self.values[k + 1]
            + ((a * a * a - a) * self.second[k] + (b * b * b - b) * self.second[k + 1]) * h * h
                / six)
    }
}

fn natural_spline_second_derivatives<T: Scalar>(x: &[T], y: &[T]) -> Vec<T> {
    let n = x.len();
    let mut m = vec![T::zero(); n];
    if n < 3 {
        return m;
    }
    let two = T::of(2.0);
    let six = T::of(6.0);
    // Thomas algorithm on the interior equations.
    let mut c_prime = vec![T::zero(); n];
    let mut d_prime = vec![T::zero(); n];
    for i in 1..n - 1 {
        let h0 = x[i] - x[i - 1];
        let h1 = x[i + 1] - x[i];
        let rhs = six * ((y[i + 1] - y[i]) / h1 - (y[i] - y[i - 1]) / h0);
        let diag = two * (h0 + h1) - h0 * c_prime[i - 1];
        c_prime[i] = h1 / diag;
        d_prime[i] = (rhs - h0 * d_prime[i - 1]) / diag;
    }
    for i in (1..n - 1).rev() {
        m[i] = d_prime[i] - c_prime[i] * m[i + 1];
    }
    m
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn singular_exponent_validated() {
        assert!(FunctionSpec::singular(Side::Right, -1.0).is_err());
        assert!(FunctionSpec::singular(Side::Right, 0.5).is_err());
        assert!(FunctionSpec::singular(Side::Left, -0.5).is_ok());
    }

    #[test]
    fn singular_blows_up_at_its_endpoint() {
        let f = FunctionSpec::singular(Side::Right, -0.5).unwrap();
        assert!(f.eval(1.0, Domain::Standard).is_err());
        assert_relative_eq!(f.eval(0.0, Domain::Standard).unwrap(), 1.0);
        let g = FunctionSpec::singular(Side::Left, -0.5).unwrap();
        assert_relative_eq!(g.eval(0.25, Domain::Shifted).unwrap(), 2.0);
    }

    #[test]
    fn polynomial_degrees() {
        assert_eq!(
            FunctionSpec::<f64>::constant(3.0).polynomial_degree(),
            Some(0)
        );
        assert_eq!(
            FunctionSpec::<f64>::monomial(4).polynomial_degree(),
            Some(4)
        );
        let s = FunctionSpec::sum(vec![
            (1.0, FunctionSpec::monomial(2)),
            (2.0, FunctionSpec::monomial(5)),
        ]);
        assert_eq!(s.polynomial_degree(), Some(5));
        let s = FunctionSpec::sum(vec![
            (1.0, FunctionSpec::monomial(2)),
            (2.0, FunctionSpec::exponential(1.0)),
        ]);
        assert_eq!(s.polynomial_degree(), None);
    }

    #[test]
    fn spline_reproduces_cubic_interior_and_linear_data() {
        let pts: Vec<f64> = (0..=10).map(|i| i as f64 / 10.0).collect();
        let lin: Vec<f64> = pts.iter().map(|t| 2.0 * t - 1.0).collect();
        let t = UserTable::from_points(pts.clone(), lin).unwrap();
        assert_relative_eq!(t.eval(0.33).unwrap(), -0.34, epsilon = 1e-14);
        let vals: Vec<f64> = pts.iter().map(|t| t.sin()).collect();
        let t = UserTable::from_points(pts, vals).unwrap();
        assert!((t.eval(0.55).unwrap() - 0.55f64.sin()).abs() < 1e-4);
        assert!(t.eval(1.2).is_err());
    }

    #[test]
    fn csv_with_and_without_header() {
        let with = "t,f\n0,0\n0.5,0.25\n1,1\n";
        let t = UserTable::<f64>::from_csv(with.as_bytes()).unwrap();
        assert_eq!(t.points().len(), 3);
        let without = "0,0\n0.5,0.25\n1,1\n";
        assert_eq!(
            UserTable::<f64>::from_csv(without.as_bytes())
                .unwrap()
                .points()
                .len(),
            3
        );
        let bad = "0,0\n0.5,0.25\n0.4,1\n";
        assert!(UserTable::<f64>::from_csv(bad.as_bytes()).is_err());
    }
}
