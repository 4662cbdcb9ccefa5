//! Random Fourier–Jacobi partial sums S_n (stable, [−1, 1]) and T_n
//! (Wiener, [0, 1]), in coefficient form and in kernel form.

use std::f64::consts::PI;
use std::io::Write;

use serde::Serialize;

use crate::basis::{BasisSpec, Domain, ExponentPair};
use crate::error::{Error, Result};
use crate::integrate::{
    check_path_domain, kernel_integrand, CoefficientKind, RandomCoefficientSample,
};
use crate::quadrature::CoefficientVector;
use crate::stochastic::SamplePath;

/// Where a [`PartialSumEvaluation`] came from.
#[derive(Debug, Clone, Serialize)]
pub struct EvaluationProvenance {
    pub source: String,
    pub kind: CoefficientKind,
    pub master_seed: u64,
}

/// S_n or T_n at every point of a grid, for every replica of a sample.
#[derive(Debug, Clone, Serialize)]
pub struct PartialSumEvaluation {
    pub order: usize,
    pub points: Vec<f64>,
    /// replica × point
    pub values: Vec<Vec<f64>>,
    pub provenance: EvaluationProvenance,
}

impl PartialSumEvaluation {
    /// CSV rows `replica,y,n,value`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["replica", "y", "n", "value"])?;
        for (r, row) in self.values.iter().enumerate() {
            for (y, v) in self.points.iter().zip(row) {
                w.serialize((r, y, self.order, v))?;
            }
        }
        w.flush()?;
        Ok(())
    }
}

/// `m` Chebyshev points of the first kind mapped into the open domain,
/// in increasing order.
pub fn chebyshev_grid(domain: Domain, m: usize) -> Vec<f64> {
    let (a, b) = domain.bounds::<f64>();
    (0..m)
        .rev()
        .map(|j| {
            let c = ((2 * j + 1) as f64 * PI / (2 * m) as f64).cos();
            0.5 * (a + b) + 0.5 * (b - a) * c
        })
        .collect()
}

/// Default 33-point evaluation grid.
pub fn default_evaluation_grid(domain: Domain) -> Vec<f64> {
    chebyshev_grid(domain, 33)
}

fn check_same_basis(a: &BasisSpec<f64>, b: &BasisSpec<f64>) -> Result<()> {
    if a.index != b.index || a.domain != b.domain {
        return Err(Error::BasisMismatch(format!(
            "coefficients use {:?} on {:?}, random sample {:?} on {:?}",
            a.index, a.domain, b.index, b.domain
        )));
    }
    Ok(())
}

fn check_sample_order(sample: &RandomCoefficientSample, n: usize) -> Result<()> {
    if n > sample.basis.max_degree {
        return Err(Error::DegreeOutOfRange {
            n,
            max: sample.basis.max_degree,
        });
    }
    Ok(())
}

/// a_k φ_k(y) for k in `lo..=hi`.
fn weighted_basis(coeffs: &CoefficientVector<f64>, y: f64, hi: usize) -> Result<Vec<f64>> {
    let phi = coeffs.basis.evaluator().eval_all(y)?;
    Ok(coeffs.values[..=hi]
        .iter()
        .zip(&phi)
        .map(|(a, p)| a * p)
        .collect())
}

/// Σ_{k≤n} a_k A_k(ω) φ_k(y) for each replica.
pub fn partial_sum(
    coeffs: &CoefficientVector<f64>,
    random: &RandomCoefficientSample,
    n: usize,
    y: f64,
) -> Result<Vec<f64>> {
    check_same_basis(&coeffs.basis, &random.basis)?;
    coeffs.check_order(n)?;
    check_sample_order(random, n)?;
    let c = weighted_basis(coeffs, y, n)?;
    Ok(random
        .values
        .iter()
        .map(|row| c.iter().zip(row).map(|(ck, a)| ck * a).sum())
        .collect())
}

/// Evaluates S_n (or T_n) for each replica on a grid of points.
pub fn evaluate_partial_sums(
    coeffs: &CoefficientVector<f64>,
    random: &RandomCoefficientSample,
    n: usize,
    points: &[f64],
) -> Result<PartialSumEvaluation> {
    let per_point = points
        .iter()
        .map(|&y| partial_sum(coeffs, random, n, y))
        .collect::<Result<Vec<_>>>()?;
    let values = (0..random.replicas())
        .map(|r| per_point.iter().map(|col| col[r]).collect())
        .collect();
    Ok(PartialSumEvaluation {
        order: n,
        points: points.to_vec(),
        values,
        provenance: EvaluationProvenance {
            source: coeffs.source.clone(),
            kind: random.kind,
            master_seed: random.master_seed,
        },
    })
}

/// ∫ s_n(f, y, t) w^{(η,τ)}(t) dX(t, ω) on one path.
pub fn partial_sum_integral_form(
    coeffs: &CoefficientVector<f64>,
    n: usize,
    y: f64,
    exp: &ExponentPair<f64>,
    path: &SamplePath,
) -> Result<f64> {
    check_path_domain(path, coeffs.basis.domain)?;
    kernel_integrand(coeffs, y, exp, &path.grid, 0..=n)?.integrate(path)
}

/// Reference integral minus S_n, per replica, in coefficient form:
/// Σ_{n<k≤N_ref} a_k A_k(ω) φ_k(y).
pub fn error_against_reference(
    coeffs: &CoefficientVector<f64>,
    random: &RandomCoefficientSample,
    n: usize,
    y: f64,
    n_ref: usize,
) -> Result<Vec<f64>> {
    check_same_basis(&coeffs.basis, &random.basis)?;
    if n_ref < n {
        return Err(Error::invalid(
            "n_ref",
            format!("must be at least n = {n}, got {n_ref}"),
        ));
    }
    coeffs.check_order(n_ref)?;
    check_sample_order(random, n_ref)?;
    let c = weighted_basis(coeffs, y, n_ref)?;
    Ok(random
        .values
        .iter()
        .map(|row| (n + 1..=n_ref).map(|k| c[k] * row[k]).sum())
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis::JacobiIndex;
    use crate::integrate::sample_random_coefficients;
    use crate::quadrature::FunctionSpec;
    use crate::stochastic::ProcessDescriptor;

    fn setup(
        kind: CoefficientKind,
        n: usize,
    ) -> (
        CoefficientVector<f64>,
        RandomCoefficientSample,
        ExponentPair<f64>,
    ) {
        let idx = JacobiIndex::new(0.5, 0.0).unwrap();
        let basis = BasisSpec::new(idx, kind.domain(), n).unwrap();
        let exp = ExponentPair::new(0.25, 0.0).unwrap();
        let d = match kind {
            CoefficientKind::A => ProcessDescriptor::stable(1.5, 1.0).unwrap(),
            CoefficientKind::B => ProcessDescriptor::wiener(1.0).unwrap(),
        };
        let coeffs =
            CoefficientVector::from_function(&FunctionSpec::exponential(1.0), basis).unwrap();
        let s = sample_random_coefficients(kind, basis, exp, d, 512, 11, 3).unwrap();
        (coeffs, s, exp)
    }

    #[test]
    fn chebyshev_grid_is_interior_and_sorted() {
        let g = default_evaluation_grid(Domain::Standard);
        assert_eq!(g.len(), 33);
        assert!(g.windows(2).all(|w| w[0] < w[1]));
        assert!(g[0] > -1.0 && g[32] < 1.0);
        assert!(g[16].abs() < 1e-15);
        let s = chebyshev_grid(Domain::Shifted, 5);
        assert!(s[0] > 0.0 && s[4] < 1.0);
    }

    #[test]
    fn telescoping_increments() {
        let (c, s, _) = setup(CoefficientKind::B, 8);
        let y = 0.3;
        for n in 1..=8 {
            let hi = partial_sum(&c, &s, n, y).unwrap();
            let lo = partial_sum(&c, &s, n - 1, y).unwrap();
            let qn = c.basis.eval(n, y).unwrap();
            for r in 0..s.replicas() {
                let expect = c.values[n] * s.values[r][n] * qn;
                assert!((hi[r] - lo[r] - expect).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn integral_form_agrees_with_coefficient_form() {
        for kind in [CoefficientKind::A, CoefficientKind::B] {
            let (c, s, exp) = setup(kind, 12);
            for r in 0..s.replicas() {
                let path = s.path(r).unwrap();
                for n in [0, 3, 12] {
                    let y = if kind == CoefficientKind::A {
                        -0.4
                    } else {
                        0.7
                    };
                    let coef = partial_sum(&c, &s, n, y).unwrap()[r];
                    let kern = partial_sum_integral_form(&c, n, y, &exp, &path).unwrap();
                    assert!(
                        (coef - kern).abs() <= 1e-10 * coef.abs().max(1e-300),
                        "{coef} {kern}"
                    );
                }
            }
        }
    }

    #[test]
    fn error_vanishes_at_n_ref() {
        let (c, s, _) = setup(CoefficientKind::B, 10);
        let e = error_against_reference(&c, &s, 10, 0.5, 10).unwrap();
        assert!(e.iter().all(|v| *v == 0.0));
        assert!(error_against_reference(&c, &s, 4, 0.5, 11).is_err());
        assert!(error_against_reference(&c, &s, 4, 0.5, 3).is_err());
    }

    #[test]
    fn basis_mismatch_is_rejected() {
        let (c, _, _) = setup(CoefficientKind::B, 4);
        let (_, s, _) = setup(CoefficientKind::A, 4);
        assert!(matches!(
            partial_sum(&c, &s, 2, 0.5),
            Err(Error::BasisMismatch(_))
        ));
    }

    #[test]
    fn evaluation_csv_shape() {
        let (c, s, _) = setup(CoefficientKind::B, 4);
        let ev = evaluate_partial_sums(&c, &s, 3, &[0.2, 0.8]).unwrap();
        assert_eq!(ev.values.len(), 3);
        let mut buf = Vec::new();
        ev.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), 1 + 6);
        assert!(text.starts_with("replica,y,n,value"));
    }
}
