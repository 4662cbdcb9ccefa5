//! Stochastic integrals of deterministic integrands against sampled paths,
//! and the random Fourier–Jacobi coefficients A_n(ω), B_n(ω).

use std::ops::RangeInclusive;
use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;

use crate::basis::{weight, BasisSpec, Domain, ExponentPair, JacobiIndex};
use crate::error::{Error, Result};
use crate::quadrature::CoefficientVector;
use crate::stochastic::{replica_path, ProcessDescriptor, SamplePath, TimeGrid};

/// Runs `f` for replicas `0..count` in parallel and returns the results in
/// replica order, so downstream reductions are independent of scheduling.
pub(crate) fn map_replicas<R, F>(count: usize, f: F) -> Result<Vec<R>>
where
    R: Send,
    F: Fn(u64) -> Result<R> + Sync + Send,
{
    (0..count as u64).into_par_iter().map(f).collect()
}

/// Left-point Riemann–Stieltjes sum Σ g(t_i)(X(t_{i+1}) − X(t_i)).
pub fn stochastic_integral<F: Fn(f64) -> f64>(integrand: F, path: &SamplePath) -> Result<f64> {
    let mut acc = 0.0;
    for (t, dx) in path.grid.left_points().iter().zip(path.increments()) {
        let g = integrand(*t);
        if !g.is_finite() {
            return Err(Error::NonFinite { at: *t });
        }
        acc += g * dx;
    }
    Ok(acc)
}

/// Midpoint-evaluated sum Σ g((t_i + t_{i+1})/2)(X(t_{i+1}) − X(t_i)).
pub fn stochastic_integral_midpoint<F: Fn(f64) -> f64>(
    integrand: F,
    path: &SamplePath,
) -> Result<f64> {
    let mut acc = 0.0;
    for (w, dx) in path.grid.points().windows(2).zip(path.increments()) {
        let t = 0.5 * (w[0] + w[1]);
        let g = integrand(t);
        if !g.is_finite() {
            return Err(Error::NonFinite { at: t });
        }
        acc += g * dx;
    }
    Ok(acc)
}

/// An integrand tabulated at the left points t_0..t_{L−1} of a grid.
#[derive(Debug, Clone)]
pub struct GridIntegrand {
    values: Vec<f64>,
}

impl GridIntegrand {
    pub fn tabulate<F: FnMut(f64) -> Result<f64>>(grid: &TimeGrid, mut f: F) -> Result<Self> {
        let values = grid
            .left_points()
            .iter()
            .map(|&t| {
                let v = f(t)?;
                if v.is_finite() {
                    Ok(v)
                } else {
                    Err(Error::NonFinite { at: t })
                }
            })
            .collect::<Result<Vec<f64>>>()?;
        Ok(GridIntegrand { values })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn integrate(&self, path: &SamplePath) -> Result<f64> {
        if path.grid.intervals() != self.values.len() {
            return Err(Error::invalid(
                "path",
                format!(
                    "grid has {} intervals, integrand {}",
                    path.grid.intervals(),
                    self.values.len()
                ),
            ));
        }
        Ok(self
            .values
            .iter()
            .zip(path.increments())
            .map(|(g, dx)| g * dx)
            .sum())
    }
}

/// Tabulates Σ_{k∈range} a_k φ_k(y) φ_k(t) · w^{(η,τ)}(t) on the grid.
///
/// With `range = 0..=n` this is the integrand of the integral form of the
/// n-th random partial sum; other ranges give differences of partial sums
/// without cancellation.
pub fn kernel_integrand(
    coeffs: &CoefficientVector<f64>,
    y: f64,
    exp: &ExponentPair<f64>,
    grid: &TimeGrid,
    range: RangeInclusive<usize>,
) -> Result<GridIntegrand> {
    coeffs.check_order(*range.end())?;
    let ev = coeffs.basis.evaluator();
    let py = ev.eval_all(y)?;
    let c: Vec<(usize, f64)> = range.map(|k| (k, coeffs.values[k] * py[k])).collect();
    let domain = coeffs.basis.domain;
    let mut buf = Vec::new();
    GridIntegrand::tabulate(grid, |t| {
        ev.eval_all_into(t, &mut buf)?;
        let s: f64 = c.iter().map(|&(k, ck)| ck * buf[k]).sum();
        Ok(s * weight(domain, exp, t))
    })
}

/// Kernel integrand of the difference s_N(x₂, ·) − s_N(x₁, ·), times the weight.
pub(crate) fn kernel_difference_integrand(
    coeffs: &CoefficientVector<f64>,
    x1: f64,
    x2: f64,
    exp: &ExponentPair<f64>,
    grid: &TimeGrid,
) -> Result<GridIntegrand> {
    let n = coeffs.max_order();
    let ev = coeffs.basis.evaluator();
    let p1 = ev.eval_all(x1)?;
    let p2 = ev.eval_all(x2)?;
    let c: Vec<f64> = (0..=n)
        .map(|k| coeffs.values[k] * (p2[k] - p1[k]))
        .collect();
    let domain = coeffs.basis.domain;
    let mut buf = Vec::new();
    GridIntegrand::tabulate(grid, |t| {
        ev.eval_all_into(t, &mut buf)?;
        let s: f64 = c.iter().zip(&buf).map(|(ck, pk)| ck * pk).sum();
        Ok(s * weight(domain, exp, t))
    })
}

/// Which random coefficient family a sample holds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum CoefficientKind {
    /// Stable-driven A_n on [−1, 1] with ρ^{(η,τ)}.
    A,
    /// Wiener-driven B_n on [0, 1] with σ^{(η,τ)}.
    B,
}

impl CoefficientKind {
    pub fn domain(self) -> Domain {
        match self {
            CoefficientKind::A => Domain::Standard,
            CoefficientKind::B => Domain::Shifted,
        }
    }

    fn check_path(self, path: &SamplePath) -> Result<()> {
        let ok = matches!(
            (self, path.descriptor),
            (
                CoefficientKind::A,
                ProcessDescriptor::StableSymmetric { .. }
            ) | (CoefficientKind::B, ProcessDescriptor::Wiener { .. })
        );
        if !ok {
            return Err(Error::DescriptorMismatch {
                expected: if self == CoefficientKind::A {
                    "stable"
                } else {
                    "wiener"
                },
                found: path.descriptor.name().to_string(),
            });
        }
        check_path_domain(path, self.domain())
    }
}

pub(crate) fn check_path_domain(path: &SamplePath, domain: Domain) -> Result<()> {
    if path.grid.matches_domain(domain) {
        Ok(())
    } else {
        Err(Error::invalid(
            "path",
            format!(
                "grid spans [{}, {}], basis domain is {:?}",
                path.grid.start(),
                path.grid.end(),
                domain
            ),
        ))
    }
}

fn basis_coefficient(
    kind: CoefficientKind,
    n: usize,
    idx: &JacobiIndex<f64>,
    exp: &ExponentPair<f64>,
    path: &SamplePath,
) -> Result<f64> {
    kind.check_path(path)?;
    exp.validate()?;
    let basis = BasisSpec::new(*idx, kind.domain(), n)?;
    let g = GridIntegrand::tabulate(&path.grid, |t| {
        Ok(basis.eval(n, t)? * weight(kind.domain(), exp, t))
    })?;
    g.integrate(path)
}

/// A_n(ω) = ∫_{−1}^{1} p̂_n(t) ρ^{(η,τ)}(t) dX(t, ω) for a stable path.
pub fn coefficient_a(
    n: usize,
    idx: &JacobiIndex<f64>,
    exp: &ExponentPair<f64>,
    path: &SamplePath,
) -> Result<f64> {
    basis_coefficient(CoefficientKind::A, n, idx, exp, path)
}

/// B_n(ω) = ∫_0^1 q̂_n(t) σ^{(η,τ)}(t) dW(t, ω) for a Wiener path.
pub fn coefficient_b(
    n: usize,
    idx: &JacobiIndex<f64>,
    exp: &ExponentPair<f64>,
    path: &SamplePath,
) -> Result<f64> {
    basis_coefficient(CoefficientKind::B, n, idx, exp, path)
}

/// φ_k(t) w^{(η,τ)}(t) tabulated on a grid for every degree of a basis.
#[derive(Debug, Clone)]
pub struct CoefficientIntegrands {
    rows: Vec<Vec<f64>>,
}

impl CoefficientIntegrands {
    pub fn new(basis: &BasisSpec<f64>, exp: &ExponentPair<f64>, grid: &TimeGrid) -> Result<Self> {
        let ev = basis.evaluator();
        let mut rows = vec![Vec::with_capacity(grid.intervals()); basis.max_degree + 1];
        let mut buf = Vec::new();
        for &t in grid.left_points() {
            ev.eval_all_into(t, &mut buf)?;
            let w = weight(basis.domain, exp, t);
            for (row, v) in rows.iter_mut().zip(&buf) {
                row.push(v * w);
            }
        }
        Ok(CoefficientIntegrands { rows })
    }

    /// All coefficients 0..=N of one path, reusing its increments.
    pub fn integrate(&self, path: &SamplePath) -> Vec<f64> {
        let inc: Vec<f64> = path.increments().collect();
        self.rows
            .iter()
            .map(|row| row.iter().zip(&inc).map(|(g, dx)| g * dx).sum())
            .collect()
    }
}

/// Per-replica random coefficients (replica × degree).
#[derive(Debug, Clone, Serialize)]
pub struct RandomCoefficientSample {
    pub values: Vec<Vec<f64>>,
    pub kind: CoefficientKind,
    pub basis: BasisSpec<f64>,
    pub measure_exponents: ExponentPair<f64>,
    pub descriptor: ProcessDescriptor,
    pub master_seed: u64,
    pub intervals: usize,
}

impl RandomCoefficientSample {
    pub fn replicas(&self) -> usize {
        self.values.len()
    }

    /// Column n across replicas.
    pub fn degree(&self, n: usize) -> Vec<f64> {
        self.values.iter().map(|row| row[n]).collect()
    }

    /// Regenerates the path that produced row `replica`.
    pub fn path(&self, replica: usize) -> Result<SamplePath> {
        let grid = Arc::new(TimeGrid::for_domain(self.kind.domain(), self.intervals)?);
        replica_path(&self.descriptor, &grid, self.master_seed, replica as u64)
    }
}

/// Samples coefficients 0..=N on `replicas` independent paths. Row r uses the
/// path of replica r, shared by every degree.
pub fn sample_random_coefficients(
    kind: CoefficientKind,
    basis: BasisSpec<f64>,
    exp: ExponentPair<f64>,
    descriptor: ProcessDescriptor,
    intervals: usize,
    master_seed: u64,
    replicas: usize,
) -> Result<RandomCoefficientSample> {
    if basis.domain != kind.domain() {
        return Err(Error::BasisMismatch(format!(
            "coefficient kind {kind:?} lives on {:?}, basis on {:?}",
            kind.domain(),
            basis.domain
        )));
    }
    exp.validate()?;
    descriptor.validate()?;
    let grid = Arc::new(TimeGrid::for_domain(kind.domain(), intervals)?);
    let integrands = CoefficientIntegrands::new(&basis, &exp, &grid)?;
    let values = map_replicas(replicas, |r| {
        let path = replica_path(&descriptor, &grid, master_seed, r)?;
        kind.check_path(&path)?;
        Ok(integrands.integrate(&path))
    })?;
    Ok(RandomCoefficientSample {
        values,
        kind,
        basis,
        measure_exponents: exp,
        descriptor,
        master_seed,
        intervals,
    })
}

/// ∫ s_{N_ref}(f, y, t) w^{(η,τ)}(t) dX(t, ω): the finite-order stand-in for
/// the limit integral of the random series.
pub fn reference_integral(
    coeffs: &CoefficientVector<f64>,
    y: f64,
    exp: &ExponentPair<f64>,
    path: &SamplePath,
    n_ref: usize,
) -> Result<f64> {
    check_path_domain(path, coeffs.basis.domain)?;
    kernel_integrand(coeffs, y, exp, &path.grid, 0..=n_ref)?.integrate(path)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis::{jacobi_orthonormal, jacobi_shifted_orthonormal};
    use crate::quadrature::FunctionSpec;
    use crate::stochastic::make_replica_rng;
    use crate::stochastic::sample_stable_path;

    fn flat() -> ExponentPair<f64> {
        ExponentPair::new(0.0, 0.0).unwrap()
    }

    fn legendre() -> JacobiIndex<f64> {
        JacobiIndex::new(0.0, 0.0).unwrap()
    }

    #[test]
    fn constant_integrand_telescopes() {
        let g = Arc::new(TimeGrid::uniform(0.0, 1.0, 256).unwrap());
        let p = replica_path(&ProcessDescriptor::wiener(1.0).unwrap(), &g, 4, 0).unwrap();
        let v = stochastic_integral(|_| 1.0, &p).unwrap();
        assert!((v - p.terminal()).abs() < 1e-13);
        assert!(stochastic_integral(|t| if t > 0.5 { f64::NAN } else { 1.0 }, &p).is_err());
    }

    #[test]
    fn coefficient_b_zero_is_terminal_value() {
        let g = Arc::new(TimeGrid::uniform(0.0, 1.0, 128).unwrap());
        let p = replica_path(&ProcessDescriptor::wiener(1.0).unwrap(), &g, 4, 1).unwrap();
        let b0 = coefficient_b(0, &legendre(), &flat(), &p).unwrap();
        assert!((b0 - p.terminal()).abs() < 1e-13);
    }

    #[test]
    fn coefficient_a_zero_is_scaled_increment() {
        let g = Arc::new(TimeGrid::uniform(-1.0, 1.0, 128).unwrap());
        let p = sample_stable_path(&g, 1.5, 1.0, &mut make_replica_rng(5, 0)).unwrap();
        let a0 = coefficient_a(0, &legendre(), &flat(), &p).unwrap();
        assert!((a0 - p.terminal() / 2f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn descriptor_and_domain_mismatch() {
        let g = Arc::new(TimeGrid::uniform(0.0, 1.0, 16).unwrap());
        let w = replica_path(&ProcessDescriptor::wiener(1.0).unwrap(), &g, 0, 0).unwrap();
        assert!(matches!(
            coefficient_a(1, &legendre(), &flat(), &w),
            Err(Error::DescriptorMismatch { .. })
        ));
        let s = replica_path(&ProcessDescriptor::stable(1.5, 1.0).unwrap(), &g, 0, 0).unwrap();
        assert!(coefficient_a(1, &legendre(), &flat(), &s).is_err());
    }

    #[test]
    fn linearity_per_path() {
        let g = Arc::new(TimeGrid::uniform(0.0, 1.0, 512).unwrap());
        let p = replica_path(&ProcessDescriptor::wiener(1.3).unwrap(), &g, 9, 2).unwrap();
        let f = |t: f64| (3.0 * t).sin();
        let h = |t: f64| t * t - 0.2;
        let lhs = stochastic_integral(|t| 2.0 * f(t) - 0.5 * h(t), &p).unwrap();
        let rhs =
            2.0 * stochastic_integral(f, &p).unwrap() - 0.5 * stochastic_integral(h, &p).unwrap();
        assert!((lhs - rhs).abs() < 1e-12);
    }

    #[test]
    fn sampled_coefficients_match_single_calls() {
        let basis =
            BasisSpec::new(JacobiIndex::new(0.5, 1.0).unwrap(), Domain::Shifted, 6).unwrap();
        let exp = ExponentPair::new(0.25, 0.5).unwrap();
        let d = ProcessDescriptor::wiener(1.0).unwrap();
        let s = sample_random_coefficients(CoefficientKind::B, basis, exp, d, 256, 77, 4).unwrap();
        for r in 0..4 {
            let p = s.path(r).unwrap();
            for n in 0..=6 {
                let b = coefficient_b(n, &basis.index, &exp, &p).unwrap();
                assert!((b - s.values[r][n]).abs() < 1e-12 * (1.0 + b.abs()));
            }
        }
        assert!(sample_random_coefficients(CoefficientKind::A, basis, exp, d, 256, 77, 4).is_err());
    }

    #[test]
    fn reference_of_unit_vector_truncates() {
        let j = legendre();
        let basis = BasisSpec::new(j, Domain::Standard, 12).unwrap();
        let coeffs =
            CoefficientVector::from_function(&FunctionSpec::basis_element(1, j), basis).unwrap();
        let g = Arc::new(TimeGrid::uniform(-1.0, 1.0, 256).unwrap());
        let p = replica_path(&ProcessDescriptor::stable(1.2, 1.0).unwrap(), &g, 1, 0).unwrap();
        let y = 0.4;
        let py = jacobi_orthonormal(1, &j, y).unwrap();
        let direct =
            stochastic_integral(|t| py * jacobi_orthonormal(1, &j, t).unwrap(), &p).unwrap();
        for n_ref in [1, 4, 12] {
            let r = reference_integral(&coeffs, y, &flat(), &p, n_ref).unwrap();
            assert!((r - direct).abs() < 1e-12 * (1.0 + direct.abs()));
        }
        assert!(reference_integral(&coeffs, y, &flat(), &p, 13).is_err());
    }

    #[test]
    fn reference_of_polynomial_is_stable_in_n_ref() {
        let j = legendre();
        let basis = BasisSpec::new(j, Domain::Shifted, 40).unwrap();
        let coeffs = CoefficientVector::from_function(&FunctionSpec::monomial(3), basis).unwrap();
        let g = Arc::new(TimeGrid::uniform(0.0, 1.0, 512).unwrap());
        let p = replica_path(&ProcessDescriptor::wiener(1.0).unwrap(), &g, 2, 0).unwrap();
        let r3 = reference_integral(&coeffs, 0.3, &flat(), &p, 3).unwrap();
        let r40 = reference_integral(&coeffs, 0.3, &flat(), &p, 40).unwrap();
        assert!((r3 - r40).abs() < 1e-12);
        let q = jacobi_shifted_orthonormal(0, &j, 0.3).unwrap();
        assert!(q > 0.0);
    }
}
