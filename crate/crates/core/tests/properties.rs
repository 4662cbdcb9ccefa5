use std::sync::Arc;

use num_rational::Rational64;
use proptest::prelude::*;
use rfjacobi::basis::{jacobi_orthonormal, BasisSpec, Domain, ExponentPair, JacobiIndex};
use rfjacobi::diagnostics::{check_stable_conditions, check_wiener_conditions};
use rfjacobi::integrate::GridIntegrand;
use rfjacobi::quadrature::{gauss_jacobi_rule, jacobi_mass, CoefficientVector};
use rfjacobi::series::partial_sum_integral_form;
use rfjacobi::stochastic::{replica_path, ProcessDescriptor, TimeGrid};

fn exponent() -> impl Strategy<Value = f64> {
    -0.9f64..3.0
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn reflection_symmetry(g in exponent(), d in exponent(), n in 0usize..30, y in -1.0f64..1.0) {
        let a = jacobi_orthonormal(n, &JacobiIndex::new(g, d).unwrap(), -y).unwrap();
        let b = jacobi_orthonormal(n, &JacobiIndex::new(d, g).unwrap(), y).unwrap();
        let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
        prop_assert!((a - sign * b).abs() <= 1e-9 * (1.0 + b.abs()));
    }

    #[test]
    fn rule_weights_sum_to_mass(g in exponent(), d in exponent(), k in 1usize..40) {
        let rule = gauss_jacobi_rule(k, (g, d), Domain::Shifted).unwrap();
        let sum: f64 = rule.weights().iter().sum();
        let mass = jacobi_mass(g, d, Domain::Shifted);
        prop_assert!(rule.weights().iter().all(|w| *w > 0.0));
        prop_assert!(rule.nodes().windows(2).all(|w| w[0] < w[1]));
        prop_assert!((sum - mass).abs() <= 1e-11 * mass);
    }

    #[test]
    fn integral_is_linear_in_the_integrand(a in -3.0f64..3.0, b in -3.0f64..3.0, seed in 0u64..1000) {
        let grid = Arc::new(TimeGrid::for_domain(Domain::Standard, 256).unwrap());
        let path = replica_path(&ProcessDescriptor::stable(1.3, 1.0).unwrap(), &grid, seed, 0).unwrap();
        let f = GridIntegrand::tabulate(&grid, |t| Ok(t.sin())).unwrap();
        let g = GridIntegrand::tabulate(&grid, |t| Ok(t * t)).unwrap();
        let h = GridIntegrand::tabulate(&grid, |t| Ok(a * t.sin() + b * t * t)).unwrap();
        let (fi, gi, hi) = (f.integrate(&path).unwrap(), g.integrate(&path).unwrap(), h.integrate(&path).unwrap());
        let scale = (a * fi).abs() + (b * gi).abs() + 1e-300;
        prop_assert!((hi - a * fi - b * gi).abs() <= 1e-12 * scale.max(1.0));
    }

    #[test]
    fn integral_form_is_linear_in_the_coefficients(
        c in prop::collection::vec(-1.0f64..1.0, 9),
        y in 0.0f64..1.0,
        seed in 0u64..1000,
    ) {
        let idx = JacobiIndex::new(0.5, 0.0).unwrap();
        let basis = BasisSpec::new(idx, Domain::Shifted, 8).unwrap();
        let exp = ExponentPair::new(0.25, 0.0).unwrap();
        let grid = Arc::new(TimeGrid::for_domain(Domain::Shifted, 256).unwrap());
        let path = replica_path(&ProcessDescriptor::wiener(1.0).unwrap(), &grid, seed, 0).unwrap();
        let whole = CoefficientVector::from_values(c.clone(), basis, "random").unwrap();
        let total = partial_sum_integral_form(&whole, 8, y, &exp, &path).unwrap();
        let mut parts = 0.0;
        let mut scale = 0.0;
        for k in 0..=8 {
            let mut unit = vec![0.0; 9];
            unit[k] = c[k];
            let v = CoefficientVector::from_values(unit, basis, "unit").unwrap();
            let term = partial_sum_integral_form(&v, 8, y, &exp, &path).unwrap();
            parts += term;
            scale += term.abs();
        }
        prop_assert!((total - parts).abs() <= 1e-12 * scale.max(1e-12));
    }

    #[test]
    fn float_and_rational_checks_agree(
        num in prop::collection::vec(-7i64..24, 4),
        p in prop::sample::select(vec![1i64, 2, 4, 8]),
        wiener in any::<bool>(),
    ) {
        // Eighths and 1/p for p a power of two are exact in f64, so the verdicts must match.
        let q: Vec<Rational64> = num.iter().map(|&n| Rational64::new(n, 8)).collect();
        let f: Vec<f64> = num.iter().map(|&n| n as f64 / 8.0).collect();
        let ri = JacobiIndex { gamma: q[0], delta: q[1] };
        let re = ExponentPair { eta: q[2], tau: q[3] };
        let fi = JacobiIndex { gamma: f[0], delta: f[1] };
        let fe = ExponentPair { eta: f[2], tau: f[3] };
        let (exact, float) = if wiener {
            (check_wiener_conditions(&ri, &re), check_wiener_conditions(&fi, &fe))
        } else {
            let alpha = Rational64::new(3, 2);
            (
                check_stable_conditions(&ri, &re, Rational64::from_integer(p), alpha),
                check_stable_conditions(&fi, &fe, p as f64, 1.5),
            )
        };
        prop_assert_eq!(exact.verdict, float.verdict);
        let m = *exact.margin.numer() as f64 / *exact.margin.denom() as f64;
        prop_assert!((m - float.margin).abs() < 1e-12);
    }
}
