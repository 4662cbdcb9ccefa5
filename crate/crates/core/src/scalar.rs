//! Scalar abstraction shared by the deterministic numerics.
//!
//! Everything in [`crate::basis`] and [`crate::quadrature`] is written against
//! [`Scalar`], so the same code runs in `f32` and `f64`. The condition checkers
//! in [`crate::diagnostics`] only need ordered-field arithmetic and also accept
//! exact rationals.

use std::fmt::{Debug, Display};

use num_traits::{Float, FloatConst, FromPrimitive, Num, Signed, ToPrimitive};

/// Floating point: `f32` or `f64`.
pub trait Scalar:
    Float + FloatConst + FromPrimitive + ToPrimitive + Signed + Debug + Display + Send + Sync + 'static
{
    /// Converts an `f64` literal into this type.
    fn of(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable in scalar type")
    }

    /// Machine epsilon of the type as a plain tolerance.
    fn eps() -> Self {
        Self::epsilon()
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}

/// Ordered field arithmetic, enough to evaluate the weight conditions exactly.
///
/// Implemented by `f32`, `f64` and `num_rational::Ratio<i64>` (and any other
/// signed ordered number type).
pub trait OrderedField: Num + Signed + PartialOrd + Copy + Debug {
    fn two() -> Self {
        Self::one() + Self::one()
    }

    fn half() -> Self {
        Self::one() / Self::two()
    }

    fn quarter() -> Self {
        Self::half() / Self::two()
    }

    fn min_of(a: Self, b: Self) -> Self {
        if b < a {
            b
        } else {
            a
        }
    }
}

impl<T: Num + Signed + PartialOrd + Copy + Debug> OrderedField for T {}

const LANCZOS_G: f64 = 7.0;
const LANCZOS_COEFFS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

/// Natural logarithm of |Γ(x)| via the Lanczos approximation (g = 7, 9 terms).
///
/// Uses the reflection formula below 1/2. Poles (non-positive integers) give +∞.
pub fn ln_gamma<T: Scalar>(x: T) -> T {
    let half = T::of(0.5);
    if x < half {
        let s = (T::PI() * x).sin().abs();
        if s == T::zero() {
            return T::infinity();
        }
        return (T::PI() / s).ln() - ln_gamma(T::one() - x);
    }
    let x = x - T::one();
    let mut acc = T::of(LANCZOS_COEFFS[0]);
    for (i, &c) in LANCZOS_COEFFS.iter().enumerate().skip(1) {
        acc = acc + T::of(c) / (x + T::of(i as f64));
    }
    let t = x + T::of(LANCZOS_G) + half;
    half * (T::TAU()).ln() + (x + half) * t.ln() - t + acc.ln()
}

/// ln B(a, b) = ln Γ(a) + ln Γ(b) − ln Γ(a + b), for a, b > 0.
pub fn ln_beta<T: Scalar>(a: T, b: T) -> T {
    ln_gamma(a) + ln_gamma(b) - ln_gamma(a + b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn ln_gamma_matches_factorials() {
        let mut fact = 1.0f64;
        for n in 1..30u32 {
            assert_relative_eq!(
                ln_gamma(n as f64),
                fact.ln(),
                epsilon = 1e-12,
                max_relative = 1e-13
            );
            fact *= n as f64;
        }
    }

    #[test]
    fn ln_gamma_half_integers_and_reflection() {
        let sqrt_pi = std::f64::consts::PI.sqrt();
        assert_relative_eq!(ln_gamma(0.5f64), sqrt_pi.ln(), epsilon = 1e-14);
        assert_relative_eq!(ln_gamma(1.5f64), (0.5 * sqrt_pi).ln(), epsilon = 1e-14);
        // Γ(−0.5) = −2√π
        assert_relative_eq!(ln_gamma(-0.5f64), (2.0 * sqrt_pi).ln(), epsilon = 1e-13);
        assert!(ln_gamma(0.0f64).is_infinite());
    }

    #[test]
    fn ln_gamma_in_f32() {
        assert!((ln_gamma(5.0f32) - 24.0f32.ln()).abs() < 1e-5);
    }

    #[test]
    fn ordered_field_constants_are_exact_for_rationals() {
        use num_rational::Rational64;
        assert_eq!(Rational64::quarter(), Rational64::new(1, 4));
        assert_eq!(
            Rational64::min_of(Rational64::new(1, 3), Rational64::new(1, 4)),
            Rational64::new(1, 4)
        );
    }
}
