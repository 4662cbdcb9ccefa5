//! Random Fourier–Jacobi series driven by Wiener and symmetric α-stable
//! processes: orthonormal Jacobi bases, Gauss–Jacobi quadrature, path
//! sampling, stochastic integrals, partial sums and Monte Carlo diagnostics.
//!
//! The deterministic layers (`basis`, `quadrature`, the condition checkers)
//! are generic over the scalar type; the sampling layers work in `f64`.

// `!(x > y)` is deliberate throughout: it rejects NaN as well.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod basis;
pub mod diagnostics;
pub mod error;
pub mod experiment;
pub mod integrate;
pub mod quadrature;
pub mod scalar;
pub mod series;
pub mod stats;
pub mod stochastic;

pub use error::{Error, Result};
pub use scalar::{OrderedField, Scalar};

pub type JacobiIndexF64 = basis::JacobiIndex<f64>;
pub type JacobiIndexF32 = basis::JacobiIndex<f32>;
pub type ExponentPairF64 = basis::ExponentPair<f64>;
pub type ExponentPairF32 = basis::ExponentPair<f32>;
pub type BasisSpecF64 = basis::BasisSpec<f64>;
pub type BasisSpecF32 = basis::BasisSpec<f32>;
pub type QuadratureRuleF64 = quadrature::QuadratureRule<f64>;
pub type QuadratureRuleF32 = quadrature::QuadratureRule<f32>;
pub type FunctionSpecF64 = quadrature::FunctionSpec<f64>;
pub type CoefficientVectorF64 = quadrature::CoefficientVector<f64>;
/// Condition reports evaluated in exact rational arithmetic.
pub type ExactConditionReport = diagnostics::ConditionReport<num_rational::Rational64>;
