//! Condition checkers and Monte Carlo convergence diagnostics.

pub mod conditions;
pub mod estimators;
pub mod report;

pub use conditions::{
    check_coefficient_summability, check_stable_conditions, check_wiener_conditions, ConditionId,
    ConditionReport, InequalityCheck, SummabilityFit, Verdict,
};
pub use estimators::{
    continuity_probe, cross_moment, default_intervals, estimate_almost_sure,
    estimate_in_probability, estimate_quadratic_mean, tail_errors, tail_oracle,
    test_stable_dependence, test_wiener_independence, weighted_power_integral, CfGapRow,
    CoefficientSource, ContinuityMode, CovarianceTest, DependenceReport, DiagnosticConfig,
    AGREEMENT_SE, DEFAULT_CF_GRID, DEFAULT_EPSILON, DEFAULT_N_REF, DEFAULT_ORDERS,
    DEFAULT_REPLICAS, DEFAULT_Y, EPSILON_PRIME_FACTOR, MIN_TAIL_WINDOW,
};
pub use report::{ConvergenceReport, Mode, ReportRow, Signal};
