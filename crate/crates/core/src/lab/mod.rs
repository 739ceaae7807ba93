//! Randomized and exhaustive checks of the scalar inequalities, identities
//! and the power estimate that the analyticity bounds rely on.

mod nonlinear;
mod sampler;
mod scalar;
mod suite;

pub use nonlinear::{check_nonlinear_estimate, power_ratios, NonlinearEstimateReport, PowerRatios};
pub use sampler::{stream, uniform, FieldSampler};
pub use scalar::{
    check_cosh_difference, check_exp_cosh_sandwich, check_product_identity, check_product_sech,
    check_triangle, cosh_deficit_margin, Margin, LOG_SCALE_THRESHOLD,
};
pub use suite::{
    cosh_deficit_suite, cosh_difference_suite, exp_cosh_sandwich_suite, product_identity_lattice,
    product_identity_suite, product_sech_corollary_suite, product_sech_suite, triangle_suite,
    verify_lemmas, CheckReport, CHECK_TOL,
};
