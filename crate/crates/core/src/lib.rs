//! Pseudospectral simulation of the nonlinear beam equation
//!
//! ```text
//! u_tt + (m + Δ²) u + |u|^{p-1} u = 0,   x ∈ periodic box ⊂ ℝⁿ, n ≤ 3
//! ```
//!
//! together with the machinery needed to follow the uniform radius of
//! spatial analyticity of its solutions: cosh-weighted Gevrey norms, the
//! lifted energy of `v_σ = cosh(σ|D|) u`, its nonlinear residual, and a
//! singularity-tracking radius estimator.
//!
//! Module map:
//!
//! * [`spectral`]: grids, transforms, radial multipliers, dealiased powers.
//! * [`norms`]: Sobolev, exponential and hyperbolic Gevrey norms.
//! * [`solver`]: exact linear flow, Duhamel/Picard solver, Strang splitting.
//! * [`analyticity`]: lifted energy, residual law, radius estimation, sweeps.
//! * [`lab`]: randomized verification of the scalar inequalities.
//! * [`initial`]: initial-data families with known analyticity radius.
//! * [`oracle`]: direct-summation references for the fast transforms and products.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analyticity;
pub mod error;
pub mod initial;
pub mod lab;
pub mod norms;
pub mod oracle;
pub mod solver;
pub mod spectral;
pub mod stats;

pub use error::{Error, Result};
pub use spectral::{Grid, MultiplierSpec, RealField, SpectralField};
