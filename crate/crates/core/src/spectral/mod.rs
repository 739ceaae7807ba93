//! Periodic grids, transforms, radial multipliers and dealiased products.

mod fft;
mod field;
mod grid;
mod multiplier;
mod power;

pub use field::{forward_transform, inverse_transform, RealField, SpectralField, HERMITIAN_TOL};
pub use grid::Grid;
pub use multiplier::{
    apply_multiplier, apply_multiplier_log, check_overflow, log_cosh, sech, MultiplierSpec, Sign,
    LOG_DOMAIN_THRESHOLD, OVERFLOW_CAP,
};
pub use power::{dealiased_power, integral_of_power, modulus_majorant, padded_points};
