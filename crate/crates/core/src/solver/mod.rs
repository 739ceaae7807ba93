//! Time evolution of the beam equation as a first-order system in `(u, u_t)`.
//!
//! The nonlinearity enters as the velocity forcing `F = −λu^p`; products are
//! dealiased and the unpaired Nyquist modes are kept at zero so every state
//! is an exact real trigonometric polynomial.

mod forced;
mod integrate;
mod linear;
mod picard;
mod state;

pub use forced::{energy_inequality, forced_linear_step, EnergyInequality};
pub use integrate::{integrate, IntegrateOptions, Scheme, Trajectory};
pub use linear::{linear_propagate, LinearPropagator};
pub use picard::{
    calibrate_c0, data_norm, local_existence_time, nonlinear_force, picard_local_solve,
    PicardOptions, PicardSolution,
};
pub use state::{energy, EnergyReport, Params, State};
