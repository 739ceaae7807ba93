//! The lifted field `v_σ = cosh(σ|D|)u`, its energy and nonlinear residual,
//! spectral radius estimation, and the drift and radius experiments.

mod drift;
mod lift;
mod radius;
mod track;

pub use drift::{sigma_drift_sweep, DriftRow, DriftTable};
pub use lift::{
    fit_lemma_constant, gevrey_lift, modified_energy, np_residual, residual_ratio,
    ModifiedEnergyReport,
};
pub use radius::{estimate_radius, radial_spectrum, FitPolicy, RadiusEstimate};
pub use track::{
    continuation_constant, continuation_radius, track_radius_over_time, RadiusSample, RadiusTrack,
    TrackSetup,
};
