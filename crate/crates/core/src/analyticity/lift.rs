use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::lab::{stream, FieldSampler};
use crate::norms::{weighted_norm, NormSpec};
use crate::solver::{energy, State};
use crate::spectral::{apply_multiplier, dealiased_power, MultiplierSpec, SpectralField};
use crate::stats::quantile;
use crate::{Error, Result};

/// `v_σ = cosh(σ|D|)u` applied to both components.
pub fn gevrey_lift(st: &State, sigma: f64) -> Result<State> {
    let spec = MultiplierSpec::CoshSigma { sigma };
    Ok(State {
        u: apply_multiplier(&st.u, spec)?,
        ut: apply_multiplier(&st.ut, spec)?,
        ..st.clone()
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModifiedEnergyReport {
    pub sigma: f64,
    pub time: f64,
    pub value: f64,
    pub kinetic: f64,
    pub bending: f64,
    pub mass: f64,
    pub potential: f64,
}

/// `𝓔_σ = E(v_σ)`, through the same code path as [`energy`], so `σ = 0`
/// reproduces `E` exactly.
pub fn modified_energy(st: &State, sigma: f64) -> Result<ModifiedEnergyReport> {
    let e = energy(&gevrey_lift(st, sigma)?);
    Ok(ModifiedEnergyReport {
        sigma,
        time: e.time,
        value: e.total,
        kinetic: e.kinetic,
        bending: e.bending,
        mass: e.mass,
        potential: e.potential,
    })
}

/// `N_p(v) = v^p − cosh(σ|D|)[(sech(σ|D|)v)^p]` with dealiased powers.
pub fn np_residual(v: &SpectralField, sigma: f64, p: u32) -> Result<SpectralField> {
    let direct = dealiased_power(v, p)?;
    let inner = apply_multiplier(v, MultiplierSpec::SechSigma { sigma })?;
    let lifted = apply_multiplier(&dealiased_power(&inner, p)?, MultiplierSpec::CoshSigma { sigma })?;
    direct.sub(&lifted)
}

/// `‖N_p(v)‖_{L²} / (σ² ‖v‖^p_{H²})`.
pub fn residual_ratio(v: &SpectralField, sigma: f64, p: u32) -> Result<f64> {
    if !(sigma > 0.0) {
        return Err(Error::Undefined(format!(
            "residual ratio needs sigma > 0, got {sigma}"
        )));
    }
    let h2 = weighted_norm(v, NormSpec::sobolev(2.0))?;
    if h2 == 0.0 {
        return Err(Error::Undefined("residual ratio of the zero field".into()));
    }
    Ok(np_residual(v, sigma, p)?.l2_norm() / (sigma * sigma * h2.powi(p as i32)))
}

/// Surrogate for the residual constant: the 95th percentile of
/// [`residual_ratio`] over `samples` fields (sample `i` from stream `(seed, i)`).
pub fn fit_lemma_constant(
    sampler: &FieldSampler,
    sigma: f64,
    p: u32,
    samples: usize,
    seed: u64,
) -> Result<f64> {
    let ratios: Vec<f64> = (0..samples)
        .into_par_iter()
        .map(|i| residual_ratio(&sampler.sample(&mut stream(seed, i as u64)), sigma, p))
        .collect::<Result<_>>()?;
    quantile(&ratios, 0.95).ok_or_else(|| Error::InvalidParameter("no samples".into()))
}
