use serde::{Deserialize, Serialize};

use super::lift::modified_energy;
use super::radius::{estimate_radius, FitPolicy, RadiusEstimate};
use crate::solver::{integrate, IntegrateOptions, State};
use crate::stats::fit_line;
use crate::{Error, Result};

/// `σ(T) = min{σ₀, (C⁻¹ (2E₀)^{(1−p)/2} / T)^{1/2}}`.
pub fn continuation_radius(t: f64, e0: f64, c_fit: f64, p: u32, sigma0: f64) -> Result<f64> {
    if !(t > 0.0) || !(e0 > 0.0) || !(c_fit > 0.0) || !(sigma0 > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "need T, E0, C, sigma0 > 0 (got {t}, {e0}, {c_fit}, {sigma0})"
        )));
    }
    Ok(sigma0.min(continuation_constant(e0, c_fit, p) / t.sqrt()))
}

/// `ĉ` with `σ(T) = min{σ₀, ĉ T^{−1/2}}`.
pub fn continuation_constant(e0: f64, c_fit: f64, p: u32) -> f64 {
    ((2.0 * e0).powf(0.5 * (1.0 - p as f64)) / c_fit).sqrt()
}

#[derive(Debug, Clone)]
pub struct TrackSetup {
    pub initial: State,
    pub integrate: IntegrateOptions,
    pub policy: FitPolicy,
    /// Radius at which the lifted energy `E₀ = 𝓔_{σ₀}(0)` is evaluated.
    pub sigma0: f64,
    pub c_fit: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadiusSample {
    pub time: f64,
    pub estimate: Option<RadiusEstimate>,
    pub error: Option<String>,
    /// `min{σ₀, ĉ t^{−1/2}}` (σ₀ at t = 0).
    pub lower_bound: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadiusTrack {
    pub samples: Vec<RadiusSample>,
    pub sigma0: f64,
    pub e0: f64,
    pub c_fit: f64,
    pub c_hat: f64,
    /// `σ_est ≈ c t^{−γ}` fitted on the second half of the run, when
    /// at least two estimates are available there.
    pub power_law: Option<(f64, f64)>,
    /// Every successful estimate lies on or above the lower bound.
    pub verdict: bool,
}

/// Integrates the setup and estimates the radius at every output time.
/// Estimator failures are recorded per sample; integration failures abort.
pub fn track_radius_over_time(setup: &TrackSetup) -> Result<RadiusTrack> {
    let e0 = modified_energy(&setup.initial, setup.sigma0)?.value;
    let c_hat = continuation_constant(e0, setup.c_fit, setup.initial.params.p);
    let traj = integrate(&setup.initial, &setup.integrate)?;
    let t0 = setup.initial.time;
    let samples: Vec<RadiusSample> = traj
        .states
        .iter()
        .map(|st| {
            let dt = st.time - t0;
            let lower_bound = if dt > 0.0 {
                setup.sigma0.min(c_hat / dt.sqrt())
            } else {
                setup.sigma0
            };
            match estimate_radius(&st.u, &setup.policy) {
                Ok(est) => RadiusSample {
                    time: st.time,
                    estimate: Some(est),
                    error: None,
                    lower_bound,
                },
                Err(e) => RadiusSample {
                    time: st.time,
                    estimate: None,
                    error: Some(e.to_string()),
                    lower_bound,
                },
            }
        })
        .collect();
    let t_end = samples.last().map_or(t0, |s| s.time);
    let (xs, ys): (Vec<f64>, Vec<f64>) = samples
        .iter()
        .filter(|s| s.time - t0 > 0.0 && s.time - t0 >= 0.5 * (t_end - t0))
        .filter_map(|s| s.estimate.map(|e| ((s.time - t0).ln(), e.sigma_est.ln())))
        .unzip();
    let power_law = fit_line(&xs, &ys).map(|f| (f.intercept.exp(), -f.slope));
    let verdict = samples
        .iter()
        .all(|s| s.estimate.is_none_or(|e| e.sigma_est >= s.lower_bound));
    Ok(RadiusTrack {
        samples,
        sigma0: setup.sigma0,
        e0,
        c_fit: setup.c_fit,
        c_hat,
        power_law,
        verdict,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn continuation_formula() {
        let s = continuation_radius(100.0, 1.0, 1.0, 3, 10.0).unwrap();
        assert!((s - 1.0 / 200f64.sqrt()).abs() < 1e-15);
        assert!((s - 0.070711).abs() < 1e-6);
        assert_eq!(continuation_radius(1e-12, 1.0, 1.0, 3, 0.4).unwrap(), 0.4);
        let q = continuation_radius(400.0, 1.0, 1.0, 3, 10.0).unwrap();
        assert!((q - 0.5 * s).abs() < 1e-15);
        assert!(continuation_radius(0.0, 1.0, 1.0, 3, 1.0).is_err());
    }
}
