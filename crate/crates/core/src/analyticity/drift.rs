use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::lift::modified_energy;
use crate::solver::State;
use crate::stats::log_log_slope;
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DriftRow {
    pub sigma: f64,
    pub delta: f64,
    /// `sup_{t ≤ δ} |𝓔_σ(t) − 𝓔_σ(0)|` over the checkpoints.
    pub sup_drift: f64,
    /// `sup_drift / (δ σ² 𝓔_σ(0)^{(p+1)/2})`; NaN at `σ = 0`.
    pub ratio: f64,
    /// Set when the row could not be evaluated (e.g. weight overflow).
    pub error: Option<String>,
}

impl DriftRow {
    pub fn is_valid(&self) -> bool {
        self.error.is_none()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DriftTable {
    pub rows: Vec<DriftRow>,
    /// Least-squares slope of `log sup_drift` against `log σ` over valid
    /// rows with `σ > 0`.
    pub slope: Option<f64>,
    /// Checkpoints inside the window.
    pub checkpoints: usize,
}

impl DriftTable {
    /// `max/min` of the normalized ratio over valid rows with `σ > 0`.
    pub fn ratio_spread(&self) -> Option<f64> {
        let r: Vec<f64> = self
            .rows
            .iter()
            .filter(|r| r.is_valid() && r.sigma > 0.0)
            .map(|r| r.ratio)
            .collect();
        let max = r.iter().copied().reduce(f64::max)?;
        let min = r.iter().copied().reduce(f64::min)?;
        Some(max / min)
    }
}

fn row(states: &[&State], sigma: f64, delta: f64) -> Result<DriftRow> {
    let e0 = modified_energy(states[0], sigma)?.value;
    let mut sup: f64 = 0.0;
    for st in &states[1..] {
        sup = sup.max((modified_energy(st, sigma)?.value - e0).abs());
    }
    let p = states[0].params.p as f64;
    let ratio = if sigma > 0.0 {
        sup / (delta * sigma * sigma * e0.powf(0.5 * (p + 1.0)))
    } else {
        f64::NAN
    };
    Ok(DriftRow {
        sigma,
        delta,
        sup_drift: sup,
        ratio,
        error: None,
    })
}

/// Drift of the lifted energy over the checkpoints of `traj` in
/// `[t₀, t₀ + δ]`, one row per `σ` (rows evaluated in parallel).
pub fn sigma_drift_sweep(traj: &[State], sigmas: &[f64], delta: f64) -> Result<DriftTable> {
    if sigmas.windows(2).any(|w| !(w[0] < w[1])) || sigmas.iter().any(|s| !(*s >= 0.0)) {
        return Err(Error::InvalidParameter(
            "sigmas must be nonnegative and strictly increasing".into(),
        ));
    }
    let t0 = traj
        .first()
        .ok_or_else(|| Error::InvalidParameter("empty trajectory".into()))?
        .time;
    let window: Vec<&State> = traj
        .iter()
        .filter(|s| s.time - t0 <= delta * (1.0 + 1e-12))
        .collect();
    let last = window.last().expect("contains the first state").time;
    if last - t0 < delta * (1.0 - 1e-9) {
        return Err(Error::InvalidParameter(format!(
            "trajectory ends at {last} before the window {delta}"
        )));
    }
    let rows: Vec<DriftRow> = sigmas
        .par_iter()
        .map(|&sigma| {
            row(&window, sigma, delta).unwrap_or_else(|e| DriftRow {
                sigma,
                delta,
                sup_drift: f64::NAN,
                ratio: f64::NAN,
                error: Some(e.to_string()),
            })
        })
        .collect();
    let (xs, ys): (Vec<f64>, Vec<f64>) = rows
        .iter()
        .filter(|r| r.is_valid() && r.sigma > 0.0 && r.sup_drift > 0.0)
        .map(|r| (r.sigma, r.sup_drift))
        .unzip();
    Ok(DriftTable {
        slope: log_log_slope(&xs, &ys),
        rows,
        checkpoints: window.len(),
    })
}
