use serde::{Deserialize, Serialize};

use crate::spectral::SpectralField;
use crate::stats::fit_line;
use crate::{Error, Result};

/// Knobs of the spectral-decay fit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FitPolicy {
    /// Window ends before the first bin at or below `noise_floor · max`.
    pub noise_floor: f64,
    /// Bins within this many decades of the peak are skipped.
    pub top_decades: f64,
    /// Algebraic prefactor exponent: fits `log|ĉ| + s log⟨ξ⟩`.
    pub s: f64,
    pub min_modes: usize,
    /// Decay is called super-exponential when the fitted rate on the upper
    /// half of the window exceeds the lower-half rate by this fraction.
    pub curvature_tol: f64,
}

impl Default for FitPolicy {
    fn default() -> Self {
        Self {
            noise_floor: 1e-13,
            top_decades: 1.0,
            s: 0.0,
            min_modes: 8,
            curvature_tol: 0.5,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RadiusEstimate {
    pub sigma_est: f64,
    /// `[ξ_lo, ξ_hi]` of the bins used.
    pub fit_window: (f64, f64),
    /// RMS residual of the log-linear fit.
    pub residual: f64,
    pub n_modes_used: usize,
    pub capped: bool,
    /// Largest decay rate resolvable above the noise floor on this grid.
    pub sigma_cap: f64,
}

/// Radial spectrum: for each shell of width `2π/L` below the per-axis
/// Nyquist frequency, the largest modulus and the `|ξ|` where it occurs.
pub fn radial_spectrum(c: &SpectralField) -> Vec<(f64, f64)> {
    let grid = c.grid();
    let step = grid.frequency_step();
    let last = grid.points_per_dim() / 2 - 1;
    let mut bins: Vec<(f64, f64)> = (0..=last).map(|b| (b as f64 * step, 0.0)).collect();
    for (v, xi) in c.coeffs().iter().zip(grid.xi_abs()) {
        let b = (xi / step).round() as usize;
        if b > last {
            continue;
        }
        let a = v.norm();
        if a > bins[b].1 {
            bins[b] = (xi, a);
        }
    }
    bins
}

/// Decay-rate estimate from the radial spectrum.
///
/// Fits `log A + s log⟨ξ⟩ = β − σξ` by least squares over the window that
/// starts after the last bin within `top_decades` of the peak and ends
/// before the first bin at the noise floor. Super-exponential decay (the
/// rate grows across the window) has no finite radius on the grid and is
/// reported as `capped` with `σ_est = σ_cap`.
pub fn estimate_radius(c: &SpectralField, policy: &FitPolicy) -> Result<RadiusEstimate> {
    if !(policy.noise_floor > 0.0 && policy.noise_floor < 1.0) || !(policy.top_decades >= 0.0) {
        return Err(Error::InvalidParameter(format!("bad fit policy {policy:?}")));
    }
    let needed = policy.min_modes.max(4);
    let bins = radial_spectrum(c);
    let peak = bins.iter().map(|b| b.1).fold(0.0, f64::max);
    if peak == 0.0 {
        return Err(Error::TooFewModes { found: 0, needed });
    }
    let top = peak * 10f64.powf(-policy.top_decades);
    let floor = peak * policy.noise_floor;
    let start = bins.iter().rposition(|b| b.1 >= top).map_or(0, |i| i + 1);
    let end = bins[start..]
        .iter()
        .position(|b| b.1 <= floor)
        .map_or(bins.len(), |i| start + i);
    let window = &bins[start..end];
    if window.len() < needed {
        return Err(Error::TooFewModes {
            found: window.len(),
            needed,
        });
    }
    let xs: Vec<f64> = window.iter().map(|b| b.0).collect();
    let ys: Vec<f64> = window
        .iter()
        .map(|&(xi, a)| a.ln() + 0.5 * policy.s * xi.mul_add(xi, 1.0).ln())
        .collect();
    let fit = fit_line(&xs, &ys).ok_or_else(|| Error::Undefined("degenerate fit window".into()))?;

    let grid = c.grid();
    let sigma_cap = (1.0 / policy.noise_floor).ln() / grid.nyquist();
    let half = xs.len() / 2;
    let early = fit_line(&xs[..half], &ys[..half]).map(|f| -f.slope);
    let late = fit_line(&xs[half..], &ys[half..]).map(|f| -f.slope);
    let capped = match (early, late) {
        (Some(e), Some(l)) if e > 0.0 => l / e > 1.0 + policy.curvature_tol,
        (Some(_), Some(l)) => l > 0.0,
        _ => false,
    };
    Ok(RadiusEstimate {
        sigma_est: if capped { sigma_cap } else { (-fit.slope).max(0.0) },
        fit_window: (xs[0], xs[xs.len() - 1]),
        residual: fit.rms_residual,
        n_modes_used: xs.len(),
        capped,
        sigma_cap,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::initial::InitialData;
    use crate::Grid;
    use std::f64::consts::TAU;

    #[test]
    fn pure_exponential_is_exact() {
        let g = Grid::new(1, 256, TAU).unwrap();
        let c = InitialData::ExpDecaySpectrum { amplitude: 1.0, a: 0.3 }.build(&g).unwrap();
        let r = estimate_radius(&c, &FitPolicy::default()).unwrap();
        assert!((r.sigma_est - 0.3).abs() < 1e-6, "{r:?}");
        assert!(r.residual < 1e-10);
        assert!(!r.capped);
        // scale invariance
        let r2 = estimate_radius(&c.scale(1e-5), &FitPolicy::default()).unwrap();
        assert!((r2.sigma_est - r.sigma_est).abs() < 1e-9);
    }

    #[test]
    fn gaussian_is_capped() {
        let g = Grid::new(1, 256, 64.0).unwrap();
        let c = InitialData::GaussianBump {
            amplitude: 1.0,
            width: 1.0,
        }
        .build(&g)
        .unwrap();
        let r = estimate_radius(&c, &FitPolicy::default()).unwrap();
        assert!(r.capped);
        assert_eq!(r.sigma_est, r.sigma_cap);
    }

    #[test]
    fn too_few_modes() {
        let g = Grid::new(1, 16, TAU).unwrap();
        let c = SpectralField::cosine_mode(g, &[1], 1.0).unwrap();
        assert!(matches!(
            estimate_radius(&c, &FitPolicy::default()),
            Err(Error::TooFewModes { .. })
        ));
    }

    #[test]
    fn radial_binning_in_2d() {
        let g = Grid::new(2, 64, TAU).unwrap();
        let c = InitialData::ExpDecaySpectrum { amplitude: 1.0, a: 0.5 }.build(&g).unwrap();
        let r = estimate_radius(&c, &FitPolicy::default()).unwrap();
        assert!((r.sigma_est - 0.5).abs() < 1e-6, "{r:?}");
    }
}
