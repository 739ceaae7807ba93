//! Initial-data families. `LorentzPole` and `ExpDecaySpectrum` have a known
//! analyticity radius `a`; `GaussianBump` is entire.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::lab::{stream, FieldSampler};
use crate::spectral::{forward_transform, RealField, SpectralField};
use crate::{Error, Grid, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum InitialData {
    Zero,
    /// `A exp(−|x|²/(2w²))`.
    GaussianBump { amplitude: f64, width: f64 },
    /// Periodization of `A ∏ᵢ a²/(xᵢ² + a²)`, poles at `xᵢ = ±ia`.
    /// Coefficients are exactly `A ∏ᵢ (πa/L) e^{−a|ξᵢ|}`.
    LorentzPole { amplitude: f64, a: f64 },
    /// Coefficients `A e^{−a|ξ|}` (radial).
    ExpDecaySpectrum { amplitude: f64, a: f64 },
    /// `A cos(ξ_k · x)`.
    SingleMode { k: Vec<i64>, amplitude: f64 },
    /// Gaussian band-limited field rescaled to `H²` norm `amplitude`.
    RandomBandLimited { band: usize, seed: u64, amplitude: f64 },
}

fn positive(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("{name} must be positive, got {v}")))
    }
}

fn finite(name: &str, v: f64) -> Result<()> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("{name} must be finite")))
    }
}

impl InitialData {
    pub fn validate(&self, grid: &Grid) -> Result<()> {
        match self {
            Self::Zero => Ok(()),
            Self::GaussianBump { amplitude, width } => {
                finite("amplitude", *amplitude)?;
                positive("width", *width)
            }
            Self::LorentzPole { amplitude, a } | Self::ExpDecaySpectrum { amplitude, a } => {
                finite("amplitude", *amplitude)?;
                positive("a", *a)
            }
            Self::SingleMode { k, amplitude } => {
                finite("amplitude", *amplitude)?;
                if k.len() != grid.dim() {
                    return Err(Error::InvalidParameter(format!(
                        "mode k has {} components, grid has dimension {}",
                        k.len(),
                        grid.dim()
                    )));
                }
                let half = (grid.points_per_dim() / 2) as i64;
                if k.iter().any(|v| v.abs() >= half) {
                    return Err(Error::InvalidParameter(format!(
                        "mode {k:?} not resolved below the Nyquist index {half}"
                    )));
                }
                Ok(())
            }
            Self::RandomBandLimited { band, amplitude, .. } => {
                finite("amplitude", *amplitude)?;
                FieldSampler::new(*grid, *band).map(|_| ())
            }
        }
    }

    /// Analyticity radius by construction, if finite.
    pub fn known_radius(&self) -> Option<f64> {
        match self {
            Self::LorentzPole { a, .. } | Self::ExpDecaySpectrum { a, .. } => Some(*a),
            _ => None,
        }
    }

    /// Coefficients on `grid`, with the Nyquist modes zeroed.
    pub fn build(&self, grid: &Grid) -> Result<SpectralField> {
        self.validate(grid)?;
        let field = match self {
            Self::Zero => SpectralField::zeros(*grid),
            Self::GaussianBump { amplitude, width } => {
                let f = RealField::from_fn(*grid, |x| {
                    let r2: f64 = x.iter().map(|v| v * v).sum();
                    amplitude * (-0.5 * r2 / (width * width)).exp()
                })?;
                forward_transform(&f)
            }
            Self::LorentzPole { amplitude, a } => {
                let l = grid.box_length();
                let step = grid.frequency_step();
                spectral_from_fn(grid, |k| {
                    amplitude
                        * k.iter()
                            .map(|&ki| PI * a / l * (-a * (ki as f64 * step).abs()).exp())
                            .product::<f64>()
                })
            }
            Self::ExpDecaySpectrum { amplitude, a } => {
                let step = grid.frequency_step();
                spectral_from_fn(grid, |k| {
                    let xi = k.iter().map(|&v| (v as f64 * step).powi(2)).sum::<f64>().sqrt();
                    amplitude * (-a * xi).exp()
                })
            }
            Self::SingleMode { k, amplitude } => SpectralField::cosine_mode(*grid, k, *amplitude)?,
            Self::RandomBandLimited {
                band,
                seed,
                amplitude,
            } => FieldSampler::new(*grid, *band)?
                .normalized(*amplitude)
                .sample(&mut stream(*seed, 0)),
        };
        Ok(field.without_nyquist())
    }
}

/// Real even coefficients `g(k)` on every mode.
fn spectral_from_fn(grid: &Grid, g: impl Fn(&[i64]) -> f64) -> SpectralField {
    let dim = grid.dim();
    let coeffs = (0..grid.len())
        .map(|flat| Complex64::new(g(&grid.wavevector(flat)[..dim]), 0.0))
        .collect();
    SpectralField::new(*grid, coeffs).expect("finite by construction")
}

/// Physical-space periodized Lorentzian `(πa/L) sinh(2πa/L) / (cosh(2πa/L) − cos(2πx/L))`,
/// the 1D profile whose coefficients [`InitialData::LorentzPole`] uses.
pub fn periodic_lorentzian(x: f64, a: f64, l: f64) -> f64 {
    let b = 2.0 * PI * a / l;
    // cosh b − cos θ = 2 sinh²(b/2) + 2 sin²(θ/2), no cancellation near x = 0
    let denom = 2.0 * (0.5 * b).sinh().powi(2) + 2.0 * (PI * x / l).sin().powi(2);
    PI * a / l * b.sinh() / denom
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::inverse_transform;

    #[test]
    fn lorentzian_spectrum_matches_physical_profile() {
        let g = Grid::new(1, 512, 40.0).unwrap();
        let a = 0.5;
        let c = InitialData::LorentzPole { amplitude: 1.0, a }.build(&g).unwrap();
        let f = inverse_transform(&c).unwrap();
        for (j, v) in f.values().iter().enumerate() {
            let x = g.coordinate(j);
            // the truncated tail beyond |ξ| = πN/L is about 2e−9
            assert!((v - periodic_lorentzian(x, a, 40.0)).abs() < 1e-8);
        }
        // near the origin the periodization is the bare Lorentzian
        assert!((periodic_lorentzian(0.0, a, 1e4) - 1.0).abs() < 1e-6);
    }

    #[test]
    fn single_mode_has_one_pair() {
        let g = Grid::new(2, 8, 6.0).unwrap();
        let c = InitialData::SingleMode {
            k: vec![1, -2],
            amplitude: 2.0,
        }
        .build(&g)
        .unwrap();
        let nonzero = c.coeffs().iter().filter(|v| v.norm() > 0.0).count();
        assert_eq!(nonzero, 2);
    }

    #[test]
    fn validation() {
        let g = Grid::new(1, 16, 6.0).unwrap();
        assert!(InitialData::LorentzPole { amplitude: 1.0, a: 0.0 }.build(&g).is_err());
        assert!(InitialData::SingleMode {
            k: vec![8],
            amplitude: 1.0
        }
        .build(&g)
        .is_err());
        assert_eq!(InitialData::ExpDecaySpectrum { amplitude: 1.0, a: 0.3 }.known_radius(), Some(0.3));
    }

    #[test]
    fn gaussian_is_real_and_nyquist_free() {
        let g = Grid::new(2, 16, 20.0).unwrap();
        let c = InitialData::GaussianBump {
            amplitude: 1.0,
            width: 1.0,
        }
        .build(&g)
        .unwrap();
        assert!(c.is_hermitian(1e-14));
        assert!((0..g.len()).filter(|&i| g.is_nyquist(i)).all(|i| c.coeffs()[i].norm() == 0.0));
    }
}
