//! Empirical constant of the power estimate `‖u^p‖_{H^{σ,0}} ≲ ‖u‖^p_{H^{σ,2}}`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::sampler::{stream, FieldSampler};
use crate::norms::{weighted_norm, NormSpec};
use crate::spectral::{
    apply_multiplier, dealiased_power, modulus_majorant, MultiplierSpec, Sign, SpectralField,
};
use crate::stats::quantile;
use crate::{Error, Result};

/// Ratios for one field.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerRatios {
    /// `‖u^p‖_{H^{σ,0}} / ‖u‖^p_{H^{σ,2}}` (hyperbolic weight).
    pub cosh: f64,
    /// `‖u^p‖_{G^{σ,0}} / ‖u‖^p_{G^{σ,2}}` evaluated directly.
    pub exp_direct: f64,
    /// Same quantity through `U = e^{σ|D|}u`:
    /// `‖e^{σ|D|}[(e^{−σ|D|}U)^p]‖_{L²} / ‖U‖^p_{H²}`.
    pub exp_substituted: f64,
    /// `‖V^p‖_{L²} / ‖U‖^p_{H²}` with `V = F⁻¹|Û|`; dominates the two above.
    pub majorant: f64,
}

pub fn power_ratios(u: &SpectralField, sigma: f64, p: u32) -> Result<PowerRatios> {
    let pf = p as i32;
    let up = dealiased_power(u, p)?;
    let h_den = weighted_norm(u, NormSpec::cosh(sigma, 2.0))?.powi(pf);
    if h_den == 0.0 {
        return Err(Error::Undefined("power ratio of the zero field".into()));
    }
    let cosh = weighted_norm(&up, NormSpec::cosh(sigma, 0.0))? / h_den;
    let exp_direct = weighted_norm(&up, NormSpec::exp(sigma, 0.0))?
        / weighted_norm(u, NormSpec::exp(sigma, 2.0))?.powi(pf);

    let plus = MultiplierSpec::ExpSigma {
        sigma,
        sign: Sign::Plus,
    };
    let minus = MultiplierSpec::ExpSigma {
        sigma,
        sign: Sign::Minus,
    };
    let big_u = apply_multiplier(u, plus)?;
    let inner = dealiased_power(&apply_multiplier(&big_u, minus)?, p)?;
    let lifted = apply_multiplier(&inner, plus)?;
    let u_h2 = weighted_norm(&big_u, NormSpec::sobolev(2.0))?.powi(pf);
    let exp_substituted = lifted.l2_norm() / u_h2;

    let v = modulus_majorant(&big_u);
    let majorant = dealiased_power(&v, p)?.l2_norm() / u_h2;
    Ok(PowerRatios {
        cosh,
        exp_direct,
        exp_substituted,
        majorant,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NonlinearEstimateReport {
    pub dim: usize,
    pub points_per_dim: usize,
    pub p: u32,
    pub sigma: f64,
    pub samples: usize,
    pub seed: u64,
    pub max_ratio: f64,
    pub p95_ratio: f64,
    pub max_ratio_exp: f64,
    /// Largest relative gap between the direct and substituted exponential forms.
    pub max_form_disagreement: f64,
    /// Samples where the modulus majorant failed to dominate (tolerance 1e-12).
    pub majorant_violations: usize,
}

/// Ratio statistics over `samples` fields; sample `i` draws from stream `(seed, i)`.
pub fn check_nonlinear_estimate(
    sampler: &FieldSampler,
    sigma: f64,
    p: u32,
    samples: usize,
    seed: u64,
) -> Result<NonlinearEstimateReport> {
    let ratios: Vec<PowerRatios> = (0..samples)
        .into_par_iter()
        .map(|i| power_ratios(&sampler.sample(&mut stream(seed, i as u64)), sigma, p))
        .collect::<Result<_>>()?;
    let cosh: Vec<f64> = ratios.iter().map(|r| r.cosh).collect();
    let fold_max = |f: fn(&PowerRatios) -> f64| ratios.iter().map(f).fold(0.0, f64::max);
    Ok(NonlinearEstimateReport {
        dim: sampler.grid.dim(),
        points_per_dim: sampler.grid.points_per_dim(),
        p,
        sigma,
        samples,
        seed,
        max_ratio: fold_max(|r| r.cosh),
        p95_ratio: quantile(&cosh, 0.95).unwrap_or(f64::NAN),
        max_ratio_exp: fold_max(|r| r.exp_direct),
        max_form_disagreement: fold_max(|r| {
            (r.exp_direct - r.exp_substituted).abs() / r.exp_direct
        }),
        majorant_violations: ratios
            .iter()
            .filter(|r| r.exp_substituted > r.majorant * (1.0 + 1e-12))
            .count(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::Grid;
    use std::f64::consts::TAU;

    #[test]
    fn single_mode_closed_form() {
        let g = Grid::new(1, 32, TAU).unwrap();
        let (a, k, sigma) = (0.8, 2.0, 0.3);
        let u = SpectralField::cosine_mode(g, &[2], a).unwrap();
        let r = power_ratios(&u, sigma, 3).unwrap();
        // u³ = a³(3cos kx + cos 3kx)/4
        let num = (TAU
            * 2.0
            * ((3.0 * a.powi(3) / 8.0 * (sigma * k).cosh()).powi(2)
                + (a.powi(3) / 8.0 * (3.0 * sigma * k).cosh()).powi(2)))
        .sqrt();
        let den = (TAU * 2.0 * (a / 2.0 * (sigma * k).cosh() * (1.0 + k * k)).powi(2))
            .sqrt()
            .powi(3);
        assert!((r.cosh - num / den).abs() < 1e-13 * r.cosh);
        assert!((r.exp_direct - r.exp_substituted).abs() < 1e-13 * r.exp_direct);
        // e^{σ(|ξ| − Σ|ξ_j|)} ≤ 1 inside the convolution
        assert!(r.majorant >= r.exp_substituted);
    }

    #[test]
    fn linear_power_ratio_at_most_one() {
        let g = Grid::new(2, 16, TAU).unwrap();
        let sampler = FieldSampler::new(g, 4).unwrap();
        let rep = check_nonlinear_estimate(&sampler, 0.1, 1, 20, 3).unwrap();
        assert!(rep.max_ratio <= 1.0);
        assert!(rep.max_form_disagreement < 1e-10);
    }

    #[test]
    fn forms_agree_and_majorant_dominates() {
        let g = Grid::new(1, 32, TAU).unwrap();
        let sampler = FieldSampler::new(g, 6).unwrap();
        let rep = check_nonlinear_estimate(&sampler, 0.1, 3, 50, 9).unwrap();
        assert!(rep.max_form_disagreement < 1e-10, "{rep:?}");
        assert_eq!(rep.majorant_violations, 0);
        assert!(rep.p95_ratio <= rep.max_ratio);
    }
}
