//! Sobolev `H^s`, exponential Gevrey `G^{σ,s}` and hyperbolic `H^{σ,s}` norms.
//!
//! All norms are discrete quadratures in the transform normalization of
//! [`SpectralField`]: `‖f‖² = Lⁿ Σ_k w(ξ_k)² ⟨ξ_k⟩^{2s} |c_k|²` with
//! `⟨ξ⟩ = (1 + |ξ|²)^{1/2}`. For `w ≡ 1, s = 0` this is the physical L² norm.

use serde::{Deserialize, Serialize};

use crate::lab::cosh_deficit_margin;
use crate::spectral::{check_overflow, log_cosh, SpectralField, LOG_DOMAIN_THRESHOLD};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Weight {
    Exp,
    Cosh,
    None,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormSpec {
    pub sigma: f64,
    pub s: f64,
    pub weight: Weight,
}

impl NormSpec {
    pub fn sobolev(s: f64) -> Self {
        Self {
            sigma: 0.0,
            s,
            weight: Weight::None,
        }
    }

    pub fn cosh(sigma: f64, s: f64) -> Self {
        Self {
            sigma,
            s,
            weight: Weight::Cosh,
        }
    }

    pub fn exp(sigma: f64, s: f64) -> Self {
        Self {
            sigma,
            s,
            weight: Weight::Exp,
        }
    }

    fn effective_sigma(&self) -> f64 {
        match self.weight {
            Weight::None => 0.0,
            _ => self.sigma,
        }
    }

    fn log_weight(&self, xi: f64) -> f64 {
        match self.weight {
            Weight::None => 0.0,
            Weight::Exp => self.sigma * xi,
            Weight::Cosh => log_cosh(self.sigma * xi),
        }
    }

    fn weight(&self, xi: f64) -> f64 {
        match self.weight {
            Weight::None => 1.0,
            Weight::Exp => (self.sigma * xi).exp(),
            Weight::Cosh => (self.sigma * xi).cosh(),
        }
    }
}

/// How the weighted sum is reduced.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NormRoute {
    /// Direct below `σ|ξ_max| = 300`, log-sum-exp above.
    Auto,
    Direct,
    LogDomain,
}

fn validate(c: &SpectralField, spec: &NormSpec) -> Result<f64> {
    let sigma = spec.effective_sigma();
    if !(sigma.is_finite() && sigma >= 0.0) || !spec.s.is_finite() {
        return Err(Error::InvalidParameter(format!("bad norm spec {spec:?}")));
    }
    check_overflow(sigma, c.grid().xi_max())?;
    Ok(sigma)
}

fn direct_sum(c: &SpectralField, spec: &NormSpec) -> f64 {
    let grid = c.grid();
    let sum: f64 = c
        .coeffs()
        .iter()
        .zip(grid.xi_squared())
        .map(|(v, xi_sq)| {
            let w = spec.weight(xi_sq.sqrt());
            w * w * (1.0 + xi_sq).powf(spec.s) * v.norm_sqr()
        })
        .sum();
    grid.volume() * sum
}

/// `log(Lⁿ Σ …)` by log-sum-exp; `-inf` for the zero field.
fn log_sum(c: &SpectralField, spec: &NormSpec) -> f64 {
    let grid = c.grid();
    let terms: Vec<f64> = c
        .coeffs()
        .iter()
        .zip(grid.xi_squared())
        .filter(|(v, _)| v.norm() > 0.0)
        .map(|(v, xi_sq)| {
            2.0 * spec.log_weight(xi_sq.sqrt()) + spec.s * xi_sq.ln_1p() + 2.0 * v.norm().ln()
        })
        .collect();
    let Some(max) = terms.iter().copied().reduce(f64::max) else {
        return f64::NEG_INFINITY;
    };
    let lse = max + terms.iter().map(|t| (t - max).exp()).sum::<f64>().ln();
    grid.volume().ln() + lse
}

pub fn weighted_norm(c: &SpectralField, spec: NormSpec) -> Result<f64> {
    weighted_norm_with(c, spec, NormRoute::Auto)
}

pub fn weighted_norm_with(c: &SpectralField, spec: NormSpec, route: NormRoute) -> Result<f64> {
    let sigma = validate(c, &spec)?;
    let use_log = match route {
        NormRoute::Auto => sigma * c.grid().xi_max() > LOG_DOMAIN_THRESHOLD,
        NormRoute::Direct => false,
        NormRoute::LogDomain => true,
    };
    if use_log {
        Ok((0.5 * log_sum(c, &spec)).exp())
    } else {
        Ok(direct_sum(c, &spec).sqrt())
    }
}

/// Natural log of [`weighted_norm`]; finite even when the norm itself
/// would overflow. `-inf` for the zero field.
pub fn log_weighted_norm(c: &SpectralField, spec: NormSpec) -> Result<f64> {
    validate(c, &spec)?;
    Ok(0.5 * log_sum(c, &spec))
}

/// Ratio `‖f‖_{H^{σ,s}} / ‖f‖_{G^{σ,s}}` and its slack to the nearer end
/// of `[1/2, 1]`.
pub fn norm_equivalence_margin(c: &SpectralField, sigma: f64, s: f64) -> Result<(f64, f64)> {
    let h = log_weighted_norm(c, NormSpec::cosh(sigma, s))?;
    let g = log_weighted_norm(c, NormSpec::exp(sigma, s))?;
    if !g.is_finite() {
        return Err(Error::Undefined("equivalence ratio of the zero field".into()));
    }
    let ratio = (h - g).exp();
    Ok((ratio, (ratio - 0.5).min(1.0 - ratio)))
}

/// `r^{2α} cosh r − (cosh r − 1)`, nonnegative for `r ≥ 0, α ∈ [0, 1]`.
pub fn cosh_deficit_bound_margin(r: f64, alpha: f64) -> Result<f64> {
    if !(r >= 0.0 && r.is_finite()) || !(0.0..=1.0).contains(&alpha) {
        return Err(Error::InvalidParameter(format!(
            "need r >= 0 and alpha in [0,1], got r = {r}, alpha = {alpha}"
        )));
    }
    Ok(cosh_deficit_margin(r, alpha).unscaled())
}
