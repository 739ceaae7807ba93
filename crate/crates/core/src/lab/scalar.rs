//! Scalar inequalities and identities behind the analyticity estimates,
//! each evaluated as a [`Margin`] (`rhs - lhs`, nonnegative when it holds).
//!
//! Arguments beyond [`LOG_SCALE_THRESHOLD`] are evaluated with both sides
//! multiplied by `e^{-m}`, `m` the largest argument, so nothing overflows
//! up to `r = 700` and well beyond.

use serde::Serialize;

use crate::{Error, Result};

pub const LOG_SCALE_THRESHOLD: f64 = 300.0;

/// Both sides of an inequality `lhs ≤ rhs`, possibly in units of `e^{log_scale}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Margin {
    pub lhs: f64,
    pub rhs: f64,
    pub log_scale: f64,
}

impl Margin {
    fn plain(lhs: f64, rhs: f64) -> Self {
        Self {
            lhs,
            rhs,
            log_scale: 0.0,
        }
    }

    /// `rhs - lhs` in scaled units.
    pub fn value(&self) -> f64 {
        self.rhs - self.lhs
    }

    /// `rhs - lhs` in true units (may overflow for huge scales).
    pub fn unscaled(&self) -> f64 {
        if self.log_scale == 0.0 {
            self.value()
        } else {
            self.value() * self.log_scale.exp()
        }
    }

    /// `(rhs - lhs) / max(|lhs|, |rhs|)`, zero when both sides vanish.
    pub fn relative(&self) -> f64 {
        let dominant = self.lhs.abs().max(self.rhs.abs());
        if dominant == 0.0 {
            0.0
        } else {
            self.value() / dominant
        }
    }

    pub fn holds(&self, tol: f64) -> bool {
        self.relative() >= -tol
    }
}

/// `cosh(x) · e^{-scale}`.
fn scaled_cosh(x: f64, scale: f64) -> f64 {
    let x = x.abs();
    0.5 * ((x - scale).exp() + (-x - scale).exp())
}

/// Scale exponent for arguments up to `m`.
fn scale_for(m: f64) -> f64 {
    if m > LOG_SCALE_THRESHOLD {
        m
    } else {
        0.0
    }
}

/// `|cosh b − cosh a| ≤ ½|b² − a²|(cosh b + cosh a)`.
///
/// The left side uses `cosh b − cosh a = 2 sinh((b+a)/2) sinh((b−a)/2)` to
/// avoid cancellation near `a = ±b`.
pub fn check_cosh_difference(a: f64, b: f64) -> Margin {
    let scale = scale_for(a.abs().max(b.abs()));
    let (a, b) = (a.abs(), b.abs());
    let half_sum = 0.5 * (a + b);
    let half_diff = 0.5 * (b - a).abs();
    // 2 sinh(s) sinh(d) = ½(e^{s+d} - e^{s-d} - e^{d-s} + e^{-s-d}), scaled
    let lhs = if scale == 0.0 {
        2.0 * half_sum.sinh() * half_diff.sinh()
    } else {
        0.5 * ((half_sum + half_diff - scale).exp()
            - (half_sum - half_diff - scale).exp()
            - (half_diff - half_sum - scale).exp()
            + (-half_sum - half_diff - scale).exp())
    };
    let rhs = 0.5 * (b * b - a * a).abs() * (scaled_cosh(a, scale) + scaled_cosh(b, scale));
    Margin {
        lhs,
        rhs,
        log_scale: scale,
    }
}

/// Residual of `∏ cosh r_j = 2^{1−p} Σ_{s₂…s_p = ±1} cosh(r₁ + Σ s_j r_j)`,
/// relative to the left side. Requires `1 ≤ p ≤ 12` and `r_j ≥ 0`.
pub fn check_product_identity(r: &[f64]) -> Result<f64> {
    let p = r.len();
    if !(1..=12).contains(&p) {
        return Err(Error::InvalidParameter(format!(
            "product identity needs 1..=12 factors, got {p}"
        )));
    }
    if r.iter().any(|&x| !(x >= 0.0 && x.is_finite())) {
        return Err(Error::InvalidParameter("factors must be finite and >= 0".into()));
    }
    let lhs: f64 = r.iter().map(|x| x.cosh()).product();
    let mut sum = 0.0;
    for signs in 0u32..(1 << (p - 1)) {
        let arg = r[1..]
            .iter()
            .enumerate()
            .fold(r[0], |acc, (j, &x)| {
                if signs >> j & 1 == 1 {
                    acc - x
                } else {
                    acc + x
                }
            });
        sum += arg.cosh();
    }
    let rhs = sum * 2f64.powi(1 - p as i32);
    Ok((lhs - rhs).abs() / lhs)
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Margins for `|1 − cosh|ξ| ∏ sech|ξ_j|| ≤ 2^p Σ_{j≠k} |ξ_j||ξ_k|`
/// (`ξ = Σ ξ_j`, ordered pairs) and for its corollary form with the
/// constant `c(p) = p² 2^p` times the two largest `|ξ_j|`.
pub fn check_product_sech(xi: &[Vec<f64>]) -> Result<(Margin, Margin)> {
    let p = xi.len();
    if p < 2 {
        return Err(Error::InvalidParameter(format!(
            "product sech bound needs p >= 2, got {p}"
        )));
    }
    let dim = xi[0].len();
    if xi.iter().any(|v| v.len() != dim) {
        return Err(Error::InvalidParameter("mixed frequency dimensions".into()));
    }
    let mags: Vec<f64> = xi.iter().map(|v| norm(v)).collect();
    let total: Vec<f64> = (0..dim).map(|i| xi.iter().map(|v| v[i]).sum()).collect();
    let total = norm(&total);

    let log_ratio = crate::spectral::log_cosh(total)
        - mags
            .iter()
            .map(|&m| crate::spectral::log_cosh(m))
            .sum::<f64>();
    // |1 − e^x| without cancellation
    let lhs = log_ratio.exp_m1().abs();

    let sum: f64 = mags.iter().sum();
    let sum_sq: f64 = mags.iter().map(|m| m * m).sum();
    // Σ_{j≠k} |ξ_j||ξ_k| = (Σ|ξ_j|)² − Σ|ξ_j|²
    let pairs = (sum * sum - sum_sq).max(0.0);
    let two_p = 2f64.powi(p as i32);
    let main = Margin::plain(lhs, two_p * pairs);

    let mut sorted = mags.clone();
    sorted.sort_by(|a, b| b.total_cmp(a));
    let c_p = (p * p) as f64 * two_p;
    let corollary = Margin::plain(lhs, c_p * sorted[0] * sorted[1]);
    Ok((main, corollary))
}

/// Margins of `½eʳ ≤ cosh r` and `cosh r ≤ eʳ`.
pub fn check_exp_cosh_sandwich(r: f64) -> Result<(Margin, Margin)> {
    if !(r >= 0.0) {
        return Err(Error::InvalidParameter(format!("need r >= 0, got {r}")));
    }
    let scale = scale_for(r);
    let exp = (r - scale).exp();
    let cosh = scaled_cosh(r, scale);
    Ok((
        Margin {
            lhs: 0.5 * exp,
            rhs: cosh,
            log_scale: scale,
        },
        Margin {
            lhs: cosh,
            rhs: exp,
            log_scale: scale,
        },
    ))
}

/// Margin of `cosh r − 1 ≤ r^{2α} cosh r` (`r ≥ 0`, `α ∈ [0,1]`), with the
/// left side written as `2 sinh²(r/2)`.
pub fn cosh_deficit_margin(r: f64, alpha: f64) -> Margin {
    let scale = scale_for(r);
    let lhs = if scale == 0.0 {
        2.0 * (0.5 * r).sinh().powi(2)
    } else {
        scaled_cosh(r, scale) - (-scale).exp()
    };
    let rhs = r.powf(2.0 * alpha) * scaled_cosh(r, scale);
    Margin {
        lhs,
        rhs,
        log_scale: scale,
    }
}

/// Margin of `|Σ ξ_j| ≤ Σ |ξ_j|`.
pub fn check_triangle(xi: &[Vec<f64>]) -> Margin {
    let dim = xi.first().map_or(0, |v| v.len());
    let total: Vec<f64> = (0..dim).map(|i| xi.iter().map(|v| v[i]).sum()).collect();
    Margin::plain(norm(&total), xi.iter().map(|v| norm(v)).sum())
}
