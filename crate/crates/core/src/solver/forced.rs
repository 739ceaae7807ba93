use super::linear::LinearPropagator;
use super::picard::data_norm;
use super::state::State;
use crate::norms::{weighted_norm, NormSpec};
use crate::spectral::SpectralField;
use crate::{Error, Result};

/// One step of the forced linear system `u_tt + (m + Δ²)u = F(t)`:
///
/// `U(t₀ + dt) = P(dt)U(t₀) + ∫₀^dt P(dt − s)(0, F(t₀ + s)) ds`
///
/// with the propagator applied exactly and the integral by the composite
/// trapezoid rule on `quad_nodes ≥ 2` equispaced nodes.
pub fn forced_linear_step<F>(st: &State, forcing: F, dt: f64, quad_nodes: usize) -> Result<State>
where
    F: Fn(f64) -> Result<SpectralField>,
{
    if quad_nodes < 2 {
        return Err(Error::InvalidParameter("quad_nodes must be >= 2".into()));
    }
    let grid = *st.grid();
    let intervals = quad_nodes - 1;
    let h = dt / intervals as f64;
    let prop = LinearPropagator::new(grid, &st.params, h);
    let mut u = st.u.coeffs().to_vec();
    let mut ut = st.ut.coeffs().to_vec();
    for j in 0..quad_nodes {
        let f = forcing(st.time + j as f64 * h)?;
        if f.grid() != &grid {
            return Err(Error::GridMismatch);
        }
        let w = if j == 0 || j == intervals { 0.5 * h } else { h };
        for (v, c) in ut.iter_mut().zip(f.coeffs()) {
            *v += c * w;
        }
        if j < intervals {
            prop.apply_pair(&mut u, &mut ut);
        }
    }
    Ok(State {
        u: SpectralField::from_parts(grid, u),
        ut: SpectralField::from_parts(grid, ut),
        time: st.time + dt,
        params: st.params,
    })
}

/// Both sides of the energy inequality on `[t₀, t₀ + δ]`:
///
/// `sup_t (‖u‖_{H^{σ,2}} + ‖u_t‖_{H^{σ,0}}) ≲ ‖u₀‖_{H^{σ,2}} + ‖u₁‖_{H^{σ,0}} + ∫‖F‖_{H^{σ,0}}`
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyInequality {
    pub lhs: f64,
    pub rhs: f64,
}

impl EnergyInequality {
    pub fn ratio(&self) -> f64 {
        self.lhs / self.rhs
    }
}

/// Evaluates [`EnergyInequality`] with `steps` forced steps of
/// `quad_nodes` nodes each; the sup is taken over step endpoints.
pub fn energy_inequality<F>(
    st: &State,
    forcing: F,
    delta: f64,
    steps: usize,
    quad_nodes: usize,
    sigma: f64,
) -> Result<EnergyInequality>
where
    F: Fn(f64) -> Result<SpectralField>,
{
    if steps == 0 {
        return Err(Error::InvalidParameter("steps must be >= 1".into()));
    }
    let dt = delta / steps as f64;
    let mut lhs = data_norm(st, sigma)?;
    let mut cur = st.clone();
    for _ in 0..steps {
        cur = forced_linear_step(&cur, &forcing, dt, quad_nodes)?;
        lhs = lhs.max(data_norm(&cur, sigma)?);
    }
    // ∫‖F‖ on the union of all quadrature nodes
    let total = steps * (quad_nodes - 1);
    let h = delta / total as f64;
    let mut integral = 0.0;
    for j in 0..=total {
        let w = if j == 0 || j == total { 0.5 * h } else { h };
        integral += w * weighted_norm(&forcing(st.time + j as f64 * h)?, NormSpec::cosh(sigma, 0.0))?;
    }
    Ok(EnergyInequality {
        lhs,
        rhs: data_norm(st, sigma)? + integral,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solver::{linear_propagate, Params};
    use crate::Grid;
    use std::f64::consts::TAU;

    #[test]
    fn no_forcing_is_free_flow() {
        let g = Grid::new(1, 16, TAU).unwrap();
        let u = SpectralField::cosine_mode(g, &[3], 1.0).unwrap();
        let st = State::new(u, SpectralField::zeros(g), 0.0, Params::new(2.0, 3).unwrap()).unwrap();
        let a = forced_linear_step(&st, |_| Ok(SpectralField::zeros(g)), 0.7, 9).unwrap();
        let b = linear_propagate(&st, 0.7);
        assert!(a.u.sub(&b.u).unwrap().max_abs() < 1e-14);
        assert!(a.ut.sub(&b.ut).unwrap().max_abs() < 1e-14);
    }

    #[test]
    fn resonant_forcing_grows_secularly() {
        // û'' + ω² û = cos(ωt) from rest: û(t) = t sin(ωt) / (2ω)
        let g = Grid::new(1, 16, TAU).unwrap();
        let params = Params::new(1.0, 3).unwrap();
        let w = params.omega(1.0);
        let mode = SpectralField::cosine_mode(g, &[1], 2.0).unwrap();
        let st = State::zeros(g, params);
        let t = 6.0;
        let out = forced_linear_step(&st, |s| Ok(mode.scale((w * s).cos())), t, 4001).unwrap();
        let exact = t * (w * t).sin() / (2.0 * w);
        let err = (out.u.at(&[1]).re - exact).abs();
        assert!(err < 1e-5, "err {err}");
    }
}
