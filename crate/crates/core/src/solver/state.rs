use serde::{Deserialize, Serialize};

use crate::spectral::{integral_of_power, SpectralField};
use crate::{Error, Result};

/// Physical parameters of `u_tt + (m + Δ²)u + λ|u|^{p-1}u = 0`.
///
/// `coupling` is `λ`; the equation proper has `λ = 1`. Setting it to zero
/// switches the nonlinearity off, which the tests use to compare against
/// the exact linear flow.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Params {
    pub m: f64,
    pub p: u32,
    #[serde(default = "default_coupling")]
    pub coupling: f64,
}

fn default_coupling() -> f64 {
    1.0
}

impl Params {
    pub fn new(m: f64, p: u32) -> Result<Self> {
        let params = Self {
            m,
            p,
            coupling: 1.0,
        };
        params.validate()?;
        Ok(params)
    }

    pub fn linear(m: f64, p: u32) -> Result<Self> {
        Ok(Self {
            coupling: 0.0,
            ..Self::new(m, p)?
        })
    }

    pub fn with_coupling(mut self, coupling: f64) -> Self {
        self.coupling = coupling;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.m.is_finite() && self.m > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "mass m must be positive, got {}",
                self.m
            )));
        }
        if self.p == 0 || self.p.is_multiple_of(2) {
            return Err(Error::EvenPower(self.p));
        }
        if !self.coupling.is_finite() {
            return Err(Error::InvalidParameter("coupling must be finite".into()));
        }
        Ok(())
    }

    /// `ω(ξ) = √(m + |ξ|⁴)` from `|ξ|²`.
    pub fn omega(&self, xi_sq: f64) -> f64 {
        (self.m + xi_sq * xi_sq).sqrt()
    }
}

/// The first-order pair `(u, u_t)` at time `time`.
#[derive(Debug, Clone, PartialEq)]
pub struct State {
    pub u: SpectralField,
    pub ut: SpectralField,
    pub time: f64,
    pub params: Params,
}

impl State {
    /// Checks grids, parameters and Hermitian symmetry.
    pub fn new(u: SpectralField, ut: SpectralField, time: f64, params: Params) -> Result<Self> {
        if u.grid() != ut.grid() {
            return Err(Error::GridMismatch);
        }
        params.validate()?;
        for f in [&u, &ut] {
            let (index, mismatch) = f.hermitian_defect();
            if mismatch > crate::spectral::HERMITIAN_TOL {
                return Err(Error::NotHermitian { index, mismatch });
            }
        }
        Ok(Self {
            u,
            ut,
            time,
            params,
        })
    }

    pub fn zeros(grid: crate::Grid, params: Params) -> Self {
        Self {
            u: SpectralField::zeros(grid),
            ut: SpectralField::zeros(grid),
            time: 0.0,
            params,
        }
    }

    pub fn grid(&self) -> &crate::Grid {
        self.u.grid()
    }

    /// Same state with the unpaired Nyquist modes removed from both fields.
    pub fn without_nyquist(&self) -> Self {
        Self {
            u: self.u.without_nyquist(),
            ut: self.ut.without_nyquist(),
            ..self.clone()
        }
    }
}

/// `E = ½∫(u_t² + (Δu)² + m u²) + (λ/(p+1))∫|u|^{p+1}`, split by term.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnergyReport {
    pub time: f64,
    pub kinetic: f64,
    pub bending: f64,
    pub mass: f64,
    pub potential: f64,
    pub total: f64,
}

/// Quadratic parts by Parseval, potential part by exact dealiased quadrature.
pub fn energy(st: &State) -> EnergyReport {
    let grid = st.grid();
    let vol = grid.volume();
    let xi_sq = grid.xi_squared();
    let (mut kin, mut bend, mut mass) = (0.0, 0.0, 0.0);
    for ((u, ut), x2) in st.u.coeffs().iter().zip(st.ut.coeffs()).zip(&xi_sq) {
        let a = u.norm_sqr();
        kin += ut.norm_sqr();
        bend += x2 * x2 * a;
        mass += a;
    }
    let kinetic = 0.5 * vol * kin;
    let bending = 0.5 * vol * bend;
    let mass = 0.5 * vol * st.params.m * mass;
    let p = st.params.p;
    let potential = if st.params.coupling == 0.0 {
        0.0
    } else {
        st.params.coupling / (p + 1) as f64 * integral_of_power(&st.u, p + 1)
    };
    EnergyReport {
        time: st.time,
        kinetic,
        bending,
        mass,
        potential,
        total: kinetic + bending + mass + potential,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Grid;
    use std::f64::consts::TAU;

    #[test]
    fn zero_state_has_zero_energy() {
        let g = Grid::new(2, 8, TAU).unwrap();
        let e = energy(&State::zeros(g, Params::new(1.0, 3).unwrap()));
        assert_eq!(e.total, 0.0);
    }

    #[test]
    fn cosine_energy_closed_form() {
        let g = Grid::new(1, 32, TAU).unwrap();
        let l = TAU;
        let u = SpectralField::cosine_mode(g, &[1], 1.0).unwrap();
        let st = State::new(u, SpectralField::zeros(g), 0.0, Params::new(1.0, 3).unwrap()).unwrap();
        let e = energy(&st);
        assert_eq!(e.kinetic, 0.0);
        assert!((e.bending - 0.5 * l / 2.0).abs() < 1e-13);
        assert!((e.mass - 0.5 * l / 2.0).abs() < 1e-13);
        // ½ · 2/(p+1) · ∫cos⁴ = ¼ · 3L/8
        assert!((e.potential - 0.25 * 3.0 * l / 8.0).abs() < 1e-13);
        assert!((e.total - (e.kinetic + e.bending + e.mass + e.potential)).abs() < 1e-15);
    }

    #[test]
    fn params_reject_bad_values() {
        assert!(Params::new(0.0, 3).is_err());
        assert!(matches!(Params::new(1.0, 2), Err(Error::EvenPower(2))));
    }
}
