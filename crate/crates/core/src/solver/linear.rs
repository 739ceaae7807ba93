use num_complex::Complex64;

use super::state::{Params, State};
use crate::spectral::SpectralField;
use crate::{Error, Grid, Result};

/// Per-mode rotation of the linear flow over a fixed `dt`, cached so a
/// time stepper pays for the trigonometric functions once.
///
/// ```text
/// û  ← cos(dt ω) û + sin(dt ω)/ω · û_t
/// û_t ← −ω sin(dt ω) û + cos(dt ω) û_t
/// ```
#[derive(Debug, Clone)]
pub struct LinearPropagator {
    grid: Grid,
    dt: f64,
    cos: Vec<f64>,
    sin_over_w: Vec<f64>,
    w_sin: Vec<f64>,
}

impl LinearPropagator {
    pub fn new(grid: Grid, params: &Params, dt: f64) -> Self {
        let n = grid.len();
        let (mut cos, mut sin_over_w, mut w_sin) =
            (Vec::with_capacity(n), Vec::with_capacity(n), Vec::with_capacity(n));
        for xi_sq in grid.xi_squared() {
            let w = params.omega(xi_sq);
            let (s, c) = (dt * w).sin_cos();
            cos.push(c);
            sin_over_w.push(s / w);
            w_sin.push(w * s);
        }
        Self {
            grid,
            dt,
            cos,
            sin_over_w,
            w_sin,
        }
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    /// Rotates `(u, ut)` in place.
    pub fn apply_pair(&self, u: &mut [Complex64], ut: &mut [Complex64]) {
        for i in 0..u.len() {
            let (a, b) = (u[i], ut[i]);
            u[i] = a * self.cos[i] + b * self.sin_over_w[i];
            ut[i] = b * self.cos[i] - a * self.w_sin[i];
        }
    }

    /// Contribution of a pure velocity impulse `(0, f)`: `(sin/ω · f, cos · f)`.
    pub fn apply_impulse(&self, f: &[Complex64], u: &mut [Complex64], ut: &mut [Complex64], w: f64) {
        for i in 0..u.len() {
            u[i] += f[i] * (w * self.sin_over_w[i]);
            ut[i] += f[i] * (w * self.cos[i]);
        }
    }

    pub fn apply(&self, st: &State) -> Result<State> {
        if st.grid() != &self.grid {
            return Err(Error::GridMismatch);
        }
        let mut u = st.u.coeffs().to_vec();
        let mut ut = st.ut.coeffs().to_vec();
        self.apply_pair(&mut u, &mut ut);
        Ok(State {
            u: SpectralField::from_parts(self.grid, u),
            ut: SpectralField::from_parts(self.grid, ut),
            time: st.time + self.dt,
            params: st.params,
        })
    }

    /// Determinant of the per-mode 2×2 matrix, `cos² + sin²`, for mode `i`.
    pub fn determinant(&self, i: usize) -> f64 {
        self.cos[i] * self.cos[i] + self.sin_over_w[i] * self.w_sin[i]
    }
}

/// Exact linear flow over `dt` (any sign).
pub fn linear_propagate(st: &State, dt: f64) -> State {
    LinearPropagator::new(*st.grid(), &st.params, dt)
        .apply(st)
        .expect("propagator built on the state's own grid")
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::TAU;

    fn mode_state(k: i64, m: f64) -> State {
        let g = Grid::new(1, 16, TAU).unwrap();
        let u = SpectralField::cosine_mode(g, &[k], 2.0).unwrap();
        State::new(u, SpectralField::zeros(g), 0.0, Params::new(m, 3).unwrap()).unwrap()
    }

    #[test]
    fn single_mode_is_cosine() {
        let st = mode_state(1, 1.0);
        let t = 3.7;
        let out = linear_propagate(&st, t);
        assert!((out.u.at(&[1]).re - (2f64.sqrt() * t).cos()).abs() < 1e-14);
        assert_eq!(out.time, t);
    }

    #[test]
    fn zero_mode_with_mass_four() {
        let st = mode_state(0, 4.0);
        let out = linear_propagate(&st, 1.1);
        // cosine_mode at k = 0 stores the full amplitude
        assert!((out.u.at(&[0]).re - 2.0 * (2.0 * 1.1f64).cos()).abs() < 1e-14);
    }

    #[test]
    fn forward_then_backward_is_identity() {
        let g = Grid::new(2, 8, TAU).unwrap();
        let u = SpectralField::cosine_mode(g, &[1, 2], 1.0).unwrap();
        let ut = SpectralField::cosine_mode(g, &[3, 0], 0.5).unwrap();
        let st = State::new(u, ut, 0.0, Params::new(1.0, 3).unwrap()).unwrap();
        let back = linear_propagate(&linear_propagate(&st, 0.9), -0.9);
        assert!(back.u.sub(&st.u).unwrap().max_abs() < 1e-12);
        assert!(back.ut.sub(&st.ut).unwrap().max_abs() < 1e-12);
    }

    #[test]
    fn per_mode_determinant_is_one() {
        let g = Grid::new(3, 8, TAU).unwrap();
        let prop = LinearPropagator::new(g, &Params::new(1.0, 3).unwrap(), 0.37);
        for i in 0..g.len() {
            assert!((prop.determinant(i) - 1.0).abs() < 1e-13);
        }
    }
}
