use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::linear::LinearPropagator;
use super::state::State;
use crate::norms::{weighted_norm, NormSpec};
use crate::spectral::{dealiased_power, SpectralField};
use crate::{Error, Result};

/// Forcing of the first-order system, `F = −λ u^p` (dealiased, Nyquist-free).
pub fn nonlinear_force(u: &SpectralField, coupling: f64, p: u32) -> Result<SpectralField> {
    if coupling == 0.0 {
        return Ok(SpectralField::zeros(*u.grid()));
    }
    Ok(dealiased_power(u, p)?.without_nyquist().scale(-coupling))
}

/// `‖u‖_{H^{σ,2}} + ‖u_t‖_{H^{σ,0}}`.
pub fn data_norm(st: &State, sigma: f64) -> Result<f64> {
    Ok(weighted_norm(&st.u, NormSpec::cosh(sigma, 2.0))?
        + weighted_norm(&st.ut, NormSpec::cosh(sigma, 0.0))?)
}

/// `δ = c₀ (‖u‖_{H^{σ,2}} + ‖u_t‖_{H^{σ,0}})^{−(p−1)}`, capped at `delta_max`.
/// Zero data and `p = 1` return the cap.
pub fn local_existence_time(st: &State, sigma: f64, c0: f64, delta_max: f64) -> Result<f64> {
    if !(c0 > 0.0 && c0.is_finite()) || !(delta_max > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "need c0 > 0 and delta_max > 0, got c0 = {c0}, delta_max = {delta_max}"
        )));
    }
    let norm = data_norm(st, sigma)?;
    if norm == 0.0 || st.params.p == 1 {
        return Ok(delta_max);
    }
    let delta = c0 * norm.powi(-(st.params.p as i32 - 1));
    Ok(delta.min(delta_max))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PicardOptions {
    /// Quadrature intervals on `[0, δ]`; the trajectory has `n_steps + 1` nodes.
    pub n_steps: usize,
    pub tol: f64,
    pub max_iter: usize,
    /// Weight of the `H^{σ,2} × H^{σ,0}` convergence norm.
    pub sigma: f64,
}

impl Default for PicardOptions {
    fn default() -> Self {
        Self {
            n_steps: 64,
            tol: 1e-12,
            max_iter: 100,
            sigma: 0.0,
        }
    }
}

#[derive(Debug, Clone)]
pub struct PicardSolution {
    pub states: Vec<State>,
    pub iterations: usize,
    /// `d_{k+1}/d_k` for successive iterate differences `d_k`.
    pub ratios: Vec<f64>,
}

/// One application of the discretized Duhamel map.
///
/// With nodes `t_i = i h`, the composite trapezoid rule gives
/// `U_i = A_i + (h/2)(0, F_i)` where `A_0 = U_0 − (h/2)(0, F_0)` formally,
/// `A_1 = P(h)[U_0 + (h/2)(0, F_0)]` and `A_{i+1} = P(h)[A_i + h(0, F_i)]`.
fn duhamel_map(
    prop: &LinearPropagator,
    start: &State,
    forces: &[SpectralField],
) -> Vec<(Vec<Complex64>, Vec<Complex64>)> {
    let h = prop.dt();
    let n = forces.len() - 1;
    let mut out = Vec::with_capacity(n + 1);
    out.push((start.u.coeffs().to_vec(), start.ut.coeffs().to_vec()));
    let mut a_u = start.u.coeffs().to_vec();
    let mut a_ut = start.ut.coeffs().to_vec();
    for i in 0..n {
        let w = if i == 0 { 0.5 * h } else { h };
        for (v, f) in a_ut.iter_mut().zip(forces[i].coeffs()) {
            *v += f * w;
        }
        prop.apply_pair(&mut a_u, &mut a_ut);
        let mut ut = a_ut.clone();
        for (v, f) in ut.iter_mut().zip(forces[i + 1].coeffs()) {
            *v += f * (0.5 * h);
        }
        out.push((a_u.clone(), ut));
    }
    out
}

/// Fixed-point iteration of the Duhamel formula on `[0, δ]`.
///
/// The first iterate is the free evolution. Iteration stops when the
/// largest node-wise `H^{σ,2} × H^{σ,0}` change drops below `tol`.
pub fn picard_local_solve(st: &State, delta: f64, opts: &PicardOptions) -> Result<PicardSolution> {
    if opts.n_steps == 0 || !(opts.tol > 0.0) || !(delta > 0.0 && delta.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "need n_steps >= 1, tol > 0, delta > 0 (got {}, {}, {delta})",
            opts.n_steps, opts.tol
        )));
    }
    let grid = *st.grid();
    let params = st.params;
    let h = delta / opts.n_steps as f64;
    let prop = LinearPropagator::new(grid, &params, h);
    let start = st.without_nyquist();

    let zero_force = vec![SpectralField::zeros(grid); opts.n_steps + 1];
    let mut current = duhamel_map(&prop, &start, &zero_force);
    let mut ratios = Vec::new();
    let mut last_diff = f64::NAN;
    for iter in 1..=opts.max_iter {
        let forces = current
            .iter()
            .map(|(u, _)| {
                nonlinear_force(&SpectralField::from_parts(grid, u.clone()), params.coupling, params.p)
            })
            .collect::<Result<Vec<_>>>()?;
        let next = duhamel_map(&prop, &start, &forces);
        let mut diff: f64 = 0.0;
        for ((u0, ut0), (u1, ut1)) in current.iter().zip(&next) {
            let du: Vec<Complex64> = u1.iter().zip(u0).map(|(a, b)| a - b).collect();
            let dut: Vec<Complex64> = ut1.iter().zip(ut0).map(|(a, b)| a - b).collect();
            let d = weighted_norm(&SpectralField::from_parts(grid, du), NormSpec::cosh(opts.sigma, 2.0))?
                + weighted_norm(&SpectralField::from_parts(grid, dut), NormSpec::cosh(opts.sigma, 0.0))?;
            diff = diff.max(d);
        }
        if !diff.is_finite() {
            return Err(Error::NoConvergence {
                iterations: iter,
                ratio: f64::INFINITY,
            });
        }
        if last_diff.is_finite() && last_diff > 0.0 {
            ratios.push(diff / last_diff);
        }
        last_diff = diff;
        current = next;
        if diff < opts.tol {
            let states = current
                .into_iter()
                .enumerate()
                .map(|(i, (u, ut))| State {
                    u: SpectralField::from_parts(grid, u),
                    ut: SpectralField::from_parts(grid, ut),
                    time: st.time + i as f64 * h,
                    params,
                })
                .collect();
            return Ok(PicardSolution {
                states,
                iterations: iter,
                ratios,
            });
        }
    }
    Err(Error::NoConvergence {
        iterations: opts.max_iter,
        ratio: ratios.last().copied().unwrap_or(f64::NAN),
    })
}

/// Largest `c₀` from the geometric ladder `c_min · 2^j ≤ c_max` for which
/// the Picard solve converges on every state of `corpus` at `δ` from
/// [`local_existence_time`] (uncapped), halved. `None` if even `c_min` fails.
pub fn calibrate_c0(
    corpus: &[State],
    sigma: f64,
    c_min: f64,
    c_max: f64,
    opts: &PicardOptions,
) -> Result<Option<f64>> {
    if !(c_min > 0.0 && c_max >= c_min) {
        return Err(Error::InvalidParameter("need 0 < c_min <= c_max".into()));
    }
    let mut best = None;
    let mut c0 = c_min;
    while c0 <= c_max * (1.0 + 1e-12) {
        let mut ok = true;
        for st in corpus {
            let delta = local_existence_time(st, sigma, c0, f64::INFINITY)?;
            let delta = if delta.is_finite() { delta } else { c0 };
            match picard_local_solve(st, delta, opts) {
                Ok(_) => {}
                Err(Error::NoConvergence { .. }) => {
                    ok = false;
                    break;
                }
                Err(e) => return Err(e),
            }
        }
        if !ok {
            break;
        }
        best = Some(c0);
        c0 *= 2.0;
    }
    Ok(best.map(|c| 0.5 * c))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solver::{linear_propagate, Params};
    use crate::Grid;
    use std::f64::consts::TAU;

    fn small_state(amp: f64, coupling: f64) -> State {
        let g = Grid::new(1, 32, TAU).unwrap();
        let u = SpectralField::cosine_mode(g, &[1], amp).unwrap();
        let ut = SpectralField::cosine_mode(g, &[2], 0.5 * amp).unwrap();
        State::new(u, ut, 0.0, Params::new(1.0, 3).unwrap().with_coupling(coupling)).unwrap()
    }

    #[test]
    fn delta_formula() {
        let mut st = small_state(1.0, 1.0);
        let n = data_norm(&st, 0.0).unwrap();
        let d = local_existence_time(&st, 0.0, 0.1, 10.0).unwrap();
        assert!((d - 0.1 / (n * n)).abs() < 1e-15);
        st.u = st.u.scale(2.0);
        st.ut = st.ut.scale(2.0);
        let d2 = local_existence_time(&st, 0.0, 0.1, 10.0).unwrap();
        assert!((d2 - d / 4.0).abs() < 1e-15);
        st.params.p = 1;
        assert_eq!(local_existence_time(&st, 0.0, 0.1, 10.0).unwrap(), 10.0);
    }

    #[test]
    fn zero_data_is_a_fixed_point() {
        let g = Grid::new(1, 16, TAU).unwrap();
        let st = State::zeros(g, Params::new(1.0, 3).unwrap());
        let sol = picard_local_solve(&st, 0.1, &PicardOptions::default()).unwrap();
        assert_eq!(sol.iterations, 1);
        assert!(sol.states.iter().all(|s| s.u.max_abs() == 0.0));
    }

    #[test]
    fn linear_case_matches_exact_flow() {
        let st = small_state(0.3, 0.0);
        let opts = PicardOptions {
            n_steps: 10,
            ..Default::default()
        };
        let sol = picard_local_solve(&st, 0.5, &opts).unwrap();
        for s in &sol.states {
            let exact = linear_propagate(&st, s.time);
            assert!(s.u.sub(&exact.u).unwrap().max_abs() < 1e-13);
        }
    }

    #[test]
    fn small_data_contracts() {
        let st = small_state(0.3, 1.0);
        let delta = local_existence_time(&st, 0.0, 0.05, 1.0).unwrap();
        let sol = picard_local_solve(&st, delta, &PicardOptions::default()).unwrap();
        assert!(sol.iterations > 1);
        assert!(sol.ratios.iter().all(|&r| r < 1.0), "{:?}", sol.ratios);
    }

    #[test]
    fn large_window_fails_with_ratio() {
        let st = small_state(3.0, 1.0);
        let opts = PicardOptions {
            max_iter: 30,
            ..Default::default()
        };
        match picard_local_solve(&st, 5.0, &opts) {
            Err(Error::NoConvergence { iterations, ratio }) => {
                assert!(iterations <= 30);
                assert!(!(ratio < 1e-3));
            }
            other => panic!("expected non-convergence, got {other:?}"),
        }
    }
}
