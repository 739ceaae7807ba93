use log::warn;
use serde::{Deserialize, Serialize};

use super::linear::LinearPropagator;
use super::picard::{local_existence_time, nonlinear_force, picard_local_solve, PicardOptions};
use super::state::{energy, EnergyReport, State};
use crate::spectral::{inverse_transform, SpectralField};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Scheme {
    /// Half kick, exact linear flow, half kick.
    StrangSplit,
    /// Fourth-order triple-jump composition of three Strang steps with
    /// weights `(w₁, w₀, w₁)`, `w₁ = 1/(2 − 2^{1/3})`, `w₀ = 1 − 2w₁`.
    Yoshida4,
    /// Consecutive Picard windows of length `δ` from the local-existence
    /// formula, rounded down to a whole number of `dt` steps.
    PicardChain {
        c0: f64,
        sigma: f64,
        delta_max: f64,
        tol: f64,
        max_iter: usize,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntegrateOptions {
    pub t_final: f64,
    pub dt: f64,
    pub scheme: Scheme,
    /// Keep every `output_stride`-th step (plus the final state).
    pub output_stride: usize,
    /// Abort when `|E(t) − E(0)| / |E(0)|` exceeds this at an output time.
    pub max_relative_drift: Option<f64>,
    /// Warn when the solution exceeds this fraction of its maximum on the
    /// box faces (the periodic box stands in for the whole space).
    pub boundary_warn: Option<f64>,
}

impl IntegrateOptions {
    pub fn strang(t_final: f64, dt: f64) -> Self {
        Self {
            t_final,
            dt,
            scheme: Scheme::StrangSplit,
            output_stride: 1,
            max_relative_drift: None,
            boundary_warn: None,
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct Trajectory {
    pub states: Vec<State>,
    pub energies: Vec<EnergyReport>,
    pub warnings: Vec<String>,
}

impl Trajectory {
    pub fn last(&self) -> &State {
        self.states.last().expect("trajectory holds the initial state")
    }

    /// Largest `|E(t) − E(0)| / |E(0)|` over the outputs (absolute if `E(0) = 0`).
    pub fn max_relative_drift(&self) -> f64 {
        let e0 = self.energies[0].total;
        let scale = if e0 == 0.0 { 1.0 } else { e0.abs() };
        self.energies
            .iter()
            .map(|e| (e.total - e0).abs() / scale)
            .fold(0.0, f64::max)
    }
}

struct Recorder<'a> {
    opts: &'a IntegrateOptions,
    traj: Trajectory,
    e0: f64,
    warned_boundary: bool,
}

impl Recorder<'_> {
    fn record(&mut self, st: &State) -> Result<()> {
        let e = energy(st);
        if let Some(bound) = self.opts.max_relative_drift {
            let scale = if self.e0 == 0.0 { 1.0 } else { self.e0.abs() };
            let drift = (e.total - self.e0).abs() / scale;
            if !(drift <= bound) {
                return Err(Error::Unstable {
                    time: st.time,
                    drift,
                    bound,
                });
            }
        }
        if let (Some(limit), false) = (self.opts.boundary_warn, self.warned_boundary) {
            let ratio = inverse_transform(&st.u)?.boundary_ratio();
            if ratio > limit {
                let msg = format!(
                    "t = {:.4}: boundary/max ratio {ratio:.3e} exceeds {limit:.1e}; enlarge the box",
                    st.time
                );
                warn!("{msg}");
                self.traj.warnings.push(msg);
                self.warned_boundary = true;
            }
        }
        self.traj.states.push(st.clone());
        self.traj.energies.push(e);
        Ok(())
    }
}

fn validate(opts: &IntegrateOptions) -> Result<usize> {
    if !(opts.dt > 0.0 && opts.dt.is_finite()) || !(opts.t_final >= 0.0 && opts.t_final.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "need dt > 0 and T >= 0, got dt = {}, T = {}",
            opts.dt, opts.t_final
        )));
    }
    if opts.output_stride == 0 {
        return Err(Error::InvalidParameter("output_stride must be >= 1".into()));
    }
    let steps = (opts.t_final / opts.dt).round();
    if (steps * opts.dt - opts.t_final).abs() > 1e-9 * opts.t_final.max(1.0) {
        return Err(Error::InvalidParameter(format!(
            "T = {} is not a whole number of steps dt = {}",
            opts.t_final, opts.dt
        )));
    }
    Ok(steps as usize)
}

/// Evolves `st` to `st.time + T`. The returned states are Nyquist-free and
/// carry times `t₀ + k·dt` computed without accumulation.
pub fn integrate(st: &State, opts: &IntegrateOptions) -> Result<Trajectory> {
    let steps = validate(opts)?;
    let start = st.without_nyquist();
    let mut rec = Recorder {
        opts,
        traj: Trajectory::default(),
        e0: energy(&start).total,
        warned_boundary: false,
    };
    rec.record(&start)?;
    match opts.scheme {
        Scheme::StrangSplit => composition(&start, steps, &[1.0], &mut rec)?,
        Scheme::Yoshida4 => {
            let w1 = 1.0 / (2.0 - 2f64.cbrt());
            composition(&start, steps, &[w1, 1.0 - 2.0 * w1, w1], &mut rec)?
        }
        Scheme::PicardChain {
            c0,
            sigma,
            delta_max,
            tol,
            max_iter,
        } => {
            let mut cur = start.clone();
            let mut done = 0;
            while done < steps {
                let delta = local_existence_time(&cur, sigma, c0, delta_max)?;
                let n = ((delta / opts.dt).floor() as usize).clamp(1, steps - done);
                let popts = PicardOptions {
                    n_steps: n,
                    tol,
                    max_iter,
                    sigma,
                };
                let sol = picard_local_solve(&cur, n as f64 * opts.dt, &popts)?;
                for (i, mut s) in sol.states.into_iter().enumerate().skip(1) {
                    let k = done + i;
                    s.time = start.time + k as f64 * opts.dt;
                    if k % opts.output_stride == 0 || k == steps {
                        rec.record(&s)?;
                    }
                    cur = s;
                }
                done += n;
            }
        }
    }
    Ok(rec.traj)
}

/// Each step is a sequence of Strang substeps of length `w_i dt`. The force
/// after a drift is reused by the following kick.
fn composition(start: &State, steps: usize, weights: &[f64], rec: &mut Recorder) -> Result<()> {
    let opts = rec.opts;
    let grid = *start.grid();
    let params = start.params;
    let props: Vec<LinearPropagator> = weights
        .iter()
        .map(|w| LinearPropagator::new(grid, &params, w * opts.dt))
        .collect();
    let mut u = start.u.coeffs().to_vec();
    let mut ut = start.ut.coeffs().to_vec();
    let force = |u: &[_]| {
        nonlinear_force(&SpectralField::from_parts(grid, u.to_vec()), params.coupling, params.p)
    };
    let mut f = force(&u)?;
    for k in 1..=steps {
        for prop in &props {
            let half = 0.5 * prop.dt();
            for (v, c) in ut.iter_mut().zip(f.coeffs()) {
                *v += c * half;
            }
            prop.apply_pair(&mut u, &mut ut);
            f = force(&u)?;
            for (v, c) in ut.iter_mut().zip(f.coeffs()) {
                *v += c * half;
            }
        }
        if k % opts.output_stride == 0 || k == steps {
            let st = State {
                u: SpectralField::from_parts(grid, u.clone()),
                ut: SpectralField::from_parts(grid, ut.clone()),
                time: start.time + k as f64 * opts.dt,
                params,
            };
            rec.record(&st)?;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solver::{linear_propagate, Params};
    use crate::Grid;
    use std::f64::consts::TAU;

    fn state(coupling: f64) -> State {
        let g = Grid::new(1, 32, TAU).unwrap();
        let u = SpectralField::cosine_mode(g, &[1], 0.5).unwrap();
        let ut = SpectralField::cosine_mode(g, &[2], 0.2).unwrap();
        State::new(u, ut, 0.0, Params::new(1.0, 3).unwrap().with_coupling(coupling)).unwrap()
    }

    #[test]
    fn linear_run_is_exact_for_any_dt() {
        let st = state(0.0);
        for dt in [0.5, 0.05] {
            let traj = integrate(&st, &IntegrateOptions::strang(5.0, dt)).unwrap();
            let exact = linear_propagate(&st, 5.0);
            assert!(traj.last().u.sub(&exact.u).unwrap().max_abs() < 1e-12);
        }
    }

    #[test]
    fn strang_is_second_order() {
        let st = state(1.0);
        let run = |dt| integrate(&st, &IntegrateOptions::strang(1.0, dt)).unwrap().last().u.clone();
        let reference = run(1e-4);
        let e1 = run(0.02).sub(&reference).unwrap().l2_norm();
        let e2 = run(0.01).sub(&reference).unwrap().l2_norm();
        let ratio = e1 / e2;
        assert!((ratio - 4.0).abs() < 0.3, "ratio {ratio}");
    }

    #[test]
    fn yoshida_is_fourth_order() {
        let st = state(1.0);
        let run = |dt| {
            let opts = IntegrateOptions {
                scheme: Scheme::Yoshida4,
                ..IntegrateOptions::strang(1.0, dt)
            };
            integrate(&st, &opts).unwrap().last().u.clone()
        };
        let reference = run(2.5e-3);
        let e1 = run(0.1).sub(&reference).unwrap().l2_norm();
        let e2 = run(0.05).sub(&reference).unwrap().l2_norm();
        let ratio = e1 / e2;
        assert!((ratio - 16.0).abs() < 2.0, "ratio {ratio}");
    }

    #[test]
    fn picard_chain_agrees_with_splitting() {
        let st = state(1.0);
        let chain = IntegrateOptions {
            scheme: Scheme::PicardChain {
                c0: 0.05,
                sigma: 0.0,
                delta_max: 0.25,
                tol: 1e-13,
                max_iter: 60,
            },
            ..IntegrateOptions::strang(1.0, 0.005)
        };
        let a = integrate(&st, &chain).unwrap();
        let b = integrate(&st, &IntegrateOptions::strang(1.0, 0.005)).unwrap();
        assert_eq!(a.states.len(), b.states.len());
        let diff = a.last().u.sub(&b.last().u).unwrap().l2_norm();
        assert!(diff < 1e-4, "diff {diff}");
    }

    #[test]
    fn drift_bound_aborts() {
        let st = state(1.0);
        let opts = IntegrateOptions {
            max_relative_drift: Some(1e-16),
            ..IntegrateOptions::strang(1.0, 0.1)
        };
        assert!(matches!(integrate(&st, &opts), Err(Error::Unstable { .. })));
    }

    #[test]
    fn ragged_final_time_is_rejected() {
        let st = state(1.0);
        assert!(integrate(&st, &IntegrateOptions::strang(1.0, 0.3)).is_err());
    }
}
