//! Python bindings. Structured results (energies, radius estimates, check
//! reports, drift tables) come back as plain dicts.

use gevrey_beam::analyticity::{
    continuation_radius as core_continuation_radius, estimate_radius, gevrey_lift, modified_energy,
    residual_ratio as core_residual_ratio, sigma_drift_sweep as core_sweep, FitPolicy,
};
use gevrey_beam::initial::InitialData;
use gevrey_beam::lab;
use gevrey_beam::solver::{self, IntegrateOptions, Scheme};
use gevrey_beam::spectral::inverse_transform;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyComplex;
use serde::de::DeserializeOwned;
use serde::Serialize;

fn py_err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn to_py<'py>(py: Python<'py>, value: &impl Serialize) -> PyResult<Bound<'py, PyAny>> {
    let text = serde_json::to_string(value).map_err(py_err)?;
    py.import("json")?.call_method1("loads", (text,))
}

/// Accepts a JSON string or anything `json.dumps` understands.
fn from_py<T: DeserializeOwned>(obj: &Bound<'_, PyAny>) -> PyResult<T> {
    let text: String = match obj.extract::<String>() {
        Ok(s) => s,
        Err(_) => obj.py().import("json")?.call_method1("dumps", (obj,))?.extract()?,
    };
    serde_json::from_str(&text).map_err(py_err)
}

#[pyclass(name = "Grid", frozen, skip_from_py_object)]
#[derive(Clone, Copy)]
pub struct PyGrid(gevrey_beam::Grid);

#[pymethods]
impl PyGrid {
    #[new]
    fn new(dim: usize, points_per_dim: usize, box_length: f64) -> PyResult<Self> {
        gevrey_beam::Grid::new(dim, points_per_dim, box_length).map(Self).map_err(py_err)
    }

    #[getter]
    fn dim(&self) -> usize {
        self.0.dim()
    }

    #[getter]
    fn points_per_dim(&self) -> usize {
        self.0.points_per_dim()
    }

    #[getter]
    fn box_length(&self) -> f64 {
        self.0.box_length()
    }

    fn __len__(&self) -> usize {
        self.0.len()
    }

    fn __repr__(&self) -> String {
        format!(
            "Grid(dim={}, points_per_dim={}, box_length={})",
            self.0.dim(),
            self.0.points_per_dim(),
            self.0.box_length()
        )
    }
}

/// Fourier coefficients of a real field on a periodic grid.
#[pyclass(name = "Field", frozen, skip_from_py_object)]
#[derive(Clone)]
pub struct PyField(gevrey_beam::SpectralField);

#[pymethods]
impl PyField {
    /// Builds an initial-data family, e.g.
    /// `{"family": "lorentz_pole", "amplitude": 1.0, "a": 0.5}`.
    #[staticmethod]
    fn from_initial(grid: &PyGrid, spec: &Bound<'_, PyAny>) -> PyResult<Self> {
        let data: InitialData = from_py(spec)?;
        data.validate(&grid.0).map_err(py_err)?;
        data.build(&grid.0).map(Self).map_err(py_err)
    }

    #[getter]
    fn grid(&self) -> PyGrid {
        PyGrid(*self.0.grid())
    }

    fn coeffs<'py>(&self, py: Python<'py>) -> Vec<Bound<'py, PyComplex>> {
        self.0
            .coeffs()
            .iter()
            .map(|c| PyComplex::from_doubles(py, c.re, c.im))
            .collect()
    }

    fn moduli(&self) -> Vec<f64> {
        self.0.moduli()
    }

    /// Physical-space samples (row-major).
    fn values(&self) -> PyResult<Vec<f64>> {
        inverse_transform(&self.0).map(|f| f.into_values()).map_err(py_err)
    }

    fn l2_norm(&self) -> f64 {
        self.0.l2_norm()
    }

    /// Analyticity-radius estimate from the spectral decay; `policy` is an
    /// optional dict of fit settings.
    #[pyo3(signature = (policy = None))]
    fn estimate_radius<'py>(
        &self,
        py: Python<'py>,
        policy: Option<&Bound<'py, PyAny>>,
    ) -> PyResult<Bound<'py, PyAny>> {
        let policy: FitPolicy = match policy {
            Some(p) => from_py(p)?,
            None => FitPolicy::default(),
        };
        to_py(py, &estimate_radius(&self.0, &policy).map_err(py_err)?)
    }

    fn __len__(&self) -> usize {
        self.0.coeffs().len()
    }
}

#[pyclass(name = "Params", frozen, skip_from_py_object)]
#[derive(Clone, Copy)]
pub struct PyParams(solver::Params);

#[pymethods]
impl PyParams {
    #[new]
    #[pyo3(signature = (m, p, coupling = 1.0))]
    fn new(m: f64, p: u32, coupling: f64) -> PyResult<Self> {
        let params = solver::Params::new(m, p).map_err(py_err)?.with_coupling(coupling);
        params.validate().map_err(py_err)?;
        Ok(Self(params))
    }

    #[getter]
    fn m(&self) -> f64 {
        self.0.m
    }

    #[getter]
    fn p(&self) -> u32 {
        self.0.p
    }

    #[getter]
    fn coupling(&self) -> f64 {
        self.0.coupling
    }
}

/// `(u, u_t)` at one time.
#[pyclass(name = "State", frozen, skip_from_py_object)]
#[derive(Clone)]
pub struct PyState(solver::State);

#[pymethods]
impl PyState {
    #[new]
    #[pyo3(signature = (u, ut, params, time = 0.0))]
    fn new(u: &PyField, ut: &PyField, params: &PyParams, time: f64) -> PyResult<Self> {
        solver::State::new(u.0.clone(), ut.0.clone(), time, params.0)
            .map(Self)
            .map_err(py_err)
    }

    #[getter]
    fn time(&self) -> f64 {
        self.0.time
    }

    #[getter]
    fn u(&self) -> PyField {
        PyField(self.0.u.clone())
    }

    #[getter]
    fn ut(&self) -> PyField {
        PyField(self.0.ut.clone())
    }

    #[getter]
    fn params(&self) -> PyParams {
        PyParams(self.0.params)
    }

    fn energy<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        to_py(py, &solver::energy(&self.0))
    }

    fn modified_energy<'py>(&self, py: Python<'py>, sigma: f64) -> PyResult<Bound<'py, PyAny>> {
        to_py(py, &modified_energy(&self.0, sigma).map_err(py_err)?)
    }

    fn gevrey_lift(&self, sigma: f64) -> PyResult<Self> {
        gevrey_lift(&self.0, sigma).map(Self).map_err(py_err)
    }

    fn linear_propagate(&self, dt: f64) -> Self {
        Self(solver::linear_propagate(&self.0, dt))
    }
}

/// Integrates to `t_final`; returns `(states, energies)` at every
/// `output_stride`-th step. `scheme` is `"strang_split"` or `"yoshida4"`.
#[pyfunction]
#[pyo3(signature = (state, t_final, dt, scheme = "strang_split", output_stride = 1))]
fn integrate<'py>(
    py: Python<'py>,
    state: &PyState,
    t_final: f64,
    dt: f64,
    scheme: &str,
    output_stride: usize,
) -> PyResult<(Vec<PyState>, Bound<'py, PyAny>)> {
    let scheme = match scheme {
        "strang_split" => Scheme::StrangSplit,
        "yoshida4" => Scheme::Yoshida4,
        other => return Err(py_err(format!("unknown scheme {other:?}"))),
    };
    let opts = IntegrateOptions {
        scheme,
        output_stride,
        ..IntegrateOptions::strang(t_final, dt)
    };
    let traj = py
        .detach(|| solver::integrate(&state.0, &opts))
        .map_err(py_err)?;
    let energies = to_py(py, &traj.energies)?;
    Ok((traj.states.into_iter().map(PyState).collect(), energies))
}

/// Lifted-energy drift table over `[t₀, t₀ + delta]` of a trajectory.
#[pyfunction]
fn sigma_drift_sweep<'py>(
    py: Python<'py>,
    states: Vec<PyRef<'py, PyState>>,
    sigmas: Vec<f64>,
    delta: f64,
) -> PyResult<Bound<'py, PyAny>> {
    let traj: Vec<solver::State> = states.iter().map(|s| s.0.clone()).collect();
    let table = py.detach(|| core_sweep(&traj, &sigmas, delta)).map_err(py_err)?;
    to_py(py, &table)
}

#[pyfunction]
fn residual_ratio(field: &PyField, sigma: f64, p: u32) -> PyResult<f64> {
    core_residual_ratio(&field.0, sigma, p).map_err(py_err)
}

#[pyfunction]
fn continuation_radius(t: f64, e0: f64, c_fit: f64, p: u32, sigma0: f64) -> PyResult<f64> {
    core_continuation_radius(t, e0, c_fit, p, sigma0).map_err(py_err)
}

/// Randomized scalar-inequality suites; one report dict per check.
#[pyfunction]
#[pyo3(signature = (samples = 100_000, seed = 0))]
fn verify_lemmas(py: Python<'_>, samples: u64, seed: u64) -> PyResult<Bound<'_, PyAny>> {
    let reports = py.detach(|| lab::verify_lemmas(samples, seed));
    to_py(py, &reports)
}

#[pymodule(name = "gevrey_beam")]
fn gevrey_beam_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyGrid>()?;
    m.add_class::<PyField>()?;
    m.add_class::<PyParams>()?;
    m.add_class::<PyState>()?;
    m.add_function(wrap_pyfunction!(integrate, m)?)?;
    m.add_function(wrap_pyfunction!(sigma_drift_sweep, m)?)?;
    m.add_function(wrap_pyfunction!(residual_ratio, m)?)?;
    m.add_function(wrap_pyfunction!(continuation_radius, m)?)?;
    m.add_function(wrap_pyfunction!(verify_lemmas, m)?)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dict_round_trip_through_json() {
        Python::initialize();
        Python::attach(|py| {
            let spec = to_py(py, &InitialData::LorentzPole { amplitude: 1.0, a: 0.5 }).unwrap();
            assert_eq!(spec.get_item("family").unwrap().extract::<String>().unwrap(), "lorentz_pole");
            let back: InitialData = from_py(&spec).unwrap();
            assert_eq!(back, InitialData::LorentzPole { amplitude: 1.0, a: 0.5 });
            let from_str: InitialData = from_py(&r#"{"family": "zero"}"#.into_pyobject(py).unwrap().into_any()).unwrap();
            assert_eq!(from_str, InitialData::Zero);
        });
    }
}
