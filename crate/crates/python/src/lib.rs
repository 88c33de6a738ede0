//! Python bindings: `import sgo`.
//!
//! Structured results (reports, cards, spectra) come back as plain dicts.

use pyo3::exceptions::{PyArithmeticError, PyValueError};
use pyo3::prelude::*;
use serde::Serialize;
use sgo_core::beats;
use sgo_core::card::{self, CardParams, Noise, SynthMode};
use sgo_core::config::RunConfig;
use sgo_core::plate;
use sgo_core::reference;
use sgo_core::resonance;
use sgo_core::specfun;

fn err(e: sgo_core::Error) -> PyErr {
    let msg = format!("{}: {e}", e.kind());
    if e.is_numerical() {
        PyArithmeticError::new_err(msg)
    } else {
        PyValueError::new_err(msg)
    }
}

/// Serializable value to a Python object through `json.loads`.
fn to_py<'py, T: Serialize>(py: Python<'py>, value: &T) -> PyResult<Bound<'py, PyAny>> {
    let text = serde_json::to_string(value).map_err(|e| PyValueError::new_err(e.to_string()))?;
    py.import("json")?.call_method1("loads", (text,))
}

#[pyfunction]
fn bessel_j(p: f64, z: f64) -> PyResult<(f64, f64)> {
    let b = specfun::bessel_j(p, z).map_err(err)?;
    Ok((b.value, b.derivative))
}

#[pyfunction]
fn bessel_i(p: f64, z: f64) -> PyResult<(f64, f64)> {
    let b = specfun::bessel_i(p, z).map_err(err)?;
    Ok((b.value, b.derivative))
}

#[pyfunction]
fn gamma(x: f64) -> f64 {
    specfun::gamma(x)
}

#[pyfunction]
fn mode_energy(nu: f64, amplitude: f64, area: f64, thickness: f64, density: f64) -> f64 {
    plate::mode_energy(nu, amplitude, area, thickness, density)
}

#[pyclass(name = "PlateSpec", frozen, from_py_object)]
#[derive(Clone)]
struct PyPlateSpec {
    inner: plate::PlateSpec,
}

#[pymethods]
impl PyPlateSpec {
    #[new]
    #[pyo3(signature = (young_modulus, poisson, density, thickness, tension_q1 = 0.0))]
    fn new(young_modulus: f64, poisson: f64, density: f64, thickness: f64, tension_q1: f64) -> PyResult<Self> {
        let inner = plate::PlateSpec::new(young_modulus, poisson, density, thickness, tension_q1).map_err(err)?;
        Ok(PyPlateSpec { inner })
    }

    /// Active disc of a built-in profile, e.g. `"paper-2015"`.
    #[staticmethod]
    fn profile(name: &str) -> PyResult<Self> {
        let cfg = RunConfig::profile(name).map_err(err)?;
        let plate = cfg
            .plate
            .ok_or_else(|| PyValueError::new_err(format!("profile {name} has no [plate] section")))?;
        Ok(PyPlateSpec {
            inner: plate.active().map_err(err)?,
        })
    }

    fn with_tension(&self, tension_q1: f64) -> Self {
        PyPlateSpec {
            inner: self.inner.with_tension(tension_q1),
        }
    }

    #[getter]
    fn tension_q1(&self) -> f64 {
        self.inner.tension_q1
    }

    #[getter]
    fn thickness(&self) -> f64 {
        self.inner.thickness
    }

    fn d1(&self) -> f64 {
        self.inner.d1()
    }

    fn rigidity(&self) -> f64 {
        self.inner.rigidity()
    }

    fn buckling_q1(&self, epsilon: f64) -> f64 {
        self.inner.buckling_q1(epsilon)
    }

    fn sinh_theta(&self, omega: f64) -> f64 {
        plate::sinh_theta(&self.inner, omega)
    }

    fn __repr__(&self) -> String {
        let s = &self.inner;
        format!(
            "PlateSpec(young_modulus={}, poisson={}, density={}, thickness={}, tension_q1={})",
            s.young_modulus, s.poisson, s.density, s.thickness, s.tension_q1
        )
    }
}

#[pyfunction]
fn active_eigenfrequencies<'py>(
    py: Python<'py>,
    spec: &PyPlateSpec,
    epsilon: f64,
    count: usize,
) -> PyResult<Bound<'py, PyAny>> {
    to_py(
        py,
        &resonance::active_eigenfrequencies(&spec.inner, epsilon, count).map_err(err)?,
    )
}

#[pyfunction]
#[pyo3(signature = (complement, nu0, mode_l = 1))]
fn tune_outer_radius<'py>(
    py: Python<'py>,
    complement: &PyPlateSpec,
    nu0: f64,
    mode_l: usize,
) -> PyResult<Bound<'py, PyAny>> {
    to_py(
        py,
        &resonance::tune_outer_radius(&complement.inner, nu0, mode_l).map_err(err)?,
    )
}

#[pyfunction]
fn tune_tension<'py>(py: Python<'py>, spec: &PyPlateSpec, epsilon: f64, nu0: f64) -> PyResult<Bound<'py, PyAny>> {
    to_py(py, &resonance::tune_tension(&spec.inner, epsilon, nu0).map_err(err)?)
}

#[pyfunction]
fn resonance_scan<'py>(
    py: Python<'py>,
    active: &PyPlateSpec,
    complement: &PyPlateSpec,
    epsilon: f64,
    outer_radius: f64,
    q1_grid: Vec<f64>,
) -> PyResult<Bound<'py, PyAny>> {
    let geometry = plate::CircularGeometry::new(epsilon, outer_radius).map_err(err)?;
    to_py(
        py,
        &resonance::resonance_scan(&active.inner, &complement.inner, &geometry, &q1_grid).map_err(err)?,
    )
}

#[pyfunction]
fn published_checks<'py>(
    py: Python<'py>,
    active: &PyPlateSpec,
    complement: &PyPlateSpec,
    epsilon: f64,
    nu0: f64,
) -> PyResult<Bound<'py, PyAny>> {
    to_py(
        py,
        &reference::published_checks(&active.inner, &complement.inner, epsilon, nu0).map_err(err)?,
    )
}

#[pyfunction]
fn two_osc_exact_spectrum(lambda_m: f64, lambda_big: f64, eps: f64) -> (f64, f64) {
    beats::two_osc_exact_spectrum(lambda_m, lambda_big, eps)
}

#[pyfunction]
fn two_osc_approx_spectrum<'py>(
    py: Python<'py>,
    lambda_m: f64,
    lambda_big: f64,
    eps: f64,
) -> PyResult<Bound<'py, PyAny>> {
    to_py(py, &beats::two_osc_approx_spectrum(lambda_m, lambda_big, eps))
}

#[pyclass(name = "OscillatorSystem", frozen, from_py_object)]
#[derive(Clone)]
struct PyOscillatorSystem {
    inner: beats::OscillatorSystem,
}

#[pymethods]
impl PyOscillatorSystem {
    #[new]
    fn new(
        mass_small: f64,
        stiffness_small: f64,
        masses_large: Vec<f64>,
        stiffnesses_large: Vec<f64>,
        coupling: Vec<f64>,
    ) -> PyResult<Self> {
        let inner =
            beats::OscillatorSystem::new(mass_small, stiffness_small, masses_large, stiffnesses_large, coupling)
                .map_err(err)?;
        Ok(PyOscillatorSystem { inner })
    }

    /// Two oscillators with eigenvalues `lambda_m`, `lambda_big` and
    /// coupling `eps`.
    #[staticmethod]
    #[pyo3(signature = (lambda_m, lambda_big, eps, mass_small = 1.0, mass_large = 1.0))]
    fn pair(lambda_m: f64, lambda_big: f64, eps: f64, mass_small: f64, mass_large: f64) -> PyResult<Self> {
        let inner =
            beats::OscillatorSystem::from_pair(mass_small, lambda_m, mass_large, lambda_big, eps).map_err(err)?;
        Ok(PyOscillatorSystem { inner })
    }

    #[getter]
    fn mu(&self) -> usize {
        self.inner.mu()
    }

    fn secular(&self, lambda: f64) -> PyResult<f64> {
        beats::secular_function(&self.inner, lambda).map_err(err)
    }

    /// Eigenvalues, frequencies, mass-orthonormal vectors and normalizations.
    fn spectrum<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        to_py(py, &beats::perturbed_spectrum(&self.inner).map_err(err)?)
    }

    /// Energy series with all energy initially on the small oscillator.
    #[pyo3(signature = (t_end, samples, initial_energy = 1.0))]
    fn energy_series<'py>(
        &self,
        py: Python<'py>,
        t_end: f64,
        samples: usize,
        initial_energy: f64,
    ) -> PyResult<Bound<'py, PyAny>> {
        let spectrum = beats::perturbed_spectrum(&self.inner).map_err(err)?;
        let initial = beats::InitialState::small_excited(&self.inner, initial_energy);
        let solution = beats::solve_cauchy(&spectrum, &initial).map_err(err)?;
        to_py(py, &beats::energy_series(&solution, t_end, samples).map_err(err)?)
    }

    fn beat_period(&self) -> PyResult<f64> {
        Ok(beats::beat_period(
            &beats::perturbed_spectrum(&self.inner).map_err(err)?,
        ))
    }

    #[pyo3(signature = (initial_energy = 1.0, horizon = None))]
    fn transfer_coefficient(&self, initial_energy: f64, horizon: Option<f64>) -> PyResult<f64> {
        Ok(beats::transfer_coefficient(&self.inner, initial_energy, horizon)
            .map_err(err)?
            .k)
    }

    #[pyo3(signature = (detunings, initial_energy = 1.0))]
    fn transfer_sweep(&self, detunings: Vec<f64>, initial_energy: f64) -> PyResult<Vec<(f64, f64)>> {
        beats::transfer_sweep(&self.inner, initial_energy, &detunings).map_err(err)
    }

    fn optimal_window<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        to_py(py, &beats::optimal_window(&self.inner).map_err(err)?)
    }

    fn __repr__(&self) -> String {
        let s = &self.inner;
        format!(
            "OscillatorSystem(mass_small={}, stiffness_small={}, masses_large={:?}, stiffnesses_large={:?}, coupling={:?})",
            s.mass_small, s.stiffness_small, s.masses_large, s.stiffnesses_large, s.coupling
        )
    }
}

#[pyclass(name = "SignalSeries", frozen, from_py_object)]
#[derive(Clone)]
struct PySignalSeries {
    inner: card::SignalSeries,
}

#[pymethods]
impl PySignalSeries {
    #[new]
    #[pyo3(signature = (values, dt, t0 = 0.0))]
    fn new(values: Vec<f64>, dt: f64, t0: f64) -> PyResult<Self> {
        Ok(PySignalSeries {
            inner: card::SignalSeries::new(t0, dt, values).map_err(err)?,
        })
    }

    #[getter]
    fn t0(&self) -> f64 {
        self.inner.t0
    }

    #[getter]
    fn dt(&self) -> f64 {
        self.inner.dt
    }

    #[getter]
    fn values(&self) -> Vec<f64> {
        self.inner.values.clone()
    }

    fn __len__(&self) -> usize {
        self.inner.values.len()
    }

    /// `A²` in `[f_lo, f_hi)` µHz over the window `[start, start + width)` s.
    fn band_amplitude(&self, f_lo_uhz: f64, f_hi_uhz: f64, start: f64, width: f64) -> PyResult<f64> {
        card::band_amplitude(&self.inner, f_lo_uhz, f_hi_uhz, start, width).map_err(err)
    }

    #[pyo3(signature = (f_lo_uhz, f_hi_uhz, window_hours = 20.0, stride_minutes = 30.0, bin_width_uhz = None, pad_factor = 1))]
    #[allow(clippy::too_many_arguments)]
    fn card<'py>(
        &self,
        py: Python<'py>,
        f_lo_uhz: f64,
        f_hi_uhz: f64,
        window_hours: f64,
        stride_minutes: f64,
        bin_width_uhz: Option<f64>,
        pad_factor: usize,
    ) -> PyResult<Bound<'py, PyAny>> {
        let params = CardParams {
            bin_width_uhz,
            window_hours,
            stride_minutes,
            pad_factor,
            ..CardParams::new(f_lo_uhz, f_hi_uhz)
        };
        to_py(py, &card::build_card(&self.inner, &params).map_err(err)?)
    }
}

/// Sum of cosines `(nu_uhz, amplitude, phase)` sampled at `sample_rate_hz`,
/// with optional seeded Gaussian noise.
#[pyfunction]
#[pyo3(signature = (duration_hours, modes, sample_rate_hz, noise_std = None, seed = 0))]
fn synth_sgo(
    duration_hours: f64,
    modes: Vec<(f64, f64, f64)>,
    sample_rate_hz: f64,
    noise_std: Option<f64>,
    seed: u64,
) -> PyResult<PySignalSeries> {
    let modes: Vec<SynthMode> = modes
        .into_iter()
        .map(|(nu_uhz, amplitude, phase)| SynthMode {
            nu_uhz,
            amplitude,
            phase,
        })
        .collect();
    let noise = noise_std.map(|std| Noise { std, seed });
    Ok(PySignalSeries {
        inner: card::synth_sgo(duration_hours, &modes, sample_rate_hz, noise).map_err(err)?,
    })
}

/// Resolved configuration of a built-in profile as a dict.
#[pyfunction]
fn profile<'py>(py: Python<'py>, name: &str) -> PyResult<Bound<'py, PyAny>> {
    to_py(py, &RunConfig::profile(name).and_then(|c| c.resolved()).map_err(err)?)
}

#[pymodule]
fn sgo(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    m.add_class::<PyPlateSpec>()?;
    m.add_class::<PyOscillatorSystem>()?;
    m.add_class::<PySignalSeries>()?;
    m.add_function(wrap_pyfunction!(bessel_j, m)?)?;
    m.add_function(wrap_pyfunction!(bessel_i, m)?)?;
    m.add_function(wrap_pyfunction!(gamma, m)?)?;
    m.add_function(wrap_pyfunction!(mode_energy, m)?)?;
    m.add_function(wrap_pyfunction!(active_eigenfrequencies, m)?)?;
    m.add_function(wrap_pyfunction!(tune_outer_radius, m)?)?;
    m.add_function(wrap_pyfunction!(tune_tension, m)?)?;
    m.add_function(wrap_pyfunction!(resonance_scan, m)?)?;
    m.add_function(wrap_pyfunction!(published_checks, m)?)?;
    m.add_function(wrap_pyfunction!(two_osc_exact_spectrum, m)?)?;
    m.add_function(wrap_pyfunction!(two_osc_approx_spectrum, m)?)?;
    m.add_function(wrap_pyfunction!(synth_sgo, m)?)?;
    m.add_function(wrap_pyfunction!(profile, m)?)?;
    Ok(())
}
