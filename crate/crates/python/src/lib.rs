use nalgebra::DMatrix;
use pyo3::create_exception;
use pyo3::exceptions::{PyOSError, PyValueError};
use pyo3::prelude::*;

use shock_severity as core;
use shock_severity::modal::{load_modal_model, predict_bounds, ModalModel};
use shock_severity::sdof::{log_freq_grid, sdof_response_filter, sdof_response_oracle, DEFAULT_SUBSTEPS};
use shock_severity::signal::{self as sig, DampedSine, SignalFormat, Units};
use shock_severity::spectrum::{build_response_matrix, export_src};
use shock_severity::ssi::{dual_spectra, ssi_extract, svd_nonneg, DEFAULT_RANK_TOL};
use shock_severity::verify::{verify_bounds, DEFAULT_SEED};
use shock_severity::OscillatorBank;

create_exception!(pyshock, DegenerateInputError, PyValueError);

fn err(e: core::Error) -> PyErr {
    match e {
        core::Error::Io { .. } => PyOSError::new_err(e.to_string()),
        core::Error::DegenerateInput(_) => DegenerateInputError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

fn units(name: &str) -> PyResult<Units> {
    match name {
        "ms2" | "m/s2" => Ok(Units::Ms2),
        "g" => Ok(Units::G),
        _ => Err(PyValueError::new_err(format!("unknown units {name:?}; use 'ms2' or 'g'"))),
    }
}

/// Uniformly sampled base acceleration (m/s²).
#[pyclass(name = "Signal", frozen)]
struct PySignal {
    inner: core::Signal,
}

#[pymethods]
impl PySignal {
    #[new]
    #[pyo3(signature = (samples, dt, label = "signal"))]
    fn new(samples: Vec<f64>, dt: f64, label: &str) -> PyResult<Self> {
        Ok(PySignal { inner: core::Signal::new(samples, dt, label).map_err(err)? })
    }

    /// Read a two-column file, or a single-column one when `dt` is given.
    #[staticmethod]
    #[pyo3(signature = (path, dt = None, units = "ms2"))]
    fn load(path: &str, dt: Option<f64>, units: &str) -> PyResult<Self> {
        let format = match dt {
            Some(dt) => SignalFormat::SingleColumn { dt },
            None => SignalFormat::TwoColumn,
        };
        let inner = sig::load_signal_with_units(path, format, self::units(units)?).map_err(err)?;
        Ok(PySignal { inner })
    }

    fn save(&self, path: &str) -> PyResult<()> {
        sig::save_signal(&self.inner, path).map_err(err)
    }

    #[getter]
    fn samples(&self) -> Vec<f64> {
        self.inner.samples().to_vec()
    }

    #[getter]
    fn dt(&self) -> f64 {
        self.inner.dt()
    }

    #[getter]
    fn label(&self) -> String {
        self.inner.label().to_string()
    }

    fn times(&self) -> Vec<f64> {
        self.inner.times()
    }

    fn peak_abs(&self) -> f64 {
        self.inner.peak_abs()
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }

    fn __repr__(&self) -> String {
        format!("Signal(label={:?}, n={}, dt={:e})", self.inner.label(), self.inner.len(), self.inner.dt())
    }
}

/// Signed and absolute oscillator responses, time × frequency.
#[pyclass(name = "ResponseMatrix", frozen)]
struct PyResponseMatrix {
    inner: core::ResponseMatrix,
}

#[pymethods]
impl PyResponseMatrix {
    /// Build from a signal over a log-spaced oscillator bank.
    #[new]
    #[pyo3(signature = (signal, fmin = 100.0, fmax = 25_600.0, ppo = 6, q = 10.0))]
    fn new(signal: &PySignal, fmin: f64, fmax: f64, ppo: usize, q: f64) -> PyResult<Self> {
        let bank = OscillatorBank::log_spaced(fmin, fmax, ppo, q).map_err(err)?;
        Ok(PyResponseMatrix { inner: build_response_matrix(&signal.inner, &bank).map_err(err)? })
    }

    /// Wrap an arbitrary row-major matrix with unit axes.
    #[staticmethod]
    fn from_rows(rows: Vec<Vec<f64>>) -> PyResult<Self> {
        let m = rows.len();
        let n = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != n) {
            return Err(PyValueError::new_err("rows must have equal length"));
        }
        let flat: Vec<f64> = rows.into_iter().flatten().collect();
        let inner = core::ResponseMatrix::from_raw(DMatrix::from_row_slice(m, n, &flat)).map_err(err)?;
        Ok(PyResponseMatrix { inner })
    }

    #[getter]
    fn shape(&self) -> (usize, usize) {
        (self.inner.nrows(), self.inner.ncols())
    }

    #[getter]
    fn freqs(&self) -> Vec<f64> {
        self.inner.freqs().to_vec()
    }

    #[getter]
    fn times(&self) -> Vec<f64> {
        self.inner.times().to_vec()
    }

    /// One oscillator's absolute acceleration history.
    fn column(&self, j: usize) -> PyResult<Vec<f64>> {
        if j >= self.inner.ncols() {
            return Err(PyValueError::new_err(format!("column {j} out of range")));
        }
        Ok(self.inner.m_signed().column(j).iter().copied().collect())
    }

    /// Maximax shock response spectrum.
    fn srs(&self) -> Vec<f64> {
        core::spectrum::srs(&self.inner).values
    }

    fn ssi(&self) -> PyResult<PySsi> {
        let s = ssi_extract(&svd_nonneg(&self.inner, DEFAULT_RANK_TOL).map_err(err)?).map_err(err)?;
        Ok(PySsi { freqs: s.freqs, v_ssi: s.v_ssi, u_ssi: s.u_ssi, alpha: s.alpha, sigma: s.sigma })
    }

    fn dual(&self) -> PyResult<PyDual> {
        let spectrum = core::spectrum::srs(&self.inner);
        let ssi = ssi_extract(&svd_nonneg(&self.inner, DEFAULT_RANK_TOL).map_err(err)?).map_err(err)?;
        let d = dual_spectra(&spectrum, &ssi).map_err(err)?;
        Ok(PyDual { freqs: d.freqs, srs: d.srs, ssi: d.ssi, margin_db: d.margin_db, alpha: ssi.alpha })
    }

    /// Modal-superposition response bounds; bundled cantilever beam by default.
    #[pyo3(signature = (modal_path = None))]
    fn predict(&self, modal_path: Option<&str>) -> PyResult<PyBounds> {
        let model = match modal_path {
            Some(p) => load_modal_model(p).map_err(err)?,
            None => ModalModel::cantilever_beam(),
        };
        let spectrum = core::spectrum::srs(&self.inner);
        let ssi = ssi_extract(&svd_nonneg(&self.inner, DEFAULT_RANK_TOL).map_err(err)?).map_err(err)?;
        let b = predict_bounds(&self.inner, &spectrum, &ssi, &model).map_err(err)?;
        Ok(PyBounds {
            actual_max: b.actual_max,
            abs_max: b.abs_max,
            ssi_bound: b.ssi_bound,
            srs_bound: b.srs_bound,
            left_bound_ok: b.left_bound_ok(),
        })
    }

    #[pyo3(signature = (trials = 1000, seed = DEFAULT_SEED))]
    fn verify(&self, trials: usize, seed: u64) -> PyResult<PyVerify> {
        let d = svd_nonneg(&self.inner, DEFAULT_RANK_TOL).map_err(err)?;
        let ssi = ssi_extract(&d).map_err(err)?;
        let spectrum = core::spectrum::srs(&self.inner);
        let r = verify_bounds(&self.inner, &d, &spectrum, &ssi, trials, seed).map_err(err)?;
        Ok(PyVerify {
            proved_bounds_hold: r.proved_bounds_hold(),
            left_violation_rate: r.left_violation_rate(),
            trials: r.trials,
            left_violations: r.left_violations,
            gap_min: r.gap_min,
            gap_median: r.gap_median,
            gap_max: r.gap_max,
            left_witness: r.left_witness,
        })
    }

    /// Write `<stem>.csv` and `<stem>.svg`; returns both paths.
    #[pyo3(signature = (stem, floor = 240.0, ceiling = 200_000.0))]
    fn export_src(&self, stem: &str, floor: f64, ceiling: f64) -> PyResult<(String, String)> {
        let (c, s) = export_src(&self.inner, floor, ceiling, stem).map_err(err)?;
        Ok((c.display().to_string(), s.display().to_string()))
    }
}

#[pyclass(name = "SsiResult", frozen, get_all)]
struct PySsi {
    freqs: Vec<f64>,
    v_ssi: Vec<f64>,
    u_ssi: Vec<f64>,
    alpha: f64,
    sigma: Vec<f64>,
}

#[pyclass(name = "DualSpectra", frozen, get_all)]
struct PyDual {
    freqs: Vec<f64>,
    srs: Vec<f64>,
    ssi: Vec<f64>,
    margin_db: Vec<f64>,
    alpha: f64,
}

#[pyclass(name = "ResponseBounds", frozen, get_all)]
struct PyBounds {
    actual_max: f64,
    abs_max: f64,
    ssi_bound: f64,
    srs_bound: f64,
    left_bound_ok: bool,
}

#[pyclass(name = "VerifyReport", frozen, get_all)]
struct PyVerify {
    proved_bounds_hold: bool,
    left_violation_rate: f64,
    trials: usize,
    left_violations: usize,
    gap_min: f64,
    gap_median: f64,
    gap_max: f64,
    left_witness: Option<Vec<f64>>,
}

#[pyfunction]
#[pyo3(signature = (amplitude, duration, dt, pad = 0.0))]
fn half_sine(amplitude: f64, duration: f64, dt: f64, pad: f64) -> PyResult<PySignal> {
    Ok(PySignal { inner: sig::gen_half_sine(amplitude, duration, dt, pad).map_err(err)? })
}

/// `components`: `(freq_hz, amplitude, decay, phase)` tuples.
#[pyfunction]
fn damped_sine_sum(components: Vec<(f64, f64, f64, f64)>, duration: f64, dt: f64) -> PyResult<PySignal> {
    let comps: Vec<DampedSine> = components.into_iter().map(|(f, a, d, p)| DampedSine::new(f, a, d, p)).collect();
    Ok(PySignal { inner: sig::gen_damped_sine_sum(&comps, duration, dt).map_err(err)? })
}

#[pyfunction]
#[pyo3(name = "log_freq_grid")]
fn grid(fmin: f64, fmax: f64, ppo: usize) -> PyResult<Vec<f64>> {
    log_freq_grid(fmin, fmax, ppo).map_err(err)
}

/// Absolute acceleration of one oscillator, recursive filter or RK4 reference.
#[pyfunction]
#[pyo3(signature = (signal, freq_hz, zeta = 0.05, reference = false))]
fn sdof_response(signal: &PySignal, freq_hz: f64, zeta: f64, reference: bool) -> PyResult<Vec<f64>> {
    let out = if reference {
        sdof_response_oracle(&signal.inner, freq_hz, zeta, DEFAULT_SUBSTEPS)
    } else {
        sdof_response_filter(&signal.inner, freq_hz, zeta)
    }
    .map_err(err)?;
    Ok(out.samples().to_vec())
}

#[pymodule]
fn pyshock(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("DegenerateInputError", m.py().get_type::<DegenerateInputError>())?;
    m.add_class::<PySignal>()?;
    m.add_class::<PyResponseMatrix>()?;
    m.add_class::<PySsi>()?;
    m.add_class::<PyDual>()?;
    m.add_class::<PyBounds>()?;
    m.add_class::<PyVerify>()?;
    m.add_function(wrap_pyfunction!(half_sine, m)?)?;
    m.add_function(wrap_pyfunction!(damped_sine_sum, m)?)?;
    m.add_function(wrap_pyfunction!(grid, m)?)?;
    m.add_function(wrap_pyfunction!(sdof_response, m)?)?;
    Ok(())
}
