//! Shock response matrix, its magnitude, and the maximax SRS.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use nalgebra::DMatrix;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::plot;
use crate::sdof::{OscillatorBank, RampInvariantFilter, NYQUIST_GUARD};
use crate::signal::Signal;

/// Display range of the response contour, m/s².
pub const DEFAULT_SRC_FLOOR: f64 = 240.0;
pub const DEFAULT_SRC_CEILING: f64 = 200_000.0;

/// Responses of every oscillator over time.
///
/// Rows are time samples, columns are natural frequencies. `n_abs` is the
/// element-wise magnitude of `m_signed`.
#[derive(Debug, Clone, PartialEq)]
pub struct ResponseMatrix {
    m_signed: DMatrix<f64>,
    n_abs: DMatrix<f64>,
    times: Vec<f64>,
    freqs: Vec<f64>,
    q: f64,
}

impl ResponseMatrix {
    /// Wrap an existing signed response matrix.
    pub fn from_signed(m_signed: DMatrix<f64>, times: Vec<f64>, freqs: Vec<f64>, q: f64) -> Result<Self> {
        if m_signed.nrows() != times.len() || m_signed.ncols() != freqs.len() {
            return Err(Error::Parameter(format!(
                "matrix is {}x{} but axes are {}x{}",
                m_signed.nrows(),
                m_signed.ncols(),
                times.len(),
                freqs.len()
            )));
        }
        if m_signed.is_empty() {
            return Err(Error::Parameter("response matrix is empty".into()));
        }
        if m_signed.iter().any(|v| !v.is_finite()) {
            return Err(Error::Parameter("response matrix has non-finite entries".into()));
        }
        let n_abs = m_signed.abs();
        Ok(ResponseMatrix {
            m_signed,
            n_abs,
            times,
            freqs,
            q,
        })
    }

    /// Build from an arbitrary matrix with unit time step and frequency
    /// axis `1..=n`. Handy for exercising the decomposition on plain data.
    pub fn from_raw(m_signed: DMatrix<f64>) -> Result<Self> {
        let times = (0..m_signed.nrows()).map(|i| i as f64).collect();
        let freqs = (1..=m_signed.ncols()).map(|j| j as f64).collect();
        ResponseMatrix::from_signed(m_signed, times, freqs, crate::sdof::DEFAULT_Q)
    }

    pub fn m_signed(&self) -> &DMatrix<f64> {
        &self.m_signed
    }

    pub fn n_abs(&self) -> &DMatrix<f64> {
        &self.n_abs
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn freqs(&self) -> &[f64] {
        &self.freqs
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    pub fn nrows(&self) -> usize {
        self.m_signed.nrows()
    }

    pub fn ncols(&self) -> usize {
        self.m_signed.ncols()
    }

    /// Same matrix scaled by `c` (axes unchanged).
    pub fn scaled(&self, c: f64) -> ResponseMatrix {
        ResponseMatrix {
            m_signed: &self.m_signed * c,
            n_abs: &self.n_abs * c.abs(),
            times: self.times.clone(),
            freqs: self.freqs.clone(),
            q: self.q,
        }
    }
}

/// Run every oscillator of `bank` over `signal`.
pub fn build_response_matrix(signal: &Signal, bank: &OscillatorBank) -> Result<ResponseMatrix> {
    let limit = NYQUIST_GUARD * signal.nyquist();
    if let Some(&f) = bank.freqs().iter().find(|f| **f >= limit) {
        return Err(Error::Alias {
            freq_hz: f,
            limit_hz: limit,
        });
    }
    let m = signal.len();
    let n = bank.len();
    let zeta = bank.zeta();
    let dt = signal.dt();
    let mut data = vec![0.0; m * n];
    // Column-major storage: each chunk is one oscillator.
    data.par_chunks_mut(m)
        .zip(bank.freqs().par_iter())
        .for_each(|(col, &f)| RampInvariantFilter::new(f, zeta, dt).apply_into(signal.samples(), col));
    let m_signed = DMatrix::from_vec(m, n, data);
    ResponseMatrix::from_signed(m_signed, signal.times(), bank.freqs().to_vec(), bank.q())
}

/// Maximax absolute-acceleration spectrum.
#[derive(Debug, Clone, PartialEq)]
pub struct SrsVector {
    pub freqs: Vec<f64>,
    pub values: Vec<f64>,
}

impl SrsVector {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("freq_hz,srs_ms2\n");
        for (f, v) in self.freqs.iter().zip(&self.values) {
            let _ = writeln!(out, "{f:.10e},{v:.10e}");
        }
        out
    }
}

/// Column maxima of the magnitude matrix.
pub fn srs(matrix: &ResponseMatrix) -> SrsVector {
    let values = matrix
        .n_abs
        .column_iter()
        .map(|c| c.iter().fold(0.0f64, |m, v| m.max(*v)))
        .collect();
    SrsVector {
        freqs: matrix.freqs.clone(),
        values,
    }
}

/// Long-format dump `time_s,freq_hz,abs_accel_ms2`, unclamped.
pub fn src_csv(matrix: &ResponseMatrix) -> String {
    let mut out = String::with_capacity(matrix.nrows() * matrix.ncols() * 56 + 32);
    out.push_str("time_s,freq_hz,abs_accel_ms2\n");
    for (i, t) in matrix.times.iter().enumerate() {
        for (j, f) in matrix.freqs.iter().enumerate() {
            let _ = writeln!(out, "{t:.10e},{f:.10e},{:.10e}", matrix.n_abs[(i, j)]);
        }
    }
    out
}

/// Write the shock response contour as `<stem>.csv` and `<stem>.svg`.
///
/// Returns the two paths written.
pub fn export_src(
    matrix: &ResponseMatrix,
    floor: f64,
    ceiling: f64,
    stem: impl AsRef<Path>,
) -> Result<(std::path::PathBuf, std::path::PathBuf)> {
    if !(floor > 0.0 && ceiling > floor && ceiling.is_finite()) {
        return Err(Error::Parameter(format!(
            "contour range must satisfy 0 < floor < ceiling, got {floor}..{ceiling}"
        )));
    }
    let stem = stem.as_ref();
    let csv_path = stem.with_extension("csv");
    let svg_path = stem.with_extension("svg");
    fs::write(&csv_path, src_csv(matrix)).map_err(|e| Error::io(&csv_path, e))?;
    let svg = plot::contour_svg(matrix, floor, ceiling);
    fs::write(&svg_path, svg).map_err(|e| Error::io(&svg_path, e))?;
    Ok((csv_path, svg_path))
}
