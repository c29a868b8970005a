//! Modal superposition on top of the response matrix and the response
//! bounds it admits.
//!
//! A structure observed at one coordinate contributes `Γ·φ` per mode. Each
//! mode is mapped onto the oscillator grid by splitting it linearly in
//! log-frequency between its two bracketing grid points, so the signed
//! path (`M x_i`) and the magnitude path (`N x`) use the same weights.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::signal::Signal;
use crate::spectrum::{ResponseMatrix, SrsVector};
use crate::ssi::{SsiResult, SvdDecomposition};

/// Modes with `|Γφ|` below this fraction of the largest are negligible.
pub const NEGLIGIBLE_FRACTION: f64 = 1e-9;

/// Relative slack on the proved bounds.
pub const PROVED_BOUND_TOL: f64 = 1e-9;

const CANTILEVER_BEAM_CSV: &str = include_str!("../data/cantilever_beam_modes.csv");

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModalRow {
    pub mode_no: u32,
    pub freq_hz: f64,
    pub gamma: f64,
    pub phi: f64,
    pub m_eff_kg: Option<f64>,
}

impl ModalRow {
    /// Signed modal weight `Γ·φ`.
    pub fn weight(&self) -> f64 {
        self.gamma * self.phi
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModalModel {
    pub rows: Vec<ModalRow>,
}

impl ModalModel {
    pub fn new(mut rows: Vec<ModalRow>) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::Parse {
                line: 0,
                message: "modal model has no modes".into(),
            });
        }
        for r in &rows {
            if !(r.freq_hz > 0.0 && r.freq_hz.is_finite() && r.gamma.is_finite() && r.phi.is_finite()) {
                return Err(Error::Parameter(format!("mode {} has invalid entries", r.mode_no)));
            }
        }
        // Superposition order is by mode index.
        rows.sort_by_key(|r| r.mode_no);
        Ok(ModalModel { rows })
    }

    /// Transverse modes of the aluminium cantilever beam used as the
    /// reference structure (17 modes up to 25.3 kHz).
    pub fn cantilever_beam() -> ModalModel {
        parse_modal_model(CANTILEVER_BEAM_CSV).expect("bundled modal table parses")
    }

    /// Mask of modes whose `|Γφ|` is negligible relative to the largest.
    pub fn negligible(&self) -> Vec<bool> {
        let max = self.rows.iter().fold(0.0f64, |m, r| m.max(r.weight().abs()));
        self.rows
            .iter()
            .map(|r| r.weight().abs() < NEGLIGIBLE_FRACTION * max)
            .collect()
    }
}

/// Parse a float, also accepting exponent forms with the `e` dropped such
/// as `4.104-12`.
fn parse_number(field: &str) -> Option<f64> {
    let s = field.trim();
    if let Ok(v) = s.parse::<f64>() {
        return Some(v);
    }
    let body = s.strip_prefix(['-', '+']).unwrap_or(s);
    let offset = s.len() - body.len();
    let pos = body.rfind(['-', '+'])?;
    if pos == 0 || body[..pos].ends_with(['e', 'E']) {
        return None;
    }
    let split = offset + pos;
    format!("{}e{}", &s[..split], &s[split..]).parse().ok()
}

pub fn parse_modal_model(text: &str) -> Result<ModalModel> {
    let mut header: Option<Vec<String>> = None;
    let mut rows = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        let Some(cols) = &header else {
            header = Some(fields.iter().map(|f| f.to_ascii_lowercase()).collect());
            continue;
        };
        let find = |name: &str| cols.iter().position(|c| c == name);
        let get = |name: &str| -> Result<Option<f64>> {
            match find(name) {
                None => Ok(None),
                Some(i) => {
                    let f = fields.get(i).copied().unwrap_or("");
                    if f.is_empty() {
                        return Ok(None);
                    }
                    parse_number(f).map(Some).ok_or_else(|| Error::Parse {
                        line: line_no,
                        message: format!("column {name}: cannot parse {f:?}"),
                    })
                }
            }
        };
        let need = |name: &str| -> Result<f64> {
            get(name)?.ok_or_else(|| Error::Parse {
                line: line_no,
                message: format!("missing value for {name}"),
            })
        };
        let mode_no = need("mode_no")?;
        rows.push(ModalRow {
            mode_no: mode_no as u32,
            freq_hz: need("freq_hz")?,
            gamma: need("gamma")?,
            phi: need("phi")?,
            m_eff_kg: get("m_eff_kg")?,
        });
    }
    match header {
        None => Err(Error::Parse {
            line: 0,
            message: "empty modal file".into(),
        }),
        Some(cols) => {
            for c in ["mode_no", "freq_hz", "gamma", "phi"] {
                if !cols.iter().any(|h| h == c) {
                    return Err(Error::Parse {
                        line: 1,
                        message: format!("missing column {c}"),
                    });
                }
            }
            ModalModel::new(rows)
        }
    }
}

pub fn load_modal_model(path: impl AsRef<Path>) -> Result<ModalModel> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_modal_model(&text)
}

/// Lower grid index and the log-distance fraction towards the next point.
fn locate(grid: &[f64], row: &ModalRow) -> Result<(usize, f64)> {
    let f = row.freq_hz;
    let lo = grid[0];
    let hi = *grid.last().unwrap();
    if f < lo * (1.0 - 1e-12) || f > hi * (1.0 + 1e-12) {
        return Err(Error::Range(format!(
            "mode {} at {f} Hz lies outside the oscillator grid {lo}..{hi} Hz",
            row.mode_no
        )));
    }
    if grid.len() == 1 || f <= lo {
        return Ok((0, 0.0));
    }
    if f >= hi {
        return Ok((grid.len() - 2, 1.0));
    }
    let j = grid.partition_point(|g| *g <= f) - 1;
    let w = (f.ln() - grid[j].ln()) / (grid[j + 1].ln() - grid[j].ln());
    Ok((j, w))
}

fn spread(model: &ModalModel, grid: &[f64], weight: impl Fn(&ModalRow) -> f64) -> Result<Vec<f64>> {
    if grid.is_empty() {
        return Err(Error::Parameter("empty frequency grid".into()));
    }
    let mut x = vec![0.0; grid.len()];
    for row in &model.rows {
        let (j, w) = locate(grid, row)?;
        let value = weight(row);
        x[j] += (1.0 - w) * value;
        if w > 0.0 {
            x[j + 1] += w * value;
        }
    }
    Ok(x)
}

/// Nonnegative weights `x[j] = Σ |Γφ|` over the modes mapped to slot `j`.
pub fn weight_vector(model: &ModalModel, grid: &[f64]) -> Result<Vec<f64>> {
    spread(model, grid, |r| r.weight().abs())
}

/// Signed weights `x_i`, the same mapping with signs kept.
pub fn signed_weight_vector(model: &ModalModel, grid: &[f64]) -> Result<Vec<f64>> {
    spread(model, grid, |r| r.weight())
}

fn max_abs(v: &DVector<f64>) -> f64 {
    v.iter().fold(0.0f64, |m, x| m.max(x.abs()))
}

fn history(matrix: &ResponseMatrix, values: DVector<f64>, label: &str) -> Result<Signal> {
    let dt = if matrix.times().len() > 1 {
        matrix.times()[1] - matrix.times()[0]
    } else {
        1.0
    };
    let mut samples: Vec<f64> = values.iter().copied().collect();
    if samples.len() < 2 {
        samples.push(0.0);
    }
    Signal::new(samples, dt, label)
}

/// Signed modal superposition `a = M x_i` and its peak magnitude.
pub fn predict_actual(matrix: &ResponseMatrix, model: &ModalModel) -> Result<(Signal, f64)> {
    let x = DVector::from_vec(signed_weight_vector(model, matrix.freqs())?);
    let a = matrix.m_signed() * x;
    let peak = max_abs(&a);
    Ok((history(matrix, a, "modal_response")?, peak))
}

/// Peak responses predicted four ways for one structure and one shock.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ResponseBounds {
    /// `‖M x_i‖∞`
    pub actual_max: f64,
    /// `‖N x‖∞`
    pub abs_max: f64,
    /// `v_ssiᵀ x`
    pub ssi_bound: f64,
    /// `v_srsᵀ x`
    pub srs_bound: f64,
}

impl ResponseBounds {
    /// Empirical lower bound `v_ssiᵀx ≤ ‖Nx‖∞`.
    pub fn left_bound_ok(&self) -> bool {
        self.ssi_bound <= self.abs_max * (1.0 + PROVED_BOUND_TOL)
    }

    /// Proved upper bound `‖Nx‖∞ ≤ v_srsᵀx`.
    pub fn right_bound_ok(&self) -> bool {
        self.abs_max <= self.srs_bound * (1.0 + PROVED_BOUND_TOL)
    }

    /// Triangle inequality `‖M x_i‖∞ ≤ ‖N x‖∞`.
    pub fn signed_below_abs(&self) -> bool {
        self.actual_max <= self.abs_max * (1.0 + PROVED_BOUND_TOL)
    }
}

pub fn predict_bounds(
    matrix: &ResponseMatrix,
    srs: &SrsVector,
    ssi: &SsiResult,
    model: &ModalModel,
) -> Result<ResponseBounds> {
    let n = matrix.ncols();
    if srs.len() != n || ssi.v_ssi.len() != n {
        return Err(Error::Grid(format!(
            "matrix has {n} columns, SRS {} and SSI {}",
            srs.len(),
            ssi.v_ssi.len()
        )));
    }
    let x = weight_vector(model, matrix.freqs())?;
    let (_, actual_max) = predict_actual(matrix, model)?;
    let nx = matrix.n_abs() * DVector::from_column_slice(&x);
    Ok(ResponseBounds {
        actual_max,
        abs_max: max_abs(&nx),
        ssi_bound: dot(&ssi.v_ssi, &x),
        srs_bound: dot(&srs.values, &x),
    })
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Header of the bounds report.
pub const BOUNDS_CSV_HEADER: &str = "signal,actual_max,abs_max,ssi_bound,srs_bound,left_bound_ok";

pub fn bounds_csv_row(label: &str, b: &ResponseBounds) -> String {
    let mut out = String::new();
    let _ = write!(
        out,
        "{label},{:.10e},{:.10e},{:.10e},{:.10e},{}",
        b.actual_max,
        b.abs_max,
        b.ssi_bound,
        b.srs_bound,
        b.left_bound_ok()
    );
    out
}

/// `N x` against `(Σ_{i≤k} N_i) x` for the modal weights, plus α.
pub fn reconstruction_compare(
    matrix: &ResponseMatrix,
    decomp: &SvdDecomposition,
    model: &ModalModel,
    k: usize,
) -> Result<(Signal, Signal, f64)> {
    if k == 0 || k > decomp.rank() {
        return Err(Error::Range(format!("order {k} outside 1..={}", decomp.rank())));
    }
    let x = DVector::from_vec(weight_vector(model, matrix.freqs())?);
    let nx = matrix.n_abs() * &x;
    let nkx = decomp.truncated_apply(k, &x);
    let alpha = crate::ssi::relative_residual(&decomp.sigma);
    Ok((
        history(matrix, nx, "nx")?,
        history(matrix, nkx, &format!("n{k}x"))?,
        alpha,
    ))
}

/// Both sides of the sandwich for an arbitrary nonnegative weight vector.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SandwichCheck {
    /// `‖N x‖∞`
    pub abs_max: f64,
    /// `‖N₁ x‖∞`, evaluated directly.
    pub n1x_max: f64,
    pub ssi_bound: f64,
    pub srs_bound: f64,
}

impl SandwichCheck {
    pub fn right_ok(&self) -> bool {
        self.abs_max <= self.srs_bound * (1.0 + PROVED_BOUND_TOL)
    }

    /// `‖N₁x‖∞ = v_ssiᵀx`.
    pub fn ssi_identity_ok(&self) -> bool {
        (self.n1x_max - self.ssi_bound).abs() <= PROVED_BOUND_TOL * self.n1x_max.max(self.ssi_bound)
    }

    pub fn left_ok(&self) -> bool {
        self.n1x_max <= self.abs_max * (1.0 + PROVED_BOUND_TOL)
    }

    /// `‖Nx‖∞ − v_ssiᵀx`
    pub fn gap(&self) -> f64 {
        self.abs_max - self.ssi_bound
    }
}

pub fn sandwich_check(
    matrix: &ResponseMatrix,
    decomp: &SvdDecomposition,
    srs: &SrsVector,
    ssi: &SsiResult,
    x: &[f64],
) -> Result<SandwichCheck> {
    if x.len() != matrix.ncols() || srs.len() != x.len() || ssi.v_ssi.len() != x.len() {
        return Err(Error::Grid("weight vector and spectra lengths differ".into()));
    }
    if x.iter().any(|w| !(*w >= 0.0)) {
        return Err(Error::Parameter("weights must be nonnegative".into()));
    }
    let xv = DVector::from_column_slice(x);
    let nx = matrix.n_abs() * &xv;
    let n1x = decomp.truncated_apply(1, &xv);
    Ok(SandwichCheck {
        abs_max: max_abs(&nx),
        n1x_max: max_abs(&n1x),
        ssi_bound: dot(&ssi.v_ssi, x),
        srs_bound: dot(&srs.values, x),
    })
}
