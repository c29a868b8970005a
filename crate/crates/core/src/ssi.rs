//! Rank-one structure of the magnitude matrix.
//!
//! The thin SVD of `N` is taken through the `n × n` Gram matrix `NᵀN`
//! (time samples vastly outnumber oscillators), then polished with
//! one-sided Jacobi rotations so that small singular values and the left
//! vectors keep full precision. The first triplet yields the shock severity
//! infimum `v_ssi = σ₁‖u₁‖∞ v₁`, which is exactly the column-max spectrum of
//! the best rank-one approximation `N₁ = σ₁u₁v₁ᵀ`.

use std::fmt::Write as _;

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::error::{Error, Result};
use crate::spectrum::{ResponseMatrix, SrsVector};

/// Singular values below this fraction of σ₁ are treated as zero.
pub const DEFAULT_RANK_TOL: f64 = 1e-12;

/// Margin entries whose SSI falls below this fraction of the SRS peak are
/// reported as `+∞`.
pub const MARGIN_UNDERFLOW: f64 = 1e-12;

const MAX_SWEEPS: usize = 60;
const ORTHO_TOL: f64 = 1e-15;

#[derive(Debug, Clone, PartialEq)]
pub struct SvdDecomposition {
    /// Descending singular values σ₁ ≥ … ≥ σ_r.
    pub sigma: Vec<f64>,
    /// Left singular vectors as columns, `m × r`.
    pub u: DMatrix<f64>,
    /// Right singular vectors as columns, `n × r`.
    pub v: DMatrix<f64>,
    pub freqs: Vec<f64>,
}

impl SvdDecomposition {
    pub fn rank(&self) -> usize {
        self.sigma.len()
    }

    /// `σ_k` for one-based `k`, zero beyond the rank.
    pub fn sigma_k(&self, k: usize) -> f64 {
        self.sigma.get(k.wrapping_sub(1)).copied().unwrap_or(0.0)
    }

    /// The rank-one component `N_k = σ_k u_k v_kᵀ` (one-based `k`).
    pub fn component(&self, k: usize) -> DMatrix<f64> {
        assert!(k >= 1 && k <= self.rank(), "component {k} outside 1..={}", self.rank());
        self.u.column(k - 1) * self.v.column(k - 1).transpose() * self.sigma[k - 1]
    }

    /// `Σ_{i≤k} N_i`.
    pub fn truncated(&self, k: usize) -> DMatrix<f64> {
        let k = k.min(self.rank());
        let us = DMatrix::from_fn(self.u.nrows(), k, |i, j| self.u[(i, j)] * self.sigma[j]);
        us * self.v.columns(0, k).transpose()
    }

    pub fn reconstruct(&self) -> DMatrix<f64> {
        self.truncated(self.rank())
    }

    /// `(Σ_{i≤k} N_i) x` without forming the matrix.
    pub fn truncated_apply(&self, k: usize, x: &DVector<f64>) -> DVector<f64> {
        let k = k.min(self.rank());
        let mut out = DVector::zeros(self.u.nrows());
        for c in 0..k {
            let w = self.sigma[c] * self.v.column(c).dot(x);
            out.axpy(w, &self.u.column(c), 1.0);
        }
        out
    }
}

/// Thin SVD of the magnitude matrix `N`.
pub fn svd_nonneg(matrix: &ResponseMatrix, tol: f64) -> Result<SvdDecomposition> {
    let mut d = svd_thin(matrix.n_abs(), tol)?;
    d.freqs = matrix.freqs().to_vec();
    Ok(d)
}

/// Thin SVD of any real matrix, singular values below `tol·σ₁` dropped and
/// signs canonicalised so each right vector has a nonnegative sum.
pub fn svd_thin(a: &DMatrix<f64>, tol: f64) -> Result<SvdDecomposition> {
    if !(tol >= 0.0 && tol < 1.0) {
        return Err(Error::Parameter(format!("rank tolerance must be in [0, 1), got {tol}")));
    }
    if a.is_empty() || a.iter().all(|v| *v == 0.0) {
        return Err(Error::DegenerateInput("matrix is all zero".into()));
    }
    if a.iter().any(|v| !v.is_finite()) {
        return Err(Error::Parameter("matrix has non-finite entries".into()));
    }
    let (m, n) = a.shape();
    let (u, sigma, v) = if m >= n {
        gram_jacobi(a, tol)
    } else {
        // Wide matrix: plain Jacobi on the transpose, roles swapped.
        let at = a.transpose();
        let (v, sigma, u) = jacobi_from(at.clone(), DMatrix::identity(m, m), tol);
        (u, sigma, v)
    };
    let mut d = SvdDecomposition {
        sigma,
        u,
        v,
        freqs: (1..=n).map(|j| j as f64).collect(),
    };
    canonicalize_signs(&mut d);
    Ok(d)
}

fn gram_jacobi(a: &DMatrix<f64>, tol: f64) -> (DMatrix<f64>, Vec<f64>, DMatrix<f64>) {
    let n = a.ncols();
    let gram = a.tr_mul(a);
    let eig = SymmetricEigen::new(gram);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[j].total_cmp(&eig.eigenvalues[i]));
    let v0 = DMatrix::from_fn(n, n, |i, j| eig.eigenvectors[(i, order[j])]);
    let b = a * &v0;
    jacobi_from(b, v0, tol)
}

/// One-sided Jacobi on the columns of `b`, accumulating rotations into `v`.
/// Returns `(U, σ, V)` truncated at `tol·σ₁` and sorted descending.
fn jacobi_from(mut b: DMatrix<f64>, mut v: DMatrix<f64>, tol: f64) -> (DMatrix<f64>, Vec<f64>, DMatrix<f64>) {
    let (m, n) = b.shape();
    let vn = v.nrows();
    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let (alpha, beta, gamma) = {
                    let bp = b.column(p);
                    let bq = b.column(q);
                    (bp.norm_squared(), bq.norm_squared(), bp.dot(&bq))
                };
                if alpha == 0.0 || beta == 0.0 || gamma.abs() <= ORTHO_TOL * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                rotate(b.as_mut_slice(), m, p, q, c, s);
                rotate(v.as_mut_slice(), vn, p, q, c, s);
            }
        }
        if !rotated {
            break;
        }
    }

    let norms: Vec<f64> = b.column_iter().map(|c| c.norm()).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| norms[j].total_cmp(&norms[i]));
    let s1 = norms[order[0]];
    let keep: Vec<usize> = order.into_iter().filter(|&k| norms[k] > tol * s1).collect();
    let r = keep.len();
    let sigma: Vec<f64> = keep.iter().map(|&k| norms[k]).collect();
    let u = DMatrix::from_fn(m, r, |i, j| b[(i, keep[j])] / sigma[j]);
    let vv = DMatrix::from_fn(vn, r, |i, j| v[(i, keep[j])]);
    (u, sigma, vv)
}

/// Apply the plane rotation to columns `p < q` of column-major `data`.
fn rotate(data: &mut [f64], rows: usize, p: usize, q: usize, c: f64, s: f64) {
    let (head, tail) = data.split_at_mut(q * rows);
    let cp = &mut head[p * rows..(p + 1) * rows];
    let cq = &mut tail[..rows];
    for (x, y) in cp.iter_mut().zip(cq.iter_mut()) {
        let (xp, xq) = (*x, *y);
        *x = c * xp - s * xq;
        *y = s * xp + c * xq;
    }
}

fn canonicalize_signs(d: &mut SvdDecomposition) {
    for k in 0..d.rank() {
        let col = d.v.column(k);
        let sum: f64 = col.sum();
        let scale: f64 = col.iter().map(|x| x.abs()).sum();
        let flip = if sum.abs() > 1e-12 * scale {
            sum < 0.0
        } else {
            col.iter()
                .find(|x| x.abs() > 1e-12 * scale)
                .is_some_and(|x| *x < 0.0)
        };
        if flip {
            d.v.column_mut(k).neg_mut();
            d.u.column_mut(k).neg_mut();
        }
    }
}

/// First-triplet severity spectrum and its time shape.
#[derive(Debug, Clone, PartialEq)]
pub struct SsiResult {
    pub freqs: Vec<f64>,
    /// `σ₁‖u₁‖∞ v₁`, m/s².
    pub v_ssi: Vec<f64>,
    /// `u₁ / ‖u₁‖∞`, dimensionless.
    pub u_ssi: Vec<f64>,
    /// Relative residual `1 − σ₁²/Σσ_k²`.
    pub alpha: f64,
    pub sigma: Vec<f64>,
}

impl SsiResult {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("freq_hz,ssi_ms2\n");
        for (f, v) in self.freqs.iter().zip(&self.v_ssi) {
            let _ = writeln!(out, "{f:.10e},{v:.10e}");
        }
        out
    }
}

pub fn relative_residual(sigma: &[f64]) -> f64 {
    let total: f64 = sigma.iter().map(|s| s * s).sum();
    if total == 0.0 {
        return 0.0;
    }
    let rest: f64 = sigma.iter().skip(1).map(|s| s * s).sum();
    (rest / total).clamp(0.0, 1.0)
}

pub fn ssi_extract(decomp: &SvdDecomposition) -> Result<SsiResult> {
    if decomp.rank() == 0 {
        return Err(Error::DegenerateInput("decomposition has rank 0".into()));
    }
    let u1 = decomp.u.column(0);
    let v1 = decomp.v.column(0);
    let u_max = u1.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let s1 = decomp.sigma[0];
    Ok(SsiResult {
        freqs: decomp.freqs.clone(),
        v_ssi: v1.iter().map(|v| s1 * u_max * v).collect(),
        u_ssi: u1.iter().map(|u| u / u_max).collect(),
        alpha: relative_residual(&decomp.sigma),
        sigma: decomp.sigma.clone(),
    })
}

/// SRS, SSI and the dB margin between them on a shared grid.
#[derive(Debug, Clone, PartialEq)]
pub struct DualSpectra {
    pub freqs: Vec<f64>,
    pub srs: Vec<f64>,
    pub ssi: Vec<f64>,
    pub margin_db: Vec<f64>,
    /// Entries whose margin is the `+∞` underflow sentinel.
    pub underflow: Vec<bool>,
}

impl DualSpectra {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("freq_hz,srs_ms2,ssi_ms2,margin_db\n");
        for j in 0..self.freqs.len() {
            let margin = if self.underflow[j] {
                "inf".to_string()
            } else {
                format!("{:.10e}", self.margin_db[j])
            };
            let _ = writeln!(
                out,
                "{:.10e},{:.10e},{:.10e},{margin}",
                self.freqs[j], self.srs[j], self.ssi[j]
            );
        }
        out
    }
}

pub fn margin_db(srs: f64, ssi: f64) -> f64 {
    20.0 * (srs / ssi).log10()
}

fn same_grid(a: &[f64], b: &[f64]) -> bool {
    a.len() == b.len()
        && a.iter()
            .zip(b)
            .all(|(x, y)| (x - y).abs() <= 1e-12 * x.abs().max(y.abs()))
}

pub fn dual_spectra(srs: &SrsVector, ssi: &SsiResult) -> Result<DualSpectra> {
    if !same_grid(&srs.freqs, &ssi.freqs) || srs.values.len() != ssi.v_ssi.len() {
        return Err(Error::Grid(format!(
            "SRS has {} frequencies, SSI has {}",
            srs.freqs.len(),
            ssi.freqs.len()
        )));
    }
    let peak = srs.values.iter().fold(0.0f64, |m, v| m.max(*v));
    let floor = MARGIN_UNDERFLOW * peak;
    let mut margin = Vec::with_capacity(srs.len());
    let mut underflow = Vec::with_capacity(srs.len());
    for (s, i) in srs.values.iter().zip(&ssi.v_ssi) {
        if *i <= floor {
            margin.push(f64::INFINITY);
            underflow.push(true);
        } else {
            margin.push(margin_db(*s, *i));
            underflow.push(false);
        }
    }
    Ok(DualSpectra {
        freqs: srs.freqs.clone(),
        srs: srs.values.clone(),
        ssi: ssi.v_ssi.clone(),
        margin_db: margin,
        underflow,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrendCheck {
    /// `‖Nx − (σ₁v₁ᵀx)u₁‖₂`
    pub lhs: f64,
    /// `σ₂‖x‖₂`
    pub rhs: f64,
    pub holds: bool,
}

/// Operator-norm bound on the rank-one residual for a nonnegative weight
/// vector.
///
/// The comparison allows `1e-9` relative slack on `rhs` plus the rank
/// truncation level `DEFAULT_RANK_TOL·σ₁‖x‖₂`, since dropped singular values
/// are not represented in σ₂.
pub fn trend_bound_check(matrix: &ResponseMatrix, decomp: &SvdDecomposition, x: &[f64]) -> Result<TrendCheck> {
    if x.len() != matrix.ncols() {
        return Err(Error::Parameter(format!(
            "weight vector has {} entries, matrix has {} columns",
            x.len(),
            matrix.ncols()
        )));
    }
    if x.iter().any(|w| !(*w >= 0.0)) {
        return Err(Error::Parameter("weights must be nonnegative".into()));
    }
    let x = DVector::from_column_slice(x);
    let nx = matrix.n_abs() * &x;
    let n1x = decomp.truncated_apply(1, &x);
    let lhs = (nx - n1x).norm();
    let xnorm = x.norm();
    let rhs = decomp.sigma_k(2) * xnorm;
    let slack = DEFAULT_RANK_TOL * decomp.sigma_k(1) * xnorm;
    Ok(TrendCheck {
        lhs,
        rhs,
        holds: lhs <= rhs * (1.0 + 1e-9) + slack,
    })
}
