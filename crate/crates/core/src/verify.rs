//! Randomised checks of the response bounds over nonnegative weight vectors.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::modal::sandwich_check;
use crate::spectrum::{ResponseMatrix, SrsVector};
use crate::ssi::{trend_bound_check, SsiResult, SvdDecomposition};

pub const DEFAULT_SEED: u64 = 0x5EED_5531;

/// Weight vectors with entries `|z|`, `z ~ N(0, 1)`.
pub fn random_weights(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n)
        .map(|_| {
            let z: f64 = StandardNormal.sample(rng);
            z.abs()
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub trials: usize,
    pub seed: u64,
    pub alpha: f64,
    /// Residual bound `‖Nx − N₁x‖₂ ≤ σ₂‖x‖₂` failures.
    pub trend_failures: usize,
    /// Upper bound `‖Nx‖∞ ≤ v_srsᵀx` failures.
    pub srs_failures: usize,
    /// Identity `‖N₁x‖∞ = v_ssiᵀx` failures.
    pub ssi_identity_failures: usize,
    /// Empirical lower bound `‖N₁x‖∞ ≤ ‖Nx‖∞` violations.
    pub left_violations: usize,
    /// First weight vector that violated the lower bound.
    pub left_witness: Option<Vec<f64>>,
    /// min / median / max of `‖Nx‖∞ − v_ssiᵀx`.
    pub gap_min: f64,
    pub gap_median: f64,
    pub gap_max: f64,
}

impl VerifyReport {
    pub fn proved_bounds_hold(&self) -> bool {
        self.trend_failures == 0 && self.srs_failures == 0 && self.ssi_identity_failures == 0
    }

    pub fn left_violation_rate(&self) -> f64 {
        if self.trials == 0 {
            0.0
        } else {
            self.left_violations as f64 / self.trials as f64
        }
    }
}

pub fn verify_bounds(
    matrix: &ResponseMatrix,
    decomp: &SvdDecomposition,
    srs: &SrsVector,
    ssi: &SsiResult,
    trials: usize,
    seed: u64,
) -> Result<VerifyReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = matrix.ncols();
    let mut report = VerifyReport {
        trials,
        seed,
        alpha: ssi.alpha,
        trend_failures: 0,
        srs_failures: 0,
        ssi_identity_failures: 0,
        left_violations: 0,
        left_witness: None,
        gap_min: 0.0,
        gap_median: 0.0,
        gap_max: 0.0,
    };
    let mut gaps = Vec::with_capacity(trials);
    for _ in 0..trials {
        let x = random_weights(&mut rng, n);
        if !trend_bound_check(matrix, decomp, &x)?.holds {
            report.trend_failures += 1;
        }
        let s = sandwich_check(matrix, decomp, srs, ssi, &x)?;
        if !s.right_ok() {
            report.srs_failures += 1;
        }
        if !s.ssi_identity_ok() {
            report.ssi_identity_failures += 1;
        }
        if !s.left_ok() {
            report.left_violations += 1;
            if report.left_witness.is_none() {
                report.left_witness = Some(x);
            }
        }
        gaps.push(s.gap());
    }
    if !gaps.is_empty() {
        gaps.sort_by(f64::total_cmp);
        report.gap_min = gaps[0];
        report.gap_max = gaps[gaps.len() - 1];
        report.gap_median = gaps[gaps.len() / 2];
    }
    Ok(report)
}
