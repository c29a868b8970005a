//! Base-excited single-degree-of-freedom oscillators.
//!
//! The production path is the ramp-invariant recursive filter (Smallwood
//! form) for absolute acceleration. [`sdof_response_oracle`] integrates the
//! equation of motion with RK4 instead and only exists to check it.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::signal::Signal;

/// Oscillators must stay below this fraction of the Nyquist frequency.
pub const NYQUIST_GUARD: f64 = 0.8;

/// Default quality factor, `Q = 10` ⇔ `ζ = 0.05`.
pub const DEFAULT_Q: f64 = 10.0;

/// Default RK4 substeps per input sample for the oracle.
pub const DEFAULT_SUBSTEPS: usize = 8;

/// Natural-frequency grid plus the common quality factor of the bank.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OscillatorBank {
    freqs: Vec<f64>,
    q: f64,
}

impl OscillatorBank {
    pub fn new(freqs: Vec<f64>, q: f64) -> Result<Self> {
        if freqs.is_empty() {
            return Err(Error::Parameter("oscillator bank is empty".into()));
        }
        if !(q > 0.5 && q.is_finite()) {
            return Err(Error::Parameter(format!("Q must exceed 0.5 (underdamped), got {q}")));
        }
        if freqs.iter().any(|f| !(*f > 0.0 && f.is_finite())) {
            return Err(Error::Parameter("natural frequencies must be finite and > 0".into()));
        }
        if freqs.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Parameter("natural frequencies must be strictly increasing".into()));
        }
        Ok(OscillatorBank { freqs, q })
    }

    /// Log-spaced bank, see [`log_freq_grid`].
    pub fn log_spaced(fmin: f64, fmax: f64, points_per_octave: usize, q: f64) -> Result<Self> {
        OscillatorBank::new(log_freq_grid(fmin, fmax, points_per_octave)?, q)
    }

    pub fn freqs(&self) -> &[f64] {
        &self.freqs
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    pub fn zeta(&self) -> f64 {
        q_to_zeta(self.q)
    }

    pub fn len(&self) -> usize {
        self.freqs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.freqs.is_empty()
    }
}

pub fn q_to_zeta(q: f64) -> f64 {
    1.0 / (2.0 * q)
}

/// `fmin·2^(k/ppo)` up to `fmax`, with `fmax` appended when the sequence
/// does not land on it.
pub fn log_freq_grid(fmin: f64, fmax: f64, points_per_octave: usize) -> Result<Vec<f64>> {
    if !(fmin > 0.0 && fmin.is_finite()) {
        return Err(Error::Parameter(format!("fmin must be > 0, got {fmin}")));
    }
    if !(fmax >= fmin && fmax.is_finite()) {
        return Err(Error::Parameter(format!("fmax ({fmax}) must not be below fmin ({fmin})")));
    }
    if points_per_octave == 0 {
        return Err(Error::Parameter("points per octave must be >= 1".into()));
    }
    // Values within this relative distance of fmax are snapped onto it.
    const SNAP: f64 = 1e-9;
    let ppo = points_per_octave as f64;
    let mut grid = Vec::new();
    for k in 0.. {
        let f = fmin * 2f64.powf(k as f64 / ppo);
        if f > fmax * (1.0 + SNAP) {
            break;
        }
        if (f - fmax).abs() <= SNAP * fmax {
            grid.push(fmax);
            break;
        }
        grid.push(f);
    }
    if *grid.last().unwrap() != fmax {
        grid.push(fmax);
    }
    Ok(grid)
}

fn check_oscillator(signal: &Signal, freq_hz: f64, zeta: f64) -> Result<()> {
    if !(freq_hz > 0.0 && freq_hz.is_finite()) {
        return Err(Error::Parameter(format!("natural frequency must be > 0, got {freq_hz}")));
    }
    if !(zeta > 0.0 && zeta < 1.0) {
        return Err(Error::Parameter(format!("damping ratio must be in (0, 1), got {zeta}")));
    }
    let limit = NYQUIST_GUARD * signal.nyquist();
    if freq_hz >= limit {
        return Err(Error::Alias {
            freq_hz,
            limit_hz: limit,
        });
    }
    Ok(())
}

/// Recursive-filter coefficients for one oscillator at one sample interval.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RampInvariantFilter {
    pub b: [f64; 3],
    pub a: [f64; 2],
}

impl RampInvariantFilter {
    pub fn new(freq_hz: f64, zeta: f64, dt: f64) -> Self {
        let omega = 2.0 * PI * freq_hz;
        let omega_d = omega * (1.0 - zeta * zeta).sqrt();
        let e = (-zeta * omega * dt).exp();
        let k = omega_d * dt;
        let c = e * k.cos();
        let sp = e * k.sin() / k;
        RampInvariantFilter {
            b: [1.0 - sp, 2.0 * (sp - c), e * e - sp],
            a: [2.0 * c, -e * e],
        }
    }

    /// Run from rest over `input`, writing the absolute acceleration to `out`.
    pub fn apply_into(&self, input: &[f64], out: &mut [f64]) {
        debug_assert_eq!(input.len(), out.len());
        let [b0, b1, b2] = self.b;
        let [a1, a2] = self.a;
        let (mut x1, mut x2, mut y1, mut y2) = (0.0, 0.0, 0.0, 0.0);
        for (x, y) in input.iter().zip(out.iter_mut()) {
            let v = b0 * x + b1 * x1 + b2 * x2 + a1 * y1 + a2 * y2;
            *y = v;
            x2 = x1;
            x1 = *x;
            y2 = y1;
            y1 = v;
        }
    }

    pub fn apply(&self, input: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; input.len()];
        self.apply_into(input, &mut out);
        out
    }
}

/// Absolute acceleration response of one oscillator via the ramp-invariant
/// filter, starting from rest.
pub fn sdof_response_filter(signal: &Signal, freq_hz: f64, zeta: f64) -> Result<Signal> {
    check_oscillator(signal, freq_hz, zeta)?;
    let filter = RampInvariantFilter::new(freq_hz, zeta, signal.dt());
    let out = filter.apply(signal.samples());
    Signal::new(out, signal.dt(), format!("{}@{freq_hz}Hz", signal.label()))
}

/// Absolute acceleration response by fixed-step RK4 on the relative motion
/// `z'' + 2ζω z' + ω² z = −a_base`, with the base acceleration linearly
/// interpolated between samples.
///
/// The oscillator is at rest with zero excitation one sample interval
/// before the first sample, so a nonzero first sample enters as a ramp.
pub fn sdof_response_oracle(
    signal: &Signal,
    freq_hz: f64,
    zeta: f64,
    substeps: usize,
) -> Result<Signal> {
    if substeps < 4 {
        return Err(Error::Parameter(format!("substeps must be >= 4, got {substeps}")));
    }
    if !(freq_hz > 0.0 && freq_hz.is_finite()) {
        return Err(Error::Parameter(format!("natural frequency must be > 0, got {freq_hz}")));
    }
    if !(zeta > 0.0 && zeta < 1.0) {
        return Err(Error::Parameter(format!("damping ratio must be in (0, 1), got {zeta}")));
    }
    let omega = 2.0 * PI * freq_hz;
    let c = 2.0 * zeta * omega;
    let k = omega * omega;
    let x = signal.samples();
    let h = signal.dt() / substeps as f64;

    let deriv = |z: f64, v: f64, base: f64| (v, -c * v - k * z - base);

    let mut out = Vec::with_capacity(x.len());
    let (mut z, mut v) = (0.0f64, 0.0f64);
    let mut prev = 0.0;
    for &next in x {
        let (x0, x1) = (prev, next);
        prev = next;
        let base = |s: f64| x0 + (x1 - x0) * s / substeps as f64;
        for s in 0..substeps {
            let s = s as f64;
            let a0 = base(s);
            let am = base(s + 0.5);
            let a1 = base(s + 1.0);
            let (k1z, k1v) = deriv(z, v, a0);
            let (k2z, k2v) = deriv(z + 0.5 * h * k1z, v + 0.5 * h * k1v, am);
            let (k3z, k3v) = deriv(z + 0.5 * h * k2z, v + 0.5 * h * k2v, am);
            let (k4z, k4v) = deriv(z + h * k3z, v + h * k3v, a1);
            z += h / 6.0 * (k1z + 2.0 * k2z + 2.0 * k3z + k4z);
            v += h / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
        }
        out.push(-c * v - k * z);
    }
    Signal::new(out, signal.dt(), format!("{}@{freq_hz}Hz(rk4)", signal.label()))
}
