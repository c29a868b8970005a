#![allow(dead_code)]

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use shock_severity::signal::{gen_damped_sine_sum, gen_half_sine, DampedSine};
use shock_severity::Signal;

/// 100 kHz sampling, comfortably above 0.8·Nyquist for a 25.6 kHz grid.
pub const DT: f64 = 1e-5;

pub fn half_sine(duration: f64) -> Signal {
    gen_half_sine(1000.0, duration, DT, 0.05).unwrap().with_label(format!("half_sine_{duration}"))
}

pub fn terminal_sawtooth(duration: f64) -> Signal {
    let n = (duration / DT).round() as usize;
    let mut x: Vec<f64> = (0..=n).map(|i| 1000.0 * i as f64 / n as f64).collect();
    x.push(0.0);
    x.resize(x.len() + (0.05 / DT) as usize, 0.0);
    Signal::new(x, DT, "sawtooth").unwrap()
}

/// Pyroshock-like sum of decaying tones with seeded random phases.
pub fn pyro_like(seed: u64) -> Signal {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let comps: Vec<DampedSine> = (0..24)
        .map(|k| {
            let f = 150.0 * 2f64.powf(k as f64 / 3.5);
            DampedSine::new(f.min(30_000.0), 2000.0 * (f / 2000.0).min(1.0), 40.0 + 0.03 * f, rng.random::<f64>() * 2.0 * PI)
        })
        .collect();
    gen_damped_sine_sum(&comps, 0.08, DT).unwrap().with_label(format!("pyro_{seed}"))
}

/// Sine sweep from high to low frequency; strongly inseparable in time.
pub fn reverse_sweep() -> Signal {
    let (f0, f1, dur) = (20_000.0f64, 100.0f64, 0.1f64);
    let k = (f1 / f0).ln() / dur;
    let n = (dur / DT).round() as usize;
    let x = (0..=n)
        .map(|i| {
            let t = i as f64 * DT;
            let phase = 2.0 * PI * f0 * ((k * t).exp() - 1.0) / k;
            500.0 * phase.sin()
        })
        .collect();
    Signal::new(x, DT, "reverse_sweep").unwrap()
}

/// Randomly delayed windowed tone bursts.
pub fn random_wavelets(seed: u64) -> Signal {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = (0.1 / DT) as usize;
    let mut x = vec![0.0; n];
    for k in 0..30 {
        let f = 120.0 * 2f64.powf(k as f64 / 4.0);
        let cycles = 5.0 + (rng.random::<f64>() * 4.0).floor() * 2.0;
        let len = (cycles / f / DT) as usize;
        let start = rng.random_range(0..n - len.min(n - 1));
        let amp = 300.0 * (1.0 + rng.random::<f64>());
        for i in 0..len.min(n - start) {
            let t = i as f64 * DT;
            x[start + i] += amp * (PI * i as f64 / len as f64).sin() * (2.0 * PI * f * t).sin();
        }
    }
    Signal::new(x, DT, format!("wavelets_{seed}")).unwrap()
}

pub fn step() -> Signal {
    let mut x = vec![1000.0; (0.03 / DT) as usize];
    x[0] = 0.0;
    Signal::new(x, DT, "step").unwrap()
}

/// The synthetic suite used by the bound and oracle checks.
pub fn suite() -> Vec<Signal> {
    vec![
        half_sine(0.001),
        half_sine(0.005),
        terminal_sawtooth(0.002),
        pyro_like(1),
        pyro_like(2),
        reverse_sweep(),
        random_wavelets(3),
        random_wavelets(4),
    ]
}

pub fn peak(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}
