mod common;

use common::*;
use shock_severity::sdof::{sdof_response_filter, sdof_response_oracle, DEFAULT_SUBSTEPS};
use shock_severity::signal::gen_half_sine;
use shock_severity::spectrum::{build_response_matrix, srs};
use shock_severity::{OscillatorBank, Signal};

const ZETA: f64 = 0.05;

#[test]
fn filter_matches_rk4_over_pulse_suite() {
    let pulses = [half_sine(0.001), half_sine(0.005), terminal_sawtooth(0.002), pyro_like(7)];
    let freqs = [100.0, 300.0, 1000.0, 3000.0, 6000.0, 10_000.0];
    let mut pairs = 0;
    for s in &pulses {
        for &f in &freqs {
            assert!(f * s.dt() <= 0.1);
            let a = peak(sdof_response_filter(s, f, ZETA).unwrap().samples());
            let b = peak(sdof_response_oracle(s, f, ZETA, DEFAULT_SUBSTEPS).unwrap().samples());
            assert!((a - b).abs() <= 0.02 * b, "{} @ {f} Hz: filter {a}, oracle {b}", s.label());
            pairs += 1;
        }
    }
    assert!(pairs >= 20);
}

#[test]
fn matrix_columns_match_oracle_peaks() {
    let s = gen_half_sine(1000.0, 0.002, 1e-5, 0.02).unwrap();
    let bank = OscillatorBank::log_spaced(100.0, 25_600.0, 6, 10.0).unwrap();
    assert_eq!(bank.len(), 49);
    let rm = build_response_matrix(&s, &bank).unwrap();
    let spectrum = srs(&rm);
    for (j, &f) in bank.freqs().iter().enumerate() {
        let b = peak(sdof_response_oracle(&s, f, ZETA, DEFAULT_SUBSTEPS).unwrap().samples());
        assert!((spectrum.values[j] - b).abs() <= 0.02 * b, "{f} Hz: {} vs {b}", spectrum.values[j]);
    }
}

#[test]
fn step_srs_is_flat_at_closed_form_overshoot() {
    let expected = 1.0 + (-ZETA * std::f64::consts::PI / (1.0 - ZETA * ZETA).sqrt()).exp();
    assert!((expected - 1.8545).abs() < 1e-4);
    let dt = 1e-6;
    let mut x = vec![3.0; 30_000];
    x[0] = 0.0;
    let s = Signal::new(x, dt, "step").unwrap();
    let bank = OscillatorBank::log_spaced(100.0, 25_600.0, 6, 10.0).unwrap();
    let spectrum = srs(&build_response_matrix(&s, &bank).unwrap());
    for (f, v) in spectrum.freqs.iter().zip(&spectrum.values) {
        assert!((v / 3.0 - expected).abs() < 0.01 * expected, "{f} Hz: {}", v / 3.0);
    }
}

#[test]
fn half_sine_amplifies_near_ft_0_8() {
    let s = gen_half_sine(100.0, 0.011, 0.0001, 0.1).unwrap();
    let f = 0.8 / 0.011;
    let b = peak(sdof_response_oracle(&s, f, ZETA, DEFAULT_SUBSTEPS).unwrap().samples());
    let a = peak(sdof_response_filter(&s, f, ZETA).unwrap().samples());
    assert!(b > 100.0 && a > 100.0, "oracle {b}, filter {a}");
}

#[test]
fn half_sine_srs_rolls_off_then_plateaus() {
    let s = half_sine(0.001);
    let bank = OscillatorBank::log_spaced(100.0, 25_600.0, 6, 10.0).unwrap();
    let spectrum = srs(&build_response_matrix(&s, &bank).unwrap());
    // Low-frequency region grows monotonically towards the pulse bandwidth.
    let low: Vec<f64> = spectrum.values.iter().take(12).copied().collect();
    assert!(low.windows(2).all(|w| w[1] > w[0]));
    // High-frequency plateau approaches the input peak.
    let last = *spectrum.values.last().unwrap();
    assert!((last - 1000.0).abs() < 0.05 * 1000.0, "{last}");
}
