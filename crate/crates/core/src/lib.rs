//! Shock severity analysis.
//!
//! A base acceleration history is pushed through a bank of damped
//! single-degree-of-freedom oscillators. The responses form the shock
//! response matrix `M` (time × natural frequency) and its magnitude `N`.
//! Column maxima of `N` give the classical shock response spectrum (the
//! supremum of any modal response). The best rank-one approximation of `N`
//! gives the shock severity infimum, and the pair bounds the maximum
//! response of a structure whose modal weights are known.

pub mod config;
pub mod error;
pub mod modal;
pub mod plot;
pub mod sdof;
pub mod signal;
pub mod spectrum;
pub mod ssi;
pub mod verify;

pub use config::AnalysisConfig;
pub use error::{Error, Result};
pub use modal::{ModalModel, ModalRow, ResponseBounds};
pub use sdof::OscillatorBank;
pub use signal::{Signal, SignalFormat, Units};
pub use spectrum::{ResponseMatrix, SrsVector};
pub use ssi::{DualSpectra, SsiResult, SvdDecomposition};
pub use verify::VerifyReport;

/// Standard gravity, m/s² per g.
pub const STANDARD_GRAVITY: f64 = 9.80665;
