use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sdof::{OscillatorBank, DEFAULT_Q};
use crate::spectrum::{DEFAULT_SRC_CEILING, DEFAULT_SRC_FLOOR};

/// Analysis settings shared by every pipeline command.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AnalysisConfig {
    pub fmin: f64,
    pub fmax: f64,
    pub points_per_octave: usize,
    pub q: f64,
    pub src_floor: f64,
    pub src_ceiling: f64,
    pub output_dir: PathBuf,
}

impl Default for AnalysisConfig {
    fn default() -> Self {
        AnalysisConfig {
            fmin: 100.0,
            fmax: 25_600.0,
            points_per_octave: 6,
            q: DEFAULT_Q,
            src_floor: DEFAULT_SRC_FLOOR,
            src_ceiling: DEFAULT_SRC_CEILING,
            output_dir: PathBuf::from("."),
        }
    }
}

impl AnalysisConfig {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("fmin", self.fmin),
            ("fmax", self.fmax),
            ("q", self.q),
            ("src_floor", self.src_floor),
            ("src_ceiling", self.src_ceiling),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::Parameter(format!("{name} must be positive, got {v}")));
            }
        }
        if self.fmin >= self.fmax {
            return Err(Error::Parameter(format!("fmin ({}) must be below fmax ({})", self.fmin, self.fmax)));
        }
        if self.points_per_octave == 0 {
            return Err(Error::Parameter("points_per_octave must be >= 1".into()));
        }
        if self.q <= 0.5 {
            return Err(Error::Parameter(format!("q must exceed 0.5, got {}", self.q)));
        }
        if self.src_floor >= self.src_ceiling {
            return Err(Error::Parameter("src_floor must be below src_ceiling".into()));
        }
        Ok(())
    }

    pub fn bank(&self) -> Result<OscillatorBank> {
        self.validate()?;
        OscillatorBank::log_spaced(self.fmin, self.fmax, self.points_per_octave, self.q)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_give_49_oscillators() {
        let c = AnalysisConfig::default();
        c.validate().unwrap();
        let bank = c.bank().unwrap();
        assert_eq!(bank.len(), 49);
        assert_eq!(bank.zeta(), 0.05);
    }

    #[test]
    fn rejects_inverted_ranges() {
        let c = AnalysisConfig { fmin: 1000.0, fmax: 100.0, ..Default::default() };
        assert!(c.validate().is_err());
        let c = AnalysisConfig { q: 0.4, ..Default::default() };
        assert!(c.validate().is_err());
        let c = AnalysisConfig { src_floor: 3e5, ..Default::default() };
        assert!(c.validate().is_err());
    }
}
