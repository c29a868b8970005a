//! Uniformly sampled acceleration-time histories: validation, text I/O and
//! the synthetic fixtures used throughout the test suites.

use std::f64::consts::PI;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::STANDARD_GRAVITY;

/// Maximum relative deviation of any time step from the median step.
pub const SAMPLING_JITTER_TOL: f64 = 1e-6;

/// Base acceleration history in m/s².
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Signal {
    samples: Vec<f64>,
    dt: f64,
    label: String,
}

impl Signal {
    pub fn new(samples: Vec<f64>, dt: f64, label: impl Into<String>) -> Result<Self> {
        if !(dt.is_finite() && dt > 0.0) {
            return Err(Error::Parameter(format!("sample interval must be > 0, got {dt}")));
        }
        if samples.len() < 2 {
            return Err(Error::Parameter(format!(
                "a signal needs at least 2 samples, got {}",
                samples.len()
            )));
        }
        if let Some(i) = samples.iter().position(|v| !v.is_finite()) {
            return Err(Error::Parameter(format!("sample {i} is not finite")));
        }
        Ok(Signal {
            samples,
            dt,
            label: label.into(),
        })
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn sample_rate(&self) -> f64 {
        1.0 / self.dt
    }

    pub fn nyquist(&self) -> f64 {
        0.5 / self.dt
    }

    /// Sample instants, starting at zero.
    pub fn times(&self) -> Vec<f64> {
        (0..self.samples.len()).map(|i| i as f64 * self.dt).collect()
    }

    pub fn peak_abs(&self) -> f64 {
        self.samples.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    /// Multiply every sample by `factor`.
    pub fn scaled(&self, factor: f64) -> Signal {
        Signal {
            samples: self.samples.iter().map(|v| v * factor).collect(),
            dt: self.dt,
            label: self.label.clone(),
        }
    }

    /// Prepend `count` zero samples.
    pub fn delayed(&self, count: usize) -> Signal {
        let mut samples = vec![0.0; count];
        samples.extend_from_slice(&self.samples);
        Signal {
            samples,
            dt: self.dt,
            label: self.label.clone(),
        }
    }

    /// Append `seconds` of zeros (rounded to whole samples).
    pub fn padded(&self, seconds: f64) -> Signal {
        let extra = (seconds / self.dt).round().max(0.0) as usize;
        let mut samples = self.samples.clone();
        samples.resize(samples.len() + extra, 0.0);
        Signal {
            samples,
            dt: self.dt,
            label: self.label.clone(),
        }
    }
}

/// Column layout of a signal file.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SignalFormat {
    /// `time_s,accel` rows; the interval is inferred from the time column.
    TwoColumn,
    /// One acceleration value per row with an externally supplied interval.
    SingleColumn { dt: f64 },
}

/// Units of the acceleration column in a file.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Units {
    #[default]
    #[serde(alias = "m/s2", alias = "ms2")]
    Ms2,
    G,
}

impl Units {
    pub fn to_ms2(self) -> f64 {
        match self {
            Units::Ms2 => 1.0,
            Units::G => STANDARD_GRAVITY,
        }
    }
}

/// Parsed file content before it becomes a [`Signal`].
struct RawTable {
    rows: Vec<(usize, Vec<f64>)>,
    dt_hint: Option<f64>,
    label_hint: Option<String>,
}

fn split_fields(line: &str) -> impl Iterator<Item = &str> {
    line.split(|c: char| c == ',' || c.is_whitespace())
        .filter(|f| !f.is_empty())
}

fn read_table(text: &str) -> Result<RawTable> {
    let mut rows = Vec::new();
    let mut dt_hint = None;
    let mut label_hint = None;
    let mut seen_data = false;

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(comment) = line.strip_prefix('#') {
            // Metadata written by `save_signal`.
            if let Some((key, value)) = comment.split_once('=') {
                match key.trim() {
                    "dt" => dt_hint = value.trim().parse::<f64>().ok(),
                    "label" => label_hint = Some(value.trim().to_string()),
                    _ => {}
                }
            }
            continue;
        }
        let parsed: std::result::Result<Vec<f64>, _> =
            split_fields(line).map(str::parse::<f64>).collect();
        match parsed {
            Ok(values) => {
                seen_data = true;
                rows.push((line_no, values));
            }
            // A single header row is allowed ahead of the data.
            Err(_) if !seen_data && rows.is_empty() => seen_data = true,
            Err(e) => {
                return Err(Error::Parse {
                    line: line_no,
                    message: format!("non-numeric row {line:?}: {e}"),
                })
            }
        }
    }
    if rows.is_empty() {
        return Err(Error::EmptyInput("no numeric rows".into()));
    }
    Ok(RawTable {
        rows,
        dt_hint,
        label_hint,
    })
}

fn median(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    let mid = v.len() / 2;
    let (_, m, _) = v.select_nth_unstable_by(mid, |a, b| a.total_cmp(b));
    *m
}

/// Parse signal text already read into memory.
pub fn parse_signal(text: &str, format: SignalFormat, units: Units, label: &str) -> Result<Signal> {
    let table = read_table(text)?;
    let scale = units.to_ms2();
    let label = table.label_hint.clone().unwrap_or_else(|| label.to_string());

    match format {
        SignalFormat::SingleColumn { dt } => {
            let mut samples = Vec::with_capacity(table.rows.len());
            for (line, values) in &table.rows {
                if values.len() != 1 {
                    return Err(Error::Parse {
                        line: *line,
                        message: format!("expected 1 column, found {}", values.len()),
                    });
                }
                samples.push(values[0] * scale);
            }
            Signal::new(samples, dt, label)
        }
        SignalFormat::TwoColumn => {
            let mut times = Vec::with_capacity(table.rows.len());
            let mut samples = Vec::with_capacity(table.rows.len());
            for (line, values) in &table.rows {
                if values.len() != 2 {
                    return Err(Error::Parse {
                        line: *line,
                        message: format!("expected 2 columns, found {}", values.len()),
                    });
                }
                times.push(values[0]);
                samples.push(values[1] * scale);
            }
            if times.len() < 2 {
                return Err(Error::EmptyInput("a signal needs at least 2 rows".into()));
            }
            let steps: Vec<f64> = times.windows(2).map(|w| w[1] - w[0]).collect();
            if let Some(i) = steps.iter().position(|s| !(*s > 0.0)) {
                return Err(Error::Sampling(format!(
                    "time column not strictly increasing at row {}",
                    table.rows[i + 1].0
                )));
            }
            let step = median(&steps);
            for (i, s) in steps.iter().enumerate() {
                let jitter = (s - step).abs() / step;
                if jitter >= SAMPLING_JITTER_TOL {
                    return Err(Error::Sampling(format!(
                        "step {s} at row {} deviates from median step {step} (relative {jitter:.3e})",
                        table.rows[i + 1].0
                    )));
                }
            }
            let dt = match table.dt_hint {
                Some(h) if (h - step).abs() < SAMPLING_JITTER_TOL * step => h,
                _ => step,
            };
            Signal::new(samples, dt, label)
        }
    }
}

/// Read a signal file. The label defaults to the file stem.
pub fn load_signal(path: impl AsRef<Path>, format: SignalFormat) -> Result<Signal> {
    load_signal_with_units(path, format, Units::Ms2)
}

pub fn load_signal_with_units(
    path: impl AsRef<Path>,
    format: SignalFormat,
    units: Units,
) -> Result<Signal> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let stem = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "signal".into());
    parse_signal(&text, format, units, &stem)
}

/// Two-column text with 17 significant digits, which reloads bit-exactly.
pub fn format_signal(signal: &Signal) -> String {
    let mut out = String::with_capacity(48 * signal.len() + 64);
    let _ = writeln!(out, "# label={}", signal.label);
    let _ = writeln!(out, "# dt={:.16e}", signal.dt);
    out.push_str("time_s,accel_ms2\n");
    for (i, a) in signal.samples.iter().enumerate() {
        let _ = writeln!(out, "{:.16e},{:.16e}", i as f64 * signal.dt, a);
    }
    out
}

pub fn save_signal(signal: &Signal, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, format_signal(signal)).map_err(|e| Error::io(path, e))
}

/// Half-sine pulse of the given peak and duration followed by `pad` seconds
/// of zeros.
pub fn gen_half_sine(amplitude: f64, duration: f64, dt: f64, pad: f64) -> Result<Signal> {
    if !(amplitude > 0.0 && amplitude.is_finite()) {
        return Err(Error::Parameter(format!("amplitude must be > 0, got {amplitude}")));
    }
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::Parameter(format!("dt must be > 0, got {dt}")));
    }
    if !(pad >= 0.0) {
        return Err(Error::Parameter(format!("pad must be >= 0, got {pad}")));
    }
    if !(duration >= 10.0 * dt * (1.0 - 1e-9)) {
        return Err(Error::Resolution(format!(
            "pulse duration {duration} s is shorter than 10 samples of {dt} s"
        )));
    }
    let intervals = (duration / dt).round() as usize;
    let mut samples: Vec<f64> = (0..=intervals)
        .map(|i| amplitude * (PI * i as f64 / intervals as f64).sin())
        .collect();
    samples[intervals] = 0.0;
    let pad_samples = (pad / dt).round() as usize;
    samples.resize(samples.len() + pad_samples, 0.0);
    Signal::new(samples, dt, "half_sine")
}

/// One exponentially decaying sinusoid `amplitude·e^(−decay·t)·sin(2πft + phase)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DampedSine {
    pub freq_hz: f64,
    pub amplitude: f64,
    pub decay: f64,
    pub phase: f64,
}

impl DampedSine {
    pub fn new(freq_hz: f64, amplitude: f64, decay: f64, phase: f64) -> Self {
        DampedSine {
            freq_hz,
            amplitude,
            decay,
            phase,
        }
    }

    pub fn eval(&self, t: f64) -> f64 {
        self.amplitude * (-self.decay * t).exp() * (2.0 * PI * self.freq_hz * t + self.phase).sin()
    }
}

/// Sum of damped sinusoids sampled at `0, dt, …, duration`.
pub fn gen_damped_sine_sum(components: &[DampedSine], duration: f64, dt: f64) -> Result<Signal> {
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::Parameter(format!("dt must be > 0, got {dt}")));
    }
    if !(duration > 0.0 && duration.is_finite()) {
        return Err(Error::Parameter(format!("duration must be > 0, got {duration}")));
    }
    if components.is_empty() {
        return Err(Error::Parameter("at least one component is required".into()));
    }
    let nyquist = 0.5 / dt;
    for c in components {
        if c.freq_hz >= nyquist {
            return Err(Error::Alias {
                freq_hz: c.freq_hz,
                limit_hz: nyquist,
            });
        }
        if !(c.freq_hz >= 0.0 && c.amplitude.is_finite() && c.decay >= 0.0 && c.phase.is_finite()) {
            return Err(Error::Parameter(format!("invalid component {c:?}")));
        }
    }
    let n = (duration / dt).round() as usize + 1;
    let samples = (0..n)
        .map(|i| {
            let t = i as f64 * dt;
            components.iter().map(|c| c.eval(t)).sum()
        })
        .collect();
    Signal::new(samples, dt, "damped_sine_sum")
}
