//! Sensor channel definitions and reading normalization.
//!
//! A sensor is a bounded discrete scalar channel. Raw readings are mapped
//! to `[0, 1]` by `(reading - lower) / (upper - lower)`; the ordered sensor
//! list in a [`SensorConfig`] fixes the qubit assignment (first sensor =
//! qubit 1 = least significant bit).
//!
//! Out-of-range readings are rejected by default so that miscalibrated
//! sensors fail loudly; [`RangePolicy::Clamp`] opts into clamping instead.

use std::fs;
use std::path::Path;

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::state::{NormalizedInput, MAX_QUBITS};

/// Bundled default configuration: three RGB channels in `[0, 255]`.
pub const DEFAULT_RGB_CONFIG: &str = include_str!("../configs/rgb.toml");

/// One bounded discrete sensor channel.
#[derive(Debug, Clone, PartialEq, Eq, Deserialize)]
pub struct SensorSpec {
    name: String,
    lower: i64,
    upper: i64,
}

impl SensorSpec {
    pub fn new(name: impl Into<String>, lower: i64, upper: i64) -> Result<Self> {
        let name = name.into();
        if name.is_empty() {
            return Err(Error::EmptySensorName);
        }
        if lower >= upper {
            return Err(Error::InvalidSensorBounds { name, lower, upper });
        }
        Ok(Self { name, lower, upper })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn lower(&self) -> i64 {
        self.lower
    }

    pub fn upper(&self) -> i64 {
        self.upper
    }
}

/// Ordered sensor list; the order is the qubit assignment and is preserved
/// exactly as configured.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SensorConfig {
    sensors: Vec<SensorSpec>,
}

#[derive(Deserialize)]
struct RawConfig {
    sensors: Vec<SensorSpec>,
}

impl SensorConfig {
    pub fn new(sensors: Vec<SensorSpec>) -> Result<Self> {
        if sensors.is_empty() {
            return Err(Error::EmptyInput);
        }
        if sensors.len() > MAX_QUBITS {
            return Err(Error::TooManyQubits {
                n: sensors.len(),
                max: MAX_QUBITS,
            });
        }
        for (i, s) in sensors.iter().enumerate() {
            SensorSpec::new(s.name.clone(), s.lower, s.upper)?;
            if sensors[..i].iter().any(|other| other.name == s.name) {
                return Err(Error::DuplicateSensorName {
                    name: s.name.clone(),
                });
            }
        }
        Ok(Self { sensors })
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        let raw: RawConfig = toml::from_str(text)?;
        Self::new(raw.sensors)
    }

    pub fn from_path(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_toml(&fs::read_to_string(path)?)
    }

    /// The bundled RGB default (three sensors named R, G, B over `[0, 255]`).
    pub fn default_rgb() -> Self {
        Self::from_toml(DEFAULT_RGB_CONFIG).expect("bundled config is valid")
    }

    pub fn sensors(&self) -> &[SensorSpec] {
        &self.sensors
    }

    pub fn len(&self) -> usize {
        self.sensors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sensors.is_empty()
    }

    /// Frame whose readings all sit at the sensor lower bounds, e.g.
    /// RGB(0,0,0) for the default config.
    pub fn lower_bound_frame(&self) -> RawFrame {
        RawFrame::new(self.sensors.iter().map(|s| s.lower).collect())
    }
}

/// One raw reading per configured sensor, in domain units.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RawFrame {
    readings: Vec<i64>,
}

impl RawFrame {
    pub fn new(readings: Vec<i64>) -> Self {
        Self { readings }
    }

    pub fn readings(&self) -> &[i64] {
        &self.readings
    }

    pub fn len(&self) -> usize {
        self.readings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.readings.is_empty()
    }
}

impl std::fmt::Display for RawFrame {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "(")?;
        for (i, r) in self.readings.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{r}")?;
        }
        write!(f, ")")
    }
}

/// What to do with readings outside the configured bounds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RangePolicy {
    /// Fail with [`Error::ReadingOutOfRange`].
    #[default]
    Reject,
    /// Clamp to the nearest bound.
    Clamp,
}

/// Normalizes an integer reading to `[0, 1]` against the sensor bounds.
pub fn normalize(reading: i64, spec: &SensorSpec, policy: RangePolicy) -> Result<f64> {
    normalize_value(reading as f64, spec, policy)
}

/// Widening overload of [`normalize`] for real-valued readings; identical
/// semantics, downstream math only needs a unit-interval value.
pub fn normalize_value(value: f64, spec: &SensorSpec, policy: RangePolicy) -> Result<f64> {
    let lower = spec.lower as f64;
    let upper = spec.upper as f64;
    let value = if value.is_finite() && (lower..=upper).contains(&value) {
        value
    } else {
        match policy {
            RangePolicy::Clamp if value.is_finite() => value.clamp(lower, upper),
            _ => {
                return Err(Error::ReadingOutOfRange {
                    name: spec.name.clone(),
                    reading: value,
                    lower: spec.lower,
                    upper: spec.upper,
                })
            }
        }
    };
    Ok((value - lower) / (upper - lower))
}

/// Normalizes a whole frame elementwise, preserving sensor order.
pub fn normalize_frame(
    frame: &RawFrame,
    config: &SensorConfig,
    policy: RangePolicy,
) -> Result<NormalizedInput> {
    if frame.len() != config.len() {
        return Err(Error::LengthMismatch {
            expected: config.len(),
            actual: frame.len(),
        });
    }
    let values = frame
        .readings()
        .iter()
        .zip(config.sensors())
        .map(|(&r, s)| normalize(r, s, policy))
        .collect::<Result<Vec<_>>>()?;
    NormalizedInput::new(values)
}
