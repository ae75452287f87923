//! Crate-wide error type.

use std::io;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("value {value} is outside the unit interval [0, 1]")]
    ValueOutOfUnitInterval { value: f64 },

    #[error("tau must be a finite value >= 1, got {tau}")]
    InvalidTau { tau: f64 },

    #[error("rotation angle {radians} rad is outside [-pi, pi]")]
    AngleOutOfRange { radians: f64 },

    #[error("expected {expected} entries, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },

    #[error("qubit index {index} is outside 1..={n}")]
    QubitIndexOutOfRange { index: usize, n: usize },

    #[error("{n} qubits exceed the supported maximum of {max}")]
    TooManyQubits { n: usize, max: usize },

    #[error("at least one sensor/input value is required")]
    EmptyInput,

    #[error("amplitude vector has squared norm {norm_sq}, expected 1")]
    NotNormalized { norm_sq: f64 },

    #[error("vector length {len} is not a power of two >= 2")]
    NotPowerOfTwo { len: usize },

    #[error("sensor `{name}`: reading {reading} is outside [{lower}, {upper}]")]
    ReadingOutOfRange {
        name: String,
        reading: f64,
        lower: i64,
        upper: i64,
    },

    #[error("sensor `{name}`: bounds [{lower}, {upper}] are invalid, lower must be < upper")]
    InvalidSensorBounds { name: String, lower: i64, upper: i64 },

    #[error("duplicate sensor name `{name}`")]
    DuplicateSensorName { name: String },

    #[error("sensor names must be nonempty")]
    EmptySensorName,

    #[error("invalid probability vector: {reason}")]
    InvalidProbabilities { reason: String },

    #[error("shot count must be positive")]
    ZeroShots,

    #[error("sweep step must be a positive integer, got {step}")]
    InvalidStride { step: i64 },

    #[error("sweep grid for sensor `{name}` contains no points")]
    EmptyGrid { name: String },

    #[error("failed to parse sensor config: {0}")]
    Config(#[from] toml::de::Error),

    #[error("invalid row specification: {reason}")]
    InvalidRow { reason: String },

    #[error(transparent)]
    Io(#[from] io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
