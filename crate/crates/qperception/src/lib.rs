//! Quantum-like multi-sensor perception model.
//!
//! Normalized sensor readings are encoded as single-qubit `Ry` rotations
//! whose tensor product forms an n-qubit statevector; squared amplitudes
//! are the probabilities of measuring each basis state. A query operator
//! re-expresses the state in the basis of a target perception so that
//! measurement statistics quantify the degree of belief that the world
//! matches the target: the more zero bits in an outcome, the closer it is
//! to the target.
//!
//! ```
//! use qperception::{product_state, NormalizedInput};
//!
//! let input = NormalizedInput::new(vec![0.8, 0.3, 0.7])?;
//! let state = product_state(&input, 1.0)?;
//! // |101> is the most likely outcome for this input.
//! assert!((state.probabilities()[5] - 0.57).abs() < 0.01);
//! # Ok::<(), qperception::Error>(())
//! ```

pub mod cli;
pub mod error;
pub mod query;
pub mod sampling;
pub mod sensor;
pub mod state;
pub mod sweep;

pub use error::{Error, Result};
pub use query::{
    apply_query, euclidean_distance, zero_group_probabilities, QueryTarget, ZeroGroupSummary,
};
pub use sampling::{sample, sample_with_stream, MeasurementHistogram};
pub use sensor::{
    normalize, normalize_frame, normalize_value, RangePolicy, RawFrame, SensorConfig, SensorSpec,
};
pub use state::{
    bitstring, bloch_coordinates, product_state, qubit_amplitudes, BlochPoint, NormalizedInput,
    RotationAngle, StateVector, MAX_QUBITS,
};
pub use sweep::{
    confidence_curve, default_table_rows, reproduce_table, run_sweep, write_sweep_csv,
    CurvePoint, GridAnchor, SweepMode, SweepRecord, SweepSpec, TableRow,
};
