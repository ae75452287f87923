//! Statevector construction for the multi-sensor perception model.
//!
//! Each normalized sensor value `x` in `[0, 1]` drives a single-qubit
//! rotation `Ry(pi * x / tau)` applied to `|0>`. The qubits never
//! interact, so the full n-qubit state is the tensor product of the
//! per-qubit amplitude pairs and stays real-valued throughout.
//!
//! Basis-state indexing follows bit order: qubit `i` (1-based, matching
//! sensor `i`) is bit `i - 1` of the index, so printed bitstrings read
//! MSB-first as `q_n ... q_1`.
//!
//! [`product_state`] builds the state in closed form. [`StateVector::apply_ry`]
//! is a general gate-application path over amplitude pairs; the two routes
//! are kept independent so one can cross-validate the other.

use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Hard cap on qubit count; dense storage of `2^n` amplitudes beyond this
/// is a configuration mistake, not something to fall back from silently.
pub const MAX_QUBITS: usize = 24;

const NORM_TOLERANCE: f64 = 1e-12;

/// Normalized sensor readings, one unit-interval value per sensor.
#[derive(Debug, Clone, PartialEq)]
pub struct NormalizedInput {
    values: Vec<f64>,
}

impl NormalizedInput {
    /// Validates that every entry lies in `[0, 1]` and the count is in
    /// `1..=MAX_QUBITS`.
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::EmptyInput);
        }
        if values.len() > MAX_QUBITS {
            return Err(Error::TooManyQubits {
                n: values.len(),
                max: MAX_QUBITS,
            });
        }
        for &v in &values {
            validate_unit_interval(v)?;
        }
        Ok(Self { values })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Number of sensors, which equals the qubit count.
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// A `Ry` rotation angle in radians.
///
/// Encoding angles are `pi * x / tau` (always in `[0, pi]` for `tau >= 1`);
/// query angles are negated, so the full admissible range is `[-pi, pi]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RotationAngle {
    radians: f64,
}

impl RotationAngle {
    pub fn new(radians: f64) -> Result<Self> {
        if !radians.is_finite() || radians.abs() > PI {
            return Err(Error::AngleOutOfRange { radians });
        }
        Ok(Self { radians })
    }

    /// The encoding angle `pi * x / tau` for a normalized reading.
    pub fn encoding(x: f64, tau: f64) -> Result<Self> {
        validate_unit_interval(x)?;
        validate_tau(tau)?;
        Self::new(PI * x / tau)
    }

    /// The inverse rotation `-pi * target / tau` used by query operators.
    pub fn query(target: f64, tau: f64) -> Result<Self> {
        validate_unit_interval(target)?;
        validate_tau(tau)?;
        Self::new(-PI * target / tau)
    }

    pub fn radians(&self) -> f64 {
        self.radians
    }
}

/// Dense real statevector over the `2^n` basis states.
///
/// Amplitudes from plain encodings are non-negative; query operators may
/// introduce negative entries. Probabilities are squared amplitudes either
/// way.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    amplitudes: Vec<f64>,
    n: usize,
}

impl StateVector {
    /// The all-zeros state `|0...0>` on `n` qubits.
    pub fn ground(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::EmptyInput);
        }
        if n > MAX_QUBITS {
            return Err(Error::TooManyQubits { n, max: MAX_QUBITS });
        }
        let mut amplitudes = vec![0.0; 1 << n];
        amplitudes[0] = 1.0;
        Ok(Self { amplitudes, n })
    }

    /// Builds a state from raw amplitudes, checking the length is a power
    /// of two and the squared norm is 1 within 1e-12.
    pub fn from_amplitudes(amplitudes: Vec<f64>) -> Result<Self> {
        let len = amplitudes.len();
        if len < 2 || !len.is_power_of_two() {
            return Err(Error::NotPowerOfTwo { len });
        }
        let n = len.trailing_zeros() as usize;
        if n > MAX_QUBITS {
            return Err(Error::TooManyQubits { n, max: MAX_QUBITS });
        }
        let norm_sq = kahan_sum(amplitudes.iter().map(|a| a * a));
        if !norm_sq.is_finite() || (norm_sq - 1.0).abs() > NORM_TOLERANCE {
            return Err(Error::NotNormalized { norm_sq });
        }
        Ok(Self { amplitudes, n })
    }

    pub(crate) fn new_unchecked(amplitudes: Vec<f64>, n: usize) -> Self {
        debug_assert_eq!(amplitudes.len(), 1 << n);
        debug_assert!(
            (kahan_sum(amplitudes.iter().map(|a| a * a)) - 1.0).abs() <= NORM_TOLERANCE
        );
        Self { amplitudes, n }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn amplitudes(&self) -> &[f64] {
        &self.amplitudes
    }

    /// Outcome probabilities `p_b = c_b^2`.
    pub fn probabilities(&self) -> Vec<f64> {
        self.amplitudes.iter().map(|c| c * c).collect()
    }

    /// Applies `Ry(angle)` to qubit `qubit` (1-based) and returns the new
    /// state. Pairs of amplitudes differing only in bit `qubit - 1` are
    /// mixed by the 2x2 rotation matrix.
    pub fn apply_ry(&self, qubit: usize, angle: RotationAngle) -> Result<Self> {
        if qubit == 0 || qubit > self.n {
            return Err(Error::QubitIndexOutOfRange {
                index: qubit,
                n: self.n,
            });
        }
        let half = angle.radians() / 2.0;
        let (sin, cos) = half.sin_cos();
        let mask = 1usize << (qubit - 1);
        let mut next = self.amplitudes.clone();
        for b in 0..self.amplitudes.len() {
            if b & mask == 0 {
                let lo = self.amplitudes[b];
                let hi = self.amplitudes[b | mask];
                next[b] = cos * lo - sin * hi;
                next[b | mask] = sin * lo + cos * hi;
            }
        }
        Ok(Self {
            amplitudes: next,
            n: self.n,
        })
    }
}

/// A point on the Bloch sphere. States reachable by this model always have
/// `y = 0` since only `Ry` rotations are applied to `|0>`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlochPoint {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

/// Amplitudes `(cos(pi x / 2 tau), sin(pi x / 2 tau))` of a single encoded
/// qubit, i.e. `Ry(pi x / tau)` applied to `|0>`.
pub fn qubit_amplitudes(x: f64, tau: f64) -> Result<(f64, f64)> {
    validate_unit_interval(x)?;
    validate_tau(tau)?;
    Ok(rotation_amplitudes(x, tau))
}

/// Like [`qubit_amplitudes`] but for a signed difference in `[-1, 1]`,
/// used by query composition. Callers guarantee the range.
pub(crate) fn rotation_amplitudes(delta: f64, tau: f64) -> (f64, f64) {
    let half = PI * delta / (2.0 * tau);
    let (sin, cos) = half.sin_cos();
    (cos, sin)
}

/// Closed-form product construction of the full statevector: amplitude
/// `c_b` is the product over sensors of the `a0`/`a1` factor selected by
/// bit `i - 1` of `b`.
pub fn product_state(input: &NormalizedInput, tau: f64) -> Result<StateVector> {
    validate_tau(tau)?;
    let mut amplitudes = vec![1.0];
    for &x in input.values() {
        let (a0, a1) = qubit_amplitudes(x, tau)?;
        let mut next = Vec::with_capacity(amplitudes.len() * 2);
        next.extend(amplitudes.iter().map(|c| c * a0));
        next.extend(amplitudes.iter().map(|c| c * a1));
        amplitudes = next;
    }
    Ok(StateVector::new_unchecked(amplitudes, input.len()))
}

/// Bloch-sphere coordinates `(sin(pi x), 0, cos(pi x))` of an encoded qubit.
pub fn bloch_coordinates(x: f64) -> Result<BlochPoint> {
    validate_unit_interval(x)?;
    let (sin, cos) = (PI * x).sin_cos();
    Ok(BlochPoint {
        x: sin,
        y: 0.0,
        z: cos,
    })
}

/// MSB-first bitstring `q_n ... q_1` of a basis-state index.
pub fn bitstring(index: usize, n: usize) -> String {
    format!("{index:0n$b}")
}

pub(crate) fn validate_unit_interval(value: f64) -> Result<()> {
    if !value.is_finite() || !(0.0..=1.0).contains(&value) {
        return Err(Error::ValueOutOfUnitInterval { value });
    }
    Ok(())
}

pub(crate) fn validate_tau(tau: f64) -> Result<()> {
    if !tau.is_finite() || tau < 1.0 {
        return Err(Error::InvalidTau { tau });
    }
    Ok(())
}

/// Compensated summation; keeps norm checks meaningful at 2^24 terms.
pub(crate) fn kahan_sum(values: impl IntoIterator<Item = f64>) -> f64 {
    let mut sum = 0.0;
    let mut carry = 0.0;
    for v in values {
        let y = v - carry;
        let t = sum + y;
        carry = (t - sum) - y;
        sum = t;
    }
    sum
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    // Reference vector for x = [0.8, 0.3, 0.7], printed to three decimals.
    const REFERENCE_AMPLITUDES: [f64; 8] =
        [0.125, 0.385, 0.064, 0.196, 0.245, 0.755, 0.125, 0.385];

    fn eq1_input() -> NormalizedInput {
        NormalizedInput::new(vec![0.8, 0.3, 0.7]).unwrap()
    }

    #[test]
    fn qubit_amplitudes_at_bounds() {
        let (a0, a1) = qubit_amplitudes(0.0, 1.0).unwrap();
        assert_abs_diff_eq!(a0, 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(a1, 0.0, epsilon = 1e-15);

        let (a0, a1) = qubit_amplitudes(1.0, 1.0).unwrap();
        assert_abs_diff_eq!(a0, 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(a1, 1.0, epsilon = 1e-15);
    }

    #[test]
    fn qubit_amplitudes_direct_trig() {
        // cos(0.15 pi), sin(0.15 pi) evaluated independently.
        let (a0, a1) = qubit_amplitudes(0.3, 1.0).unwrap();
        assert_abs_diff_eq!(a0, 0.8910065241883679, epsilon = 1e-15);
        assert_abs_diff_eq!(a1, 0.4539904997395467, epsilon = 1e-15);
        assert_abs_diff_eq!(a0 * a0 + a1 * a1, 1.0, epsilon = 1e-15);
    }

    #[test]
    fn qubit_amplitudes_rejects_bad_inputs() {
        assert!(qubit_amplitudes(-0.1, 1.0).is_err());
        assert!(qubit_amplitudes(1.1, 1.0).is_err());
        assert!(qubit_amplitudes(f64::NAN, 1.0).is_err());
        assert!(qubit_amplitudes(0.5, 0.99).is_err());
        assert!(qubit_amplitudes(0.5, f64::INFINITY).is_err());
    }

    #[test]
    fn product_state_matches_reference_vector() {
        let state = product_state(&eq1_input(), 1.0).unwrap();
        for (c, expected) in state.amplitudes().iter().zip(REFERENCE_AMPLITUDES) {
            assert_abs_diff_eq!(*c, expected, epsilon = 1e-3);
        }
    }

    #[test]
    fn product_state_at_corners() {
        let zeros = NormalizedInput::new(vec![0.0, 0.0, 0.0]).unwrap();
        let state = product_state(&zeros, 1.0).unwrap();
        assert_eq!(state.amplitudes()[0], 1.0);
        assert!(state.amplitudes()[1..].iter().all(|&c| c == 0.0));

        let ones = NormalizedInput::new(vec![1.0, 1.0, 1.0]).unwrap();
        let state = product_state(&ones, 1.0).unwrap();
        assert_abs_diff_eq!(state.amplitudes()[7], 1.0, epsilon = 1e-12);
        for b in 0..7 {
            assert_abs_diff_eq!(state.amplitudes()[b], 0.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn probabilities_of_reference_state() {
        let probs = product_state(&eq1_input(), 1.0).unwrap().probabilities();
        assert_abs_diff_eq!(probs[5], 0.57, epsilon = 1e-2);
        let expected = [0.0156, 0.1482, 0.0041, 0.0384, 0.0600, 0.5700, 0.0156, 0.1482];
        for (p, e) in probs.iter().zip(expected) {
            assert_abs_diff_eq!(*p, e, epsilon = 1e-3);
        }
    }

    #[test]
    fn probabilities_of_basis_state() {
        let state = StateVector::ground(3).unwrap();
        let probs = state.probabilities();
        assert_eq!(probs[0], 1.0);
        assert!(probs[1..].iter().all(|&p| p == 0.0));
    }

    #[test]
    fn apply_ry_zero_rotation_is_identity() {
        let state = StateVector::ground(3).unwrap();
        let rotated = state
            .apply_ry(1, RotationAngle::new(0.0).unwrap())
            .unwrap();
        assert_eq!(state.amplitudes(), rotated.amplitudes());
    }

    #[test]
    fn apply_ry_half_turn_flips_target_qubit() {
        let state = StateVector::ground(3).unwrap();
        let rotated = state
            .apply_ry(2, RotationAngle::new(PI).unwrap())
            .unwrap();
        // Qubit 2 is bit 1, so all mass lands on index 2 (binary 010).
        assert_abs_diff_eq!(rotated.amplitudes()[2], 1.0, epsilon = 1e-12);
    }

    #[test]
    fn apply_ry_rejects_bad_qubit_index() {
        let state = StateVector::ground(2).unwrap();
        let angle = RotationAngle::new(0.5).unwrap();
        assert!(state.apply_ry(0, angle).is_err());
        assert!(state.apply_ry(3, angle).is_err());
    }

    #[test]
    fn sequential_gates_match_product_construction() {
        let input = eq1_input();
        let product = product_state(&input, 1.0).unwrap();
        let mut state = StateVector::ground(3).unwrap();
        for (i, &x) in input.values().iter().enumerate() {
            state = state
                .apply_ry(i + 1, RotationAngle::encoding(x, 1.0).unwrap())
                .unwrap();
        }
        for (a, b) in state.amplitudes().iter().zip(product.amplitudes()) {
            assert_abs_diff_eq!(*a, *b, epsilon = 1e-10);
        }
    }

    #[test]
    fn bit_ordering_witness() {
        // x_i = 1 with every other entry 0 puts all mass at index 2^(i-1).
        for n in 1..=6 {
            for i in 1..=n {
                let mut values = vec![0.0; n];
                values[i - 1] = 1.0;
                let input = NormalizedInput::new(values).unwrap();
                let state = product_state(&input, 1.0).unwrap();
                let expected = 1usize << (i - 1);
                for (b, &c) in state.amplitudes().iter().enumerate() {
                    if b == expected {
                        assert_abs_diff_eq!(c, 1.0, epsilon = 1e-12);
                    } else {
                        assert_abs_diff_eq!(c, 0.0, epsilon = 1e-12);
                    }
                }
            }
        }
    }

    #[test]
    fn bloch_coordinates_reference_points() {
        let north = bloch_coordinates(0.0).unwrap();
        assert_eq!((north.x, north.y, north.z), (0.0, 0.0, 1.0));

        let equator = bloch_coordinates(0.5).unwrap();
        assert_abs_diff_eq!(equator.x, 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(equator.z, 0.0, epsilon = 1e-15);

        let p = bloch_coordinates(0.3).unwrap();
        assert_abs_diff_eq!(p.x, 0.8090169943749475, epsilon = 1e-15);
        assert_eq!(p.y, 0.0);
        assert_abs_diff_eq!(p.z, 0.5877852522924731, epsilon = 1e-15);
        assert!(bloch_coordinates(1.2).is_err());
    }

    #[test]
    fn from_amplitudes_validates() {
        assert!(StateVector::from_amplitudes(vec![1.0]).is_err());
        assert!(StateVector::from_amplitudes(vec![1.0, 0.0, 0.0]).is_err());
        assert!(StateVector::from_amplitudes(vec![0.9, 0.1]).is_err());
        let s = StateVector::from_amplitudes(vec![0.6, -0.8]).unwrap();
        assert_eq!(s.n(), 1);
    }

    #[test]
    fn bitstring_is_msb_first() {
        assert_eq!(bitstring(5, 3), "101");
        assert_eq!(bitstring(1, 3), "001");
        assert_eq!(bitstring(0, 1), "0");
    }

    fn unit_vec(n: usize) -> impl Strategy<Value = Vec<f64>> {
        proptest::collection::vec(0.0..=1.0f64, n)
    }

    proptest! {
        #[test]
        fn norm_is_conserved(values in (1usize..=6).prop_flat_map(unit_vec), tau in 1.0..4.0f64) {
            let input = NormalizedInput::new(values).unwrap();
            let state = product_state(&input, tau).unwrap();
            let norm_sq = kahan_sum(state.amplitudes().iter().map(|c| c * c));
            prop_assert!((norm_sq - 1.0).abs() <= 1e-12);
        }

        #[test]
        fn product_factorizes_over_qubits(values in (1usize..=6).prop_flat_map(unit_vec)) {
            let input = NormalizedInput::new(values.clone()).unwrap();
            let probs = product_state(&input, 1.0).unwrap().probabilities();
            for (b, &p) in probs.iter().enumerate() {
                let mut expected = 1.0;
                for (i, &x) in values.iter().enumerate() {
                    let p1 = (PI * x / 2.0).sin().powi(2);
                    expected *= if b >> i & 1 == 1 { p1 } else { 1.0 - p1 };
                }
                prop_assert!((p - expected).abs() <= 1e-12);
            }
        }

        #[test]
        fn gate_oracle_matches_closed_form(
            values in (1usize..=6).prop_flat_map(unit_vec),
            tau in 1.0..4.0f64,
        ) {
            let input = NormalizedInput::new(values.clone()).unwrap();
            let product = product_state(&input, tau).unwrap();
            let mut state = StateVector::ground(values.len()).unwrap();
            for (i, &x) in values.iter().enumerate() {
                state = state.apply_ry(i + 1, RotationAngle::encoding(x, tau).unwrap()).unwrap();
            }
            for (a, b) in state.amplitudes().iter().zip(product.amplitudes()) {
                prop_assert!((a - b).abs() <= 1e-10);
            }
        }

        #[test]
        fn rotations_compose_additively(
            total in -PI..PI,
            split in 0.0..1.0f64,
            x in 0.0..=1.0f64,
        ) {
            let state = product_state(&NormalizedInput::new(vec![x, 0.5]).unwrap(), 1.0).unwrap();
            let a = RotationAngle::new(total * split).unwrap();
            let b = RotationAngle::new(total - total * split).unwrap();
            let stepped = state.apply_ry(1, a).unwrap().apply_ry(1, b).unwrap();
            let direct = state.apply_ry(1, RotationAngle::new(total).unwrap()).unwrap();
            for (u, v) in stepped.amplitudes().iter().zip(direct.amplitudes()) {
                prop_assert!((u - v).abs() <= 1e-10);
            }
        }

        #[test]
        fn single_qubit_probability_is_sinusoidal(x in 0.0..=1.0f64) {
            let input = NormalizedInput::new(vec![x]).unwrap();
            let p0 = product_state(&input, 1.0).unwrap().probabilities()[0];
            prop_assert!((p0 - (1.0 + (PI * x).cos()) / 2.0).abs() <= 1e-12);
        }
    }
}
