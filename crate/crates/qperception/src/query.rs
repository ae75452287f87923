//! Belief queries against a target perception.
//!
//! A query re-expresses the encoded state in the basis of a target vector
//! `x̄` by applying the inverse rotation `Ry(-pi * x̄_i / tau)` to each
//! qubit. Successive `Ry` rotations on the same qubit add their angles, so
//! the post-query state depends only on the differences `x_i - x̄_i`; the
//! closed form here exploits that directly and the gate path is used as an
//! independent oracle in tests.
//!
//! After a query, `|0...0>` means "matches the target": the more zero bits
//! a measured state has, the closer it is to the target, and `|1...1>` is
//! the opposite state. [`zero_group_probabilities`] aggregates outcome
//! probabilities by that zero count.

use crate::error::{Error, Result};
use crate::sensor::RawFrame;
use crate::state::{
    kahan_sum, rotation_amplitudes, validate_tau, NormalizedInput, StateVector,
};

/// Target perception vector `x̄`, one unit-interval value per sensor.
#[derive(Debug, Clone, PartialEq)]
pub struct QueryTarget {
    values: Vec<f64>,
}

impl QueryTarget {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        Ok(Self {
            values: NormalizedInput::new(values)?.values().to_vec(),
        })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

impl From<NormalizedInput> for QueryTarget {
    fn from(input: NormalizedInput) -> Self {
        Self {
            values: input.values().to_vec(),
        }
    }
}

/// Encodes `input` and changes basis toward `target` in one step: qubit
/// `i` ends up as `Ry(pi (x_i - x̄_i) / tau) |0>`. Amplitudes may be
/// negative; probabilities are squares as usual.
pub fn apply_query(
    input: &NormalizedInput,
    target: &QueryTarget,
    tau: f64,
) -> Result<StateVector> {
    validate_tau(tau)?;
    if input.len() != target.len() {
        return Err(Error::LengthMismatch {
            expected: input.len(),
            actual: target.len(),
        });
    }
    let mut amplitudes = vec![1.0];
    for (&x, &t) in input.values().iter().zip(target.values()) {
        let (a0, a1) = rotation_amplitudes(x - t, tau);
        let mut next = Vec::with_capacity(amplitudes.len() * 2);
        next.extend(amplitudes.iter().map(|c| c * a0));
        next.extend(amplitudes.iter().map(|c| c * a1));
        amplitudes = next;
    }
    Ok(StateVector::new_unchecked(amplitudes, input.len()))
}

/// Probability mass per zero-bit count, `by_zero_count[k]` being the total
/// probability of basis states with exactly `k` zero bits.
#[derive(Debug, Clone, PartialEq)]
pub struct ZeroGroupSummary {
    by_zero_count: Vec<f64>,
}

impl ZeroGroupSummary {
    /// Qubit count; masses cover zero counts `0..=n`.
    pub fn n(&self) -> usize {
        self.by_zero_count.len() - 1
    }

    /// Mass of the `k`-zeros group.
    pub fn mass(&self, zeros: usize) -> f64 {
        self.by_zero_count[zeros]
    }

    /// Masses indexed by zero count, `0..=n`.
    pub fn masses(&self) -> &[f64] {
        &self.by_zero_count
    }
}

/// Groups a probability vector over `2^n` basis states by zero-bit count.
pub fn zero_group_probabilities(probs: &[f64], n: usize) -> Result<ZeroGroupSummary> {
    if n == 0 || probs.len() != 1 << n {
        return Err(Error::LengthMismatch {
            expected: 1 << n,
            actual: probs.len(),
        });
    }
    if probs.iter().any(|p| !p.is_finite() || *p < 0.0) {
        return Err(Error::InvalidProbabilities {
            reason: "entries must be finite and non-negative".into(),
        });
    }
    let total = kahan_sum(probs.iter().copied());
    if (total - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidProbabilities {
            reason: format!("entries sum to {total}, expected 1"),
        });
    }
    let mut by_zero_count = vec![0.0; n + 1];
    for (b, &p) in probs.iter().enumerate() {
        let zeros = n - b.count_ones() as usize;
        by_zero_count[zeros] += p;
    }
    Ok(ZeroGroupSummary { by_zero_count })
}

/// Euclidean distance between two raw frames, in domain units. Distances
/// are deliberately reported on raw readings, never on the normalized
/// vectors.
pub fn euclidean_distance(a: &RawFrame, b: &RawFrame) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch {
            expected: a.len(),
            actual: b.len(),
        });
    }
    let sum_sq = a
        .readings()
        .iter()
        .zip(b.readings())
        .map(|(&u, &v)| {
            let d = (u - v) as f64;
            d * d
        })
        .sum::<f64>();
    Ok(sum_sq.sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sensor::{normalize_frame, RangePolicy, SensorConfig};
    use crate::state::{product_state, RotationAngle};
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn rgb(frame: [i64; 3]) -> NormalizedInput {
        normalize_frame(
            &RawFrame::new(frame.to_vec()),
            &SensorConfig::default_rgb(),
            RangePolicy::Reject,
        )
        .unwrap()
    }

    fn rgb_target(frame: [i64; 3]) -> QueryTarget {
        QueryTarget::from(rgb(frame))
    }

    #[test]
    fn query_reference_row_near_target() {
        let state = apply_query(&rgb([102, 18, 124]), &rgb_target([132, 35, 107]), 1.0).unwrap();
        let probs = state.probabilities();
        assert_abs_diff_eq!(probs[0], 0.945, epsilon = 2e-3);
    }

    #[test]
    fn query_reference_row_mid_distance() {
        let state = apply_query(&rgb([36, 101, 84]), &rgb_target([132, 35, 107]), 1.0).unwrap();
        let probs = state.probabilities();
        assert_abs_diff_eq!(probs[0], 0.570, epsilon = 2e-3);
        assert_abs_diff_eq!(probs[1], 0.257, epsilon = 2e-3);
    }

    #[test]
    fn query_self_match_is_certain() {
        let input = rgb([84, 48, 38]);
        let target = QueryTarget::from(input.clone());
        let probs = apply_query(&input, &target, 1.0).unwrap().probabilities();
        assert_abs_diff_eq!(probs[0], 1.0, epsilon = 1e-12);
    }

    #[test]
    fn query_opposite_state() {
        // |x_i - t_i| = 1 on every channel puts all mass on |1...1>.
        let input = NormalizedInput::new(vec![1.0, 0.0, 1.0]).unwrap();
        let target = QueryTarget::new(vec![0.0, 1.0, 0.0]).unwrap();
        let state = apply_query(&input, &target, 1.0).unwrap();
        let probs = state.probabilities();
        assert_abs_diff_eq!(probs[7], 1.0, epsilon = 1e-12);
        // The middle qubit rotated by -pi, leaving a negative amplitude;
        // only the square is observable.
        assert!(state.amplitudes()[7] < 0.0);
    }

    #[test]
    fn query_dimension_mismatch() {
        let input = NormalizedInput::new(vec![0.5, 0.5]).unwrap();
        let target = QueryTarget::new(vec![0.5]).unwrap();
        assert!(apply_query(&input, &target, 1.0).is_err());
    }

    #[test]
    fn query_matches_gate_oracle() {
        let input = rgb([36, 101, 84]);
        let target = rgb_target([132, 35, 107]);
        let closed = apply_query(&input, &target, 1.0).unwrap();

        let mut state = product_state(&input, 1.0).unwrap();
        for (i, &t) in target.values().iter().enumerate() {
            state = state
                .apply_ry(i + 1, RotationAngle::query(t, 1.0).unwrap())
                .unwrap();
        }
        for (a, b) in closed.amplitudes().iter().zip(state.amplitudes()) {
            assert_abs_diff_eq!(*a, *b, epsilon = 1e-10);
        }
    }

    #[test]
    fn zero_groups_of_point_mass() {
        let mut probs = vec![0.0; 8];
        probs[0] = 1.0;
        let groups = zero_group_probabilities(&probs, 3).unwrap();
        assert_eq!(groups.masses(), &[0.0, 0.0, 0.0, 1.0]);
        assert_eq!(groups.n(), 3);
    }

    #[test]
    fn zero_groups_of_reference_state() {
        let probs = product_state(&NormalizedInput::new(vec![0.8, 0.3, 0.7]).unwrap(), 1.0)
            .unwrap()
            .probabilities();
        let groups = zero_group_probabilities(&probs, 3).unwrap();
        assert_abs_diff_eq!(groups.mass(3), 0.0156, epsilon = 1e-3);
        assert_abs_diff_eq!(groups.mass(2), 0.2123, epsilon = 1e-3);
        assert_abs_diff_eq!(groups.mass(1), 0.6240, epsilon = 1e-3);
        assert_abs_diff_eq!(groups.mass(0), 0.1482, epsilon = 1e-3);
    }

    #[test]
    fn zero_groups_of_uniform_distribution() {
        let probs = vec![0.125; 8];
        let groups = zero_group_probabilities(&probs, 3).unwrap();
        assert_eq!(groups.masses(), &[0.125, 0.375, 0.375, 0.125]);
    }

    #[test]
    fn zero_groups_validate_input() {
        assert!(zero_group_probabilities(&[0.5, 0.5], 3).is_err());
        assert!(zero_group_probabilities(&[0.9, 0.2], 1).is_err());
        assert!(zero_group_probabilities(&[-0.1, 1.1], 1).is_err());
    }

    #[test]
    fn distance_reference_values() {
        let a = RawFrame::new(vec![102, 18, 124]);
        let b = RawFrame::new(vec![132, 35, 107]);
        assert_abs_diff_eq!(euclidean_distance(&a, &b).unwrap(), 38.44, epsilon = 1e-2);
        assert_eq!(euclidean_distance(&a, &a).unwrap(), 0.0);

        let black = RawFrame::new(vec![0, 0, 0]);
        let white = RawFrame::new(vec![255, 255, 255]);
        assert_abs_diff_eq!(
            euclidean_distance(&black, &white).unwrap(),
            441.67,
            epsilon = 1e-2
        );
        assert!(euclidean_distance(&a, &RawFrame::new(vec![1, 2])).is_err());
    }

    fn unit_vec(n: usize) -> impl Strategy<Value = Vec<f64>> {
        proptest::collection::vec(0.0..=1.0f64, n)
    }

    proptest! {
        #[test]
        fn self_match_probability_is_one(values in (1usize..=6).prop_flat_map(unit_vec)) {
            let input = NormalizedInput::new(values).unwrap();
            let target = QueryTarget::from(input.clone());
            let probs = apply_query(&input, &target, 1.0).unwrap().probabilities();
            prop_assert!((probs[0] - 1.0).abs() <= 1e-12);
        }

        #[test]
        fn zero_state_probability_separates(
            pairs in proptest::collection::vec((0.0..=1.0f64, 0.0..=1.0f64), 1..=6),
            tau in 1.0..4.0f64,
        ) {
            let (xs, ts): (Vec<f64>, Vec<f64>) = pairs.into_iter().unzip();
            let input = NormalizedInput::new(xs.clone()).unwrap();
            let target = QueryTarget::new(ts.clone()).unwrap();
            let p0 = apply_query(&input, &target, tau).unwrap().probabilities()[0];
            let expected: f64 = xs
                .iter()
                .zip(&ts)
                .map(|(x, t)| (PI * (x - t) / (2.0 * tau)).cos().powi(2))
                .product();
            prop_assert!((p0 - expected).abs() <= 1e-12);
        }

        #[test]
        fn group_masses_sum_to_one(values in (1usize..=6).prop_flat_map(unit_vec), shift in 0.0..=1.0f64) {
            let n = values.len();
            let input = NormalizedInput::new(values).unwrap();
            let target = QueryTarget::new(vec![shift; n]).unwrap();
            let probs = apply_query(&input, &target, 1.0).unwrap().probabilities();
            let groups = zero_group_probabilities(&probs, n).unwrap();
            let total: f64 = groups.masses().iter().sum();
            prop_assert!((total - 1.0).abs() <= 1e-12);
        }

        #[test]
        fn groups_depend_only_on_differences(
            diffs in proptest::collection::vec(-0.5..0.5f64, 1..=5),
            base_a in 0.0..=0.5f64,
            base_b in 0.0..=0.5f64,
        ) {
            // Two (input, target) pairs with identical differences must
            // produce identical grouped masses.
            let n = diffs.len();
            let make = |base: f64| {
                let xs: Vec<f64> = diffs.iter().map(|d| base + d.max(0.0)).collect();
                let ts: Vec<f64> = diffs.iter().map(|d| base + (-d).max(0.0)).collect();
                let input = NormalizedInput::new(xs).unwrap();
                let target = QueryTarget::new(ts).unwrap();
                zero_group_probabilities(
                    &apply_query(&input, &target, 1.0).unwrap().probabilities(),
                    n,
                )
                .unwrap()
            };
            let ga = make(base_a);
            let gb = make(base_b);
            for (a, b) in ga.masses().iter().zip(gb.masses()) {
                prop_assert!((a - b).abs() <= 1e-12);
            }
        }
    }

    #[test]
    fn zero_state_probability_decays_with_each_difference() {
        // With other channels fixed, growing |x_i - t_i| never raises the
        // probability of the all-zeros outcome.
        let target = QueryTarget::new(vec![0.5, 0.5, 0.5]).unwrap();
        let mut last = f64::INFINITY;
        for step in 0..=10 {
            let x = 0.5 + 0.05 * step as f64;
            let input = NormalizedInput::new(vec![x, 0.2, 0.9]).unwrap();
            let p0 = apply_query(&input, &target, 1.0).unwrap().probabilities()[0];
            assert!(p0 <= last + 1e-15);
            last = p0;
        }
    }
}
