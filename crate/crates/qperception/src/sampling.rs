//! Reproducible projective-measurement simulation.
//!
//! Sampling draws shot outcomes from the multinomial distribution over
//! basis states via inverse-CDF lookup on a cumulative table. The random
//! source is pinned for bit-exact reproducibility across runs and
//! platforms: a ChaCha8 stream seeded with `seed_from_u64`, with uniform
//! variates formed from the top 53 bits of each 64-bit output. Identical
//! `(probs, shots, seed, stream)` therefore always yield identical counts.
//!
//! Parallel batch workloads (e.g. sampled sweeps) give each task its own
//! independent ChaCha stream derived from `(base seed, task index)` so
//! results never depend on scheduling.

use std::fmt::Write as _;

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::state::{bitstring, kahan_sum};

/// Tolerance on the probability sum; looser than construction tolerance so
/// vectors that round-tripped through text formats are still accepted.
const PROB_SUM_TOLERANCE: f64 = 1e-9;

/// Shot counts per basis state from a simulated measurement run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MeasurementHistogram {
    counts: Vec<u64>,
    shots: u64,
    seed: u64,
}

impl MeasurementHistogram {
    /// Count for basis index `b`.
    pub fn count(&self, b: usize) -> u64 {
        self.counts[b]
    }

    /// Counts indexed by basis state, length `2^n`.
    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn shots(&self) -> u64 {
        self.shots
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn n_qubits(&self) -> usize {
        self.counts.len().trailing_zeros() as usize
    }

    /// Relative frequencies `counts / shots`.
    pub fn frequencies(&self) -> Vec<f64> {
        self.counts
            .iter()
            .map(|&c| c as f64 / self.shots as f64)
            .collect()
    }

    /// Text rendering, one `bitstring,count,frequency` line per basis
    /// state with the bitstring printed MSB-first.
    pub fn to_text(&self) -> String {
        let n = self.n_qubits();
        let mut out = String::new();
        for (b, &c) in self.counts.iter().enumerate() {
            let freq = c as f64 / self.shots as f64;
            writeln!(out, "{},{},{}", bitstring(b, n), c, freq).expect("string write");
        }
        out
    }
}

/// Draws `shots` outcomes from `probs` with the documented deterministic
/// generator (stream 0).
pub fn sample(probs: &[f64], shots: u64, seed: u64) -> Result<MeasurementHistogram> {
    sample_with_stream(probs, shots, seed, 0)
}

/// Like [`sample`] but on an explicit ChaCha stream, the per-task seeding
/// scheme for parallel batches.
pub fn sample_with_stream(
    probs: &[f64],
    shots: u64,
    seed: u64,
    stream: u64,
) -> Result<MeasurementHistogram> {
    validate_probabilities(probs)?;
    if shots == 0 {
        return Err(Error::ZeroShots);
    }

    let mut cdf = Vec::with_capacity(probs.len());
    let mut acc = 0.0;
    for &p in probs {
        acc += p;
        cdf.push(acc);
    }
    // Guard the top of the table so u < 1 always lands on a valid index.
    if let Some(last) = cdf.last_mut() {
        *last = last.max(1.0);
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    let mut counts = vec![0u64; probs.len()];
    for _ in 0..shots {
        let u = unit_f64(&mut rng);
        let idx = cdf.partition_point(|&c| c <= u).min(probs.len() - 1);
        counts[idx] += 1;
    }
    Ok(MeasurementHistogram {
        counts,
        shots,
        seed,
    })
}

/// Uniform variate in `[0, 1)` from the top 53 bits of one u64 draw.
fn unit_f64(rng: &mut ChaCha8Rng) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

fn validate_probabilities(probs: &[f64]) -> Result<()> {
    if probs.len() < 2 || !probs.len().is_power_of_two() {
        return Err(Error::NotPowerOfTwo { len: probs.len() });
    }
    if probs.iter().any(|p| !p.is_finite() || *p < 0.0) {
        return Err(Error::InvalidProbabilities {
            reason: "entries must be finite and non-negative".into(),
        });
    }
    let total = kahan_sum(probs.iter().copied());
    if (total - 1.0).abs() > PROB_SUM_TOLERANCE {
        return Err(Error::InvalidProbabilities {
            reason: format!("entries sum to {total}, expected 1"),
        });
    }
    Ok(())
}
