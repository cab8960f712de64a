//! Monte Carlo runs of the two-stage experiment.
//!
//! Each run draws a setting pair uniformly, then one outcome
//! `(a₁, b₁, a₂, b₂)` from the exact joint distribution by inverse CDF. Only
//! runs landing in the `(in, in)` branch enter the CHSH estimate.

use nonlocal_core::chsh::chsh_sign;
use nonlocal_core::sequential::{SequentialJointDistribution, IN};
use nonlocal_core::{outcome_sign, BehaviorTable};
use rand::Rng;
use rand_chacha::ChaCha20Rng;

pub const PRNG_NAME: &str = "ChaCha20Rng";

pub fn seeded_rng(seed: u64) -> ChaCha20Rng {
    rand::SeedableRng::seed_from_u64(seed)
}

/// Raw counts per `(x, y, a₁, b₁, a₂, b₂)`, same layout as the joint distribution.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleCounts {
    pub counts: [u64; 64],
    pub total: u64,
}

pub fn sample_runs(
    joint: &SequentialJointDistribution,
    count: u64,
    rng: &mut impl Rng,
) -> SampleCounts {
    let probs = joint.as_array();
    let mut cdf = [0.0; 64];
    for block in 0..4 {
        let mut acc = 0.0;
        for k in 0..16 {
            acc += probs[16 * block + k];
            cdf[16 * block + k] = acc;
        }
    }
    let mut counts = [0u64; 64];
    for _ in 0..count {
        let block = rng.gen_range(0..4usize);
        let u: f64 = rng.gen::<f64>() * cdf[16 * block + 15];
        let row = &cdf[16 * block..16 * block + 16];
        // first outcome whose cumulative weight exceeds u, skipping zero-weight cells
        let k = row.iter().position(|&c| u < c).unwrap_or(15);
        counts[16 * block + k] += 1;
    }
    SampleCounts {
        counts,
        total: count,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChshEstimate {
    /// Runs per setting pair that landed in the `(in, in)` branch.
    pub branch_runs: [u64; 4],
    /// Empirical conditioned table; unsampled setting pairs are all zero.
    pub table: BehaviorTable,
    pub correlators: [Option<f64>; 4],
    /// `None` when some setting pair has no `(in, in)` runs.
    pub s: Option<f64>,
    pub std_error: Option<f64>,
}

impl SampleCounts {
    fn get(&self, x: usize, y: usize, a1: usize, b1: usize, a2: usize, b2: usize) -> u64 {
        self.counts[((((x * 2 + y) * 2 + a1) * 2 + b1) * 2 + a2) * 2 + b2]
    }

    /// CHSH estimate from the `(in, in)` runs. The standard error propagates the
    /// binomial variance `(1 − E²)/n` of each correlator.
    pub fn chsh_in_in(&self) -> ChshEstimate {
        let mut p = [0.0; 16];
        let mut branch_runs = [0u64; 4];
        let mut correlators = [None; 4];
        let mut s = 0.0;
        let mut var = 0.0;
        let mut complete = true;
        for x in 0..2 {
            for y in 0..2 {
                let n: u64 = (0..4).map(|k| self.get(x, y, IN, IN, k / 2, k % 2)).sum();
                branch_runs[2 * x + y] = n;
                if n == 0 {
                    complete = false;
                    continue;
                }
                let mut e = 0.0;
                for a in 0..2 {
                    for b in 0..2 {
                        let freq = self.get(x, y, IN, IN, a, b) as f64 / n as f64;
                        p[BehaviorTable::index(x, y, a, b)] = freq;
                        e += outcome_sign(a) * outcome_sign(b) * freq;
                    }
                }
                correlators[2 * x + y] = Some(e);
                s += chsh_sign(x, y) * e;
                var += (1.0 - e * e) / n as f64;
            }
        }
        ChshEstimate {
            branch_runs,
            table: BehaviorTable::from_array(p),
            correlators,
            s: complete.then_some(s),
            std_error: complete.then(|| var.sqrt()),
        }
    }
}
