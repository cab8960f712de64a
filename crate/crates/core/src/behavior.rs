//! Behavior tables `P(a, b | x, y)` for two parties, two settings, two outcomes.

use crate::chsh::{chsh_sign, ChshSettings};
use crate::error::{Error, Result};
use crate::outcome_sign;
use crate::qudit::DensityMatrix;

/// Normalization defect above which a table is rejected as malformed.
pub const MALFORMED_TOLERANCE: f64 = 1e-6;

/// Flat 16-entry table in `(x, y, a, b)` lexicographic order; outcome index 0 is
/// `+1` and 1 is `−1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BehaviorTable {
    p: [f64; 16],
}

impl BehaviorTable {
    #[inline]
    pub fn index(x: usize, y: usize, a: usize, b: usize) -> usize {
        ((x * 2 + y) * 2 + a) * 2 + b
    }

    pub fn from_array(p: [f64; 16]) -> Self {
        BehaviorTable { p }
    }

    /// Rejects non-finite entries, entries below `−tol` and setting pairs whose
    /// total is off by more than `tol`.
    pub fn try_from_array(p: [f64; 16], tol: f64) -> Result<Self> {
        let t = BehaviorTable { p };
        t.check_normalized(tol)?;
        Ok(t)
    }

    pub fn uniform() -> Self {
        BehaviorTable { p: [0.25; 16] }
    }

    /// Quantum table of a two-qubit state for the given settings.
    pub fn from_state(rho: &DensityMatrix, settings: &ChshSettings) -> Result<Self> {
        let mut p = [0.0; 16];
        for x in 0..2 {
            for y in 0..2 {
                for a in 0..2 {
                    for b in 0..2 {
                        let effect = settings
                            .alice(x)
                            .eigenprojector(a)
                            .kron(&settings.bob(y).eigenprojector(b));
                        if rho.dim() != effect.dim() {
                            return Err(Error::DimensionMismatch {
                                expected: effect.dim(),
                                found: rho.dim(),
                            });
                        }
                        p[Self::index(x, y, a, b)] = rho.matrix().mul(&effect)?.trace().re;
                    }
                }
            }
        }
        Ok(BehaviorTable { p })
    }

    /// `Σ wᵢ tᵢ`; the weights are used as given.
    pub fn mixture<'a>(parts: impl IntoIterator<Item = (f64, &'a BehaviorTable)>) -> Self {
        let mut p = [0.0; 16];
        for (w, t) in parts {
            for (acc, v) in p.iter_mut().zip(&t.p) {
                *acc += w * v;
            }
        }
        BehaviorTable { p }
    }

    pub fn get(&self, x: usize, y: usize, a: usize, b: usize) -> f64 {
        self.p[Self::index(x, y, a, b)]
    }

    pub fn as_array(&self) -> &[f64; 16] {
        &self.p
    }

    /// `E(x, y) = Σ ab·P(a, b | x, y)`.
    pub fn correlator(&self, x: usize, y: usize) -> f64 {
        let mut e = 0.0;
        for a in 0..2 {
            for b in 0..2 {
                e += outcome_sign(a) * outcome_sign(b) * self.get(x, y, a, b);
            }
        }
        e
    }

    /// `E(0,0) + E(0,1) + E(1,0) − E(1,1)`.
    pub fn chsh(&self) -> f64 {
        let mut s = 0.0;
        for x in 0..2 {
            for y in 0..2 {
                s += chsh_sign(x, y) * self.correlator(x, y);
            }
        }
        s
    }

    pub fn normalization_defect(&self) -> f64 {
        self.p
            .chunks(4)
            .map(|c| (c.iter().sum::<f64>() - 1.0).abs())
            .fold(0.0, f64::max)
    }

    pub fn min_entry(&self) -> f64 {
        self.p.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn alice_marginal(&self, x: usize, y: usize, a: usize) -> f64 {
        self.get(x, y, a, 0) + self.get(x, y, a, 1)
    }

    pub fn bob_marginal(&self, x: usize, y: usize, b: usize) -> f64 {
        self.get(x, y, 0, b) + self.get(x, y, 1, b)
    }

    /// Largest dependence of one party's marginal on the other party's setting.
    pub fn signaling_defect(&self) -> f64 {
        let mut worst = 0.0f64;
        for s in 0..2 {
            for o in 0..2 {
                worst = worst
                    .max((self.alice_marginal(s, 0, o) - self.alice_marginal(s, 1, o)).abs())
                    .max((self.bob_marginal(0, s, o) - self.bob_marginal(1, s, o)).abs());
            }
        }
        worst
    }

    pub fn max_abs_diff(&self, other: &BehaviorTable) -> f64 {
        self.p
            .iter()
            .zip(&other.p)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    pub(crate) fn check_normalized(&self, tol: f64) -> Result<()> {
        if let Some(&v) = self.p.iter().find(|v| !v.is_finite()) {
            return Err(Error::MalformedTable("non-finite entry", v));
        }
        let min = self.min_entry();
        if min < -tol {
            return Err(Error::MalformedTable("negative entry", min));
        }
        let defect = self.normalization_defect();
        if defect > tol {
            return Err(Error::MalformedTable("setting pair not normalized", defect));
        }
        Ok(())
    }
}
