//! Classification of `(N, F)` points: violation, separability and the gap between.

use alloc::vec::Vec;

use crate::chsh::{chsh_closed_form, violation_threshold, LOCAL_BOUND};
use crate::error::{Error, Result};
use crate::qudit::{check_noise, is_separable_family, separability_boundary};
use crate::sequential::success_probability;

/// Margin above 2 required to call a CHSH value a violation.
pub const VIOLATION_MARGIN: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanRecord {
    pub n: usize,
    pub f: f64,
    pub s: f64,
    pub violates: bool,
    pub threshold: f64,
    pub separable: bool,
    /// Entangled, yet the post-selected CHSH test does not fire:
    /// `N/(N+c) ≤ F < N/(N+1)`.
    pub gap: bool,
    pub success_prob: f64,
}

impl ScanRecord {
    pub fn evaluate(n: usize, f: f64) -> Result<Self> {
        let s = chsh_closed_form(n, f)?;
        let threshold = violation_threshold(n)?;
        let separable = is_separable_family(n, f)?;
        Ok(ScanRecord {
            n,
            f,
            s,
            violates: s > LOCAL_BOUND + VIOLATION_MARGIN,
            threshold,
            separable,
            gap: threshold <= f && f < separability_boundary(n),
            success_prob: success_probability(n, f)?,
        })
    }

    /// `violates ⇔ S > 2 + margin` and `gap ⇒ ¬violates ∧ ¬separable`.
    pub fn is_consistent(&self) -> bool {
        let v = self.violates == (self.s > LOCAL_BOUND + VIOLATION_MARGIN);
        let g = !self.gap || (!self.violates && !self.separable);
        v && g
    }
}

/// `[N/(N+c), N/(N+1))`: entangled states the CHSH test misses.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GapInterval {
    pub n: usize,
    pub lower: f64,
    pub upper: f64,
}

impl GapInterval {
    pub fn new(n: usize) -> Result<Self> {
        Ok(GapInterval {
            n,
            lower: violation_threshold(n)?,
            upper: separability_boundary(n),
        })
    }

    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }

    pub fn contains(&self, f: f64) -> bool {
        self.lower <= f && f < self.upper
    }
}

/// `min, min+step, …` up to `max`, computed by multiplication so points do not drift.
pub fn noise_grid(min: f64, max: f64, step: f64) -> Result<Vec<f64>> {
    check_noise(min)?;
    check_noise(max)?;
    if !(step > 0.0) || !step.is_finite() {
        return Err(Error::Domain {
            name: "step",
            value: step,
        });
    }
    if max < min {
        return Err(Error::Domain {
            name: "noise maximum",
            value: max,
        });
    }
    let count = libm::floor((max - min) / step + 1e-9) as usize;
    Ok((0..=count)
        .map(|k| (min + k as f64 * step).min(max))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use core::f64::consts::SQRT_2;

    #[test]
    fn robust_point() {
        let r = ScanRecord::evaluate(100, 0.9).unwrap();
        assert!((r.s - 2.3969).abs() < 1e-4);
        assert!(r.violates && !r.gap && !r.separable);
    }

    #[test]
    fn gap_point_at_two() {
        let r = ScanRecord::evaluate(2, 0.5).unwrap();
        assert!(!r.violates && !r.separable && r.gap);
        assert!(r.is_consistent());
    }

    #[test]
    fn noiseless_points() {
        for n in [2, 7, 64] {
            let r = ScanRecord::evaluate(n, 0.0).unwrap();
            assert!((r.s - 2.0 * SQRT_2).abs() < 1e-15);
            assert!(r.violates && !r.gap);
        }
    }

    #[test]
    fn gap_interval_four() {
        let g = GapInterval::new(4).unwrap();
        // 4/(4 + 2/(√2−1)), evaluated independently
        assert!((g.lower - 0.453_081_839_321_973).abs() < 1e-12);
        assert_eq!(g.upper, 0.8);
        assert!((g.width() - 0.3469).abs() < 1e-4);
    }

    #[test]
    fn grid_endpoints() {
        let g = noise_grid(0.0, 1.0, 0.1).unwrap();
        assert_eq!(g.len(), 11);
        assert_eq!(g[0], 0.0);
        assert_eq!(g[10], 1.0);
        assert!((g[3] - 0.3).abs() < 1e-15);
        assert!(noise_grid(0.0, 1.0, 0.0).is_err());
        assert!(noise_grid(0.5, 0.2, 0.1).is_err());
        assert!(noise_grid(0.0, 1.2, 0.1).is_err());
    }
}
