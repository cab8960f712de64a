//! Membership in the local polytope of the two-setting, two-outcome scenario.
//!
//! A behavior admits a local hidden-variable model iff it is a convex mixture
//! of the 16 deterministic strategies. [`is_local_lp`] decides that directly by
//! linear-programming feasibility and returns the mixture as a certificate.
//! [`is_local_facets`] uses the eight CHSH facets instead, which is only sound
//! for no-signaling tables.

use alloc::vec::Vec;
use core::fmt;

use crate::behavior::{BehaviorTable, MALFORMED_TOLERANCE};
use crate::chsh::LOCAL_BOUND;
use crate::error::{Error, Result};
use crate::simplex::phase_one;

pub const DEFAULT_TOLERANCE: f64 = 1e-9;

/// Signaling defect above which the facet test refuses to answer.
pub const NO_SIGNALING_TOLERANCE: f64 = 1e-8;

/// One outcome index (0 for `+1`, 1 for `−1`) per setting and party.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct DeterministicStrategy {
    pub alice: [usize; 2],
    pub bob: [usize; 2],
}

impl DeterministicStrategy {
    /// All 16 strategies, ordered by `(a(0), a(1), b(0), b(1))`.
    pub fn all() -> [DeterministicStrategy; 16] {
        core::array::from_fn(|k| DeterministicStrategy {
            alice: [(k >> 3) & 1, (k >> 2) & 1],
            bob: [(k >> 1) & 1, k & 1],
        })
    }

    pub fn table(&self) -> BehaviorTable {
        let mut p = [0.0; 16];
        for x in 0..2 {
            for y in 0..2 {
                p[BehaviorTable::index(x, y, self.alice[x], self.bob[y])] = 1.0;
            }
        }
        BehaviorTable::from_array(p)
    }
}

/// Behaviors of the 16 deterministic strategies, in [`DeterministicStrategy::all`] order.
pub fn local_vertices() -> [BehaviorTable; 16] {
    DeterministicStrategy::all().map(|s| s.table())
}

/// A CHSH facet: `sign · Σ ±E(x, y)` with the single minus at `minus_at`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Facet {
    pub minus_at: (usize, usize),
    pub negated: bool,
}

impl Facet {
    /// The eight facets; index 3 is the usual `E₀₀ + E₀₁ + E₁₀ − E₁₁`.
    pub fn all() -> [Facet; 8] {
        core::array::from_fn(|k| Facet {
            minus_at: ((k % 4) / 2, k % 2),
            negated: k >= 4,
        })
    }

    pub fn value(&self, t: &BehaviorTable) -> f64 {
        let mut s = 0.0;
        for x in 0..2 {
            for y in 0..2 {
                let e = t.correlator(x, y);
                s += if (x, y) == self.minus_at { -e } else { e };
            }
        }
        if self.negated {
            -s
        } else {
            s
        }
    }
}

impl fmt::Display for Facet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut terms = [""; 4];
        for (k, term) in terms.iter_mut().enumerate() {
            let minus = (k / 2, k % 2) == self.minus_at;
            *term = if minus != self.negated { "-" } else { "+" };
        }
        write!(
            f,
            "{}E00 {}E01 {}E10 {}E11",
            terms[0], terms[1], terms[2], terms[3]
        )
    }
}

/// The eight CHSH facet values, in [`Facet::all`] order.
pub fn chsh_facets(t: &BehaviorTable) -> [f64; 8] {
    Facet::all().map(|f| f.value(t))
}

fn max_facet(t: &BehaviorTable) -> (Facet, f64) {
    Facet::all().into_iter().map(|f| (f, f.value(t))).fold(
        (Facet::all()[0], f64::NEG_INFINITY),
        |best, cur| {
            if cur.1 > best.1 {
                cur
            } else {
                best
            }
        },
    )
}

#[derive(Debug, Clone, PartialEq)]
pub struct LocalityVerdict {
    pub is_local: bool,
    /// Mixture weights over [`local_vertices`]; present iff local.
    pub weights: Option<[f64; 16]>,
    pub max_facet_value: f64,
    /// The largest facet; present iff not local.
    pub violated_facet: Option<Facet>,
    /// Largest entrywise gap between the table and the best mixture found.
    pub residual: f64,
}

/// Linear-programming test: is `t` within `tol` (entrywise) of a convex
/// mixture of deterministic strategies?
pub fn is_local_lp(t: &BehaviorTable, tol: f64) -> Result<LocalityVerdict> {
    t.check_normalized(MALFORMED_TOLERANCE)?;
    let vertices = local_vertices();
    // 16 table entries plus Σ q = 1
    let mut a: Vec<Vec<f64>> = (0..16)
        .map(|e| vertices.iter().map(|v| v.as_array()[e]).collect())
        .collect();
    a.push(alloc::vec![1.0; 16]);
    let mut b: Vec<f64> = t.as_array().to_vec();
    b.push(1.0);

    let sol = phase_one(&a, &b)?;
    let mut weights = [0.0; 16];
    for (w, x) in weights.iter_mut().zip(&sol.x) {
        *w = x.max(0.0);
    }
    let total: f64 = weights.iter().sum();
    if total > 0.0 {
        for w in &mut weights {
            *w /= total;
        }
    }
    let rebuilt = BehaviorTable::mixture(weights.iter().copied().zip(vertices.iter()));
    let residual = rebuilt.max_abs_diff(t);
    let is_local = residual <= tol;
    let (facet, max_facet_value) = max_facet(t);
    Ok(LocalityVerdict {
        is_local,
        weights: is_local.then_some(weights),
        max_facet_value,
        violated_facet: (!is_local).then_some(facet),
        residual,
    })
}

/// Facet test: all eight CHSH values at most `2 + 1e−9`.
///
/// Fails with [`Error::SignalingTable`] when the table signals, since the CHSH
/// facets only characterize the local polytope inside the no-signaling set.
pub fn is_local_facets(t: &BehaviorTable) -> Result<bool> {
    t.check_normalized(MALFORMED_TOLERANCE)?;
    let defect = t.signaling_defect();
    if defect > NO_SIGNALING_TOLERANCE {
        return Err(Error::SignalingTable(defect));
    }
    Ok(chsh_facets(t)
        .iter()
        .all(|&v| v <= LOCAL_BOUND + DEFAULT_TOLERANCE))
}
