//! Robustness of nonlocal correlations for noisy maximally entangled qudits.
//!
//! Two N-level systems share `ρ_N(F) = (1−F)|Ψ_N⟩⟨Ψ_N| + F·I/N²`. Each side first
//! projects onto a two-dimensional subspace, and the surviving two-qubit state is
//! tested against the CHSH inequality. Since conditioning a local hidden-variable
//! model on first-stage outcomes leaves a local hidden-variable model, a CHSH
//! violation of the conditioned statistics certifies nonlocality of the original
//! state. The violation survives whenever `F < N/(N+c)` with `c = 2/(√2−1)`.
//!
//! Modules:
//!
//! - [`matrix`]: dense complex square matrices, Kronecker products and a Hermitian
//!   eigenvalue solver.
//! - [`qudit`]: the state family, its construction and validation.
//! - [`sequential`]: first-stage projections, post-selection and the two-stage
//!   joint distribution.
//! - [`chsh`]: dichotomic observables, correlators and the violation threshold.
//! - [`behavior`] and [`lhv`]: behavior tables and local-polytope membership.
//! - [`scan`]: classification of `(N, F)` grid points.
//!
//! The crate is `no_std` and only needs `alloc`.

#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod behavior;
pub mod chsh;
mod error;
pub mod lhv;
pub mod matrix;
pub mod qudit;
pub mod scan;
pub mod sequential;
mod simplex;

pub use behavior::BehaviorTable;
pub use chsh::{ChshSettings, DichotomicObservable, CHSH_C};
pub use error::{Error, Result};
pub use lhv::{DeterministicStrategy, Facet, LocalityVerdict};
pub use matrix::CMatrix;
pub use qudit::{DensityMatrix, PureState, ValidationReport};
pub use scan::ScanRecord;
pub use sequential::{
    NoisyFamily, ProductExpectation, SequentialJointDistribution, SubspaceProjector,
};

pub use num_complex::Complex64;

/// Outcome label for a dichotomic measurement: `+1` at index 0, `−1` at index 1.
#[inline]
pub fn outcome_sign(index: usize) -> f64 {
    if index == 0 {
        1.0
    } else {
        -1.0
    }
}
