//! CHSH observables, correlators and the noise threshold for a violation.

use core::f64::consts::{FRAC_PI_2, FRAC_PI_4, SQRT_2};

use num_complex::Complex64;

use crate::behavior::BehaviorTable;
use crate::error::{Error, Result};
use crate::matrix::CMatrix;
use crate::qudit::{check_local_dim, check_noise, DensityMatrix};
use crate::sequential::{post_selected_closed_form, post_selected_visibility};

/// `c = 2/(√2−1)`, the constant in the violation threshold `N/(N+c)`.
pub const CHSH_C: f64 = 2.0 / (SQRT_2 - 1.0);

/// Quantum maximum of the CHSH expression.
pub const TSIRELSON_BOUND: f64 = 2.0 * SQRT_2;

/// Bound obeyed by every local hidden-variable model.
pub const LOCAL_BOUND: f64 = 2.0;

/// `cos θ·σz + sin θ·σx`, a ±1-valued observable in the x–z plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DichotomicObservable {
    pub theta: f64,
}

impl DichotomicObservable {
    pub fn new(theta: f64) -> Self {
        DichotomicObservable { theta }
    }

    pub fn matrix(&self) -> CMatrix {
        let (s, c) = (libm::sin(self.theta), libm::cos(self.theta));
        CMatrix::from_fn(2, |i, j| {
            Complex64::new(
                match (i, j) {
                    (0, 0) => c,
                    (1, 1) => -c,
                    _ => s,
                },
                0.0,
            )
        })
    }

    /// Eigenprojector `(I ± O)/2`; outcome index 0 is `+1`, 1 is `−1`.
    pub fn eigenprojector(&self, outcome: usize) -> CMatrix {
        let sign = crate::outcome_sign(outcome);
        let (s, c) = (libm::sin(self.theta), libm::cos(self.theta));
        CMatrix::from_fn(2, |i, j| {
            let o = match (i, j) {
                (0, 0) => c,
                (1, 1) => -c,
                _ => s,
            };
            let id = if i == j { 1.0 } else { 0.0 };
            Complex64::new(0.5 * (id + sign * o), 0.0)
        })
    }
}

/// Angles of `A, A′` (Alice, setting 0 and 1) and `B, B′` (Bob).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChshSettings {
    pub theta_a: f64,
    pub theta_a_prime: f64,
    pub theta_b: f64,
    pub theta_b_prime: f64,
}

impl ChshSettings {
    pub fn alice(&self, x: usize) -> DichotomicObservable {
        DichotomicObservable::new(if x == 0 {
            self.theta_a
        } else {
            self.theta_a_prime
        })
    }

    pub fn bob(&self, y: usize) -> DichotomicObservable {
        DichotomicObservable::new(if y == 0 {
            self.theta_b
        } else {
            self.theta_b_prime
        })
    }
}

/// `(0, π/2, π/4, −π/4)`: reaches `2√2` on `|Ψ₂⟩`.
pub fn tsirelson_settings() -> ChshSettings {
    ChshSettings {
        theta_a: 0.0,
        theta_a_prime: FRAC_PI_2,
        theta_b: FRAC_PI_4,
        theta_b_prime: -FRAC_PI_4,
    }
}

/// Sign of the `(x, y)` term in `E(A,B) + E(A,B′) + E(A′,B) − E(A′,B′)`.
pub fn chsh_sign(x: usize, y: usize) -> f64 {
    if x == 1 && y == 1 {
        -1.0
    } else {
        1.0
    }
}

/// `Tr[ρ (A ⊗ B)]` on a two-qubit state.
pub fn correlator(
    rho: &DensityMatrix,
    a: DichotomicObservable,
    b: DichotomicObservable,
) -> Result<f64> {
    if rho.dim() != 4 {
        return Err(Error::DimensionMismatch {
            expected: 4,
            found: rho.dim(),
        });
    }
    let ab = a.matrix().kron(&b.matrix());
    Ok(rho.matrix().mul(&ab)?.trace().re)
}

pub fn chsh_value(rho: &DensityMatrix, s: &ChshSettings) -> Result<f64> {
    let mut total = 0.0;
    for x in 0..2 {
        for y in 0..2 {
            total += chsh_sign(x, y) * correlator(rho, s.alice(x), s.bob(y))?;
        }
    }
    Ok(total)
}

/// `2√2 · N(1−F)/(N(1−F)+2F)`: CHSH value of the post-selected state at the
/// Tsirelson settings.
pub fn chsh_closed_form(n: usize, f: f64) -> Result<f64> {
    Ok(TSIRELSON_BOUND * post_selected_visibility(n, f)?)
}

/// `N/(N+c)`: the post-selected state violates CHSH iff `F` is below this.
pub fn violation_threshold(n: usize) -> Result<f64> {
    check_local_dim(n)?;
    let n = n as f64;
    Ok(n / (n + CHSH_C))
}

/// Second-stage behavior of the post-selected state at the Tsirelson settings.
pub fn post_selected_table(n: usize, f: f64) -> Result<BehaviorTable> {
    BehaviorTable::from_state(&post_selected_closed_form(n, f)?, &tsirelson_settings())
}

/// Root of `chsh_closed_form(n, F) = 2` in `F`, by bisection on `[0, 1]`.
///
/// Independent of [`violation_threshold`]; the two are compared in reports.
pub fn bisect_violation_root(n: usize, tol: f64) -> Result<f64> {
    check_local_dim(n)?;
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    // S(0) = 2√2 > 2 and S(1) = 0 < 2
    for _ in 0..200 {
        if hi - lo <= tol {
            break;
        }
        let mid = 0.5 * (lo + hi);
        check_noise(mid)?;
        if chsh_closed_form(n, mid)? > LOCAL_BOUND {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}
