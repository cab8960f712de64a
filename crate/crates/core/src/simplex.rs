//! Phase-one simplex for `A x = b, x ≥ 0` on small dense problems.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};

const PIVOT_EPS: f64 = 1e-12;
const MAX_PIVOTS: usize = 10_000;

#[derive(Debug, Clone)]
pub(crate) struct PhaseOne {
    pub x: Vec<f64>,
    #[cfg_attr(not(test), allow(dead_code))]
    /// Optimal sum of artificial variables; zero iff feasible in exact arithmetic.
    pub infeasibility: f64,
}

/// Minimizes the total artificial slack of `A x + s = b` (rows sign-flipped so
/// `b ≥ 0`), with Bland's rule against cycling.
pub(crate) fn phase_one(a: &[Vec<f64>], b: &[f64]) -> Result<PhaseOne> {
    let m = a.len();
    let n = a.first().map_or(0, Vec::len);
    let width = n + m + 1;
    let rhs = width - 1;
    let mut tab = vec![0.0; m * width];
    for i in 0..m {
        let flip = if b[i] < 0.0 { -1.0 } else { 1.0 };
        for j in 0..n {
            tab[i * width + j] = flip * a[i][j];
        }
        tab[i * width + n + i] = 1.0;
        tab[i * width + rhs] = flip * b[i];
    }
    let mut basis: Vec<usize> = (n..n + m).collect();

    // reduced costs of phase one: c_j − Σ_i tab_ij with c = 1 on artificials
    let mut cost = vec![0.0; width];
    for i in 0..m {
        for j in 0..n {
            cost[j] -= tab[i * width + j];
        }
        cost[rhs] -= tab[i * width + rhs];
    }

    for _ in 0..MAX_PIVOTS {
        let Some(col) = (0..n + m).find(|&j| cost[j] < -PIVOT_EPS) else {
            let mut x = vec![0.0; n];
            for (i, &bv) in basis.iter().enumerate() {
                if bv < n {
                    x[bv] = tab[i * width + rhs];
                }
            }
            return Ok(PhaseOne {
                x,
                infeasibility: -cost[rhs],
            });
        };
        let mut row: Option<(usize, f64)> = None;
        for i in 0..m {
            let aij = tab[i * width + col];
            if aij > PIVOT_EPS {
                let ratio = tab[i * width + rhs] / aij;
                row = match row {
                    Some((r, best)) if ratio > best || (ratio == best && basis[i] > basis[r]) => {
                        Some((r, best))
                    }
                    _ => Some((i, ratio)),
                };
            }
        }
        // phase one is bounded below by zero, so an entering column always has a pivot row
        let Some((r, _)) = row else {
            return Err(Error::SolverFailure);
        };
        pivot(&mut tab, &mut cost, width, r, col);
        basis[r] = col;
    }
    Err(Error::SolverFailure)
}

fn pivot(tab: &mut [f64], cost: &mut [f64], width: usize, r: usize, col: usize) {
    let m = tab.len() / width;
    let inv = 1.0 / tab[r * width + col];
    for j in 0..width {
        tab[r * width + j] *= inv;
    }
    for i in 0..m {
        if i == r {
            continue;
        }
        let factor = tab[i * width + col];
        if factor != 0.0 {
            for j in 0..width {
                tab[i * width + j] -= factor * tab[r * width + j];
            }
        }
    }
    let factor = cost[col];
    for j in 0..width {
        cost[j] -= factor * tab[r * width + j];
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn feasible_system() {
        // x + y = 1, x − y = 0.5
        let a = vec![vec![1.0, 1.0], vec![1.0, -1.0]];
        let sol = phase_one(&a, &[1.0, 0.5]).unwrap();
        assert!(sol.infeasibility.abs() < 1e-14);
        assert!((sol.x[0] - 0.75).abs() < 1e-14 && (sol.x[1] - 0.25).abs() < 1e-14);
    }

    #[test]
    fn infeasible_system() {
        // x + y = 1, x + y = 2
        let a = vec![vec![1.0, 1.0], vec![1.0, 1.0]];
        let sol = phase_one(&a, &[1.0, 2.0]).unwrap();
        assert!((sol.infeasibility - 1.0).abs() < 1e-14);
    }

    #[test]
    fn negative_rhs_needs_positive_variables() {
        // x − y = −1 with x, y ≥ 0: y = x + 1
        let a = vec![vec![1.0, -1.0]];
        let sol = phase_one(&a, &[-1.0]).unwrap();
        assert!(sol.infeasibility.abs() < 1e-14);
        assert!((sol.x[0] - sol.x[1] + 1.0).abs() < 1e-14);
    }

    #[test]
    fn sign_constraint_makes_infeasible() {
        // x = −1 has no nonnegative solution
        let sol = phase_one(&[vec![1.0]], &[-1.0]).unwrap();
        assert!((sol.infeasibility - 1.0).abs() < 1e-14);
    }

    #[test]
    fn redundant_rows() {
        let a = vec![vec![1.0, 2.0], vec![2.0, 4.0], vec![1.0, 1.0]];
        let sol = phase_one(&a, &[2.0, 4.0, 1.5]).unwrap();
        assert!(sol.infeasibility.abs() < 1e-13);
        assert!((sol.x[0] + 2.0 * sol.x[1] - 2.0).abs() < 1e-13);
    }
}
