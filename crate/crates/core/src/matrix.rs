//! Dense complex square matrices.
//!
//! Storage is row-major. Everything here is sized for desk-scale problems
//! (a few thousand entries per side at most), so no blocking or BLAS.

use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Index, IndexMut};

use num_complex::Complex64;

use crate::error::{Error, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

#[derive(Debug, Clone, PartialEq)]
pub struct CMatrix {
    dim: usize,
    data: Vec<Complex64>,
}

impl CMatrix {
    pub fn zeros(dim: usize) -> Self {
        CMatrix {
            dim,
            data: vec![ZERO; dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m[(i, i)] = ONE;
        }
        m
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut data = Vec::with_capacity(dim * dim);
        for i in 0..dim {
            for j in 0..dim {
                data.push(f(i, j));
            }
        }
        CMatrix { dim, data }
    }

    /// Builds from real row-major entries.
    pub fn from_real(dim: usize, entries: &[f64]) -> Result<Self> {
        if entries.len() != dim * dim {
            return Err(Error::DimensionMismatch {
                expected: dim * dim,
                found: entries.len(),
            });
        }
        Ok(Self::from_fn(dim, |i, j| {
            Complex64::new(entries[i * dim + j], 0.0)
        }))
    }

    /// `|v⟩⟨v|`.
    pub fn outer(v: &[Complex64]) -> Self {
        Self::from_fn(v.len(), |i, j| v[i] * v[j].conj())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|i| self[(i, i)]).sum()
    }

    pub fn dagger(&self) -> Self {
        Self::from_fn(self.dim, |i, j| self[(j, i)].conj())
    }

    pub fn scale(&self, s: f64) -> Self {
        CMatrix {
            dim: self.dim,
            data: self.data.iter().map(|z| z * s).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        Ok(CMatrix {
            dim: self.dim,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a + b)
                .collect(),
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scale(-1.0))
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        let n = self.dim;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self[(i, k)];
                if a == ZERO {
                    continue;
                }
                for j in 0..n {
                    out.data[i * n + j] += a * other.data[k * n + j];
                }
            }
        }
        Ok(out)
    }

    /// Kronecker product; the left factor indexes the slow (major) position.
    pub fn kron(&self, other: &Self) -> Self {
        let (m, n) = (self.dim, other.dim);
        Self::from_fn(m * n, |r, c| self[(r / n, c / n)] * other[(r % n, c % n)])
    }

    /// Largest entrywise `|A − A†|`.
    pub fn hermiticity_defect(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.dim {
            for j in i..self.dim {
                worst = worst.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        worst
    }

    /// Largest entrywise `|A − B|`.
    pub fn max_abs_diff(&self, other: &Self) -> Result<f64> {
        self.check_same(other)?;
        Ok(self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max))
    }

    /// Restriction to the rows and columns listed in `keep`, in that order.
    pub fn compress(&self, keep: &[usize]) -> Self {
        Self::from_fn(keep.len(), |i, j| self[(keep[i], keep[j])])
    }

    /// Eigenvalues of the Hermitian part, ascending.
    ///
    /// The `n×n` Hermitian matrix `H = X + iY` is embedded as the real symmetric
    /// `[[X, −Y], [Y, X]]`, whose spectrum is that of `H` with every eigenvalue
    /// doubled; cyclic Jacobi diagonalizes the embedding.
    pub fn eigenvalues_hermitian(&self) -> Vec<f64> {
        let n = self.dim;
        let m = 2 * n;
        let mut a = vec![0.0; m * m];
        for i in 0..n {
            for j in 0..n {
                // symmetrize so a slightly non-Hermitian input still yields real output
                let h = (self[(i, j)] + self[(j, i)].conj()) * 0.5;
                a[i * m + j] = h.re;
                a[(i + n) * m + (j + n)] = h.re;
                a[i * m + (j + n)] = -h.im;
                a[(i + n) * m + j] = h.im;
            }
        }
        let mut doubled = jacobi_symmetric_eigenvalues(a, m);
        doubled.sort_by(f64::total_cmp);
        doubled.into_iter().step_by(2).collect()
    }

    fn check_same(&self, other: &Self) -> Result<()> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: other.dim,
            });
        }
        Ok(())
    }
}

impl Index<(usize, usize)> for CMatrix {
    type Output = Complex64;

    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.dim + j]
    }
}

impl IndexMut<(usize, usize)> for CMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.dim + j]
    }
}

/// Cyclic Jacobi on a dense row-major symmetric matrix; returns the diagonal.
fn jacobi_symmetric_eigenvalues(mut a: Vec<f64>, n: usize) -> Vec<f64> {
    let frob: f64 = a.iter().map(|x| x * x).sum();
    if frob == 0.0 {
        return vec![0.0; n];
    }
    for _sweep in 0..100 {
        let mut off = 0.0;
        for p in 0..n {
            for q in (p + 1)..n {
                off += a[p * n + q] * a[p * n + q];
            }
        }
        if off <= 1e-34 * frob {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[p * n + q];
                if apq == 0.0 {
                    continue;
                }
                let theta = (a[q * n + q] - a[p * n + p]) / (2.0 * apq);
                let t = if theta.abs() > 1e150 {
                    0.5 / theta
                } else {
                    let t = 1.0 / (theta.abs() + libm::sqrt(theta * theta + 1.0));
                    if theta < 0.0 {
                        -t
                    } else {
                        t
                    }
                };
                let c = 1.0 / libm::sqrt(t * t + 1.0);
                let s = t * c;
                for k in 0..n {
                    let akp = a[k * n + p];
                    let akq = a[k * n + q];
                    a[k * n + p] = c * akp - s * akq;
                    a[k * n + q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p * n + k];
                    let aqk = a[q * n + k];
                    a[p * n + k] = c * apk - s * aqk;
                    a[q * n + k] = s * apk + c * aqk;
                }
            }
        }
    }
    (0..n).map(|i| a[i * n + i]).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sigma_z() -> CMatrix {
        CMatrix::from_real(2, &[1.0, 0.0, 0.0, -1.0]).unwrap()
    }

    #[test]
    fn identity_kron_identity() {
        let i4 = CMatrix::identity(2).kron(&CMatrix::identity(2));
        assert_eq!(i4, CMatrix::identity(4));
    }

    #[test]
    fn zero_kron_anything_is_zero() {
        let z = CMatrix::zeros(2).kron(&sigma_z());
        assert_eq!(z, CMatrix::zeros(4));
    }

    #[test]
    fn sigma_z_kron_sigma_z_diagonal() {
        let zz = sigma_z().kron(&sigma_z());
        let diag: Vec<f64> = (0..4).map(|i| zz[(i, i)].re).collect();
        assert_eq!(diag, [1.0, -1.0, -1.0, 1.0]);
        for i in 0..4 {
            for j in 0..4 {
                if i != j {
                    assert_eq!(zz[(i, j)], ZERO);
                }
            }
        }
    }

    #[test]
    fn kron_places_left_factor_major() {
        // |0⟩⟨1| ⊗ I₂ has ones at (0,2) and (1,3)
        let e01 = CMatrix::from_real(2, &[0.0, 1.0, 0.0, 0.0]).unwrap();
        let k = e01.kron(&CMatrix::identity(2));
        assert_eq!(k[(0, 2)], ONE);
        assert_eq!(k[(1, 3)], ONE);
        assert_eq!(k[(2, 0)], ZERO);
    }

    #[test]
    fn eigenvalues_of_pauli_y() {
        let y = CMatrix::from_fn(2, |i, j| match (i, j) {
            (0, 1) => Complex64::new(0.0, -1.0),
            (1, 0) => Complex64::new(0.0, 1.0),
            _ => ZERO,
        });
        let ev = y.eigenvalues_hermitian();
        assert!((ev[0] + 1.0).abs() < 1e-14 && (ev[1] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn eigenvalues_of_complex_hermitian_3x3() {
        // H = diag(1,2,3) conjugated by a phase-rotation keeps its spectrum
        let theta = 0.7f64;
        let (c, s) = (libm::cos(theta), libm::sin(theta));
        let u = CMatrix::from_fn(3, |i, j| match (i, j) {
            (0, 0) | (1, 1) => Complex64::new(c, 0.0),
            (0, 1) => Complex64::new(0.0, s),
            (1, 0) => Complex64::new(0.0, s),
            (2, 2) => ONE,
            _ => ZERO,
        });
        let d = CMatrix::from_real(3, &[1.0, 0.0, 0.0, 0.0, 2.0, 0.0, 0.0, 0.0, 3.0]).unwrap();
        let h = u.mul(&d).unwrap().mul(&u.dagger()).unwrap();
        assert!(h.hermiticity_defect() < 1e-14);
        let ev = h.eigenvalues_hermitian();
        for (got, want) in ev.iter().zip([1.0, 2.0, 3.0]) {
            assert!((got - want).abs() < 1e-12, "{ev:?}");
        }
    }

    #[test]
    fn trace_and_dagger() {
        let m = CMatrix::from_fn(2, |i, j| Complex64::new((i + j) as f64, i as f64));
        assert_eq!(m.trace(), Complex64::new(2.0, 1.0));
        assert_eq!(m.dagger()[(0, 1)], m[(1, 0)].conj());
    }

    #[test]
    fn mismatched_product_is_error() {
        assert!(CMatrix::zeros(2).mul(&CMatrix::zeros(3)).is_err());
    }
}
