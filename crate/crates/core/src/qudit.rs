//! States of two N-level systems: the maximally entangled vector and its mixture
//! with white noise.
//!
//! Basis indices are 0-based and the joint index of `|m_A⟩|m_B⟩` is `m_A·N + m_B`.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::matrix::CMatrix;

/// Smallest eigenvalue still accepted as positive semidefinite.
pub const PSD_TOLERANCE: f64 = 1e-10;

pub(crate) fn check_local_dim(n: usize) -> Result<()> {
    if n < 2 {
        return Err(Error::InvalidDimension(n));
    }
    Ok(())
}

pub(crate) fn check_noise(f: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&f) {
        return Err(Error::Domain {
            name: "noise fraction",
            value: f,
        });
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    amplitudes: Vec<Complex64>,
}

impl PureState {
    /// Fails unless the amplitudes have unit norm within `1e−12`.
    pub fn new(amplitudes: Vec<Complex64>) -> Result<Self> {
        let norm = libm::sqrt(amplitudes.iter().map(|z| z.norm_sqr()).sum());
        if amplitudes.is_empty() || (norm - 1.0).abs() > 1e-12 {
            return Err(Error::Domain {
                name: "state norm",
                value: norm,
            });
        }
        Ok(PureState { amplitudes })
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn norm(&self) -> f64 {
        libm::sqrt(self.amplitudes.iter().map(|z| z.norm_sqr()).sum())
    }

    pub fn to_density(&self) -> DensityMatrix {
        DensityMatrix::new_unchecked(CMatrix::outer(&self.amplitudes))
    }
}

/// `|Ψ_N⟩ = N^{−1/2} Σ_m |m⟩|m⟩` on `N²` dimensions.
pub fn max_entangled(n: usize) -> Result<PureState> {
    check_local_dim(n)?;
    let amp = 1.0 / libm::sqrt(n as f64);
    let mut amplitudes = vec![Complex64::new(0.0, 0.0); n * n];
    for m in 0..n {
        amplitudes[m * n + m] = Complex64::new(amp, 0.0);
    }
    Ok(PureState { amplitudes })
}

#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    matrix: CMatrix,
}

impl DensityMatrix {
    /// Wraps a matrix without checking it; run [`validate`] when in doubt.
    pub fn new_unchecked(matrix: CMatrix) -> Self {
        DensityMatrix { matrix }
    }

    /// Wraps a matrix after checking Hermiticity and trace against `tol` and
    /// positivity against [`PSD_TOLERANCE`].
    pub fn try_new(matrix: CMatrix, tol: f64) -> Result<Self> {
        let report = validate_matrix(&matrix);
        if report.hermiticity_defect > tol {
            return Err(Error::Domain {
                name: "hermiticity defect",
                value: report.hermiticity_defect,
            });
        }
        if report.trace_defect > tol {
            return Err(Error::Domain {
                name: "trace defect",
                value: report.trace_defect,
            });
        }
        if report.min_eigenvalue < -PSD_TOLERANCE {
            return Err(Error::Domain {
                name: "minimum eigenvalue",
                value: report.min_eigenvalue,
            });
        }
        Ok(DensityMatrix { matrix })
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        DensityMatrix {
            matrix: CMatrix::identity(dim).scale(1.0 / dim as f64),
        }
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    pub fn tensor(&self, other: &DensityMatrix) -> DensityMatrix {
        DensityMatrix {
            matrix: self.matrix.kron(&other.matrix),
        }
    }

    /// Largest entrywise difference to another state of the same dimension.
    pub fn max_abs_diff(&self, other: &DensityMatrix) -> Result<f64> {
        self.matrix.max_abs_diff(&other.matrix)
    }

    /// Convex combination `w·self + (1−w)·other`.
    pub fn mix(&self, w: f64, other: &DensityMatrix) -> Result<DensityMatrix> {
        Ok(DensityMatrix {
            matrix: self.matrix.scale(w).add(&other.matrix.scale(1.0 - w))?,
        })
    }
}

/// `ρ_N(F) = (1−F)|Ψ_N⟩⟨Ψ_N| + F·I/N²`.
pub fn noisy_state(n: usize, f: f64) -> Result<DensityMatrix> {
    check_local_dim(n)?;
    check_noise(f)?;
    let d = n * n;
    let pure_weight = (1.0 - f) / n as f64;
    let noise = f / d as f64;
    let matrix = CMatrix::from_fn(d, |i, j| {
        let mut v = 0.0;
        // |Ψ_N⟩⟨Ψ_N| has 1/N exactly where both indices are of the form m·N+m
        if i % (n + 1) == 0 && j % (n + 1) == 0 {
            v += pure_weight;
        }
        if i == j {
            v += noise;
        }
        Complex64::new(v, 0.0)
    });
    Ok(DensityMatrix { matrix })
}

/// Separability of `ρ_N(F)`: true iff `F ≥ N/(N+1)`.
///
/// Only valid for this family; it is not a separability test for arbitrary states.
pub fn is_separable_family(n: usize, f: f64) -> Result<bool> {
    check_local_dim(n)?;
    check_noise(f)?;
    Ok(f >= separability_boundary(n))
}

/// `N/(N+1)`.
pub fn separability_boundary(n: usize) -> f64 {
    let n = n as f64;
    n / (n + 1.0)
}

/// Kronecker product of two square operators.
pub fn tensor_product(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kron(b)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ValidationReport {
    pub hermiticity_defect: f64,
    pub trace_defect: f64,
    pub min_eigenvalue: f64,
}

impl ValidationReport {
    pub fn passes(&self, tol: f64) -> bool {
        self.hermiticity_defect <= tol
            && self.trace_defect <= tol
            && self.min_eigenvalue >= -PSD_TOLERANCE
    }
}

pub fn validate(rho: &DensityMatrix) -> ValidationReport {
    validate_matrix(rho.matrix())
}

pub fn validate_matrix(m: &CMatrix) -> ValidationReport {
    let ev = m.eigenvalues_hermitian();
    ValidationReport {
        hermiticity_defect: m.hermiticity_defect(),
        trace_defect: (m.trace() - Complex64::new(1.0, 0.0)).norm(),
        min_eigenvalue: ev.first().copied().unwrap_or(0.0),
    }
}
