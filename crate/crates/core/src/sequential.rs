//! Two-stage measurements: a subspace projection on each side followed by a
//! CHSH measurement on the surviving two-dimensional subspace.
//!
//! First-stage outcome index 0 is "in" (the retained subspace) and 1 is "out".
//! Second-stage observables live on the retained subspace; on the complement
//! they are extended as the constant `+1`, so the "out" branches always report
//! `+1` in the second stage.

use alloc::vec::Vec;

use num_complex::Complex64;

use crate::behavior::BehaviorTable;
use crate::chsh::{ChshSettings, DichotomicObservable};
use crate::error::{Error, Result};
use crate::matrix::CMatrix;
use crate::qudit::{check_local_dim, check_noise, max_entangled, DensityMatrix};

/// Branch probabilities below this are treated as exactly zero.
pub const ZERO_BRANCH_THRESHOLD: f64 = 1e-14;

pub const IN: usize = 0;
pub const OUT: usize = 1;

/// Diagonal 0/1 projector onto the span of `retained` basis vectors.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubspaceProjector {
    dim: usize,
    retained: Vec<usize>,
}

impl SubspaceProjector {
    pub fn new(dim: usize, retained: Vec<usize>) -> Result<Self> {
        for (k, &i) in retained.iter().enumerate() {
            if i >= dim || retained[..k].contains(&i) {
                return Err(Error::InvalidProjector { index: i, dim });
            }
        }
        Ok(SubspaceProjector { dim, retained })
    }

    /// Projector onto the first `k` basis vectors.
    pub fn leading(dim: usize, k: usize) -> Result<Self> {
        Self::new(dim, (0..k).collect())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn retained(&self) -> &[usize] {
        &self.retained
    }

    pub fn matrix(&self) -> CMatrix {
        let mut m = CMatrix::zeros(self.dim);
        for &i in &self.retained {
            m[(i, i)] = Complex64::new(1.0, 0.0);
        }
        m
    }

    /// `I − Π`.
    pub fn complement(&self) -> CMatrix {
        let mut m = CMatrix::identity(self.dim);
        for &i in &self.retained {
            m[(i, i)] = Complex64::new(0.0, 0.0);
        }
        m
    }

    /// Places a `k×k` operator on the retained subspace, zero elsewhere.
    fn embed(&self, op: &CMatrix) -> CMatrix {
        let mut m = CMatrix::zeros(self.dim);
        for (r, &i) in self.retained.iter().enumerate() {
            for (s, &j) in self.retained.iter().enumerate() {
                m[(i, j)] = op[(r, s)];
            }
        }
        m
    }

    /// `P_{a1} E_{a2|θ} P_{a1}` for the extended observable.
    fn branch_effect(
        &self,
        first: usize,
        obs: DichotomicObservable,
        second: usize,
    ) -> Result<CMatrix> {
        if self.retained.len() != 2 {
            return Err(Error::DimensionMismatch {
                expected: 2,
                found: self.retained.len(),
            });
        }
        Ok(match (first, second) {
            (IN, _) => self.embed(&obs.eigenprojector(second)),
            (_, 0) => self.complement(),
            _ => CMatrix::zeros(self.dim),
        })
    }
}

/// A bipartite state that can evaluate `Tr[(X ⊗ Y) ρ]` for local operators.
pub trait ProductExpectation {
    /// `(d_A, d_B)`.
    fn local_dims(&self) -> (usize, usize);

    fn expect_product(&self, x: &CMatrix, y: &CMatrix) -> Result<Complex64>;
}

/// A dense density matrix read as a state on `d_A ⊗ d_B`.
#[derive(Debug, Clone, Copy)]
pub struct DenseBipartite<'a> {
    rho: &'a DensityMatrix,
    dim_a: usize,
    dim_b: usize,
}

impl<'a> DenseBipartite<'a> {
    pub fn new(rho: &'a DensityMatrix, dim_a: usize, dim_b: usize) -> Result<Self> {
        if dim_a * dim_b != rho.dim() {
            return Err(Error::DimensionMismatch {
                expected: dim_a * dim_b,
                found: rho.dim(),
            });
        }
        Ok(DenseBipartite { rho, dim_a, dim_b })
    }
}

impl ProductExpectation for DenseBipartite<'_> {
    fn local_dims(&self) -> (usize, usize) {
        (self.dim_a, self.dim_b)
    }

    fn expect_product(&self, x: &CMatrix, y: &CMatrix) -> Result<Complex64> {
        check_operand(x, self.dim_a)?;
        check_operand(y, self.dim_b)?;
        let (da, db) = (self.dim_a, self.dim_b);
        let rho = self.rho.matrix();
        // Σ X_ij Y_kl ρ_{(j,l),(i,k)}
        let mut acc = Complex64::new(0.0, 0.0);
        for i in 0..da {
            for j in 0..da {
                let xij = x[(i, j)];
                if xij.norm_sqr() == 0.0 {
                    continue;
                }
                for k in 0..db {
                    for l in 0..db {
                        let ykl = y[(k, l)];
                        if ykl.norm_sqr() == 0.0 {
                            continue;
                        }
                        acc += xij * ykl * rho[(j * db + l, i * db + k)];
                    }
                }
            }
        }
        Ok(acc)
    }
}

/// `ρ_N(F)` kept in closed form, for local dimensions too large to store densely.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoisyFamily {
    n: usize,
    f: f64,
}

impl NoisyFamily {
    pub fn new(n: usize, f: f64) -> Result<Self> {
        check_local_dim(n)?;
        check_noise(f)?;
        Ok(NoisyFamily { n, f })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn noise(&self) -> f64 {
        self.f
    }
}

impl ProductExpectation for NoisyFamily {
    fn local_dims(&self) -> (usize, usize) {
        (self.n, self.n)
    }

    fn expect_product(&self, x: &CMatrix, y: &CMatrix) -> Result<Complex64> {
        check_operand(x, self.n)?;
        check_operand(y, self.n)?;
        let n = self.n as f64;
        // ⟨Ψ_N| X⊗Y |Ψ_N⟩ = (1/N) Σ_{m,m'} X_{mm'} Y_{mm'}
        let overlap: Complex64 = x
            .as_slice()
            .iter()
            .zip(y.as_slice())
            .map(|(a, b)| a * b)
            .sum();
        Ok(overlap * ((1.0 - self.f) / n) + x.trace() * y.trace() * (self.f / (n * n)))
    }
}

fn check_operand(op: &CMatrix, dim: usize) -> Result<()> {
    if op.dim() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            found: op.dim(),
        });
    }
    Ok(())
}

/// Lüders post-selection on `Π_A ⊗ Π_B`, restricted to the retained subspace.
///
/// Returns the renormalized state and the success probability
/// `p = Tr[(Π_A ⊗ Π_B) ρ]`. The retained joint basis is ordered A-major.
pub fn post_select(
    rho: &DensityMatrix,
    proj_a: &SubspaceProjector,
    proj_b: &SubspaceProjector,
) -> Result<(DensityMatrix, f64)> {
    let db = proj_b.dim();
    if proj_a.dim() * db != rho.dim() {
        return Err(Error::DimensionMismatch {
            expected: proj_a.dim() * db,
            found: rho.dim(),
        });
    }
    let pi = proj_a.matrix().kron(&proj_b.matrix());
    let projected = pi.mul(rho.matrix())?.mul(&pi)?;
    let p = projected.trace().re;
    if p < ZERO_BRANCH_THRESHOLD {
        return Err(Error::ZeroProbabilityBranch(p));
    }
    let keep: Vec<usize> = proj_a
        .retained()
        .iter()
        .flat_map(|&i| proj_b.retained().iter().map(move |&j| i * db + j))
        .collect();
    let state = DensityMatrix::new_unchecked(projected.compress(&keep).scale(1.0 / p));
    Ok((state, p))
}

/// Weight `N(1−F)/(N(1−F)+2F)` of `|Ψ₂⟩⟨Ψ₂|` after post-selection onto the
/// first two levels on each side.
pub fn post_selected_visibility(n: usize, f: f64) -> Result<f64> {
    check_local_dim(n)?;
    check_noise(f)?;
    let pure = n as f64 * (1.0 - f);
    Ok(pure / (pure + 2.0 * f))
}

/// `v·|Ψ₂⟩⟨Ψ₂| + (1−v)·I₄/4` with `v` from [`post_selected_visibility`].
pub fn post_selected_closed_form(n: usize, f: f64) -> Result<DensityMatrix> {
    let v = post_selected_visibility(n, f)?;
    max_entangled(2)?
        .to_density()
        .mix(v, &DensityMatrix::maximally_mixed(4))
}

/// `(1−F)·2/N + F·4/N²`: probability that both sides land in the first two levels.
pub fn success_probability(n: usize, f: f64) -> Result<f64> {
    check_local_dim(n)?;
    check_noise(f)?;
    let n = n as f64;
    Ok((1.0 - f) * (2.0 / n) + f * (4.0 / (n * n)))
}

/// `P(a₁, b₁, a₂, b₂ | x, y)` for the two-stage experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct SequentialJointDistribution {
    probs: [f64; 64],
}

fn joint_index(x: usize, y: usize, a1: usize, b1: usize, a2: usize, b2: usize) -> usize {
    ((((x * 2 + y) * 2 + a1) * 2 + b1) * 2 + a2) * 2 + b2
}

impl SequentialJointDistribution {
    /// Accepts a raw table in `(x, y, a₁, b₁, a₂, b₂)` lexicographic order.
    pub fn from_probabilities(probs: [f64; 64]) -> Result<Self> {
        let joint = SequentialJointDistribution { probs };
        if let Some(&p) = probs.iter().find(|p| !p.is_finite() || **p < -1e-12) {
            return Err(Error::MalformedTable("negative or non-finite entry", p));
        }
        let defect = joint.normalization_defect();
        if defect > 1e-10 {
            return Err(Error::MalformedTable("setting pair not normalized", defect));
        }
        Ok(joint)
    }

    /// The experiment on `ρ_N(F)` with both sides post-selecting levels `{0, 1}`.
    pub fn for_noisy_family(n: usize, f: f64, settings: &ChshSettings) -> Result<Self> {
        let state = NoisyFamily::new(n, f)?;
        let proj = SubspaceProjector::leading(n, 2)?;
        sequential_joint_distribution_for(&state, &proj, &proj, settings)
    }

    pub fn get(&self, x: usize, y: usize, a1: usize, b1: usize, a2: usize, b2: usize) -> f64 {
        self.probs[joint_index(x, y, a1, b1, a2, b2)]
    }

    pub fn as_array(&self) -> &[f64; 64] {
        &self.probs
    }

    pub fn first_stage_marginal(&self, x: usize, y: usize, a1: usize, b1: usize) -> f64 {
        (0..4).map(|k| self.get(x, y, a1, b1, k / 2, k % 2)).sum()
    }

    /// Largest `|Σ P − 1|` over setting pairs.
    pub fn normalization_defect(&self) -> f64 {
        self.probs
            .chunks(16)
            .map(|c| (c.iter().sum::<f64>() - 1.0).abs())
            .fold(0.0, f64::max)
    }

    /// Largest spread of `P(a₁, b₁)` across setting pairs.
    pub fn first_stage_signaling(&self) -> f64 {
        let mut worst = 0.0f64;
        for a1 in 0..2 {
            for b1 in 0..2 {
                let m: Vec<f64> = (0..4)
                    .map(|s| self.first_stage_marginal(s / 2, s % 2, a1, b1))
                    .collect();
                let hi = m.iter().copied().fold(f64::MIN, f64::max);
                let lo = m.iter().copied().fold(f64::MAX, f64::min);
                worst = worst.max(hi - lo);
            }
        }
        worst
    }
}

/// Joint distribution of the two-stage experiment on a dense state; the local
/// dimensions are read from the projectors.
pub fn sequential_joint_distribution(
    rho: &DensityMatrix,
    proj_a: &SubspaceProjector,
    proj_b: &SubspaceProjector,
    settings: &ChshSettings,
) -> Result<SequentialJointDistribution> {
    let state = DenseBipartite::new(rho, proj_a.dim(), proj_b.dim())?;
    sequential_joint_distribution_for(&state, proj_a, proj_b, settings)
}

/// As [`sequential_joint_distribution`], for any state that evaluates product
/// expectations.
pub fn sequential_joint_distribution_for<S: ProductExpectation + ?Sized>(
    state: &S,
    proj_a: &SubspaceProjector,
    proj_b: &SubspaceProjector,
    settings: &ChshSettings,
) -> Result<SequentialJointDistribution> {
    let (da, db) = state.local_dims();
    for (proj, d) in [(proj_a, da), (proj_b, db)] {
        if proj.dim() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: proj.dim(),
            });
        }
    }
    let mut probs = [0.0; 64];
    for x in 0..2 {
        let alice: Vec<CMatrix> = (0..4)
            .map(|k| proj_a.branch_effect(k / 2, settings.alice(x), k % 2))
            .collect::<Result<_>>()?;
        for y in 0..2 {
            let bob: Vec<CMatrix> = (0..4)
                .map(|k| proj_b.branch_effect(k / 2, settings.bob(y), k % 2))
                .collect::<Result<_>>()?;
            let mut total = 0.0;
            for (ka, ea) in alice.iter().enumerate() {
                for (kb, eb) in bob.iter().enumerate() {
                    let p = state.expect_product(ea, eb)?.re;
                    probs[joint_index(x, y, ka / 2, kb / 2, ka % 2, kb % 2)] = p;
                    total += p;
                }
            }
            if total < ZERO_BRANCH_THRESHOLD {
                return Err(Error::ZeroProbabilityBranch(total));
            }
            for p in &mut probs[16 * (2 * x + y)..16 * (2 * x + y + 1)] {
                *p /= total;
            }
        }
    }
    Ok(SequentialJointDistribution { probs })
}

/// `P(a₂, b₂ | x, y; a₁, b₁)`, the second-stage table conditioned on a fixed
/// first-stage branch.
pub fn condition_on_first(
    joint: &SequentialJointDistribution,
    a1: usize,
    b1: usize,
) -> Result<BehaviorTable> {
    let mut p = [0.0; 16];
    for x in 0..2 {
        for y in 0..2 {
            let m = joint.first_stage_marginal(x, y, a1, b1);
            if m < ZERO_BRANCH_THRESHOLD {
                return Err(Error::ZeroProbabilityBranch(m));
            }
            for a2 in 0..2 {
                for b2 in 0..2 {
                    p[BehaviorTable::index(x, y, a2, b2)] = joint.get(x, y, a1, b1, a2, b2) / m;
                }
            }
        }
    }
    Ok(BehaviorTable::from_array(p))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chsh::{chsh_value, correlator, tsirelson_settings};
    use crate::qudit::noisy_state;

    fn leading2(n: usize) -> SubspaceProjector {
        SubspaceProjector::leading(n, 2).unwrap()
    }

    #[test]
    fn projector_validation() {
        assert!(SubspaceProjector::new(3, alloc::vec![0, 3]).is_err());
        assert!(SubspaceProjector::new(3, alloc::vec![1, 1]).is_err());
        let p = SubspaceProjector::new(4, alloc::vec![2, 0]).unwrap();
        let m = p.matrix();
        assert!(m.mul(&m).unwrap().max_abs_diff(&m).unwrap() == 0.0);
        assert_eq!(m.trace().re, 2.0);
    }

    #[test]
    fn full_space_projection_is_identity() {
        let rho = noisy_state(2, 0.37).unwrap();
        let (out, p) = post_select(&rho, &leading2(2), &leading2(2)).unwrap();
        assert!((p - 1.0).abs() < 1e-15);
        assert!(out.max_abs_diff(&rho).unwrap() < 1e-15);
    }

    #[test]
    fn pure_four_projects_to_bell() {
        let rho = noisy_state(4, 0.0).unwrap();
        let (out, p) = post_select(&rho, &leading2(4), &leading2(4)).unwrap();
        assert!((p - 0.5).abs() < 1e-15);
        let bell = max_entangled(2).unwrap().to_density();
        assert!(out.max_abs_diff(&bell).unwrap() < 1e-15);
    }

    #[test]
    fn white_noise_projects_to_white_noise() {
        let rho = noisy_state(4, 1.0).unwrap();
        let (out, p) = post_select(&rho, &leading2(4), &leading2(4)).unwrap();
        assert!((p - 0.25).abs() < 1e-15);
        assert!(
            out.max_abs_diff(&DensityMatrix::maximally_mixed(4))
                .unwrap()
                < 1e-15
        );
    }

    #[test]
    fn post_select_zero_branch() {
        // pure |Ψ₄⟩ has no weight on |0⟩_A|2⟩_B
        let rho = noisy_state(4, 0.0).unwrap();
        let a = SubspaceProjector::new(4, alloc::vec![0]).unwrap();
        let b = SubspaceProjector::new(4, alloc::vec![2]).unwrap();
        assert!(matches!(
            post_select(&rho, &a, &b),
            Err(Error::ZeroProbabilityBranch(_))
        ));
    }

    #[test]
    fn post_select_dimension_mismatch() {
        let rho = noisy_state(3, 0.2).unwrap();
        assert!(post_select(&rho, &leading2(2), &leading2(4)).is_err());
    }

    #[test]
    fn closed_form_endpoints() {
        let bell = max_entangled(2).unwrap().to_density();
        let mixed = DensityMatrix::maximally_mixed(4);
        for n in [2, 5, 40] {
            let s0 = post_selected_closed_form(n, 0.0).unwrap();
            assert!(s0.max_abs_diff(&bell).unwrap() < 1e-15);
            let s1 = post_selected_closed_form(n, 1.0).unwrap();
            assert!(s1.max_abs_diff(&mixed).unwrap() < 1e-15);
        }
    }

    #[test]
    fn closed_form_n4_half_matches_dense() {
        assert!((post_selected_visibility(4, 0.5).unwrap() - 2.0 / 3.0).abs() < 1e-15);
        let dense = post_select(&noisy_state(4, 0.5).unwrap(), &leading2(4), &leading2(4))
            .unwrap()
            .0;
        let closed = post_selected_closed_form(4, 0.5).unwrap();
        assert!(dense.max_abs_diff(&closed).unwrap() < 1e-15);
    }

    #[test]
    fn success_probability_values() {
        for f in [0.0, 0.3, 1.0] {
            assert!((success_probability(2, f).unwrap() - 1.0).abs() < 1e-15);
        }
        assert_eq!(success_probability(4, 0.0).unwrap(), 0.5);
        assert_eq!(success_probability(4, 1.0).unwrap(), 0.25);
    }

    #[test]
    fn n2_branch_in_in_carries_all_weight() {
        let rho = noisy_state(2, 0.0).unwrap();
        let joint =
            sequential_joint_distribution(&rho, &leading2(2), &leading2(2), &tsirelson_settings())
                .unwrap();
        for x in 0..2 {
            for y in 0..2 {
                assert!((joint.first_stage_marginal(x, y, IN, IN) - 1.0).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn conditioned_correlators_match_post_selected_state() {
        let s = tsirelson_settings();
        let rho = noisy_state(4, 0.0).unwrap();
        let joint = sequential_joint_distribution(&rho, &leading2(4), &leading2(4), &s).unwrap();
        let table = condition_on_first(&joint, IN, IN).unwrap();
        let post = post_select(&rho, &leading2(4), &leading2(4)).unwrap().0;
        for x in 0..2 {
            for y in 0..2 {
                let want = correlator(&post, s.alice(x), s.bob(y)).unwrap();
                assert!((table.correlator(x, y) - want).abs() < 1e-12);
                assert!((want - libm::cos(s.alice(x).theta - s.bob(y).theta)).abs() < 1e-12);
            }
        }
        let chsh = chsh_value(&post, &s).unwrap();
        assert!((table.chsh() - chsh).abs() < 1e-12);
        assert!((chsh - 2.0 * core::f64::consts::SQRT_2).abs() < 1e-12);
    }

    #[test]
    fn marginals_independent_of_second_stage_settings() {
        let rho = noisy_state(3, 0.45).unwrap();
        let s = ChshSettings {
            theta_a: 0.2,
            theta_a_prime: 1.3,
            theta_b: -0.4,
            theta_b_prime: 2.2,
        };
        let joint = sequential_joint_distribution(&rho, &leading2(3), &leading2(3), &s).unwrap();
        assert!(joint.first_stage_signaling() < 1e-15);
        assert!(joint.normalization_defect() < 1e-12);
    }

    #[test]
    fn white_noise_condition_is_uniform() {
        let joint =
            SequentialJointDistribution::for_noisy_family(4, 1.0, &tsirelson_settings()).unwrap();
        let table = condition_on_first(&joint, IN, IN).unwrap();
        assert!(table.as_array().iter().all(|p| (p - 0.25).abs() < 1e-15));
    }

    #[test]
    fn unit_branch_condition_is_unconditioned_table() {
        let rho = noisy_state(2, 0.2).unwrap();
        let s = tsirelson_settings();
        let joint = sequential_joint_distribution(&rho, &leading2(2), &leading2(2), &s).unwrap();
        let table = condition_on_first(&joint, IN, IN).unwrap();
        for x in 0..2 {
            for y in 0..2 {
                for a in 0..2 {
                    for b in 0..2 {
                        assert!(
                            (table.get(x, y, a, b) - joint.get(x, y, IN, IN, a, b)).abs() < 1e-15
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn conditioning_on_empty_branch_fails() {
        let joint =
            SequentialJointDistribution::for_noisy_family(2, 0.3, &tsirelson_settings()).unwrap();
        assert!(matches!(
            condition_on_first(&joint, OUT, IN),
            Err(Error::ZeroProbabilityBranch(_))
        ));
    }

    #[test]
    fn structured_state_agrees_with_dense() {
        let s = tsirelson_settings();
        for n in 2..=5 {
            for f in [0.0, 0.35, 1.0] {
                let dense = sequential_joint_distribution(
                    &noisy_state(n, f).unwrap(),
                    &leading2(n),
                    &leading2(n),
                    &s,
                )
                .unwrap();
                let fam = SequentialJointDistribution::for_noisy_family(n, f, &s).unwrap();
                for (a, b) in dense.as_array().iter().zip(fam.as_array()) {
                    assert!((a - b).abs() < 1e-14);
                }
            }
        }
    }

    #[test]
    fn second_stage_needs_qubit_subspace() {
        let rho = noisy_state(3, 0.1).unwrap();
        let p3 = SubspaceProjector::leading(3, 3).unwrap();
        assert!(sequential_joint_distribution(&rho, &p3, &p3, &tsirelson_settings()).is_err());
    }

    #[test]
    fn from_probabilities_checks_normalization() {
        let mut raw = [0.0; 64];
        for s in 0..4 {
            raw[16 * s] = 1.0;
        }
        assert!(SequentialJointDistribution::from_probabilities(raw).is_ok());
        raw[0] = 0.9;
        assert!(SequentialJointDistribution::from_probabilities(raw).is_err());
    }
}
