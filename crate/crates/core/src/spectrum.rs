//! Dense Hermitian eigensolves, negative eigenvalues and Riesz means.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

use crate::error::SpectrumError;
use crate::operator::{hermiticity_defect, max_abs, AssembledOperator};

/// Eigenvalues within this distance of zero count as non-negative.
pub const ZERO_CUTOFF: f64 = 1e-12;
const HERMITIAN_TOL: f64 = 1e-12;
const RESIDUAL_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumResult {
    /// Ascending.
    pub eigenvalues: Vec<f64>,
    /// `λ_n > 0` with `−λ_n` the negative eigenvalues, ascending in `−λ_n`.
    pub negative_part: Vec<f64>,
    pub basis_size: usize,
}

impl SpectrumResult {
    pub fn from_eigenvalues(mut eigenvalues: Vec<f64>) -> Self {
        eigenvalues.sort_by(f64::total_cmp);
        let negative_part = eigenvalues
            .iter()
            .filter(|&&e| e < -ZERO_CUTOFF)
            .map(|&e| -e)
            .collect();
        let basis_size = eigenvalues.len();
        SpectrumResult {
            eigenvalues,
            negative_part,
            basis_size,
        }
    }

    pub fn negative_count(&self) -> usize {
        self.negative_part.len()
    }
}

/// Spectrum with eigenvectors; column `i` of `vectors` belongs to
/// `spectrum.eigenvalues[i]`.
#[derive(Debug, Clone)]
pub struct Eigenpairs {
    pub spectrum: SpectrumResult,
    pub vectors: DMatrix<Complex64>,
}

pub fn eigs_hermitian(op: &AssembledOperator) -> Result<SpectrumResult, SpectrumError> {
    Ok(eigenpairs(op.matrix())?.spectrum)
}

pub fn eigenpairs_of(op: &AssembledOperator) -> Result<Eigenpairs, SpectrumError> {
    eigenpairs(op.matrix())
}

/// Full eigendecomposition of a dense Hermitian matrix, with residuals
/// `‖Hv − ev‖ ≤ 10⁻⁹‖H‖` spot-checked on the extreme and middle pairs.
pub fn eigenpairs(m: &DMatrix<Complex64>) -> Result<Eigenpairs, SpectrumError> {
    let deviation = hermiticity_defect(m);
    if deviation > HERMITIAN_TOL {
        return Err(SpectrumError::NotHermitian { deviation });
    }
    let n = m.nrows();
    if n == 0 {
        return Ok(Eigenpairs {
            spectrum: SpectrumResult::from_eigenvalues(Vec::new()),
            vectors: DMatrix::zeros(0, 0),
        });
    }
    let sym = (m + m.adjoint()) * Complex64::new(0.5, 0.0);
    let eig = SymmetricEigen::try_new(sym, f64::EPSILON, 0).ok_or(SpectrumError::NoConvergence)?;

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let values: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = DMatrix::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);

    let norm = max_abs(m) * n as f64;
    let limit = RESIDUAL_TOL * norm.max(f64::MIN_POSITIVE);
    for c in [0, n / 2, n - 1] {
        let v: DVector<Complex64> = vectors.column(c).into_owned();
        let residual = (m * &v - &v * Complex64::new(values[c], 0.0)).norm();
        if residual > limit {
            return Err(SpectrumError::Residual { residual, limit });
        }
    }
    Ok(Eigenpairs {
        spectrum: SpectrumResult::from_eigenvalues(values),
        vectors,
    })
}

/// `Σ_n λ_n^γ` over the negative part; `γ = 0` counts eigenvalues.
pub fn riesz_mean(s: &SpectrumResult, gamma: f64) -> f64 {
    if gamma == 0.0 {
        return s.negative_part.len() as f64;
    }
    s.negative_part.iter().map(|l| l.powf(gamma)).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn real(rows: usize, data: &[f64]) -> DMatrix<Complex64> {
        DMatrix::from_row_slice(rows, rows, data).map(|x| Complex64::new(x, 0.0))
    }

    #[test]
    fn pauli_x() {
        let e = eigenpairs(&real(2, &[0.0, 1.0, 1.0, 0.0])).unwrap();
        assert!((e.spectrum.eigenvalues[0] + 1.0).abs() < 1e-14);
        assert!((e.spectrum.eigenvalues[1] - 1.0).abs() < 1e-14);
        assert_eq!(e.spectrum.negative_part.len(), 1);
    }

    #[test]
    fn diagonal_sorted() {
        let e = eigenpairs(&real(3, &[3.0, 0.0, 0.0, 0.0, -2.0, 0.0, 0.0, 0.0, 1.0])).unwrap();
        assert_eq!(e.spectrum.eigenvalues, vec![-2.0, 1.0, 3.0]);
        assert_eq!(e.spectrum.negative_part, vec![2.0]);
    }

    #[test]
    fn rejects_non_hermitian() {
        assert!(matches!(
            eigenpairs(&real(2, &[0.0, 1.0, 0.0, 0.0])),
            Err(SpectrumError::NotHermitian { .. })
        ));
    }

    #[test]
    fn riesz_examples() {
        let s = SpectrumResult::from_eigenvalues(vec![-1.0, -4.0, 2.0, -1e-13]);
        assert_eq!(s.negative_part, vec![4.0, 1.0]);
        assert_eq!(riesz_mean(&s, 1.0), 5.0);
        assert_eq!(riesz_mean(&s, 1.5), 9.0);
        assert_eq!(riesz_mean(&s, 0.0), 2.0);
        let empty = SpectrumResult::from_eigenvalues(vec![1.0, 2.0]);
        assert_eq!(riesz_mean(&empty, 1.0), 0.0);
    }

    #[test]
    fn random_hermitian_trace() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let n = 50;
        let mut m = DMatrix::from_fn(n, n, |_, _| {
            Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
        });
        m = &m + m.adjoint();
        let e = eigenpairs(&m).unwrap();
        let trace: f64 = (0..n).map(|i| m[(i, i)].re).sum();
        let sum: f64 = e.spectrum.eigenvalues.iter().sum();
        assert!((trace - sum).abs() <= 1e-9 * trace.abs().max(1.0));
    }
}
