//! Dense Hermitian eigen-decomposition and singular-value helpers.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{HsError, Result};

const EIGEN_EPS: f64 = 1e-15;
const MAX_SWEEPS: usize = 10_000;

/// Eigenpairs of a Hermitian matrix, eigenvalues ascending.
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    pub values: Vec<f64>,
    /// Column `k` is the unit eigenvector for `values[k]`.
    pub vectors: DMatrix<Complex64>,
}

impl HermitianEigen {
    pub fn min(&self) -> f64 {
        self.values[0]
    }

    pub fn max(&self) -> f64 {
        *self.values.last().expect("non-empty spectrum")
    }

    pub fn vector(&self, k: usize) -> DVector<Complex64> {
        self.vectors.column(k).into_owned()
    }
}

/// `(M + M†)/2`.
pub fn hermitian_part(m: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    (m + m.adjoint()) * Complex64::new(0.5, 0.0)
}

/// Eigen-decomposition of a Hermitian matrix. The input is symmetrized
/// first so round-off asymmetry never leaks into the spectrum.
pub fn hermitian_eigen(m: &DMatrix<Complex64>) -> Result<HermitianEigen> {
    if m.nrows() != m.ncols() || m.nrows() == 0 {
        return Err(HsError::Dimension(format!(
            "eigen-decomposition needs a non-empty square matrix, got {}x{}",
            m.nrows(),
            m.ncols()
        )));
    }
    let h = hermitian_part(m);
    let eig = h
        .try_symmetric_eigen(EIGEN_EPS, MAX_SWEEPS)
        .ok_or_else(|| HsError::Numerical("Hermitian eigensolver did not converge".into()))?;
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let vectors = DMatrix::from_fn(m.nrows(), order.len(), |r, c| {
        eig.eigenvectors[(r, order[c])]
    });
    Ok(HermitianEigen { values, vectors })
}

/// Largest singular value.
pub fn spectral_norm(m: &DMatrix<Complex64>) -> Result<f64> {
    if m.iter().all(|z| *z == Complex64::new(0.0, 0.0)) {
        return Ok(0.0);
    }
    let svd = m
        .clone()
        .try_svd(false, false, EIGEN_EPS, MAX_SWEEPS)
        .ok_or_else(|| HsError::Numerical("SVD did not converge".into()))?;
    Ok(svd.singular_values.iter().cloned().fold(0.0, f64::max))
}

/// `V f(Λ) V†` for a Hermitian matrix `V Λ V†`.
pub fn hermitian_function(
    eig: &HermitianEigen,
    f: impl Fn(f64) -> Complex64,
) -> DMatrix<Complex64> {
    let n = eig.values.len();
    let diag = DMatrix::from_diagonal(&DVector::from_iterator(n, eig.values.iter().map(|&l| f(l))));
    &eig.vectors * diag * eig.vectors.adjoint()
}
