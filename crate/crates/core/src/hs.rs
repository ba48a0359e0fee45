//! Complex vectors, operators and the Hilbert-Schmidt calculus.
//!
//! An operator on the m-dimensional space is an m×m [`CMatrix`]. The trace
//! inner product `[T, S]_tr = trace(S† T)` is linear in its first argument
//! and conjugate-linear in its second, and vector inner products follow the
//! same convention: `⟨x, y⟩ = Σ x_j conj(y_j)`.
//!
//! An [`HsMap`] is a linear map from the n-dimensional space into m×m
//! operators. It is stored as a single `(m²)×n` matrix whose column `j` is
//! the row-major vectorization of the image of the j-th canonical basis
//! vector. Vectorization is an isometry from (operators, ‖·‖₂) onto
//! (ℂ^{m²}, Euclidean), so every Hilbert-Schmidt quantity reduces to
//! ordinary matrix algebra on this representation.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{dim_err, HsError, Result};
use crate::linalg;

/// A finite complex vector with at least one entry.
#[derive(Debug, Clone, PartialEq)]
pub struct CVector(DVector<Complex64>);

impl CVector {
    pub fn new(entries: Vec<Complex64>) -> Result<Self> {
        if entries.is_empty() {
            return Err(dim_err("vector must have at least one entry"));
        }
        if entries
            .iter()
            .any(|z| !z.re.is_finite() || !z.im.is_finite())
        {
            return Err(HsError::Spec("vector entries must be finite".into()));
        }
        Ok(Self(DVector::from_vec(entries)))
    }

    pub fn from_real(entries: &[f64]) -> Result<Self> {
        Self::new(entries.iter().map(|&r| Complex64::new(r, 0.0)).collect())
    }

    pub fn zeros(dim: usize) -> Self {
        assert!(dim >= 1, "vector dimension must be positive");
        Self(DVector::zeros(dim))
    }

    /// Canonical basis vector `e_index` (zero-based).
    pub fn basis(dim: usize, index: usize) -> Self {
        assert!(
            index < dim,
            "basis index {index} out of range for dim {dim}"
        );
        let mut v = DVector::zeros(dim);
        v[index] = Complex64::new(1.0, 0.0);
        Self(v)
    }

    pub fn from_inner(v: DVector<Complex64>) -> Self {
        Self(v)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn as_inner(&self) -> &DVector<Complex64> {
        &self.0
    }

    pub fn entries(&self) -> &[Complex64] {
        self.0.as_slice()
    }

    pub fn norm(&self) -> f64 {
        self.0.norm()
    }

    /// `⟨self, other⟩`, linear in `self`.
    pub fn inner(&self, other: &CVector) -> Result<Complex64> {
        if self.dim() != other.dim() {
            return Err(dim_err(format!(
                "inner product of vectors of dims {} and {}",
                self.dim(),
                other.dim()
            )));
        }
        Ok(self
            .0
            .iter()
            .zip(other.0.iter())
            .map(|(a, b)| a * b.conj())
            .sum())
    }
}

/// A finite complex matrix stored by nalgebra (column-major internally).
#[derive(Debug, Clone, PartialEq)]
pub struct CMatrix(DMatrix<Complex64>);

impl CMatrix {
    /// Builds a matrix from row-major entries.
    pub fn from_row_major(rows: usize, cols: usize, entries: &[Complex64]) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(dim_err("matrix dimensions must be positive"));
        }
        if entries.len() != rows * cols {
            return Err(dim_err(format!(
                "expected {} entries for a {rows}x{cols} matrix, got {}",
                rows * cols,
                entries.len()
            )));
        }
        if entries
            .iter()
            .any(|z| !z.re.is_finite() || !z.im.is_finite())
        {
            return Err(HsError::Spec("matrix entries must be finite".into()));
        }
        Ok(Self(DMatrix::from_row_slice(rows, cols, entries)))
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self(DMatrix::zeros(rows, cols))
    }

    pub fn identity(dim: usize) -> Self {
        Self(DMatrix::identity(dim, dim))
    }

    pub fn from_inner(m: DMatrix<Complex64>) -> Result<Self> {
        if m.nrows() == 0 || m.ncols() == 0 {
            return Err(dim_err("matrix dimensions must be positive"));
        }
        if m.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(HsError::Spec("matrix entries must be finite".into()));
        }
        Ok(Self(m))
    }

    pub fn rows(&self) -> usize {
        self.0.nrows()
    }

    pub fn cols(&self) -> usize {
        self.0.ncols()
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.0[(row, col)]
    }

    pub fn as_inner(&self) -> &DMatrix<Complex64> {
        &self.0
    }

    pub fn into_inner(self) -> DMatrix<Complex64> {
        self.0
    }

    pub fn is_square(&self) -> bool {
        self.rows() == self.cols()
    }

    pub fn row_major(&self) -> Vec<Complex64> {
        let mut out = Vec::with_capacity(self.rows() * self.cols());
        for r in 0..self.rows() {
            for c in 0..self.cols() {
                out.push(self.0[(r, c)]);
            }
        }
        out
    }

    /// `M x`.
    pub fn mul_vec(&self, x: &CVector) -> Result<CVector> {
        if self.cols() != x.dim() {
            return Err(dim_err(format!(
                "cannot apply {}x{} matrix to vector of dim {}",
                self.rows(),
                self.cols(),
                x.dim()
            )));
        }
        Ok(CVector(&self.0 * x.as_inner()))
    }
}

fn check_square_pair(t: &CMatrix, s: &CMatrix) -> Result<()> {
    if !t.is_square() || !s.is_square() || t.rows() != s.rows() {
        return Err(dim_err(format!(
            "trace inner product needs two square matrices of equal size, got {}x{} and {}x{}",
            t.rows(),
            t.cols(),
            s.rows(),
            s.cols()
        )));
    }
    Ok(())
}

/// Trace inner product `[T, S]_tr = trace(S† T)`.
pub fn hs_inner(t: &CMatrix, s: &CMatrix) -> Result<Complex64> {
    check_square_pair(t, s)?;
    // trace(S† T) = Σ_jk conj(S_jk) T_jk
    Ok(t.0.iter().zip(s.0.iter()).map(|(a, b)| a * b.conj()).sum())
}

/// Hilbert-Schmidt norm `‖T‖₂ = trace(T† T)^{1/2}`.
pub fn hs_norm(t: &CMatrix) -> Result<f64> {
    if !t.is_square() {
        return Err(dim_err(format!(
            "Hilbert-Schmidt norm needs a square matrix, got {}x{}",
            t.rows(),
            t.cols()
        )));
    }
    Ok(t.0.norm())
}

/// Rank-one operator `x ⊗ y : u ↦ ⟨u, y⟩ x`, i.e. `M_jk = x_j conj(y_k)`.
pub fn rank_one(x: &CVector, y: &CVector) -> Result<CMatrix> {
    if x.dim() != y.dim() {
        return Err(dim_err(format!(
            "rank-one tensor of vectors with dims {} and {}",
            x.dim(),
            y.dim()
        )));
    }
    Ok(CMatrix(x.as_inner() * y.as_inner().adjoint()))
}

/// A linear map from ℂⁿ into m×m Hilbert-Schmidt operators.
#[derive(Debug, Clone, PartialEq)]
pub struct HsMap {
    dim_h: usize,
    dim_k: usize,
    flat: DMatrix<Complex64>,
}

impl HsMap {
    /// Builds the map from the images of the canonical basis of ℂⁿ.
    pub fn from_columns(columns: &[CMatrix]) -> Result<Self> {
        let n = columns.len();
        if n == 0 {
            return Err(dim_err("a map needs at least one basis image"));
        }
        let m = columns[0].rows();
        let mut flat = DMatrix::zeros(m * m, n);
        for (j, col) in columns.iter().enumerate() {
            if !col.is_square() || col.rows() != m {
                return Err(dim_err(format!(
                    "basis image {j} is {}x{}, expected {m}x{m}",
                    col.rows(),
                    col.cols()
                )));
            }
            for r in 0..m {
                for c in 0..m {
                    flat[(r * m + c, j)] = col.get(r, c);
                }
            }
        }
        Ok(Self {
            dim_h: n,
            dim_k: m,
            flat,
        })
    }

    /// Builds the map from its `(m²)×n` vectorized matrix.
    pub fn from_flat(dim_k: usize, flat: DMatrix<Complex64>) -> Result<Self> {
        if dim_k == 0 || flat.ncols() == 0 {
            return Err(dim_err("map dimensions must be positive"));
        }
        if flat.nrows() != dim_k * dim_k {
            return Err(dim_err(format!(
                "flattened map has {} rows, expected {}",
                flat.nrows(),
                dim_k * dim_k
            )));
        }
        if flat.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(HsError::Spec("map entries must be finite".into()));
        }
        Ok(Self {
            dim_h: flat.ncols(),
            dim_k,
            flat,
        })
    }

    pub fn zero(dim_h: usize, dim_k: usize) -> Self {
        assert!(dim_h >= 1 && dim_k >= 1, "map dimensions must be positive");
        Self {
            dim_h,
            dim_k,
            flat: DMatrix::zeros(dim_k * dim_k, dim_h),
        }
    }

    /// The map `x ↦ ⟨x, y⟩ T`, i.e. a single rank-one analysis functional
    /// paired with a fixed operator.
    pub fn functional(y: &CVector, target: &CMatrix) -> Result<Self> {
        if !target.is_square() {
            return Err(dim_err("target operator must be square"));
        }
        let m = target.rows();
        let vec_t = DVector::from_vec(target.row_major());
        let flat = vec_t * y.as_inner().adjoint();
        Self::from_flat(m, flat)
    }

    pub fn dim_h(&self) -> usize {
        self.dim_h
    }

    pub fn dim_k(&self) -> usize {
        self.dim_k
    }

    pub fn flat(&self) -> &DMatrix<Complex64> {
        &self.flat
    }

    /// Image of the canonical basis vector `e_j` as an m×m operator.
    pub fn column(&self, j: usize) -> CMatrix {
        let m = self.dim_k;
        let entries: Vec<Complex64> = (0..m * m).map(|r| self.flat[(r, j)]).collect();
        CMatrix(DMatrix::from_row_slice(m, m, &entries))
    }

    pub fn columns(&self) -> Vec<CMatrix> {
        (0..self.dim_h).map(|j| self.column(j)).collect()
    }

    /// Evaluates the map at `x`.
    pub fn apply(&self, x: &CVector) -> Result<CMatrix> {
        if x.dim() != self.dim_h {
            return Err(dim_err(format!(
                "map expects input of dim {}, got {}",
                self.dim_h,
                x.dim()
            )));
        }
        let v = &self.flat * x.as_inner();
        let m = self.dim_k;
        Ok(CMatrix(DMatrix::from_row_slice(m, m, v.as_slice())))
    }

    /// Operator norm from (ℂⁿ, ‖·‖) into (𝒞₂, ‖·‖₂).
    pub fn op_norm(&self) -> Result<f64> {
        linalg::spectral_norm(&self.flat)
    }

    /// `Θ†Θ`, the n×n Gram matrix of the flattened map.
    pub fn gram(&self) -> DMatrix<Complex64> {
        self.flat.adjoint() * &self.flat
    }

    fn check_compatible(&self, other: &HsMap) -> Result<()> {
        if self.dim_h != other.dim_h || self.dim_k != other.dim_k {
            return Err(dim_err(format!(
                "maps of shape (n={}, m={}) and (n={}, m={})",
                self.dim_h, self.dim_k, other.dim_h, other.dim_k
            )));
        }
        Ok(())
    }

    pub fn sub(&self, other: &HsMap) -> Result<HsMap> {
        self.check_compatible(other)?;
        Ok(HsMap {
            dim_h: self.dim_h,
            dim_k: self.dim_k,
            flat: &self.flat - &other.flat,
        })
    }

    pub fn add(&self, other: &HsMap) -> Result<HsMap> {
        self.check_compatible(other)?;
        Ok(HsMap {
            dim_h: self.dim_h,
            dim_k: self.dim_k,
            flat: &self.flat + &other.flat,
        })
    }

    pub fn scale(&self, c: Complex64) -> HsMap {
        HsMap {
            dim_h: self.dim_h,
            dim_k: self.dim_k,
            flat: &self.flat * c,
        }
    }

    /// Precomposition `x ↦ Θ(T x)` with an n×n matrix `T`.
    pub fn compose_right(&self, t: &DMatrix<Complex64>) -> Result<HsMap> {
        if t.nrows() != self.dim_h || t.ncols() != self.dim_h {
            return Err(dim_err("right factor must be n×n"));
        }
        Ok(HsMap {
            dim_h: self.dim_h,
            dim_k: self.dim_k,
            flat: &self.flat * t,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn rand_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> CMatrix {
        let e: Vec<Complex64> = (0..rows * cols)
            .map(|_| c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
            .collect();
        CMatrix::from_row_major(rows, cols, &e).unwrap()
    }

    fn rand_vector(rng: &mut ChaCha8Rng, dim: usize) -> CVector {
        CVector::new(
            (0..dim)
                .map(|_| c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn inner_of_identities_is_trace() {
        let i2 = CMatrix::identity(2);
        assert_eq!(hs_inner(&i2, &i2).unwrap(), c(2.0, 0.0));
    }

    #[test]
    fn inner_of_unit_rank_one() {
        let e1 = CVector::basis(2, 0);
        let e2 = CVector::basis(2, 1);
        let t = rank_one(&e1, &e2).unwrap();
        assert_eq!(hs_inner(&t, &t).unwrap(), c(1.0, 0.0));
    }

    #[test]
    fn inner_matches_double_loop_trace() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let t = rand_matrix(&mut rng, 3, 3);
        let s = rand_matrix(&mut rng, 3, 3);
        // trace(S† T) = Σ_i Σ_k conj(S_ki) T_ki
        let mut oracle = c(0.0, 0.0);
        for i in 0..3 {
            for k in 0..3 {
                oracle += s.get(k, i).conj() * t.get(k, i);
            }
        }
        let got = hs_inner(&t, &s).unwrap();
        assert!((got - oracle).norm() < 1e-14);
        let swapped = hs_inner(&s, &t).unwrap();
        assert!((got - swapped.conj()).norm() < 1e-14);
    }

    #[test]
    fn inner_rejects_mismatched_shapes() {
        let a = CMatrix::identity(2);
        let b = CMatrix::identity(3);
        assert!(matches!(hs_inner(&a, &b), Err(HsError::Dimension(_))));
        let r = CMatrix::zeros(2, 3);
        assert!(matches!(hs_norm(&r), Err(HsError::Dimension(_))));
    }

    #[test]
    fn norm_examples() {
        assert!((hs_norm(&CMatrix::identity(2)).unwrap() - 2f64.sqrt()).abs() < 1e-15);
        assert_eq!(hs_norm(&CMatrix::zeros(3, 3)).unwrap(), 0.0);
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let t = rand_matrix(&mut rng, 4, 4);
        let oracle = t
            .row_major()
            .iter()
            .map(|z| z.norm_sqr())
            .sum::<f64>()
            .sqrt();
        assert!((hs_norm(&t).unwrap() - oracle).abs() < 1e-14);
    }

    #[test]
    fn rank_one_examples() {
        let e1 = CVector::basis(2, 0);
        let e2 = CVector::basis(2, 1);
        let m11 = rank_one(&e1, &e1).unwrap();
        assert_eq!(
            m11.row_major(),
            vec![c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]
        );
        let m21 = rank_one(&e2, &e1).unwrap();
        assert_eq!(m21.get(1, 0), c(1.0, 0.0));
        assert_eq!(m21.row_major().iter().filter(|z| z.norm() > 0.0).count(), 1);
    }

    #[test]
    fn rank_one_defining_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let x = rand_vector(&mut rng, 4);
        let y = rand_vector(&mut rng, 4);
        let u = rand_vector(&mut rng, 4);
        let m = rank_one(&x, &y).unwrap();
        let lhs = m.mul_vec(&u).unwrap();
        let uy = u.inner(&y).unwrap();
        for (a, b) in lhs.entries().iter().zip(x.entries()) {
            assert!((a - uy * b).norm() < 1e-12);
        }
        assert!(rank_one(&x, &CVector::zeros(3)).is_err());
    }

    #[test]
    fn apply_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(14);
        let cols: Vec<CMatrix> = (0..3).map(|_| rand_matrix(&mut rng, 2, 2)).collect();
        let map = HsMap::from_columns(&cols).unwrap();
        assert_eq!(map.apply(&CVector::zeros(3)).unwrap(), CMatrix::zeros(2, 2));
        for (j, col) in cols.iter().enumerate() {
            assert_eq!(&map.apply(&CVector::basis(3, j)).unwrap(), col);
        }
        assert!(matches!(
            map.apply(&CVector::zeros(2)),
            Err(HsError::Dimension(_))
        ));
    }

    #[test]
    fn apply_matches_column_combination() {
        let mut rng = ChaCha8Rng::seed_from_u64(15);
        let cols: Vec<CMatrix> = (0..4).map(|_| rand_matrix(&mut rng, 3, 3)).collect();
        let map = HsMap::from_columns(&cols).unwrap();
        let x = rand_vector(&mut rng, 4);
        let got = map.apply(&x).unwrap();
        let mut oracle = DMatrix::<Complex64>::zeros(3, 3);
        for (j, col) in cols.iter().enumerate() {
            oracle += col.as_inner() * x.entries()[j];
        }
        assert!((got.as_inner() - oracle).norm() < 1e-13);
        assert_eq!(map.columns(), cols);
    }

    #[test]
    fn op_norm_examples() {
        assert_eq!(HsMap::zero(3, 2).op_norm().unwrap(), 0.0);
        let e1 = CVector::basis(1, 0);
        let unit = rank_one(&e1, &e1).unwrap();
        let map = HsMap::from_columns(&[unit]).unwrap();
        assert!((map.op_norm().unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn op_norm_dominates_sampled_rayleigh() {
        // Random unit samples never exceed the norm; the best sample, refined
        // by power iteration on Θ†Θ, approaches it.
        let mut rng = ChaCha8Rng::seed_from_u64(16);
        for n in 1..=4 {
            let cols: Vec<CMatrix> = (0..n).map(|_| rand_matrix(&mut rng, 2, 2)).collect();
            let map = HsMap::from_columns(&cols).unwrap();
            let norm = map.op_norm().unwrap();
            let mut best = (0.0f64, CVector::zeros(n));
            for _ in 0..10_000 {
                let x = rand_vector(&mut rng, n);
                let v = hs_norm(&map.apply(&x).unwrap()).unwrap() / x.norm();
                assert!(v <= norm * (1.0 + 1e-12));
                if v > best.0 {
                    best = (v, x);
                }
            }
            let mut x = best.1;
            for _ in 0..500 {
                let y = map.apply(&x).unwrap();
                // Θ†(y): component j is [y, Θ(e_j)]_tr
                let back: Vec<Complex64> = cols.iter().map(|c| hs_inner(&y, c).unwrap()).collect();
                let back = CVector::new(back).unwrap();
                let scale = back.norm();
                x = CVector::new(back.entries().iter().map(|z| z / scale).collect()).unwrap();
            }
            let refined = hs_norm(&map.apply(&x).unwrap()).unwrap();
            assert!(refined <= norm * (1.0 + 1e-12));
            assert!(norm - refined < 1e-3, "n={n} norm={norm} refined={refined}");
        }
    }

    #[test]
    fn functional_map_evaluates_pairing() {
        let y = CVector::basis(3, 1);
        let t = rank_one(&CVector::basis(2, 0), &CVector::basis(2, 0)).unwrap();
        let map = HsMap::functional(&y, &t).unwrap();
        let x = CVector::new(vec![c(1.0, 0.0), c(0.5, -2.0), c(3.0, 0.0)]).unwrap();
        let out = map.apply(&x).unwrap();
        assert_eq!(out.get(0, 0), c(0.5, -2.0));
        assert_eq!(hs_norm(&out).unwrap(), c(0.5, -2.0).norm());
    }

    #[test]
    fn constructors_reject_bad_input() {
        assert!(CVector::new(vec![]).is_err());
        assert!(CVector::from_real(&[f64::NAN]).is_err());
        assert!(CMatrix::from_row_major(2, 2, &[c(0.0, 0.0); 3]).is_err());
        assert!(CMatrix::from_row_major(1, 1, &[c(f64::INFINITY, 0.0)]).is_err());
        assert!(HsMap::from_flat(2, DMatrix::zeros(3, 1)).is_err());
    }
}
