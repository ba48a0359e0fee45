//! Hilbert-Schmidt frames, their frame operator and optimal bounds.
//!
//! For a family `{Θ_i}` the frame functional is `Σ_i ‖Θ_i(x)‖₂²`. With the
//! flattened representation of each map this is `⟨S x, x⟩` for the n×n
//! frame operator `S = Σ_i Θ_i†Θ_i`, so the tightest constants `A, B` are
//! the extreme eigenvalues of `S`.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{dim_err, HsError, Result};
use crate::hs::{hs_norm, CMatrix, CVector, HsMap};
use crate::linalg::{self, HermitianEigen};

/// Default tolerance for the Parseval test `|A-1|, |B-1| ≤ tol`.
pub const DEFAULT_PARSEVAL_TOL: f64 = 1e-9;
/// Eigenvalues at or below this are treated as zero.
pub const DEFAULT_PSD_TOL: f64 = 1e-12;

/// An indexed finite family of maps sharing `(n, m)`.
#[derive(Debug, Clone, PartialEq)]
pub struct HsFrame {
    dim_h: usize,
    dim_k: usize,
    elements: Vec<HsMap>,
}

impl HsFrame {
    pub fn new(elements: Vec<HsMap>) -> Result<Self> {
        let first = elements
            .first()
            .ok_or_else(|| HsError::Spec("a frame needs at least one element".into()))?;
        let (n, m) = (first.dim_h(), first.dim_k());
        if let Some((i, bad)) = elements
            .iter()
            .enumerate()
            .find(|(_, e)| e.dim_h() != n || e.dim_k() != m)
        {
            return Err(dim_err(format!(
                "element {i} has shape (n={}, m={}), expected (n={n}, m={m})",
                bad.dim_h(),
                bad.dim_k()
            )));
        }
        Ok(Self {
            dim_h: n,
            dim_k: m,
            elements,
        })
    }

    pub fn dim_h(&self) -> usize {
        self.dim_h
    }

    pub fn dim_k(&self) -> usize {
        self.dim_k
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn elements(&self) -> &[HsMap] {
        &self.elements
    }

    pub fn element(&self, i: usize) -> &HsMap {
        &self.elements[i]
    }

    pub fn into_elements(self) -> Vec<HsMap> {
        self.elements
    }

    /// Same `(n, m, L)`.
    pub fn check_compatible(&self, other: &HsFrame) -> Result<()> {
        if self.dim_h != other.dim_h || self.dim_k != other.dim_k || self.len() != other.len() {
            return Err(dim_err(format!(
                "frames of shape (n={}, m={}, L={}) and (n={}, m={}, L={})",
                self.dim_h,
                self.dim_k,
                self.len(),
                other.dim_h,
                other.dim_k,
                other.len()
            )));
        }
        Ok(())
    }

    /// Applies `f` to every element.
    pub fn map_elements(&self, f: impl Fn(&HsMap) -> Result<HsMap>) -> Result<HsFrame> {
        HsFrame::new(self.elements.iter().map(f).collect::<Result<Vec<_>>>()?)
    }

    /// Appends one element, checking its shape.
    pub fn with_element(&self, extra: HsMap) -> Result<HsFrame> {
        let mut elements = self.elements.clone();
        elements.push(extra);
        HsFrame::new(elements)
    }
}

/// Optimal lower and upper frame bounds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FrameBounds {
    pub lower: f64,
    pub upper: f64,
}

impl FrameBounds {
    pub fn new(lower: f64, upper: f64) -> Self {
        Self { lower, upper }
    }

    /// `B / A`, infinite when `A = 0`.
    pub fn condition_number(&self) -> f64 {
        if self.lower > 0.0 {
            self.upper / self.lower
        } else {
            f64::INFINITY
        }
    }

    /// Whether `self` lies inside `outer` up to `slack`.
    pub fn within(&self, outer: &FrameBounds, slack: f64) -> bool {
        self.lower >= outer.lower - slack && self.upper <= outer.upper + slack
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum FrameKind {
    Frame,
    BesselOnly,
    ParsevalFrame,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FrameClass {
    pub kind: FrameKind,
    pub tol: f64,
}

impl FrameClass {
    pub fn is_frame(&self) -> bool {
        matches!(self.kind, FrameKind::Frame | FrameKind::ParsevalFrame)
    }
}

/// `Σ_i ‖Θ_i(x)‖₂²`, summed in index order.
pub fn frame_sum(frame: &HsFrame, x: &CVector) -> Result<f64> {
    let mut total = 0.0;
    for e in frame.elements() {
        let v = hs_norm(&e.apply(x)?)?;
        total += v * v;
    }
    Ok(total)
}

/// `S = Σ_i Θ_i†Θ_i` accumulated in index order.
pub fn frame_operator(frame: &HsFrame) -> CMatrix {
    let n = frame.dim_h();
    let mut s = DMatrix::<Complex64>::zeros(n, n);
    for e in frame.elements() {
        s += e.gram();
    }
    CMatrix::from_inner(linalg::hermitian_part(&s)).expect("finite frame operator")
}

/// Eigen-decomposition of the frame operator (eigenvalues ascending).
pub fn frame_spectrum(frame: &HsFrame) -> Result<HermitianEigen> {
    linalg::hermitian_eigen(frame_operator(frame).as_inner())
}

/// Tightest `(A, B)` with `A‖x‖² ≤ Σ‖Θ_i(x)‖₂² ≤ B‖x‖²`.
pub fn optimal_bounds(frame: &HsFrame) -> Result<FrameBounds> {
    let eig = frame_spectrum(frame)?;
    Ok(bounds_from_spectrum(&eig))
}

pub(crate) fn bounds_from_spectrum(eig: &HermitianEigen) -> FrameBounds {
    // the frame operator is PSD; clip round-off below zero
    FrameBounds::new(eig.min().max(0.0), eig.max().max(0.0))
}

/// Classifies from already computed bounds.
pub fn classify_bounds(bounds: &FrameBounds, tol: f64) -> FrameClass {
    let kind = if (bounds.lower - 1.0).abs() <= tol && (bounds.upper - 1.0).abs() <= tol {
        FrameKind::ParsevalFrame
    } else if bounds.lower > tol {
        FrameKind::Frame
    } else {
        FrameKind::BesselOnly
    };
    FrameClass { kind, tol }
}

pub fn classify(frame: &HsFrame, tol: f64) -> Result<FrameClass> {
    if !(tol > 0.0) {
        return Err(HsError::Spec(format!(
            "tolerance must be positive, got {tol}"
        )));
    }
    Ok(classify_bounds(&optimal_bounds(frame)?, tol))
}

/// Per-index `‖F_i − G_i‖`.
pub fn pairwise_deviations(f: &HsFrame, g: &HsFrame) -> Result<Vec<f64>> {
    f.check_compatible(g)?;
    f.elements()
        .iter()
        .zip(g.elements())
        .map(|(fi, gi)| fi.sub(gi)?.op_norm())
        .collect()
}

/// `max_i ‖F_i − G_i‖`.
pub fn max_pairwise_deviation(f: &HsFrame, g: &HsFrame) -> Result<f64> {
    Ok(pairwise_deviations(f, g)?.into_iter().fold(0.0, f64::max))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hs::rank_one;
    use crate::models::{parseval_pair, shift_frame, ShiftFrameParams};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn rand_map(rng: &mut ChaCha8Rng, n: usize, m: usize) -> HsMap {
        let flat = DMatrix::from_fn(m * m, n, |_, _| {
            c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
        });
        HsMap::from_flat(m, flat).unwrap()
    }

    fn rand_frame(rng: &mut ChaCha8Rng, n: usize, m: usize, l: usize) -> HsFrame {
        HsFrame::new((0..l).map(|_| rand_map(rng, n, m)).collect()).unwrap()
    }

    fn rand_vector(rng: &mut ChaCha8Rng, n: usize) -> CVector {
        CVector::new(
            (0..n)
                .map(|_| c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
                .collect(),
        )
        .unwrap()
    }

    fn quad_form(s: &CMatrix, x: &CVector) -> f64 {
        let sx = s.mul_vec(x).unwrap();
        sx.inner(x).unwrap().re
    }

    #[test]
    fn frame_sum_of_zero_is_zero() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let f = rand_frame(&mut rng, 3, 2, 4);
        assert_eq!(frame_sum(&f, &CVector::zeros(3)).unwrap(), 0.0);
        assert!(matches!(
            frame_sum(&f, &CVector::zeros(2)),
            Err(HsError::Dimension(_))
        ));
    }

    #[test]
    fn frame_sum_shift_frame_first_basis_vector() {
        let g = shift_frame(&ShiftFrameParams::new(8).unwrap());
        assert!((frame_sum(&g, &CVector::basis(8, 0)).unwrap() - 2.0).abs() < 1e-15);
    }

    #[test]
    fn frame_sum_matches_direct_loop() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let f = rand_frame(&mut rng, 4, 3, 5);
        let x = rand_vector(&mut rng, 4);
        let mut oracle = 0.0;
        for e in f.elements() {
            let img = e.apply(&x).unwrap();
            for r in 0..3 {
                for k in 0..3 {
                    oracle += img.get(r, k).norm_sqr();
                }
            }
        }
        let got = frame_sum(&f, &x).unwrap();
        assert!((got - oracle).abs() <= 1e-12 * oracle);
        let s = frame_operator(&f);
        assert!((quad_form(&s, &x) - got).abs() <= 1e-10 * got);
    }

    #[test]
    fn frame_operator_one_by_one_identity_embedding() {
        let one = CMatrix::identity(1);
        let f = HsFrame::new(vec![HsMap::from_columns(&[one]).unwrap()]).unwrap();
        let s = frame_operator(&f);
        assert_eq!(s.row_major(), vec![c(1.0, 0.0)]);
    }

    #[test]
    fn frame_operator_parseval_pair_reference_is_identity() {
        let (_, g) = parseval_pair(6).unwrap();
        let s = frame_operator(&g);
        assert!((s.as_inner() - DMatrix::<Complex64>::identity(6, 6)).norm() < 1e-15);
    }

    #[test]
    fn frame_operator_matches_entrywise_accumulation() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let f = rand_frame(&mut rng, 3, 2, 4);
        let s = frame_operator(&f);
        for a in 0..3 {
            for b in 0..3 {
                let mut acc = c(0.0, 0.0);
                for e in f.elements() {
                    for r in 0..4 {
                        acc += e.flat()[(r, a)].conj() * e.flat()[(r, b)];
                    }
                }
                assert!((s.get(a, b) - acc).norm() < 1e-13);
            }
        }
        // Hermitian
        assert!((s.as_inner() - s.as_inner().adjoint()).norm() < 1e-12);
    }

    #[test]
    fn optimal_bounds_from_chosen_singular_values() {
        // stacked analysis map U Σ V† with Σ = diag(2, 1) → S = V Σ² V†
        let theta = 0.3f64;
        let v = DMatrix::from_row_slice(
            2,
            2,
            &[
                c(theta.cos(), 0.0),
                c(0.0, -theta.sin()),
                c(0.0, -theta.sin()),
                c(theta.cos(), 0.0),
            ],
        );
        let sigma =
            DMatrix::from_row_slice(2, 2, &[c(2.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]);
        // two elements in m=1, each a 1×2 row of the 2×2 stacked map (U = I)
        let stacked = &sigma * v.adjoint();
        let elems: Vec<HsMap> = (0..2)
            .map(|i| HsMap::from_flat(1, stacked.rows(i, 1).into_owned()).unwrap())
            .collect();
        let b = optimal_bounds(&HsFrame::new(elems).unwrap()).unwrap();
        assert!((b.lower - 1.0).abs() < 1e-13 && (b.upper - 4.0).abs() < 1e-13);
    }

    #[test]
    fn sampled_frame_sums_lie_inside_optimal_bounds() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let f = rand_frame(&mut rng, 4, 2, 3);
        let b = optimal_bounds(&f).unwrap();
        for _ in 0..10_000 {
            let x = rand_vector(&mut rng, 4);
            let unit = CVector::from_inner(x.as_inner() / c(x.norm(), 0.0));
            let v = frame_sum(&f, &unit).unwrap();
            assert!(v >= b.lower - 1e-9 && v <= b.upper + 1e-9);
        }
    }

    #[test]
    fn extreme_eigenvectors_attain_bounds() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let f = rand_frame(&mut rng, 3, 2, 2);
        let eig = frame_spectrum(&f).unwrap();
        let b = bounds_from_spectrum(&eig);
        let lo = CVector::from_inner(eig.vector(0));
        let hi = CVector::from_inner(eig.vector(2));
        assert!((frame_sum(&f, &lo).unwrap() - b.lower).abs() < 1e-9);
        assert!((frame_sum(&f, &hi).unwrap() - b.upper).abs() < 1e-9);
    }

    #[test]
    fn classify_examples() {
        let (_, g) = parseval_pair(6).unwrap();
        assert_eq!(
            classify(&g, DEFAULT_PARSEVAL_TOL).unwrap().kind,
            FrameKind::ParsevalFrame
        );

        // n = 2, every element kills e₂
        let e1 = CVector::basis(2, 0);
        let t = rank_one(&CVector::basis(2, 0), &CVector::basis(2, 1)).unwrap();
        let f = HsFrame::new(vec![HsMap::functional(&e1, &t).unwrap(); 3]).unwrap();
        assert_eq!(
            classify(&f, DEFAULT_PARSEVAL_TOL).unwrap().kind,
            FrameKind::BesselOnly
        );

        let s = shift_frame(&ShiftFrameParams::new(5).unwrap());
        let cls = classify(&s, DEFAULT_PARSEVAL_TOL).unwrap();
        assert_eq!(cls.kind, FrameKind::Frame);
        assert!(cls.is_frame());
        assert!(classify(&s, 0.0).is_err());
    }

    #[test]
    fn deviation_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let g = rand_frame(&mut rng, 3, 2, 4);
        assert_eq!(max_pairwise_deviation(&g, &g).unwrap(), 0.0);

        let bump = rand_map(&mut rng, 3, 2);
        let bump = bump.scale(c(0.1 / bump.op_norm().unwrap(), 0.0));
        let mut elems = g.elements().to_vec();
        elems[2] = elems[2].add(&bump).unwrap();
        let f = HsFrame::new(elems).unwrap();
        assert!((max_pairwise_deviation(&f, &g).unwrap() - 0.1).abs() < 1e-14);

        let other = rand_frame(&mut rng, 3, 2, 4);
        let devs = pairwise_deviations(&other, &g).unwrap();
        let oracle = other
            .elements()
            .iter()
            .zip(g.elements())
            .map(|(a, b)| {
                let d = a.flat() - b.flat();
                d.svd(false, false).singular_values.max()
            })
            .fold(0.0, f64::max);
        assert!((devs.iter().cloned().fold(0.0, f64::max) - oracle).abs() < 1e-13);

        let short = rand_frame(&mut rng, 3, 2, 3);
        assert!(matches!(
            max_pairwise_deviation(&short, &g),
            Err(HsError::Dimension(_))
        ));
    }

    #[test]
    fn frame_rejects_mixed_shapes() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        assert!(HsFrame::new(vec![]).is_err());
        let r = HsFrame::new(vec![rand_map(&mut rng, 2, 2), rand_map(&mut rng, 3, 2)]);
        assert!(matches!(r, Err(HsError::Dimension(_))));
    }
}
