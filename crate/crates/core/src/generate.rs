//! Seeded random frames and perturbations.
//!
//! All generators draw from `ChaCha8Rng`, so a seed fully determines the
//! output on every platform.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{HsError, Result};
use crate::frame::{frame_operator, HsFrame};
use crate::hs::HsMap;
use crate::linalg;

/// Conditioning floor for [`GenMode::Frame`]: `λ_min ≥ 0.1 λ_max`.
pub const FRAME_CONDITION_FLOOR: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GenMode {
    /// Raw complex Gaussian maps.
    Bessel,
    /// Gaussian maps conditioned so `λ_min ≥ 0.1 λ_max`.
    Frame,
    /// Gaussian maps normalized so the frame operator is the identity.
    Parseval,
}

/// Per-index scale of a perturbation: index `i` (one-based) receives
/// operator norm `ε · scale(i)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Profile {
    Constant,
    Poly { p: f64 },
    Exp { c: f64 },
}

impl Profile {
    pub fn scale(&self, i: usize) -> f64 {
        match *self {
            Profile::Constant => 1.0,
            Profile::Poly { p } => (i as f64).powf(-p),
            Profile::Exp { c } => (-c * i as f64).exp(),
        }
    }

    fn validate(&self) -> Result<()> {
        match *self {
            Profile::Constant => Ok(()),
            Profile::Poly { p } if p > 0.0 && p.is_finite() => Ok(()),
            Profile::Exp { c } if c > 0.0 && c.is_finite() => Ok(()),
            other => Err(HsError::Spec(format!(
                "invalid perturbation profile {other:?}"
            ))),
        }
    }
}

pub fn gaussian(rng: &mut impl Rng) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

pub fn gaussian_matrix(rng: &mut impl Rng, rows: usize, cols: usize) -> DMatrix<Complex64> {
    // fill row by row so the draw order is independent of storage layout
    let mut out = DMatrix::zeros(rows, cols);
    for r in 0..rows {
        for c in 0..cols {
            out[(r, c)] = gaussian(rng);
        }
    }
    out
}

pub fn gaussian_map(rng: &mut impl Rng, n: usize, m: usize) -> HsMap {
    HsMap::from_flat(m, gaussian_matrix(rng, m * m, n)).expect("finite gaussian map")
}

pub fn unit_vector(rng: &mut impl Rng, dim: usize) -> DVector<Complex64> {
    loop {
        let v = DVector::from_iterator(dim, (0..dim).map(|_| gaussian(rng)));
        let norm = v.norm();
        if norm > 1e-8 {
            return v / Complex64::new(norm, 0.0);
        }
    }
}

/// `x ↦ ⟨x, v⟩ u` for random unit `u ∈ ℂ^{m²}`, `v ∈ ℂⁿ`; operator norm 1.
pub fn unit_rank_one_map(rng: &mut impl Rng, n: usize, m: usize) -> HsMap {
    let u = unit_vector(rng, m * m);
    let v = unit_vector(rng, n);
    HsMap::from_flat(m, u * v.adjoint()).expect("finite rank-one map")
}

fn check_dims(n: usize, m: usize, count: usize) -> Result<()> {
    if n == 0 || m == 0 || count == 0 {
        return Err(HsError::Spec(format!(
            "dimensions and count must be positive, got n={n}, m={m}, count={count}"
        )));
    }
    Ok(())
}

/// Right-multiplies every element by the same n×n matrix.
fn precompose(frame: &HsFrame, t: &DMatrix<Complex64>) -> Result<HsFrame> {
    frame.map_elements(|e| e.compose_right(t))
}

fn spectrum_floor(frame: &HsFrame) -> Result<linalg::HermitianEigen> {
    let eig = linalg::hermitian_eigen(frame_operator(frame).as_inner())?;
    if !(eig.min() > 1e-10 * eig.max().max(f64::MIN_POSITIVE)) {
        return Err(HsError::Spec(format!(
            "generated family is rank deficient (λ_min = {:e}); need m²·count ≥ n",
            eig.min()
        )));
    }
    Ok(eig)
}

/// Random frame in the given mode, fully determined by `rng`.
pub fn random_frame_with(
    rng: &mut impl Rng,
    n: usize,
    m: usize,
    count: usize,
    mode: GenMode,
) -> Result<HsFrame> {
    check_dims(n, m, count)?;
    let raw = HsFrame::new((0..count).map(|_| gaussian_map(rng, n, m)).collect())?;
    match mode {
        GenMode::Bessel => Ok(raw),
        GenMode::Frame => {
            let eig = spectrum_floor(&raw)?;
            let floor = FRAME_CONDITION_FLOOR * eig.max();
            // S ↦ T†ST with T = V diag(√(λ'/λ)) V† lifts small eigenvalues to the floor
            let t = linalg::hermitian_function(&eig, |l| {
                let target = l.max(floor);
                Complex64::new((target / l).sqrt(), 0.0)
            });
            precompose(&raw, &t)
        }
        GenMode::Parseval => {
            let eig = spectrum_floor(&raw)?;
            let inv_sqrt =
                linalg::hermitian_function(&eig, |l| Complex64::new(l.sqrt().recip(), 0.0));
            precompose(&raw, &inv_sqrt)
        }
    }
}

pub fn random_frame(seed: u64, n: usize, m: usize, count: usize, mode: GenMode) -> Result<HsFrame> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random_frame_with(&mut rng, n, m, count, mode)
}

/// `F_i = G_i + E_i` with Gaussian directions rescaled so that
/// `‖E_i‖ = ε · profile.scale(i)` exactly (up to rounding).
pub fn perturb_with(
    rng: &mut impl Rng,
    base: &HsFrame,
    eps: f64,
    profile: Profile,
) -> Result<HsFrame> {
    if !(eps > 0.0) || !eps.is_finite() {
        return Err(HsError::Spec(format!(
            "perturbation size must be positive and finite, got {eps}"
        )));
    }
    profile.validate()?;
    let mut out = Vec::with_capacity(base.len());
    for (i, g) in base.elements().iter().enumerate() {
        let target = eps * profile.scale(i + 1);
        let dir = gaussian_map(rng, g.dim_h(), g.dim_k());
        let norm = dir.op_norm()?;
        let e = dir.scale(Complex64::new(target / norm, 0.0));
        out.push(g.add(&e)?);
    }
    HsFrame::new(out)
}

pub fn perturb(seed: u64, base: &HsFrame, eps: f64, profile: Profile) -> Result<HsFrame> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    perturb_with(&mut rng, base, eps, profile)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frame::{max_pairwise_deviation, optimal_bounds, pairwise_deviations};

    #[test]
    fn parseval_mode_has_identity_frame_operator() {
        for (n, m, l) in [(3, 2, 2), (5, 2, 3), (4, 3, 1), (2, 1, 4)] {
            let f = random_frame(9, n, m, l, GenMode::Parseval).unwrap();
            let s = frame_operator(&f);
            let err = (s.as_inner() - DMatrix::<Complex64>::identity(n, n)).norm();
            assert!(err < 1e-12, "({n},{m},{l}) err {err:e}");
            let b = optimal_bounds(&f).unwrap();
            assert!((b.lower - 1.0).abs() < 1e-10 && (b.upper - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn frame_mode_is_conditioned() {
        for seed in 0..20 {
            let f = random_frame(seed, 5, 2, 2, GenMode::Frame).unwrap();
            let b = optimal_bounds(&f).unwrap();
            assert!(b.lower >= FRAME_CONDITION_FLOOR * b.upper * (1.0 - 1e-10));
        }
    }

    #[test]
    fn rank_deficient_request_fails() {
        // m²·count = 1 < n = 3
        assert!(random_frame(1, 3, 1, 1, GenMode::Parseval).is_err());
        assert!(random_frame(1, 0, 1, 1, GenMode::Bessel).is_err());
    }

    #[test]
    fn same_seed_same_frame() {
        let a = random_frame(42, 3, 2, 4, GenMode::Frame).unwrap();
        let b = random_frame(42, 3, 2, 4, GenMode::Frame).unwrap();
        let c = random_frame(43, 3, 2, 4, GenMode::Frame).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn constant_perturbation_has_requested_size() {
        let g = random_frame(1, 4, 2, 5, GenMode::Frame).unwrap();
        let f = perturb(2, &g, 0.05, Profile::Constant).unwrap();
        assert!((max_pairwise_deviation(&f, &g).unwrap() - 0.05).abs() < 1e-12);
    }

    #[test]
    fn decaying_profiles() {
        let g = random_frame(1, 3, 2, 6, GenMode::Frame).unwrap();
        let f = perturb(2, &g, 0.2, Profile::Poly { p: 2.0 }).unwrap();
        for (i, d) in pairwise_deviations(&f, &g).unwrap().iter().enumerate() {
            assert!((d - 0.2 / ((i + 1) as f64).powi(2)).abs() < 1e-14);
        }
        let f = perturb(2, &g, 0.2, Profile::Exp { c: 0.5 }).unwrap();
        for (i, d) in pairwise_deviations(&f, &g).unwrap().iter().enumerate() {
            assert!((d - 0.2 * (-0.5 * (i + 1) as f64).exp()).abs() < 1e-14);
        }
    }

    #[test]
    fn impossible_profiles_rejected() {
        let g = random_frame(1, 2, 2, 2, GenMode::Frame).unwrap();
        assert!(matches!(
            perturb(1, &g, 0.0, Profile::Constant),
            Err(HsError::Spec(_))
        ));
        assert!(matches!(
            perturb(1, &g, 0.1, Profile::Exp { c: -1.0 }),
            Err(HsError::Spec(_))
        ));
        assert!(matches!(
            perturb(1, &g, 0.1, Profile::Poly { p: 0.0 }),
            Err(HsError::Spec(_))
        ));
    }
}
