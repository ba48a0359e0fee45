//! Seeded random certificate instances for soundness fuzzing.
//!
//! Each generator targets one certificate and tunes the perturbation so
//! that roughly half of the instances land inside the acceptance region
//! and half outside, which exercises both verdicts.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::certificates::{CertifyRequest, EpsChoice, TheoremId};
use crate::error::Result;
use crate::frame::{optimal_bounds, HsFrame};
use crate::generate::{self, GenMode};
use crate::hs::HsMap;
use crate::linalg;
use crate::models::Regime;

pub const FUZZ_MAX_DIM_H: usize = 5;
pub const FUZZ_MAX_DIM_K: usize = 4;
pub const FUZZ_MAX_COUNT: usize = 10;

#[derive(Debug, Clone)]
pub struct FuzzInstance {
    pub seed: u64,
    pub f: HsFrame,
    pub g: HsFrame,
    pub request: CertifyRequest,
}

/// Draws `(n, m, L)` with `n ≤ 5`, `m ≤ 4`, `L ≤ 10` and `m²L ≥ n`, so a
/// generic family spans ℂⁿ.
fn dims(rng: &mut impl Rng) -> (usize, usize, usize) {
    loop {
        let n = rng.random_range(1..=FUZZ_MAX_DIM_H);
        let m = rng.random_range(1..=FUZZ_MAX_DIM_K);
        let l = rng.random_range(1..=FUZZ_MAX_COUNT);
        if m * m * l >= n {
            return (n, m, l);
        }
    }
}

/// `F_i = G_i + E_i` with random directions and `‖E_i‖ = sizes[i]`.
fn add_noise(rng: &mut impl Rng, g: &HsFrame, sizes: &[f64]) -> Result<HsFrame> {
    HsFrame::new(
        g.elements()
            .iter()
            .zip(sizes)
            .map(|(gi, &s)| {
                let dir = generate::gaussian_map(rng, gi.dim_h(), gi.dim_k());
                let norm = dir.op_norm()?;
                gi.add(&dir.scale(Complex64::new(s / norm, 0.0)))
            })
            .collect::<Result<Vec<_>>>()?,
    )
}

/// A unitary `exp(i t H)` with `H` Hermitian of spectral norm one.
fn unitary_near_identity(rng: &mut impl Rng, dim: usize, t: f64) -> Result<DMatrix<Complex64>> {
    let a = generate::gaussian_matrix(rng, dim, dim);
    let h = linalg::hermitian_part(&a);
    let eig = linalg::hermitian_eigen(&h)?;
    let scale = eig
        .values
        .iter()
        .fold(0.0f64, |acc, l| acc.max(l.abs()))
        .max(1e-300);
    Ok(linalg::hermitian_function(&eig, |l| {
        Complex64::from_polar(1.0, t * l / scale)
    }))
}

/// Stacks the elements into one `(L·m²) × n` analysis matrix.
fn stack(frame: &HsFrame) -> DMatrix<Complex64> {
    let rows = frame.dim_k() * frame.dim_k();
    let mut out = DMatrix::zeros(rows * frame.len(), frame.dim_h());
    for (i, e) in frame.elements().iter().enumerate() {
        out.rows_mut(i * rows, rows).copy_from(e.flat());
    }
    out
}

fn unstack(t: &DMatrix<Complex64>, m: usize, count: usize) -> Result<HsFrame> {
    let rows = m * m;
    HsFrame::new(
        (0..count)
            .map(|i| HsMap::from_flat(m, t.rows(i * rows, rows).into_owned()))
            .collect::<Result<Vec<_>>>()?,
    )
}

fn finite_like(
    rng: &mut impl Rng,
    theorem: TheoremId,
) -> Result<(HsFrame, HsFrame, CertifyRequest)> {
    let (n, m, l) = dims(rng);
    let g = generate::random_frame_with(rng, n, m, l, GenMode::Frame)?;
    let b = optimal_bounds(&g)?;
    let big_n = rng.random_range(1..=l);
    let t: f64 = rng.random_range(0.05..1.3);
    let nf = big_n as f64;
    let eps = match theorem {
        // 2Nε√B_G = t·A_G, ignoring the growth of B_F
        TheoremId::Finite => t * b.lower / (2.0 * nf * b.upper.sqrt()),
        // Nε² + 2ε√N√B_G = t·A_G
        _ => {
            let sb = b.upper.sqrt();
            (-sb + (b.upper + t * b.lower).sqrt()) / nf.sqrt()
        }
    };
    let f = add_noise(rng, &g, &vec![eps; l])?;
    let req = CertifyRequest {
        theorem,
        n: Some(big_n),
        eps: EpsChoice::Auto,
        weights: None,
    };
    Ok((f, g, req))
}

fn relative(rng: &mut impl Rng) -> Result<(HsFrame, HsFrame, CertifyRequest)> {
    let (n, m, l) = dims(rng);
    let g = generate::random_frame_with(rng, n, m, l, GenMode::Frame)?;
    let reach: f64 = rng.random_range(0.3..2.0);
    let k = m * m;
    let f = HsFrame::new(
        g.elements()
            .iter()
            .map(|gi| {
                // F_i = (I + M_i) G_i keeps ker G_i ⊆ ker(F_i − G_i)
                let mi = generate::gaussian_matrix(rng, k, k);
                let norm = linalg::spectral_norm(&mi)?;
                let size = reach * rng.random_range(0.0..1.0);
                let left = DMatrix::identity(k, k) + mi * Complex64::new(size / norm, 0.0);
                HsMap::from_flat(m, left * gi.flat())
            })
            .collect::<Result<Vec<_>>>()?,
    )?;
    let req = CertifyRequest {
        theorem: TheoremId::Relative,
        n: None,
        eps: EpsChoice::Auto,
        weights: None,
    };
    Ok((f, g, req))
}

fn decay(rng: &mut impl Rng) -> Result<(HsFrame, HsFrame, CertifyRequest)> {
    let (n, m, l) = dims(rng);
    let g = generate::random_frame_with(rng, n, m, l, GenMode::Frame)?;
    let b = optimal_bounds(&g)?;
    let regime = if rng.random_bool(0.5) {
        Regime::Poly {
            p: rng.random_range(0.6..2.0),
        }
    } else {
        Regime::Exp {
            c: rng.random_range(0.2..1.5),
        }
    };
    let weights = regime.decay_weights(l)?;
    let t: f64 = rng.random_range(0.05..1.3);
    // ε√W·2√B_G = t·A_G, ignoring the growth of B_F
    let eps = t * b.lower / (2.0 * weights.sum_inv_sq().sqrt() * b.upper.sqrt());
    let sizes: Vec<f64> = weights
        .weights()
        .iter()
        .map(|w| eps / w * rng.random_range(0.5..1.0))
        .collect();
    let f = add_noise(rng, &g, &sizes)?;
    let req = CertifyRequest {
        theorem: TheoremId::Decay,
        n: None,
        eps: EpsChoice::Explicit(eps),
        weights: Some(weights),
    };
    Ok((f, g, req))
}

fn parseval(rng: &mut impl Rng) -> Result<(HsFrame, HsFrame, CertifyRequest)> {
    let (n, m, l) = dims(rng);
    let g = generate::random_frame_with(rng, n, m, l, GenMode::Parseval)?;
    let t_g = stack(&g);
    let angle: f64 = rng.random_range(0.0..0.7);
    let w = unitary_near_identity(rng, t_g.nrows(), angle)?;
    let f = unstack(&(w * t_g), m, l)?;
    let req = CertifyRequest {
        theorem: TheoremId::Parseval,
        n: None,
        eps: EpsChoice::Auto,
        weights: None,
    };
    Ok((f, g, req))
}

/// A random instance for `theorem`, fully determined by `seed`.
pub fn fuzz_instance(theorem: TheoremId, seed: u64) -> Result<FuzzInstance> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (f, g, request) = match theorem {
        TheoremId::Finite | TheoremId::Quadratic => finite_like(&mut rng, theorem)?,
        TheoremId::Relative => relative(&mut rng)?,
        TheoremId::Decay => decay(&mut rng)?,
        TheoremId::Parseval => parseval(&mut rng)?,
    };
    Ok(FuzzInstance {
        seed,
        f,
        g,
        request,
    })
}
