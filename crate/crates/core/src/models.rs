//! Finite truncations of the infinite-index example families together
//! with rigorous control of the series they rely on.
//!
//! Both truncated families live on `n = M` with operator space `m = M + 1`:
//! the extra basis vector `e_{M+1}` receives the terms that would otherwise
//! fall off the end of the index range, so the truncations keep the exact
//! bounds of the infinite families.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::certificates::DecayWeights;
use crate::error::{HsError, Result};
use crate::frame::HsFrame;
use crate::generate;
use crate::hs::HsMap;

/// Terms summed explicitly before the integral-test tail for polynomial
/// weight sums.
pub const POLY_PARTIAL_TERMS: u64 = 100_000;
/// Absolute bisection tolerance for [`feasible_epsilon`].
pub const FEASIBLE_EPS_TOL: f64 = 1e-10;
/// Required gap between the acceptance threshold and the left-hand side at
/// the returned ε.
pub const FEASIBLE_MARGIN: f64 = 1e-12;

/// The Parseval example's coupling coefficients.
pub const PARSEVAL_DIAGONAL: f64 = 199.0 / 200.0;

pub fn parseval_offdiagonal() -> f64 {
    399f64.sqrt() / 200.0
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ShiftFrameParams {
    truncation: usize,
}

impl ShiftFrameParams {
    pub fn new(truncation: usize) -> Result<Self> {
        if truncation < 2 {
            return Err(HsError::Spec(format!(
                "shift frame truncation must be at least 2, got {truncation}"
            )));
        }
        Ok(Self { truncation })
    }

    pub fn truncation(&self) -> usize {
        self.truncation
    }

    pub fn dim_k(&self) -> usize {
        self.truncation + 1
    }
}

fn diag_slot(m: usize, k: usize) -> usize {
    // row-major position of (k, k) in the vectorized m×m operator
    k * m + k
}

/// Truncated shift frame: `G_1(x) = x_1 e_1⊗e_1`,
/// `G_i(x) = x_{i-1} e_i⊗e_i` for `2 ≤ i ≤ M`, and the last element also
/// carries `x_M e_{M+1}⊗e_{M+1}` so every coordinate of ℂ^M is observed.
/// Optimal bounds are `(1, 2)` for every `M ≥ 2`.
pub fn shift_frame(params: &ShiftFrameParams) -> HsFrame {
    let big_m = params.truncation;
    let m = params.dim_k();
    let one = Complex64::new(1.0, 0.0);
    let elements = (0..big_m)
        .map(|i| {
            let mut flat = DMatrix::zeros(m * m, big_m);
            let source = i.saturating_sub(1);
            flat[(diag_slot(m, i), source)] = one;
            if i == big_m - 1 {
                flat[(diag_slot(m, big_m), big_m - 1)] = one;
            }
            HsMap::from_flat(m, flat).expect("well-formed shift element")
        })
        .collect();
    HsFrame::new(elements).expect("non-empty shift frame")
}

/// The Parseval pair: `G_i(x) = x_i e_i⊗e_i` and
/// `F_i(x) = (199/200) x_i e_i⊗e_i + (√399/200) x_i e_{i+1}⊗e_{i+1}`.
/// Returns `(F, G)`.
pub fn parseval_pair(truncation: usize) -> Result<(HsFrame, HsFrame)> {
    if truncation < 2 {
        return Err(HsError::Spec(format!(
            "Parseval pair truncation must be at least 2, got {truncation}"
        )));
    }
    let n = truncation;
    let m = n + 1;
    let diag = Complex64::new(PARSEVAL_DIAGONAL, 0.0);
    let off = Complex64::new(parseval_offdiagonal(), 0.0);
    let mut f = Vec::with_capacity(n);
    let mut g = Vec::with_capacity(n);
    for i in 0..n {
        let mut gf = DMatrix::zeros(m * m, n);
        gf[(diag_slot(m, i), i)] = Complex64::new(1.0, 0.0);
        g.push(HsMap::from_flat(m, gf)?);

        let mut ff = DMatrix::zeros(m * m, n);
        ff[(diag_slot(m, i), i)] = diag;
        ff[(diag_slot(m, i + 1), i)] = off;
        f.push(HsMap::from_flat(m, ff)?);
    }
    Ok((HsFrame::new(f)?, HsFrame::new(g)?))
}

/// Partial sum of a nonnegative series with an upper bound on its tail.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TailBoundedSum {
    pub partial: f64,
    pub tail_upper: f64,
}

impl TailBoundedSum {
    pub fn total_upper(&self) -> f64 {
        self.partial + self.tail_upper
    }

    pub fn contains(&self, value: f64) -> bool {
        self.partial <= value && value <= self.total_upper()
    }
}

/// `Σ_{i=1}^{M} i^{-2p}` with the integral-test tail `M^{1-2p}/(2p-1)`.
pub fn zeta_partial(p: f64, terms: u64) -> Result<TailBoundedSum> {
    if !(p > 0.5) || !p.is_finite() {
        return Err(HsError::Divergence(format!(
            "Σ i^(-2p) diverges for p = {p}; need p > 1/2"
        )));
    }
    if terms == 0 {
        return Err(HsError::Spec("at least one term is required".into()));
    }
    let s = 2.0 * p;
    // smallest terms first
    let partial = (1..=terms).rev().map(|i| (i as f64).powf(-s)).sum();
    let tail_upper = (terms as f64).powf(1.0 - s) / (s - 1.0);
    Ok(TailBoundedSum {
        partial,
        tail_upper,
    })
}

/// `Σ_{i≥1} e^{-2ci} = e^{-2c}/(1 - e^{-2c})`.
pub fn geometric_weight_sum(c: f64) -> Result<f64> {
    if !(c > 0.0) || !c.is_finite() {
        return Err(HsError::Divergence(format!(
            "Σ e^(-2ci) diverges for c = {c}; need c > 0"
        )));
    }
    Ok(1.0 / (2.0 * c).exp_m1())
}

/// Decay profile of a perturbation sequence, `w_i = i^p` or `w_i = e^{ci}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Regime {
    Poly { p: f64 },
    Exp { c: f64 },
}

impl Regime {
    /// `w_i` for the one-based index `i`.
    pub fn weight(&self, i: usize) -> f64 {
        match *self {
            Regime::Poly { p } => (i as f64).powf(p),
            Regime::Exp { c } => (c * i as f64).exp(),
        }
    }

    pub fn weights(&self, len: usize) -> Vec<f64> {
        (1..=len).map(|i| self.weight(i)).collect()
    }

    /// Upper bound on `Σ_{i≥1} 1/w_i²` (exact for the exponential regime).
    pub fn weight_sum(&self) -> Result<f64> {
        match *self {
            Regime::Poly { p } => Ok(zeta_partial(p, POLY_PARTIAL_TERMS)?.total_upper()),
            Regime::Exp { c } => geometric_weight_sum(c),
        }
    }

    /// Weights for the first `len` indices paired with the infinite-series
    /// upper bound.
    pub fn decay_weights(&self, len: usize) -> Result<DecayWeights> {
        DecayWeights::with_total(self.weights(len), self.weight_sum()?)
    }
}

/// `ε √W (√(2(B_G + ε² W)) + √B_G)`: the decay acceptance quantity with the
/// Bessel bound `B_F = 2(B_G + ε² W)` of a perturbed sequence.
pub fn decay_example_lhs(eps: f64, weight_sum: f64, b_g: f64) -> f64 {
    eps * weight_sum.sqrt() * ((2.0 * (b_g + eps * eps * weight_sum)).sqrt() + b_g.sqrt())
}

/// Largest ε (to [`FEASIBLE_EPS_TOL`]) with
/// `decay_example_lhs(ε) ≤ A_G − FEASIBLE_MARGIN`.
pub fn feasible_epsilon(regime: &Regime, a_g: f64, b_g: f64) -> Result<f64> {
    if !(a_g > 0.0) || !(b_g > 0.0) || !a_g.is_finite() || !b_g.is_finite() {
        return Err(HsError::Spec(format!(
            "frame bounds must be positive and finite, got A_G = {a_g}, B_G = {b_g}"
        )));
    }
    let w = regime.weight_sum()?;
    if !(w > 0.0) || !w.is_finite() {
        return Err(HsError::Infeasible(format!(
            "weight sum {w} gives no usable constraint on ε"
        )));
    }
    let target = a_g - FEASIBLE_MARGIN;
    let ok = |eps: f64| decay_example_lhs(eps, w, b_g) <= target;

    let mut hi = 1.0;
    while ok(hi) {
        hi *= 2.0;
        if !hi.is_finite() {
            return Err(HsError::Infeasible("ε search diverged".into()));
        }
    }
    let mut lo = 0.0;
    while hi - lo > FEASIBLE_EPS_TOL {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if ok(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    if !(lo > 0.0) {
        return Err(HsError::Infeasible(
            "no positive ε satisfies the decay inequality".into(),
        ));
    }
    Ok(lo)
}

/// A perturbed copy of the truncated shift frame whose `i`-th perturbation
/// is a random unit rank-one map scaled to operator norm exactly `ε/w_i`.
/// Returns `(F, G, weights)`.
pub fn decay_instance(
    regime: &Regime,
    truncation: usize,
    eps: f64,
    seed: u64,
) -> Result<(HsFrame, HsFrame, DecayWeights)> {
    if !(eps >= 0.0) || !eps.is_finite() {
        return Err(HsError::Spec(format!(
            "ε must be finite and nonnegative, got {eps}"
        )));
    }
    let g = shift_frame(&ShiftFrameParams::new(truncation)?);
    let weights = regime.decay_weights(g.len())?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let f = HsFrame::new(
        g.elements()
            .iter()
            .zip(weights.weights())
            .map(|(gi, &w)| {
                let e = generate::unit_rank_one_map(&mut rng, gi.dim_h(), gi.dim_k());
                gi.add(&e.scale(Complex64::new(eps / w, 0.0)))
            })
            .collect::<Result<Vec<_>>>()?,
    )?;
    Ok((f, g, weights))
}
