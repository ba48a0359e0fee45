//! Perturbation certificates for weavings of two Hilbert-Schmidt frames.
//!
//! Each checker measures the hypothesis quantities of one stability result
//! on a concrete pair `(F, G)`, decides whether the result applies, and if
//! so reports the frame bounds it guarantees for every weaving in its
//! quantifier class:
//!
//! | theorem     | hypothesis                                   | class        |
//! |-------------|----------------------------------------------|--------------|
//! | `Finite`    | `2Nε·max(√B_F, √B_G) < A_G`                  | `\|σ\| ≤ N`  |
//! | `Quadratic` | `Nε² + 2ε√N·√B_G < A_G`                      | `\|σ\| ≤ N`  |
//! | `Relative`  | `‖(F_i−G_i)x‖₂² ≤ δ‖G_i x‖₂²`, `δ < 1`       | all σ        |
//! | `Decay`     | `ε(Σ 1/w_i²)^{1/2}(√B_F + √B_G) < A_G`       | all σ        |
//! | `Parseval`  | `Re Σ[F_i x, G_i x]_tr ≥ (1−δ)‖x‖²`, `δ<1/8` | all σ        |
//!
//! Strict inequalities are tested with a [`HYPOTHESIS_SLACK`] margin toward
//! rejection, so borderline pairs are never certified.

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{dim_err, HsError, Result};
use crate::frame::{
    classify_bounds, optimal_bounds, pairwise_deviations, FrameBounds, FrameKind, HsFrame,
    DEFAULT_PARSEVAL_TOL, DEFAULT_PSD_TOL,
};
use crate::linalg;
use crate::weaving::{self, SweepOptions, DEFAULT_MAX_SIZE};

/// Margin applied against acceptance in every strict hypothesis test.
pub const HYPOTHESIS_SLACK: f64 = 1e-12;
/// Slack allowed when comparing a measured deviation with a supplied bound.
pub const DEVIATION_SLACK: f64 = 1e-12;
/// Kernel directions of `G_i` must be mapped below this by `F_i − G_i`.
pub const KERNEL_TOL: f64 = 1e-10;
/// Relative eigenvalue threshold separating the kernel of `G_i†G_i`.
pub const RANK_TOL: f64 = 1e-12;
/// δ used by the Parseval checker when the measured δ is not positive.
pub const PARSEVAL_DELTA_FLOOR: f64 = 1e-12;
/// Default soundness slack.
pub const DEFAULT_SOUND_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum TheoremId {
    Finite,
    Quadratic,
    Relative,
    Decay,
    Parseval,
}

impl TheoremId {
    pub const ALL: [TheoremId; 5] = [
        TheoremId::Finite,
        TheoremId::Quadratic,
        TheoremId::Relative,
        TheoremId::Decay,
        TheoremId::Parseval,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            TheoremId::Finite => "finite",
            TheoremId::Quadratic => "quadratic",
            TheoremId::Relative => "relative",
            TheoremId::Decay => "decay",
            TheoremId::Parseval => "parseval",
        }
    }

    pub fn parse(name: &str) -> Result<Self> {
        TheoremId::ALL
            .into_iter()
            .find(|t| t.name().eq_ignore_ascii_case(name))
            .ok_or_else(|| HsError::Spec(format!("unknown theorem '{name}'")))
    }
}

/// The class of weavings a certificate speaks about.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "n", rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Quantifier {
    AllSigma,
    SigmaUpToN(usize),
}

impl Quantifier {
    pub fn restrict_n(&self) -> Option<usize> {
        match *self {
            Quantifier::AllSigma => None,
            Quantifier::SigmaUpToN(n) => Some(n),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum EpsChoice {
    /// Use the measured deviation (the sharpest ε the hypothesis allows).
    Auto,
    Explicit(f64),
}

/// The inequality that failed, with both sides evaluated.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Rejection {
    pub inequality: String,
    pub lhs: f64,
    pub rhs: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub theorem: TheoremId,
    pub accepted: bool,
    pub predicted: Option<FrameBounds>,
    pub quantifier: Quantifier,
    pub diagnostics: BTreeMap<String, f64>,
    pub notes: Vec<String>,
    pub rejection: Option<Rejection>,
}

impl Certificate {
    fn new(theorem: TheoremId, quantifier: Quantifier) -> Self {
        Self {
            theorem,
            accepted: false,
            predicted: None,
            quantifier,
            diagnostics: BTreeMap::new(),
            notes: Vec::new(),
            rejection: None,
        }
    }

    fn diag(&mut self, key: &str, value: f64) {
        self.diagnostics.insert(key.to_string(), value);
    }

    fn reject(mut self, inequality: &str, lhs: f64, rhs: f64) -> Self {
        self.accepted = false;
        self.predicted = None;
        self.rejection = Some(Rejection {
            inequality: inequality.to_string(),
            lhs,
            rhs,
        });
        self
    }

    fn accept(mut self, predicted: FrameBounds) -> Self {
        debug_assert!(predicted.lower > 0.0);
        self.accepted = true;
        self.predicted = Some(predicted);
        self
    }

    pub fn diagnostic(&self, key: &str) -> Option<f64> {
        self.diagnostics.get(key).copied()
    }
}

/// Tolerances shared by the checkers.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CertConfig {
    pub tol_parseval: f64,
    pub tol_psd: f64,
}

impl Default for CertConfig {
    fn default() -> Self {
        Self {
            tol_parseval: DEFAULT_PARSEVAL_TOL,
            tol_psd: DEFAULT_PSD_TOL,
        }
    }
}

/// Positive weights `w_i` and an upper bound on `Σ 1/w_i²` over the full
/// (possibly infinite) index set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecayWeights {
    weights: Vec<f64>,
    sum_inv_sq: f64,
}

impl DecayWeights {
    /// Weights whose index set is exactly the given one.
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        let partial = Self::validate(&weights)?;
        Ok(Self {
            weights,
            sum_inv_sq: partial,
        })
    }

    /// Weights for the leading indices of a longer sequence whose full
    /// `Σ 1/w_i²` is bounded by `total`.
    pub fn with_total(weights: Vec<f64>, total: f64) -> Result<Self> {
        let partial = Self::validate(&weights)?;
        if !total.is_finite() || total < partial * (1.0 - 1e-12) {
            return Err(HsError::Spec(format!(
                "weight sum {total} is below the partial sum {partial} of the supplied weights"
            )));
        }
        Ok(Self {
            weights,
            sum_inv_sq: total.max(partial),
        })
    }

    fn validate(weights: &[f64]) -> Result<f64> {
        if weights.is_empty() {
            return Err(HsError::Spec("at least one weight is required".into()));
        }
        if let Some((i, w)) = weights
            .iter()
            .enumerate()
            .find(|(_, w)| !(**w > 0.0) || !w.is_finite())
        {
            return Err(HsError::Spec(format!(
                "weight {} must be positive, got {w}",
                i + 1
            )));
        }
        Ok(weights.iter().rev().map(|w| 1.0 / (w * w)).sum())
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn sum_inv_sq(&self) -> f64 {
        self.sum_inv_sq
    }
}

/// Closed-form bound formulas, exposed for direct evaluation.
pub mod formulas {
    use crate::frame::FrameBounds;

    /// `2Nε·max(√B_F, √B_G)`.
    pub fn finite_margin(b_f: f64, b_g: f64, n: usize, eps: f64) -> f64 {
        2.0 * n as f64 * eps * b_f.sqrt().max(b_g.sqrt())
    }

    pub fn finite(a_g: f64, b_g: f64, b_f: f64, n: usize, eps: f64) -> FrameBounds {
        let margin = finite_margin(b_f, b_g, n, eps);
        FrameBounds::new(a_g - margin, b_g + margin)
    }

    /// `Nε² + 2ε√N·√B_G`.
    pub fn quadratic_margin(b_g: f64, n: usize, eps: f64) -> f64 {
        let nf = n as f64;
        nf * eps * eps + 2.0 * eps * nf.sqrt() * b_g.sqrt()
    }

    pub fn quadratic(a_g: f64, b_g: f64, b_f: f64, n: usize, eps: f64) -> FrameBounds {
        FrameBounds::new(a_g - quadratic_margin(b_g, n, eps), b_f + b_g)
    }

    pub fn relative(a_g: f64, b_g: f64, delta: f64) -> FrameBounds {
        let r = 1.0 - delta.sqrt();
        FrameBounds::new(r * r * a_g, 2.0 * (delta + 1.0) * b_g)
    }

    /// `ε(Σ 1/w_i²)^{1/2}(√B_F + √B_G)`.
    pub fn decay_margin(b_f: f64, b_g: f64, sum_inv_sq: f64, eps: f64) -> f64 {
        eps * sum_inv_sq.sqrt() * (b_f.sqrt() + b_g.sqrt())
    }

    pub fn decay(a_g: f64, b_g: f64, b_f: f64, sum_inv_sq: f64, eps: f64) -> FrameBounds {
        FrameBounds::new(a_g - decay_margin(b_f, b_g, sum_inv_sq, eps), b_f + b_g)
    }

    /// `(1 − 2√(2δ), 1 + 2√(2δ))`.
    pub fn parseval(delta: f64) -> FrameBounds {
        let r = 2.0 * (2.0 * delta).sqrt();
        FrameBounds::new(1.0 - r, 1.0 + r)
    }
}

struct PairBounds {
    g: FrameBounds,
    f: FrameBounds,
}

fn measure_pair(f: &HsFrame, g: &HsFrame, cfg: &CertConfig) -> Result<PairBounds> {
    f.check_compatible(g)?;
    let gb = optimal_bounds(g)?;
    if !(gb.lower > cfg.tol_psd * gb.upper.max(1.0)) {
        return Err(HsError::Hypothesis(format!(
            "G is not a frame: lower bound {:e} is not positive",
            gb.lower
        )));
    }
    Ok(PairBounds {
        g: gb,
        f: optimal_bounds(f)?,
    })
}

fn record_bounds(cert: &mut Certificate, b: &PairBounds) {
    cert.diag("A_G", b.g.lower);
    cert.diag("B_G", b.g.upper);
    cert.diag("A_F", b.f.lower);
    cert.diag("B_F", b.f.upper);
}

fn resolve_n(n: Option<usize>, len: usize) -> Result<usize> {
    match n {
        None => Ok(len),
        Some(0) => Err(HsError::Spec("N must be at least 1".into())),
        Some(n) => Ok(n),
    }
}

fn explicit_eps(eps: f64) -> Result<f64> {
    if !(eps > 0.0) || !eps.is_finite() {
        return Err(HsError::Spec(format!(
            "ε must be positive and finite, got {eps}"
        )));
    }
    Ok(eps)
}

/// Shared front half of the two `|σ| ≤ N` checkers: bounds, N and ε.
fn finite_setup(
    theorem: TheoremId,
    f: &HsFrame,
    g: &HsFrame,
    n: Option<usize>,
    eps: EpsChoice,
    cfg: &CertConfig,
) -> Result<(Certificate, PairBounds, usize, f64, Option<Rejection>)> {
    let n = resolve_n(n, g.len())?;
    let explicit = match eps {
        EpsChoice::Explicit(e) => Some(explicit_eps(e)?),
        EpsChoice::Auto => None,
    };
    let bounds = measure_pair(f, g, cfg)?;
    let max_dev = pairwise_deviations(f, g)?.into_iter().fold(0.0, f64::max);

    let mut cert = Certificate::new(theorem, Quantifier::SigmaUpToN(n));
    record_bounds(&mut cert, &bounds);
    cert.diag("N", n as f64);
    cert.diag("max_deviation", max_dev);
    cert.notes
        .push("deviation hypothesis is checked over every index, not only those in σ".to_string());

    let mut failed = None;
    let eps = match explicit {
        Some(e) => {
            if max_dev > e + DEVIATION_SLACK {
                failed = Some(Rejection {
                    inequality: "max_i ‖F_i − G_i‖ ≤ ε".into(),
                    lhs: max_dev,
                    rhs: e,
                });
            }
            e
        }
        None => {
            if max_dev == 0.0 {
                cert.notes.push(
                    "F = G: every ε > 0 is admissible; bounds reported at the ε → 0 limit".into(),
                );
            }
            max_dev
        }
    };
    cert.diag("eps", eps);
    Ok((cert, bounds, n, eps, failed))
}

/// Finite weaving check: valid for every σ with `|σ| ≤ N`.
pub fn certify_finite(
    f: &HsFrame,
    g: &HsFrame,
    n: Option<usize>,
    eps: EpsChoice,
    cfg: &CertConfig,
) -> Result<Certificate> {
    let (mut cert, b, n, eps, failed) = finite_setup(TheoremId::Finite, f, g, n, eps, cfg)?;
    let (a_g, b_g, b_f) = (b.g.lower, b.g.upper, b.f.upper);
    let max_sqrt = b_f.sqrt().max(b_g.sqrt());
    let margin = formulas::finite_margin(b_f, b_g, n, eps);
    cert.diag("max_sqrt_bound", max_sqrt);
    cert.diag("margin", margin);
    cert.diag("eps_threshold", a_g / (2.0 * n as f64 * max_sqrt));
    cert.diag("slack", a_g - margin);
    if let Some(r) = failed {
        return Ok(cert.reject(&r.inequality, r.lhs, r.rhs));
    }
    if margin < a_g - HYPOTHESIS_SLACK {
        Ok(cert.accept(formulas::finite(a_g, b_g, b_f, n, eps)))
    } else {
        Ok(cert.reject("2Nε·max(√B_F, √B_G) < A_G", margin, a_g))
    }
}

/// Quadratic check: valid for every σ with `|σ| ≤ N`.
pub fn certify_quadratic(
    f: &HsFrame,
    g: &HsFrame,
    n: Option<usize>,
    eps: EpsChoice,
    cfg: &CertConfig,
) -> Result<Certificate> {
    let (mut cert, b, n, eps, failed) = finite_setup(TheoremId::Quadratic, f, g, n, eps, cfg)?;
    let (a_g, b_g, b_f) = (b.g.lower, b.g.upper, b.f.upper);
    let margin = formulas::quadratic_margin(b_g, n, eps);
    cert.diag("margin", margin);
    cert.diag("slack", a_g - margin);
    if let Some(r) = failed {
        return Ok(cert.reject(&r.inequality, r.lhs, r.rhs));
    }
    if margin < a_g - HYPOTHESIS_SLACK {
        Ok(cert.accept(formulas::quadratic(a_g, b_g, b_f, n, eps)))
    } else {
        Ok(cert.reject("Nε² + 2ε√N·√B_G < A_G", margin, a_g))
    }
}

/// Per-index relative constant `sup_x ‖D x‖₂² / ‖G_i x‖₂²` with `D = F_i − G_i`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RelativeConstant {
    Finite(f64),
    /// Some direction is annihilated by `G_i` but not by `F_i − G_i`;
    /// carries `‖D v‖` for the worst such unit `v`.
    KernelViolation(f64),
}

/// Generalized Rayleigh quotient of `D†D` against `G†G`.
///
/// With `G†G = V Λ V†`, kernel directions (relative eigenvalue below
/// [`RANK_TOL`]) must satisfy `‖D v‖ ≤ KERNEL_TOL`; on the range the
/// constant is `λ_max(Λ_r^{-1/2} V_r† D†D V_r Λ_r^{-1/2})`.
pub fn relative_constant(
    gi: &DMatrix<Complex64>,
    di: &DMatrix<Complex64>,
) -> Result<RelativeConstant> {
    if gi.shape() != di.shape() {
        return Err(dim_err("relative constant needs maps of equal shape"));
    }
    let p = gi.adjoint() * gi;
    let eig = linalg::hermitian_eigen(&p)?;
    let top = eig.max().max(0.0);
    let d_scale = linalg::spectral_norm(gi)?.max(1.0);

    let mut range = Vec::new();
    let mut worst_kernel = 0.0f64;
    for (k, &lam) in eig.values.iter().enumerate() {
        if top > 0.0 && lam > RANK_TOL * top {
            range.push(k);
        } else {
            let v = eig.vectors.column(k);
            worst_kernel = worst_kernel.max((di * v).norm());
        }
    }
    if worst_kernel > KERNEL_TOL * d_scale {
        return Ok(RelativeConstant::KernelViolation(worst_kernel));
    }
    if range.is_empty() {
        return Ok(RelativeConstant::Finite(0.0));
    }
    let n = gi.ncols();
    let w = DMatrix::from_fn(n, range.len(), |r, c| {
        let k = range[c];
        eig.vectors[(r, k)] / Complex64::new(eig.values[k].sqrt(), 0.0)
    });
    let dw = di * &w;
    let reduced = dw.adjoint() * dw;
    let red = linalg::hermitian_eigen(&reduced)?;
    Ok(RelativeConstant::Finite(red.max().max(0.0)))
}

/// Relative-bound check: valid for every σ.
///
/// The hypothesis over all finite index subsets `J` is equivalent to the
/// per-index inequality (sum the singletons; conversely take `J = {i}`),
/// so δ is the largest per-index generalized Rayleigh constant.
pub fn certify_relative(f: &HsFrame, g: &HsFrame, cfg: &CertConfig) -> Result<Certificate> {
    let b = measure_pair(f, g, cfg)?;
    let mut cert = Certificate::new(TheoremId::Relative, Quantifier::AllSigma);
    record_bounds(&mut cert, &b);

    let mut delta = 0.0f64;
    let mut argmax = 0usize;
    let mut kernel_violations = 0usize;
    let mut worst_kernel = 0.0f64;
    for (i, (fi, gi)) in f.elements().iter().zip(g.elements()).enumerate() {
        let d = fi.flat() - gi.flat();
        match relative_constant(gi.flat(), &d)? {
            RelativeConstant::Finite(v) => {
                if v > delta {
                    delta = v;
                    argmax = i;
                }
            }
            RelativeConstant::KernelViolation(r) => {
                kernel_violations += 1;
                worst_kernel = worst_kernel.max(r);
            }
        }
    }
    cert.diag("kernel_violations", kernel_violations as f64);
    if kernel_violations > 0 {
        cert.diag("kernel_residual", worst_kernel);
        cert.notes.push("KERNEL_VIOLATION".into());
        return Ok(cert.reject("‖(F_i − G_i)v‖₂ = 0 whenever G_i v = 0", worst_kernel, 0.0));
    }
    cert.diag("delta_min", delta);
    cert.diag("delta_argmax_index", argmax as f64);
    if delta < 1.0 - HYPOTHESIS_SLACK {
        Ok(cert.accept(formulas::relative(b.g.lower, b.g.upper, delta)))
    } else {
        Ok(cert.reject("δ < 1", delta, 1.0))
    }
}

/// Decaying-perturbation check: valid for every σ.
pub fn certify_decay(
    f: &HsFrame,
    g: &HsFrame,
    weights: &DecayWeights,
    eps: EpsChoice,
    cfg: &CertConfig,
) -> Result<Certificate> {
    let explicit = match eps {
        EpsChoice::Explicit(e) => Some(explicit_eps(e)?),
        EpsChoice::Auto => None,
    };
    f.check_compatible(g)?;
    if weights.weights().len() != g.len() {
        return Err(dim_err(format!(
            "{} weights supplied for {} frame elements",
            weights.weights().len(),
            g.len()
        )));
    }
    let b = measure_pair(f, g, cfg)?;
    let devs = pairwise_deviations(f, g)?;
    let w = weights.weights();

    let mut cert = Certificate::new(TheoremId::Decay, Quantifier::AllSigma);
    record_bounds(&mut cert, &b);
    cert.diag("weight_sum", weights.sum_inv_sq());
    cert.diag(
        "weighted_deviation",
        devs.iter().zip(w).map(|(d, w)| d * w).fold(0.0, f64::max),
    );

    let eps =
        explicit.unwrap_or_else(|| devs.iter().zip(w).map(|(d, w)| d * w).fold(0.0, f64::max));
    cert.diag("eps", eps);

    // pointwise decay ‖F_i − G_i‖ ≤ ε/w_i
    let mut worst: Option<(usize, f64)> = None;
    for (i, (d, wi)) in devs.iter().zip(w).enumerate() {
        let excess = d - (eps / wi + DEVIATION_SLACK);
        if excess > 0.0 && worst.is_none_or(|(_, e)| excess > e) {
            worst = Some((i, excess));
        }
    }
    let (a_g, b_g, b_f) = (b.g.lower, b.g.upper, b.f.upper);
    let margin = formulas::decay_margin(b_f, b_g, weights.sum_inv_sq(), eps);
    cert.diag("margin", margin);
    cert.diag("slack", a_g - margin);
    if let Some((i, _)) = worst {
        cert.diag("decay_violation_index", i as f64);
        return Ok(cert.reject("‖F_i − G_i‖ ≤ ε/w_i", devs[i], eps / w[i]));
    }
    if margin < a_g - HYPOTHESIS_SLACK {
        Ok(cert.accept(formulas::decay(a_g, b_g, b_f, weights.sum_inv_sq(), eps)))
    } else {
        Ok(cert.reject("ε(Σ 1/w_i²)^{1/2}(√B_F + √B_G) < A_G", margin, a_g))
    }
}

/// `Σ_i G_i†F_i`; its Hermitian part is the quadratic form of
/// `x ↦ Re Σ_i [F_i x, G_i x]_tr`.
pub fn cross_operator(f: &HsFrame, g: &HsFrame) -> Result<DMatrix<Complex64>> {
    f.check_compatible(g)?;
    let n = f.dim_h();
    let mut c = DMatrix::<Complex64>::zeros(n, n);
    for (fi, gi) in f.elements().iter().zip(g.elements()) {
        c += gi.flat().adjoint() * fi.flat();
    }
    Ok(c)
}

/// Parseval weaving check: valid for every σ.
pub fn certify_parseval(f: &HsFrame, g: &HsFrame, cfg: &CertConfig) -> Result<Certificate> {
    f.check_compatible(g)?;
    let fb = optimal_bounds(f)?;
    let gb = optimal_bounds(g)?;
    let mut offenders = Vec::new();
    for (name, b) in [("F", fb), ("G", gb)] {
        if classify_bounds(&b, cfg.tol_parseval).kind != FrameKind::ParsevalFrame {
            offenders.push(format!(
                "{name}: |A−1| = {:e}, |B−1| = {:e} (tol {:e})",
                (b.lower - 1.0).abs(),
                (b.upper - 1.0).abs(),
                cfg.tol_parseval
            ));
        }
    }
    if !offenders.is_empty() {
        return Err(HsError::Hypothesis(format!(
            "inputs must be Parseval frames; {}",
            offenders.join("; ")
        )));
    }

    let mut cert = Certificate::new(TheoremId::Parseval, Quantifier::AllSigma);
    record_bounds(&mut cert, &PairBounds { g: gb, f: fb });
    let herm = linalg::hermitian_part(&cross_operator(f, g)?);
    let closeness = linalg::hermitian_eigen(&herm)?.min();
    let delta_raw = 1.0 - closeness;
    let delta = if delta_raw > 0.0 {
        delta_raw
    } else {
        cert.notes.push(format!(
            "measured δ = {delta_raw:e} ≤ 0; using δ = {PARSEVAL_DELTA_FLOOR:e}"
        ));
        PARSEVAL_DELTA_FLOOR
    };
    cert.diag("closeness_min", closeness);
    cert.diag("delta_min", delta_raw);
    cert.diag("delta_used", delta);
    if delta < 0.125 - HYPOTHESIS_SLACK {
        Ok(cert.accept(formulas::parseval(delta)))
    } else {
        Ok(cert.reject("δ < 1/8", delta, 0.125))
    }
}

/// Parameters for dispatching any checker by [`TheoremId`].
#[derive(Debug, Clone, PartialEq)]
pub struct CertifyRequest {
    pub theorem: TheoremId,
    pub n: Option<usize>,
    pub eps: EpsChoice,
    pub weights: Option<DecayWeights>,
}

pub fn certify(
    f: &HsFrame,
    g: &HsFrame,
    req: &CertifyRequest,
    cfg: &CertConfig,
) -> Result<Certificate> {
    match req.theorem {
        TheoremId::Finite => certify_finite(f, g, req.n, req.eps, cfg),
        TheoremId::Quadratic => certify_quadratic(f, g, req.n, req.eps, cfg),
        TheoremId::Relative => certify_relative(f, g, cfg),
        TheoremId::Decay => {
            let w = req
                .weights
                .as_ref()
                .ok_or_else(|| HsError::Spec("decay certificate needs weights".into()))?;
            certify_decay(f, g, w, req.eps, cfg)
        }
        TheoremId::Parseval => certify_parseval(f, g, cfg),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SoundnessReport {
    pub theorem: TheoremId,
    pub quantifier: Quantifier,
    pub pass: bool,
    pub weavings_checked: usize,
    pub violations: usize,
    pub predicted: FrameBounds,
    pub worst_lower: f64,
    pub worst_upper: f64,
    /// `worst_lower / predicted.lower`; at least 1 when the bound holds.
    pub lower_tightness: f64,
    /// `worst_upper / predicted.upper`; at most 1 when the bound holds.
    pub upper_tightness: f64,
    pub slack: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SoundnessOptions {
    pub max_size: usize,
    pub slack: f64,
    pub parallel: bool,
}

impl Default for SoundnessOptions {
    fn default() -> Self {
        Self {
            max_size: DEFAULT_MAX_SIZE,
            slack: DEFAULT_SOUND_TOL,
            parallel: false,
        }
    }
}

/// Enumerates the certificate's weaving class and checks every weaving's
/// optimal bounds against the prediction.
pub fn soundness_check(
    cert: &Certificate,
    f: &HsFrame,
    g: &HsFrame,
    opts: &SoundnessOptions,
) -> Result<SoundnessReport> {
    let predicted = match (cert.accepted, cert.predicted) {
        (true, Some(p)) => p,
        _ => {
            return Err(HsError::Spec(
                "soundness can only be checked for accepted certificates".into(),
            ))
        }
    };
    let sweep = weaving::sweep(
        f,
        g,
        &SweepOptions {
            max_size: opts.max_size,
            restrict_n: cert.quantifier.restrict_n(),
            parallel: opts.parallel,
        },
    )?;
    let violations = sweep
        .records
        .iter()
        .filter(|r| !r.bounds.within(&predicted, opts.slack))
        .count();
    Ok(SoundnessReport {
        theorem: cert.theorem,
        quantifier: cert.quantifier,
        pass: violations == 0,
        weavings_checked: sweep.records.len(),
        violations,
        predicted,
        worst_lower: sweep.worst_lower,
        worst_upper: sweep.worst_upper,
        lower_tightness: sweep.worst_lower / predicted.lower,
        upper_tightness: sweep.worst_upper / predicted.upper,
        slack: opts.slack,
    })
}
