//! Hilbert-Schmidt frames over finite-dimensional spaces.
//!
//! The crate computes exact frame bounds, builds weavings of two frames,
//! and checks five perturbation-stability criteria as certificates whose
//! predicted bounds can be validated against exhaustive weaving sweeps.
//!
//! ```
//! use hsframe::{optimal_bounds, shift_frame, ShiftFrameParams};
//!
//! let g = shift_frame(&ShiftFrameParams::new(4).unwrap());
//! let b = optimal_bounds(&g).unwrap();
//! assert_eq!((b.lower, b.upper), (1.0, 2.0));
//! ```

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod certificates;
pub mod error;
pub mod frame;
pub mod fuzz;
pub mod generate;
pub mod hs;
pub mod io;
pub mod linalg;
pub mod models;
pub mod weaving;

pub use certificates::{
    certify, certify_decay, certify_finite, certify_parseval, certify_quadratic, certify_relative,
    soundness_check, CertConfig, Certificate, CertifyRequest, DecayWeights, EpsChoice, Quantifier,
    SoundnessOptions, SoundnessReport, TheoremId,
};
pub use error::{HsError, Result};
pub use frame::{
    classify, frame_operator, frame_sum, max_pairwise_deviation, optimal_bounds, FrameBounds,
    FrameClass, FrameKind, HsFrame,
};
pub use hs::{hs_inner, hs_norm, rank_one, CMatrix, CVector, HsMap};
pub use models::{
    feasible_epsilon, geometric_weight_sum, parseval_pair, shift_frame, zeta_partial, Regime,
    ShiftFrameParams, TailBoundedSum,
};
pub use weaving::{
    enumerate_weavings, sweep, weave, worst_case_bounds, SweepOptions, WeavingRecord, WeavingSpec,
    WeavingSweep,
};

pub use num_complex::Complex64;
