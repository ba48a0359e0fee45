//! Shared fixtures for the criterion benchmarks in `benches/`.

use hsframe::generate::{perturb, random_frame, GenMode, Profile};
use hsframe::HsFrame;

/// A seeded frame `G` over ℂⁿ with `len` elements in ℂ^{m×m} and a
/// perturbed copy `F` at distance `eps` per element. Returns `(F, G)`.
pub fn perturbed_pair(n: usize, m: usize, len: usize, eps: f64) -> (HsFrame, HsFrame) {
    let g = random_frame(len as u64, n, m, len, GenMode::Frame).expect("valid fixture dims");
    let f = perturb(len as u64 + 1, &g, eps, Profile::Constant).expect("positive eps");
    (f, g)
}
