//! Weavings of two frames and exhaustive worst-case bound sweeps.
//!
//! A weaving selects `F_i` for `i ∈ σ` and `G_i` otherwise. Subsets are
//! bitmasks over zero-based indices: bit `i` set means `i ∈ σ`.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::seq::index;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{HsError, Result};
use crate::frame::{bounds_from_spectrum, FrameBounds, HsFrame};
use crate::linalg;

/// Default exhaustive enumeration cap: at most 2^20 weavings.
pub const DEFAULT_MAX_SIZE: usize = 20;
const HARD_MAX_SIZE: usize = 63;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct WeavingSpec {
    size: usize,
    mask: u64,
}

impl WeavingSpec {
    pub fn from_mask(size: usize, mask: u64) -> Result<Self> {
        if size > HARD_MAX_SIZE {
            return Err(HsError::Capacity {
                requested: size,
                cap: HARD_MAX_SIZE,
            });
        }
        if size < 64 && mask >> size != 0 {
            return Err(HsError::Spec(format!(
                "mask {mask:#b} selects indices outside 0..{size}"
            )));
        }
        Ok(Self { size, mask })
    }

    /// σ given by zero-based indices.
    pub fn from_indices(size: usize, sigma: &[usize]) -> Result<Self> {
        let mut mask = 0u64;
        for &i in sigma {
            if i >= size {
                return Err(HsError::Spec(format!(
                    "weaving index {i} out of range 0..{size}"
                )));
            }
            mask |= 1 << i;
        }
        Self::from_mask(size, mask)
    }

    pub fn empty(size: usize) -> Self {
        Self { size, mask: 0 }
    }

    pub fn full(size: usize) -> Self {
        Self {
            size,
            mask: if size == 0 {
                0
            } else {
                u64::MAX >> (64 - size)
            },
        }
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn mask(&self) -> u64 {
        self.mask
    }

    pub fn contains(&self, i: usize) -> bool {
        i < self.size && self.mask >> i & 1 == 1
    }

    pub fn cardinality(&self) -> usize {
        self.mask.count_ones() as usize
    }

    pub fn sigma(&self) -> Vec<usize> {
        (0..self.size).filter(|&i| self.contains(i)).collect()
    }

    pub fn complement(&self) -> WeavingSpec {
        WeavingSpec {
            size: self.size,
            mask: !self.mask & Self::full(self.size).mask,
        }
    }
}

/// `H_i = F_i` for `i ∈ σ`, `G_i` otherwise.
pub fn weave(f: &HsFrame, g: &HsFrame, spec: &WeavingSpec) -> Result<HsFrame> {
    f.check_compatible(g)?;
    if spec.size() != f.len() {
        return Err(HsError::Spec(format!(
            "weaving spec has size {}, frames have {} elements",
            spec.size(),
            f.len()
        )));
    }
    let elements = (0..f.len())
        .map(|i| {
            if spec.contains(i) {
                f.element(i).clone()
            } else {
                g.element(i).clone()
            }
        })
        .collect();
    HsFrame::new(elements)
}

fn check_capacity(len: usize, max_size: usize) -> Result<()> {
    let cap = max_size.min(HARD_MAX_SIZE);
    if len > cap {
        return Err(HsError::Capacity {
            requested: len,
            cap,
        });
    }
    Ok(())
}

/// Every weaving of `f` and `g` in ascending bitmask order.
pub fn enumerate_weavings<'a>(
    f: &'a HsFrame,
    g: &'a HsFrame,
    max_size: usize,
) -> Result<impl Iterator<Item = (WeavingSpec, HsFrame)> + 'a> {
    f.check_compatible(g)?;
    let len = f.len();
    check_capacity(len, max_size)?;
    Ok((0..1u64 << len).map(move |mask| {
        let spec = WeavingSpec { size: len, mask };
        let frame = weave(f, g, &spec).expect("compatible frames and in-range mask");
        (spec, frame)
    }))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeavingRecord {
    pub mask: u64,
    pub cardinality: usize,
    pub bounds: FrameBounds,
}

/// Bounds of every weaving in a class plus worst-case aggregates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeavingSweep {
    pub size: usize,
    /// `None` for all σ; `Some(n)` for `|σ| ≤ n`.
    pub restrict_n: Option<usize>,
    /// False when the records are a random sample of subsets.
    pub exhaustive: bool,
    pub records: Vec<WeavingRecord>,
    pub worst_lower: f64,
    pub worst_upper: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SweepOptions {
    pub max_size: usize,
    pub restrict_n: Option<usize>,
    pub parallel: bool,
}

impl Default for SweepOptions {
    fn default() -> Self {
        Self {
            max_size: DEFAULT_MAX_SIZE,
            restrict_n: None,
            parallel: false,
        }
    }
}

/// Per-index Gram matrices `F_i†F_i`, `G_i†G_i`; a weaving's frame
/// operator is the sum of the selected ones.
struct GramTable {
    f: Vec<DMatrix<Complex64>>,
    g: Vec<DMatrix<Complex64>>,
}

impl GramTable {
    fn new(f: &HsFrame, g: &HsFrame) -> Self {
        Self {
            f: f.elements().iter().map(|e| e.gram()).collect(),
            g: g.elements().iter().map(|e| e.gram()).collect(),
        }
    }

    fn record(&self, mask: u64) -> Result<WeavingRecord> {
        let n = self.f[0].nrows();
        let mut s = DMatrix::<Complex64>::zeros(n, n);
        for i in 0..self.f.len() {
            if mask >> i & 1 == 1 {
                s += &self.f[i];
            } else {
                s += &self.g[i];
            }
        }
        let eig = linalg::hermitian_eigen(&s)?;
        Ok(WeavingRecord {
            mask,
            cardinality: mask.count_ones() as usize,
            bounds: bounds_from_spectrum(&eig),
        })
    }

    fn evaluate(&self, masks: &[u64], parallel: bool) -> Result<Vec<WeavingRecord>> {
        if parallel {
            masks.par_iter().map(|&m| self.record(m)).collect()
        } else {
            masks.iter().map(|&m| self.record(m)).collect()
        }
    }
}

fn aggregate(
    size: usize,
    restrict_n: Option<usize>,
    exhaustive: bool,
    records: Vec<WeavingRecord>,
) -> WeavingSweep {
    let worst_lower = records
        .iter()
        .map(|r| r.bounds.lower)
        .fold(f64::INFINITY, f64::min);
    let worst_upper = records
        .iter()
        .map(|r| r.bounds.upper)
        .fold(f64::NEG_INFINITY, f64::max);
    WeavingSweep {
        size,
        restrict_n,
        exhaustive,
        records,
        worst_lower,
        worst_upper,
    }
}

fn class_masks(len: usize, restrict_n: Option<usize>) -> Vec<u64> {
    (0..1u64 << len)
        .filter(|m| restrict_n.is_none_or(|n| m.count_ones() as usize <= n))
        .collect()
}

/// Exhaustive sweep over the weaving class selected by `opts`.
pub fn sweep(f: &HsFrame, g: &HsFrame, opts: &SweepOptions) -> Result<WeavingSweep> {
    f.check_compatible(g)?;
    check_capacity(f.len(), opts.max_size)?;
    let table = GramTable::new(f, g);
    let masks = class_masks(f.len(), opts.restrict_n);
    let records = table.evaluate(&masks, opts.parallel)?;
    Ok(aggregate(f.len(), opts.restrict_n, true, records))
}

/// Exact worst-case bounds over all `2^L` weavings.
pub fn worst_case_bounds(f: &HsFrame, g: &HsFrame, max_size: usize) -> Result<WeavingSweep> {
    sweep(
        f,
        g,
        &SweepOptions {
            max_size,
            ..SweepOptions::default()
        },
    )
}

/// Non-exhaustive sweep over `count` distinct subsets drawn uniformly
/// without replacement from the class, seeded for reproducibility.
/// Records are reported in ascending mask order.
pub fn sample_sweep(
    f: &HsFrame,
    g: &HsFrame,
    count: usize,
    seed: u64,
    restrict_n: Option<usize>,
    parallel: bool,
) -> Result<WeavingSweep> {
    f.check_compatible(g)?;
    let len = f.len();
    check_capacity(len, HARD_MAX_SIZE)?;
    if count == 0 {
        return Err(HsError::Spec("sample count must be positive".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut masks: Vec<u64> = match restrict_n {
        None if len < 40 => {
            let total = 1usize << len;
            index::sample(&mut rng, total, count.min(total))
                .into_iter()
                .map(|m| m as u64)
                .collect()
        }
        _ => {
            // rejection sampling with dedup for huge or restricted classes
            use rand::Rng;
            let mut seen = std::collections::BTreeSet::new();
            let mut attempts = 0usize;
            while seen.len() < count && attempts < count.saturating_mul(1000) {
                attempts += 1;
                let mask = if let Some(n) = restrict_n {
                    let k = rng.random_range(0..=n.min(len));
                    index::sample(&mut rng, len, k)
                        .into_iter()
                        .fold(0u64, |acc, i| acc | 1 << i)
                } else {
                    rng.random::<u64>() & WeavingSpec::full(len).mask
                };
                seen.insert(mask);
            }
            seen.into_iter().collect()
        }
    };
    masks.sort_unstable();
    let table = GramTable::new(f, g);
    let records = table.evaluate(&masks, parallel)?;
    Ok(aggregate(len, restrict_n, false, records))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frame::optimal_bounds;
    use crate::hs::HsMap;
    use crate::models::parseval_pair;
    use rand::seq::SliceRandom;
    use rand::Rng;

    fn rand_frame(rng: &mut ChaCha8Rng, n: usize, m: usize, l: usize) -> HsFrame {
        HsFrame::new(
            (0..l)
                .map(|_| {
                    let flat = DMatrix::from_fn(m * m, n, |_, _| {
                        Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
                    });
                    HsMap::from_flat(m, flat).unwrap()
                })
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn weave_extremes() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let f = rand_frame(&mut rng, 3, 2, 5);
        let g = rand_frame(&mut rng, 3, 2, 5);
        assert_eq!(weave(&f, &g, &WeavingSpec::empty(5)).unwrap(), g);
        assert_eq!(weave(&f, &g, &WeavingSpec::full(5)).unwrap(), f);
        let spec = WeavingSpec::from_indices(5, &[1, 3]).unwrap();
        let h = weave(&f, &g, &spec).unwrap();
        assert_eq!(h.element(1), f.element(1));
        assert_eq!(h.element(0), g.element(0));
        assert_eq!(spec.sigma(), vec![1, 3]);
    }

    #[test]
    fn weave_identical_frames_keeps_bounds() {
        let mut rng = ChaCha8Rng::seed_from_u64(22);
        let g = rand_frame(&mut rng, 3, 2, 4);
        let spec = WeavingSpec::from_indices(4, &[0, 2]).unwrap();
        let h = weave(&g, &g, &spec).unwrap();
        assert_eq!(optimal_bounds(&h).unwrap(), optimal_bounds(&g).unwrap());
    }

    #[test]
    fn weave_complementarity() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        let f = rand_frame(&mut rng, 2, 2, 6);
        let g = rand_frame(&mut rng, 2, 2, 6);
        for mask in [0u64, 5, 17, 63] {
            let s = WeavingSpec::from_mask(6, mask).unwrap();
            assert_eq!(
                weave(&f, &g, &s).unwrap(),
                weave(&g, &f, &s.complement()).unwrap()
            );
        }
    }

    #[test]
    fn spec_errors() {
        assert!(matches!(
            WeavingSpec::from_indices(3, &[3]),
            Err(HsError::Spec(_))
        ));
        assert!(matches!(
            WeavingSpec::from_mask(3, 8),
            Err(HsError::Spec(_))
        ));
        let mut rng = ChaCha8Rng::seed_from_u64(24);
        let f = rand_frame(&mut rng, 2, 2, 3);
        assert!(matches!(
            weave(&f, &f, &WeavingSpec::empty(4)),
            Err(HsError::Spec(_))
        ));
        let other = rand_frame(&mut rng, 2, 3, 3);
        assert!(matches!(
            weave(&f, &other, &WeavingSpec::empty(3)),
            Err(HsError::Dimension(_))
        ));
    }

    #[test]
    fn enumeration_counts_and_order() {
        let mut rng = ChaCha8Rng::seed_from_u64(25);
        let f1 = rand_frame(&mut rng, 2, 2, 1);
        assert_eq!(enumerate_weavings(&f1, &f1, 20).unwrap().count(), 2);

        let f3 = rand_frame(&mut rng, 2, 2, 3);
        let g3 = rand_frame(&mut rng, 2, 2, 3);
        let masks: Vec<u64> = enumerate_weavings(&f3, &g3, 20)
            .unwrap()
            .map(|(s, _)| s.mask())
            .collect();
        assert_eq!(masks, (0..8).collect::<Vec<_>>());

        let f10 = rand_frame(&mut rng, 2, 1, 10);
        let g10 = rand_frame(&mut rng, 2, 1, 10);
        let mut seen = std::collections::HashSet::new();
        for (s, _) in enumerate_weavings(&f10, &g10, 20).unwrap() {
            assert!(seen.insert(s.mask()));
        }
        assert_eq!(seen.len(), 1024);

        assert!(matches!(
            enumerate_weavings(&f10, &g10, 9).map(|_| ()),
            Err(HsError::Capacity {
                requested: 10,
                cap: 9
            })
        ));
    }

    #[test]
    fn worst_case_of_identical_frames() {
        let mut rng = ChaCha8Rng::seed_from_u64(26);
        let g = rand_frame(&mut rng, 3, 2, 5);
        let sw = worst_case_bounds(&g, &g, 20).unwrap();
        let b = optimal_bounds(&g).unwrap();
        assert!((sw.worst_lower - b.lower).abs() < 1e-12);
        assert!((sw.worst_upper - b.upper).abs() < 1e-12);
    }

    #[test]
    fn worst_case_parseval_example_inside_certified_interval() {
        let (f, g) = parseval_pair(6).unwrap();
        let sw = worst_case_bounds(&f, &g, 20).unwrap();
        assert_eq!(sw.records.len(), 64);
        assert!(sw.worst_lower >= 0.8 && sw.worst_upper <= 1.2);
    }

    #[test]
    fn sweep_is_order_independent_and_deterministic() {
        let mut rng = ChaCha8Rng::seed_from_u64(27);
        let f = rand_frame(&mut rng, 3, 2, 8);
        let g = rand_frame(&mut rng, 3, 2, 8);
        let sw = worst_case_bounds(&f, &g, 20).unwrap();

        let mut masks: Vec<u64> = (0..256).collect();
        masks.shuffle(&mut rng);
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for m in masks {
            let h = weave(&f, &g, &WeavingSpec::from_mask(8, m).unwrap()).unwrap();
            let b = optimal_bounds(&h).unwrap();
            lo = lo.min(b.lower);
            hi = hi.max(b.upper);
        }
        assert!((lo - sw.worst_lower).abs() <= 1e-12 * hi);
        assert!((hi - sw.worst_upper).abs() <= 1e-12 * hi);

        let again = worst_case_bounds(&f, &g, 20).unwrap();
        assert_eq!(sw, again);
        let par = sweep(
            &f,
            &g,
            &SweepOptions {
                parallel: true,
                ..SweepOptions::default()
            },
        )
        .unwrap();
        assert_eq!(par, sw);

        for r in &sw.records {
            assert!(sw.worst_lower <= r.bounds.lower && r.bounds.upper <= sw.worst_upper);
        }
    }

    #[test]
    fn restricted_sweep_counts() {
        let mut rng = ChaCha8Rng::seed_from_u64(28);
        let f = rand_frame(&mut rng, 2, 2, 6);
        let g = rand_frame(&mut rng, 2, 2, 6);
        let sw = sweep(
            &f,
            &g,
            &SweepOptions {
                restrict_n: Some(2),
                ..SweepOptions::default()
            },
        )
        .unwrap();
        assert_eq!(sw.records.len(), 1 + 6 + 15);
        assert!(sw.records.iter().all(|r| r.cardinality <= 2));
    }

    #[test]
    fn sample_sweep_is_seeded_and_labeled() {
        let mut rng = ChaCha8Rng::seed_from_u64(29);
        let f = rand_frame(&mut rng, 2, 1, 12);
        let g = rand_frame(&mut rng, 2, 1, 12);
        let a = sample_sweep(&f, &g, 50, 7, None, false).unwrap();
        let b = sample_sweep(&f, &g, 50, 7, None, true).unwrap();
        assert_eq!(a, b);
        assert!(!a.exhaustive);
        assert_eq!(a.records.len(), 50);
        let r = sample_sweep(&f, &g, 40, 7, Some(3), false).unwrap();
        assert!(r.records.iter().all(|x| x.cardinality <= 3));
    }
}
