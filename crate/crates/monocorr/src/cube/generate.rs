//! Deterministic constructors for the catalog families: dictators,
//! majorities, tribes, weighted thresholds, and seeded random monotone
//! threshold families.
//!
//! Every constructor is a pure function of its descriptor. The random
//! monotone generator draws weights from a fixed-stream generator and picks
//! its cut deterministically, so identical descriptors always produce
//! bit-identical truth tables.

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::family::{BooleanFamily, CubeError};

/// Recipe for a catalog family. Coordinates are zero-based in descriptors
/// and labels.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FamilyDescriptor {
    /// `{x : x_i = 1}`.
    Dictator { n: u32, i: u32 },
    /// `{x : sum x_i > n/2}`; balanced only for odd `n`.
    Majority { n: u32 },
    /// `{x : some width-r block of consecutive coordinates is all ones}`,
    /// blocks partitioning the coordinates; requires `r | n`.
    Tribes { n: u32, r: u32 },
    /// `{x : sum weights_i x_i > threshold}` with nonnegative weights.
    Ltf { n: u32, weights: Vec<f64>, threshold: f64 },
    /// `{x : sum x_i >= k}`; `k = 0` is the full cube, `k = n + 1` empty.
    Threshold { n: u32, k: u32 },
    /// Weighted threshold with seeded weights from `(0, 1]` and the cut
    /// placed so the measure is as close to 1/2 as the weights allow.
    RandomMonotone { n: u32, seed: u64 },
}

impl FamilyDescriptor {
    pub fn n(&self) -> u32 {
        match *self {
            FamilyDescriptor::Dictator { n, .. }
            | FamilyDescriptor::Majority { n }
            | FamilyDescriptor::Tribes { n, .. }
            | FamilyDescriptor::Ltf { n, .. }
            | FamilyDescriptor::Threshold { n, .. }
            | FamilyDescriptor::RandomMonotone { n, .. } => n,
        }
    }

    /// Stable report label; comma-free so CSV rows need no quoting.
    pub fn label(&self) -> String {
        match self {
            FamilyDescriptor::Dictator { n, i } => format!("dictator_{n}_i{i}"),
            FamilyDescriptor::Majority { n } => format!("majority_{n}"),
            FamilyDescriptor::Tribes { n, r } => format!("tribes_{n}_r{r}"),
            FamilyDescriptor::Ltf { n, threshold, .. } => format!("ltf_{n}_t{threshold}"),
            FamilyDescriptor::Threshold { n, k } => format!("threshold_{n}_k{k}"),
            FamilyDescriptor::RandomMonotone { n, seed } => format!("random_monotone_{n}_s{seed}"),
        }
    }
}

/// Materializes the descriptor as a packed truth table.
pub fn generate(descriptor: &FamilyDescriptor) -> Result<BooleanFamily, CubeError> {
    match descriptor {
        FamilyDescriptor::Dictator { n, i } => dictator(*n, *i),
        FamilyDescriptor::Majority { n } => majority(*n),
        FamilyDescriptor::Tribes { n, r } => tribes(*n, *r),
        FamilyDescriptor::Ltf { n, weights, threshold } => ltf(*n, weights, *threshold),
        FamilyDescriptor::Threshold { n, k } => threshold(*n, *k),
        FamilyDescriptor::RandomMonotone { n, seed } => random_monotone(*n, *seed),
    }
}

pub fn dictator(n: u32, i: u32) -> Result<BooleanFamily, CubeError> {
    if i >= n {
        return Err(CubeError::CoordinateOutOfRange { k: i, n });
    }
    BooleanFamily::from_fn(n, |p| p >> i & 1 == 1)
}

pub fn majority(n: u32) -> Result<BooleanFamily, CubeError> {
    // Strict majority: more than n/2 coordinates set. For even n ties are
    // excluded, so the family is unbalanced.
    BooleanFamily::from_fn(n, |p| 2 * p.count_ones() > n)
}

pub fn tribes(n: u32, r: u32) -> Result<BooleanFamily, CubeError> {
    if r == 0 || r > n || n % r != 0 {
        return Err(CubeError::TribeWidth { r, n });
    }
    let blocks = n / r;
    let block_mask = (1u64 << r) - 1;
    BooleanFamily::from_fn(n, |p| {
        (0..blocks).any(|b| p >> (b * r) & block_mask == block_mask)
    })
}

pub fn threshold(n: u32, k: u32) -> Result<BooleanFamily, CubeError> {
    if k > n + 1 {
        return Err(CubeError::ThresholdLevel { k, max: n + 1 });
    }
    BooleanFamily::from_fn(n, |p| p.count_ones() >= k)
}

/// Weighted threshold family `{x : <weights, x> > threshold}`.
///
/// Point sums are accumulated over set bits in descending coordinate order,
/// reusing the sum of the point with its lowest set bit cleared. Floating
/// point rounding is monotone in each argument, so for nonnegative weights
/// the computed sums never decrease along an upward edge and the family is
/// increasing regardless of rounding.
pub fn ltf(n: u32, weights: &[f64], cut: f64) -> Result<BooleanFamily, CubeError> {
    if weights.len() != n as usize {
        return Err(CubeError::WeightCount { got: weights.len(), n });
    }
    for (k, &w) in weights.iter().enumerate() {
        if !w.is_finite() || !cut.is_finite() {
            return Err(CubeError::NonFiniteParameter);
        }
        if w < 0.0 {
            return Err(CubeError::NegativeWeight { k, weight: w });
        }
    }
    let sums = point_sums(n, weights)?;
    BooleanFamily::from_fn(n, |p| sums[p as usize] > cut)
}

fn point_sums(n: u32, weights: &[f64]) -> Result<Vec<f64>, CubeError> {
    // Validated by callers; n is within the cap so the table fits memory.
    let size = 1usize << n;
    let mut sums = vec![0.0f64; size];
    for j in 1..size {
        let low = j.trailing_zeros() as usize;
        sums[j] = sums[j & (j - 1)] + weights[low];
    }
    Ok(sums)
}

/// Seeded monotone threshold family with measure as close to 1/2 as the
/// drawn weights allow.
///
/// Weights are uniform on the dyadic grid `{1/2^20, ..., 2^20/2^20}`, so
/// point sums of up to 24 weights are exact in `f64` and comparisons carry
/// no rounding. The cut is the attained sum value whose strict upper count
/// is nearest `2^(n-1)`; ties prefer the larger half.
pub fn random_monotone(n: u32, seed: u64) -> Result<BooleanFamily, CubeError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let weights: Vec<f64> = (0..n)
        .map(|_| ((rng.next_u64() >> 44) + 1) as f64 / (1u64 << 20) as f64)
        .collect();
    let sums = point_sums(n, &weights)?;

    let mut sorted = sums.clone();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    sorted.dedup();
    let half = 1u64 << (n - 1);
    let mut best_cut = sorted[0];
    let mut best_gap = u64::MAX;
    let mut best_above = 0u64;
    for &cut in &sorted {
        // Sums are exact dyadics, so equality against the sorted values is
        // meaningful and the strict count is exact.
        let above = sums.iter().filter(|&&s| s > cut).count() as u64;
        let gap = above.abs_diff(half);
        if gap < best_gap || (gap == best_gap && above > best_above) {
            best_gap = gap;
            best_cut = cut;
            best_above = above;
        }
    }
    BooleanFamily::from_fn(n, |p| sums[p as usize] > best_cut)
}
