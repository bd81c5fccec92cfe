//! Families of points on the discrete cube, stored as packed truth tables.
//!
//! A family on `{0,1}^n` is a subset of the `2^n` points. Point `j` encodes
//! the assignment whose coordinate `i` is bit `i` of `j` (little endian), so
//! the truth table is the bit string indexed by `j`. Every statistic derived
//! here is an exact ratio of point counts; denominators are powers of two.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;
use thiserror::Error;

/// Largest dimension the packed representation accepts by default. A table
/// at the cap holds `2^24` bits (2 MiB); raising the cap is a caller choice.
pub const DEFAULT_DIMENSION_CAP: u32 = 24;

/// Hard ceiling regardless of the configured cap, so `2^n` fits in `u64`
/// arithmetic with room for products of counts.
pub const HARD_DIMENSION_CAP: u32 = 30;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum CubeError {
    #[error("dimension {n} outside 1..={cap}")]
    DimensionOutOfRange { n: u32, cap: u32 },
    #[error("point {point} outside the cube of dimension {n}")]
    PointOutOfRange { point: u64, n: u32 },
    #[error("coordinate {k} outside dimension {n}")]
    CoordinateOutOfRange { k: u32, n: u32 },
    #[error("families live on different cubes: n = {left} vs n = {right}")]
    DimensionMismatch { left: u32, right: u32 },
    #[error("hex table has {got} digits, dimension {n} needs {want}")]
    HexLength { got: usize, want: usize, n: u32 },
    #[error("invalid hex digit {digit:?}")]
    HexDigit { digit: char },
    #[error("hex table sets bits beyond the 2^{n} valid points")]
    HexOverflow { n: u32 },
    #[error("tribe width {r} does not divide dimension {n}")]
    TribeWidth { r: u32, n: u32 },
    #[error("threshold weight for coordinate {k} is negative: {weight}")]
    NegativeWeight { k: usize, weight: f64 },
    #[error("got {got} weights for dimension {n}")]
    WeightCount { got: usize, n: u32 },
    #[error("threshold level {k} outside 0..={max}")]
    ThresholdLevel { k: u32, max: u32 },
    #[error("non-finite threshold parameter")]
    NonFiniteParameter,
}

/// Membership masks for the low coordinate inside a single 64-bit word.
/// `LOW_MASKS[k]` selects the bit positions whose coordinate `k` is zero.
const LOW_MASKS: [u64; 6] = [
    0x5555_5555_5555_5555,
    0x3333_3333_3333_3333,
    0x0f0f_0f0f_0f0f_0f0f,
    0x00ff_00ff_00ff_00ff,
    0x0000_ffff_0000_ffff,
    0x0000_0000_ffff_ffff,
];

/// Validates a dimension against a caller-chosen cap.
pub fn validate_dimension(n: u32, cap: u32) -> Result<(), CubeError> {
    let cap = cap.min(HARD_DIMENSION_CAP);
    if n == 0 || n > cap {
        return Err(CubeError::DimensionOutOfRange { n, cap });
    }
    Ok(())
}

/// A subset of the discrete cube `{0,1}^n` with its cardinality cached.
///
/// Invariants: `words` holds exactly `2^n` valid bits (padding bits are
/// zero) and `count` equals the number of set bits.
#[derive(Clone, PartialEq, Eq)]
pub struct BooleanFamily {
    n: u32,
    words: Vec<u64>,
    count: u64,
}

impl std::fmt::Debug for BooleanFamily {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "BooleanFamily(n={}, count={})", self.n, self.count)
    }
}

fn word_len(n: u32) -> usize {
    if n < 6 {
        1
    } else {
        1 << (n - 6)
    }
}

/// Mask of valid bits in the single word of a small (`n < 6`) cube.
fn small_mask(n: u32) -> u64 {
    if n >= 6 {
        !0u64
    } else {
        (1u64 << (1u64 << n)) - 1
    }
}

impl BooleanFamily {
    /// Builds a family from a membership predicate evaluated at every point.
    pub fn from_fn<F: FnMut(u64) -> bool>(n: u32, mut member: F) -> Result<Self, CubeError> {
        validate_dimension(n, DEFAULT_DIMENSION_CAP)?;
        let size = 1u64 << n;
        let mut words = vec![0u64; word_len(n)];
        let mut count = 0u64;
        for point in 0..size {
            if member(point) {
                words[(point >> 6) as usize] |= 1u64 << (point & 63);
                count += 1;
            }
        }
        Ok(Self { n, words, count })
    }

    /// Builds a family from an explicit member list. Duplicates are allowed.
    pub fn from_members(n: u32, members: &[u64]) -> Result<Self, CubeError> {
        validate_dimension(n, DEFAULT_DIMENSION_CAP)?;
        let size = 1u64 << n;
        let mut words = vec![0u64; word_len(n)];
        for &point in members {
            if point >= size {
                return Err(CubeError::PointOutOfRange { point, n });
            }
            words[(point >> 6) as usize] |= 1u64 << (point & 63);
        }
        let count = words.iter().map(|w| u64::from(w.count_ones())).sum();
        Ok(Self { n, words, count })
    }

    /// Parses the little-endian hex dump produced by [`to_hex`](Self::to_hex).
    pub fn from_hex(n: u32, hex: &str) -> Result<Self, CubeError> {
        validate_dimension(n, DEFAULT_DIMENSION_CAP)?;
        let want = if n < 2 { 1 } else { 1usize << (n - 2) };
        if hex.len() != want {
            return Err(CubeError::HexLength { got: hex.len(), want, n });
        }
        let mut words = vec![0u64; word_len(n)];
        for (d, ch) in hex.chars().enumerate() {
            let nibble = ch.to_digit(16).ok_or(CubeError::HexDigit { digit: ch })? as u64;
            words[d / 16] |= nibble << (4 * (d % 16));
        }
        if n < 6 && words[0] & !small_mask(n) != 0 {
            return Err(CubeError::HexOverflow { n });
        }
        let count = words.iter().map(|w| u64::from(w.count_ones())).sum();
        Ok(Self { n, words, count })
    }

    /// Hex dump of the truth table, little endian: digit `d` encodes points
    /// `4d..4d+3`, least significant bit first.
    pub fn to_hex(&self) -> String {
        let digits = if self.n < 2 { 1 } else { 1usize << (self.n - 2) };
        let mut out = String::with_capacity(digits);
        for d in 0..digits {
            let nibble = (self.words[d / 16] >> (4 * (d % 16))) & 0xf;
            out.push(char::from_digit(nibble as u32, 16).unwrap());
        }
        out
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    /// Number of member points.
    pub fn count(&self) -> u64 {
        self.count
    }

    /// Total number of points, `2^n`.
    pub fn size(&self) -> u64 {
        1u64 << self.n
    }

    /// Normalized counting measure of the family, exactly `count / 2^n`.
    pub fn measure(&self) -> BigRational {
        BigRational::new(BigInt::from(self.count), BigInt::one() << self.n)
    }

    pub fn contains(&self, point: u64) -> bool {
        point < self.size() && self.words[(point >> 6) as usize] >> (point & 63) & 1 == 1
    }

    /// Iterates over member points in increasing order.
    pub fn iter_members(&self) -> impl Iterator<Item = u64> + '_ {
        let size = self.size();
        (0..size).filter(move |&p| self.contains(p))
    }

    pub fn complement(&self) -> Self {
        let mut words: Vec<u64> = self.words.iter().map(|w| !w).collect();
        if self.n < 6 {
            words[0] &= small_mask(self.n);
        }
        Self { n: self.n, words, count: self.size() - self.count }
    }

    /// Exact count of points lying in both families.
    pub fn intersection_count(&self, other: &Self) -> Result<u64, CubeError> {
        self.check_same_cube(other)?;
        Ok(self
            .words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| u64::from((a & b).count_ones()))
            .sum())
    }

    pub(crate) fn check_same_cube(&self, other: &Self) -> Result<(), CubeError> {
        if self.n != other.n {
            return Err(CubeError::DimensionMismatch { left: self.n, right: other.n });
        }
        Ok(())
    }

    /// One pass of per-coordinate pair statistics over the packed table.
    ///
    /// For each coordinate `k` the table splits into pairs `(x, x + e_k)`.
    /// `pivot[k]` counts pairs where membership differs, which equals
    /// `|{x : 1_A(x) != 1_A(x xor e_k)}| / 2`; `ones[k]` counts members with
    /// coordinate `k` set; `violation[k]` records a member at the bottom of a
    /// pair whose top is missing, i.e. a witness against upward closure.
    pub(crate) fn coordinate_tallies(&self) -> CoordinateTallies {
        let n = self.n as usize;
        let mut pivot = vec![0u64; n];
        let mut ones = vec![0u64; n];
        let mut violation = vec![false; n];
        for k in 0..n {
            let (mut piv, mut one) = (0u64, 0u64);
            let mut viol = 0u64;
            if k < 6 {
                let mask = LOW_MASKS[k];
                let shift = 1u32 << k;
                for &w in &self.words {
                    let lo = w & mask;
                    let hi = (w >> shift) & mask;
                    piv += u64::from((lo ^ hi).count_ones());
                    one += u64::from(hi.count_ones());
                    viol |= lo & !hi;
                }
            } else {
                let stride = 1usize << (k - 6);
                let mut base = 0;
                while base < self.words.len() {
                    for off in 0..stride {
                        let lo = self.words[base + off];
                        let hi = self.words[base + off + stride];
                        piv += u64::from((lo ^ hi).count_ones());
                        one += u64::from(hi.count_ones());
                        viol |= lo & !hi;
                    }
                    base += 2 * stride;
                }
            }
            pivot[k] = piv;
            ones[k] = one;
            violation[k] = viol != 0;
        }
        CoordinateTallies { pivot, ones, violation }
    }
}

pub(crate) struct CoordinateTallies {
    pub pivot: Vec<u64>,
    pub ones: Vec<u64>,
    pub violation: Vec<bool>,
}
