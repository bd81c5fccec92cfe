//! Exact counting statistics on families: measures, influences, first-level
//! Fourier coefficients, covariances, and the influence inner product.
//!
//! The influence of coordinate `k` on a family `A` is
//! `I_k(A) = 2 mu({x in A : x xor e_k not in A})`, the measure of members
//! whose `k`-flip leaves the family, doubled so an increasing family has
//! `I_k` equal to its first-level coefficient. Every quantity below is an
//! exact rational with a power-of-two denominator.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::family::{BooleanFamily, CubeError};

/// Structural summary of a family: measure plus the three predicates the
/// bound audits gate on.
#[derive(Debug, Clone, PartialEq)]
pub struct FamilyProfile {
    pub measure: BigRational,
    /// Closed upward: flipping any coordinate from 0 to 1 keeps membership.
    pub increasing: bool,
    /// Measure exactly 1/2.
    pub balanced: bool,
    /// All coordinate influences equal.
    pub regular: bool,
}

/// Per-coordinate influences and their sum, all exact.
#[derive(Debug, Clone, PartialEq)]
pub struct InfluenceProfile {
    pub per_coordinate: Vec<BigRational>,
    pub total: BigRational,
}

impl BooleanFamily {
    /// Classifies the family. Empty and full families are vacuously
    /// increasing and regular.
    pub fn classify(&self) -> FamilyProfile {
        let tallies = self.coordinate_tallies();
        let increasing = tallies.violation.iter().all(|&v| !v);
        let regular = tallies.pivot.windows(2).all(|w| w[0] == w[1]);
        FamilyProfile {
            measure: self.measure(),
            increasing,
            balanced: 2 * self.count() == self.size(),
            regular,
        }
    }

    /// Exact influences `I_k = pivot_k / 2^(n-1)` where `pivot_k` counts the
    /// coordinate-`k` pairs on which membership differs.
    pub fn influence_profile(&self) -> InfluenceProfile {
        let tallies = self.coordinate_tallies();
        let den: BigInt = BigInt::one() << (self.n() - 1);
        let per_coordinate: Vec<BigRational> = tallies
            .pivot
            .iter()
            .map(|&p| BigRational::new(BigInt::from(p), den.clone()))
            .collect();
        let total = per_coordinate.iter().sum();
        InfluenceProfile { per_coordinate, total }
    }

    /// First-level Fourier coefficients of the `{-1,1}`-valued indicator:
    /// coefficient `k` is `E[(2 1_A - 1)(2 x_k - 1)]`, which reduces to the
    /// exact count difference `(2 ones_k - |A|) / 2^(n-1)`. For an increasing
    /// family this equals `I_k`; in general it may be negative.
    pub fn first_level_coefficients(&self) -> Vec<BigRational> {
        let tallies = self.coordinate_tallies();
        let den: BigInt = BigInt::one() << (self.n() - 1);
        tallies
            .ones
            .iter()
            .map(|&ones| {
                let num = BigInt::from(2 * i128::from(ones) - i128::from(self.count()));
                BigRational::new(num, den.clone())
            })
            .collect()
    }

    /// Exact covariance of the indicator functions,
    /// `|A and B| / 2^n - |A| |B| / 4^n`.
    pub fn covariance(&self, other: &Self) -> Result<BigRational, CubeError> {
        let both = self.intersection_count(other)?;
        let n = self.n();
        let num = (BigInt::from(both) << n) - BigInt::from(self.count()) * BigInt::from(other.count());
        Ok(BigRational::new(num, BigInt::one() << (2 * n)))
    }

    /// Measure of the agreement set `{x : 1_A(x) = 1_B(x)}`.
    pub fn agreement(&self, other: &Self) -> Result<BigRational, CubeError> {
        let both = self.intersection_count(other)?;
        let neither = self.complement().intersection_count(&other.complement())?;
        Ok(BigRational::new(BigInt::from(both + neither), BigInt::one() << self.n()))
    }

    /// Influence inner product `W1(A, B) = sum_k I_k(A) I_k(B)`, exact.
    pub fn w1(&self, other: &Self) -> Result<BigRational, CubeError> {
        self.check_same_cube(other)?;
        let a = self.coordinate_tallies();
        let b = other.coordinate_tallies();
        let mut num = BigInt::zero();
        for (pa, pb) in a.pivot.iter().zip(&b.pivot) {
            num += BigInt::from(pa * pb);
        }
        Ok(BigRational::new(num, BigInt::one() << (2 * (self.n() - 1))))
    }
}

/// Convenience for tests and audits: rational from integer pair.
pub fn ratio(num: i64, den: u64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// True when `q` is exactly zero or positive.
pub fn is_nonnegative(q: &BigRational) -> bool {
    !q.is_negative()
}
