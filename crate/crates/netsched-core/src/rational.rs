//! Exact rational probabilities.
//!
//! Probability grids, sum-to-one tests, and schedule frequencies must be
//! exact: the grid sum-to-one test is ill-posed in floating point (e.g. three
//! steps of 1/10 never sum to 0.3 exactly).  All probabilities in this crate
//! are therefore [`Prob`] values — reduced `i64` ratios — and only convert to
//! `f64` at the final numerical use site.

use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{One, Signed, Zero};

use crate::error::Error;
use crate::Result;
use alloc::vec::Vec;

/// An exact probability (or step size): a reduced ratio of 64-bit integers.
pub type Prob = Ratio<i64>;

/// Checks that `p` lies strictly between 0 and 1.
pub fn check_probability(p: Prob) -> Result<()> {
    if p > Prob::zero() && p < Prob::one() {
        Ok(())
    } else {
        Err(Error::InvalidProbability)
    }
}

/// Converts an exact probability to `f64` (numerator / denominator).
pub fn to_f64(p: Prob) -> f64 {
    *p.numer() as f64 / *p.denom() as f64
}

/// Complement `1 − p`, exact.
pub fn complement(p: Prob) -> Prob {
    Prob::one() - p
}

/// The largest integer `r` with `r·h < 1`, for a step `h = a/b ∈ ]0, 1[`:
/// `r·a < b` ⟺ `r = ⌈b/a⌉ − 1 = (b − 1) div a`.
pub fn grid_max_multiple(h: Prob) -> Result<i64> {
    check_probability(h)?;
    Ok((h.denom() - 1).div_euclid(*h.numer()))
}

/// Rewrites the probabilities over one common denominator `D`, returning
/// `(D, numerators)` with `p_j = numerators[j] / D` exactly.  Used for exact
/// integer sampling: a uniform draw from `[0, D)` lands in block `j` with
/// probability `p_j`, no floating point involved.
pub fn common_denominator(probs: &[Prob]) -> Result<(u64, Vec<u64>)> {
    let mut lcm: i64 = 1;
    for p in probs {
        check_probability(*p)?;
        let d = *p.denom();
        let g = lcm.gcd(&d);
        lcm = (lcm / g)
            .checked_mul(d)
            .ok_or(Error::RationalOverflow {
                context: "common denominator of probability vector",
            })?;
    }
    let mut numerators = Vec::with_capacity(probs.len());
    for p in probs {
        let scaled = p
            .numer()
            .checked_mul(lcm / p.denom())
            .ok_or(Error::RationalOverflow {
                context: "scaling probability to common denominator",
            })?;
        numerators.push(scaled as u64);
    }
    Ok((lcm as u64, numerators))
}

/// Checks that the probabilities sum to exactly 1 (rational arithmetic; no
/// floating-point comparison anywhere).
pub fn sums_to_one(probs: &[Prob]) -> bool {
    let mut acc = Prob::zero();
    for p in probs {
        acc += p;
    }
    acc.is_one()
}

/// Floor of `q` as an `i64` (exact; `q` must be non-negative).
pub fn floor_nonneg(q: Prob) -> i64 {
    debug_assert!(!q.is_negative());
    q.to_integer()
}

/// Returns `k` such that `q = k·h` exactly, if such an integer exists.
/// Cross-products are taken in `i128`, so no overflow is possible for
/// reduced `i64` ratios.
pub fn exact_multiple(q: Prob, h: Prob) -> Option<i64> {
    let num = i128::from(*q.numer()) * i128::from(*h.denom());
    let den = i128::from(*q.denom()) * i128::from(*h.numer());
    if den == 0 || num % den != 0 {
        return None;
    }
    i64::try_from(num / den).ok()
}
