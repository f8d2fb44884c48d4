//! Euclidean projection onto the capped simplex, plus the ratio-preserving
//! rescale the baseline policies use.

use crate::scalar::{fl_usize, Scalar};
use crate::types::AllocationVector;

/// Euclidean projection of `y` onto `{x : x >= 0, sum(x) <= cap}`.
///
/// Negative entries are clipped first; if the clipped point already fits
/// under the cap it is returned as-is. Otherwise the projection lands on
/// the face `sum(x) = cap` and is found by the sort-and-threshold rule:
/// sort `y` descending, pick the largest prefix whose running threshold
/// `tau_j = (sum of prefix - cap) / j` stays below the prefix's last entry,
/// and subtract the final threshold from every entry, clipping at zero.
///
/// Inputs must be finite.
pub fn project_capped_simplex<F: Scalar>(y: &[F], cap: F) -> AllocationVector<F> {
    debug_assert!(cap >= F::zero());
    debug_assert!(y.iter().all(|v| v.is_finite()));
    let clipped_sum = y
        .iter()
        .fold(F::zero(), |acc, &v| acc + v.max(F::zero()));
    if clipped_sum <= cap {
        return AllocationVector(y.iter().map(|&v| v.max(F::zero())).collect());
    }

    let mut sorted = y.to_vec();
    sorted.sort_unstable_by(|a, b| b.partial_cmp(a).expect("finite input"));
    let mut prefix = F::zero();
    let mut tau = F::zero();
    for (j, &v) in sorted.iter().enumerate() {
        prefix = prefix + v;
        let theta = (prefix - cap) / fl_usize(j + 1);
        if v - theta > F::zero() {
            tau = theta;
        }
    }
    AllocationVector(y.iter().map(|&v| (v - tau).max(F::zero())).collect())
}

/// Scales `y` down radially onto the cap when it oversubscribes, keeping
/// the mutual ratios; feasible inputs pass through untouched.
pub fn radial_rescale<F: Scalar>(y: &[F], cap: F) -> AllocationVector<F> {
    debug_assert!(y.iter().all(|&v| v >= F::zero()));
    let total = y.iter().fold(F::zero(), |acc, &v| acc + v);
    if total <= cap {
        AllocationVector(y.to_vec())
    } else {
        let scale = cap / total;
        AllocationVector(y.iter().map(|&v| v * scale).collect())
    }
}
