//! The per-cycle allocation objective and its subgradient.
//!
//! For demand `b`, slice priorities `p`, and allocation `x`, the utility is
//!
//! ```text
//! f(x) = sum_i b[i] * p_{slice(i)} * min( ln(x[i]+1), ln(b[i]+1) )
//! ```
//!
//! Granting an ONU more than it queued earns nothing (the `min` caps the
//! term), so spare capacity flows to whoever still has queued traffic,
//! discounted by slice priority. Policies minimize the convex loss `-f`.

use crate::scalar::{fl, Scalar};
use crate::types::{AllocationVector, DemandVector, EffectiveWeights};
use crate::PonConfig;

/// Slack allowed when checking a point against the capacity constraint.
pub const FEASIBILITY_TOL: f64 = 1e-9;

/// One cycle's optimization data: observed demand, the weights it induces,
/// and the usable capacity.
#[derive(Debug, Clone)]
pub struct ObjectiveInstance<F> {
    pub demand: DemandVector<F>,
    pub weights: EffectiveWeights<F>,
    pub cap: F,
}

impl<F: Scalar> ObjectiveInstance<F> {
    pub fn new(demand: DemandVector<F>, config: &PonConfig<F>) -> Self {
        let weights = EffectiveWeights::from_demand(&demand, config);
        ObjectiveInstance {
            demand,
            weights,
            cap: config.capacity(),
        }
    }

    /// Instance with explicitly chosen weights; lengths must agree.
    pub fn with_weights(demand: DemandVector<F>, weights: EffectiveWeights<F>, cap: F) -> Self {
        debug_assert_eq!(demand.len(), weights.len());
        ObjectiveInstance {
            demand,
            weights,
            cap,
        }
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ObjectiveError {
    #[error("point is infeasible: {0}")]
    InfeasiblePoint(String),
    #[error("reference allocation has zero component at onu {0}; fairness ratio undefined")]
    ZeroReferenceComponent(usize),
}

/// Slice-weighted logarithmic utility of allocation `x`. Errors if `x`
/// breaks feasibility by more than [`FEASIBILITY_TOL`].
pub fn utility<F: Scalar>(
    x: &AllocationVector<F>,
    inst: &ObjectiveInstance<F>,
) -> Result<F, ObjectiveError> {
    debug_assert_eq!(x.len(), inst.demand.len());
    let tol = fl::<F>(FEASIBILITY_TOL);
    if let Some((i, &v)) = x.iter().enumerate().find(|&(_, &v)| v < -tol) {
        return Err(ObjectiveError::InfeasiblePoint(format!(
            "x[{i}] = {v} is negative"
        )));
    }
    let total = x.total();
    if total > inst.cap + tol {
        return Err(ObjectiveError::InfeasiblePoint(format!(
            "sum(x) = {total} exceeds cap = {}",
            inst.cap
        )));
    }
    let mut acc = F::zero();
    for i in 0..x.len() {
        let w = inst.weights[i];
        if w == F::zero() {
            continue;
        }
        let gain = (x[i] + F::one()).ln().min((inst.demand[i] + F::one()).ln());
        acc = acc + w * gain;
    }
    Ok(acc)
}

/// The convex loss the online policies minimize: `-utility`.
pub fn loss<F: Scalar>(
    x: &AllocationVector<F>,
    inst: &ObjectiveInstance<F>,
) -> Result<F, ObjectiveError> {
    utility(x, inst).map(|u| -u)
}

/// A subgradient of the loss at `x` (componentwise non-positive).
///
/// Where `x[i] < b[i]` the log branch is active and the derivative is
/// `-w[i] / (x[i] + 1)`; at and beyond the kink `x[i] >= b[i]` the flat
/// branch applies and the component is zero.
pub fn subgradient<F: Scalar>(x: &AllocationVector<F>, inst: &ObjectiveInstance<F>) -> Vec<F> {
    debug_assert_eq!(x.len(), inst.demand.len());
    (0..x.len())
        .map(|i| {
            if x[i] < inst.demand[i] {
                -inst.weights[i] / (x[i] + F::one())
            } else {
                F::zero()
            }
        })
        .collect()
}

/// Tests whether `x_star` is proportionally fair against each candidate:
/// `sum_i w[i] * (x[i] - x_star[i]) / x_star[i] <= tol` must hold for all
/// of them. Errors when a reference component is zero (corner optima make
/// the ratio undefined).
pub fn check_proportional_fairness<F: Scalar>(
    x_star: &AllocationVector<F>,
    w: &EffectiveWeights<F>,
    candidates: &[AllocationVector<F>],
) -> Result<bool, ObjectiveError> {
    debug_assert_eq!(x_star.len(), w.len());
    let tol = fl::<F>(FEASIBILITY_TOL);
    if let Some((i, _)) = x_star.iter().enumerate().find(|&(_, &v)| v <= F::zero()) {
        return Err(ObjectiveError::ZeroReferenceComponent(i));
    }
    for cand in candidates {
        debug_assert_eq!(cand.len(), x_star.len());
        let mut acc = F::zero();
        for i in 0..x_star.len() {
            acc = acc + w[i] * (cand[i] - x_star[i]) / x_star[i];
        }
        if acc > tol {
            return Ok(false);
        }
    }
    Ok(true)
}
