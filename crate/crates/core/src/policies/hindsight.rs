//! Offline solvers: the hindsight-optimal static allocation for a demand
//! sequence, and an exhaustive grid search used to validate it in low
//! dimension.

use crate::projection::project_capped_simplex;
use crate::scalar::{fl, fl_usize, Scalar};
use crate::types::{AllocationVector, DemandVector};
use crate::PonConfig;

/// Stop once consecutive iterates move less than this (inf norm).
pub const DEFAULT_SOLVER_TOL: f64 = 1e-9;
/// Give up after this many projected-gradient iterations.
pub const DEFAULT_ITERATION_CAP: usize = 1_000_000;

/// Grid search refuses dimensions above this.
pub const BRUTE_FORCE_MAX_ONUS: usize = 3;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SolverError<F: core::fmt::Debug + Send + Sync + 'static> {
    #[error("projected descent hit the iteration cap with step displacement {last_displacement} still above tolerance")]
    NoConvergence {
        /// Best iterate found before giving up.
        best: AllocationVector<F>,
        last_displacement: f64,
    },
    #[error("grid search supports at most {limit} onus, got {num_onus}")]
    DimensionTooLarge { num_onus: usize, limit: usize },
}

/// The summed objective over a demand sequence, arranged per ONU so that
/// value and gradient cost `O(N log T)` per evaluation.
///
/// Per ONU the demand values act as breakpoints: a term contributes
/// `w * ln(x+1)` while `x` sits below its demand and the constant
/// `w * ln(b+1)` beyond it. Sorting the breakpoints turns both branches
/// into suffix/prefix sums around a binary search.
struct SummedObjective<F> {
    per_onu: Vec<OnuCurve<F>>,
    cap: F,
    inv_t: F,
}

struct OnuCurve<F> {
    /// Demand breakpoints, ascending.
    breakpoints: Vec<F>,
    /// `suffix_weight[k]` = total weight of breakpoints `k..`.
    suffix_weight: Vec<F>,
    /// `prefix_wlog[k]` = sum of `w * ln(b+1)` over breakpoints `..k`.
    prefix_wlog: Vec<F>,
}

impl<F: Scalar> OnuCurve<F> {
    fn build(mut pairs: Vec<(F, F)>) -> Self {
        pairs.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("finite demand"));
        let t = pairs.len();
        let mut suffix_weight = vec![F::zero(); t + 1];
        for k in (0..t).rev() {
            suffix_weight[k] = suffix_weight[k + 1] + pairs[k].1;
        }
        let mut prefix_wlog = vec![F::zero(); t + 1];
        for k in 0..t {
            prefix_wlog[k + 1] = prefix_wlog[k] + pairs[k].1 * (pairs[k].0 + F::one()).ln();
        }
        OnuCurve {
            breakpoints: pairs.into_iter().map(|(b, _)| b).collect(),
            suffix_weight,
            prefix_wlog,
        }
    }

    /// Summed utility contribution and its derivative at `x >= 0`. The
    /// derivative uses the same kink rule as the online subgradient: a
    /// breakpoint stops contributing once `x` reaches it.
    fn eval(&self, x: F) -> (F, F) {
        let k = self.breakpoints.partition_point(|&b| b <= x);
        let live = self.suffix_weight[k];
        let value = self.prefix_wlog[k] + live * (x + F::one()).ln();
        let slope = live / (x + F::one());
        (value, slope)
    }
}

impl<F: Scalar> SummedObjective<F> {
    fn build(demands: &[DemandVector<F>], config: &PonConfig<F>) -> Self {
        let n = config.num_onus;
        let per_onu = (0..n)
            .map(|i| {
                let p = config.weight_of(i);
                OnuCurve::build(
                    demands
                        .iter()
                        .map(|d| (d[i], d[i] * p))
                        .collect(),
                )
            })
            .collect();
        SummedObjective {
            per_onu,
            cap: config.capacity(),
            inv_t: F::one() / fl_usize(demands.len().max(1)),
        }
    }

    /// Mean loss (negated utility) and its gradient at `x`.
    fn mean_loss(&self, x: &[F], grad: &mut [F]) -> F {
        let mut total = F::zero();
        for (i, curve) in self.per_onu.iter().enumerate() {
            let (value, slope) = curve.eval(x[i]);
            total = total + value;
            grad[i] = -slope * self.inv_t;
        }
        -total * self.inv_t
    }
}

/// Best static allocation in hindsight for a demand sequence: minimizes the
/// summed loss over the capped simplex by projected gradient descent.
///
/// Steps start at `cap / |grad(x_0)|` and halve whenever an epoch of
/// iterations fails to improve the best loss seen, so the sequence decays
/// until the stop rule (`tol` on the inf-norm displacement) triggers. The
/// returned point is the best-loss iterate.
pub fn hindsight_optimum<F: Scalar>(
    demands: &[DemandVector<F>],
    config: &PonConfig<F>,
    tol: F,
) -> Result<AllocationVector<F>, SolverError<F>> {
    hindsight_optimum_with_cap(demands, config, tol, DEFAULT_ITERATION_CAP)
}

/// [`hindsight_optimum`] with an explicit iteration budget.
pub fn hindsight_optimum_with_cap<F: Scalar>(
    demands: &[DemandVector<F>],
    config: &PonConfig<F>,
    tol: F,
    iteration_cap: usize,
) -> Result<AllocationVector<F>, SolverError<F>> {
    const EPOCH: usize = 256;
    let objective = SummedObjective::build(demands, config);
    let n = config.num_onus;
    let cap = objective.cap;

    let mut x = AllocationVector::uniform(n, cap);
    let mut grad = vec![F::zero(); n];
    let mut best_loss = objective.mean_loss(&x, &mut grad);
    let mut best_x = x.clone();

    let grad_norm = grad
        .iter()
        .fold(F::zero(), |a, &g| a + g * g)
        .sqrt();
    let mut eta = if grad_norm > F::zero() {
        cap / grad_norm
    } else {
        F::one()
    };

    let mut epoch_best = best_loss;
    let mut last_displacement = f64::INFINITY;
    for k in 1..=iteration_cap {
        let stepped: Vec<F> = x.iter().zip(&grad).map(|(&xi, &gi)| xi - eta * gi).collect();
        let next = project_capped_simplex(&stepped, cap);
        let mut displacement = F::zero();
        for (a, b) in next.iter().zip(x.iter()) {
            displacement = displacement.max((*a - *b).abs());
        }
        last_displacement = displacement.to_f64().unwrap_or(f64::NAN);
        x = next;
        let loss = objective.mean_loss(&x, &mut grad);
        if loss < best_loss {
            best_loss = loss;
            best_x = x.clone();
        }
        if displacement < tol {
            return Ok(best_x);
        }
        if k % EPOCH == 0 {
            let threshold = fl::<F>(1e-15) * (F::one() + best_loss.abs());
            if epoch_best - best_loss <= threshold {
                eta = eta / fl(2.0);
            }
            epoch_best = best_loss;
        }
    }
    Err(SolverError::NoConvergence {
        best: best_x,
        last_displacement,
    })
}

/// Exhaustive reference optimum on the grid `{0, r, 2r, ...}^N` intersected
/// with the feasible set. Ties resolve to the lexicographically smallest
/// point. Only for `N <= 3`.
pub fn brute_force_optimum<F: Scalar>(
    demands: &[DemandVector<F>],
    config: &PonConfig<F>,
    resolution: F,
) -> Result<AllocationVector<F>, SolverError<F>> {
    let n = config.num_onus;
    if n > BRUTE_FORCE_MAX_ONUS {
        return Err(SolverError::DimensionTooLarge {
            num_onus: n,
            limit: BRUTE_FORCE_MAX_ONUS,
        });
    }
    let cap = config.capacity();
    let steps = (cap / resolution).to_f64().unwrap().floor() as usize;

    // The objective is separable per coordinate; tabulate each coordinate's
    // summed contribution over the grid once.
    let tables: Vec<Vec<F>> = (0..n)
        .map(|i| {
            let p = config.weight_of(i);
            let logcaps: Vec<F> = demands
                .iter()
                .map(|d| (d[i] + F::one()).ln())
                .collect();
            (0..=steps)
                .map(|g| {
                    let v = fl_usize::<F>(g) * resolution;
                    let lv = (v + F::one()).ln();
                    demands
                        .iter()
                        .zip(&logcaps)
                        .fold(F::zero(), |acc, (d, &lc)| acc + d[i] * p * lv.min(lc))
                })
                .collect()
        })
        .collect();

    let mut best_utility = F::neg_infinity();
    let mut best_idx = vec![0usize; n];
    let mut consider = |idx: &[usize], total: F| {
        if total > best_utility {
            best_utility = total;
            best_idx = idx.to_vec();
        }
    };
    match n {
        1 => {
            for a in 0..=steps {
                consider(&[a], tables[0][a]);
            }
        }
        2 => {
            for a in 0..=steps {
                for b in 0..=(steps - a) {
                    consider(&[a, b], tables[0][a] + tables[1][b]);
                }
            }
        }
        3 => {
            for a in 0..=steps {
                for b in 0..=(steps - a) {
                    let partial = tables[0][a] + tables[1][b];
                    for c in 0..=(steps - a - b) {
                        consider(&[a, b, c], partial + tables[2][c]);
                    }
                }
            }
        }
        _ => unreachable!("dimension checked above"),
    }
    Ok(AllocationVector(
        best_idx
            .into_iter()
            .map(|g| fl_usize::<F>(g) * resolution)
            .collect(),
    ))
}
