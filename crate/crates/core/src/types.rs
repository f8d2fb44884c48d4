//! Per-ONU vector types shared across policies, objective, and simulator.

use core::ops::{Deref, DerefMut};

use crate::config::PonConfig;
use crate::scalar::{fl_usize, Scalar};

/// Window lengths granted to each ONU for one cycle, indexed by ONU.
/// Feasible when every entry is non-negative and the sum stays within the
/// usable capacity.
#[derive(Debug, Clone, PartialEq)]
pub struct AllocationVector<F>(pub Vec<F>);

/// Queued traffic amount per ONU at some observation instant, indexed by
/// ONU. Entries are non-negative.
#[derive(Debug, Clone, PartialEq)]
pub struct DemandVector<F>(pub Vec<F>);

/// Per-ONU utility weights `w[i] = b[i] * p_{slice(i)}`.
#[derive(Debug, Clone, PartialEq)]
pub struct EffectiveWeights<F>(pub Vec<F>);

macro_rules! vec_newtype_impls {
    ($name:ident) => {
        impl<F> Deref for $name<F> {
            type Target = [F];
            fn deref(&self) -> &[F] {
                &self.0
            }
        }
        impl<F> DerefMut for $name<F> {
            fn deref_mut(&mut self) -> &mut [F] {
                &mut self.0
            }
        }
        impl<F: Scalar> $name<F> {
            pub fn zeros(n: usize) -> Self {
                Self(vec![F::zero(); n])
            }
            pub fn total(&self) -> F {
                self.0.iter().fold(F::zero(), |acc, &v| acc + v)
            }
        }
    };
}

vec_newtype_impls!(AllocationVector);
vec_newtype_impls!(DemandVector);
vec_newtype_impls!(EffectiveWeights);

impl<F: Scalar> AllocationVector<F> {
    /// The cold-start allocation: the usable capacity split evenly.
    pub fn uniform(num_onus: usize, cap: F) -> Self {
        AllocationVector(vec![cap / fl_usize(num_onus); num_onus])
    }

    /// Non-negative entries summing to at most `cap`, within `tol` slack.
    pub fn is_feasible(&self, cap: F, tol: F) -> bool {
        self.0.iter().all(|&v| v >= -tol) && self.total() <= cap + tol
    }
}

impl<F: Scalar> EffectiveWeights<F> {
    /// Weights coupling demand with the owning slice's priority.
    pub fn from_demand(demand: &DemandVector<F>, config: &PonConfig<F>) -> Self {
        debug_assert_eq!(demand.len(), config.num_onus);
        EffectiveWeights(
            demand
                .iter()
                .enumerate()
                .map(|(i, &b)| b * config.slice_weights[config.slice_of[i]])
                .collect(),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn uniform_allocation_is_feasible() {
        let x = AllocationVector::<f64>::uniform(10, 1.0);
        assert!(x.is_feasible(1.0, 1e-12));
        assert!((x.total() - 1.0).abs() < 1e-12);
        assert_eq!(x[3], 0.1);
    }

    #[test]
    fn feasibility_rejects_negative_and_oversum() {
        let x = AllocationVector(vec![0.5, -0.1]);
        assert!(!x.is_feasible(1.0, 1e-9));
        let y = AllocationVector(vec![0.8, 0.4]);
        assert!(!y.is_feasible(1.0, 1e-9));
    }

    #[test]
    fn weights_couple_demand_and_slice_priority() {
        let config = crate::config::PonConfig::<f64>::builder(4)
            .lambdas(vec![1.0; 4])
            .slice_of(vec![0, 0, 1, 1])
            .slice_weights(vec![1.0, 1.2])
            .build();
        let b = DemandVector(vec![2.0, 0.0, 1.0, 0.5]);
        let w = EffectiveWeights::from_demand(&b, &config);
        assert_eq!(w.0, vec![2.0, 0.0, 1.2, 0.6]);
        // w[i] = 0 exactly when b[i] = 0: slice weights are positive.
        assert_eq!(w[1], 0.0);
    }
}
