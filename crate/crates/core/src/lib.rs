//! Discrete-time simulator for upstream bandwidth allocation in a TDM
//! passive optical network.
//!
//! Each cycle the OLT hands every ONU a transmission window sized by a
//! pluggable DBA policy. The policies on offer are an online
//! projected-gradient allocator maximizing a slice-weighted logarithmic
//! utility, a report-capped baseline, and a moving-average predictor.
//! Offline solvers for the hindsight-optimal allocation and metrics
//! (latency, fairness spread, regret) round out the crate.
//!
//! All math is generic over the scalar type through [`Scalar`]; the
//! simulator and CLI run on `f64` (see the aliases at the crate root).

pub mod config;
pub mod metrics;
pub mod objective;
pub mod policies;
pub mod projection;
pub mod scalar;
pub mod simulator;
pub mod trace;
pub mod types;

pub use config::{ConfigError, PonConfig};
pub use objective::ObjectiveInstance;
pub use policies::{DbaPolicy, PolicyKind, PolicyState, StepSchedule};
pub use scalar::Scalar;
pub use simulator::run_simulation;
pub use trace::SimulationTrace;
pub use types::{AllocationVector, DemandVector, EffectiveWeights};

// Concrete aliases for the scalar type the binaries and most tests use.
pub type PonConfig64 = config::PonConfig<f64>;
pub type Allocation64 = types::AllocationVector<f64>;
pub type Demand64 = types::DemandVector<f64>;
pub type Policy64 = policies::DbaPolicy<f64>;
pub type Trace64 = trace::SimulationTrace<f64>;
