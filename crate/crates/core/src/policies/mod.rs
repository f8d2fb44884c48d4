//! DBA policies: the online projected-gradient allocator and the two
//! baselines it is measured against.
//!
//! Policies are pure functions of [`PolicyState`], which the simulator
//! feeds with one demand/report pair per finished cycle. Decisions for
//! cycle `t` therefore see history up to cycle `t-1` only.

mod hindsight;

pub use hindsight::{
    brute_force_optimum, hindsight_optimum, SolverError, DEFAULT_ITERATION_CAP, DEFAULT_SOLVER_TOL,
};

use crate::objective::{subgradient, ObjectiveInstance};
use crate::projection::{project_capped_simplex, radial_rescale};
use crate::scalar::{fl_usize, Scalar};
use crate::types::{AllocationVector, DemandVector};
use crate::PonConfig;

/// Step-size decay for the projected-gradient policy.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StepSchedule {
    /// `eta_0 / sqrt(t)`; the default.
    InverseSqrt,
    /// `eta_0 / t`.
    InverseLinear,
}

impl StepSchedule {
    /// Step size for update number `t` (1-based).
    pub fn step_size<F: Scalar>(self, eta0: F, t: usize) -> F {
        debug_assert!(t >= 1);
        match self {
            StepSchedule::InverseSqrt => eta0 / fl_usize::<F>(t).sqrt(),
            StepSchedule::InverseLinear => eta0 / fl_usize(t),
        }
    }
}

/// Everything a policy may remember between cycles.
#[derive(Debug, Clone)]
pub struct PolicyState<F> {
    /// Allocation granted for the previous cycle.
    pub previous_allocation: AllocationVector<F>,
    /// Actual queued amounts observed at window start, one entry per
    /// finished cycle.
    pub demand_history: Vec<DemandVector<F>>,
    /// Report snapshots (lagged queue views), aligned with
    /// `demand_history`.
    pub report_history: Vec<DemandVector<F>>,
    /// Number of finished cycles; equals both history lengths.
    pub step_index: usize,
    /// Base step size for the gradient policy.
    pub eta0: F,
    pub schedule: StepSchedule,
}

impl<F: Scalar> PolicyState<F> {
    pub fn new(config: &PonConfig<F>, eta0: F, schedule: StepSchedule) -> Self {
        PolicyState {
            previous_allocation: AllocationVector::uniform(config.num_onus, config.capacity()),
            demand_history: Vec::new(),
            report_history: Vec::new(),
            step_index: 0,
            eta0,
            schedule,
        }
    }

    /// Appends one finished cycle's observations.
    pub fn record_cycle(&mut self, demand: DemandVector<F>, report: DemandVector<F>) {
        debug_assert_eq!(demand.len(), report.len());
        self.demand_history.push(demand);
        self.report_history.push(report);
        self.step_index += 1;
        debug_assert_eq!(self.step_index, self.demand_history.len());
        debug_assert_eq!(self.step_index, self.report_history.len());
    }

    pub fn record_allocation(&mut self, x: AllocationVector<F>) {
        self.previous_allocation = x;
    }
}

/// Which decision rule to run on top of the shared state.
#[derive(Debug, Clone, PartialEq)]
pub enum PolicyKind<F> {
    /// Online projected gradient on the slice-weighted log utility.
    Oco,
    /// Grant last cycle's report, capped per ONU at `max_window`.
    MaxWin { max_window: F },
    /// Grant the mean of the last `horizon` actual demands.
    AvgPred { horizon: usize },
}

/// A decision rule bundled with its memory; one instance drives one
/// simulation run.
#[derive(Debug, Clone)]
pub struct DbaPolicy<F> {
    pub kind: PolicyKind<F>,
    pub state: PolicyState<F>,
}

/// Default base step size for the gradient policy.
pub const DEFAULT_ETA0: f64 = 0.1;

impl<F: Scalar> DbaPolicy<F> {
    pub fn oco(config: &PonConfig<F>, eta0: F, schedule: StepSchedule) -> Self {
        DbaPolicy {
            kind: PolicyKind::Oco,
            state: PolicyState::new(config, eta0, schedule),
        }
    }

    pub fn maxwin(config: &PonConfig<F>, max_window: F) -> Self {
        DbaPolicy {
            kind: PolicyKind::MaxWin { max_window },
            state: PolicyState::new(config, F::zero(), StepSchedule::InverseSqrt),
        }
    }

    pub fn avgpred(config: &PonConfig<F>, horizon: usize) -> Self {
        DbaPolicy {
            kind: PolicyKind::AvgPred { horizon },
            state: PolicyState::new(config, F::zero(), StepSchedule::InverseSqrt),
        }
    }

    pub fn decide(&self, config: &PonConfig<F>) -> AllocationVector<F> {
        policy_decide(&self.kind, &self.state, config)
    }

    /// Stable label used in file names and CSV rows.
    pub fn label(&self) -> String {
        match &self.kind {
            PolicyKind::Oco => "oco".to_string(),
            PolicyKind::MaxWin { max_window } => {
                format!("maxwin_m{}", max_window.to_f64().unwrap_or(f64::NAN))
            }
            PolicyKind::AvgPred { horizon } => format!("avgpred_h{horizon}"),
        }
    }
}

/// Dispatches to the concrete rule. Total: any state yields a feasible
/// allocation. With no finished cycles every rule falls back to the
/// uniform split.
pub fn policy_decide<F: Scalar>(
    kind: &PolicyKind<F>,
    state: &PolicyState<F>,
    config: &PonConfig<F>,
) -> AllocationVector<F> {
    let cap = config.capacity();
    if state.demand_history.is_empty() {
        return AllocationVector::uniform(config.num_onus, cap);
    }
    match kind {
        PolicyKind::Oco => oco_step(state, config),
        PolicyKind::MaxWin { max_window } => {
            maxwin_decide(state.report_history.last().unwrap(), *max_window, cap)
        }
        PolicyKind::AvgPred { horizon } => {
            avgpred_decide(&state.demand_history, *horizon, cap, config.num_onus)
        }
    }
}

/// One projected-gradient update: descend the last cycle's loss from the
/// last allocation, then project back onto the feasible set.
pub fn oco_step<F: Scalar>(state: &PolicyState<F>, config: &PonConfig<F>) -> AllocationVector<F> {
    let cap = config.capacity();
    let demand = match state.demand_history.last() {
        Some(d) => d.clone(),
        None => return AllocationVector::uniform(config.num_onus, cap),
    };
    let inst = ObjectiveInstance::new(demand, config);
    let grad = subgradient(&state.previous_allocation, &inst);
    let eta = state.schedule.step_size(state.eta0, state.step_index);
    let stepped: Vec<F> = state
        .previous_allocation
        .iter()
        .zip(&grad)
        .map(|(&xi, &gi)| xi - eta * gi)
        .collect();
    project_capped_simplex(&stepped, cap)
}

/// Grant each ONU its reported queue, capped at `max_window`, then rescale
/// radially if the grants oversubscribe the cycle.
pub fn maxwin_decide<F: Scalar>(
    reports: &DemandVector<F>,
    max_window: F,
    cap: F,
) -> AllocationVector<F> {
    let raw: Vec<F> = reports.iter().map(|&r| r.min(max_window)).collect();
    radial_rescale(&raw, cap)
}

/// Grant each ONU the mean of its most recent `min(horizon, available)`
/// actual demands, rescaled radially if needed.
pub fn avgpred_decide<F: Scalar>(
    history: &[DemandVector<F>],
    horizon: usize,
    cap: F,
    num_onus: usize,
) -> AllocationVector<F> {
    if history.is_empty() {
        return AllocationVector::uniform(num_onus, cap);
    }
    let take = horizon.min(history.len()).max(1);
    let recent = &history[history.len() - take..];
    let denom = fl_usize::<F>(take);
    let raw: Vec<F> = (0..num_onus)
        .map(|i| {
            recent.iter().fold(F::zero(), |acc, d| acc + d[i]) / denom
        })
        .collect();
    radial_rescale(&raw, cap)
}
