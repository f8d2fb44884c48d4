//! Cycle-driven TDM upstream simulator.
//!
//! Each cycle: the policy fixes the windows from history, traffic arrives
//! (a reported batch and, under a positive `delta_t`, a hidden batch the
//! reports cannot see), windows are laid out back to back with guards, and
//! queues drain FIFO inside their windows. Queue amounts observed at each
//! window start become the next cycle's policy input.

use std::collections::VecDeque;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson};

use crate::policies::DbaPolicy;
use crate::scalar::{fl, fl_usize, Scalar};
use crate::trace::{CompletedPacket, CycleRecord, SimulationTrace};
use crate::types::{AllocationVector, DemandVector};
use crate::PonConfig;

/// One fixed-size packet. `departure` is set when it finishes transmitting.
#[derive(Debug, Clone, PartialEq)]
pub struct Packet<F> {
    pub onu: usize,
    pub arrival: F,
    pub size: F,
    pub departure: Option<F>,
}

/// Per-ONU FIFO queues, ordered by arrival time.
#[derive(Debug)]
pub struct QueueState<F> {
    pub queues: Vec<VecDeque<Packet<F>>>,
}

impl<F: Scalar> QueueState<F> {
    pub fn new(num_onus: usize) -> Self {
        QueueState {
            queues: (0..num_onus).map(|_| VecDeque::new()).collect(),
        }
    }

    /// Packets of `onu` present with arrival at or before `instant`.
    pub fn queued_by(&self, onu: usize, instant: F) -> usize {
        self.queues[onu].partition_point(|p| p.arrival <= instant)
    }
}

/// Window start offsets within one cycle, relative to the cycle start:
/// windows sit back to back, each followed by its guard.
pub fn window_offsets<F: Scalar>(x: &AllocationVector<F>, config: &PonConfig<F>) -> Vec<F> {
    debug_assert_eq!(x.len(), config.num_onus);
    let mut starts = Vec::with_capacity(x.len());
    let mut cursor = F::zero();
    for i in 0..x.len() {
        starts.push(cursor);
        cursor = cursor + x[i] + config.guards[i];
    }
    starts
}

/// Drains the front of a FIFO queue inside `[window_start, window_start +
/// window_len]`. A packet transmits at the later of the line becoming free
/// and its own arrival, and only if it finishes inside the window; the
/// first packet that cannot blocks everything behind it.
pub fn serve_window<F: Scalar>(
    queue: &mut VecDeque<Packet<F>>,
    window_start: F,
    window_len: F,
) -> Vec<Packet<F>> {
    let end = window_start + window_len;
    let mut cursor = window_start;
    let mut served = Vec::new();
    while let Some(front) = queue.front() {
        let begin = cursor.max(front.arrival);
        let depart = begin + front.size;
        if depart > end {
            break;
        }
        let mut packet = queue.pop_front().expect("front exists");
        packet.departure = Some(depart);
        cursor = depart;
        served.push(packet);
    }
    served
}

/// Poisson arrivals for one ONU and one cycle, split into the reported
/// batch (uniform over the cycle minus the lag) and the hidden batch
/// (uniform over the final `delta_t`, mean `lambda * delta_t` packets).
/// Zero-rate batches draw nothing from the RNG.
pub fn generate_arrivals<F: Scalar, R: Rng>(
    rng: &mut R,
    lambda: f64,
    config: &PonConfig<F>,
    cycle: usize,
) -> (Vec<Packet<F>>, Vec<Packet<F>>) {
    let c = config.cycle_length.to_f64().unwrap();
    let dt = config.delta_t.to_f64().unwrap();
    let cycle_start = cycle as f64 * c;
    let reported_len = (c - dt).max(0.0);
    let reported = sample_batch(rng, lambda, cycle_start, reported_len, config);
    let hidden_rate = lambda * (dt / c);
    let hidden = sample_batch(
        rng,
        hidden_rate,
        cycle_start + reported_len,
        c - reported_len,
        config,
    );
    (reported, hidden)
}

fn sample_batch<F: Scalar, R: Rng>(
    rng: &mut R,
    rate: f64,
    segment_start: f64,
    segment_len: f64,
    config: &PonConfig<F>,
) -> Vec<Packet<F>> {
    if rate <= 0.0 {
        return Vec::new();
    }
    let count = Poisson::new(rate).expect("positive rate").sample(rng) as usize;
    let mut times: Vec<f64> = (0..count)
        .map(|_| {
            if segment_len > 0.0 {
                segment_start + rng.random_range(0.0..segment_len)
            } else {
                segment_start
            }
        })
        .collect();
    times.sort_by(f64::total_cmp);
    times
        .into_iter()
        .map(|at| Packet {
            onu: usize::MAX, // set by the caller
            arrival: fl(at),
            size: config.unit_time,
            departure: None,
        })
        .collect()
}

/// Runs `cycles` cycles under the given policy and returns the full trace.
/// Identical `(config, policy, cycles, seed)` reproduce the trace exactly.
pub fn run_simulation<F: Scalar>(
    config: &PonConfig<F>,
    mut policy: DbaPolicy<F>,
    cycles: usize,
    seed: u64,
) -> SimulationTrace<F> {
    debug_assert!(config.validate().is_ok());
    let n = config.num_onus;
    let s = config.unit_time;
    let delta_t = config.delta_t;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut queues = QueueState::new(n);
    // Completed transmissions still relevant to lagged queue snapshots.
    let mut recent: Vec<VecDeque<(F, F)>> = vec![VecDeque::new(); n];
    let mut seen_by_prev_ws = vec![0u64; n];
    let mut served_total = vec![0u64; n];

    let policy_label = policy.label();
    let mut trace = SimulationTrace {
        config: config.clone(),
        seed,
        policy_label,
        cycles: Vec::with_capacity(cycles),
        packets: Vec::new(),
        leftover_packets: 0,
    };

    for t in 0..cycles {
        let allocation = policy.decide(config);
        policy.state.record_allocation(allocation.clone());
        let offsets = window_offsets(&allocation, config);
        let cycle_start = fl_usize::<F>(t) * config.cycle_length;

        for onu in 0..n {
            let lambda = config.lambdas[onu].to_f64().unwrap();
            let (reported, hidden) = generate_arrivals(&mut rng, lambda, config, t);
            for mut p in reported.into_iter().chain(hidden) {
                p.onu = onu;
                queues.queues[onu].push_back(p);
            }
        }

        let mut demand = Vec::with_capacity(n);
        let mut report = Vec::with_capacity(n);
        let mut served_amount = Vec::with_capacity(n);
        let mut demand_packets = Vec::with_capacity(n);
        let mut served_packets = Vec::with_capacity(n);
        let mut arrived_packets = Vec::with_capacity(n);

        for onu in 0..n {
            let ws = cycle_start + offsets[onu];
            let queued = queues.queued_by(onu, ws) as u64;
            demand_packets.push(queued);
            demand.push(fl_usize::<F>(queued as usize) * s);

            let seen_now = served_total[onu] + queued;
            arrived_packets.push(seen_now - seen_by_prev_ws[onu]);
            seen_by_prev_ws[onu] = seen_now;

            // Lagged snapshot: what the queue held delta_t before the
            // window opened. Recently completed packets that were still
            // queued at that instant count too.
            let tau = ws - delta_t;
            let mut snapshot = queues.queued_by(onu, tau);
            snapshot += recent[onu]
                .iter()
                .filter(|&&(arrival, departure)| arrival <= tau && departure > tau)
                .count();
            report.push(fl_usize::<F>(snapshot) * s);

            let served = serve_window(&mut queues.queues[onu], ws, allocation[onu]);
            served_packets.push(served.len() as u64);
            served_total[onu] += served.len() as u64;
            served_amount.push(fl_usize::<F>(served.len()) * s);
            for p in served {
                let departure = p.departure.expect("served packets depart");
                recent[onu].push_back((p.arrival, departure));
                trace.packets.push(CompletedPacket {
                    onu,
                    arrival: p.arrival,
                    departure,
                });
            }
            let horizon = cycle_start - delta_t;
            while recent[onu]
                .front()
                .is_some_and(|&(_, departure)| departure <= horizon)
            {
                recent[onu].pop_front();
            }
        }

        let demand = DemandVector(demand);
        let report = DemandVector(report);
        policy.state.record_cycle(demand.clone(), report.clone());
        trace.cycles.push(CycleRecord {
            allocation,
            demand,
            report,
            served: served_amount,
            demand_packets,
            served_packets,
            arrived_packets,
        });
    }
    trace.leftover_packets = queues.queues.iter().map(VecDeque::len).sum();
    trace
}
