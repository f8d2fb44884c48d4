//! Post-run analysis: packet latency summaries and the regret of the
//! played allocation sequence against the best fixed allocation in
//! hindsight.

use std::io::{self, Write};

use crate::objective::{loss, ObjectiveInstance};
use crate::policies::{hindsight_optimum, SolverError};
use crate::scalar::{fl_usize, Scalar};
use crate::trace::SimulationTrace;
use crate::types::DemandVector;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum MetricsError {
    #[error("no packets completed transmission; latency is undefined")]
    NoCompletedTraffic,
}

/// Latency statistics of one run. Latency is measured from queue entry to
/// end of transmission. ONUs that completed nothing carry `None` and are
/// excluded from the spread statistic.
#[derive(Debug, Clone, PartialEq)]
pub struct LatencySummary<F> {
    pub per_onu_mean: Vec<Option<F>>,
    pub per_onu_count: Vec<usize>,
    /// Mean over every completed packet, all ONUs pooled.
    pub overall_mean: F,
    pub overall_count: usize,
    /// Population standard deviation of the per-ONU means.
    pub onu_mean_std: F,
}

pub fn latency_stats<F: Scalar>(
    trace: &SimulationTrace<F>,
) -> Result<LatencySummary<F>, MetricsError> {
    let n = trace.num_onus();
    let mut sums = vec![F::zero(); n];
    let mut counts = vec![0usize; n];
    for p in &trace.packets {
        sums[p.onu] = sums[p.onu] + p.latency();
        counts[p.onu] += 1;
    }
    let overall_count: usize = counts.iter().sum();
    if overall_count == 0 {
        return Err(MetricsError::NoCompletedTraffic);
    }
    let overall_mean = sums.iter().copied().sum::<F>() / fl_usize(overall_count);

    let per_onu_mean: Vec<Option<F>> = sums
        .iter()
        .zip(&counts)
        .map(|(&s, &c)| (c > 0).then(|| s / fl_usize(c)))
        .collect();

    let means: Vec<F> = per_onu_mean.iter().flatten().copied().collect();
    let k = fl_usize::<F>(means.len());
    let center = means.iter().copied().sum::<F>() / k;
    let variance = means
        .iter()
        .map(|&m| (m - center) * (m - center))
        .sum::<F>()
        / k;

    Ok(LatencySummary {
        per_onu_mean,
        per_onu_count: counts,
        overall_mean,
        overall_count,
        onu_mean_std: variance.sqrt(),
    })
}

/// Regret accumulated up to (and excluding) cycle `horizon`, against the
/// best fixed allocation for those same cycles.
#[derive(Debug, Clone, PartialEq)]
pub struct RegretPoint<F> {
    pub horizon: usize,
    pub played_loss: F,
    pub optimal_loss: F,
    pub regret: F,
}

impl<F: Scalar> RegretPoint<F> {
    pub fn per_cycle(&self) -> F {
        self.regret / fl_usize(self.horizon)
    }
}

/// Half-decade grid 100, 316, 1000, ... capped and terminated at `t_max`.
pub fn log_grid(t_max: usize) -> Vec<usize> {
    let mut grid = Vec::new();
    let mut k = 0u32;
    loop {
        let point = 10f64.powf(2.0 + k as f64 / 2.0).round() as usize;
        if point >= t_max {
            break;
        }
        grid.push(point);
        k += 1;
    }
    grid.push(t_max);
    grid
}

/// Evaluates regret at each horizon. Horizons must be increasing and at
/// most the trace length; per-cycle losses are shared across horizons so
/// the cost is one hindsight solve per grid point.
pub fn regret_curve<F: Scalar>(
    trace: &SimulationTrace<F>,
    horizons: &[usize],
    tol: F,
) -> Result<Vec<RegretPoint<F>>, SolverError<F>> {
    let demands: Vec<DemandVector<F>> = trace.cycles.iter().map(|c| c.demand.clone()).collect();
    let instances: Vec<ObjectiveInstance<F>> = demands
        .iter()
        .map(|b| ObjectiveInstance::new(b.clone(), &trace.config))
        .collect();
    let mut played_prefix = F::zero();
    let mut played_at = Vec::with_capacity(trace.cycles.len());
    for (cycle, instance) in trace.cycles.iter().zip(&instances) {
        played_prefix = played_prefix
            + loss(&cycle.allocation, instance).expect("recorded allocations are feasible");
        played_at.push(played_prefix);
    }

    let mut points = Vec::with_capacity(horizons.len());
    for &horizon in horizons {
        assert!(
            horizon >= 1 && horizon <= trace.cycles.len(),
            "horizon {horizon} outside the recorded {} cycles",
            trace.cycles.len()
        );
        let fixed = hindsight_optimum(&demands[..horizon], &trace.config, tol)?;
        let optimal_loss = instances[..horizon]
            .iter()
            .map(|inst| loss(&fixed, inst).expect("optimum is feasible"))
            .sum::<F>();
        let played_loss = played_at[horizon - 1];
        points.push(RegretPoint {
            horizon,
            played_loss,
            optimal_loss,
            regret: played_loss - optimal_loss,
        });
    }
    Ok(points)
}

/// One row per ONU: completed packet count and mean latency (blank when
/// the ONU completed nothing).
pub fn write_latency_csv<F: Scalar, W: Write>(
    summary: &LatencySummary<F>,
    mut out: W,
) -> io::Result<()> {
    writeln!(out, "onu,packets,mean_latency")?;
    for (onu, (mean, count)) in summary
        .per_onu_mean
        .iter()
        .zip(&summary.per_onu_count)
        .enumerate()
    {
        match mean {
            Some(m) => writeln!(out, "{onu},{count},{m}")?,
            None => writeln!(out, "{onu},{count},")?,
        }
    }
    Ok(())
}

pub fn write_regret_csv<F: Scalar, W: Write>(
    points: &[RegretPoint<F>],
    mut out: W,
) -> io::Result<()> {
    writeln!(out, "horizon,regret,regret_per_cycle")?;
    for p in points {
        writeln!(out, "{},{},{}", p.horizon, p.regret, p.per_cycle())?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::trace::{CompletedPacket, CycleRecord};
    use crate::types::AllocationVector;
    use crate::PonConfig;

    fn trace_with_packets(
        n: usize,
        packets: Vec<CompletedPacket<f64>>,
    ) -> SimulationTrace<f64> {
        SimulationTrace {
            config: PonConfig::<f64>::builder(n).build(),
            seed: 0,
            policy_label: "test".into(),
            cycles: Vec::new(),
            packets,
            leftover_packets: 0,
        }
    }

    fn constant_trace(
        demand: Vec<f64>,
        allocation: Vec<f64>,
        cycles: usize,
    ) -> SimulationTrace<f64> {
        let n = demand.len();
        let zeros = vec![0u64; n];
        let record = CycleRecord {
            allocation: AllocationVector(allocation),
            demand: DemandVector(demand.clone()),
            report: DemandVector(demand),
            served: vec![0.0; n],
            demand_packets: zeros.clone(),
            served_packets: zeros.clone(),
            arrived_packets: zeros,
        };
        SimulationTrace {
            config: PonConfig::<f64>::builder(n).build(),
            seed: 0,
            policy_label: "test".into(),
            cycles: vec![record; cycles],
            packets: Vec::new(),
            leftover_packets: 0,
        }
    }

    #[test]
    fn latency_means_and_spread() {
        let packets = vec![
            CompletedPacket { onu: 0, arrival: 0.0, departure: 1.0 },
            CompletedPacket { onu: 0, arrival: 1.0, departure: 4.0 },
            CompletedPacket { onu: 2, arrival: 0.0, departure: 6.0 },
        ];
        let summary = latency_stats(&trace_with_packets(3, packets)).unwrap();
        assert_eq!(summary.per_onu_count, vec![2, 0, 1]);
        assert_eq!(summary.per_onu_mean[0], Some(2.0));
        assert_eq!(summary.per_onu_mean[1], None);
        assert_eq!(summary.per_onu_mean[2], Some(6.0));
        assert!((summary.overall_mean - 10.0 / 3.0).abs() < 1e-12);
        assert_eq!(summary.overall_count, 3);
        // Means 2 and 6: population std is 2.
        assert!((summary.onu_mean_std - 2.0).abs() < 1e-12);
    }

    #[test]
    fn empty_runs_have_no_latency() {
        assert_eq!(
            latency_stats(&trace_with_packets(2, Vec::new())),
            Err(MetricsError::NoCompletedTraffic)
        );
    }

    #[test]
    fn grid_spans_half_decades() {
        assert_eq!(log_grid(10_000), vec![100, 316, 1000, 3162, 10_000]);
        assert_eq!(log_grid(5000), vec![100, 316, 1000, 3162, 5000]);
        assert_eq!(log_grid(316), vec![100, 316]);
        assert_eq!(log_grid(50), vec![50]);
    }

    #[test]
    fn playing_the_optimum_gives_zero_regret() {
        // Stationary demands [3, 2] on a unit cycle: the best fixed split
        // equalizes weighted marginals at [0.8, 0.2].
        let trace = constant_trace(vec![3.0, 2.0], vec![0.8, 0.2], 100);
        let points = regret_curve(&trace, &[100], 1e-9).unwrap();
        assert_eq!(points[0].horizon, 100);
        assert!(points[0].regret.abs() < 1e-6, "regret {}", points[0].regret);
    }

    #[test]
    fn suboptimal_play_accumulates_linear_regret() {
        let trace = constant_trace(vec![3.0, 2.0], vec![0.5, 0.5], 200);
        let instance =
            ObjectiveInstance::new(DemandVector(vec![3.0, 2.0]), &trace.config);
        let gap = loss(&AllocationVector(vec![0.5, 0.5]), &instance).unwrap()
            - loss(&AllocationVector(vec![0.8, 0.2]), &instance).unwrap();
        assert!(gap > 0.0);

        let points = regret_curve(&trace, &[100, 200], 1e-9).unwrap();
        for p in &points {
            let expected = gap * p.horizon as f64;
            assert!(
                (p.regret - expected).abs() < 1e-5 * expected,
                "horizon {}: regret {} vs expected {expected}",
                p.horizon,
                p.regret
            );
            assert!((p.per_cycle() - gap).abs() < 1e-6);
        }
    }

    #[test]
    fn csv_writers_emit_one_row_per_entry() {
        let packets = vec![
            CompletedPacket { onu: 1, arrival: 0.0, departure: 0.5 },
        ];
        let summary = latency_stats(&trace_with_packets(2, packets)).unwrap();
        let mut buf = Vec::new();
        write_latency_csv(&summary, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let rows: Vec<&str> = text.lines().collect();
        assert_eq!(rows, vec!["onu,packets,mean_latency", "0,0,", "1,1,0.5"]);

        let points = vec![RegretPoint {
            horizon: 100,
            played_loss: -1.0_f64,
            optimal_loss: -1.5,
            regret: 0.5,
        }];
        let mut buf = Vec::new();
        write_regret_csv(&points, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(
            text.lines().collect::<Vec<_>>(),
            vec!["horizon,regret,regret_per_cycle", "100,0.5,0.005"]
        );
    }
}
