//! Experiment harness around the `pon-dba` simulator: named presets,
//! deterministic seed derivation, single runs with full CSV output, and
//! replicated lag sweeps with a latency summary.

use std::fmt;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use rayon::prelude::*;

use pon_dba::metrics::{latency_stats, log_grid, regret_curve, write_latency_csv, write_regret_csv};
use pon_dba::policies::{DbaPolicy, StepSchedule};
use pon_dba::simulator::run_simulation;
use pon_dba::{PonConfig, PonConfig64, Trace64};

pub const DEFAULT_CYCLES: usize = 10_000;
pub const DEFAULT_MAXWIN_CAP: f64 = 0.2;
pub const DEFAULT_AVGPRED_HORIZON: usize = 100;

#[derive(Debug)]
pub enum CliError {
    /// Bad configuration or arguments (exit code 2).
    Usage(String),
    /// Failure while running or writing results (exit code 3).
    Runtime(String),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(msg) | CliError::Runtime(msg) => f.write_str(msg),
        }
    }
}

impl std::error::Error for CliError {}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Runtime(_) => 3,
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Runtime(format!("io error: {e}"))
    }
}

pub const PRESET_NAMES: [&str; 2] = ["paper-base", "paper-sliceweight"];

/// Named experiment setups: ten ONUs in three slices, ONUs 0, 3, 6 and 9
/// heavily loaded (10 packets per cycle on average) and the rest lightly
/// loaded (1 per cycle), unit cycle, no guards, 0.01 packet time, half a
/// cycle of reporting lag. `paper-sliceweight` additionally raises the
/// weight of the slice holding ONUs 8 and 9 to 1.2.
pub fn preset(name: &str) -> Result<PonConfig64, CliError> {
    let slice_weights = match name {
        "paper-base" => vec![1.0, 1.0, 1.0],
        "paper-sliceweight" => vec![1.0, 1.0, 1.2],
        other => {
            return Err(CliError::Usage(format!(
                "unknown preset '{other}' (expected one of: {})",
                PRESET_NAMES.join(", ")
            )))
        }
    };
    let heavy = [0usize, 3, 6, 9];
    let config = PonConfig::builder(10)
        .slice_of(vec![0, 0, 0, 0, 0, 1, 1, 1, 2, 2])
        .slice_weights(slice_weights)
        .lambdas(
            (0..10)
                .map(|i| if heavy.contains(&i) { 10.0 } else { 1.0 })
                .collect(),
        )
        .unit_time(0.01)
        .delta_t(0.5)
        .build();
    config
        .validate()
        .map_err(|e| CliError::Usage(format!("preset '{name}' invalid: {e}")))?;
    Ok(config)
}

/// Replication seed: FNV-1a over `base|policy|delta|run`, so every
/// (policy, lag, replication) triple gets a distinct deterministic stream
/// regardless of execution order.
pub fn derive_seed(base_seed: u64, policy_label: &str, delta_t: f64, run: usize) -> u64 {
    let key = format!("{base_seed}|{policy_label}|{delta_t:.6}|{run}");
    let mut hash: u64 = 0xcbf2_9ce4_8422_2325;
    for byte in key.as_bytes() {
        hash ^= u64::from(*byte);
        hash = hash.wrapping_mul(0x0000_0100_0000_01b3);
    }
    hash
}

/// A policy choice plus its tunables, parsed from CLI flags.
#[derive(Debug, Clone, PartialEq)]
pub enum PolicySpec {
    Oco { eta0: f64, schedule: StepSchedule },
    MaxWin { max_window: f64 },
    AvgPred { horizon: usize },
}

impl PolicySpec {
    pub fn parse(
        name: &str,
        eta0: f64,
        schedule: StepSchedule,
        maxwin_m: f64,
        avgpred_h: usize,
    ) -> Result<Self, CliError> {
        match name {
            "oco" => Ok(PolicySpec::Oco { eta0, schedule }),
            "maxwin" => Ok(PolicySpec::MaxWin {
                max_window: maxwin_m,
            }),
            "avgpred" => Ok(PolicySpec::AvgPred { horizon: avgpred_h }),
            other => Err(CliError::Usage(format!(
                "unknown policy '{other}' (expected one of: oco, maxwin, avgpred)"
            ))),
        }
    }

    pub fn build(&self, config: &PonConfig64) -> DbaPolicy<f64> {
        match *self {
            PolicySpec::Oco { eta0, schedule } => DbaPolicy::oco(config, eta0, schedule),
            PolicySpec::MaxWin { max_window } => DbaPolicy::maxwin(config, max_window),
            PolicySpec::AvgPred { horizon } => DbaPolicy::avgpred(config, horizon),
        }
    }

    pub fn label(&self, config: &PonConfig64) -> String {
        self.build(config).label()
    }
}

pub fn run_once(
    config: &PonConfig64,
    spec: &PolicySpec,
    cycles: usize,
    seed: u64,
) -> Trace64 {
    run_simulation(config, spec.build(config), cycles, seed)
}

/// Writes the full output set for one run under `out_dir`:
/// `cycles.csv`, `packets.csv`, `latency.csv`, `regret.csv`,
/// `allocation.csv` (final cycle) and `meta.csv`.
pub fn write_run_outputs(trace: &Trace64, out_dir: &Path) -> Result<(), CliError> {
    std::fs::create_dir_all(out_dir)?;
    trace.write_files(out_dir)?;

    let summary = latency_stats(trace).ok();
    let mut w = BufWriter::new(File::create(out_dir.join("latency.csv"))?);
    match &summary {
        Some(s) => write_latency_csv(s, &mut w)?,
        None => writeln!(w, "onu,packets,mean_latency")?,
    }
    w.flush()?;

    let grid = log_grid(trace.cycles.len());
    let points = regret_curve(trace, &grid, 1e-9)
        .map_err(|e| CliError::Runtime(format!("regret solve failed: {e}")))?;
    let mut w = BufWriter::new(File::create(out_dir.join("regret.csv"))?);
    write_regret_csv(&points, &mut w)?;
    w.flush()?;

    let mut w = BufWriter::new(File::create(out_dir.join("allocation.csv"))?);
    writeln!(w, "onu,x")?;
    if let Some(last) = trace.cycles.last() {
        for (i, x) in last.allocation.iter().enumerate() {
            writeln!(w, "{i},{x}")?;
        }
    }
    w.flush()?;

    let mut w = BufWriter::new(File::create(out_dir.join("meta.csv"))?);
    writeln!(w, "key,value")?;
    writeln!(w, "policy,{}", trace.policy_label)?;
    writeln!(w, "cycles,{}", trace.cycles.len())?;
    writeln!(w, "seed,{}", trace.seed)?;
    writeln!(w, "delta_t,{}", trace.config.delta_t)?;
    writeln!(w, "completed_packets,{}", trace.packets.len())?;
    writeln!(w, "leftover_packets,{}", trace.leftover_packets)?;
    if let Some(s) = &summary {
        writeln!(w, "mean_latency,{}", s.overall_mean)?;
        writeln!(w, "onu_mean_std,{}", s.onu_mean_std)?;
    }
    w.flush()?;
    Ok(())
}

/// One replication's result inside a sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct RunRow {
    pub policy: String,
    pub delta_t: f64,
    pub run: usize,
    pub seed: u64,
    pub mean_latency: f64,
    pub completed: usize,
    pub leftover: usize,
}

/// Aggregate over the replications of one (policy, lag) point.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub policy: String,
    pub delta_t: f64,
    pub runs: usize,
    pub mean_latency: f64,
    /// Across-run standard error of the mean; zero for a single run.
    pub std_err: f64,
}

pub struct SweepOutcome {
    pub run_rows: Vec<RunRow>,
    pub summary: Vec<SweepRow>,
}

fn with_delta(config: &PonConfig64, delta_t: f64) -> Result<PonConfig64, CliError> {
    let mut c = config.clone();
    c.delta_t = delta_t;
    c.validate()
        .map_err(|e| CliError::Usage(format!("delta_t {delta_t}: {e}")))?;
    Ok(c)
}

/// Runs `runs` replications of every (policy, delta_t) pair, in parallel,
/// each under its derived seed. When `out_dir` is given, writes `runs.csv`
/// and `summary.csv`; with `write_traces` also one trace directory per
/// replication (`traces/<policy>_d<delta>_r<run>/`).
#[allow(clippy::too_many_arguments)]
pub fn sweep_delta(
    config: &PonConfig64,
    specs: &[PolicySpec],
    delta_list: &[f64],
    runs: usize,
    cycles: usize,
    base_seed: u64,
    out_dir: Option<&Path>,
    write_traces: bool,
) -> Result<SweepOutcome, CliError> {
    if delta_list.is_empty() {
        return Err(CliError::Usage("delta list is empty".into()));
    }
    if specs.is_empty() {
        return Err(CliError::Usage("no policies selected".into()));
    }
    if runs == 0 {
        return Err(CliError::Usage("runs must be at least 1".into()));
    }

    struct Job {
        spec: PolicySpec,
        label: String,
        config: PonConfig64,
        delta_t: f64,
        run: usize,
        seed: u64,
    }
    let mut jobs = Vec::new();
    for spec in specs {
        for &delta_t in delta_list {
            let config = with_delta(config, delta_t)?;
            let label = spec.label(&config);
            for run in 0..runs {
                let seed = derive_seed(base_seed, &label, delta_t, run);
                jobs.push(Job {
                    spec: spec.clone(),
                    label: label.clone(),
                    config: config.clone(),
                    delta_t,
                    run,
                    seed,
                });
            }
        }
    }

    let trace_root = out_dir.map(|d| d.join("traces"));
    let run_rows: Vec<Result<RunRow, CliError>> = jobs
        .par_iter()
        .map(|job| {
            let trace = run_once(&job.config, &job.spec, cycles, job.seed);
            let stats = latency_stats(&trace).map_err(|e| {
                CliError::Runtime(format!(
                    "{} delta_t={} run {}: {e}",
                    job.label, job.delta_t, job.run
                ))
            })?;
            if write_traces {
                if let Some(root) = &trace_root {
                    let dir =
                        root.join(format!("{}_d{:.6}_r{}", job.label, job.delta_t, job.run));
                    trace.write_files(&dir)?;
                }
            }
            Ok(RunRow {
                policy: job.label.clone(),
                delta_t: job.delta_t,
                run: job.run,
                seed: job.seed,
                mean_latency: stats.overall_mean,
                completed: stats.overall_count,
                leftover: trace.leftover_packets,
            })
        })
        .collect();
    let run_rows: Vec<RunRow> = run_rows.into_iter().collect::<Result<_, _>>()?;

    let mut summary = Vec::new();
    for spec in specs {
        for &delta_t in delta_list {
            let label = spec.label(config);
            let group: Vec<&RunRow> = run_rows
                .iter()
                .filter(|r| r.policy == label && r.delta_t == delta_t)
                .collect();
            let means: Vec<f64> = group.iter().map(|r| r.mean_latency).collect();
            let mean = means.iter().sum::<f64>() / means.len() as f64;
            let std_err = if means.len() < 2 {
                0.0
            } else {
                let var = means.iter().map(|m| (m - mean) * (m - mean)).sum::<f64>()
                    / (means.len() - 1) as f64;
                (var / means.len() as f64).sqrt()
            };
            summary.push(SweepRow {
                policy: label,
                delta_t,
                runs: group.len(),
                mean_latency: mean,
                std_err,
            });
        }
    }

    if let Some(dir) = out_dir {
        std::fs::create_dir_all(dir)?;
        let mut w = BufWriter::new(File::create(dir.join("runs.csv"))?);
        writeln!(w, "policy,delta_t,run,seed,mean_latency,completed,leftover")?;
        for r in &run_rows {
            writeln!(
                w,
                "{},{},{},{},{},{},{}",
                r.policy, r.delta_t, r.run, r.seed, r.mean_latency, r.completed, r.leftover
            )?;
        }
        w.flush()?;
        let mut w = BufWriter::new(File::create(dir.join("summary.csv"))?);
        writeln!(w, "policy,delta_t,runs,mean_latency,std_err")?;
        for s in &summary {
            writeln!(
                w,
                "{},{},{},{},{}",
                s.policy, s.delta_t, s.runs, s.mean_latency, s.std_err
            )?;
        }
        w.flush()?;
    }

    Ok(SweepOutcome { run_rows, summary })
}

/// Loads the configuration from a file or a named preset; exactly one of
/// the two must be given.
pub fn resolve_config(
    config_path: Option<&Path>,
    preset_name: Option<&str>,
) -> Result<PonConfig64, CliError> {
    match (config_path, preset_name) {
        (Some(path), None) => {
            PonConfig::from_file(path).map_err(|e| CliError::Usage(e.to_string()))
        }
        (None, Some(name)) => preset(name),
        (None, None) => Err(CliError::Usage(
            "either --config or --preset is required".into(),
        )),
        (Some(_), Some(_)) => Err(CliError::Usage(
            "--config and --preset are mutually exclusive".into(),
        )),
    }
}
