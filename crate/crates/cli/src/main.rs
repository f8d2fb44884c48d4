use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use pon_dba::policies::StepSchedule;
use pon_dba_cli::{
    resolve_config, run_once, sweep_delta, write_run_outputs, CliError, PolicySpec,
    DEFAULT_AVGPRED_HORIZON, DEFAULT_CYCLES, DEFAULT_MAXWIN_CAP,
};

/// Upstream-bandwidth simulator for TDM optical access networks with
/// pluggable per-cycle allocation policies.
#[derive(Parser)]
#[command(name = "pon-dba", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct ConfigSource {
    /// Key-value config file (see README for the schema).
    #[arg(long, value_name = "FILE")]
    config: Option<PathBuf>,
    /// Named preset: paper-base or paper-sliceweight.
    #[arg(long, value_name = "NAME")]
    preset: Option<String>,
}

#[derive(Args)]
struct PolicyTunables {
    /// Step-size scale for the oco policy.
    #[arg(long, default_value_t = 0.1)]
    eta0: f64,
    /// Step-size decay for the oco policy: inverse-sqrt or inverse-linear.
    #[arg(long, default_value = "inverse-sqrt")]
    schedule: String,
    /// Per-ONU window cap for the maxwin policy.
    #[arg(long = "maxwin-m", default_value_t = DEFAULT_MAXWIN_CAP)]
    maxwin_m: f64,
    /// History length for the avgpred policy.
    #[arg(long = "avgpred-h", default_value_t = DEFAULT_AVGPRED_HORIZON)]
    avgpred_h: usize,
}

impl PolicyTunables {
    fn schedule(&self) -> Result<StepSchedule, CliError> {
        match self.schedule.as_str() {
            "inverse-sqrt" => Ok(StepSchedule::InverseSqrt),
            "inverse-linear" => Ok(StepSchedule::InverseLinear),
            other => Err(CliError::Usage(format!(
                "unknown schedule '{other}' (expected inverse-sqrt or inverse-linear)"
            ))),
        }
    }

    fn spec(&self, name: &str) -> Result<PolicySpec, CliError> {
        PolicySpec::parse(name, self.eta0, self.schedule()?, self.maxwin_m, self.avgpred_h)
    }
}

#[derive(Subcommand)]
enum Command {
    /// Run one simulation and write trace and metrics CSVs.
    Run {
        #[command(flatten)]
        source: ConfigSource,
        /// Policy: oco, maxwin or avgpred.
        #[arg(long, default_value = "oco")]
        policy: String,
        /// Number of cycles to simulate.
        #[arg(long, default_value_t = DEFAULT_CYCLES)]
        cycles: usize,
        /// RNG seed for the traffic stream.
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Output directory for the CSV files.
        #[arg(long, value_name = "DIR")]
        out: PathBuf,
        /// Override the config's reporting lag.
        #[arg(long)]
        delta: Option<f64>,
        #[command(flatten)]
        tunables: PolicyTunables,
    },
    /// Replicated sweep over reporting lags; writes runs.csv and summary.csv.
    SweepDelta {
        #[command(flatten)]
        source: ConfigSource,
        /// Comma-separated policies to sweep.
        #[arg(long, value_delimiter = ',', default_value = "oco,maxwin,avgpred")]
        policies: Vec<String>,
        /// Comma-separated reporting lags.
        #[arg(long = "delta-list", value_delimiter = ',', required = true)]
        delta_list: Vec<f64>,
        /// Replications per (policy, lag) point.
        #[arg(long, default_value_t = 20)]
        runs: usize,
        /// Number of cycles per replication.
        #[arg(long, default_value_t = 5000)]
        cycles: usize,
        /// Base seed; replication seeds derive from it.
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Output directory for the CSV files.
        #[arg(long, value_name = "DIR")]
        out: PathBuf,
        /// Also write one trace directory per replication.
        #[arg(long)]
        write_traces: bool,
        #[command(flatten)]
        tunables: PolicyTunables,
    },
}

fn execute(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Run {
            source,
            policy,
            cycles,
            seed,
            out,
            delta,
            tunables,
        } => {
            let mut config = resolve_config(source.config.as_deref(), source.preset.as_deref())?;
            if let Some(d) = delta {
                config.delta_t = d;
                config
                    .validate()
                    .map_err(|e| CliError::Usage(format!("--delta {d}: {e}")))?;
            }
            let spec = tunables.spec(&policy)?;
            let trace = run_once(&config, &spec, cycles, seed);
            write_run_outputs(&trace, &out)?;
            println!(
                "wrote {} cycles ({} packets) to {}",
                trace.cycles.len(),
                trace.packets.len(),
                out.display()
            );
            Ok(())
        }
        Command::SweepDelta {
            source,
            policies,
            delta_list,
            runs,
            cycles,
            seed,
            out,
            write_traces,
            tunables,
        } => {
            let config = resolve_config(source.config.as_deref(), source.preset.as_deref())?;
            let specs = policies
                .iter()
                .map(|name| tunables.spec(name))
                .collect::<Result<Vec<_>, _>>()?;
            let outcome = sweep_delta(
                &config,
                &specs,
                &delta_list,
                runs,
                cycles,
                seed,
                Some(&out),
                write_traces,
            )?;
            println!(
                "wrote {} summary rows ({} runs) to {}",
                outcome.summary.len(),
                outcome.run_rows.len(),
                out.display()
            );
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
