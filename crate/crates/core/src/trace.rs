//! Full record of a simulation run: per-cycle vectors, every completed
//! packet, and CSV export for both.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use crate::scalar::Scalar;
use crate::types::{AllocationVector, DemandVector};
use crate::PonConfig;

/// A packet that finished transmitting, with its full timeline.
#[derive(Debug, Clone, PartialEq)]
pub struct CompletedPacket<F> {
    pub onu: usize,
    pub arrival: F,
    pub departure: F,
}

impl<F: Scalar> CompletedPacket<F> {
    /// Time from entering the queue to the end of transmission.
    pub fn latency(&self) -> F {
        self.departure - self.arrival
    }
}

/// Everything observed in one cycle. Amount vectors are in line-time
/// units; the `_packets` vectors carry the same quantities as exact
/// packet counts so bookkeeping checks need no float tolerance.
#[derive(Debug, Clone, PartialEq)]
pub struct CycleRecord<F> {
    /// Windows granted this cycle.
    pub allocation: AllocationVector<F>,
    /// Queue content at each window start (what a fresh report would say).
    pub demand: DemandVector<F>,
    /// Lagged queue content the policy actually receives.
    pub report: DemandVector<F>,
    /// Amount transmitted inside each window.
    pub served: Vec<F>,
    pub demand_packets: Vec<u64>,
    pub served_packets: Vec<u64>,
    /// Arrivals per ONU since the previous cycle's window start.
    pub arrived_packets: Vec<u64>,
}

/// Outcome of one run. `leftover_packets` counts traffic still queued
/// when the run stopped; those packets never appear in `packets`.
#[derive(Debug, Clone)]
pub struct SimulationTrace<F> {
    pub config: PonConfig<F>,
    pub seed: u64,
    pub policy_label: String,
    pub cycles: Vec<CycleRecord<F>>,
    pub packets: Vec<CompletedPacket<F>>,
    pub leftover_packets: usize,
}

impl<F: Scalar> SimulationTrace<F> {
    pub fn num_onus(&self) -> usize {
        self.config.num_onus
    }

    /// Cycle table: one row per cycle with the granted windows, the queue
    /// sizes at the window starts, and the amounts served.
    pub fn write_cycles_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        let n = self.num_onus();
        let mut header = String::from("t");
        for prefix in ["x", "b", "served"] {
            for i in 0..n {
                header.push(',');
                header.push_str(prefix);
                header.push_str(&i.to_string());
            }
        }
        writeln!(out, "{header}")?;
        for (t, cycle) in self.cycles.iter().enumerate() {
            let mut row = t.to_string();
            for value in cycle
                .allocation
                .iter()
                .chain(cycle.demand.iter())
                .chain(cycle.served.iter())
            {
                row.push(',');
                row.push_str(&format!("{value}"));
            }
            writeln!(out, "{row}")?;
        }
        Ok(())
    }

    /// Packet table: one row per completed packet in completion order.
    pub fn write_packets_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "onu,arrival,departure")?;
        for p in &self.packets {
            writeln!(out, "{},{},{}", p.onu, p.arrival, p.departure)?;
        }
        Ok(())
    }

    /// Writes `cycles.csv` and `packets.csv` under `dir` and returns the
    /// two paths. The directory is created when missing.
    pub fn write_files(&self, dir: &Path) -> io::Result<(PathBuf, PathBuf)> {
        std::fs::create_dir_all(dir)?;
        let cycles_path = dir.join("cycles.csv");
        let packets_path = dir.join("packets.csv");
        let mut w = BufWriter::new(File::create(&cycles_path)?);
        self.write_cycles_csv(&mut w)?;
        w.flush()?;
        let mut w = BufWriter::new(File::create(&packets_path)?);
        self.write_packets_csv(&mut w)?;
        w.flush()?;
        Ok((cycles_path, packets_path))
    }
}
