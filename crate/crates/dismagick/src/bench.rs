//! Random-state benchmark: the three sweep strategies raced over an
//! ensemble of seeded random initial states.
//!
//! Each realization prepares one benchmark state (Clifford brickwork with a
//! few Haar layers on top) and runs every strategy on it from the same
//! per-realization seed, so the strategies see identical inputs. Rows carry
//! the full per-sweep trajectories; aggregates reduce them to mean and
//! standard deviation per `(strategy, sweep)`.
//!
//! Work parallelizes across realizations only — a trajectory is sequential —
//! and every random draw comes from seeds derived per realization, so the
//! output is identical no matter how many worker threads run.

use rayon::prelude::*;
use std::io::Write;
use thiserror::Error;

use crate::disentangler::DisentanglerCost;
use crate::optim::NelderMeadConfig;
use crate::statevector::{prepare_benchmark_state, StateError};
use crate::sweep::{
    run_sweeps_exact, ExactSweepConfig, SweepError, SweepStrategy, TrajectoryRecord,
};
use crate::types::{derive_rng, derive_seed};

const TAG_REALIZATION: u64 = 0x6e01;
const TAG_STATE: u64 = 0x57a7;

/// Errors from the benchmark driver.
#[derive(Debug, Error)]
pub enum BenchError {
    #[error("realization {realization} (seed {seed}): {source}")]
    Trajectory {
        realization: usize,
        seed: u64,
        source: SweepError,
    },
    #[error(transparent)]
    State(#[from] StateError),
}

/// Settings for [`run_random_bench`].
#[derive(Debug, Clone, Copy)]
pub struct RandomBenchConfig {
    pub qubits: usize,
    pub realizations: usize,
    /// Brickwork layers of random two-qubit Cliffords in the state prep.
    pub clifford_depth: usize,
    /// Haar-random layers on top of the Clifford brickwork.
    pub haar_layers: usize,
    /// Dismagicker sweeps (`m` in the `m+k` split).
    pub dismagick_sweeps: usize,
    /// Disentangler sweeps (`k` in the `m+k` split).
    pub disentangle_sweeps: usize,
    pub nm: NelderMeadConfig,
    pub cost: DisentanglerCost,
    pub record_timings: bool,
    pub seed: u64,
}

impl Default for RandomBenchConfig {
    fn default() -> Self {
        Self {
            qubits: 6,
            realizations: 100,
            clifford_depth: 6,
            haar_layers: 3,
            dismagick_sweeps: 6,
            disentangle_sweeps: 4,
            nm: NelderMeadConfig::default(),
            cost: DisentanglerCost::VonNeumann,
            record_timings: false,
            seed: 0,
        }
    }
}

impl RandomBenchConfig {
    /// The three contenders for an `m+k` split: disentangler only,
    /// dismagicker-then-disentangler, and the joint schedule. All have the
    /// same total sweep count, so their trajectories line up row for row.
    pub fn strategies(&self) -> [SweepStrategy; 3] {
        let m = self.dismagick_sweeps;
        let k = self.disentangle_sweeps;
        [
            SweepStrategy::CliffordOnly { sweeps: m + k },
            SweepStrategy::Sequential {
                dismagick_sweeps: m,
                disentangle_sweeps: k,
            },
            SweepStrategy::Joint {
                joint_sweeps: m,
                disentangle_sweeps: k,
            },
        ]
    }
}

/// One strategy's trajectory on one realization.
#[derive(Debug, Clone)]
pub struct BenchTrajectory {
    pub realization: usize,
    /// The derived per-realization seed (printed on failure, useful for
    /// replaying a single case).
    pub seed: u64,
    pub strategy: &'static str,
    pub records: Vec<TrajectoryRecord>,
}

/// Mean and standard deviation of one `(strategy, sweep)` cell.
#[derive(Debug, Clone, Copy)]
pub struct AggregateRecord {
    pub strategy: &'static str,
    pub sweep: usize,
    pub mean_m2: f64,
    pub std_m2: f64,
    /// Half-chain entanglement entropy.
    pub mean_ee: f64,
    pub std_ee: f64,
    /// Entanglement entropy averaged over all cuts.
    pub mean_ee_mean: f64,
    pub std_ee_mean: f64,
}

/// Everything [`run_random_bench`] produces.
#[derive(Debug, Clone)]
pub struct RandomBenchOutcome {
    /// Grouped by realization, strategies in [`RandomBenchConfig::strategies`]
    /// order within each.
    pub trajectories: Vec<BenchTrajectory>,
    /// One row per `(strategy, sweep)`, strategies in the same order.
    pub aggregates: Vec<AggregateRecord>,
}

fn mean_and_std(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    // Population std: well defined for a single realization and exactly
    // recomputable from the per-realization rows.
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
    (mean, var.sqrt())
}

/// Reduces trajectories to per-`(strategy, sweep)` statistics. Exposed so
/// the aggregate file can be checked against the per-realization one.
pub fn aggregate(trajectories: &[BenchTrajectory]) -> Vec<AggregateRecord> {
    let mut strategies: Vec<&'static str> = Vec::new();
    for t in trajectories {
        if !strategies.contains(&t.strategy) {
            strategies.push(t.strategy);
        }
    }
    let mut out = Vec::new();
    for strat in strategies {
        let group: Vec<&BenchTrajectory> = trajectories
            .iter()
            .filter(|t| t.strategy == strat)
            .collect();
        let sweeps = group.iter().map(|t| t.records.len()).max().unwrap_or(0);
        for sweep in 0..sweeps {
            let cell: Vec<&TrajectoryRecord> = group
                .iter()
                .filter_map(|t| t.records.get(sweep))
                .collect();
            if cell.is_empty() {
                continue;
            }
            let m2: Vec<f64> = cell.iter().map(|r| r.m2).collect();
            let ee: Vec<f64> = cell.iter().map(|r| r.ee).collect();
            let ee_mean: Vec<f64> = cell.iter().map(|r| r.ee_mean).collect();
            let (mean_m2, std_m2) = mean_and_std(&m2);
            let (mean_ee, std_ee) = mean_and_std(&ee);
            let (mean_ee_mean, std_ee_mean) = mean_and_std(&ee_mean);
            out.push(AggregateRecord {
                strategy: strat,
                sweep,
                mean_m2,
                std_m2,
                mean_ee,
                std_ee,
                mean_ee_mean,
                std_ee_mean,
            });
        }
    }
    out
}

/// Runs all strategies over `realizations` seeded random states.
pub fn run_random_bench(cfg: &RandomBenchConfig) -> Result<RandomBenchOutcome, BenchError> {
    let strategies = cfg.strategies();
    let per_realization: Vec<Vec<BenchTrajectory>> = (0..cfg.realizations)
        .into_par_iter()
        .map(|r| {
            let seed = derive_seed(cfg.seed, &[TAG_REALIZATION, r as u64]);
            let mut rng = derive_rng(cfg.seed, &[TAG_STATE, r as u64]);
            let sv =
                prepare_benchmark_state(cfg.qubits, cfg.clifford_depth, cfg.haar_layers, &mut rng)?;
            let mut rows = Vec::with_capacity(strategies.len());
            for strategy in strategies {
                let run_cfg = ExactSweepConfig {
                    strategy,
                    nm: cfg.nm,
                    cost: cfg.cost,
                    record_timings: cfg.record_timings,
                };
                let run = run_sweeps_exact(&sv, &run_cfg, seed).map_err(|source| {
                    BenchError::Trajectory {
                        realization: r,
                        seed,
                        source,
                    }
                })?;
                rows.push(BenchTrajectory {
                    realization: r,
                    seed,
                    strategy: strategy.name(),
                    records: run.records,
                });
            }
            Ok(rows)
        })
        .collect::<Result<_, BenchError>>()?;

    let trajectories: Vec<BenchTrajectory> = per_realization.into_iter().flatten().collect();
    let aggregates = aggregate(&trajectories);
    Ok(RandomBenchOutcome {
        trajectories,
        aggregates,
    })
}

/// Version line at the top of every CSV artifact.
pub const CSV_HEADER: &str = "# dismagick-csv v1";

/// Per-realization rows, one per `(realization, strategy, sweep)`.
pub fn write_per_realization_csv<W: Write>(
    w: &mut W,
    trajectories: &[BenchTrajectory],
) -> std::io::Result<()> {
    writeln!(w, "{CSV_HEADER}")?;
    writeln!(w, "realization,seed,strategy,sweep,m2,m2_stderr,ee,ee_mean,wall_ms")?;
    for t in trajectories {
        for r in &t.records {
            writeln!(
                w,
                "{},{},{},{},{},{},{},{},{}",
                t.realization, t.seed, t.strategy, r.sweep, r.m2, r.m2_stderr, r.ee, r.ee_mean,
                r.wall_ms
            )?;
        }
    }
    Ok(())
}

/// Aggregate rows, one per `(strategy, sweep)`.
pub fn write_aggregate_csv<W: Write>(
    w: &mut W,
    aggregates: &[AggregateRecord],
) -> std::io::Result<()> {
    writeln!(w, "{CSV_HEADER}")?;
    writeln!(
        w,
        "strategy,sweep,mean_m2,std_m2,mean_ee,std_ee,mean_ee_mean,std_ee_mean"
    )?;
    for a in aggregates {
        writeln!(
            w,
            "{},{},{},{},{},{},{},{}",
            a.strategy, a.sweep, a.mean_m2, a.std_m2, a.mean_ee, a.std_ee, a.mean_ee_mean,
            a.std_ee_mean
        )?;
    }
    Ok(())
}
