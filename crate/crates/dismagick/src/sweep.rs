//! Sweep drivers: interleave dismagicker gates and Clifford disentanglers
//! along the chain, bond by bond, and record the M2 / entanglement
//! trajectory after every sweep.
//!
//! Three strategies are supported. `CliffordOnly` applies only exhaustive
//! Clifford disentanglers (a control: it cannot change M2). `Sequential`
//! first runs dismagicker-only sweeps, then disentangler-only sweeps.
//! `Joint` optimizes a dismagicker and immediately disentangles at each bond
//! before moving right, then finishes with disentangler-only sweeps.
//!
//! Both drivers exist in an exact flavor (dense statevector, continuous
//! generator optimization) and a sampled flavor (MPS, discrete candidate
//! search with Monte Carlo M2). All randomness is derived from the caller's
//! seed and the `(sweep, bond)` position, so runs are reproducible and
//! thread-count independent.

use std::time::Instant;

use thiserror::Error;

use crate::disentangler::{
    best_disentangler_for_mps, best_disentangler_for_statevector, DisentanglerCost,
    DisentanglerError,
};
use crate::dismagick::{
    optimize_dismagicker_continuous, optimize_dismagicker_discrete, DiscreteSearchConfig,
    DismagickError, ThetaDist,
};
use crate::gate::TwoQubitGate;
use crate::mps::{Mps, MpsError};
use crate::optim::NelderMeadConfig;
use crate::sre::{exact_m2, sampled_m2, SreError};
use crate::statevector::{StateError, Statevector};
use crate::types::{derive_seed, TruncationConfig};

/// Improvements smaller than this do not justify applying a gate.
const APPLY_EPS: f64 = 1e-12;

const TAG_ACTION: u64 = 0xac;
const TAG_RECORD: u64 = 0x7ec0;

#[derive(Debug, Error)]
pub enum SweepError {
    #[error(transparent)]
    Dismagick(#[from] DismagickError),
    #[error("disentangler search failed: {0}")]
    Disentangler(#[from] DisentanglerError),
    #[error(transparent)]
    State(#[from] StateError),
    #[error(transparent)]
    Mps(#[from] MpsError),
    #[error(transparent)]
    Sre(#[from] SreError),
}

/// What a sweep does at each bond.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepPhase {
    /// Dismagicker gate only.
    Dismagick,
    /// Clifford disentangler only.
    Disentangle,
    /// Dismagicker, then disentangler, at each bond.
    Joint,
}

/// Gate schedule across sweeps.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepStrategy {
    /// Disentanglers only; M2 stays fixed by Clifford invariance.
    CliffordOnly { sweeps: usize },
    /// Magic-removal sweeps first, then disentangling sweeps.
    Sequential {
        dismagick_sweeps: usize,
        disentangle_sweeps: usize,
    },
    /// Combined sweeps first, then disentangling sweeps.
    Joint {
        joint_sweeps: usize,
        disentangle_sweeps: usize,
    },
}

impl SweepStrategy {
    /// CSV-stable identifier.
    pub fn name(&self) -> &'static str {
        match self {
            Self::CliffordOnly { .. } => "clifford_only",
            Self::Sequential { .. } => "sequential",
            Self::Joint { .. } => "joint",
        }
    }

    pub fn total_sweeps(&self) -> usize {
        match *self {
            Self::CliffordOnly { sweeps } => sweeps,
            Self::Sequential {
                dismagick_sweeps,
                disentangle_sweeps,
            } => dismagick_sweeps + disentangle_sweeps,
            Self::Joint {
                joint_sweeps,
                disentangle_sweeps,
            } => joint_sweeps + disentangle_sweeps,
        }
    }

    /// Phase of sweep index `sweep` (0-based).
    pub fn phase(&self, sweep: usize) -> SweepPhase {
        debug_assert!(sweep < self.total_sweeps());
        match *self {
            Self::CliffordOnly { .. } => SweepPhase::Disentangle,
            Self::Sequential {
                dismagick_sweeps, ..
            } => {
                if sweep < dismagick_sweeps {
                    SweepPhase::Dismagick
                } else {
                    SweepPhase::Disentangle
                }
            }
            Self::Joint { joint_sweeps, .. } => {
                if sweep < joint_sweeps {
                    SweepPhase::Joint
                } else {
                    SweepPhase::Disentangle
                }
            }
        }
    }
}

/// One row of a trajectory: the state of affairs after `sweep` sweeps
/// (row 0 is the untouched input).
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct TrajectoryRecord {
    pub sweep: usize,
    /// M2 in bits (exact or sampled, depending on the driver).
    pub m2: f64,
    /// One-sigma error on `m2`; 0 in the exact driver.
    pub m2_stderr: f64,
    /// Half-chain von Neumann entanglement entropy in bits.
    pub ee: f64,
    /// Mean entanglement entropy over all cuts.
    pub ee_mean: f64,
    /// Wall time of the sweep in milliseconds; 0 unless timings were
    /// requested, so default output stays byte-reproducible.
    pub wall_ms: f64,
}

/// A gate the driver actually applied, in application order.
#[derive(Debug, Clone)]
pub struct AppliedGate {
    pub sweep: usize,
    pub bond: usize,
    pub gate: TwoQubitGate,
}

/// Exact-regime driver settings.
#[derive(Debug, Clone, Copy)]
pub struct ExactSweepConfig {
    pub strategy: SweepStrategy,
    pub nm: NelderMeadConfig,
    pub cost: DisentanglerCost,
    pub record_timings: bool,
}

impl Default for ExactSweepConfig {
    fn default() -> Self {
        Self {
            strategy: SweepStrategy::Joint {
                joint_sweeps: 6,
                disentangle_sweeps: 4,
            },
            nm: NelderMeadConfig::default(),
            cost: DisentanglerCost::VonNeumann,
            record_timings: false,
        }
    }
}

/// Sampled-regime driver settings.
#[derive(Debug, Clone, Copy)]
pub struct MpsSweepConfig {
    pub strategy: SweepStrategy,
    /// Random dismagicker candidates per bond (the identity is always also
    /// scored).
    pub candidates: usize,
    /// Pauli samples per M2 estimate.
    pub shots: usize,
    pub theta: ThetaDist,
    /// Truncation for every gate application and candidate trial.
    pub trunc: TruncationConfig,
    pub cost: DisentanglerCost,
    pub record_timings: bool,
}

impl Default for MpsSweepConfig {
    fn default() -> Self {
        Self {
            strategy: SweepStrategy::Joint {
                joint_sweeps: 6,
                disentangle_sweeps: 4,
            },
            candidates: 200,
            shots: 10_000,
            theta: ThetaDist::Uniform,
            trunc: TruncationConfig::bond_cap(64),
            cost: DisentanglerCost::VonNeumann,
            record_timings: false,
        }
    }
}

/// Result of an exact-regime run.
#[derive(Debug, Clone)]
pub struct ExactSweepRun {
    pub records: Vec<TrajectoryRecord>,
    pub circuit: Vec<AppliedGate>,
    pub final_state: Statevector,
}

/// Result of a sampled-regime run.
#[derive(Debug, Clone)]
pub struct MpsSweepRun {
    pub records: Vec<TrajectoryRecord>,
    pub circuit: Vec<AppliedGate>,
    pub final_state: Mps,
}

fn exact_record(
    sv: &Statevector,
    sweep: usize,
    wall_ms: f64,
) -> Result<TrajectoryRecord, SweepError> {
    let profile = sv.entropy_profile()?;
    let ee = profile[profile.len() / 2];
    let ee_mean = profile.iter().sum::<f64>() / profile.len() as f64;
    Ok(TrajectoryRecord {
        sweep,
        m2: exact_m2(sv)?,
        m2_stderr: 0.0,
        ee,
        ee_mean,
        wall_ms,
    })
}

fn mps_record(
    mps: &mut Mps,
    sweep: usize,
    shots: usize,
    seed: u64,
    wall_ms: f64,
) -> Result<TrajectoryRecord, SweepError> {
    let est = sampled_m2(mps, shots, derive_seed(seed, &[TAG_RECORD, sweep as u64]))?;
    let profile = mps.entropy_profile()?;
    let ee = profile[profile.len() / 2];
    let ee_mean = profile.iter().sum::<f64>() / profile.len() as f64;
    Ok(TrajectoryRecord {
        sweep,
        m2: est.value,
        m2_stderr: est.std_error,
        ee,
        ee_mean,
        wall_ms,
    })
}

/// Runs the configured strategy on a dense state with continuous dismagicker
/// optimization and exact M2 bookkeeping.
pub fn run_sweeps_exact(
    initial: &Statevector,
    cfg: &ExactSweepConfig,
    seed: u64,
) -> Result<ExactSweepRun, SweepError> {
    let n = initial.num_qubits();
    let mut sv = initial.clone();
    let mut records = vec![exact_record(&sv, 0, 0.0)?];
    let mut circuit = Vec::new();

    for sweep in 0..cfg.strategy.total_sweeps() {
        let started = Instant::now();
        let phase = cfg.strategy.phase(sweep);
        for bond in 0..n - 1 {
            if matches!(phase, SweepPhase::Dismagick | SweepPhase::Joint) {
                let action_seed = derive_seed(seed, &[TAG_ACTION, sweep as u64, bond as u64]);
                let out = optimize_dismagicker_continuous(&sv, bond, &cfg.nm, action_seed)?;
                if out.m2_after < out.m2_before - APPLY_EPS {
                    sv.apply_two_qubit_gate(&out.gate, (bond, bond + 1))?;
                    circuit.push(AppliedGate {
                        sweep,
                        bond,
                        gate: out.gate,
                    });
                }
            }
            if matches!(phase, SweepPhase::Disentangle | SweepPhase::Joint) {
                let choice = best_disentangler_for_statevector(&sv, bond, cfg.cost)?;
                if choice.index != 0 && choice.cost_after < choice.cost_before - APPLY_EPS {
                    sv.apply_two_qubit_gate(&choice.gate, (bond, bond + 1))?;
                    circuit.push(AppliedGate {
                        sweep,
                        bond,
                        gate: choice.gate,
                    });
                }
            }
        }
        let wall_ms = if cfg.record_timings {
            started.elapsed().as_secs_f64() * 1e3
        } else {
            0.0
        };
        records.push(exact_record(&sv, sweep + 1, wall_ms)?);
    }

    Ok(ExactSweepRun {
        records,
        circuit,
        final_state: sv,
    })
}

/// One left-to-right pass over all bonds at index `sweep` under `phase`,
/// mutating the state in place. Returns the gates applied, tagged with
/// `sweep`. Action seeds depend on `(seed, sweep, bond)` only, so a driver
/// composing single sweeps reproduces exactly what the batch driver picks.
pub fn mps_sweep_once(
    mps: &mut Mps,
    sweep: usize,
    phase: SweepPhase,
    cfg: &MpsSweepConfig,
    seed: u64,
) -> Result<Vec<AppliedGate>, SweepError> {
    let len = mps.len();
    let mut applied = Vec::new();
    let search = DiscreteSearchConfig {
        candidates: cfg.candidates,
        shots: cfg.shots,
        theta: cfg.theta,
        trunc: cfg.trunc,
    };
    for bond in 0..len - 1 {
        if matches!(phase, SweepPhase::Dismagick | SweepPhase::Joint) {
            let action_seed = derive_seed(seed, &[TAG_ACTION, sweep as u64, bond as u64]);
            let out = optimize_dismagicker_discrete(mps, bond, &search, action_seed)?;
            if out.chosen_index != 0 {
                mps.apply_two_site_gate(bond, &out.gate, &cfg.trunc)?;
                applied.push(AppliedGate {
                    sweep,
                    bond,
                    gate: out.gate,
                });
            }
        }
        if matches!(phase, SweepPhase::Disentangle | SweepPhase::Joint) {
            let choice = best_disentangler_for_mps(mps, bond, cfg.cost)?;
            if choice.index != 0 && choice.cost_after < choice.cost_before - APPLY_EPS {
                mps.apply_two_site_gate(bond, &choice.gate, &cfg.trunc)?;
                applied.push(AppliedGate {
                    sweep,
                    bond,
                    gate: choice.gate,
                });
            }
        }
    }
    Ok(applied)
}

/// Runs the configured strategy on an MPS with discrete candidate search and
/// sampled M2 bookkeeping.
pub fn run_sweeps_mps(
    initial: &Mps,
    cfg: &MpsSweepConfig,
    seed: u64,
) -> Result<MpsSweepRun, SweepError> {
    let mut mps = initial.clone();
    let mut records = vec![mps_record(&mut mps, 0, cfg.shots, seed, 0.0)?];
    let mut circuit = Vec::new();

    for sweep in 0..cfg.strategy.total_sweeps() {
        let started = Instant::now();
        let phase = cfg.strategy.phase(sweep);
        circuit.extend(mps_sweep_once(&mut mps, sweep, phase, cfg, seed)?);
        let wall_ms = if cfg.record_timings {
            started.elapsed().as_secs_f64() * 1e3
        } else {
            0.0
        };
        records.push(mps_record(&mut mps, sweep + 1, cfg.shots, seed, wall_ms)?);
    }

    Ok(MpsSweepRun {
        records,
        circuit,
        final_state: mps,
    })
}
