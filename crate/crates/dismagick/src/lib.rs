//! # dismagick
//!
//! Reduction of non-stabilizerness ("magic") and entanglement in pure
//! quantum states by unitary circuit synthesis, together with the tensor
//! network machinery needed to measure what the circuits achieve.
//!
//! ## Overview
//!
//! Magic is quantified by the order-2 stabilizer Rényi entropy `M2`
//! ([`sre`]), a Clifford-invariant, additive monotone that vanishes exactly
//! on stabilizer states. The crate provides two complementary circuit
//! ingredients that act on adjacent qubit pairs:
//!
//! * **Dismagicker gates** ([`dismagick`]): non-Clifford two-qubit unitaries
//!   optimized to lower `M2`, either as the exponential of a 16-parameter
//!   Hermitian Pauli generator minimized with Nelder-Mead (exact, small
//!   systems) or as the best of a batch of Clifford+Rz candidates scored by
//!   sampled `M2` (matrix product states).
//! * **Clifford disentanglers** ([`disentangler`]): the exhaustively
//!   enumerated 11520-element two-qubit Clifford group ([`clifford`]),
//!   searched for the member that minimizes the entanglement across a bond.
//!   Clifford gates leave `M2` untouched, so the two ingredient types commute
//!   in purpose: one spends magic, the other spends entanglement.
//!
//! [`sweep`] interleaves the two ingredients across a chain in configurable
//! strategies and records per-sweep trajectories. [`mps`]/[`mpo`]/[`dmrg`]
//! supply matrix product states, operators, perfect Pauli sampling and a
//! two-site ground-state solver so the same protocol runs at system sizes
//! far beyond dense simulation, including accuracy studies on conjugated
//! Heisenberg Hamiltonians ([`heisenberg`]).
//!
//! ## Quick start
//!
//! ```
//! use dismagick::statevector::Statevector;
//! use dismagick::sre::{exact_m2, t_product_m2};
//!
//! // Three copies of the canonical magic state |T>.
//! let psi = Statevector::t_product(3).unwrap();
//! let m2 = exact_m2(&psi).unwrap();
//! assert!((m2 - t_product_m2(3)).abs() < 1e-12);
//! ```
//!
//! Runnable demonstrations of each major capability live under `examples/`;
//! the `dismagick` binary exposes the benchmark pipelines as subcommands.
//!
//! ## Conventions
//!
//! * Site `k` of a chain is basis bit `n-1-k` (site 0 most significant).
//! * Two-qubit matrices are `|q0 q1>`-ordered; CNOT controls on the first.
//! * Entropies (entanglement and Rényi) are in bits.
//! * Every stochastic routine takes either an `Rng` or a `u64` seed, and
//!   equal seeds give bit-identical results regardless of thread count.

// Link the system BLAS for ndarray's matrix products.
extern crate blas_src;

pub mod bench;
pub mod cli;
pub mod clifford;
pub mod disentangler;
pub mod dismagick;
pub mod dmrg;
pub mod gate;
pub mod heisenberg;
mod linalg;
pub mod mpo;
pub mod mps;
pub mod optim;
pub mod pauli;
pub mod serialize;
pub mod sre;
pub mod statevector;
pub mod sweep;
pub mod types;

pub use gate::{GateKind, TwoQubitGate};
pub use pauli::{PauliLetter, PauliString};
pub use sre::{exact_m2, SreEstimate};
pub use statevector::Statevector;
pub use types::C64;
