//! The two-qubit Clifford group, enumerated exactly.
//!
//! The group modulo global phase has 11520 elements. We build it once by
//! breadth-first closure from the identity under left multiplication by the
//! generator set `{H(x)I, I(x)H, S(x)I, I(x)S, CNOT}`, deduplicating with
//! the phase-quotient [`CanonicalKey`]. Clifford matrix entries live on a
//! lattice (magnitudes in {0, 1/2, 1/sqrt2, 1}, relative phases powers of i),
//! far coarser than the key's 1e-8 grid, so deduplication is exact.
//!
//! The enumeration order is deterministic: index 0 is the identity and the
//! rest follow BFS discovery order. All uniform draws and tie-breaking rules
//! elsewhere in the crate refer to these indices.

use std::collections::HashMap;
use std::collections::VecDeque;
use std::sync::OnceLock;

use ndarray::Array2;
use rand::Rng;
use thiserror::Error;

use crate::gate::{hadamard, kron, s_gate, CanonicalKey, GateKind, TwoQubitGate};
use crate::pauli::{PauliError, PauliString};
use crate::types::{c64, C64};

/// Order of the two-qubit Clifford group modulo phase.
pub const TWO_QUBIT_CLIFFORD_COUNT: usize = 11_520;

/// Errors from Clifford-specific operations.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum CliffordError {
    #[error("gate does not map the Pauli group to itself (residual off-support weight {residual:.3e})")]
    NotClifford { residual: f64 },
    #[error("conjugation needs a 2-qubit Pauli, got {0} qubits")]
    WrongPauliSize(usize),
    #[error(transparent)]
    Pauli(#[from] PauliError),
}

/// The fully enumerated group with an index for key-based lookup.
pub struct CliffordGroup {
    gates: Vec<TwoQubitGate>,
    by_key: HashMap<CanonicalKey, u32>,
}

impl CliffordGroup {
    fn enumerate() -> Self {
        let eye2 = Array2::<C64>::eye(2);
        let generators: Vec<Array2<C64>> = vec![
            kron(&hadamard(), &eye2),
            kron(&eye2, &hadamard()),
            kron(&s_gate(), &eye2),
            kron(&eye2, &s_gate()),
            TwoQubitGate::cnot().matrix().clone(),
        ];

        let mut gates: Vec<TwoQubitGate> = Vec::with_capacity(TWO_QUBIT_CLIFFORD_COUNT);
        let mut by_key: HashMap<CanonicalKey, u32> =
            HashMap::with_capacity(TWO_QUBIT_CLIFFORD_COUNT * 2);
        let mut queue: VecDeque<usize> = VecDeque::new();

        let mut id = TwoQubitGate::identity();
        let key = id.memoize_key();
        by_key.insert(key, 0);
        gates.push(id);
        queue.push_back(0);

        while let Some(at) = queue.pop_front() {
            let base = gates[at].matrix().clone();
            for gen in &generators {
                let mut candidate =
                    TwoQubitGate::from_matrix_unchecked(gen.dot(&base), GateKind::Clifford);
                let key = candidate.memoize_key();
                if let std::collections::hash_map::Entry::Vacant(e) = by_key.entry(key) {
                    let idx = gates.len() as u32;
                    e.insert(idx);
                    gates.push(candidate);
                    queue.push_back(idx as usize);
                }
            }
        }

        Self { gates, by_key }
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    /// Gate at an enumeration index.
    pub fn gate(&self, index: usize) -> &TwoQubitGate {
        &self.gates[index]
    }

    /// All gates in enumeration order.
    pub fn iter(&self) -> impl Iterator<Item = &TwoQubitGate> {
        self.gates.iter()
    }

    /// Enumeration index of a gate equal (mod phase) to `gate`, if any.
    pub fn index_of(&self, gate: &TwoQubitGate) -> Option<usize> {
        self.by_key.get(&gate.canonical_key()).map(|&i| i as usize)
    }

    /// Uniformly random enumeration index.
    pub fn random_index<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        rng.gen_range(0..self.gates.len())
    }
}

/// The process-wide enumerated group, built on first use (~60 ms).
pub fn two_qubit_cliffords() -> &'static CliffordGroup {
    static GROUP: OnceLock<CliffordGroup> = OnceLock::new();
    GROUP.get_or_init(CliffordGroup::enumerate)
}

/// Uniformly random element of the group, cloned out of the table.
pub fn random_clifford<R: Rng + ?Sized>(rng: &mut R) -> TwoQubitGate {
    let group = two_qubit_cliffords();
    group.gate(group.random_index(rng)).clone()
}

/// Conjugates a 2-qubit Pauli string: returns `q` with `g p g^H = q`,
/// including the +-1 / +-i phase. Errors with [`CliffordError::NotClifford`]
/// when the image is not a single Pauli string.
pub fn conjugate_pauli(gate: &TwoQubitGate, p: &PauliString) -> Result<PauliString, CliffordError> {
    if p.num_qubits() != 2 {
        return Err(CliffordError::WrongPauliSize(p.num_qubits()));
    }
    let dense = p.dense()?;
    let u = gate.matrix();
    let image = u.dot(&dense).dot(&u.t().mapv(|z| z.conj()));

    // Project onto the Hermitian Pauli basis: coefficients tr(R q)/4.
    let mut hit: Option<(PauliString, C64)> = None;
    let mut residual = 0.0f64;
    for r in PauliString::hermitian_basis(2) {
        let rd = r.dense()?;
        // tr(R . image); R is Hermitian so no adjoint needed.
        let mut tr = c64(0.0, 0.0);
        for i in 0..4 {
            for j in 0..4 {
                tr += rd[(i, j)] * image[(j, i)];
            }
        }
        let coeff = tr / c64(4.0, 0.0);
        if coeff.norm() > 0.5 {
            hit = Some((r, coeff));
        } else {
            residual = residual.max(coeff.norm());
        }
    }
    let (r, coeff) = match hit {
        Some(h) => h,
        None => return Err(CliffordError::NotClifford { residual }),
    };
    if residual > 1e-10 || (coeff.norm() - 1.0).abs() > 1e-10 {
        return Err(CliffordError::NotClifford {
            residual: residual.max((coeff.norm() - 1.0).abs()),
        });
    }

    // coeff is i^k for some k; fold it into the Hermitian representative.
    let k = phase_exponent(coeff).ok_or(CliffordError::NotClifford { residual: 1.0 })?;
    Ok(PauliString::new(
        2,
        r.x_mask(),
        r.z_mask(),
        (r.phase_exp() + k) % 4,
    )?)
}

/// Nearest exact power of i, if `z` is within 1e-8 of one.
fn phase_exponent(z: C64) -> Option<u8> {
    const CANDS: [(f64, f64, u8); 4] = [(1.0, 0.0, 0), (0.0, 1.0, 1), (-1.0, 0.0, 2), (0.0, -1.0, 3)];
    CANDS
        .iter()
        .find(|&&(re, im, _)| (z.re - re).abs() < 1e-8 && (z.im - im).abs() < 1e-8)
        .map(|&(_, _, k)| k)
}

impl TwoQubitGate {
    /// Whether the gate normalizes the Pauli group: every non-identity
    /// Hermitian Pauli must conjugate to a single Pauli with unit
    /// coefficient.
    pub fn is_clifford(&self) -> bool {
        PauliString::hermitian_basis(2)
            .skip(1)
            .all(|p| conjugate_pauli(self, &p).is_ok())
    }
}
