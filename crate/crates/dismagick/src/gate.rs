//! Two-qubit gates: dense 4x4 unitaries tagged with their provenance.
//!
//! The matrix convention is `|q0 q1>` ordering, i.e. row/column index
//! `2*s0 + s1` where `s0` is the first (left) qubit of the pair. `kron(a, b)`
//! therefore places `a` on the first qubit. CNOT uses the first qubit as
//! control.
//!
//! Gates can be deduplicated modulo global phase through [`CanonicalKey`]:
//! the matrix is divided by the phase of its first significant entry and
//! snapped to a 1e-8 grid. Clifford entries are spaced far coarser than the
//! grid, so the key is exact for the enumerated group.

use ndarray::{array, Array2};
use ndarray_linalg::QR;
use rand::Rng;
use rand_distr::StandardNormal;
use thiserror::Error;

use crate::types::{c64, C64};

/// How far from exact unitarity a constructed gate may be.
pub const UNITARITY_TOL: f64 = 1e-12;

/// Errors from gate construction.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum GateError {
    #[error("matrix is {rows}x{cols}, expected 4x4")]
    BadShape { rows: usize, cols: usize },
    #[error("matrix is not unitary: max |U^H U - I| = {defect:.3e}")]
    NotUnitary { defect: f64 },
}

/// Provenance tag of a gate; drives bookkeeping, not semantics.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GateKind {
    /// Member of the enumerated two-qubit Clifford group.
    Clifford,
    /// Haar-random unitary.
    Haar,
    /// Exponential of a parameterized Hermitian generator.
    ParamGenerator,
    /// Clifford . Rz(theta) . Clifford sandwich candidate.
    CliffordRz,
}

impl std::fmt::Display for GateKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            GateKind::Clifford => "clifford",
            GateKind::Haar => "haar",
            GateKind::ParamGenerator => "param_generator",
            GateKind::CliffordRz => "clifford_rz",
        };
        f.write_str(s)
    }
}

/// Phase-quotient fingerprint of a 4x4 unitary: entries of `U / phase`
/// rounded to a 1e-8 grid, where `phase` makes the first entry of magnitude
/// above 1e-3 real positive.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct CanonicalKey([(i64, i64); 16]);

/// A 4x4 unitary acting on an ordered pair of qubits.
#[derive(Debug, Clone)]
pub struct TwoQubitGate {
    matrix: Array2<C64>,
    kind: GateKind,
    /// Memoized phase-quotient key; filled during group enumeration.
    canonical_key: Option<CanonicalKey>,
}

impl TwoQubitGate {
    /// Wraps a matrix after checking shape and unitarity (`1e-12`).
    pub fn from_matrix(matrix: Array2<C64>, kind: GateKind) -> Result<Self, GateError> {
        let (rows, cols) = matrix.dim();
        if (rows, cols) != (4, 4) {
            return Err(GateError::BadShape { rows, cols });
        }
        let defect = unitarity_defect(&matrix);
        if defect > UNITARITY_TOL {
            return Err(GateError::NotUnitary { defect });
        }
        Ok(Self {
            matrix,
            kind,
            canonical_key: None,
        })
    }

    /// Wraps a matrix that is unitary by construction (internal fast path).
    pub(crate) fn from_matrix_unchecked(matrix: Array2<C64>, kind: GateKind) -> Self {
        debug_assert!(unitarity_defect(&matrix) < 1e-10);
        Self {
            matrix,
            kind,
            canonical_key: None,
        }
    }

    pub fn matrix(&self) -> &Array2<C64> {
        &self.matrix
    }

    pub fn kind(&self) -> GateKind {
        self.kind
    }

    /// The adjoint gate (same kind tag).
    pub fn dagger(&self) -> Self {
        let m = self.matrix.t().mapv(|z| z.conj());
        Self {
            matrix: m.as_standard_layout().to_owned(),
            kind: self.kind,
            canonical_key: None,
        }
    }

    /// Matrix product `self . rhs` (apply `rhs` first).
    pub fn compose(&self, rhs: &Self) -> Self {
        let kind = if self.kind == rhs.kind {
            self.kind
        } else {
            GateKind::CliffordRz
        };
        Self {
            matrix: self.matrix.dot(&rhs.matrix),
            kind,
            canonical_key: None,
        }
    }

    /// Phase-quotient key, memoized when available.
    pub fn canonical_key(&self) -> CanonicalKey {
        self.canonical_key
            .unwrap_or_else(|| canonical_key_of(&self.matrix))
    }

    pub(crate) fn memoize_key(&mut self) -> CanonicalKey {
        let key = canonical_key_of(&self.matrix);
        self.canonical_key = Some(key);
        key
    }

    /// The identity gate.
    pub fn identity() -> Self {
        Self::from_matrix_unchecked(Array2::eye(4), GateKind::Clifford)
    }

    /// CNOT with the first qubit as control.
    pub fn cnot() -> Self {
        let o = c64(0.0, 0.0);
        let l = c64(1.0, 0.0);
        let m = array![
            [l, o, o, o],
            [o, l, o, o],
            [o, o, o, l],
            [o, o, l, o],
        ];
        Self::from_matrix_unchecked(m, GateKind::Clifford)
    }

    /// SWAP of the two qubits.
    pub fn swap() -> Self {
        let o = c64(0.0, 0.0);
        let l = c64(1.0, 0.0);
        let m = array![
            [l, o, o, o],
            [o, o, l, o],
            [o, l, o, o],
            [o, o, o, l],
        ];
        Self::from_matrix_unchecked(m, GateKind::Clifford)
    }

    /// `a (x) b` with `a` on the first qubit.
    pub fn kron2(a: &Array2<C64>, b: &Array2<C64>, kind: GateKind) -> Self {
        Self::from_matrix_unchecked(kron(a, b), kind)
    }

    /// `Rz(theta) = diag(1, e^{i theta})` on one qubit of the pair, identity
    /// on the other.
    pub fn rz_embedded(qubit: usize, theta: f64) -> Self {
        assert!(qubit < 2, "qubit index within the pair must be 0 or 1");
        let rz = array![
            [c64(1.0, 0.0), c64(0.0, 0.0)],
            [c64(0.0, 0.0), C64::from_polar(1.0, theta)],
        ];
        let eye = Array2::eye(2);
        let m = if qubit == 0 {
            kron(&rz, &eye)
        } else {
            kron(&eye, &rz)
        };
        Self::from_matrix_unchecked(m, GateKind::CliffordRz)
    }

    /// Haar-random 4x4 unitary: complex Ginibre matrix, QR decomposition,
    /// then the R diagonal's phases folded into Q so the distribution is
    /// exactly Haar rather than QR-convention dependent.
    pub fn haar_random<R: Rng + ?Sized>(rng: &mut R) -> Self {
        let mut g = Array2::<C64>::zeros((4, 4));
        for z in g.iter_mut() {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            *z = c64(re, im) * std::f64::consts::FRAC_1_SQRT_2;
        }
        let (q, r) = g.qr().expect("QR of a Ginibre sample");
        let mut u = q;
        for j in 0..4 {
            let d = r[(j, j)];
            let phase = if d.norm() > 0.0 {
                d / d.norm()
            } else {
                c64(1.0, 0.0)
            };
            for i in 0..4 {
                u[(i, j)] *= phase;
            }
        }
        Self::from_matrix_unchecked(u, GateKind::Haar)
    }
}

/// Kronecker product of two square matrices.
pub fn kron(a: &Array2<C64>, b: &Array2<C64>) -> Array2<C64> {
    let (ar, ac) = a.dim();
    let (br, bc) = b.dim();
    let mut out = Array2::zeros((ar * br, ac * bc));
    for i in 0..ar {
        for j in 0..ac {
            for k in 0..br {
                for l in 0..bc {
                    out[(i * br + k, j * bc + l)] = a[(i, j)] * b[(k, l)];
                }
            }
        }
    }
    out
}

/// Dense 2x2 Hadamard.
pub fn hadamard() -> Array2<C64> {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    array![[c64(h, 0.0), c64(h, 0.0)], [c64(h, 0.0), c64(-h, 0.0)]]
}

/// Dense 2x2 phase gate S = diag(1, i).
pub fn s_gate() -> Array2<C64> {
    array![[c64(1.0, 0.0), c64(0.0, 0.0)], [c64(0.0, 0.0), c64(0.0, 1.0)]]
}

/// Max-abs deviation of `U^H U` from the identity.
pub fn unitarity_defect(m: &Array2<C64>) -> f64 {
    let gram = m.t().mapv(|z| z.conj()).dot(m);
    let mut defect = 0.0f64;
    for i in 0..gram.nrows() {
        for j in 0..gram.ncols() {
            let target = if i == j { c64(1.0, 0.0) } else { c64(0.0, 0.0) };
            defect = defect.max((gram[(i, j)] - target).norm());
        }
    }
    defect
}

fn canonical_key_of(m: &Array2<C64>) -> CanonicalKey {
    let mut phase = c64(1.0, 0.0);
    for z in m.iter() {
        if z.norm() > 1e-3 {
            phase = z / z.norm();
            break;
        }
    }
    let inv = phase.conj();
    let mut cells = [(0i64, 0i64); 16];
    for (k, z) in m.iter().enumerate() {
        let w = z * inv;
        cells[k] = ((w.re / 1e-8).round() as i64, (w.im / 1e-8).round() as i64);
    }
    CanonicalKey(cells)
}
