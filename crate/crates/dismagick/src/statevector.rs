//! Dense statevector simulation for the exact (small-n) regime.
//!
//! Site `k` maps to basis bit `n-1-k`, i.e. site 0 is the most significant
//! bit and a ket `|s0 s1 ... >` reads left to right. With that convention a
//! contiguous left block of sites is a contiguous most-significant block of
//! the index, so bipartition reshapes are plain row-major views.

use ndarray::{ArrayView2, ShapeBuilder};
use ndarray_linalg::{JobSvd, SVDDC};
use rand::Rng;
use thiserror::Error;

use crate::gate::TwoQubitGate;
use crate::pauli::{reverse_low_bits, PauliString};
use crate::types::{c64, schmidt_entropy_bits, C64};

/// Hard cap on dense simulation size (2^24 amplitudes = 256 MiB).
pub const MAX_DENSE_QUBITS: usize = 24;

/// Errors from statevector construction and manipulation.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum StateError {
    #[error("qubit count {0} exceeds the dense-simulation cap of {MAX_DENSE_QUBITS}")]
    TooManyQubits(usize),
    #[error("amplitude vector length {0} is not a power of two")]
    LengthNotPowerOfTwo(usize),
    #[error("state norm {0} too far from 1")]
    NotNormalized(f64),
    #[error("site {site} out of range for {n} qubits")]
    SiteOutOfRange { site: usize, n: usize },
    #[error("two-qubit gate addressed twice to site {0}")]
    SameSite(usize),
    #[error("qubit counts differ: {0} vs {1}")]
    SizeMismatch(usize, usize),
    #[error("linear algebra backend failure: {0}")]
    Linalg(String),
}

/// A pure state of `n` qubits as 2^n complex amplitudes.
#[derive(Debug, Clone, PartialEq)]
pub struct Statevector {
    n: usize,
    amps: Vec<C64>,
}

impl Statevector {
    /// The all-zeros computational basis state.
    pub fn zero_state(n: usize) -> Result<Self, StateError> {
        if n > MAX_DENSE_QUBITS {
            return Err(StateError::TooManyQubits(n));
        }
        let mut amps = vec![c64(0.0, 0.0); 1 << n];
        amps[0] = c64(1.0, 0.0);
        Ok(Self { n, amps })
    }

    /// Wraps an amplitude vector; must be a power-of-two length and
    /// normalized within 1e-8 (the residual is divided out).
    pub fn from_amplitudes(amps: Vec<C64>) -> Result<Self, StateError> {
        let len = amps.len();
        if len == 0 || !len.is_power_of_two() {
            return Err(StateError::LengthNotPowerOfTwo(len));
        }
        let n = len.trailing_zeros() as usize;
        if n > MAX_DENSE_QUBITS {
            return Err(StateError::TooManyQubits(n));
        }
        let mut sv = Self { n, amps };
        let norm = sv.norm();
        if (norm - 1.0).abs() > 1e-8 {
            return Err(StateError::NotNormalized(norm));
        }
        let scale = 1.0 / norm;
        for a in &mut sv.amps {
            *a *= scale;
        }
        Ok(sv)
    }

    /// Same checks as [`from_amplitudes`](Self::from_amplitudes) but keeps
    /// the amplitudes bit-for-bit instead of dividing out the residual norm.
    pub(crate) fn from_amplitudes_raw(amps: Vec<C64>) -> Result<Self, StateError> {
        let len = amps.len();
        if len == 0 || !len.is_power_of_two() {
            return Err(StateError::LengthNotPowerOfTwo(len));
        }
        let n = len.trailing_zeros() as usize;
        if n > MAX_DENSE_QUBITS {
            return Err(StateError::TooManyQubits(n));
        }
        let sv = Self { n, amps };
        let norm = sv.norm();
        if (norm - 1.0).abs() > 1e-8 {
            return Err(StateError::NotNormalized(norm));
        }
        Ok(sv)
    }

    /// GHZ state `(|0...0> + |1...1>)/sqrt2`.
    pub fn ghz(n: usize) -> Result<Self, StateError> {
        let mut sv = Self::zero_state(n)?;
        let h = std::f64::consts::FRAC_1_SQRT_2;
        sv.amps[0] = c64(h, 0.0);
        *sv.amps.last_mut().unwrap() = c64(h, 0.0);
        Ok(sv)
    }

    /// Product of single-qubit magic states `|T> = (|0> + e^{i pi/4}|1>)/sqrt2`.
    pub fn t_product(n: usize) -> Result<Self, StateError> {
        if n > MAX_DENSE_QUBITS {
            return Err(StateError::TooManyQubits(n));
        }
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let omega = C64::from_polar(1.0, std::f64::consts::FRAC_PI_4);
        let mut amps = vec![c64(1.0, 0.0); 1 << n];
        for (idx, a) in amps.iter_mut().enumerate() {
            let ones = (idx as u64).count_ones();
            *a = omega.powu(ones) * h.powi(n as i32);
        }
        Ok(Self { n, amps })
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amps
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &Self) -> Result<C64, StateError> {
        if self.n != other.n {
            return Err(StateError::SizeMismatch(self.n, other.n));
        }
        Ok(self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// `|<self|other>|^2`.
    pub fn fidelity(&self, other: &Self) -> Result<f64, StateError> {
        Ok(self.inner(other)?.norm_sqr())
    }

    /// Applies a 4x4 gate to the ordered site pair `(a, b)`; `a` is the
    /// gate's first qubit. Norm is preserved to machine precision.
    pub fn apply_two_qubit_gate(
        &mut self,
        gate: &TwoQubitGate,
        sites: (usize, usize),
    ) -> Result<(), StateError> {
        let (a, b) = sites;
        if a == b {
            return Err(StateError::SameSite(a));
        }
        for s in [a, b] {
            if s >= self.n {
                return Err(StateError::SiteOutOfRange { site: s, n: self.n });
            }
        }
        let ba = self.n - 1 - a;
        let bb = self.n - 1 - b;
        let (ma, mb) = (1usize << ba, 1usize << bb);
        let (lo, hi) = if ba < bb { (ba, bb) } else { (bb, ba) };

        let mut m = [[c64(0.0, 0.0); 4]; 4];
        for i in 0..4 {
            for j in 0..4 {
                m[i][j] = gate.matrix()[(i, j)];
            }
        }

        let groups = 1usize << (self.n - 2);
        let low_mask = (1usize << lo) - 1;
        let mid_mask = (1usize << (hi - 1 - lo)) - 1;
        for r in 0..groups {
            let low = r & low_mask;
            let mid = (r >> lo) & mid_mask;
            let high = r >> (hi - 1);
            let base = (high << (hi + 1)) | (mid << (lo + 1)) | low;
            let idx = [base, base | mb, base | ma, base | ma | mb];
            let v = [
                self.amps[idx[0]],
                self.amps[idx[1]],
                self.amps[idx[2]],
                self.amps[idx[3]],
            ];
            for i in 0..4 {
                let mut acc = c64(0.0, 0.0);
                for j in 0..4 {
                    acc += m[i][j] * v[j];
                }
                self.amps[idx[i]] = acc;
            }
        }
        Ok(())
    }

    /// `<psi|P|psi>`. Exact in O(2^n).
    pub fn expectation_pauli(&self, p: &PauliString) -> Result<C64, StateError> {
        if p.num_qubits() != self.n {
            return Err(StateError::SizeMismatch(p.num_qubits(), self.n));
        }
        let xb = reverse_low_bits(p.x_mask(), self.n);
        let zb = reverse_low_bits(p.z_mask(), self.n);
        let mut acc = c64(0.0, 0.0);
        for (i, amp) in self.amps.iter().enumerate() {
            let sign = if ((i as u64) & zb).count_ones() % 2 == 0 {
                1.0
            } else {
                -1.0
            };
            acc += self.amps[i ^ xb as usize].conj() * amp * sign;
        }
        Ok(acc * p.phase())
    }

    /// Schmidt values across the cut after the first `cut` sites.
    pub fn schmidt_values(&self, cut: usize) -> Result<Vec<f64>, StateError> {
        if cut == 0 || cut >= self.n {
            return Ok(vec![self.norm()]);
        }
        let rows = 1usize << cut;
        let cols = 1usize << (self.n - cut);
        let view = ArrayView2::from_shape((rows, cols).strides((cols, 1)), &self.amps)
            .map_err(|e| StateError::Linalg(e.to_string()))?;
        let owned = view.to_owned();
        let (_, s, _) = owned
            .svddc(JobSvd::None)
            .map_err(|e| StateError::Linalg(e.to_string()))?;
        Ok(s.to_vec())
    }

    /// Bipartite entanglement entropy in bits across the cut after the first
    /// `cut` sites.
    pub fn entanglement_entropy(&self, cut: usize) -> Result<f64, StateError> {
        Ok(schmidt_entropy_bits(&self.schmidt_values(cut)?))
    }

    /// Entropies across all internal cuts 1..n (length n-1).
    pub fn entropy_profile(&self) -> Result<Vec<f64>, StateError> {
        (1..self.n).map(|c| self.entanglement_entropy(c)).collect()
    }

    /// Entropy across the half-chain cut `n/2`.
    pub fn half_chain_entropy(&self) -> Result<f64, StateError> {
        self.entanglement_entropy(self.n / 2)
    }

    /// The state reshaped as `(2^k, 2, 2, 2^{n-k-2})` around the adjacent
    /// pair `(k, k+1)`, row-major. Used by the disentangler search.
    pub fn two_site_tensor(&self, bond: usize) -> Result<ndarray::Array4<C64>, StateError> {
        if bond + 1 >= self.n {
            return Err(StateError::SiteOutOfRange {
                site: bond + 1,
                n: self.n,
            });
        }
        let l = 1usize << bond;
        let r = 1usize << (self.n - bond - 2);
        ndarray::ArrayView4::from_shape((l, 2, 2, r), &self.amps)
            .map(|v| v.to_owned())
            .map_err(|e| StateError::Linalg(e.to_string()))
    }
}

/// Benchmark state family: `depth` brickwork layers of uniform random
/// two-qubit Cliffords on `|0..0>`, followed by `haar_layers` brickwork
/// layers of Haar-random gates. Layer `l` covers bonds `(i, i+1)` with
/// `i = l mod 2, l mod 2 + 2, ...`; gates are drawn layer by layer, bond
/// ascending, so a given RNG yields a fixed circuit.
pub fn prepare_benchmark_state<R: Rng + ?Sized>(
    n: usize,
    depth: usize,
    haar_layers: usize,
    rng: &mut R,
) -> Result<Statevector, StateError> {
    let mut sv = Statevector::zero_state(n)?;
    for layer in 0..depth + haar_layers {
        let start = layer % 2;
        let mut bond = start;
        while bond + 1 < n {
            let gate = if layer < depth {
                crate::clifford::random_clifford(rng)
            } else {
                TwoQubitGate::haar_random(rng)
            };
            sv.apply_two_qubit_gate(&gate, (bond, bond + 1))?;
            bond += 2;
        }
    }
    Ok(sv)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gate::{hadamard, GateKind};
    use ndarray::Array2;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn bell_pair() -> Statevector {
        let mut sv = Statevector::zero_state(2).unwrap();
        let h0 = TwoQubitGate::kron2(&hadamard(), &Array2::eye(2), GateKind::Clifford);
        sv.apply_two_qubit_gate(&h0, (0, 1)).unwrap();
        sv.apply_two_qubit_gate(&TwoQubitGate::cnot(), (0, 1))
            .unwrap();
        sv
    }

    #[test]
    fn cnot_on_basis_state() {
        // |10> -> |11> with control on site 0.
        let mut sv = Statevector::from_amplitudes(vec![
            c64(0.0, 0.0),
            c64(0.0, 0.0),
            c64(1.0, 0.0),
            c64(0.0, 0.0),
        ])
        .unwrap();
        sv.apply_two_qubit_gate(&TwoQubitGate::cnot(), (0, 1))
            .unwrap();
        assert!((sv.amplitudes()[3].re - 1.0).abs() < 1e-15);
        // Reversed site order: control on site 1. |01> has site1 = 1.
        let mut sv = Statevector::from_amplitudes(vec![
            c64(0.0, 0.0),
            c64(1.0, 0.0),
            c64(0.0, 0.0),
            c64(0.0, 0.0),
        ])
        .unwrap();
        sv.apply_two_qubit_gate(&TwoQubitGate::cnot(), (1, 0))
            .unwrap();
        assert!((sv.amplitudes()[0b11].re - 1.0).abs() < 1e-15);
    }

    #[test]
    fn bell_from_circuit() {
        let sv = bell_pair();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert!((sv.amplitudes()[0].re - h).abs() < 1e-14);
        assert!((sv.amplitudes()[3].re - h).abs() < 1e-14);
        assert!(sv.amplitudes()[1].norm() < 1e-14);
        assert!((sv.entanglement_entropy(1).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn nonadjacent_gate_application() {
        // CNOT between sites 0 and 2 of three qubits: |100> -> |101>.
        let mut amps = vec![c64(0.0, 0.0); 8];
        amps[0b100] = c64(1.0, 0.0);
        let mut sv = Statevector::from_amplitudes(amps).unwrap();
        sv.apply_two_qubit_gate(&TwoQubitGate::cnot(), (0, 2))
            .unwrap();
        assert!((sv.amplitudes()[0b101].re - 1.0).abs() < 1e-15);
    }

    #[test]
    fn norm_preserved_under_haar_circuit() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let mut sv = Statevector::zero_state(5).unwrap();
        for _ in 0..25 {
            let a = rng.gen_range(0..5);
            let mut b = rng.gen_range(0..5);
            while b == a {
                b = rng.gen_range(0..5);
            }
            let g = TwoQubitGate::haar_random(&mut rng);
            sv.apply_two_qubit_gate(&g, (a, b)).unwrap();
            assert!((sv.norm() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn ghz_entropy_is_one_bit_everywhere() {
        let sv = Statevector::ghz(6).unwrap();
        for cut in 1..6 {
            assert!((sv.entanglement_entropy(cut).unwrap() - 1.0).abs() < 1e-12);
        }
        assert_eq!(sv.entropy_profile().unwrap().len(), 5);
    }

    #[test]
    fn product_state_has_zero_entropy() {
        let sv = Statevector::t_product(5).unwrap();
        assert!((sv.norm() - 1.0).abs() < 1e-12);
        for cut in 1..5 {
            assert!(sv.entanglement_entropy(cut).unwrap() < 1e-12);
        }
    }

    #[test]
    fn pauli_expectations_match_dense_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        let n = 3;
        let mut sv = Statevector::zero_state(n).unwrap();
        for _ in 0..6 {
            let g = TwoQubitGate::haar_random(&mut rng);
            let a = rng.gen_range(0..n - 1);
            sv.apply_two_qubit_gate(&g, (a, a + 1)).unwrap();
        }
        for p in PauliString::hermitian_basis(n) {
            let fast = sv.expectation_pauli(&p).unwrap();
            // Oracle: dense matrix-vector product.
            let m = p.dense().unwrap();
            let mut oracle = c64(0.0, 0.0);
            for i in 0..(1 << n) {
                let mut row = c64(0.0, 0.0);
                for j in 0..(1 << n) {
                    row += m[(i, j)] * sv.amplitudes()[j];
                }
                oracle += sv.amplitudes()[i].conj() * row;
            }
            assert!((fast - oracle).norm() < 1e-12, "mismatch for {p}");
            assert!(fast.im.abs() < 1e-12, "Hermitian expectation must be real");
        }
    }

    #[test]
    fn t_state_single_qubit_expectations() {
        let sv = Statevector::t_product(1).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let ex = sv
            .expectation_pauli(&PauliString::parse("X").unwrap())
            .unwrap();
        let ey = sv
            .expectation_pauli(&PauliString::parse("Y").unwrap())
            .unwrap();
        let ez = sv
            .expectation_pauli(&PauliString::parse("Z").unwrap())
            .unwrap();
        assert!((ex.re - h).abs() < 1e-12);
        assert!((ey.re - h).abs() < 1e-12);
        assert!(ez.norm() < 1e-12);
    }

    #[test]
    fn benchmark_state_is_reproducible() {
        let mut r1 = ChaCha8Rng::seed_from_u64(5);
        let mut r2 = ChaCha8Rng::seed_from_u64(5);
        let a = prepare_benchmark_state(4, 3, 1, &mut r1).unwrap();
        let b = prepare_benchmark_state(4, 3, 1, &mut r2).unwrap();
        assert_eq!(a.amplitudes(), b.amplitudes());
        assert!((a.norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn input_validation() {
        assert!(matches!(
            Statevector::from_amplitudes(vec![c64(1.0, 0.0); 3]),
            Err(StateError::LengthNotPowerOfTwo(3))
        ));
        assert!(matches!(
            Statevector::from_amplitudes(vec![c64(2.0, 0.0), c64(0.0, 0.0)]),
            Err(StateError::NotNormalized(_))
        ));
        let mut sv = Statevector::zero_state(2).unwrap();
        assert!(matches!(
            sv.apply_two_qubit_gate(&TwoQubitGate::cnot(), (0, 0)),
            Err(StateError::SameSite(0))
        ));
        assert!(matches!(
            sv.apply_two_qubit_gate(&TwoQubitGate::cnot(), (0, 2)),
            Err(StateError::SiteOutOfRange { site: 2, n: 2 })
        ));
    }
}
