//! Matrix product states for open chains of qubits.
//!
//! Site tensors are rank-3, `(chi_left, 2, chi_right)`, boundary dimensions
//! 1. The struct tracks an optional orthogonality center: tensors strictly
//! left of the center are left isometries, tensors strictly right of it are
//! right isometries. Operations that need a particular gauge move the center
//! themselves via QR/LQ, which is why several read-like methods take `&mut`.
//!
//! ```text
//!   (1)--[A0]--(c0)--[A1]--(c1)-- ... --(cL-2)--[AL-1]--(1)
//!          |           |                           |
//!          s0          s1                          sL-1
//! ```
//!
//! Two-site gates contract a bond pair into a `(chi, 2, 2, chi)` tensor,
//! apply the 4x4 unitary on the fused physical legs and split back with a
//! truncated SVD; the discarded Schmidt weight is returned to the caller and
//! the kept spectrum is rescaled so the norm is exactly preserved.

use ndarray::{Array2, Array3, Array4, ArrayView2};
use rand::Rng;
use rand_distr::StandardNormal;
use thiserror::Error;

use crate::gate::TwoQubitGate;
use crate::linalg::{singular_values, svd_truncated};
use crate::statevector::{StateError, Statevector};
use crate::types::{c64, schmidt_entropy_bits, C64, TruncationConfig};

/// Largest chain the dense bridge will materialize (2^14 amplitudes).
pub const MAX_DENSE_BRIDGE: usize = 14;

/// Errors from MPS manipulation.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum MpsError {
    #[error("chain must have at least one site")]
    EmptyChain,
    #[error("site {site} out of range for chain of {len}")]
    SiteOutOfRange { site: usize, len: usize },
    #[error("bond {bond} out of range for chain of {len} ({} bonds)", .len.saturating_sub(1))]
    BondOutOfRange { bond: usize, len: usize },
    #[error("chain of {0} sites is too large for a dense bridge (cap {MAX_DENSE_BRIDGE})")]
    TooLargeForDense(usize),
    #[error("state has zero norm")]
    ZeroNorm,
    #[error("tensor shape error: {0}")]
    Shape(String),
    #[error("linear algebra backend failure: {0}")]
    Linalg(String),
    #[error(transparent)]
    State(#[from] StateError),
}

/// Which neighbor inherits the singular values after a two-site update.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepDirection {
    /// Center lands on `bond + 1`.
    Right,
    /// Center lands on `bond`.
    Left,
}

/// An open-boundary MPS over qubits.
#[derive(Debug, Clone)]
pub struct Mps {
    tensors: Vec<Array3<C64>>,
    /// Orthogonality center when the gauge is known.
    center: Option<usize>,
}

fn reshape3(m: Array2<C64>, a: usize, s: usize, b: usize) -> Array3<C64> {
    m.into_shape((a, s, b)).expect("reshape3: size mismatch")
}

impl Mps {
    /// `|0...0>` on `len` sites.
    pub fn product_state(len: usize) -> Result<Self, MpsError> {
        if len == 0 {
            return Err(MpsError::EmptyChain);
        }
        let mut t = Array3::<C64>::zeros((1, 2, 1));
        t[(0, 0, 0)] = c64(1.0, 0.0);
        Ok(Self {
            tensors: vec![t; len],
            center: Some(0),
        })
    }

    /// Random MPS with bond dimensions capped at `d`, right-canonicalized
    /// and normalized. Tensor entries are iid complex Gaussians from `rng`.
    pub fn random<R: Rng + ?Sized>(len: usize, d: usize, rng: &mut R) -> Result<Self, MpsError> {
        if len == 0 {
            return Err(MpsError::EmptyChain);
        }
        let dims = bond_dimension_caps(len, d);
        let mut tensors = Vec::with_capacity(len);
        for k in 0..len {
            let left = if k == 0 { 1 } else { dims[k - 1] };
            let right = if k == len - 1 { 1 } else { dims[k] };
            let mut t = Array3::<C64>::zeros((left, 2, right));
            for z in t.iter_mut() {
                let re: f64 = rng.sample(StandardNormal);
                let im: f64 = rng.sample(StandardNormal);
                *z = c64(re, im);
            }
            tensors.push(t);
        }
        let mut mps = Self {
            tensors,
            center: None,
        };
        mps.canonicalize(0)?;
        mps.normalize()?;
        Ok(mps)
    }

    /// Exact (up to `trunc`) MPS factorization of a dense state; returns the
    /// state and the total discarded Schmidt weight. Center ends at the last
    /// site.
    pub fn from_statevector(
        sv: &Statevector,
        trunc: &TruncationConfig,
    ) -> Result<(Self, f64), MpsError> {
        let n = sv.num_qubits();
        if n == 0 {
            return Err(MpsError::EmptyChain);
        }
        if n > MAX_DENSE_BRIDGE {
            return Err(MpsError::TooLargeForDense(n));
        }
        let mut tensors = Vec::with_capacity(n);
        let mut discarded_total = 0.0;
        // Remaining amplitudes as a (chi * 2, rest) matrix, split site by site.
        let mut carry: Array2<C64> =
            ArrayView2::from_shape((1, 1 << n), sv.amplitudes())
                .map_err(|e| MpsError::Shape(e.to_string()))?
                .to_owned();
        let mut chi = 1usize;
        for k in 0..n {
            let rest = carry.len() / (chi * 2);
            let m = carry
                .into_shape((chi * 2, rest))
                .map_err(|e| MpsError::Shape(e.to_string()))?;
            if k == n - 1 {
                tensors.push(reshape3(m, chi, 2, 1));
                break;
            }
            let t = svd_truncated(&m, trunc, true).map_err(MpsError::Linalg)?;
            discarded_total += t.discarded;
            let rank = t.s.len();
            tensors.push(reshape3(t.u, chi, 2, rank));
            let mut sv_mat = t.vt;
            for (i, &s) in t.s.iter().enumerate() {
                for z in sv_mat.row_mut(i).iter_mut() {
                    *z *= s;
                }
            }
            carry = sv_mat;
            chi = rank;
        }
        Ok((
            Self {
                tensors,
                center: Some(n - 1),
            },
            discarded_total,
        ))
    }

    /// Build an MPS from explicit site tensors. Boundary bonds must be 1,
    /// neighboring bonds must match, and physical legs must be qubits. No
    /// gauge is assumed unless `center` is given, in which case the caller
    /// asserts the canonical form.
    pub fn from_tensors(tensors: Vec<Array3<C64>>, center: Option<usize>) -> Result<Self, MpsError> {
        let len = tensors.len();
        if len == 0 {
            return Err(MpsError::EmptyChain);
        }
        if let Some(c) = center {
            if c >= len {
                return Err(MpsError::SiteOutOfRange { site: c, len });
            }
        }
        for (k, t) in tensors.iter().enumerate() {
            let (l, s, r) = t.dim();
            if s != 2 {
                return Err(MpsError::Shape(format!("site {k}: physical dim {s}, want 2")));
            }
            if k == 0 && l != 1 {
                return Err(MpsError::Shape(format!("left boundary bond {l}, want 1")));
            }
            if k == len - 1 && r != 1 {
                return Err(MpsError::Shape(format!("right boundary bond {r}, want 1")));
            }
            if k > 0 && tensors[k - 1].dim().2 != l {
                return Err(MpsError::Shape(format!(
                    "bond mismatch at {}: {} vs {}",
                    k - 1,
                    tensors[k - 1].dim().2,
                    l
                )));
            }
        }
        Ok(Self { tensors, center })
    }

    /// Dense bridge; refuses chains beyond [`MAX_DENSE_BRIDGE`] sites. The
    /// result is normalized by construction only if the MPS was.
    pub fn to_statevector(&self) -> Result<Statevector, MpsError> {
        let n = self.len();
        if n > MAX_DENSE_BRIDGE {
            return Err(MpsError::TooLargeForDense(n));
        }
        let mut acc = Array2::<C64>::from_elem((1, 1), c64(1.0, 0.0));
        for t in &self.tensors {
            let (chi, _, chi2) = t.dim();
            let tm = t
                .view()
                .into_shape((chi, 2 * chi2))
                .map_err(|e| MpsError::Shape(e.to_string()))?;
            let grown = acc.dot(&tm); // (dim, 2 * chi2)
            let dim = grown.nrows();
            acc = grown
                .into_shape((dim * 2, chi2))
                .map_err(|e| MpsError::Shape(e.to_string()))?;
        }
        let amps: Vec<C64> = acc.column(0).to_vec();
        Ok(Statevector::from_amplitudes(amps)?)
    }

    pub fn len(&self) -> usize {
        self.tensors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tensors.is_empty()
    }

    pub fn tensor(&self, site: usize) -> &Array3<C64> {
        &self.tensors[site]
    }

    pub(crate) fn set_tensor(&mut self, site: usize, t: Array3<C64>) {
        self.tensors[site] = t;
    }

    pub(crate) fn set_center(&mut self, center: Option<usize>) {
        self.center = center;
    }

    pub fn center(&self) -> Option<usize> {
        self.center
    }

    /// Internal bond dimensions, length `len - 1`.
    pub fn bond_dims(&self) -> Vec<usize> {
        self.tensors
            .iter()
            .take(self.len().saturating_sub(1))
            .map(|t| t.dim().2)
            .collect()
    }

    pub fn max_bond_dim(&self) -> usize {
        self.bond_dims().into_iter().max().unwrap_or(1)
    }

    /// `sqrt(<psi|psi>)` by transfer-matrix contraction (gauge-free).
    pub fn norm(&self) -> f64 {
        let mut e = Array2::<C64>::from_elem((1, 1), c64(1.0, 0.0));
        for t in &self.tensors {
            e = transfer_step(&e, t, t);
        }
        e[(0, 0)].re.max(0.0).sqrt()
    }

    /// `<self|other>` by transfer contraction.
    pub fn inner(&self, other: &Self) -> Result<C64, MpsError> {
        if self.len() != other.len() {
            return Err(MpsError::Shape(format!(
                "length mismatch: {} vs {}",
                self.len(),
                other.len()
            )));
        }
        let mut e = Array2::<C64>::from_elem((1, 1), c64(1.0, 0.0));
        for (bra, ket) in self.tensors.iter().zip(&other.tensors) {
            e = transfer_step(&e, bra, ket);
        }
        Ok(e[(0, 0)])
    }

    /// Rescales so that the norm is exactly 1.
    pub fn normalize(&mut self) -> Result<(), MpsError> {
        let norm = self.norm();
        if norm <= 0.0 {
            return Err(MpsError::ZeroNorm);
        }
        let at = self.center.unwrap_or(0);
        let scale = c64(1.0 / norm, 0.0);
        self.tensors[at].mapv_inplace(|z| z * scale);
        Ok(())
    }

    /// Left-orthogonalizes site `k`, pushing the R factor into `k+1`.
    fn push_right(&mut self, k: usize) -> Result<(), MpsError> {
        use ndarray_linalg::QR;
        let (a, _, b) = self.tensors[k].dim();
        let m = self.tensors[k]
            .view()
            .into_shape((a * 2, b))
            .map_err(|e| MpsError::Shape(e.to_string()))?
            .to_owned();
        let (q, r) = m.qr().map_err(|e| MpsError::Linalg(e.to_string()))?;
        let rank = q.ncols();
        self.tensors[k] = reshape3(q, a, 2, rank);
        let (bn, _, c) = self.tensors[k + 1].dim();
        let next = self.tensors[k + 1]
            .view()
            .into_shape((bn, 2 * c))
            .map_err(|e| MpsError::Shape(e.to_string()))?
            .to_owned();
        self.tensors[k + 1] = reshape3(r.dot(&next), rank, 2, c);
        Ok(())
    }

    /// Right-orthogonalizes site `k`, pushing the L factor into `k-1`.
    fn push_left(&mut self, k: usize) -> Result<(), MpsError> {
        use ndarray_linalg::QR;
        let (a, _, b) = self.tensors[k].dim();
        let m = self.tensors[k]
            .view()
            .into_shape((a, 2 * b))
            .map_err(|e| MpsError::Shape(e.to_string()))?
            .to_owned();
        // LQ through QR of the adjoint: M = (R^H) (Q^H).
        let mh = m.t().mapv(|z| z.conj()).as_standard_layout().to_owned();
        let (q, r) = mh.qr().map_err(|e| MpsError::Linalg(e.to_string()))?;
        let rank = q.ncols();
        let qh = q.t().mapv(|z| z.conj()).as_standard_layout().to_owned();
        let l = r.t().mapv(|z| z.conj()).as_standard_layout().to_owned();
        self.tensors[k] = reshape3(qh, rank, 2, b);
        let (c, _, an) = self.tensors[k - 1].dim();
        let prev = self.tensors[k - 1]
            .view()
            .into_shape((c * 2, an))
            .map_err(|e| MpsError::Shape(e.to_string()))?
            .to_owned();
        self.tensors[k - 1] = reshape3(prev.dot(&l), c, 2, rank);
        Ok(())
    }

    /// Brings the state into mixed-canonical form with the center at `site`.
    pub fn canonicalize(&mut self, site: usize) -> Result<(), MpsError> {
        let len = self.len();
        if site >= len {
            return Err(MpsError::SiteOutOfRange { site, len });
        }
        for k in 0..site {
            self.push_right(k)?;
        }
        for k in (site + 1..len).rev() {
            self.push_left(k)?;
        }
        self.center = Some(site);
        Ok(())
    }

    /// Moves the center to `site`, incrementally when the gauge is known.
    pub fn move_center_to(&mut self, site: usize) -> Result<(), MpsError> {
        let len = self.len();
        if site >= len {
            return Err(MpsError::SiteOutOfRange { site, len });
        }
        match self.center {
            None => self.canonicalize(site),
            Some(c) if c == site => Ok(()),
            Some(c) if c < site => {
                for k in c..site {
                    self.push_right(k)?;
                }
                self.center = Some(site);
                Ok(())
            }
            Some(c) => {
                for k in (site + 1..=c).rev() {
                    self.push_left(k)?;
                }
                self.center = Some(site);
                Ok(())
            }
        }
    }

    /// Max-abs deviation of site `k` from a left isometry (sum_s A_s^H A_s = I).
    pub fn left_isometry_defect(&self, k: usize) -> f64 {
        let (a, _, b) = self.tensors[k].dim();
        let m = self.tensors[k]
            .view()
            .into_shape((a * 2, b))
            .expect("standard layout");
        let gram = m.t().mapv(|z| z.conj()).dot(&m);
        max_dev_from_eye(&gram)
    }

    /// Max-abs deviation of site `k` from a right isometry (sum_s A_s A_s^H = I).
    pub fn right_isometry_defect(&self, k: usize) -> f64 {
        let (a, _, b) = self.tensors[k].dim();
        let m = self.tensors[k]
            .view()
            .into_shape((a, 2 * b))
            .expect("standard layout");
        let gram = m.dot(&m.t().mapv(|z| z.conj()));
        max_dev_from_eye(&gram)
    }

    /// The merged two-site tensor `(chi_l, 2, 2, chi_r)` at `bond`, with the
    /// center moved onto the bond first so its Schmidt data is meaningful.
    pub fn two_site_tensor(&mut self, bond: usize) -> Result<Array4<C64>, MpsError> {
        let len = self.len();
        if bond + 1 >= len {
            return Err(MpsError::BondOutOfRange { bond, len });
        }
        self.move_center_to(bond)?;
        Ok(merge_pair(&self.tensors[bond], &self.tensors[bond + 1]))
    }

    /// Splits a two-site tensor back into the chain at `bond` with
    /// truncation; returns the discarded weight. The center lands on the
    /// side given by `dir`.
    pub fn split_two_site_tensor(
        &mut self,
        bond: usize,
        theta: &Array4<C64>,
        trunc: &TruncationConfig,
        dir: SweepDirection,
    ) -> Result<f64, MpsError> {
        let (al, _, _, br) = theta.dim();
        let m = theta
            .view()
            .into_shape((al * 2, 2 * br))
            .map_err(|e| MpsError::Shape(e.to_string()))?
            .to_owned();
        let t = svd_truncated(&m, trunc, true).map_err(MpsError::Linalg)?;
        let rank = t.s.len();
        let (mut u, mut vt) = (t.u, t.vt);
        match dir {
            SweepDirection::Right => {
                for (i, &s) in t.s.iter().enumerate() {
                    for z in vt.row_mut(i).iter_mut() {
                        *z *= s;
                    }
                }
                self.center = Some(bond + 1);
            }
            SweepDirection::Left => {
                for (j, &s) in t.s.iter().enumerate() {
                    for z in u.column_mut(j).iter_mut() {
                        *z *= s;
                    }
                }
                self.center = Some(bond);
            }
        }
        self.tensors[bond] = reshape3(u, al, 2, rank);
        self.tensors[bond + 1] = reshape3(vt, rank, 2, br);
        Ok(t.discarded)
    }

    /// Applies a two-qubit gate to the adjacent pair `(bond, bond + 1)` with
    /// truncation; returns the discarded Schmidt weight. Center ends at
    /// `bond + 1`.
    pub fn apply_two_site_gate(
        &mut self,
        bond: usize,
        gate: &TwoQubitGate,
        trunc: &TruncationConfig,
    ) -> Result<f64, MpsError> {
        self.apply_two_site_gate_dir(bond, gate, trunc, SweepDirection::Right)
    }

    /// [`Mps::apply_two_site_gate`] with an explicit center destination.
    pub fn apply_two_site_gate_dir(
        &mut self,
        bond: usize,
        gate: &TwoQubitGate,
        trunc: &TruncationConfig,
        dir: SweepDirection,
    ) -> Result<f64, MpsError> {
        let theta = self.two_site_tensor(bond)?;
        let theta = apply_gate_to_theta(gate, &theta);
        self.split_two_site_tensor(bond, &theta, trunc, dir)
    }

    /// Schmidt values across the cut between `bond` and `bond + 1`.
    pub fn schmidt_values(&mut self, bond: usize) -> Result<Vec<f64>, MpsError> {
        let len = self.len();
        if bond + 1 >= len {
            return Err(MpsError::BondOutOfRange { bond, len });
        }
        self.move_center_to(bond)?;
        let (a, _, b) = self.tensors[bond].dim();
        let m = self.tensors[bond]
            .view()
            .into_shape((a * 2, b))
            .map_err(|e| MpsError::Shape(e.to_string()))?
            .to_owned();
        singular_values(&m).map_err(MpsError::Linalg)
    }

    /// Entanglement entropy in bits across `bond`.
    pub fn bond_entropy(&mut self, bond: usize) -> Result<f64, MpsError> {
        Ok(schmidt_entropy_bits(&self.schmidt_values(bond)?))
    }

    /// Entropies across every internal bond, computed in one left-to-right
    /// canonical sweep (length `len - 1`).
    pub fn entropy_profile(&mut self) -> Result<Vec<f64>, MpsError> {
        let len = self.len();
        let mut out = Vec::with_capacity(len.saturating_sub(1));
        for bond in 0..len.saturating_sub(1) {
            out.push(self.bond_entropy(bond)?);
        }
        Ok(out)
    }

    /// Entropy across the half-chain bond `len/2 - 1`.
    pub fn half_chain_entropy(&mut self) -> Result<f64, MpsError> {
        let len = self.len();
        if len < 2 {
            return Ok(0.0);
        }
        self.bond_entropy(len / 2 - 1)
    }

    /// Compresses every bond to `trunc`, returning the total discarded
    /// weight. Runs one right-to-left truncation sweep from a left-canonical
    /// gauge, leaving the center at site 0.
    pub fn compress(&mut self, trunc: &TruncationConfig) -> Result<f64, MpsError> {
        let len = self.len();
        if len < 2 {
            return Ok(0.0);
        }
        self.canonicalize(len - 1)?;
        let mut discarded_total = 0.0;
        for bond in (0..len - 1).rev() {
            let theta = merge_pair(&self.tensors[bond], &self.tensors[bond + 1]);
            discarded_total +=
                self.split_two_site_tensor(bond, &theta, trunc, SweepDirection::Left)?;
        }
        Ok(discarded_total)
    }
}

/// Theoretical bond caps for a chain of qubits, clipped at `d`.
pub fn bond_dimension_caps(len: usize, d: usize) -> Vec<usize> {
    (0..len.saturating_sub(1))
        .map(|k| {
            let left = 1u128 << (k + 1).min(100);
            let right = 1u128 << (len - 1 - k).min(100);
            left.min(right).min(d as u128) as usize
        })
        .collect()
}

/// One transfer-matrix step: `E' = sum_s bra_s^H E ket_s`.
fn transfer_step(e: &Array2<C64>, bra: &Array3<C64>, ket: &Array3<C64>) -> Array2<C64> {
    let (ba, _, bb) = bra.dim();
    let (ka, _, kb) = ket.dim();
    // (E . ket): (ba_bra rows? e is (bra_chi x ket_chi)) -> contract ket leg.
    let ket_m = ket.view().into_shape((ka, 2 * kb)).expect("layout");
    let grown = e.dot(&ket_m); // (ba, 2*kb) over bra-row index
    let grown = grown.into_shape((ba * 2, kb)).expect("size");
    let bra_m = bra.view().into_shape((ba * 2, bb)).expect("layout");
    bra_m.t().mapv(|z| z.conj()).dot(&grown) // (bb, kb)
}

/// Contracts two adjacent site tensors into `(chi_l, 2, 2, chi_r)`.
pub(crate) fn merge_pair(a: &Array3<C64>, b: &Array3<C64>) -> Array4<C64> {
    let (al, _, am) = a.dim();
    let (bm, _, br) = b.dim();
    debug_assert_eq!(am, bm);
    let a2 = a.view().into_shape((al * 2, am)).expect("layout");
    let b2 = b.view().into_shape((bm, 2 * br)).expect("layout");
    a2.dot(&b2).into_shape((al, 2, 2, br)).expect("size")
}

/// Applies a 4x4 gate to the fused physical legs of a two-site tensor.
pub(crate) fn apply_gate_to_theta(gate: &TwoQubitGate, theta: &Array4<C64>) -> Array4<C64> {
    let (al, _, _, br) = theta.dim();
    let x = theta
        .view()
        .into_shape((al, 4, br))
        .expect("size")
        .permuted_axes([1, 0, 2])
        .as_standard_layout()
        .to_owned()
        .into_shape((4, al * br))
        .expect("size");
    let y = gate.matrix().dot(&x);
    y.into_shape((4, al, br))
        .expect("size")
        .permuted_axes([1, 0, 2])
        .as_standard_layout()
        .to_owned()
        .into_shape((al, 2, 2, br))
        .expect("size")
}

fn max_dev_from_eye(gram: &Array2<C64>) -> f64 {
    let mut defect = 0.0f64;
    for i in 0..gram.nrows() {
        for j in 0..gram.ncols() {
            let target = if i == j { c64(1.0, 0.0) } else { c64(0.0, 0.0) };
            defect = defect.max((gram[(i, j)] - target).norm());
        }
    }
    defect
}

/// `|<a|b>|^2` for two MPS.
pub fn mps_fidelity(a: &Mps, b: &Mps) -> Result<f64, MpsError> {
    Ok(a.inner(b)?.norm_sqr())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gate::{hadamard, GateKind};
    use crate::statevector::prepare_benchmark_state;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn random_dense(n: usize, seed: u64) -> Statevector {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        // Deep enough for generic (full-Schmidt-rank) states.
        prepare_benchmark_state(n, 6, 3, &mut rng).unwrap()
    }

    #[test]
    fn product_state_basics() {
        let mut mps = Mps::product_state(5).unwrap();
        assert_eq!(mps.len(), 5);
        assert!((mps.norm() - 1.0).abs() < 1e-14);
        assert_eq!(mps.bond_dims(), vec![1, 1, 1, 1]);
        for bond in 0..4 {
            assert!(mps.bond_entropy(bond).unwrap() < 1e-14);
        }
        let sv = mps.to_statevector().unwrap();
        assert!((sv.amplitudes()[0].re - 1.0).abs() < 1e-14);
    }

    #[test]
    fn round_trip_is_exact() {
        let sv = random_dense(8, 3);
        let (mps, discarded) = Mps::from_statevector(&sv, &TruncationConfig::exact()).unwrap();
        assert!(discarded < 1e-20);
        let caps = bond_dimension_caps(8, usize::MAX);
        let dims = mps.bond_dims();
        assert!(dims.iter().zip(&caps).all(|(d, c)| d <= c), "{dims:?}");
        assert!(dims[3] >= 4, "central bond should be entangled: {dims:?}");
        let back = mps.to_statevector().unwrap();
        assert!((sv.fidelity(&back).unwrap() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn ghz_round_trip_and_entropies() {
        let sv = Statevector::ghz(6).unwrap();
        let (mut mps, _) = Mps::from_statevector(&sv, &TruncationConfig::exact()).unwrap();
        assert!(mps.bond_dims().iter().all(|&d| d == 2));
        for bond in 0..5 {
            assert!((mps.bond_entropy(bond).unwrap() - 1.0).abs() < 1e-12);
        }
        assert!((mps.half_chain_entropy().unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn gate_application_matches_dense_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let n = 6;
        let mut sv = Statevector::zero_state(n).unwrap();
        let mut mps = Mps::product_state(n).unwrap();
        let exact = TruncationConfig::exact();
        for step in 0..12 {
            let bond = step % (n - 1);
            let g = TwoQubitGate::haar_random(&mut rng);
            sv.apply_two_qubit_gate(&g, (bond, bond + 1)).unwrap();
            let w = mps.apply_two_site_gate(bond, &g, &exact).unwrap();
            assert!(w < 1e-20);
        }
        let back = mps.to_statevector().unwrap();
        assert!((sv.fidelity(&back).unwrap() - 1.0).abs() < 1e-10);
        assert!((mps.norm() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn direction_variants_give_the_same_state() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let sv = random_dense(6, 21);
        let (mps0, _) = Mps::from_statevector(&sv, &TruncationConfig::exact()).unwrap();
        let g = TwoQubitGate::haar_random(&mut rng);
        let mut right = mps0.clone();
        let mut left = mps0.clone();
        right
            .apply_two_site_gate_dir(2, &g, &TruncationConfig::exact(), SweepDirection::Right)
            .unwrap();
        left.apply_two_site_gate_dir(2, &g, &TruncationConfig::exact(), SweepDirection::Left)
            .unwrap();
        assert_eq!(right.center(), Some(3));
        assert_eq!(left.center(), Some(2));
        assert!((mps_fidelity(&right, &left).unwrap() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn canonical_forms_hold() {
        let sv = random_dense(7, 8);
        let (mut mps, _) = Mps::from_statevector(&sv, &TruncationConfig::exact()).unwrap();
        mps.canonicalize(3).unwrap();
        for k in 0..3 {
            assert!(mps.left_isometry_defect(k) < 1e-12, "site {k}");
        }
        for k in 4..7 {
            assert!(mps.right_isometry_defect(k) < 1e-12, "site {k}");
        }
        // Moving the center incrementally preserves the state.
        let before = mps.to_statevector().unwrap();
        mps.move_center_to(6).unwrap();
        mps.move_center_to(0).unwrap();
        let after = mps.to_statevector().unwrap();
        assert!((before.fidelity(&after).unwrap() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn schmidt_data_matches_statevector() {
        let sv = random_dense(6, 5);
        let (mut mps, _) = Mps::from_statevector(&sv, &TruncationConfig::exact()).unwrap();
        for bond in 0..5 {
            let from_mps = mps.schmidt_values(bond).unwrap();
            let from_sv = sv.schmidt_values(bond + 1).unwrap();
            let common = from_mps.len().min(from_sv.len());
            for (a, b) in from_mps.iter().zip(from_sv.iter()).take(common) {
                assert!((a - b).abs() < 1e-10);
            }
            for &extra in from_sv.iter().skip(common) {
                assert!(extra < 1e-10);
            }
            let e_mps = mps.bond_entropy(bond).unwrap();
            let e_sv = sv.entanglement_entropy(bond + 1).unwrap();
            assert!((e_mps - e_sv).abs() < 1e-10);
        }
    }

    #[test]
    fn truncation_caps_bond_and_renormalizes() {
        let sv = random_dense(8, 13);
        let (mut mps, _) = Mps::from_statevector(&sv, &TruncationConfig::exact()).unwrap();
        let discarded = mps.compress(&TruncationConfig::bond_cap(4)).unwrap();
        assert!(discarded > 1e-8, "a Haar-layer state must lose weight at D=4");
        assert!(mps.max_bond_dim() <= 4);
        assert!((mps.norm() - 1.0).abs() < 1e-10);
        let f = sv.fidelity(&mps.to_statevector().unwrap()).unwrap();
        assert!(f < 1.0 && f > 0.05, "fidelity {f}");
        for bond in 0..7 {
            assert!(mps.bond_entropy(bond).unwrap() <= 2.0 + 1e-12);
        }
    }

    #[test]
    fn random_mps_is_reproducible_and_normalized() {
        let mut r1 = ChaCha8Rng::seed_from_u64(2);
        let mut r2 = ChaCha8Rng::seed_from_u64(2);
        let a = Mps::random(10, 7, &mut r1).unwrap();
        let b = Mps::random(10, 7, &mut r2).unwrap();
        assert!((a.norm() - 1.0).abs() < 1e-12);
        assert!((mps_fidelity(&a, &b).unwrap() - 1.0).abs() < 1e-12);
        assert!(a.max_bond_dim() <= 7);
        assert_eq!(a.center(), Some(0));
    }

    #[test]
    fn inner_products() {
        let mut ghz_mps = Mps::product_state(4).unwrap();
        let h0 = TwoQubitGate::kron2(&hadamard(), &Array2::eye(2), GateKind::Clifford);
        let exact = TruncationConfig::exact();
        ghz_mps.apply_two_site_gate(0, &h0, &exact).unwrap();
        for bond in 0..3 {
            ghz_mps
                .apply_two_site_gate(bond, &TwoQubitGate::cnot(), &exact)
                .unwrap();
        }
        let product = Mps::product_state(4).unwrap();
        let olap = product.inner(&ghz_mps).unwrap();
        assert!((olap.norm() - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-12);
    }

    #[test]
    fn bounds_are_checked() {
        let mut mps = Mps::product_state(3).unwrap();
        assert!(matches!(
            mps.bond_entropy(2),
            Err(MpsError::BondOutOfRange { bond: 2, len: 3 })
        ));
        assert!(matches!(Mps::product_state(0), Err(MpsError::EmptyChain)));
        assert!(matches!(
            Mps::product_state(20).unwrap().to_statevector(),
            Err(MpsError::TooLargeForDense(20))
        ));
    }
}
