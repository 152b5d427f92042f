//! Matrix product operators: the Heisenberg chain, expectation values, and
//! conjugation by two-site gates.
//!
//! Tensor layout is `(w_left, s_out, s_in, w_right)` with the same site
//! convention as everywhere else (site 0 is the most significant basis bit
//! of the dense forms). Operator compression never renormalizes singular
//! values: rescaling would silently change the operator, not just the gauge.

use ndarray::{s, Array2, Array3, Array4};
use thiserror::Error;

use crate::gate::TwoQubitGate;
use crate::linalg::svd_truncated;
use crate::mps::Mps;
use crate::pauli::PauliLetter;
use crate::types::{c64, TruncationConfig, C64};

/// Dense bridging is quadratic in the Hilbert space; 10 sites is a 1024^2
/// matrix, already plenty for cross-checks.
pub const MAX_DENSE_MPO_QUBITS: usize = 10;

/// Hard ceiling on operator bond dimension during conjugation/compression.
pub const MPO_BOND_CAP: usize = 64;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MpoError {
    #[error("operator chains need at least 2 sites, got {0}")]
    ChainTooShort(usize),
    #[error("dense operator bridge supports at most {MAX_DENSE_MPO_QUBITS} sites, got {0}")]
    TooManyQubits(usize),
    #[error("bond {bond} out of range for {len} sites")]
    BondOutOfRange { bond: usize, len: usize },
    #[error("operator has {mpo} sites but the state has {mps}")]
    LengthMismatch { mps: usize, mpo: usize },
    #[error("tensor shape error: {0}")]
    Shape(String),
    #[error("linear algebra failure: {0}")]
    Linalg(String),
}

fn shape_err<E: std::fmt::Display>(e: E) -> MpoError {
    MpoError::Shape(e.to_string())
}

/// A matrix product operator on a chain of qubits.
#[derive(Debug, Clone)]
pub struct Mpo {
    tensors: Vec<Array4<C64>>,
}

impl Mpo {
    /// Wraps tensors after checking boundary and neighbor bond consistency.
    pub fn from_tensors(tensors: Vec<Array4<C64>>) -> Result<Self, MpoError> {
        if tensors.len() < 2 {
            return Err(MpoError::ChainTooShort(tensors.len()));
        }
        if tensors[0].dim().0 != 1 || tensors.last().unwrap().dim().3 != 1 {
            return Err(MpoError::Shape("boundary bonds must have dimension 1".into()));
        }
        for (k, pair) in tensors.windows(2).enumerate() {
            let (.., r) = pair[0].dim();
            let (l, ..) = pair[1].dim();
            if r != l {
                return Err(MpoError::Shape(format!(
                    "bond {k} mismatch: {r} right vs {l} left"
                )));
            }
        }
        Ok(Self { tensors })
    }

    pub fn len(&self) -> usize {
        self.tensors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tensors.is_empty()
    }

    pub fn tensor(&self, site: usize) -> &Array4<C64> {
        &self.tensors[site]
    }

    /// Internal bond dimensions, one entry per bond.
    pub fn bond_dims(&self) -> Vec<usize> {
        self.tensors[..self.tensors.len() - 1]
            .iter()
            .map(|t| t.dim().3)
            .collect()
    }

    pub fn max_bond_dim(&self) -> usize {
        self.bond_dims().into_iter().max().unwrap_or(1)
    }

    /// Contracts the chain into a dense `2^L x 2^L` matrix (small `L` only).
    pub fn to_dense(&self) -> Result<Array2<C64>, MpoError> {
        let len = self.tensors.len();
        if len > MAX_DENSE_MPO_QUBITS {
            return Err(MpoError::TooManyQubits(len));
        }
        // Accumulator rows run over (out, in) pairs with site 0 as the most
        // significant bit of both indices.
        let w0 = self.tensors[0].dim().3;
        let mut acc = self.tensors[0]
            .view()
            .into_shape((4, w0))
            .map_err(shape_err)?
            .to_owned();
        let mut dim = 2usize;
        for t in &self.tensors[1..] {
            let (wl, _, _, wr) = t.dim();
            let tm = t.view().into_shape((wl, 4 * wr)).map_err(shape_err)?;
            let prod = acc
                .dot(&tm)
                .into_shape((dim, dim, 2, 2, wr))
                .map_err(shape_err)?;
            // (o, i, o2, i2, wr) -> (o, o2, i, i2, wr)
            let p = prod.permuted_axes([0, 2, 1, 3, 4]);
            acc = p
                .as_standard_layout()
                .to_owned()
                .into_shape((4 * dim * dim, wr))
                .map_err(shape_err)?;
            dim *= 2;
        }
        acc.into_shape((dim, dim)).map_err(shape_err)
    }

    /// One orthogonalization pass and one truncating SVD pass; returns the
    /// total squared singular-value weight dropped. Values below
    /// `cutoff * sigma_max` per bond are discarded, never renormalized.
    pub fn compress(&mut self, cutoff: f64) -> Result<f64, MpoError> {
        use ndarray_linalg::QR;
        let len = self.tensors.len();
        for k in 0..len - 1 {
            let (wl, _, _, wr) = self.tensors[k].dim();
            let m = self.tensors[k]
                .view()
                .into_shape((wl * 4, wr))
                .map_err(shape_err)?
                .to_owned();
            let (q, r) = m.qr().map_err(|e| MpoError::Linalg(e.to_string()))?;
            let rank = q.ncols();
            self.tensors[k] = q.into_shape((wl, 2, 2, rank)).map_err(shape_err)?;
            let (w2, _, _, wr2) = self.tensors[k + 1].dim();
            let next = self.tensors[k + 1]
                .view()
                .into_shape((w2, 4 * wr2))
                .map_err(shape_err)?
                .to_owned();
            self.tensors[k + 1] = r
                .dot(&next)
                .into_shape((rank, 2, 2, wr2))
                .map_err(shape_err)?;
        }

        let trunc = TruncationConfig::new(MPO_BOND_CAP, cutoff);
        let mut discarded = 0.0;
        for k in (1..len).rev() {
            let (wl, _, _, wr) = self.tensors[k].dim();
            let m = self.tensors[k]
                .view()
                .into_shape((wl, 4 * wr))
                .map_err(shape_err)?
                .to_owned();
            let svd = svd_truncated(&m, &trunc, false).map_err(MpoError::Linalg)?;
            discarded += svd.discarded;
            let rank = svd.s.len();
            if rank == MPO_BOND_CAP {
                log::warn!(
                    "operator bond hit the {MPO_BOND_CAP} cap at site {k}; \
                     discarded weight {:.3e}",
                    svd.discarded
                );
            }
            self.tensors[k] = svd.vt.into_shape((rank, 2, 2, wr)).map_err(shape_err)?;
            let mut us = svd.u;
            for (j, mut col) in us.columns_mut().into_iter().enumerate() {
                col.mapv_inplace(|z| z * svd.s[j]);
            }
            let (w0, _, _, _) = self.tensors[k - 1].dim();
            let prev = self.tensors[k - 1]
                .view()
                .into_shape((w0 * 4, wl))
                .map_err(shape_err)?
                .to_owned();
            self.tensors[k - 1] = prev
                .dot(&us)
                .into_shape((w0, 2, 2, rank))
                .map_err(shape_err)?;
        }
        Ok(discarded)
    }
}

/// The identity operator as an MPO.
pub fn identity_mpo(len: usize) -> Result<Mpo, MpoError> {
    if len < 2 {
        return Err(MpoError::ChainTooShort(len));
    }
    let mut t = Array4::<C64>::zeros((1, 2, 2, 1));
    t[(0, 0, 0, 0)] = c64(1.0, 0.0);
    t[(0, 1, 1, 0)] = c64(1.0, 0.0);
    Mpo::from_tensors(vec![t; len])
}

/// Open-boundary spin-1/2 Heisenberg chain `H = sum_j S_j . S_{j+1}` with
/// `S = sigma / 2`, in the standard bond-dimension-5 form.
pub fn heisenberg_mpo(len: usize) -> Result<Mpo, MpoError> {
    if len < 2 {
        return Err(MpoError::ChainTooShort(len));
    }
    let half = c64(0.5, 0.0);
    let spins: Vec<Array2<C64>> = [PauliLetter::X, PauliLetter::Y, PauliLetter::Z]
        .iter()
        .map(|p| p.matrix().mapv(|z| z * half))
        .collect();
    let eye = Array2::<C64>::eye(2);

    let mut w = Array4::<C64>::zeros((5, 2, 2, 5));
    w.slice_mut(s![0, .., .., 0]).assign(&eye);
    w.slice_mut(s![4, .., .., 4]).assign(&eye);
    for (alpha, spin) in spins.iter().enumerate() {
        w.slice_mut(s![alpha + 1, .., .., 0]).assign(spin);
        w.slice_mut(s![4, .., .., alpha + 1]).assign(spin);
    }

    let first = w.slice(s![4..5, .., .., ..]).to_owned();
    let last = w.slice(s![.., .., .., 0..1]).to_owned();
    let mut tensors = Vec::with_capacity(len);
    tensors.push(first);
    for _ in 1..len - 1 {
        tensors.push(w.clone());
    }
    tensors.push(last);
    Mpo::from_tensors(tensors)
}

/// Absorbs one site into a left environment `env[a, w, b]` (bra bond,
/// operator bond, ket bond), with the same tensor on bra and ket sides.
pub(crate) fn advance_left_env(
    env: &Array3<C64>,
    site: &Array3<C64>,
    op: &Array4<C64>,
) -> Result<Array3<C64>, MpoError> {
    let (al, w, bl) = env.dim();
    let (_, _, b2) = site.dim();
    let (_, _, _, w2) = op.dim();

    // env . ket over the ket bond.
    let e2 = env.view().into_shape((al * w, bl)).map_err(shape_err)?;
    let k2 = site.view().into_shape((bl, 2 * b2)).map_err(shape_err)?;
    let m1 = e2
        .dot(&k2)
        .into_shape((al, w, 2, b2))
        .map_err(shape_err)?;

    // ... . W over (operator bond, physical in).
    let m1p = m1
        .permuted_axes([0, 3, 1, 2])
        .as_standard_layout()
        .to_owned()
        .into_shape((al * b2, w * 2))
        .map_err(shape_err)?;
    let wp = op
        .view()
        .permuted_axes([0, 2, 1, 3])
        .as_standard_layout()
        .to_owned()
        .into_shape((w * 2, 2 * w2))
        .map_err(shape_err)?;
    let m2 = m1p
        .dot(&wp)
        .into_shape((al, b2, 2, w2))
        .map_err(shape_err)?;

    // ... . conj(bra) over (bra bond, physical out).
    let m2p = m2
        .permuted_axes([3, 1, 0, 2])
        .as_standard_layout()
        .to_owned()
        .into_shape((w2 * b2, al * 2))
        .map_err(shape_err)?;
    let bra = site
        .mapv(|z| z.conj())
        .into_shape((al * 2, b2))
        .map_err(shape_err)?;
    Ok(m2p
        .dot(&bra)
        .into_shape((w2, b2, b2))
        .map_err(shape_err)?
        .permuted_axes([2, 0, 1])
        .as_standard_layout()
        .to_owned())
}

/// Mirror of [`advance_left_env`]: absorbs one site into a right environment.
pub(crate) fn advance_right_env(
    env: &Array3<C64>,
    site: &Array3<C64>,
    op: &Array4<C64>,
) -> Result<Array3<C64>, MpoError> {
    let (ar, wr, br) = env.dim();
    let (b0, _, _) = site.dim();
    let (w0, _, _, _) = op.dim();

    // ket . env over the ket bond.
    let k2 = site.view().into_shape((b0 * 2, br)).map_err(shape_err)?;
    let e2 = env
        .view()
        .permuted_axes([2, 1, 0])
        .as_standard_layout()
        .to_owned()
        .into_shape((br, wr * ar))
        .map_err(shape_err)?;
    let m1 = k2
        .dot(&e2)
        .into_shape((b0, 2, wr, ar))
        .map_err(shape_err)?;

    // ... . W over (physical in, operator bond).
    let m1p = m1
        .permuted_axes([0, 3, 2, 1])
        .as_standard_layout()
        .to_owned()
        .into_shape((b0 * ar, wr * 2))
        .map_err(shape_err)?;
    let wp = op
        .view()
        .permuted_axes([3, 2, 0, 1])
        .as_standard_layout()
        .to_owned()
        .into_shape((wr * 2, w0 * 2))
        .map_err(shape_err)?;
    let m2 = m1p
        .dot(&wp)
        .into_shape((b0, ar, w0, 2))
        .map_err(shape_err)?;

    // ... . conj(bra) over (bra bond, physical out).
    let m2p = m2
        .permuted_axes([2, 0, 1, 3])
        .as_standard_layout()
        .to_owned()
        .into_shape((w0 * b0, ar * 2))
        .map_err(shape_err)?;
    let bra = site
        .mapv(|z| z.conj())
        .permuted_axes([2, 1, 0])
        .as_standard_layout()
        .to_owned()
        .into_shape((ar * 2, b0))
        .map_err(shape_err)?;
    Ok(m2p
        .dot(&bra)
        .into_shape((w0, b0, b0))
        .map_err(shape_err)?
        .permuted_axes([2, 0, 1])
        .as_standard_layout()
        .to_owned())
}

/// `<psi| O |psi>` by transfer contraction (no canonical form needed).
pub fn mpo_expectation(mps: &Mps, mpo: &Mpo) -> Result<C64, MpoError> {
    let len = mps.len();
    if len != mpo.len() {
        return Err(MpoError::LengthMismatch {
            mps: len,
            mpo: mpo.len(),
        });
    }
    // env[a, w, b]: bra bond, operator bond, ket bond.
    let mut env = Array3::<C64>::zeros((1, 1, 1));
    env[(0, 0, 0)] = c64(1.0, 0.0);
    for k in 0..len {
        env = advance_left_env(&env, mps.tensor(k), mpo.tensor(k))?;
    }
    Ok(env[(0, 0, 0)])
}

/// Conjugates the operator by a two-site gate: returns `U O U^H` with `U`
/// acting on `(bond, bond + 1)`. The touched bond is split by a truncating
/// SVD (relative `cutoff`, never renormalized, sqrt-of-sigma balanced);
/// pass `0.0` to keep everything above the noise floor.
pub fn conjugate_mpo(
    mpo: &Mpo,
    gate: &TwoQubitGate,
    bond: usize,
    cutoff: f64,
) -> Result<Mpo, MpoError> {
    let len = mpo.len();
    if bond + 1 >= len {
        return Err(MpoError::BondOutOfRange { bond, len });
    }
    let m1 = &mpo.tensors[bond];
    let m2 = &mpo.tensors[bond + 1];
    let (wl, _, _, wm) = m1.dim();
    let (_, _, _, wr) = m2.dim();

    // Merge the pair: (wl, s1', s1, s2', s2, wr).
    let merged = m1
        .view()
        .into_shape((wl * 4, wm))
        .map_err(shape_err)?
        .dot(&m2.view().into_shape((wm, 4 * wr)).map_err(shape_err)?)
        .into_shape((wl, 2, 2, 2, 2, wr))
        .map_err(shape_err)?;

    // U on the output pair.
    let bp = merged
        .permuted_axes([1, 3, 0, 2, 4, 5])
        .as_standard_layout()
        .to_owned()
        .into_shape((4, wl * 4 * wr))
        .map_err(shape_err)?;
    let gb = gate
        .matrix()
        .dot(&bp)
        .into_shape((2, 2, wl, 2, 2, wr))
        .map_err(shape_err)?;

    // conj(U) on the input pair (that is the U^H from the right).
    let gbp = gb
        .permuted_axes([3, 4, 0, 1, 2, 5])
        .as_standard_layout()
        .to_owned()
        .into_shape((4, 4 * wl * wr))
        .map_err(shape_err)?;
    let gconj = gate.matrix().mapv(|z| z.conj());
    let full = gconj
        .dot(&gbp)
        .into_shape((2, 2, 2, 2, wl, wr))
        .map_err(shape_err)?;

    // Split back: rows (wl, s1', s1), cols (s2', s2, wr).
    let mat = full
        .permuted_axes([4, 2, 0, 3, 1, 5])
        .as_standard_layout()
        .to_owned()
        .into_shape((wl * 4, 4 * wr))
        .map_err(shape_err)?;
    // The split itself only drops weight below `cutoff`; the hard bond cap
    // belongs to [`Mpo::compress`], so a cutoff of 0 keeps the conjugation
    // spectrum-exact no matter how the rank grows.
    let trunc = TruncationConfig::new(usize::MAX, cutoff);
    let svd = svd_truncated(&mat, &trunc, false).map_err(MpoError::Linalg)?;
    let rank = svd.s.len();

    let mut left = svd.u;
    let mut right = svd.vt;
    for (j, sigma) in svd.s.iter().enumerate() {
        let root = sigma.sqrt();
        left.column_mut(j).mapv_inplace(|z| z * root);
        right.row_mut(j).mapv_inplace(|z| z * root);
    }

    let mut tensors = mpo.tensors.clone();
    tensors[bond] = left.into_shape((wl, 2, 2, rank)).map_err(shape_err)?;
    tensors[bond + 1] = right.into_shape((rank, 2, 2, wr)).map_err(shape_err)?;
    Mpo::from_tensors(tensors)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gate::kron;
    use crate::types::derive_rng;
    use ndarray::Array1;
    use ndarray_linalg::Eigh;

    /// Independent dense construction: padded Kronecker products.
    fn dense_heisenberg(len: usize) -> Array2<C64> {
        let dim = 1usize << len;
        let mut h = Array2::<C64>::zeros((dim, dim));
        let spins: Vec<Array2<C64>> = [PauliLetter::X, PauliLetter::Y, PauliLetter::Z]
            .iter()
            .map(|p| p.matrix().mapv(|z| z * c64(0.5, 0.0)))
            .collect();
        let eye = Array2::<C64>::eye(2);
        for j in 0..len - 1 {
            for spin in &spins {
                let mut term = Array2::<C64>::eye(1);
                for k in 0..len {
                    let factor = if k == j || k == j + 1 { spin } else { &eye };
                    term = kron(&term, factor);
                }
                h = h + term;
            }
        }
        h
    }

    fn max_dev(a: &Array2<C64>, b: &Array2<C64>) -> f64 {
        a.iter()
            .zip(b.iter())
            .map(|(x, y)| (x - y).norm())
            .fold(0.0, f64::max)
    }

    fn ground_energy(h: &Array2<C64>) -> f64 {
        let (vals, _): (Array1<f64>, _) = h.eigh(ndarray_linalg::UPLO::Lower).unwrap();
        vals[0]
    }

    #[test]
    fn two_site_heisenberg_is_the_exchange_matrix() {
        let h = heisenberg_mpo(2).unwrap().to_dense().unwrap();
        let quarter = 0.25;
        let mut expect = Array2::<C64>::zeros((4, 4));
        expect[(0, 0)] = c64(quarter, 0.0);
        expect[(3, 3)] = c64(quarter, 0.0);
        expect[(1, 1)] = c64(-quarter, 0.0);
        expect[(2, 2)] = c64(-quarter, 0.0);
        expect[(1, 2)] = c64(0.5, 0.0);
        expect[(2, 1)] = c64(0.5, 0.0);
        assert!(max_dev(&h, &expect) < 1e-14);
        assert!((ground_energy(&h) + 0.75).abs() < 1e-12, "singlet at -3/4");
    }

    #[test]
    fn mpo_matches_independent_dense_build() {
        for len in [3, 4, 6] {
            let dense = heisenberg_mpo(len).unwrap().to_dense().unwrap();
            assert!(max_dev(&dense, &dense_heisenberg(len)) < 1e-13);
        }
        // Open-chain ground energies: L=4 analytically -(3 + 2 sqrt(3))/4,
        // L=6 from an independent eigensolve.
        let h4 = heisenberg_mpo(4).unwrap().to_dense().unwrap();
        assert!((ground_energy(&h4) - (-(3.0 + 2.0 * 3.0f64.sqrt()) / 4.0)).abs() < 1e-12);
        let h6 = heisenberg_mpo(6).unwrap().to_dense().unwrap();
        assert!((ground_energy(&h6) - (-2.4935771338879222)).abs() < 1e-10);
    }

    #[test]
    fn expectation_matches_dense_sandwich() {
        let mut rng = derive_rng(3, &[9]);
        let sv = crate::statevector::prepare_benchmark_state(5, 4, 2, &mut rng).unwrap();
        let (mps, _) = Mps::from_statevector(&sv, &TruncationConfig::exact()).unwrap();
        let mpo = heisenberg_mpo(5).unwrap();
        let via_mpo = mpo_expectation(&mps, &mpo).unwrap();

        let h = mpo.to_dense().unwrap();
        let amps = Array1::from(sv.amplitudes().to_vec());
        let dense = amps.mapv(|z| z.conj()).dot(&h.dot(&amps));
        assert!((via_mpo - dense).norm() < 1e-10);
        assert!(via_mpo.im.abs() < 1e-10, "Heisenberg is Hermitian");
    }

    #[test]
    fn identity_and_polarized_expectations() {
        let mps = Mps::product_state(6).unwrap();
        let one = mpo_expectation(&mps, &identity_mpo(6).unwrap()).unwrap();
        assert!((one - c64(1.0, 0.0)).norm() < 1e-12);
        // All-up product: only the 5 SzSz terms contribute, +1/4 each.
        let h = heisenberg_mpo(6).unwrap();
        let e = mpo_expectation(&mps, &h).unwrap();
        assert!((e.re - 5.0 / 4.0).abs() < 1e-12, "got {e}");
    }

    #[test]
    fn conjugation_matches_dense_sandwich() {
        let mut rng = derive_rng(8, &[1]);
        let h = heisenberg_mpo(5).unwrap();
        let dense = h.to_dense().unwrap();
        for (bond, gate) in [
            (0, TwoQubitGate::cnot()),
            (2, TwoQubitGate::haar_random(&mut rng)),
            (3, TwoQubitGate::haar_random(&mut rng)),
        ] {
            let conj = conjugate_mpo(&h, &gate, bond, 0.0).unwrap();
            // Dense oracle: embed the gate at (bond, bond + 1).
            let mut u = Array2::<C64>::eye(1);
            for k in 0..5 {
                u = if k == bond {
                    kron(&u, gate.matrix())
                } else if k == bond + 1 {
                    u
                } else {
                    kron(&u, &Array2::eye(2))
                };
            }
            let udag = u.t().mapv(|z| z.conj());
            let expect = u.dot(&dense).dot(&udag);
            assert!(
                max_dev(&conj.to_dense().unwrap(), &expect) < 1e-10,
                "bond {bond} kind {:?}",
                gate.kind()
            );
        }
    }

    #[test]
    fn conjugation_preserves_expectation_values() {
        let mut rng = derive_rng(14, &[2]);
        let sv = crate::statevector::prepare_benchmark_state(6, 4, 2, &mut rng).unwrap();
        let (mut mps, _) = Mps::from_statevector(&sv, &TruncationConfig::exact()).unwrap();
        let h = heisenberg_mpo(6).unwrap();
        let before = mpo_expectation(&mps, &h).unwrap();

        let gate = TwoQubitGate::haar_random(&mut rng);
        let hp = conjugate_mpo(&h, &gate, 2, 0.0).unwrap();
        mps.apply_two_site_gate(2, &gate, &TruncationConfig::exact())
            .unwrap();
        let after = mpo_expectation(&mps, &hp).unwrap();
        assert!((before - after).norm() < 1e-9, "{before} vs {after}");
    }

    #[test]
    fn compression_keeps_the_operator() {
        let mut rng = derive_rng(5, &[5]);
        let mut h = heisenberg_mpo(6).unwrap();
        // A couple of exact conjugations to fatten the bonds first.
        for bond in [1, 3, 2] {
            h = conjugate_mpo(&h, &TwoQubitGate::haar_random(&mut rng), bond, 0.0).unwrap();
        }
        let before = h.to_dense().unwrap();
        let fat = h.max_bond_dim();
        let dropped = h.compress(1e-12).unwrap();
        assert!(h.max_bond_dim() <= fat);
        assert!(dropped < 1e-16, "near-noise drops only, got {dropped}");
        assert!(max_dev(&h.to_dense().unwrap(), &before) < 1e-9);

        let mut eye = identity_mpo(4).unwrap();
        eye.compress(1e-10).unwrap();
        assert_eq!(eye.max_bond_dim(), 1);
        assert!(max_dev(&eye.to_dense().unwrap(), &Array2::<C64>::eye(16)) < 1e-12);
    }

    #[test]
    fn right_environment_sweep_matches_expectation() {
        let mut rng = derive_rng(30, &[4]);
        let sv = crate::statevector::prepare_benchmark_state(5, 4, 2, &mut rng).unwrap();
        let (mps, _) = Mps::from_statevector(&sv, &TruncationConfig::exact()).unwrap();
        let mpo = heisenberg_mpo(5).unwrap();

        let mut env = Array3::<C64>::zeros((1, 1, 1));
        env[(0, 0, 0)] = c64(1.0, 0.0);
        for k in (0..5).rev() {
            env = advance_right_env(&env, mps.tensor(k), mpo.tensor(k)).unwrap();
        }
        let from_right = env[(0, 0, 0)];
        let from_left = mpo_expectation(&mps, &mpo).unwrap();
        assert!((from_right - from_left).norm() < 1e-10);
    }

    #[test]
    fn rejects_malformed_chains() {
        assert!(matches!(heisenberg_mpo(1), Err(MpoError::ChainTooShort(1))));
        let h = heisenberg_mpo(3).unwrap();
        assert!(matches!(
            conjugate_mpo(&h, &TwoQubitGate::cnot(), 2, 0.0),
            Err(MpoError::BondOutOfRange { bond: 2, len: 3 })
        ));
        let mps = Mps::product_state(4).unwrap();
        assert!(matches!(
            mpo_expectation(&mps, &h),
            Err(MpoError::LengthMismatch { mps: 4, mpo: 3 })
        ));
        assert_eq!(h.bond_dims(), vec![5, 5]);
    }
}
