//! Randomized structural invariants, kept at modest case counts so the whole
//! file stays in the seconds range.

use dismagick::gate::TwoQubitGate;
use dismagick::mps::{mps_fidelity, Mps};
use dismagick::sre::exact_m2;
use dismagick::statevector::prepare_benchmark_state;
use dismagick::types::{derive_rng, TruncationConfig};
use proptest::prelude::*;
use rand::Rng as _;

fn scrambled(n: usize, seed: u64) -> dismagick::statevector::Statevector {
    let mut rng = derive_rng(seed, &[0xbeef]);
    prepare_benchmark_state(n, 4, 2, &mut rng).expect("valid prep")
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    // Exact-truncation MPS conversion is lossless.
    #[test]
    fn statevector_round_trips_through_mps(n in 2usize..=6, seed in 0u64..1_000) {
        let sv = scrambled(n, seed);
        let (mps, discarded) = Mps::from_statevector(&sv, &TruncationConfig::exact()).unwrap();
        prop_assert!(discarded < 1e-24);
        let back = mps.to_statevector().unwrap();
        let fid = sv.fidelity(&back).unwrap();
        prop_assert!((fid - 1.0).abs() < 1e-10, "fidelity {fid}");
    }

    // Gates applied on the MPS match the dense simulator, and the norm stays
    // pinned when nothing is truncated.
    #[test]
    fn mps_gate_application_matches_dense(n in 2usize..=5, seed in 0u64..1_000, gate_seed in 0u64..1_000) {
        let mut sv = scrambled(n, seed);
        let (mut mps, _) = Mps::from_statevector(&sv, &TruncationConfig::exact()).unwrap();
        let mut rng = derive_rng(gate_seed, &[0x9a7e]);
        let bond = (seed as usize) % (n - 1);
        let gate = TwoQubitGate::haar_random(&mut rng);
        sv.apply_two_qubit_gate(&gate, (bond, bond + 1)).unwrap();
        mps.apply_two_site_gate(bond, &gate, &TruncationConfig::exact()).unwrap();
        prop_assert!((mps.norm() - 1.0).abs() < 1e-9, "norm {}", mps.norm());
        let fid = sv.fidelity(&mps.to_statevector().unwrap()).unwrap();
        prop_assert!((fid - 1.0).abs() < 1e-9, "fidelity {fid}");
    }

    // Every bond entropy of an exact MPS equals the dense bipartite entropy
    // at the same cut (reduced-state spectra agree on both sides).
    #[test]
    fn bond_entropies_match_dense_cuts(n in 2usize..=6, seed in 0u64..1_000) {
        let sv = scrambled(n, seed);
        let (mut mps, _) = Mps::from_statevector(&sv, &TruncationConfig::exact()).unwrap();
        let profile = mps.entropy_profile().unwrap();
        for (bond, &mps_ee) in profile.iter().enumerate() {
            let dense_ee = sv.entanglement_entropy(bond + 1).unwrap();
            prop_assert!((mps_ee - dense_ee).abs() < 1e-9,
                "cut {}: mps {} vs dense {}", bond + 1, mps_ee, dense_ee);
        }
    }

    // Tighter bond caps can only discard more weight, and what remains keeps
    // less fidelity with the original.
    #[test]
    fn truncation_is_monotone_in_the_bond_cap(seed in 0u64..1_000) {
        let sv = scrambled(6, seed);
        let (exact, _) = Mps::from_statevector(&sv, &TruncationConfig::exact()).unwrap();
        let mut last_discarded = f64::INFINITY;
        let mut last_fidelity = -1.0;
        for cap in [1usize, 2, 4, 8] {
            let mut m = exact.clone();
            let discarded = m.compress(&TruncationConfig::bond_cap(cap)).unwrap();
            m.normalize().unwrap();
            let fid = mps_fidelity(&exact, &m).unwrap();
            prop_assert!(discarded <= last_discarded + 1e-12);
            prop_assert!(fid + 1e-12 >= last_fidelity);
            prop_assert!(m.max_bond_dim() <= cap);
            last_discarded = discarded;
            last_fidelity = fid;
        }
        // The widest cap above is already exact for n = 6.
        prop_assert!(last_discarded < 1e-20);
        prop_assert!((last_fidelity - 1.0).abs() < 1e-10);
    }

    // M2 does not move under random Clifford two-qubit gates.
    #[test]
    fn m2_is_clifford_invariant(n in 2usize..=5, seed in 0u64..1_000) {
        let mut sv = scrambled(n, seed);
        let before = exact_m2(&sv).unwrap();
        let mut rng = derive_rng(seed, &[0xc11f]);
        for _ in 0..6 {
            let bond = rng.gen_range(0..n - 1);
            let gate = dismagick::clifford::random_clifford(&mut rng);
            sv.apply_two_qubit_gate(&gate, (bond, bond + 1)).unwrap();
        }
        let after = exact_m2(&sv).unwrap();
        prop_assert!((after - before).abs() < 1e-10, "{before} -> {after}");
    }
}
