//! Enumerate the two-qubit Clifford group modulo phase and poke at it:
//! cardinality, where the identity sits, and closure under composition.
//!
//!     cargo run --release --example clifford_enumeration

use dismagick::clifford::{random_clifford, two_qubit_cliffords, TWO_QUBIT_CLIFFORD_COUNT};
use dismagick::gate::TwoQubitGate;
use dismagick::types::derive_rng;
use std::time::Instant;

fn main() {
    let t0 = Instant::now();
    let group = two_qubit_cliffords();
    println!(
        "enumerated {} / {} phase-distinct two-qubit Cliffords in {:.0?}",
        group.len(),
        TWO_QUBIT_CLIFFORD_COUNT,
        t0.elapsed()
    );

    let id = group.index_of(&TwoQubitGate::identity());
    println!("identity sits at index {:?}", id);

    // Closure: composing any two members lands back in the group.
    let mut rng = derive_rng(2024, &[0]);
    let trials = 2_000;
    let mut hits = 0;
    for _ in 0..trials {
        let a = group.random_index(&mut rng);
        let b = group.random_index(&mut rng);
        let c = group.gate(a).compose(group.gate(b));
        if group.index_of(&c).is_some() {
            hits += 1;
        }
    }
    println!("closure: {hits}/{trials} random products found in the table");

    // Uniform draws are how the benchmark's Clifford layers are built.
    let g = random_clifford(&mut rng);
    println!("a uniform draw (entry magnitudes):");
    for r in 0..4 {
        let row: Vec<String> = (0..4).map(|c| format!("{:.3}", g.matrix()[[r, c]].norm())).collect();
        println!("  [{}]", row.join(", "));
    }
}
