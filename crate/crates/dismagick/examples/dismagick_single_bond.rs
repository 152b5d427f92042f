//! Optimize a single dismagicker gate on one bond, both ways:
//!
//! * exact regime: Nelder-Mead over the 16 two-qubit Pauli generator
//!   coefficients, minimizing exact M2, identity always in the simplex;
//! * sampled regime: score `[identity] + k` random `C . Rz(theta) . C'`
//!   candidates on an MPS by sampled M2 and keep the strict winner.
//!
//!     cargo run --release --example dismagick_single_bond

use dismagick::dismagick::{
    optimize_dismagicker_continuous, optimize_dismagicker_discrete, DiscreteSearchConfig,
};
use dismagick::mps::Mps;
use dismagick::optim::NelderMeadConfig;
use dismagick::statevector::prepare_benchmark_state;
use dismagick::types::{derive_rng, TruncationConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut rng = derive_rng(11, &[0]);
    let sv = prepare_benchmark_state(4, 4, 2, &mut rng)?;
    let bond = 1;

    let cont = optimize_dismagicker_continuous(&sv, bond, &NelderMeadConfig::default(), 5)?;
    println!("continuous search on bond {bond}:");
    println!("  m2 before {:.6} -> after {:.6} bits", cont.m2_before, cont.m2_after);
    println!(
        "  optimizer: {} evaluations, converged = {}",
        cont.optimizer.evaluations, cont.optimizer.converged
    );

    let (mps, _) = Mps::from_statevector(&sv, &TruncationConfig::exact())?;
    let cfg = DiscreteSearchConfig {
        candidates: 100,
        shots: 4_000,
        ..Default::default()
    };
    let disc = optimize_dismagicker_discrete(&mps, bond, &cfg, 5)?;
    println!("\nsampled search on bond {bond} ({} candidates, {} shots):", cfg.candidates, cfg.shots);
    println!(
        "  m2 before {:.4} (+/- {:.4}) -> after {:.4} (+/- {:.4})",
        disc.m2_before.value, disc.m2_before.std_error, disc.m2_after.value, disc.m2_after.std_error
    );
    println!("  chose candidate {} of {}", disc.chosen_index, disc.estimates.len() - 1);
    println!("  (index 0 would mean: keep the state untouched)");
    Ok(())
}
