//! The on-disk state format: a one-line JSON header followed by raw
//! little-endian complex amplitudes. Round trips are bit-exact, and the
//! header's `kind` field lets a reader dispatch without guessing.
//!
//!     cargo run --release --example save_load_states

use dismagick::mps::{mps_fidelity, Mps};
use dismagick::serialize::{
    load_mps, load_statevector, peek_kind, save_mps, save_statevector,
};
use dismagick::statevector::prepare_benchmark_state;
use dismagick::types::{derive_rng, TruncationConfig};
use std::fs;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = std::env::temp_dir().join("dismagick-example-states");
    fs::create_dir_all(&dir)?;

    let mut rng = derive_rng(31, &[0]);
    let sv = prepare_benchmark_state(6, 4, 2, &mut rng)?;
    let (mps, _) = Mps::from_statevector(&sv, &TruncationConfig::exact())?;

    let sv_path = dir.join("scrambled.state");
    let mps_path = dir.join("scrambled.mps");
    save_statevector(&sv_path, &sv)?;
    save_mps(&mps_path, &mps)?;
    for p in [&sv_path, &mps_path] {
        println!(
            "{} ({} bytes, kind = {:?})",
            p.display(),
            fs::metadata(p)?.len(),
            peek_kind(p)?
        );
    }

    let sv2 = load_statevector(&sv_path)?;
    let identical = sv.amplitudes() == sv2.amplitudes();
    println!("statevector round trip bit-exact: {identical}");

    let mps2 = load_mps(&mps_path)?;
    println!("mps round trip fidelity: {:.15}", mps_fidelity(&mps, &mps2)?);

    // The first line of any state file is plain JSON; everything after the
    // newline is binary payload.
    let raw = fs::read(&sv_path)?;
    let header_end = raw.iter().position(|&b| b == b'\n').unwrap();
    println!("header: {}", String::from_utf8_lossy(&raw[..header_end]));

    // These files are what `dismagick m2 --state <file>` consumes.
    Ok(())
}
