//! Shared scalar types and small numeric helpers.

use num_complex::Complex64;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Complex double, the amplitude type used everywhere in this crate.
pub type C64 = Complex64;

/// Shorthand complex constructor.
pub fn c64(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// Spectral weights below this are treated as exact zeros in entropy sums.
pub const EIG_FLOOR: f64 = 1e-12;

/// Singular values below `NOISE_FLOOR * sigma_max` are always dropped as
/// numerical noise, regardless of the configured cutoff.
pub const NOISE_FLOOR: f64 = 1e-14;

/// Von Neumann entropy in bits of a probability vector (need not be
/// normalized on input; weights below [`EIG_FLOOR`] are skipped).
pub fn entropy_bits(weights: &[f64]) -> f64 {
    let total: f64 = weights.iter().filter(|&&w| w > EIG_FLOOR).sum();
    if total <= 0.0 {
        return 0.0;
    }
    let mut s = 0.0;
    for &w in weights {
        if w > EIG_FLOOR {
            let p = w / total;
            s -= p * p.log2();
        }
    }
    s
}

/// Entropy in bits of a singular-value vector (squares then delegates).
pub fn schmidt_entropy_bits(singular_values: &[f64]) -> f64 {
    let probs: Vec<f64> = singular_values.iter().map(|s| s * s).collect();
    entropy_bits(&probs)
}

/// Bond-truncation policy for SVD-based compression.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct TruncationConfig {
    /// Hard cap on the kept rank.
    pub max_bond: usize,
    /// Relative discard threshold: singular values below
    /// `svd_cutoff * sigma_max` are dropped. [`NOISE_FLOOR`] applies on top.
    pub svd_cutoff: f64,
}

impl TruncationConfig {
    pub fn new(max_bond: usize, svd_cutoff: f64) -> Self {
        Self {
            max_bond,
            svd_cutoff,
        }
    }

    /// No truncation beyond the numerical noise floor.
    pub fn exact() -> Self {
        Self {
            max_bond: usize::MAX,
            svd_cutoff: 0.0,
        }
    }

    /// Cap the bond dimension, drop only noise otherwise.
    pub fn bond_cap(max_bond: usize) -> Self {
        Self {
            max_bond,
            svd_cutoff: 0.0,
        }
    }
}

/// splitmix64 step, used to fold tags into seed material.
fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Folds a master seed and a list of integer tags into a child seed.
pub fn derive_seed(master_seed: u64, tags: &[u64]) -> u64 {
    let mut state = master_seed ^ 0xD1B5_4A32_D192_ED03;
    let mut folded = splitmix64(&mut state);
    for &t in tags {
        state ^= t.wrapping_mul(0x9E37_79B9_7F4A_7C15);
        folded ^= splitmix64(&mut state);
    }
    folded
}

/// Derives an independent, reproducible RNG from a master seed and a list of
/// integer tags (realization index, sweep, bond, shot, ...). The same
/// `(seed, tags)` always yields the same stream regardless of thread
/// scheduling, which is what makes `--jobs` a no-op for results.
pub fn derive_rng(master_seed: u64, tags: &[u64]) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(master_seed, tags));
    // Park the stream id on the last tag as extra separation between
    // derivations that share a folded seed.
    rng.set_stream(tags.last().copied().unwrap_or(0));
    rng
}
