//! Independent stabilizer-state oracle for the acceptance gate: breadth-first
//! closure of |0..0> under {H, S, CNOT}, deduplicated modulo global phase.
//! Deliberately avoids the library's gate and group machinery so it can
//! serve as a cross-check; everything is plain amplitude arithmetic.

use dismagick::types::C64;
use rand::Rng;
use std::collections::HashSet;

const SQRT_HALF: f64 = std::f64::consts::FRAC_1_SQRT_2;

fn apply_h(v: &[C64], q: usize) -> Vec<C64> {
    let mask = 1usize << q;
    let mut out = v.to_vec();
    for i in 0..v.len() {
        if i & mask == 0 {
            let (a, b) = (v[i], v[i | mask]);
            out[i] = (a + b) * SQRT_HALF;
            out[i | mask] = (a - b) * SQRT_HALF;
        }
    }
    out
}

fn apply_s(v: &[C64], q: usize) -> Vec<C64> {
    let mask = 1usize << q;
    v.iter()
        .enumerate()
        .map(|(i, &a)| if i & mask != 0 { a * C64::new(0.0, 1.0) } else { a })
        .collect()
}

fn apply_cnot(v: &[C64], control: usize, target: usize) -> Vec<C64> {
    let (c, t) = (1usize << control, 1usize << target);
    let mut out = v.to_vec();
    for i in 0..v.len() {
        if i & c != 0 && i & t == 0 {
            out[i] = v[i | t];
            out[i | t] = v[i];
        }
    }
    out
}

/// Phase-fixed and rounded fingerprint. Stabilizer amplitudes live on the
/// discrete ring Z[i, 1/sqrt 2], so components of distinct states differ by
/// far more than the rounding grid.
fn canonical_key(v: &[C64]) -> Vec<(i64, i64)> {
    let pivot = v
        .iter()
        .find(|a| a.norm_sqr() > 1e-6)
        .expect("normalized state has a nonzero amplitude");
    let phase = pivot.conj() / pivot.norm();
    v.iter()
        .map(|a| {
            let w = a * phase;
            ((w.re * 1e6).round() as i64, (w.im * 1e6).round() as i64)
        })
        .collect()
}

/// All stabilizer states on `n` qubits (6, 60, 1080 for n = 1, 2, 3).
pub fn enumerate(n: usize) -> Vec<Vec<C64>> {
    let dim = 1usize << n;
    let mut start = vec![C64::new(0.0, 0.0); dim];
    start[0] = C64::new(1.0, 0.0);

    let mut seen: HashSet<Vec<(i64, i64)>> = HashSet::new();
    seen.insert(canonical_key(&start));
    let mut states = vec![start];
    let mut frontier = 0usize;
    while frontier < states.len() {
        let current = states[frontier].clone();
        frontier += 1;
        let mut nexts = Vec::new();
        for q in 0..n {
            nexts.push(apply_h(&current, q));
            nexts.push(apply_s(&current, q));
        }
        for c in 0..n {
            for t in 0..n {
                if c != t {
                    nexts.push(apply_cnot(&current, c, t));
                }
            }
        }
        for s in nexts {
            if seen.insert(canonical_key(&s)) {
                states.push(s);
            }
        }
    }
    states
}

/// Uniform-cube random amplitudes, normalized.
pub fn random_dense_state<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Vec<C64> {
    let mut v: Vec<C64> = (0..dim)
        .map(|_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect();
    let norm = v.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    for a in &mut v {
        *a /= norm;
    }
    v
}

/// `exp(i theta |1><1|)` on one qubit: a small dose of magic.
pub fn rotate_z(mut v: Vec<C64>, q: usize, theta: f64) -> Vec<C64> {
    let mask = 1usize << q;
    let phase = C64::from_polar(1.0, theta);
    for (i, a) in v.iter_mut().enumerate() {
        if i & mask != 0 {
            *a *= phase;
        }
    }
    v
}

/// `max_s |<s|psi>|^2` over an enumerated stabilizer set.
pub fn best_fidelity(psi: &[C64], set: &[Vec<C64>]) -> f64 {
    set.iter()
        .map(|s| {
            s.iter()
                .zip(psi)
                .map(|(a, b)| a.conj() * b)
                .sum::<C64>()
                .norm_sqr()
        })
        .fold(0.0, f64::max)
}
