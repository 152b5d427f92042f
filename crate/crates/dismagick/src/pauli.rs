//! Symplectic (bit-mask) representation of *n*-qubit Pauli strings.
//!
//! A Pauli string is stored as a pair of bit masks plus a power of `i`:
//!
//! ```text
//!     P = i^phase_exp · X^x_mask · Z^z_mask
//! ```
//!
//! where bit `k` of each mask refers to site `k` and the `X`/`Z` factors on
//! different sites commute. Per-site letters follow from the mask bits:
//! `(0,0) -> I`, `(1,0) -> X`, `(0,1) -> Z`, `(1,1) -> i·XZ = Y` (up to the
//! global phase tracked in `phase_exp`). This representation multiplies in
//! O(n/64) and is the backbone of Clifford conjugation, exact stabilizer
//! Rényi entropies, and Pauli sampling.

use std::fmt;

use ndarray::Array2;
use thiserror::Error;

use crate::types::C64;

/// Largest qubit count representable with the `u64` masks used here.
pub const MAX_QUBITS: usize = 64;

/// Errors from Pauli-string construction and arithmetic.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PauliError {
    #[error("qubit count {0} exceeds the supported maximum of {MAX_QUBITS}")]
    TooManyQubits(usize),
    #[error("mask 0x{mask:x} has bits set beyond qubit count {n}")]
    MaskOutOfRange { mask: u64, n: usize },
    #[error("operand lengths differ: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("site {site} out of range for {n} qubits")]
    SiteOutOfRange { site: usize, n: usize },
    #[error("cannot parse {0:?} as a Pauli letter (expected I, X, Y or Z)")]
    BadLetter(char),
}

/// Single-site Pauli letter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PauliLetter {
    I,
    X,
    Y,
    Z,
}

impl PauliLetter {
    /// All four letters in the index order used throughout the crate.
    pub const ALL: [PauliLetter; 4] = [
        PauliLetter::I,
        PauliLetter::X,
        PauliLetter::Y,
        PauliLetter::Z,
    ];

    /// Index of the letter in `ALL` (I=0, X=1, Y=2, Z=3).
    pub fn index(self) -> usize {
        match self {
            PauliLetter::I => 0,
            PauliLetter::X => 1,
            PauliLetter::Y => 2,
            PauliLetter::Z => 3,
        }
    }

    /// Dense 2x2 matrix of the letter.
    pub fn matrix(self) -> Array2<C64> {
        let o = C64::new(0.0, 0.0);
        let l = C64::new(1.0, 0.0);
        let i = C64::new(0.0, 1.0);
        match self {
            PauliLetter::I => ndarray::array![[l, o], [o, l]],
            PauliLetter::X => ndarray::array![[o, l], [l, o]],
            PauliLetter::Y => ndarray::array![[o, -i], [i, o]],
            PauliLetter::Z => ndarray::array![[l, o], [o, -l]],
        }
    }

    fn from_char(c: char) -> Result<Self, PauliError> {
        match c {
            'I' | 'i' => Ok(PauliLetter::I),
            'X' | 'x' => Ok(PauliLetter::X),
            'Y' | 'y' => Ok(PauliLetter::Y),
            'Z' | 'z' => Ok(PauliLetter::Z),
            other => Err(PauliError::BadLetter(other)),
        }
    }

    fn as_char(self) -> char {
        match self {
            PauliLetter::I => 'I',
            PauliLetter::X => 'X',
            PauliLetter::Y => 'Y',
            PauliLetter::Z => 'Z',
        }
    }

    /// X/Z mask bits of the letter.
    fn bits(self) -> (u64, u64) {
        match self {
            PauliLetter::I => (0, 0),
            PauliLetter::X => (1, 0),
            PauliLetter::Y => (1, 1),
            PauliLetter::Z => (0, 1),
        }
    }
}

/// An n-qubit Pauli string `i^phase_exp · X^x_mask · Z^z_mask`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PauliString {
    n: usize,
    x_mask: u64,
    z_mask: u64,
    /// Exponent of the global `i` prefactor, reduced mod 4.
    phase_exp: u8,
}

impl PauliString {
    /// The identity string on `n` qubits.
    pub fn identity(n: usize) -> Result<Self, PauliError> {
        Self::new(n, 0, 0, 0)
    }

    /// Builds a string from raw masks. Bits of the masks beyond `n` must be
    /// clear.
    pub fn new(n: usize, x_mask: u64, z_mask: u64, phase_exp: u8) -> Result<Self, PauliError> {
        if n > MAX_QUBITS {
            return Err(PauliError::TooManyQubits(n));
        }
        let valid = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
        for mask in [x_mask, z_mask] {
            if mask & !valid != 0 {
                return Err(PauliError::MaskOutOfRange { mask, n });
            }
        }
        Ok(Self {
            n,
            x_mask,
            z_mask,
            phase_exp: phase_exp & 3,
        })
    }

    /// The Hermitian representative with the given masks: the phase is fixed
    /// to `i^{|x & z|}` so that each Y site carries its usual `i·XZ` factor
    /// and the overall operator squares to the identity.
    pub fn hermitian(n: usize, x_mask: u64, z_mask: u64) -> Result<Self, PauliError> {
        let pe = ((x_mask & z_mask).count_ones() % 4) as u8;
        Self::new(n, x_mask, z_mask, pe)
    }

    /// Builds a string from per-site letters with phase `+1` (Hermitian).
    pub fn from_letters(letters: &[PauliLetter]) -> Result<Self, PauliError> {
        if letters.len() > MAX_QUBITS {
            return Err(PauliError::TooManyQubits(letters.len()));
        }
        let (mut x, mut z) = (0u64, 0u64);
        for (site, l) in letters.iter().enumerate() {
            let (xb, zb) = l.bits();
            x |= xb << site;
            z |= zb << site;
        }
        Self::hermitian(letters.len(), x, z)
    }

    /// Parses a letter string such as `"XIZY"`; site 0 is the leftmost
    /// character. The result is Hermitian (phase `+1`).
    pub fn parse(s: &str) -> Result<Self, PauliError> {
        let letters = s
            .chars()
            .map(PauliLetter::from_char)
            .collect::<Result<Vec<_>, _>>()?;
        Self::from_letters(&letters)
    }

    /// A single Hermitian letter at `site`, identity elsewhere.
    pub fn single(n: usize, site: usize, letter: PauliLetter) -> Result<Self, PauliError> {
        if site >= n {
            return Err(PauliError::SiteOutOfRange { site, n });
        }
        let (xb, zb) = letter.bits();
        Self::hermitian(n, xb << site, zb << site)
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn x_mask(&self) -> u64 {
        self.x_mask
    }

    pub fn z_mask(&self) -> u64 {
        self.z_mask
    }

    /// Exponent of the `i^k` prefactor, in `0..4`.
    pub fn phase_exp(&self) -> u8 {
        self.phase_exp
    }

    /// The complex prefactor `i^phase_exp`.
    pub fn phase(&self) -> C64 {
        match self.phase_exp {
            0 => C64::new(1.0, 0.0),
            1 => C64::new(0.0, 1.0),
            2 => C64::new(-1.0, 0.0),
            _ => C64::new(0.0, -1.0),
        }
    }

    /// Letter at `site`, ignoring the global phase.
    pub fn letter(&self, site: usize) -> PauliLetter {
        let x = (self.x_mask >> site) & 1;
        let z = (self.z_mask >> site) & 1;
        match (x, z) {
            (0, 0) => PauliLetter::I,
            (1, 0) => PauliLetter::X,
            (1, 1) => PauliLetter::Y,
            _ => PauliLetter::Z,
        }
    }

    /// Number of non-identity sites.
    pub fn weight(&self) -> u32 {
        (self.x_mask | self.z_mask).count_ones()
    }

    /// True when the string equals its own adjoint, i.e.
    /// `phase_exp ≡ |x & z| (mod 2)` ... an even/odd match between the phase
    /// and the number of Y sites.
    pub fn is_hermitian(&self) -> bool {
        u32::from(self.phase_exp) % 2 == (self.x_mask & self.z_mask).count_ones() % 2
    }

    /// Same masks with the phase replaced by the Hermitian convention.
    pub fn hermitian_part(&self) -> Self {
        Self::hermitian(self.n, self.x_mask, self.z_mask).expect("masks already validated")
    }

    /// Product `self · rhs`. Moving `rhs`'s X block through `self`'s Z block
    /// picks up `(-1)^{|z_self & x_rhs|}`, and colliding X (Z) factors cancel
    /// by xor.
    pub fn mul(&self, rhs: &Self) -> Result<Self, PauliError> {
        if self.n != rhs.n {
            return Err(PauliError::LengthMismatch(self.n, rhs.n));
        }
        let anti = (self.z_mask & rhs.x_mask).count_ones() % 2;
        let pe = (u32::from(self.phase_exp) + u32::from(rhs.phase_exp) + 2 * anti) % 4;
        Self::new(
            self.n,
            self.x_mask ^ rhs.x_mask,
            self.z_mask ^ rhs.z_mask,
            pe as u8,
        )
    }

    /// Adjoint: `(i^k X^x Z^z)^H = i^{-k} Z^z X^x`, and commuting the blocks
    /// back to X-before-Z order costs `(-1)^{|x & z|}`.
    pub fn adjoint(&self) -> Self {
        let swap = 2 * ((self.x_mask & self.z_mask).count_ones() % 2);
        let pe = (4 - u32::from(self.phase_exp) + swap) % 4;
        Self {
            phase_exp: pe as u8,
            ..*self
        }
    }

    /// True when `self` and `rhs` commute: symplectic form
    /// `|x1&z2| + |z1&x2|` even.
    pub fn commutes_with(&self, rhs: &Self) -> bool {
        let form = (self.x_mask & rhs.z_mask).count_ones() + (self.z_mask & rhs.x_mask).count_ones();
        form % 2 == 0
    }

    /// Action on a computational-basis index (site `k` maps to basis bit
    /// `n-1-k`): returns the image index and the amplitude factor.
    ///
    /// `P |i> = i^phase_exp · (-1)^{z·i} |i ^ x>` with the masks translated to
    /// basis-bit order.
    pub fn apply_to_basis_index(&self, index: u64) -> (u64, C64) {
        let xb = reverse_low_bits(self.x_mask, self.n);
        let zb = reverse_low_bits(self.z_mask, self.n);
        let sign = if (zb & index).count_ones() % 2 == 0 {
            1.0
        } else {
            -1.0
        };
        (index ^ xb, self.phase() * C64::new(sign, 0.0))
    }

    /// Dense `2^n x 2^n` matrix. Intended for oracles and small-system
    /// cross-checks; refuses to materialize more than 12 qubits.
    pub fn dense(&self) -> Result<Array2<C64>, PauliError> {
        if self.n > 12 {
            return Err(PauliError::TooManyQubits(self.n));
        }
        let dim = 1usize << self.n;
        let mut m = Array2::zeros((dim, dim));
        for col in 0..dim as u64 {
            let (row, amp) = self.apply_to_basis_index(col);
            m[(row as usize, col as usize)] = amp;
        }
        Ok(m)
    }

    /// Iterator over all `4^n` Hermitian strings on `n` qubits, identity
    /// first, ordered by `(z_mask, x_mask)` lexicographically.
    pub fn hermitian_basis(n: usize) -> impl Iterator<Item = PauliString> {
        assert!(n <= 16, "hermitian_basis is meant for small n");
        let side = 1u64 << n;
        (0..side * side).map(move |k| {
            let x = k % side;
            let z = k / side;
            PauliString::hermitian(n, x, z).expect("masks in range")
        })
    }
}

/// Reverses the `n` low bits of `mask` (site order <-> basis-bit order).
pub(crate) fn reverse_low_bits(mask: u64, n: usize) -> u64 {
    if n == 0 {
        return 0;
    }
    mask.reverse_bits() >> (64 - n)
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        // Show the phase relative to the Hermitian letter form, so that
        // e.g. +Y displays as "+Y" even though Y carries an internal i.
        let rel = (4 + u32::from(self.phase_exp)
            - (self.x_mask & self.z_mask).count_ones() % 4)
            % 4;
        let prefix = match rel {
            0 => "+",
            1 => "+i",
            2 => "-",
            _ => "-i",
        };
        write!(f, "{prefix}")?;
        for site in 0..self.n {
            write!(f, "{}", self.letter(site).as_char())?;
        }
        Ok(())
    }
}
