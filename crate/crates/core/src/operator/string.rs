use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest chain a [`PauliString`] can describe.
pub const MAX_SITES: usize = 64;

/// Single-site Pauli letter.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    fn from_bits(x: bool, z: bool) -> Self {
        match (x, z) {
            (false, false) => Pauli::I,
            (true, false) => Pauli::X,
            (true, true) => Pauli::Y,
            (false, true) => Pauli::Z,
        }
    }

    fn bits(self) -> (bool, bool) {
        match self {
            Pauli::I => (false, false),
            Pauli::X => (true, false),
            Pauli::Y => (true, true),
            Pauli::Z => (false, true),
        }
    }

    /// Rank in the I < X < Y < Z ordering.
    fn rank(self) -> u8 {
        self as u8
    }

    pub fn as_char(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }

    pub fn from_char(c: char) -> Option<Self> {
        match c {
            'I' => Some(Pauli::I),
            'X' => Some(Pauli::X),
            'Y' => Some(Pauli::Y),
            'Z' => Some(Pauli::Z),
            _ => None,
        }
    }
}

/// Tensor product of single-site Paulis on `n_sites` qubits.
///
/// Stored in symplectic form: bit `n_sites - k` of `x`/`z` holds site `k`
/// (1-based), so site 1 is the most significant bit of a basis index. The
/// string represents `i^{|x & z|} X^x Z^z`, which makes every letter, including
/// `Y = iXZ`, Hermitian.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct PauliString {
    n_sites: u8,
    x: u64,
    z: u64,
}

impl PauliString {
    pub fn identity(n_sites: usize) -> Self {
        assert!(
            (1..=MAX_SITES).contains(&n_sites),
            "n_sites must be in 1..={MAX_SITES}"
        );
        Self {
            n_sites: n_sites as u8,
            x: 0,
            z: 0,
        }
    }

    /// String with the given letters on 1-based sites and identity elsewhere.
    pub fn from_sites(n_sites: usize, letters: &[(usize, Pauli)]) -> Self {
        let mut s = Self::identity(n_sites);
        for &(site, p) in letters {
            s.set(site, p);
        }
        s
    }

    pub fn from_letters(letters: &[Pauli]) -> Self {
        let mut s = Self::identity(letters.len());
        for (i, &p) in letters.iter().enumerate() {
            s.set(i + 1, p);
        }
        s
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites as usize
    }

    #[inline]
    fn bit(&self, site: usize) -> u64 {
        debug_assert!(site >= 1 && site <= self.n_sites());
        1u64 << (self.n_sites() - site)
    }

    /// Replaces the letter on `site` (1-based). Multiplication semantics are
    /// not applied; the previous letter is simply overwritten.
    pub fn set(&mut self, site: usize, p: Pauli) {
        assert!(
            site >= 1 && site <= self.n_sites(),
            "site {site} out of range"
        );
        let b = self.bit(site);
        let (x, z) = p.bits();
        self.x = if x { self.x | b } else { self.x & !b };
        self.z = if z { self.z | b } else { self.z & !b };
    }

    pub fn letter(&self, site: usize) -> Pauli {
        let b = self.bit(site);
        Pauli::from_bits(self.x & b != 0, self.z & b != 0)
    }

    pub fn letters(&self) -> Vec<Pauli> {
        (1..=self.n_sites()).map(|k| self.letter(k)).collect()
    }

    pub fn x_mask(&self) -> u64 {
        self.x
    }

    pub fn z_mask(&self) -> u64 {
        self.z
    }

    pub fn is_identity(&self) -> bool {
        self.x == 0 && self.z == 0
    }

    pub fn support_mask(&self) -> u64 {
        self.x | self.z
    }

    /// Number of non-identity letters.
    pub fn weight(&self) -> usize {
        self.support_mask().count_ones() as usize
    }

    /// 1-based sites carrying a non-identity letter, ascending.
    pub fn support(&self) -> Vec<usize> {
        (1..=self.n_sites())
            .filter(|&k| self.support_mask() & self.bit(k) != 0)
            .collect()
    }

    /// Number of `Y` letters.
    pub fn y_count(&self) -> u32 {
        (self.x & self.z).count_ones()
    }

    pub fn commutes_with(&self, other: &Self) -> bool {
        debug_assert_eq!(self.n_sites, other.n_sites);
        ((self.x & other.z).count_ones() + (self.z & other.x).count_ones()) % 2 == 0
    }

    /// Product `self * other = i^k * result`; returns `(k mod 4, result)`.
    pub fn mul(&self, other: &Self) -> (u8, PauliString) {
        debug_assert_eq!(self.n_sites, other.n_sites);
        let x = self.x ^ other.x;
        let z = self.z ^ other.z;
        let c1 = (self.x & self.z).count_ones() as i64;
        let c2 = (other.x & other.z).count_ones() as i64;
        let c3 = (x & z).count_ones() as i64;
        let swap = (self.z & other.x).count_ones() as i64;
        let k = (c1 + c2 + 2 * swap - c3).rem_euclid(4) as u8;
        (
            k,
            PauliString {
                n_sites: self.n_sites,
                x,
                z,
            },
        )
    }

    /// Action on a computational basis state `|b>`: returns `(phase exponent
    /// k, b')` with `P|b> = i^k |b'>`. Bit value 0 is spin up (`Z = +1`).
    #[inline]
    pub fn apply_basis(&self, b: u64) -> (u8, u64) {
        let y = (self.x & self.z).count_ones();
        let sign = (self.z & b).count_ones();
        (((y + 2 * sign) % 4) as u8, b ^ self.x)
    }

    /// Ordering used for Trotter slices: by support (ascending site lists,
    /// compared lexicographically), then by letters.
    pub fn cmp_support_first(&self, other: &Self) -> Ordering {
        self.support()
            .cmp(&other.support())
            .then_with(|| self.cmp(other))
    }
}

impl Ord for PauliString {
    /// Lexicographic in the letters from site 1, with `I < X < Y < Z`.
    fn cmp(&self, other: &Self) -> Ordering {
        match self.n_sites.cmp(&other.n_sites) {
            Ordering::Equal => {}
            o => return o,
        }
        let diff = (self.x ^ other.x) | (self.z ^ other.z);
        if diff == 0 {
            return Ordering::Equal;
        }
        let top = 63 - diff.leading_zeros() as usize;
        let site = self.n_sites() - top;
        self.letter(site).rank().cmp(&other.letter(site).rank())
    }
}

impl PartialOrd for PauliString {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for k in 1..=self.n_sites() {
            write!(f, "{}", self.letter(k).as_char())?;
        }
        Ok(())
    }
}

impl fmt::Debug for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PauliString({self})")
    }
}

impl FromStr for PauliString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let letters = s
            .chars()
            .map(|c| Pauli::from_char(c).ok_or_else(|| Error::invalid(format!("bad Pauli letter {c:?}"))))
            .collect::<Result<Vec<_>>>()?;
        if letters.is_empty() || letters.len() > MAX_SITES {
            return Err(Error::invalid(format!("Pauli string length {}", letters.len())));
        }
        Ok(Self::from_letters(&letters))
    }
}

impl Serialize for PauliString {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for PauliString {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
