use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex;

use super::dense::{DenseHermitian, DEFAULT_DENSE_LIMIT};
use super::string::{PauliString, MAX_SITES};
use crate::error::{Error, Result};
use crate::scalar::{scaled_tol, Real};

/// Coefficients whose modulus falls below this after recollection are dropped.
pub const PRUNE_TOL: f64 = 1e-14;

/// Largest imaginary residue tolerated when a product must be Hermitian.
pub const HERMITIAN_TOL: f64 = 1e-12;

#[inline]
pub(crate) fn i_pow<T: Real>(k: u8) -> Complex<T> {
    match k & 3 {
        0 => Complex::new(T::one(), T::zero()),
        1 => Complex::new(T::zero(), T::one()),
        2 => Complex::new(-T::one(), T::zero()),
        _ => Complex::new(T::zero(), -T::one()),
    }
}

/// Hermitian operator stored as a real-weighted sum of Pauli strings.
///
/// The identity string carries the constant part, so `Q - q` and its square
/// need no separate scalar bookkeeping.
#[derive(Clone, Debug, PartialEq)]
pub struct PauliOperator<T = f64> {
    n_sites: usize,
    terms: BTreeMap<PauliString, T>,
}

/// Intermediate result of a Pauli product, before Hermiticity is established.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexPauliOperator<T = f64> {
    n_sites: usize,
    terms: BTreeMap<PauliString, Complex<T>>,
}

impl<T: Real> PauliOperator<T> {
    pub fn zero(n_sites: usize) -> Self {
        assert!((1..=MAX_SITES).contains(&n_sites), "n_sites out of range");
        Self {
            n_sites,
            terms: BTreeMap::new(),
        }
    }

    pub fn identity(n_sites: usize, coefficient: T) -> Self {
        Self::single(PauliString::identity(n_sites), coefficient)
    }

    pub fn single(string: PauliString, coefficient: T) -> Self {
        let mut op = Self::zero(string.n_sites());
        op.add_term(string, coefficient);
        op.prune();
        op
    }

    /// Builds an operator from `(string, coefficient)` pairs, summing repeats.
    pub fn from_terms<I: IntoIterator<Item = (PauliString, T)>>(n_sites: usize, terms: I) -> Result<Self> {
        let mut op = Self::zero(n_sites);
        for (s, c) in terms {
            if s.n_sites() != n_sites {
                return Err(Error::SiteMismatch {
                    expected: n_sites,
                    got: s.n_sites(),
                });
            }
            op.add_term(s, c);
        }
        op.prune();
        Ok(op)
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms in lexicographic string order.
    pub fn terms(&self) -> impl Iterator<Item = (&PauliString, &T)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, s: &PauliString) -> T {
        self.terms.get(s).copied().unwrap_or_else(T::zero)
    }

    /// Accumulates `c * s` without pruning.
    pub fn add_term(&mut self, s: PauliString, c: T) {
        debug_assert_eq!(s.n_sites(), self.n_sites);
        *self.terms.entry(s).or_insert_with(T::zero) += c;
    }

    /// Drops coefficients below the recollection threshold.
    pub fn prune(&mut self) {
        let tol: T = scaled_tol(PRUNE_TOL);
        self.terms.retain(|_, c| c.abs() >= tol);
    }

    pub fn scaled(&self, c: T) -> Self {
        let mut out = Self::zero(self.n_sites);
        for (s, v) in &self.terms {
            out.add_term(*s, *v * c);
        }
        out.prune();
        out
    }

    /// `self += c * other`.
    pub fn add_scaled(&mut self, other: &Self, c: T) {
        assert_eq!(self.n_sites, other.n_sites, "site count mismatch");
        for (s, v) in &other.terms {
            self.add_term(*s, *v * c);
        }
        self.prune();
    }

    /// Symbolic product `self * other`; coefficients are complex in general.
    pub fn product(&self, other: &Self) -> ComplexPauliOperator<T> {
        assert_eq!(self.n_sites, other.n_sites, "site count mismatch");
        let mut out: BTreeMap<PauliString, Complex<T>> = BTreeMap::new();
        for (a, ca) in &self.terms {
            for (b, cb) in &other.terms {
                let (k, s) = a.mul(b);
                let v = i_pow::<T>(k) * (*ca * *cb);
                *out.entry(s).or_insert_with(|| Complex::new(T::zero(), T::zero())) += v;
            }
        }
        let mut op = ComplexPauliOperator {
            n_sites: self.n_sites,
            terms: out,
        };
        op.prune();
        op
    }

    /// `self * self`, which is Hermitian; the imaginary cross terms must cancel.
    pub fn square(&self) -> Result<Self> {
        self.product(self).into_hermitian()
    }

    /// Product of two operators that is known to be Hermitian (e.g. commuting factors).
    pub fn hermitian_product(&self, other: &Self) -> Result<Self> {
        self.product(other).into_hermitian()
    }

    /// Symbolic commutator `[self, other]`. Only anticommuting string pairs contribute.
    pub fn commutator(&self, other: &Self) -> ComplexPauliOperator<T> {
        assert_eq!(self.n_sites, other.n_sites, "site count mismatch");
        let two = T::lit(2.0);
        let mut out: BTreeMap<PauliString, Complex<T>> = BTreeMap::new();
        for (a, ca) in &self.terms {
            for (b, cb) in &other.terms {
                if a.commutes_with(b) {
                    continue;
                }
                let (k, s) = a.mul(b);
                let v = i_pow::<T>(k) * (*ca * *cb * two);
                *out.entry(s).or_insert_with(|| Complex::new(T::zero(), T::zero())) += v;
            }
        }
        let mut op = ComplexPauliOperator {
            n_sites: self.n_sites,
            terms: out,
        };
        op.prune();
        op
    }

    /// Number of Pauli strings and the largest coefficient modulus.
    pub fn support_count(&self) -> (usize, T) {
        let max_b = self
            .terms
            .values()
            .fold(T::zero(), |m, c| if c.abs() > m { c.abs() } else { m });
        (self.terms.len(), max_b)
    }

    /// Sum of coefficient moduli; an upper bound on the operator norm.
    pub fn norm1(&self) -> T {
        self.terms.values().map(|c| c.abs()).sum()
    }

    /// Largest number of sites any string acts on.
    pub fn max_weight(&self) -> usize {
        self.terms.keys().map(|s| s.weight()).max().unwrap_or(0)
    }

    /// One `coefficient STRING` line per term, lexicographic order.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (s, c) in &self.terms {
            let _ = writeln!(out, "{c} {s}");
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut terms = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let mut it = line.split_whitespace();
            let (Some(c), Some(s), None) = (it.next(), it.next(), it.next()) else {
                return Err(Error::invalid(format!("line {}: expected `coefficient STRING`", lineno + 1)));
            };
            let c: f64 = c
                .parse()
                .map_err(|_| Error::invalid(format!("line {}: bad coefficient {c:?}", lineno + 1)))?;
            terms.push((s.parse::<PauliString>()?, T::lit(c)));
        }
        let n = terms
            .first()
            .map(|(s, _)| s.n_sites())
            .ok_or_else(|| Error::invalid("empty operator text"))?;
        Self::from_terms(n, terms)
    }

    pub fn to_dense(&self) -> Result<DenseHermitian<T>> {
        self.to_dense_with_limit(DEFAULT_DENSE_LIMIT)
    }

    pub fn to_dense_with_limit(&self, limit: usize) -> Result<DenseHermitian<T>> {
        DenseHermitian::from_operator(self, limit)
    }

    /// `out = self * psi` without forming a matrix.
    pub fn apply(&self, psi: &[Complex<T>], out: &mut [Complex<T>]) {
        let dim = 1usize << self.n_sites;
        assert_eq!(psi.len(), dim, "state dimension mismatch");
        assert_eq!(out.len(), dim, "output dimension mismatch");
        out.iter_mut().for_each(|v| *v = Complex::new(T::zero(), T::zero()));
        for (s, c) in &self.terms {
            for (b, amp) in psi.iter().enumerate() {
                let (k, b2) = s.apply_basis(b as u64);
                out[b2 as usize] += i_pow::<T>(k) * *amp * *c;
            }
        }
    }

    /// Converts coefficients to another scalar type.
    pub fn cast<U: Real>(&self) -> PauliOperator<U> {
        let mut out = PauliOperator::<U>::zero(self.n_sites);
        for (s, c) in &self.terms {
            out.add_term(*s, U::lit(c.to_f64_lossy()));
        }
        out.prune();
        out
    }
}

impl<T: Real> ComplexPauliOperator<T> {
    /// Sums `(string, coefficient)` pairs and prunes the result.
    pub fn from_terms<I: IntoIterator<Item = (PauliString, Complex<T>)>>(n_sites: usize, terms: I) -> Self {
        let mut out: BTreeMap<PauliString, Complex<T>> = BTreeMap::new();
        for (s, c) in terms {
            assert_eq!(s.n_sites(), n_sites, "site count mismatch");
            *out.entry(s).or_insert_with(|| Complex::new(T::zero(), T::zero())) += c;
        }
        let mut op = Self { n_sites, terms: out };
        op.prune();
        op
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&PauliString, &Complex<T>)> {
        self.terms.iter()
    }

    fn prune(&mut self) {
        let tol: T = scaled_tol(PRUNE_TOL);
        self.terms.retain(|_, c| c.norm() >= tol);
    }

    pub fn max_abs_imag(&self) -> T {
        self.terms
            .values()
            .fold(T::zero(), |m, c| if c.im.abs() > m { c.im.abs() } else { m })
    }

    pub fn norm1(&self) -> T {
        self.terms.values().map(|c| c.norm()).sum()
    }

    /// Drops the imaginary parts after checking they cancelled.
    pub fn into_hermitian(self) -> Result<PauliOperator<T>> {
        let residue = self.max_abs_imag();
        if residue > scaled_tol(HERMITIAN_TOL) {
            return Err(Error::NotHermitian(residue.to_f64_lossy()));
        }
        let mut out = PauliOperator::zero(self.n_sites);
        for (s, c) in self.terms {
            out.add_term(s, c.re);
        }
        out.prune();
        Ok(out)
    }
}

impl<T: Real> Add for PauliOperator<T> {
    type Output = Self;

    fn add(mut self, rhs: Self) -> Self {
        self.add_scaled(&rhs, T::one());
        self
    }
}

impl<T: Real> Sub for PauliOperator<T> {
    type Output = Self;

    fn sub(mut self, rhs: Self) -> Self {
        self.add_scaled(&rhs, -T::one());
        self
    }
}

impl<T: Real> Neg for PauliOperator<T> {
    type Output = Self;

    fn neg(self) -> Self {
        self.scaled(-T::one())
    }
}

impl<T: Real> Mul<T> for PauliOperator<T> {
    type Output = Self;

    fn mul(self, rhs: T) -> Self {
        self.scaled(rhs)
    }
}
