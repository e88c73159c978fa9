use nalgebra::DMatrix;
use num_complex::Complex;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::analytic::{bogoliubov_phase, dispersion, min_dispersion_sq, momenta, Parity, XyPoint};
use crate::error::{Error, Result};
use crate::operator::{parity_operator, ComplexPauliOperator, Pauli, PauliOperator, PauliString};
use crate::rg::fmt_f64;
use crate::scalar::Real;

/// Momenta closer than this to a grid point are identified with it.
const MOMENTUM_TOL: f64 = 1e-9;

/// Index of `p` in the momentum set of a parity sector.
pub fn momentum_index<T: Real>(p: T, n: usize, parity: Parity) -> Result<usize> {
    let set = momenta::<T>(n, parity)?;
    let two_pi = T::lit(2.0) * T::PI();
    let mut wrapped = p % two_pi;
    if wrapped < T::zero() {
        wrapped += two_pi;
    }
    set.momenta
        .iter()
        .position(|&q| {
            let d = (q - wrapped).abs();
            d < T::lit(MOMENTUM_TOL) || (two_pi - d) < T::lit(MOMENTUM_TOL)
        })
        .ok_or_else(|| Error::invalid(format!("p = {p} is not an allowed momentum for N = {n}, Z = {}", parity.sign())))
}

/// `prod_{k<j} Z_k X_j` (a = 0) or `prod_{k<j} Z_k Y_j` (a = 1), 1-based `j`.
fn jw_string(n: usize, j: usize, a: usize) -> PauliString {
    let mut s = PauliString::identity(n);
    for k in 1..j {
        s.set(k, Pauli::Z);
    }
    s.set(j, if a == 0 { Pauli::X } else { Pauli::Y });
    s
}

/// Mode occupation `c_p^dagger c_p` of momentum `p` in sector `parity`,
/// expanded over Jordan-Wigner strings. The overall normalization is
/// `1/(4N)`, which makes the spectrum `{0, 1}` on the matching parity block.
pub fn number_operator<T: Real>(p: T, n: usize, parity: Parity, point: &XyPoint<T>) -> Result<PauliOperator<T>> {
    momentum_index(p, n, parity)?;
    let e = bogoliubov_phase(p, point)?;
    let i = Complex::new(T::zero(), T::one());
    let one = Complex::new(T::one(), T::zero());
    let kernel = [[one, i * e], [-i * e.conj(), one]];
    let pref = T::one() / (T::lit(4.0) * T::from_usize_lossy(n));
    let strings: Vec<[PauliString; 2]> = (1..=n).map(|j| [jw_string(n, j, 0), jw_string(n, j, 1)]).collect();
    let mut terms = Vec::with_capacity(4 * n * n);
    for j in 1..=n {
        for l in 1..=n {
            let phase = Complex::from_polar(pref, -p * (T::from_usize_lossy(l) - T::from_usize_lossy(j)));
            for (a, ka) in kernel.iter().enumerate() {
                for (b, kab) in ka.iter().enumerate() {
                    let (k, s) = strings[j - 1][a].mul(&strings[l - 1][b]);
                    terms.push((s, crate::operator::i_pow::<T>(k) * phase * *kab));
                }
            }
        }
    }
    ComplexPauliOperator::from_terms(n, terms).into_hermitian()
}

/// All `N` mode occupations of one parity sector, in momentum order.
pub fn sector_number_operators<T: Real>(n: usize, parity: Parity, point: &XyPoint<T>) -> Result<Vec<PauliOperator<T>>> {
    momenta::<T>(n, parity)?
        .momenta
        .iter()
        .map(|&p| number_operator(p, n, parity, point))
        .collect()
}

/// Parity projector `(1 + Z prod_j Z_j)/2`.
pub fn parity_projector<T: Real>(n: usize, parity: Parity) -> PauliOperator<T> {
    let mut op = parity_operator::<T>(n).scaled(T::lit(0.5 * parity.sign() as f64));
    op.add_term(PauliString::identity(n), T::lit(0.5));
    op
}

/// Parity of the number of occupied modes realized inside sector `parity`.
///
/// Even for `Z = +1` and odd for `Z = -1`, except that a zero-momentum mode
/// with `h < cos p` is a hole excitation of the Bogoliubov vacuum and flips it.
pub fn allowed_occupation_parity<T: Real>(n: usize, parity: Parity, point: &XyPoint<T>) -> Result<u8> {
    let base = match parity {
        Parity::Even => 0,
        Parity::Odd => 1,
    };
    let flips = momenta::<T>(n, parity)?
        .momenta
        .iter()
        .filter(|&&p| p.sin().abs() < T::lit(MOMENTUM_TOL) && point.h < p.cos())
        .count();
    Ok(((base + flips) % 2) as u8)
}

/// Target mode occupations for the parity-resolved XY parent Hamiltonian.
///
/// `target` lives in the sector `z_v` of the eigenstate and must carry the
/// allowed occupation parity; `other` is the vector used in the opposite
/// sector and must carry the forbidden one, so no state there reaches zero.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OccupationPattern {
    pub z_v: Parity,
    pub target: Vec<u8>,
    pub other: Vec<u8>,
}

impl OccupationPattern {
    pub fn validate<T: Real>(&self, n: usize, point: &XyPoint<T>) -> Result<()> {
        if self.target.len() != n || self.other.len() != n {
            return Err(Error::invalid(format!("occupation vectors must have length {n}")));
        }
        if self.target.iter().chain(&self.other).any(|&b| b > 1) {
            return Err(Error::invalid("occupations must be 0 or 1"));
        }
        let want = allowed_occupation_parity(n, self.z_v, point)?;
        if popcount_parity(&self.target) != want {
            return Err(Error::invalid("target occupation parity does not match its sector"));
        }
        let forbid = 1 - allowed_occupation_parity(n, self.z_v.other(), point)?;
        if popcount_parity(&self.other) != forbid {
            return Err(Error::invalid("opposite-sector occupations must carry the forbidden parity"));
        }
        Ok(())
    }

    /// Uniformly random valid pattern.
    pub fn random<T: Real, R: Rng>(n: usize, point: &XyPoint<T>, rng: &mut R) -> Result<Self> {
        let z_v = if rng.random_bool(0.5) { Parity::Even } else { Parity::Odd };
        let want = allowed_occupation_parity(n, z_v, point)?;
        let forbid = 1 - allowed_occupation_parity(n, z_v.other(), point)?;
        let draw = |rng: &mut R, par: u8| loop {
            let v: Vec<u8> = (0..n).map(|_| rng.random_range(0..2u8)).collect();
            if popcount_parity(&v) == par {
                return v;
            }
        };
        let target = draw(rng, want);
        let other = draw(rng, forbid);
        Ok(Self { z_v, target, other })
    }

    pub fn occupations(&self, parity: Parity) -> &[u8] {
        if parity == self.z_v {
            &self.target
        } else {
            &self.other
        }
    }
}

fn popcount_parity(v: &[u8]) -> u8 {
    (v.iter().map(|&b| b as usize).sum::<usize>() % 2) as u8
}

/// `sum_Z P_Z sum_k (Q_k^Z - t_k^Z)^2`: each sector's charges are only
/// meaningful on their own parity block, so the squares are projected there.
fn projected_parent<T: Real>(n: usize, charges: [(&[PauliOperator<T>], &[T]); 2]) -> Result<PauliOperator<T>> {
    let mut h = PauliOperator::zero(n);
    for (parity, (qs, ts)) in [Parity::Even, Parity::Odd].into_iter().zip(charges) {
        let mut block = PauliOperator::zero(n);
        for (q, &t) in qs.iter().zip(ts) {
            let mut shifted = q.clone();
            shifted.add_term(PauliString::identity(n), -t);
            block.add_scaled(&shifted.square()?, T::one());
        }
        h.add_scaled(&parity_projector::<T>(n, parity).hermitian_product(&block)?, T::one());
    }
    Ok(h)
}

/// Parent Hamiltonian built from all `2N` mode occupations.
pub fn xy_parent_operator<T: Real>(pattern: &OccupationPattern, n: usize, point: &XyPoint<T>) -> Result<PauliOperator<T>> {
    pattern.validate(n, point)?;
    let even = sector_number_operators(n, Parity::Even, point)?;
    let odd = sector_number_operators(n, Parity::Odd, point)?;
    let te: Vec<T> = pattern.occupations(Parity::Even).iter().map(|&b| T::lit(b as f64)).collect();
    let to: Vec<T> = pattern.occupations(Parity::Odd).iter().map(|&b| T::lit(b as f64)).collect();
    projected_parent(n, [(&even, &te), (&odd, &to)])
}

/// Ground energy, its degeneracy, the gap above it, and how far the spectrum
/// is from the nearest integers.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectrumSummary {
    pub ground: f64,
    pub ground_degeneracy: usize,
    pub gap: f64,
    pub max_integer_deviation: f64,
    pub eigenvalues: Vec<f64>,
}

/// Levels within this of the ground energy count as degenerate.
pub const LEVEL_TOL: f64 = 1e-9;

pub fn summarize_spectrum(eigenvalues: Vec<f64>) -> SpectrumSummary {
    let ground = eigenvalues[0];
    let ground_degeneracy = eigenvalues.iter().filter(|&&e| e - ground < LEVEL_TOL).count();
    let gap = eigenvalues
        .iter()
        .find(|&&e| e - ground >= LEVEL_TOL)
        .map(|e| e - ground)
        .unwrap_or(0.0);
    let max_integer_deviation = eigenvalues.iter().map(|e| (e - e.round()).abs()).fold(0.0, f64::max);
    SpectrumSummary {
        ground,
        ground_degeneracy,
        gap,
        max_integer_deviation,
        eigenvalues,
    }
}

/// Dense spectrum of the mode-occupation parent Hamiltonian.
pub fn xy_parent_spectrum(pattern: &OccupationPattern, n: usize, point: &XyPoint<f64>) -> Result<SpectrumSummary> {
    let h = xy_parent_operator(pattern, n, point)?;
    Ok(summarize_spectrum(h.to_dense()?.eigenvalues()))
}

/// Local charge `sum_{p in Gamma_Z} cos(p k) eps(p) c_p^dagger c_p`.
pub fn liom_operator<T: Real>(k: usize, n: usize, parity: Parity, point: &XyPoint<T>) -> Result<PauliOperator<T>> {
    let mut q = PauliOperator::zero(n);
    for &p in &momenta::<T>(n, parity)?.momenta {
        let w = (p * T::from_usize_lossy(k)).cos() * dispersion(p, point);
        q.add_scaled(&number_operator(p, n, parity, point)?, w);
    }
    Ok(q)
}

/// `A+_{n,l} = cos((n+1) p_l) eps(p_l)` over the `Z = +1` momenta and `A-`
/// likewise over `Z = -1`; `A b` maps occupations to local-charge values.
pub fn liom_matrices<T: Real>(n: usize, point: &XyPoint<T>) -> Result<(DMatrix<T>, DMatrix<T>)> {
    let build = |parity| -> Result<DMatrix<T>> {
        let ps = momenta::<T>(n, parity)?.momenta;
        Ok(DMatrix::from_fn(n, n, |row, l| {
            (T::from_usize_lossy(row + 1) * ps[l]).cos() * dispersion(ps[l], point)
        }))
    };
    Ok((build(Parity::Even)?, build(Parity::Odd)?))
}

/// `A^T A` for a real square matrix.
pub fn gram<T: Real>(a: &DMatrix<T>) -> DMatrix<T> {
    let n = a.ncols();
    DMatrix::from_fn(n, n, |i, j| (0..a.nrows()).map(|r| a[(r, i)] * a[(r, j)]).sum())
}

/// Parent Hamiltonian from the local charges, targets `A^Z b^Z`.
pub fn liom_parent_operator<T: Real>(pattern: &OccupationPattern, n: usize, point: &XyPoint<T>) -> Result<PauliOperator<T>> {
    pattern.validate(n, point)?;
    let (ap, am) = liom_matrices(n, point)?;
    let mut qs = Vec::with_capacity(2);
    let mut ts = Vec::with_capacity(2);
    for (parity, a) in [(Parity::Even, &ap), (Parity::Odd, &am)] {
        let b = pattern.occupations(parity);
        let charges = (1..=n)
            .map(|k| liom_operator(k, n, parity, point))
            .collect::<Result<Vec<_>>>()?;
        let targets: Vec<T> = (0..n)
            .map(|row| (0..n).map(|l| a[(row, l)] * T::lit(b[l] as f64)).sum())
            .collect();
        qs.push(charges);
        ts.push(targets);
    }
    projected_parent(n, [(&qs[0], &ts[0]), (&qs[1], &ts[1])])
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LiomGapBound<T = f64> {
    /// `(N/2) min_{p on both grids} eps(p)^2`.
    pub grid: T,
    /// `(N/2) min_p eps(p)^2` over the continuum; never above `grid`.
    pub continuum: T,
}

/// Gap lower bound of the local-charge parent Hamiltonian implied by a
/// diagonal Gram matrix `(N/2) eps(p)^2`.
pub fn liom_gap_bound<T: Real>(n: usize, point: &XyPoint<T>) -> Result<LiomGapBound<T>> {
    if point.on_phase_boundary() {
        return Err(Error::PhaseBoundary(format!("(gamma, h) = ({}, {})", point.gamma, point.h)));
    }
    let half_n = T::from_usize_lossy(n) / T::lit(2.0);
    let mut min_grid = T::infinity();
    for parity in [Parity::Even, Parity::Odd] {
        for &p in &momenta::<T>(n, parity)?.momenta {
            let e = dispersion(p, point);
            min_grid = min_grid.min(e * e);
        }
    }
    Ok(LiomGapBound {
        grid: half_n * min_grid,
        continuum: half_n * min_dispersion_sq(point),
    })
}

/// Length of the shortest cyclic arc of sites covering the support of `s`.
pub fn cyclic_range(s: &PauliString) -> usize {
    let n = s.n_sites();
    let sites = s.support();
    if sites.is_empty() {
        return 0;
    }
    let mut largest_gap = n - sites[sites.len() - 1] + sites[0] - 1;
    for w in sites.windows(2) {
        largest_gap = largest_gap.max(w[1] - w[0] - 1);
    }
    n - largest_gap
}

/// `cyclic_range` of `s` or of `s` times the parity string, whichever is
/// shorter; the two act identically up to sign inside a parity sector.
pub fn cyclic_range_mod_parity(s: &PauliString) -> usize {
    let n = s.n_sites();
    let mut parity = PauliString::identity(n);
    for k in 1..=n {
        parity.set(k, Pauli::Z);
    }
    cyclic_range(s).min(cyclic_range(&s.mul(&parity).1))
}

/// Rows `gamma,h,value` with the fixed 17-significant-digit float format.
pub fn write_point_csv<W: std::io::Write>(rows: &[(f64, f64, f64)], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["gamma", "h", "value"])?;
    for &(g, h, v) in rows {
        w.write_record([fmt_f64(g), fmt_f64(h), fmt_f64(v)])?;
    }
    w.flush()?;
    Ok(())
}
