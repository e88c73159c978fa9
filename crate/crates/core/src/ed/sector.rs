use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::lanczos::{lanczos_lowest, LanczosSettings};
use crate::error::{Error, Result};
use crate::operator::{build_xxz, PauliOperator};

/// Default largest sector dimension handled by [`xxz_sector_gap`].
pub const DEFAULT_SECTOR_LIMIT: usize = 20_000;

/// Sectors up to this dimension are diagonalized densely; larger ones by Lanczos.
pub const DENSE_SECTOR_MAX: usize = 800;

/// Net out-of-sector amplitude tolerated when restricting an operator.
const LEAK_TOL: f64 = 1e-12;

/// Gaps below this are reported as degenerate.
pub const DEGENERACY_TOL: f64 = 1e-12;

/// Basis states of fixed magnetization `M = sum_j Z_j`. Basis bit value 1 is
/// spin down, so every state has `(N - M)/2` set bits.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SectorBasis {
    pub n: usize,
    pub m: i64,
    pub states: Vec<u64>,
}

impl SectorBasis {
    pub fn dim(&self) -> usize {
        self.states.len()
    }

    pub fn up_count(&self) -> usize {
        ((self.n as i64 + self.m) / 2) as usize
    }

    pub fn down_count(&self) -> usize {
        self.n - self.up_count()
    }

    pub fn index_of(&self, s: u64) -> Option<usize> {
        self.states.binary_search(&s).ok()
    }
}

fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1usize, |acc, i| acc * (n - i) / (i + 1))
}

/// Next integer with the same popcount (Gosper's hack).
fn next_same_popcount(v: u64) -> u64 {
    let t = v | (v.wrapping_sub(1));
    let w = t.wrapping_add(1);
    w | ((((!t) & w).wrapping_sub(1)) >> (v.trailing_zeros() + 1))
}

/// All `N`-bit configurations with magnetization `m`, ascending.
pub fn sector_basis(n: usize, m: i64) -> Result<SectorBasis> {
    if n == 0 || n > 62 {
        return Err(Error::invalid(format!("sector basis needs 1 <= N <= 62, got {n}")));
    }
    if m.unsigned_abs() as usize > n || (n as i64 + m) % 2 != 0 {
        return Err(Error::invalid(format!("magnetization {m} infeasible for N = {n}")));
    }
    let downs = (n as i64 - m) as usize / 2;
    let dim = binomial(n, downs);
    let mut states = Vec::with_capacity(dim);
    if downs == 0 {
        states.push(0);
    } else {
        let mut v = (1u64 << downs) - 1;
        let end = 1u64 << n;
        while v < end {
            states.push(v);
            v = next_same_popcount(v);
        }
    }
    debug_assert_eq!(states.len(), dim);
    Ok(SectorBasis { n, m, states })
}

/// Sparse real symmetric matrix in compressed-row form.
#[derive(Clone, Debug)]
pub struct SparseSym {
    pub dim: usize,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<f64>,
}

impl SparseSym {
    pub fn apply(&self, x: &[f64], y: &mut [f64]) {
        for r in 0..self.dim {
            let mut acc = 0.0;
            for idx in self.row_ptr[r]..self.row_ptr[r + 1] {
                acc += self.vals[idx] * x[self.cols[idx]];
            }
            y[r] = acc;
        }
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.dim, self.dim);
        for r in 0..self.dim {
            for idx in self.row_ptr[r]..self.row_ptr[r + 1] {
                m[(r, self.cols[idx])] += self.vals[idx];
            }
        }
        m
    }
}

/// Restriction of a magnetization-conserving real operator to a sector.
/// Fails if the operator has net amplitude outside the sector or some string
/// produces a complex matrix element.
pub fn restrict_to_sector(op: &PauliOperator<f64>, basis: &SectorBasis) -> Result<SparseSym> {
    if op.n_sites() != basis.n {
        return Err(Error::SiteMismatch {
            expected: basis.n,
            got: op.n_sites(),
        });
    }
    let mut row_ptr = vec![0];
    let mut cols = Vec::new();
    let mut vals = Vec::new();
    let mut row: Vec<(usize, f64)> = Vec::new();
    let mut leaked: Vec<(u64, f64)> = Vec::new();
    for &s in &basis.states {
        row.clear();
        for (p, c) in op.terms() {
            let (k, s2) = p.apply_basis(s);
            if k % 2 == 1 {
                return Err(Error::invalid(format!("string {p} has complex sector elements")));
            }
            let v = if k == 0 { *c } else { -*c };
            match basis.index_of(s2) {
                Some(col) => row.push((col, v)),
                None => leaked.push((s2, v)),
            }
        }
        // Single strings such as XX leave the sector; only their sum must not.
        leaked.sort_by_key(|e| e.0);
        for chunk in leaked.chunk_by(|a, b| a.0 == b.0) {
            let net: f64 = chunk.iter().map(|e| e.1).sum();
            if net.abs() > LEAK_TOL {
                return Err(Error::invalid(format!(
                    "operator maps state {s:#b} outside the magnetization sector"
                )));
            }
        }
        leaked.clear();
        row.sort_by_key(|e| e.0);
        let mut i = 0;
        while i < row.len() {
            let col = row[i].0;
            let mut v = 0.0;
            while i < row.len() && row[i].0 == col {
                v += row[i].1;
                i += 1;
            }
            if v != 0.0 {
                cols.push(col);
                vals.push(v);
            }
        }
        row_ptr.push(cols.len());
    }
    Ok(SparseSym {
        dim: basis.dim(),
        row_ptr,
        cols,
        vals,
    })
}

/// Two lowest eigenvalues of a sparse symmetric matrix (with multiplicity).
pub fn lowest_two(h: &SparseSym) -> Result<(f64, f64)> {
    if h.dim < 2 {
        return Err(Error::invalid("sector has fewer than two states"));
    }
    if h.dim <= DENSE_SECTOR_MAX {
        let mut ev: Vec<f64> = h.to_dense().symmetric_eigenvalues().iter().copied().collect();
        ev.sort_by(f64::total_cmp);
        return Ok((ev[0], ev[1]));
    }
    let settings = LanczosSettings::default();
    let apply = |x: &[f64], y: &mut [f64]| h.apply(x, y);
    let (e0, v0) = lanczos_lowest(&apply, h.dim, &[], &settings)?;
    let (e1, _) = lanczos_lowest(&apply, h.dim, &[v0], &settings)?;
    Ok((e0, e1))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GapRecord {
    pub n: usize,
    pub m: i64,
    pub delta: f64,
    pub e0: f64,
    pub e1: f64,
    pub gap: f64,
    pub degenerate: bool,
}

/// Gap above the lowest state of the XXZ chain inside one magnetization sector.
pub fn xxz_sector_gap(n: usize, m: i64, delta: f64) -> Result<GapRecord> {
    xxz_sector_gap_with_limit(n, m, delta, DEFAULT_SECTOR_LIMIT)
}

pub fn xxz_sector_gap_with_limit(n: usize, m: i64, delta: f64, limit: usize) -> Result<GapRecord> {
    let basis = sector_basis(n, m)?;
    if basis.dim() > limit {
        return Err(Error::SizeLimit {
            what: "sector dimension",
            got: basis.dim(),
            limit,
        });
    }
    let h = restrict_to_sector(&build_xxz::<f64>(n, delta)?, &basis)?;
    let (e0, e1) = lowest_two(&h)?;
    let gap = (e1 - e0).max(0.0);
    Ok(GapRecord {
        n,
        m,
        delta,
        e0,
        e1,
        gap,
        degenerate: gap < DEGENERACY_TOL,
    })
}

/// Magnetization `M` of the sector with `downs` down spins.
pub fn magnetization_for_downs(n: usize, downs: usize) -> i64 {
    n as i64 - 2 * downs as i64
}
