use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::operator::{build_rg_charges, PauliOperator};
use crate::rg::RgModelSpec;

/// Default largest chain for joint diagonalization.
pub const DEFAULT_JOINT_LIMIT: usize = 10;

/// Largest tolerated `||Q_k v - q_k v||` over charges and eigenvectors.
pub const LEAKAGE_TOL: f64 = 1e-9;

const MAX_RETRIES: usize = 5;

/// Common eigenbasis of a commuting family and the per-charge eigenvalues.
#[derive(Clone, Debug)]
pub struct JointSpectrum {
    /// `vectors[i][k]` is the eigenvalue of charge `k` on eigenvector `i`.
    pub vectors: Vec<Vec<f64>>,
    /// Eigenvectors as columns, aligned with `vectors`.
    pub eigenvectors: DMatrix<f64>,
    pub leakage: f64,
    pub attempts: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct JointOptions {
    pub limit: usize,
    pub rng_seed: u64,
}

impl Default for JointOptions {
    fn default() -> Self {
        Self {
            limit: DEFAULT_JOINT_LIMIT,
            rng_seed: 17,
        }
    }
}

fn real_dense(op: &PauliOperator<f64>, limit: usize) -> Result<DMatrix<f64>> {
    let m = op.to_dense_with_limit(limit)?.into_matrix();
    let worst = m.iter().map(|v| v.im.abs()).fold(0.0, f64::max);
    if worst > 0.0 {
        return Err(Error::invalid(format!("charge has imaginary entries ({worst:e})")));
    }
    Ok(m.map(|v| v.re))
}

/// Simultaneously diagonalizes mutually commuting real symmetric matrices by
/// diagonalizing a random positive combination and reading off expectation
/// values. Retries with a fresh combination when the eigenbasis leaks.
pub fn joint_diagonalize(mats: &[DMatrix<f64>], rng_seed: u64) -> Result<JointSpectrum> {
    let dim = mats.first().map(|m| m.nrows()).ok_or_else(|| Error::invalid("no matrices"))?;
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    let mut worst = f64::INFINITY;
    for attempt in 1..=MAX_RETRIES {
        let mut probe = DMatrix::<f64>::zeros(dim, dim);
        for m in mats {
            let c: f64 = rng.random_range(1.0..2.0);
            probe += m * c;
        }
        let eig = probe.symmetric_eigen();
        let v = eig.eigenvectors;
        let mut vectors = vec![vec![0.0; mats.len()]; dim];
        let mut leakage = 0.0f64;
        for (k, m) in mats.iter().enumerate() {
            let mv = m * &v;
            for i in 0..dim {
                let q = v.column(i).dot(&mv.column(i));
                vectors[i][k] = q;
                let r = (mv.column(i) - v.column(i) * q).norm();
                leakage = leakage.max(r);
            }
        }
        if leakage < LEAKAGE_TOL {
            return Ok(JointSpectrum {
                vectors,
                eigenvectors: v,
                leakage,
                attempts: attempt,
            });
        }
        worst = worst.min(leakage);
    }
    Err(Error::Leakage(worst))
}

/// Charge-eigenvalue vectors of all `2^N` eigenstates of the Richardson-Gaudin
/// family at coupling `g`.
pub fn joint_charge_spectrum(spec: &RgModelSpec<f64>, g: f64, options: &JointOptions) -> Result<JointSpectrum> {
    if spec.n() > options.limit {
        return Err(Error::SizeLimit {
            what: "joint diagonalization sites",
            got: spec.n(),
            limit: options.limit,
        });
    }
    let mats = build_rg_charges(spec, g)?
        .iter()
        .map(|q| real_dense(q, options.limit))
        .collect::<Result<Vec<_>>>()?;
    joint_diagonalize(&mats, options.rng_seed)
}

/// Largest componentwise deviation after pairing each vector of `a` with its
/// nearest unused partner in `b`; infinite if the sizes differ.
pub fn max_multiset_deviation(a: &[Vec<f64>], b: &[Vec<f64>]) -> f64 {
    if a.len() != b.len() {
        return f64::INFINITY;
    }
    let mut used = vec![false; b.len()];
    let mut worst = 0.0f64;
    for x in a {
        let mut best = (f64::INFINITY, usize::MAX);
        for (j, y) in b.iter().enumerate() {
            if used[j] || y.len() != x.len() {
                continue;
            }
            let d = x.iter().zip(y).map(|(p, q)| (p - q).abs()).fold(0.0, f64::max);
            if d < best.0 {
                best = (d, j);
            }
        }
        if best.1 == usize::MAX {
            return f64::INFINITY;
        }
        used[best.1] = true;
        worst = worst.max(best.0);
    }
    worst
}
