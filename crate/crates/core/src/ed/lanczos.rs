use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LanczosSettings {
    pub max_krylov: usize,
    pub tol: f64,
    pub seed: u64,
}

impl Default for LanczosSettings {
    fn default() -> Self {
        Self {
            max_krylov: 400,
            tol: 1e-11,
            seed: 0x5eed,
        }
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn axpy(y: &mut [f64], a: f64, x: &[f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += a * xi;
    }
}

fn project_out(v: &mut [f64], basis: &[Vec<f64>]) {
    for b in basis {
        let c = dot(v, b);
        axpy(v, -c, b);
    }
}

/// Lowest eigenpair of a symmetric operator restricted to the orthogonal
/// complement of `deflate` (orthonormal vectors). Uses Lanczos with full
/// reorthogonalization and stops when the Ritz residual drops below `tol`.
pub fn lanczos_lowest<F>(apply: &F, dim: usize, deflate: &[Vec<f64>], settings: &LanczosSettings) -> Result<(f64, Vec<f64>)>
where
    F: Fn(&[f64], &mut [f64]),
{
    let mut rng = ChaCha8Rng::seed_from_u64(settings.seed);
    let mut v: Vec<f64> = (0..dim).map(|_| rng.random_range(-1.0..1.0)).collect();
    project_out(&mut v, deflate);
    let nv = dot(&v, &v).sqrt();
    v.iter_mut().for_each(|x| *x /= nv);

    let kmax = settings.max_krylov.min(dim.saturating_sub(deflate.len()));
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(kmax);
    let mut alpha = Vec::with_capacity(kmax);
    let mut beta: Vec<f64> = Vec::with_capacity(kmax);
    let mut w = vec![0.0; dim];
    basis.push(v);
    loop {
        let k = basis.len() - 1;
        apply(&basis[k], &mut w);
        let a = dot(&w, &basis[k]);
        alpha.push(a);
        // Two passes of Gram-Schmidt keep the Krylov basis orthogonal.
        for _ in 0..2 {
            project_out(&mut w, deflate);
            project_out(&mut w, &basis);
        }
        let b = dot(&w, &w).sqrt();

        let m = alpha.len();
        if m % 8 != 0 && b >= 1e-14 && m < kmax {
            beta.push(b);
            let next: Vec<f64> = w.iter().map(|e| e / b).collect();
            basis.push(next);
            continue;
        }
        let t = DMatrix::from_fn(m, m, |i, j| {
            if i == j {
                alpha[i]
            } else if i + 1 == j {
                beta[i]
            } else if j + 1 == i {
                beta[j]
            } else {
                0.0
            }
        });
        let eig = t.symmetric_eigen();
        let (imin, theta) = eig
            .eigenvalues
            .iter()
            .enumerate()
            .fold((0, f64::INFINITY), |acc, (i, &e)| if e < acc.1 { (i, e) } else { acc });
        let resid = (b * eig.eigenvectors[(m - 1, imin)]).abs();
        if resid < settings.tol || b < 1e-14 || m >= kmax {
            if resid >= settings.tol && b >= 1e-14 {
                return Err(Error::NoConvergence {
                    iterations: m,
                    residual: resid,
                });
            }
            let mut x = vec![0.0; dim];
            for (i, bv) in basis.iter().enumerate() {
                axpy(&mut x, eig.eigenvectors[(i, imin)], bv);
            }
            project_out(&mut x, deflate);
            let nx = dot(&x, &x).sqrt();
            x.iter_mut().for_each(|e| *e /= nx);
            return Ok((theta, x));
        }
        beta.push(b);
        let next: Vec<f64> = w.iter().map(|e| e / b).collect();
        basis.push(next);
    }
}
