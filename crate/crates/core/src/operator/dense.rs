use nalgebra::{DMatrix, DVector};
use num_complex::{Complex, Complex64};

use super::pauli_op::{i_pow, PauliOperator, HERMITIAN_TOL};
use crate::error::{Error, Result};
use crate::scalar::{scaled_tol, Real};

/// Default largest site count realized as a dense matrix.
pub const DEFAULT_DENSE_LIMIT: usize = 14;

/// Dense `2^N x 2^N` Hermitian matrix; basis index bit `N - k` is site `k`.
#[derive(Clone, Debug)]
pub struct DenseHermitian<T = f64> {
    n_sites: usize,
    matrix: DMatrix<Complex<T>>,
}

impl<T: Real> DenseHermitian<T> {
    pub(crate) fn from_operator(op: &PauliOperator<T>, limit: usize) -> Result<Self> {
        let n = op.n_sites();
        if n > limit {
            return Err(Error::SizeLimit {
                what: "dense sites",
                got: n,
                limit,
            });
        }
        let dim = 1usize << n;
        let mut m = DMatrix::<Complex<T>>::from_element(dim, dim, Complex::new(T::zero(), T::zero()));
        for (s, c) in op.terms() {
            for b in 0..dim {
                let (k, row) = s.apply_basis(b as u64);
                m[(row as usize, b)] += i_pow::<T>(k) * *c;
            }
        }
        let out = Self { n_sites: n, matrix: m };
        let err = out.hermiticity_error();
        if err > scaled_tol(HERMITIAN_TOL) {
            return Err(Error::NotHermitian(err.to_f64_lossy()));
        }
        Ok(out)
    }

    /// Wraps a matrix after checking shape and Hermiticity.
    pub fn from_matrix(matrix: DMatrix<Complex<T>>) -> Result<Self> {
        let dim = matrix.nrows();
        if dim != matrix.ncols() || !dim.is_power_of_two() {
            return Err(Error::invalid(format!("matrix shape {}x{}", dim, matrix.ncols())));
        }
        let out = Self {
            n_sites: dim.trailing_zeros() as usize,
            matrix,
        };
        let err = out.hermiticity_error();
        if err > scaled_tol(HERMITIAN_TOL) {
            return Err(Error::NotHermitian(err.to_f64_lossy()));
        }
        Ok(out)
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<Complex<T>> {
        &self.matrix
    }

    pub fn into_matrix(self) -> DMatrix<Complex<T>> {
        self.matrix
    }

    /// `max |A - A^dagger|` over entries.
    pub fn hermiticity_error(&self) -> T {
        let d = self.dim();
        let mut worst = T::zero();
        for i in 0..d {
            for j in i..d {
                let e = (self.matrix[(i, j)] - self.matrix[(j, i)].conj()).norm();
                if e > worst {
                    worst = e;
                }
            }
        }
        worst
    }
}

impl DenseHermitian<f64> {
    pub fn eigenvalues(&self) -> Vec<f64> {
        hermitian_eigenvalues(&self.matrix)
    }

    pub fn eigh(&self) -> (Vec<f64>, DMatrix<Complex64>) {
        hermitian_eigh(&self.matrix)
    }

    /// `max |A_ij|` of `self * other - other * self`.
    pub fn commutator_max(&self, other: &Self) -> f64 {
        let c = &self.matrix * &other.matrix - &other.matrix * &self.matrix;
        c.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }
}

fn is_real(m: &DMatrix<Complex64>) -> bool {
    m.iter().all(|v| v.im == 0.0)
}

/// Eigenvalues of a Hermitian matrix, ascending. Uses the real symmetric
/// solver when every entry is real.
pub fn hermitian_eigenvalues(m: &DMatrix<Complex64>) -> Vec<f64> {
    let mut vals: Vec<f64> = if is_real(m) {
        m.map(|v| v.re).symmetric_eigenvalues().iter().copied().collect()
    } else {
        m.clone().symmetric_eigenvalues().iter().copied().collect()
    };
    vals.sort_by(f64::total_cmp);
    vals
}

/// Eigen-decomposition of a Hermitian matrix with eigenpairs sorted by
/// ascending eigenvalue; eigenvectors are the columns.
pub fn hermitian_eigh(m: &DMatrix<Complex64>) -> (Vec<f64>, DMatrix<Complex64>) {
    let (vals, vecs): (DVector<f64>, DMatrix<Complex64>) = if is_real(m) {
        let e = m.map(|v| v.re).symmetric_eigen();
        (e.eigenvalues, e.eigenvectors.map(|v| Complex64::new(v, 0.0)))
    } else {
        let e = m.clone().symmetric_eigen();
        (e.eigenvalues, e.eigenvectors)
    };
    let mut order: Vec<usize> = (0..vals.len()).collect();
    order.sort_by(|&a, &b| vals[a].total_cmp(&vals[b]));
    let sorted_vals = order.iter().map(|&i| vals[i]).collect();
    let sorted_vecs = DMatrix::from_fn(vecs.nrows(), vecs.ncols(), |r, c| vecs[(r, order[c])]);
    (sorted_vals, sorted_vecs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operator::{Pauli, PauliString};

    #[test]
    fn identity_string_is_identity_matrix() {
        let op = PauliOperator::<f64>::identity(3, 1.0);
        let d = op.to_dense().unwrap();
        assert_eq!(d.matrix(), &DMatrix::<Complex64>::identity(8, 8));
    }

    #[test]
    fn z_on_site_one_is_big_endian() {
        let op = PauliOperator::<f64>::single(PauliString::from_sites(2, &[(1, Pauli::Z)]), 1.0);
        let d = op.to_dense().unwrap();
        let diag: Vec<f64> = (0..4).map(|i| d.matrix()[(i, i)].re).collect();
        assert_eq!(diag, [1.0, 1.0, -1.0, -1.0]);
    }

    #[test]
    fn y_matrix_entries() {
        let op = PauliOperator::<f64>::single(PauliString::from_sites(1, &[(1, Pauli::Y)]), 1.0);
        let m = op.to_dense().unwrap().into_matrix();
        assert_eq!(m[(0, 1)], Complex64::new(0.0, -1.0));
        assert_eq!(m[(1, 0)], Complex64::new(0.0, 1.0));
    }

    #[test]
    fn size_limit_enforced() {
        let op = PauliOperator::<f64>::identity(5, 1.0);
        assert!(matches!(op.to_dense_with_limit(4), Err(Error::SizeLimit { .. })));
    }
}
