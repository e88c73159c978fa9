use nalgebra::DMatrix;

use super::spec::RgModelSpec;
use crate::scalar::Real;

/// Residual of the quadratic Bethe equations. Entries `0..N` are
/// `q_k^2 - q_k + (g/2) sum_{j != k} (q_k - q_j)/(eps_k - eps_j)`; entry `N`
/// is the magnetization constraint `sum_k q_k - m`.
pub fn qbe_residual<T: Real>(q: &[T], g: T, spec: &RgModelSpec<T>, m: T) -> Vec<T> {
    let n = spec.n();
    assert_eq!(q.len(), n, "q length must equal N");
    let eps = spec.epsilons();
    let half_g = g * T::lit(0.5);
    let mut r = Vec::with_capacity(n + 1);
    for k in 0..n {
        let mut s = T::zero();
        for j in 0..n {
            if j != k {
                s += (q[k] - q[j]) / (eps[k] - eps[j]);
            }
        }
        r.push(q[k] * q[k] - q[k] + half_g * s);
    }
    r.push(q.iter().copied().sum::<T>() - m);
    r
}

/// `(N+1) x N` Jacobian of [`qbe_residual`] with respect to `q`.
pub fn qbe_jacobian<T: Real>(q: &[T], g: T, spec: &RgModelSpec<T>) -> DMatrix<T> {
    let n = spec.n();
    assert_eq!(q.len(), n, "q length must equal N");
    let eps = spec.epsilons();
    let half_g = g * T::lit(0.5);
    let two = T::lit(2.0);
    DMatrix::from_fn(n + 1, n, |k, l| {
        if k == n {
            T::one()
        } else if k == l {
            let mut s = T::zero();
            for j in 0..n {
                if j != k {
                    s += T::one() / (eps[k] - eps[j]);
                }
            }
            two * q[k] - T::one() + half_g * s
        } else {
            -half_g / (eps[k] - eps[l])
        }
    })
}

/// Partial derivative of the residual with respect to `g` (constraint entry is 0).
pub fn qbe_dg<T: Real>(q: &[T], spec: &RgModelSpec<T>) -> Vec<T> {
    let n = spec.n();
    let eps = spec.epsilons();
    let half = T::lit(0.5);
    let mut d: Vec<T> = (0..n)
        .map(|k| {
            let mut s = T::zero();
            for j in 0..n {
                if j != k {
                    s += (q[k] - q[j]) / (eps[k] - eps[j]);
                }
            }
            half * s
        })
        .collect();
    d.push(T::zero());
    d
}

/// Binary charge vector of a seed: bit `N - k` is `q_k(0)`, so site 1 is the
/// most significant bit.
pub fn seed_to_q<T: Real>(seed: u64, n: usize) -> Vec<T> {
    (1..=n)
        .map(|k| if seed >> (n - k) & 1 == 1 { T::one() } else { T::zero() })
        .collect()
}

/// Computational basis index of the `g = 0` eigenstate of a seed. `q_k = 1`
/// means spin up, which is basis bit value 0.
pub fn seed_basis_index(seed: u64, n: usize) -> usize {
    let mask = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
    (seed ^ mask) as usize
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn binary_vectors_solve_at_zero_coupling() {
        let spec = RgModelSpec::<f64>::central_spin(4).unwrap();
        for seed in 0..16u64 {
            let q = seed_to_q::<f64>(seed, 4);
            let r = qbe_residual(&q, 0.0, &spec, seed.count_ones() as f64);
            assert!(r.iter().all(|v| *v == 0.0));
            let j = qbe_jacobian(&q, 0.0, &spec);
            for k in 0..4 {
                assert_eq!(j[(k, k)].abs(), 1.0);
                assert_eq!(j[(4, k)], 1.0);
            }
        }
    }

    #[test]
    fn seed_bit_order() {
        assert_eq!(seed_to_q::<f64>(0b100, 3), [1.0, 0.0, 0.0]);
        assert_eq!(seed_basis_index(0b100, 3), 0b011);
    }
}
