use serde::{Deserialize, Serialize};

use super::continuation::{singular_values, BetheState, SINGULAR_TOL};
use super::equations::qbe_jacobian;
use super::spec::RgModelSpec;
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Lower bound `(M - M')^2 / N` on the squared distance between charge
/// vectors with `sum q = M` and `sum q = M'`.
pub fn magnetization_bound<T: Real>(m: T, m_prime: T, n: usize) -> T {
    let d = m - m_prime;
    d * d / T::from_usize_lossy(n)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PerturbativeCertificate<T = f64> {
    pub certified: bool,
    pub threshold: T,
}

/// Weak-coupling threshold `min|eps_k - eps_j| / (2 (2 + sqrt 5) N^2)`; below it
/// the parent gap stays within 1 of its `g = 0` value.
pub fn perturbative_certificate<T: Real>(spec: &RgModelSpec<T>, g: T) -> PerturbativeCertificate<T> {
    let n = T::from_usize_lossy(spec.n());
    let threshold = spec.min_spacing() / (T::lit(2.0) * (T::lit(2.0) + T::lit(5.0).sqrt()) * n * n);
    PerturbativeCertificate {
        certified: g.abs() < threshold,
        threshold,
    }
}

/// Limiting minimal parent gap `1/N` at strong coupling.
pub fn large_g_limit_gap<T: Real>(n: usize) -> Result<T> {
    if n < 2 {
        return Err(Error::invalid(format!("N must be >= 2, got {n}")));
    }
    Ok(T::one() / T::from_usize_lossy(n))
}

/// Dicke-state charge vectors `(M/N) 1` and `((M+1)/N) 1` together with
/// their squared distance.
pub fn dicke_witness<T: Real>(n: usize, m: usize) -> Result<(Vec<T>, Vec<T>, T)> {
    if n < 2 || m >= n {
        return Err(Error::invalid(format!("need N >= 2 and M < N, got N={n}, M={m}")));
    }
    let nf = T::from_usize_lossy(n);
    let a = vec![T::from_usize_lossy(m) / nf; n];
    let b = vec![T::from_usize_lossy(m + 1) / nf; n];
    let d = a.iter().zip(&b).map(|(x, y)| (*x - *y) * (*x - *y)).sum();
    Ok((a, b, d))
}

/// `(5 - sqrt 17) / 4`.
pub fn smale_prefactor<T: Real>() -> T {
    (T::lit(5.0) - T::lit(17.0).sqrt()) / T::lit(4.0)
}

/// Norm of the second derivative tensor of the Bethe system.
pub const SECOND_DERIVATIVE_NORM: f64 = 2.0;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SmaleBound {
    /// Certified radius around the root free of other roots; 0 if singular.
    pub value: f64,
    pub sigma_min: f64,
    pub singular: bool,
}

/// Smale separation radius `((5 - sqrt 17)/2) sigma_min(Df) / ||D^2 f||`
/// evaluated on the full `(N+1) x N` Jacobian.
pub fn smale_lower_bound(state: &BetheState, spec: &RgModelSpec<f64>) -> SmaleBound {
    let j = qbe_jacobian(&state.q, state.g, spec);
    let sigma_min = singular_values(&j).last().copied().unwrap_or(0.0);
    if sigma_min < SINGULAR_TOL {
        return SmaleBound {
            value: 0.0,
            sigma_min,
            singular: true,
        };
    }
    SmaleBound {
        value: (5.0 - 17f64.sqrt()) / 2.0 * sigma_min / SECOND_DERIVATIVE_NORM,
        sigma_min,
        singular: false,
    }
}
