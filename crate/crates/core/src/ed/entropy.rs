use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Reduced-density eigenvalues below this count as zero.
pub const ENTROPY_CUTOFF: f64 = 1e-14;

const NORM_TOL: f64 = 1e-10;

/// Von Neumann entropy (natural log) of the reduced state on the 1-based
/// `subsystem` sites of an `n`-site pure state.
pub fn entanglement_entropy(state: &[Complex64], n: usize, subsystem: &[usize]) -> Result<f64> {
    if state.len() != 1usize << n {
        return Err(Error::invalid(format!("state length {} is not 2^{n}", state.len())));
    }
    let norm: f64 = state.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    if (norm - 1.0).abs() > NORM_TOL {
        return Err(Error::NotNormalized(norm));
    }
    let mut in_a = vec![false; n + 1];
    for &s in subsystem {
        if s == 0 || s > n || in_a[s] {
            return Err(Error::invalid(format!("bad subsystem site {s}")));
        }
        in_a[s] = true;
    }
    let a_sites: Vec<usize> = (1..=n).filter(|&k| in_a[k]).collect();
    let b_sites: Vec<usize> = (1..=n).filter(|&k| !in_a[k]).collect();
    let gather = |idx: usize, sites: &[usize]| {
        sites
            .iter()
            .fold(0usize, |acc, &k| (acc << 1) | ((idx >> (n - k)) & 1))
    };
    let mut m = DMatrix::<Complex64>::zeros(1 << a_sites.len(), 1 << b_sites.len());
    for (idx, amp) in state.iter().enumerate() {
        m[(gather(idx, &a_sites), gather(idx, &b_sites))] = *amp;
    }
    let sv = m.svd(false, false).singular_values;
    Ok(sv
        .iter()
        .map(|s| s * s)
        .filter(|&p| p > ENTROPY_CUTOFF)
        .map(|p| -p * p.ln())
        .sum())
}

/// [`entanglement_entropy`] for a real state vector.
pub fn entanglement_entropy_real(state: &[f64], n: usize, subsystem: &[usize]) -> Result<f64> {
    let c: Vec<Complex64> = state.iter().map(|&x| Complex64::new(x, 0.0)).collect();
    entanglement_entropy(&c, n, subsystem)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn product_and_bell_states() {
        let mut prod = vec![0.0; 4];
        prod[2] = 1.0;
        assert!(entanglement_entropy_real(&prod, 2, &[1]).unwrap().abs() < 1e-14);
        let r = 0.5f64.sqrt();
        let bell = [r, 0.0, 0.0, r];
        let s = entanglement_entropy_real(&bell, 2, &[1]).unwrap();
        assert!((s - 2f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn rejects_unnormalized() {
        assert!(matches!(
            entanglement_entropy_real(&[1.0, 1.0], 1, &[1]),
            Err(Error::NotNormalized(_))
        ));
    }
}
