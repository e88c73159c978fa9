//! Adiabatic sweeps of parent Hamiltonians simulated with a first-order
//! product formula, plus the runtime and depth scaling estimates.

mod evolve;

pub use evolve::{
    apply_pauli_rotation, doubling_search, evolve, fidelity, fidelity_sweep, trotter_convergence, trotter_slice,
    trotter_terms, write_fidelity_csv, Checkpoint, EvolutionReport, EvolveOptions, FidelityPoint, FnFamily,
    HamiltonianFamily, RgParentFamily, Schedule, TrotterPoint, XxzFamily, NORM_TOL,
};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// `(|d2 H| + |dH|) / (eps delta^2) + |dH|^2 / (eps delta^3)`.
pub fn adiabatic_time<T: Real>(norm_d1: T, norm_d2: T, gap_min: T, epsilon: T) -> Result<T> {
    if !(gap_min > T::zero()) {
        return Err(Error::invalid(format!("minimum gap must be positive, got {gap_min}")));
    }
    if !(epsilon > T::zero()) {
        return Err(Error::invalid(format!("error budget must be positive, got {epsilon}")));
    }
    let d2 = gap_min * gap_min;
    Ok((norm_d2 + norm_d1) / (epsilon * d2) + norm_d1 * norm_d1 / (epsilon * d2 * gap_min))
}

/// `N S^2 (T max_b)^2 / eps_sim`, a scaling figure without the hidden constant.
pub fn depth_estimate<T: Real>(n: T, strings: T, total_time: T, max_b: T, eps_sim: T) -> T {
    let tb = total_time * max_b;
    n * strings * strings * tb * tb / eps_sim
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn runtime_arithmetic() {
        assert_eq!(adiabatic_time(1.0, 1.0, 1.0, 1.0).unwrap(), 3.0);
        assert_eq!(adiabatic_time(1.0, 1.0, 1.0, 2.0).unwrap(), 1.5);
        assert!(adiabatic_time(1.0, 1.0, 0.0, 1.0).is_err());
        assert_eq!(depth_estimate(1.0, 1.0, 1.0, 1.0, 1.0), 1.0);
        assert_eq!(depth_estimate(1.0, 2.0, 1.0, 1.0, 1.0), 4.0);
    }
}
