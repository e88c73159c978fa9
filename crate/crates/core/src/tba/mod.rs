//! Thermodynamic Bethe ansatz for the gapless XXZ chain in a field.

mod solver;

pub use solver::{
    gamma_for_delta, kernel, observables, solve_at_boundary, solve_at_density, solve_dressing, tba_sweep,
    write_tba_csv, zero_field_fermi_velocity, zero_field_zeta_sq, BoundaryRule, TbaInput, TbaObservables,
    TbaProfile, TbaSweepRow, BOUNDARY_TOL, EDGE_STENCIL, POLE_TOL,
};

use serde::{Deserialize, Serialize};

use crate::scalar::Real;

/// Quantum numbers of a low-lying level: magnetization change, backscattering
/// number and right/left particle-hole counts.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExcitationLabels {
    pub n_m: i64,
    pub d: i64,
    pub n_plus: u64,
    pub n_minus: u64,
}

/// `2 pi v_F (N_M^2 / (4 Zeta^2) + Zeta^2 d^2 + N+ + N-) / N`.
pub fn excitation_energy<T: Real>(v_f: T, zeta: T, labels: ExcitationLabels, n: usize) -> T {
    let z2 = zeta * zeta;
    let nm = T::lit(labels.n_m as f64);
    let d = T::lit(labels.d as f64);
    let sum = nm * nm / (T::lit(4.0) * z2) + z2 * d * d + T::lit((labels.n_plus + labels.n_minus) as f64);
    T::lit(2.0) * T::PI() * v_f * sum / T::from_usize_lossy(n)
}

/// Lowest nonzero energy with `N_M = 0`: one particle-hole pair or one
/// backscattering unit, whichever is cheaper.
pub fn sector_gap<T: Real>(v_f: T, zeta: T, n: usize) -> T {
    let one = ExcitationLabels { n_plus: 1, ..Default::default() };
    let back = ExcitationLabels { d: 1, ..Default::default() };
    excitation_energy(v_f, zeta, one, n).min(excitation_energy(v_f, zeta, back, n))
}
