//! Exact diagonalization: magnetization sectors, joint charge spectra,
//! entanglement entropies and finite-size slope fits.

mod entropy;
mod fit;
mod io;
mod joint;
mod lanczos;
mod sector;

pub use entropy::{entanglement_entropy, entanglement_entropy_real, ENTROPY_CUTOFF};
pub use fit::{loglog_slope, SlopeFit};
pub use io::{write_entropy_csv, write_gap_csv};
pub use joint::{
    joint_charge_spectrum, joint_diagonalize, max_multiset_deviation, JointOptions, JointSpectrum,
    DEFAULT_JOINT_LIMIT, LEAKAGE_TOL,
};
pub use lanczos::{lanczos_lowest, LanczosSettings};
pub use sector::{
    lowest_two, magnetization_for_downs, restrict_to_sector, sector_basis, xxz_sector_gap, xxz_sector_gap_with_limit,
    GapRecord, SectorBasis, SparseSym, DEFAULT_SECTOR_LIMIT, DENSE_SECTOR_MAX, DEGENERACY_TOL,
};

/// `E_1 - E_0` of an ascending spectrum.
pub fn spectrum_gap(sorted: &[f64]) -> f64 {
    sorted[1] - sorted[0]
}
