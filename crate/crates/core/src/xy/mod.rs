//! Free-fermion XY chain: Bogoliubov data, mode occupations as Pauli
//! operators, and parent Hamiltonians built from them.

mod analytic;
mod charges;

pub use analytic::{
    bogoliubov_phase, dispersion, min_dispersion_sq, momenta, path_derivatives, MomentumSet, Parity, PathParameter,
    XyPoint, BOUNDARY_TOL,
};
pub use charges::{
    allowed_occupation_parity, gram, liom_gap_bound, liom_matrices, liom_operator, liom_parent_operator,
    momentum_index, number_operator, cyclic_range, cyclic_range_mod_parity, write_point_csv, parity_projector, sector_number_operators, summarize_spectrum,
    xy_parent_operator, xy_parent_spectrum, LiomGapBound, OccupationPattern, SpectrumSummary, LEVEL_TOL,
};
