//! Richardson-Gaudin charges: quadratic Bethe equations, continuation in the
//! coupling, gap scans and analytic gap bounds.

mod bounds;
mod continuation;
mod equations;
mod io;
mod lm;
mod scan;
mod spec;

pub use bounds::{
    dicke_witness, large_g_limit_gap, magnetization_bound, perturbative_certificate, smale_lower_bound,
    smale_prefactor, PerturbativeCertificate, SmaleBound, SECOND_DERIVATIVE_NORM,
};
pub use continuation::{
    continue_from, continue_solution, residual_sq, taylor_predict, BetheState, ContinuationPolicy, Prediction,
    StepAttempt, Trajectory, CONSTRAINT_TOL, SINGULAR_TOL,
};
pub use equations::{qbe_dg, qbe_jacobian, qbe_residual, seed_basis_index, seed_to_q};
pub use io::{fmt_f64, write_scan_csv, write_scan_sidecar};
pub use lm::{levenberg_marquardt, LmOutcome, LmSettings};
pub use scan::{full_spectrum_scan, pair_minimum, GapScan, PairMinimum, ScanOptions, ScanStep, DEFAULT_SCAN_LIMIT};
pub use spec::{RgModelSpec, SpecKind, RANDOM_DUPLICATE_TOL};
