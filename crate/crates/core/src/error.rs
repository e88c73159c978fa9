use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("size limit exceeded: {what} = {got} > {limit}")]
    SizeLimit {
        what: &'static str,
        got: usize,
        limit: usize,
    },

    #[error("site count mismatch: expected {expected}, got {got}")]
    SiteMismatch { expected: usize, got: usize },

    #[error("duplicate rapidity parameters eps[{0}] == eps[{1}]")]
    DuplicateEpsilon(usize, usize),

    #[error("operator is not Hermitian: residual imaginary part {0:e}")]
    NotHermitian(f64),

    #[error("singular jacobian: sigma_min = {0:e}")]
    SingularJacobian(f64),

    #[error("step size underflow for seed {seed:#b} at g = {g_reached}")]
    StepUnderflow { seed: u64, g_reached: f64 },

    #[error("unresolved root collision between seeds {a:#b} and {b:#b} at g = {g}")]
    Collision { a: u64, b: u64, g: f64 },

    #[error("phase boundary: {0}")]
    PhaseBoundary(String),

    #[error("no convergence after {iterations} iterations (residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("state is not normalized: norm = {0}")]
    NotNormalized(f64),

    #[error("joint diagonalization leakage {0:e} after all retries")]
    Leakage(f64),

    #[error("io: {0}")]
    Io(#[from] std::io::Error),

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}
