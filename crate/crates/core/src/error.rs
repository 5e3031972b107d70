use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// Invalid arguments: mismatched dimensions, out-of-range parameters.
    #[error("usage error: {0}")]
    Usage(String),

    #[error("degenerate input: {0}")]
    Degenerate(String),

    /// The operator violated its Hermitian contract.
    #[error("operator contract violated: {0}")]
    OperatorContract(String),

    /// A polynomial series did not reach the truncation tolerance.
    #[error(
        "series did not converge within k_max = {k_max} terms (last term norm {last_term_norm:.3e}); {hint}"
    )]
    Convergence {
        k_max: usize,
        required_k: Option<usize>,
        last_term_norm: f64,
        suggested_dt: Option<f64>,
        hint: String,
    },

    #[error("unitarity check failed: |norm - 1| = {drift:.3e} exceeds {bound:.3e}")]
    Unitarity { drift: f64, bound: f64 },

    #[error("spectral bound estimation failed: {0}")]
    Estimation(String),

    #[error("basis truncation leaks {leakage:.3e} of the norm (limit {limit:.1e}); increase n_basis")]
    Truncation { leakage: f64, limit: f64 },

    #[error("invalid density matrix: {0}")]
    InvalidDensityMatrix(String),

    #[error("no well-defined period: {0}")]
    NoPeriod(String),

    #[error("eigensolver did not converge after {sweeps} sweeps (off-diagonal norm {off_norm:.3e})")]
    Eigensolver { sweeps: usize, off_norm: f64 },

    #[error("step {step}: {source}")]
    Step {
        step: usize,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    /// Convergence failures, possibly wrapped in a step index.
    pub fn is_convergence(&self) -> bool {
        match self {
            Error::Convergence { .. } | Error::Unitarity { .. } => true,
            Error::Step { source, .. } => source.is_convergence(),
            _ => false,
        }
    }
}
