use thiserror::Error;

/// Errors raised by the numerical routines and the experiment harness.
#[derive(Debug, Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error in {op}: {msg}")]
    Domain { op: &'static str, msg: String },

    /// The spectral density was evaluated exactly at its pole.
    #[error("spectral density is singular at lambda = {lambda}")]
    Singularity { lambda: f64 },

    /// Adaptive quadrature exhausted its subdivision budget.
    #[error("quadrature did not converge: estimate {estimate:e}, error bound {error_bound:e}")]
    NonConvergence { estimate: f64, error_bound: f64 },

    /// An iterative solver hit its iteration cap.
    #[error("{what} failed to converge after {iterations} iterations")]
    Convergence { what: &'static str, iterations: usize },

    /// A covariance entry failed; indices are 1-based shift numbers.
    #[error("covariance entry ({k1}, {k2}) at scale {a}: {source}")]
    CovarianceEntry {
        k1: usize,
        k2: usize,
        a: f64,
        source: Box<Error>,
    },

    /// A covariance matrix could not be factorized even with the largest jitter.
    #[error("cholesky factorization failed for a {size}x{size} matrix (last jitter {jitter:e})")]
    Factorization { size: usize, jitter: f64 },

    /// The sampled path does not cover the support of a dilated filter.
    #[error("path covers [{have_lo}, {have_hi}] but the transform needs [{need_lo}, {need_hi}]{}", level_suffix(*.level))]
    Coverage {
        need_lo: f64,
        need_hi: f64,
        have_lo: f64,
        have_hi: f64,
        level: Option<usize>,
    },

    #[error("level {0} is not present in the panel")]
    MissingLevel(usize),

    #[error("unknown filter '{0}'")]
    UnknownFilter(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("experiment aborted: {failed} of {total} replications failed")]
    TooManyFailures { failed: usize, total: usize },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

fn level_suffix(level: Option<usize>) -> String {
    match level {
        Some(j) => format!(" at level {j}"),
        None => String::new(),
    }
}

impl Error {
    pub(crate) fn domain(op: &'static str, msg: impl Into<String>) -> Self {
        Error::Domain { op, msg: msg.into() }
    }

    /// True for errors caused by bad inputs rather than numerical failure or I/O.
    pub fn is_domain(&self) -> bool {
        matches!(
            self,
            Error::Domain { .. }
                | Error::Singularity { .. }
                | Error::UnknownFilter(_)
                | Error::MissingLevel(_)
                | Error::Coverage { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
