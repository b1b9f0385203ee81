use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// Argument outside the documented domain of an operation.
    #[error("domain error: {what} (got {value})")]
    Domain { what: &'static str, value: f64 },

    /// Evaluation point closer than the guard distance to a pole of the
    /// Bessel ratio; `m` is the index of the offending zero.
    #[error("pole proximity: n={n}, zero index m={m}, distance {distance:e}")]
    PoleProximity { n: usize, m: usize, distance: f64 },

    /// The dispersion function itself has a pole at the requested point.
    #[error("dispersion function has a pole near s = {re} + {im}i")]
    DispersionPole { re: f64, im: f64 },

    #[error("no root found: {0}")]
    NoRoot(String),

    #[error("overflow evaluating I_(n+1/2)(x) for n={n}, x={x}; use the scaled variant")]
    Overflow { n: usize, x: f64 },

    #[error("iteration did not converge: {0}")]
    Convergence(String),

    #[error("vanishing denominator for n={n} (value {value:e})")]
    Denominator { n: usize, value: f64 },

    #[error("unresolved region [{re_min}, {re_max}] x [{im_min}, {im_max}] still holds {count} zeros at depth limit")]
    UnresolvedRegion {
        re_min: f64,
        re_max: f64,
        im_min: f64,
        im_max: f64,
        count: i64,
    },

    #[error("contour integral unreliable: {0}")]
    Contour(String),

    #[error("large-n bound not certified at n={n}: {detail}")]
    Certification { n: usize, detail: String },

    #[error("grid mismatch: expected {expected}, got {got}")]
    GridMismatch { expected: usize, got: usize },

    #[error("coefficient symmetry violated at (n={n}, m={m}): defect {defect:e}")]
    Symmetry { n: usize, m: i64, defect: f64 },

    #[error("ill-conditioned system: {0}")]
    Conditioning(String),

    #[error("recentering coefficient Q = {q:e} is too close to zero (mu near mu_1)")]
    NearBifurcation { q: f64 },

    #[error("fixed-point map is not a contraction (observed factor {factor})")]
    NonContraction { factor: f64 },

    #[error("linearization is singular (condition estimate {cond:e})")]
    Singular { cond: f64 },

    #[error("invalid configuration at `{path}`: {msg}")]
    Validation { path: String, msg: String },

    #[error("I/O error at {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("serialization error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn validation(path: impl Into<String>, msg: impl Into<String>) -> Self {
        Error::Validation {
            path: path.into(),
            msg: msg.into(),
        }
    }

    /// True for errors caused by bad input rather than numerical failure.
    pub fn is_validation(&self) -> bool {
        matches!(self, Error::Validation { .. } | Error::Domain { .. })
    }
}
