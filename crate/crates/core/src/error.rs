use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// A coefficient curve violates its structural invariants.
    #[error("invalid curve: {0}")]
    InvalidCurve(String),

    /// The model is not a valid causal tvARMA model (stability, positivity, innovations).
    #[error("invalid model: {0}")]
    InvalidModel(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// Rescaled time lies outside the admissible band [b/2, 1 - b/2].
    #[error("u = {u} outside admissible band [{lo}, {hi}] for bandwidth {bandwidth}")]
    OutOfBand {
        u: f64,
        lo: f64,
        hi: f64,
        bandwidth: f64,
    },

    #[error("parameter {theta:?} outside the box constraints")]
    OutsideBox { theta: Vec<f64> },

    #[error("local covariance matrix is ill-conditioned (condition number {condition:.3e})")]
    IllConditioned { condition: f64 },

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn io(path: impl AsRef<std::path::Path>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.as_ref().display().to_string(),
            source,
        }
    }
}
