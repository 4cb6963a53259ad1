use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("spectrum has two values closer than {0:e}")]
    Ties(f64),
    #[error("cannot combine real-line and circular spectra")]
    MixedSupport,
    #[error("decomposition failed: {0}")]
    Decomposition(String),
    #[error("{what} did not converge (last {last:e}, previous {previous:e})")]
    NonConvergence {
        what: String,
        last: f64,
        previous: f64,
    },
    #[error("overlap eigenvalue {0} outside [0, 1]")]
    EigenvalueRange(f64),
    #[error("gap probability {0:e} is negative beyond rounding")]
    NegativeProbability(f64),
    #[error("unknown identity `{0}`")]
    UnknownIdentity(String),
    #[error("insufficient samples: {0}")]
    InsufficientSamples(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidParameter(msg.into()))
}
