use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("unsupported composition: {0}")]
    UnsupportedComposition(String),
    #[error("chart mismatch: {0}")]
    ChartMismatch(String),
    #[error("point outside domain: {0}")]
    DomainError(String),
    #[error("sections or elements over different Lie-Rinehart algebras")]
    ParentMismatch,
    #[error("verification failed: {what} (witness: {witness})")]
    VerificationFailed { what: String, witness: String },
    #[error("germs are not composable: {0}")]
    NotComposable(String),
    #[error("element is not in the etale subalgebra: term over {0} has positive degree")]
    NotEtaleElement(String),
    #[error("registry not supported by the stratifier: {0}")]
    UnsupportedRegistry(String),
    #[error("unknown bisection `{0}`")]
    UnknownBisection(String),
    #[error("parse error at {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error("invalid model: {0}")]
    Model(String),
}

pub type Result<T> = std::result::Result<T, Error>;
