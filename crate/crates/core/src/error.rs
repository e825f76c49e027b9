use thiserror::Error;

/// Errors raised by graph construction, function spaces and the solvers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected} values, found {found}")]
    Dimension { expected: usize, found: usize },

    #[error("vertex function belongs to a different graph")]
    GraphMismatch,

    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("invalid graph family: {0}")]
    InvalidFamily(String),

    #[error("unknown vertex {0}")]
    UnknownVertex(String),

    #[error("center vertex {0} is disconnected from the rest of the graph")]
    DisconnectedCenter(String),

    #[error("potential class violation: {0}")]
    PotentialClass(String),

    #[error("invalid potential family: {0}")]
    InvalidPotential(String),

    #[error("function is identically zero on the interior; {0} is undefined")]
    ZeroFunction(&'static str),

    #[error("function is off the Nehari set: |J'(u).u| = {defect:e} exceeds {tolerance:e}")]
    NotOnNehari { defect: f64, tolerance: f64 },

    #[error("certificate refused: J(u*) = {level} exceeds projected trial energy {trial} (+ tolerance {tolerance:e})")]
    CertificateFailed { level: f64, trial: f64, tolerance: f64 },

    #[error("mountain-pass geometry not detected: {0}")]
    GeometryNotDetected(String),

    #[error("non-finite energy at iteration {iteration}: {detail}")]
    NonFinite { iteration: usize, detail: String },

    #[error("invalid solver configuration: {0}")]
    InvalidConfig(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("graph interchange: {0}")]
    Interchange(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
