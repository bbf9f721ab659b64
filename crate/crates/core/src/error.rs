use thiserror::Error;

/// Every failure the simulator, pipeline and harness can report.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("time {t_s} s outside trajectory span [{start}, {end}]")]
    OutOfRange { t_s: f64, start: f64, end: f64 },
    #[error("identity {0:?} is not claimed by this agent")]
    UnknownIdentity(String),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("invalid parameter: {0}")]
    Parameter(String),
    #[error("segmentation failed: correlation peak excess {excess:.3e} below floor {floor:.3e}")]
    Segmentation { excess: f64, floor: f64 },
    #[error("reflection mask needs both reflected and non-reflected samples (got {reflected} / {non_reflected})")]
    Mask { reflected: usize, non_reflected: usize },
    #[error("all tag reflections are zero; signature cannot be normalized")]
    DegenerateSignature,
    #[error("identity {identity:?} has {have} valid signatures, needs {need}")]
    InsufficientData { identity: String, have: usize, need: usize },
    #[error("centered vector has (near) zero norm")]
    DegenerateCentering,
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("training data: {0}")]
    TrainingData(String),
    #[error("training diverged at iteration {0}")]
    Divergence(usize),
    #[error("metrics undefined: {0}")]
    MetricsUndefined(String),
    #[error("io: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
