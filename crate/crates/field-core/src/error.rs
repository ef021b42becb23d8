use thiserror::Error;

/// Error classes shared by every solver in the workspace.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("inconsistent input: {0}")]
    Inconsistency(String),
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("gauge singularity: {0}")]
    GaugeSingularity(String),
    #[error("stability bound violated: {0}")]
    Stability(String),
    #[error("state is not normalized (measured norm {norm})")]
    Normalization { norm: f64 },
    #[error("outside the bound-state window: {0}")]
    Window(String),
    #[error("box too small: {0}")]
    Truncation(String),
    #[error("resource limit exceeded: {0}")]
    Resource(String),
    #[error("degenerate metric: {0}")]
    DegenerateMetric(String),
    #[error("undefined density: {0}")]
    UndefinedDensity(String),
    #[error("singular configuration: {0}")]
    SingularConfiguration(String),
    #[error("degenerate transverse momentum: {0}")]
    DegenerateTransverse(String),
    #[error("undefined phase: {0}")]
    UndefinedPhase(String),
}

pub type Result<T> = std::result::Result<T, Error>;
