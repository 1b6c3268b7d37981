use thiserror::Error;

/// Unified error type for the library.
#[derive(Debug, Error)]
pub enum Error {
    /// A caller-supplied value violates a documented precondition.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// Input data is structurally fine but cannot support the requested
    /// computation (rank-deficient fit, ill-conditioned normal equations).
    #[error("degenerate data: {0}")]
    DegenerateData(String),

    #[error("config parse error at line {line}: {msg}")]
    ConfigParse { line: usize, msg: String },

    /// A parsed config value violates a model invariant.
    #[error("config key `{key}`: {msg}")]
    ConfigValue { key: String, msg: String },

    #[error("csv parse error at line {line}: {msg}")]
    CsvParse { line: usize, msg: String },

    /// The mass matrix lost invertibility. Carries the state so a long
    /// run can be debugged without re-running it.
    #[error("singular mass matrix at t = {t} s (det = {det:e}, theta1 = {theta1} rad, theta2 = {theta2} rad)")]
    SingularMassMatrix { t: f64, det: f64, theta1: f64, theta2: f64 },

    /// Integration produced a non-finite state component.
    #[error("simulation diverged at t = {t} s: {what}")]
    Diverged { t: f64, what: String },

    /// The requested step size cannot resolve the scenario.
    #[error("invalid step: {0}")]
    InvalidStep(String),

    /// A trajectory is too short for the requested analysis.
    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
