use thiserror::Error;

/// Errors raised anywhere in the bifurcation pipeline.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("curve parameter t = {t} outside the admissible range |t| < 1 - 1e-9")]
    Domain { t: f64 },

    #[error("genericity violation: {0}")]
    GenericityViolation(String),

    #[error("mode l = {l} is resonant (d l^2 + sign(d) vanishes)")]
    ResonantMode { l: usize },

    #[error("degenerate point t = {t}: mode l = {l} has a zero eigenvalue")]
    DegeneratePoint { t: f64, l: usize },

    #[error("bifurcation point at t = {t} coincides with a turning point of the trivial curve")]
    TurningPointBifurcation { t: f64 },

    #[error("no stable epsilon found around t = {t}")]
    NoStableEps { t: f64 },

    #[error("q = {q} outside the window k_max/2 < q <= k_max (k_max = {k_max})")]
    OutOfWindow { q: usize, k_max: usize },

    #[error("expected two primary points for k = {q}, found {found}")]
    MissingPair { q: usize, found: usize },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("Newton corrector did not converge after {iters} iterations (residual {residual:e})")]
    NoConvergence { iters: usize, residual: f64 },

    #[error("singular bordered Jacobian")]
    SingularJacobian,

    #[error("eigenvalue computation failed to converge")]
    EigenFailure,

    #[error("counterexample claim {claim} violated: {detail}")]
    ReportedFailure { claim: String, detail: String },

    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    /// Stable machine-readable name of the variant.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidParams(_) => "InvalidParams",
            Error::Domain { .. } => "DomainError",
            Error::GenericityViolation(_) => "GenericityViolation",
            Error::ResonantMode { .. } => "ResonantMode",
            Error::DegeneratePoint { .. } => "DegeneratePoint",
            Error::TurningPointBifurcation { .. } => "TurningPointBifurcation",
            Error::NoStableEps { .. } => "NoStableEps",
            Error::OutOfWindow { .. } => "OutOfWindow",
            Error::MissingPair { .. } => "MissingPair",
            Error::Config(_) => "ConfigError",
            Error::NoConvergence { .. } => "NoConvergence",
            Error::SingularJacobian => "SingularJacobian",
            Error::EigenFailure => "EigenFailure",
            Error::ReportedFailure { .. } => "ReportedFailure",
            Error::Io(_) => "IoError",
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
