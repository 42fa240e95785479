use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// Argument outside the domain of a special function or geometric primitive.
    #[error("{function}: argument {value} outside domain")]
    Domain { function: &'static str, value: f64 },

    /// Kernel evaluated on its singular set without regularization.
    #[error("kernel singular at x = ({0}, {1}, {2})")]
    SingularInput(f64, f64, f64),

    #[error("vorticity is not balanced: total circulation {total:e} exceeds {tolerance:e}")]
    UnbalancedVorticity { total: f64, tolerance: f64 },

    #[error("target lies on a filament and blob_epsilon is zero")]
    OnFilament,

    #[error("quadrature did not converge: estimate {estimate:e} > tolerance {tolerance:e}")]
    QuadratureNonconvergence { estimate: f64, tolerance: f64 },

    #[error("profile normalization mismatch: balanced part carries {residual:e}")]
    Normalization { residual: f64 },

    /// Configuration rejected at validation; `code` is the machine-readable tag.
    #[error("{code}: {message}")]
    InvalidConfig { code: &'static str, message: String },

    #[error("resolution too coarse: {across} particles across the support, need at least 16")]
    ResolutionTooCoarse { across: usize },

    #[error("particle set is empty")]
    EmptyParticleSet,

    #[error("need at least 4 snapshots, got {0}")]
    InsufficientSnapshots(usize),

    #[error("step rejected at t = {t}: displacement {displacement:e} exceeds {bound:e} after {retries} halvings")]
    StepRejected {
        t: f64,
        displacement: f64,
        bound: f64,
        retries: u32,
    },

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn invalid(code: &'static str, message: impl Into<String>) -> Self {
        Error::InvalidConfig {
            code,
            message: message.into(),
        }
    }

    /// Stable machine-readable tag used by the CLI error stream.
    pub fn code(&self) -> &'static str {
        match self {
            Error::Domain { .. } => "domain",
            Error::SingularInput(..) => "singular_input",
            Error::UnbalancedVorticity { .. } => "unbalanced_vorticity",
            Error::OnFilament => "on_filament",
            Error::QuadratureNonconvergence { .. } => "quadrature_nonconvergence",
            Error::Normalization { .. } => "normalization",
            Error::InvalidConfig { code, .. } => code,
            Error::ResolutionTooCoarse { .. } => "resolution_too_coarse",
            Error::EmptyParticleSet => "empty_particle_set",
            Error::InsufficientSnapshots(_) => "insufficient_snapshots",
            Error::StepRejected { .. } => "step_rejected",
            Error::Io(_) => "io",
            Error::Json(_) => "json",
            Error::Csv(_) => "csv",
        }
    }
}
