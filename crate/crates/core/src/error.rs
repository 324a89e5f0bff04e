use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("fields live on different grids")]
    GridMismatch,

    #[error("non-finite sample at index {index}")]
    NonFinite { index: usize },

    #[error("spectral result is not real: imaginary residue {residue:e} exceeds {limit:e}")]
    NonReal { residue: f64, limit: f64 },

    #[error("non-positive density {value:e} at x = {x}")]
    NonPositiveDensity { x: f64, value: f64 },

    #[error("invalid kernel: {0}")]
    InvalidKernel(String),

    #[error("degenerate kernel: a^2 = 0, higher moment coefficients are undefined")]
    DegenerateKernel,

    #[error("moment table has coefficients through c_{available}, c_{requested} requested")]
    InsufficientMoments { requested: usize, available: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("vacuum: density {density:e} below floor {floor:e} at x = {x}, t = {t}")]
    Vacuum { t: f64, x: f64, density: f64, floor: f64 },

    #[error("blow-up at t = {t}: {quantity} became non-finite")]
    Blowup { t: f64, quantity: String },

    #[error("phase undefined: |psi| = {amplitude:e} at x = {x} is below 1e-6 of max |psi|")]
    PhaseUndefined { x: f64, amplitude: f64 },

    #[error("nonzero phase winding {winding}: multivalued phase is unsupported")]
    Topology { winding: i64 },

    #[error("trajectory mismatch: {0}")]
    TrajectoryMismatch(String),

    #[error("too few snapshots: need {needed}, have {have}")]
    TooFewSnapshots { needed: usize, have: usize },

    #[error("history: {0}")]
    History(String),

    #[error("retardation horizon not covered: lag {needed} exceeds stored span {available}")]
    HorizonNotCovered { needed: f64, available: f64 },

    #[error("config error{}: {message}", line.map(|l| format!(" at line {l}")).unwrap_or_default())]
    Config { line: Option<usize>, message: String },

    #[error("io: {0}")]
    Io(String),

    #[error("csv parse error at line {line}: {message}")]
    Csv { line: usize, message: String },

    #[error("unknown verification suite '{0}'")]
    UnknownSuite(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl Error {
    /// Short machine-readable status name.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidGrid(_) => "invalid_grid",
            Error::GridMismatch => "grid_mismatch",
            Error::NonFinite { .. } => "non_finite",
            Error::NonReal { .. } => "non_real",
            Error::NonPositiveDensity { .. } => "non_positive_density",
            Error::InvalidKernel(_) => "invalid_kernel",
            Error::DegenerateKernel => "degenerate_kernel",
            Error::InsufficientMoments { .. } => "insufficient_moments",
            Error::InvalidParameter(_) => "invalid_parameter",
            Error::Vacuum { .. } => "vacuum",
            Error::Blowup { .. } => "blowup",
            Error::PhaseUndefined { .. } => "phase_undefined",
            Error::Topology { .. } => "topology",
            Error::TrajectoryMismatch(_) => "trajectory_mismatch",
            Error::TooFewSnapshots { .. } => "too_few_snapshots",
            Error::History(_) => "history",
            Error::HorizonNotCovered { .. } => "horizon_not_covered",
            Error::Config { .. } => "config",
            Error::Io(_) => "io",
            Error::Csv { .. } => "csv",
            Error::UnknownSuite(_) => "unknown_suite",
        }
    }
}
