use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid interval: t_b ({t_b}) must exceed t_a ({t_a})")]
    InvalidInterval { t_a: f64, t_b: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("non-finite frequency value at t = {t}")]
    NonFinite { t: f64 },

    #[error("frequency profile is discontinuous near t = {t} (relative jump {jump:.3e})")]
    Discontinuous { t: f64, jump: f64 },

    #[error("invalid zero-mode shape: {0}")]
    InvalidZeroMode(String),

    #[error("step size underflow at t = {t}")]
    StepSizeUnderflow { t: f64 },

    #[error("degenerate basis: {0}")]
    DegenerateBasis(String),

    #[error("zero mode detected: {0}")]
    ZeroMode(String),

    #[error("reference operator is degenerate: {0}")]
    DegenerateReference(String),

    #[error("periodic shooting did not converge after {iterations} iterations (residual {residual:.3e})")]
    ShootingFailed { iterations: usize, residual: f64 },

    #[error("Ermakov amplitude vanished near t = {t}")]
    ErmakovSingular { t: f64 },

    #[error("monodromy is not elliptic (trace {trace:.6}), no periodic Ermakov solution")]
    UnstableMonodromy { trace: f64 },

    #[error("Ermakov solution is not periodic (residual {residual:.3e})")]
    NotPeriodic { residual: f64 },

    #[error("adaptive quadrature did not converge (estimated error {error:.3e})")]
    QuadratureFailed { error: f64 },

    #[error("Green kernel degenerates along the coupling flow near g = {g}")]
    FlowCrossing { g: f64 },

    #[error("zero mode on lattice: {count} eigenvalue(s) near zero")]
    LatticeZeroMode { count: usize },
}

impl Error {
    /// True for failures caused by a (near) zero mode of the operator itself.
    pub fn is_degenerate_operator(&self) -> bool {
        matches!(
            self,
            Error::ZeroMode(_)
                | Error::DegenerateBasis(_)
                | Error::FlowCrossing { .. }
                | Error::LatticeZeroMode { .. }
        )
    }

    /// Short machine-readable tag.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidInterval { .. } => "invalid_interval",
            Error::InvalidArgument(_) => "invalid_argument",
            Error::NonFinite { .. } => "non_finite",
            Error::Discontinuous { .. } => "discontinuous",
            Error::InvalidZeroMode(_) => "invalid_zero_mode",
            Error::StepSizeUnderflow { .. } => "step_size_underflow",
            Error::DegenerateBasis(_) => "degenerate_basis",
            Error::ZeroMode(_) => "zero_mode",
            Error::DegenerateReference(_) => "degenerate_reference",
            Error::ShootingFailed { .. } => "shooting_failed",
            Error::ErmakovSingular { .. } => "ermakov_singular",
            Error::UnstableMonodromy { .. } => "unstable_monodromy",
            Error::NotPeriodic { .. } => "not_periodic",
            Error::QuadratureFailed { .. } => "quadrature_failed",
            Error::FlowCrossing { .. } => "flow_crossing",
            Error::LatticeZeroMode { .. } => "lattice_zero_mode",
        }
    }
}
