use thiserror::Error;

/// Errors raised by the model, phase, quench, RG and oracle routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("chain size must be a positive even integer, got {0}")]
    InvalidChainSize(usize),

    #[error("anisotropy must be finite and non-negative, got {0}")]
    InvalidAnisotropy(f64),

    /// The quasiparticle gap vanishes, so the Bogoliubov angle is 0/0.
    #[error("gapless point at k = {k}, B = {field}: Bogoliubov angle undefined")]
    Gapless { k: f64, field: f64 },

    #[error("momentum {0} is not on the chain's pseudomomentum grid")]
    OffGrid(f64),

    #[error("invalid quench schedule: {0}")]
    InvalidSchedule(String),

    #[error("time {0} lies after the end of the quench (t must be <= 0)")]
    PositiveTime(f64),

    #[error("mass gap undefined for K = {0} (sine-Gordon term irrelevant for K <= 1/2)")]
    IrrelevantCoupling(f64),

    #[error("invalid RG input: {0}")]
    InvalidRg(String),

    #[error("dense oracle supports 2..=12 sites, got {0}")]
    SizeCap(usize),

    #[error("ground state degenerate within {gap:e} (Berry phase ill-defined)")]
    Degenerate { gap: f64 },

    #[error("eigensolver residual {0:e} exceeds tolerance")]
    NotConverged(f64),

    #[error("step size too large: {0}")]
    UnstableStep(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
