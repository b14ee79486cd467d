use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix is not symplectic (residual {residual:.3e})")]
    NotSymplectic { residual: f64 },

    #[error("unphysical state: {0}")]
    Unphysical(String),

    #[error("depleted pump: total particles {total} do not exceed side-mode population {side}")]
    DepletedPump { total: f64, side: f64 },

    #[error("regime precondition violated: {0}")]
    Regime(String),

    #[error("covariance matrix is ill-conditioned (condition number {cond:.3e})")]
    IllConditioned { cond: f64 },

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("signal derivative vanishes; the measurement is insensitive at this point")]
    VanishingSignal,

    #[error("observable variance vanishes")]
    ZeroVariance,

    #[error("matrix exponential did not converge after {terms} series terms")]
    ExpmNotConverged { terms: usize },

    #[error("Fock truncation leakage {leakage:.3e} exceeds threshold {threshold:.1e}")]
    FockLeakage { leakage: f64, threshold: f64 },

    #[error("off resonance: relative detuning {detuning:.3e} exceeds tolerance {tolerance:.1e}")]
    OffResonance { detuning: f64, tolerance: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
