use thiserror::Error;

pub type Result<T> = std::result::Result<T, BenchError>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum BenchError {
    /// The coupling no longer dominates the gain/loss term: the spectrum of
    /// the medium Hamiltonian is complex and the closed-form propagator is
    /// undefined.
    #[error("broken PT phase: eta2 <= eta1*|sin(phi1)| (eta1={eta1}, phi1={phi1}, eta2={eta2})")]
    BrokenPhase { eta1: f64, phi1: f64, eta2: f64 },

    #[error("invalid medium parameter: {0}")]
    InvalidMedium(String),

    #[error("reflection coefficient {0} outside [0, 1]")]
    ReflectivityOutOfRange(f64),

    #[error("beam splitter phases violate the lossless constraint: theta2-theta1+theta3-theta4 = {0} (expected pi mod 2pi)")]
    LossyPhases(f64),

    #[error("total detected intensity is zero")]
    ZeroIntensity,

    #[error("closed form not applicable: {0}")]
    ClosedFormInapplicable(&'static str),

    #[error("array length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),

    #[error("invalid transverse grid: {0}")]
    InvalidGrid(String),

    #[error("transverse domain too small: beams need 3*(x0+w) = {needed} < half width {half_width}")]
    DomainTooSmall { needed: f64, half_width: f64 },

    #[error("invalid propagation config: {0}")]
    InvalidPropagation(String),
}
