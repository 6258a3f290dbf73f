use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("mode index {mode} out of range for a {n_modes}-mode state")]
    ModeOutOfRange { mode: usize, n_modes: usize },

    #[error("mode {0} used twice; the operation needs two distinct modes")]
    ModeCollision(usize),

    #[error("matrix is not symplectic: max |S Ω Sᵀ - Ω| = {defect:e}")]
    NotSymplectic { defect: f64 },

    #[error("asymptotic evaluator assumption violated: {0}")]
    AssumptionViolated(String),

    #[error("squeezing angle xi = {xi} sits on the cos²(xi) = 0 singularity")]
    SingularXi { xi: f64 },

    #[error("d<J3>/dphi = {derivative:e} vanishes at phi = {phi}; phase sensitivity is undefined there")]
    DegeneratePoint { phi: f64, derivative: f64 },

    #[error("variance {0:e} is negative beyond round-off; the state is unphysical")]
    NegativeVariance(f64),

    #[error("Fock truncation leakage {leakage:e} exceeds 1e-8 at cutoff {cutoff}")]
    LeakageExceeded { cutoff: usize, leakage: f64 },

    #[error("no sign change of the objective on [{lo}, {hi}]")]
    NoBracket { lo: f64, hi: f64 },
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }

    /// True for failures caused by a numerically degenerate evaluation point
    /// rather than malformed input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::SingularXi { .. }
                | Error::DegeneratePoint { .. }
                | Error::NegativeVariance(_)
                | Error::LeakageExceeded { .. }
                | Error::NoBracket { .. }
                | Error::NotSymplectic { .. }
        )
    }
}
