use crate::dynamics::Trajectory;

/// Unified error type for model, scattering, dynamics and stability layers.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// sin k = 0: the mode carries no flux and the scattering ansatz degenerates.
    #[error("band edge: sin k = 0 at k = {k} carries no incident flux")]
    BandEdge { k: f64 },

    /// |Omega_k - Omega| fell below the resonance epsilon with J != 0.
    #[error("atomic resonance pole: Omega_k - Omega = {gap:.3e}, within {eps:.3e} of zero")]
    PoleAtResonance { gap: f64, eps: f64 },

    /// xi = 0 disconnects the chain; no transport quantity is defined.
    #[error("zero hopping: xi = 0 disconnects the cavity chain")]
    ZeroHopping,

    /// The closed-form linear path was asked for with a Kerr term present.
    #[error("linear transmission requires g = 0, got g = {g}")]
    NotLinear { g: f64 },

    /// Site index outside -N..=N.
    #[error("site {site} outside the array range -{half_len}..={half_len}")]
    SiteOutOfRange { site: i64, half_len: usize },

    /// A state or matrix was built for a different array length.
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    /// The eigenvalue iteration did not converge (or the matrix was not finite).
    #[error("eigenvalue computation failed: {0}")]
    EigenFailure(String),

    /// The adaptive integrator pushed the step below the representable floor.
    #[error("step underflow at t = {t}: dt = {dt:.3e} cannot resolve the local error")]
    StepUnderflow { t: f64, dt: f64 },

    /// The state left the finite domain; `partial` holds samples up to the
    /// last finite one so callers can flush what was computed.
    #[error("non-finite state at t = {t}")]
    NonFinite { t: f64, partial: Box<Trajectory> },

    /// Invalid parameters or options, with a human-readable reason.
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }
}
