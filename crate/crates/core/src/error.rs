use alloc::string::String;

/// Errors raised by the engine.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    /// Two forms (or a form and a weight) live on different grids or channel bases.
    #[error("structural mismatch: {0}")]
    Structure(String),
    /// An operation was applied to an object outside its contract.
    #[error("contract violation: {0}")]
    Contract(String),
    /// A parameter is outside its physical domain.
    #[error("invalid parameter `{name}`: {reason}")]
    Parameter {
        /// Parameter name.
        name: &'static str,
        /// What is wrong with it.
        reason: String,
    },
    /// The rotating-frame response 1/(gamma - i Omega) has a pole at the requested point.
    #[error("undamped resonance pole at Omega = {omega}")]
    Pole {
        /// Offending frequency (rad/s).
        omega: f64,
    },
    /// The homodyne angle condition has no solution (resonant force).
    #[error("back action cannot be cancelled at omega = {omega}: Re[K/Z] = 0")]
    NoCancellation {
        /// Offending frequency (rad/s).
        omega: f64,
    },
    /// Signal transfer vanishes, so the spectrum cannot be referred to the force.
    #[error("signal transfer vanishes at omega = {omega}; force referral undefined")]
    SingularReferral {
        /// Offending frequency (rad/s).
        omega: f64,
    },
    /// The steady classical mirror amplitude is unbounded.
    #[error("singular DC amplitude: {0}")]
    SingularDc(String),
    /// An optimum does not exist (e.g. |Z| = 0).
    #[error("degenerate optimum: {0}")]
    Degenerate(String),
    /// The scheme does not provide the requested quantity.
    #[error("unsupported: {0}")]
    Unsupported(String),
    /// Probe mode does not match the builder.
    #[error("probe mode {found} does not match builder for {expected}")]
    WrongMode {
        /// Mode the builder expects.
        expected: &'static str,
        /// Mode that was supplied.
        found: &'static str,
    },
    /// Named observable is not part of the scheme.
    #[error("unknown observable `{0}`")]
    UnknownObservable(String),
}

/// Result alias for engine operations.
pub type Result<T> = core::result::Result<T, Error>;

pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Error {
    Error::Parameter {
        name,
        reason: reason.into(),
    }
}
