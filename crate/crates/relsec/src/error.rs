use thiserror::Error;

/// Errors produced by the analytic engine and the validation oracles.
#[derive(Debug, Clone, Error)]
pub enum Error {
    /// A parameter is outside its mathematical domain (nonpositive rate,
    /// negative target rate, zero trial count, ...).
    #[error("domain error: {0}")]
    Domain(String),

    /// Exact subset enumeration is capped; more relays would silently
    /// explode the 2^N assembly.
    #[error("relay count {n} exceeds the exact-enumeration cap of {max}")]
    TooManyRelays { n: usize, max: usize },

    /// Adaptive quadrature could not reach the requested tolerance.
    #[error("quadrature did not converge: {context} (best error estimate {best_error:.3e}, requested {requested:.3e})")]
    Convergence {
        context: String,
        best_error: f64,
        requested: f64,
    },

    /// A quadrature request is internally inconsistent (missing decoding
    /// set, relay outside the set, empty set where one is required, ...).
    #[error("invalid quadrature request: {0}")]
    BadRequest(String),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}
