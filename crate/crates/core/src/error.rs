use thiserror::Error;

/// Errors returned by the solvers and the Maxwell-Bloch oracle.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("domain error: {0}")]
    Domain(String),

    /// Iteration budget exhausted; carries the tightest bracket seen.
    #[error("no convergence after {iterations} iterations; best bracket [{lo}, {hi}]")]
    NoConvergence { iterations: usize, lo: f64, hi: f64 },

    #[error("no root of the area equation in [{lo}, {hi}]")]
    NoRoot { lo: f64, hi: f64 },

    #[error("seed (v0 = {v0}, w0 = {w0}) lies outside the Bloch ball")]
    OutsideBlochBall { v0: f64, w0: f64 },

    /// The linear echo solution has a pole at xi * w0 = 1.
    #[error("linear echo solution is singular: 1 - xi*w0 = {0}")]
    Singular(f64),

    /// The cubic expansion divides by w0.
    #[error("cubic expansion is degenerate for w0 = 0; use the full echo solver instead")]
    CubicDegenerate,

    #[error("integration failed at t = {t}: {reason}")]
    Integration { t: f64, reason: String },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}
