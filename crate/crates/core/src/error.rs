use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("position x = {x} nm lies outside the barrier region [0, {length}] nm")]
    Domain { x: f64, length: f64 },

    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("invalid segment coverage: {0}")]
    Coverage(String),

    #[error("potential is not finite at x = {x} nm")]
    NonFinite { x: f64 },

    #[error("no propagating transmitted wave: E = {energy} eV is not above V_right = {v_right} eV")]
    NoTransmission { energy: f64, v_right: f64 },

    #[error("no propagating incident wave: E = {energy} eV is not above V_left = {v_left} eV")]
    InvalidIncidence { energy: f64, v_left: f64 },

    #[error("integration diverged at x = {x} nm")]
    Divergence { x: f64 },

    #[error("no sign change of the shooting mismatch in [{lo}, {hi}] eV")]
    Bracketing { lo: f64, hi: f64 },

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

impl Error {
    pub(crate) fn parse(line: usize, column: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            column,
            message: message.into(),
        }
    }

    /// True for failures of the numerics (as opposed to bad input).
    pub fn is_numerical(&self) -> bool {
        matches!(self, Error::Divergence { .. } | Error::Bracketing { .. } | Error::Degenerate(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
