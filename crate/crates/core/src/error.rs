//! Error taxonomy shared by the library and the command-line tool.
//!
//! The variants map one-to-one onto process exit codes so that scripted
//! callers can distinguish configuration mistakes from numerical failures
//! and from physical-regime violations.

use thiserror::Error;

/// Library-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    /// Malformed or out-of-domain input: bad config values, negative
    /// frequencies, tabulated-spectrum extrapolation, inconsistent shapes.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// An iterative numerical scheme failed to reach its tolerance
    /// (quadrature refinement, step-halving differentiation, ODE stepping).
    #[error("numerical non-convergence: {0}")]
    NonConvergence(String),

    /// The requested computation is outside the validity regime of the
    /// underlying model (population inversion, sideband-comb mass deficit
    /// over tolerance, target temperature below the dissipative floor).
    #[error("regime violation: {0}")]
    RegimeViolation(String),

    /// Every sideband of the drive sees zero spectral response, so the probe
    /// exchanges no energy with the bath and has no steady state.
    #[error("probe decoupled: every sideband sees zero spectral response")]
    ProbeDecoupled,

    /// Underlying I/O failure (reading a tabulated spectrum, writing output).
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Process exit code for this error class.
    ///
    /// 2 = invalid input, 3 = numerical non-convergence, 4 = regime
    /// violation (including a decoupled probe). Exit code 1 is reserved for
    /// assertion failures in verification commands.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::InvalidInput(_) | Error::Io(_) => 2,
            Error::NonConvergence(_) => 3,
            Error::RegimeViolation(_) | Error::ProbeDecoupled => 4,
        }
    }
}

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;
