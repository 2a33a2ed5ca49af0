use alloc::string::String;
use core::fmt;

/// Errors produced by the solver core.
///
/// Variants split into two families that callers (and the CLI exit codes)
/// treat differently: invalid inputs or unsupported requests
/// ([`is_validation`](Error::is_validation)), and numerical-accuracy
/// failures where a computation ran but its own diagnostics rejected the
/// result.
#[derive(Clone, Debug, PartialEq)]
#[non_exhaustive]
pub enum Error {
    /// An argument or configuration violates a documented precondition.
    Domain(String),
    /// The success curves never sum to 1 within their common horizon.
    NoCrossing,
    /// A curve never attains the requested probability level.
    Unattainable {
        /// The probability level that was asked for.
        requested: f64,
    },
    /// A renewal specification cannot make progress (zero deterministic
    /// cycle), so paths would never reach a positive horizon.
    DegenerateRenewal,
    /// A realized path ends before the threshold, so no exit index exists.
    InsufficientPath,
    /// The analytic route does not cover this scenario; use simulation.
    AnalyticUnavailable(String),
    /// A numerical method ran but failed its accuracy diagnostics
    /// (divergent expectation, near-singular parameters, quadrature or
    /// derivative tolerance not met).
    Accuracy(String),
}

impl Error {
    /// Builds a [`Error::Domain`] from anything displayable.
    pub fn domain(msg: impl fmt::Display) -> Self {
        Error::Domain(alloc::format!("{msg}"))
    }

    /// Builds an [`Error::Accuracy`] from anything displayable.
    pub fn accuracy(msg: impl fmt::Display) -> Self {
        Error::Accuracy(alloc::format!("{msg}"))
    }

    /// Builds an [`Error::AnalyticUnavailable`] from anything displayable.
    pub fn analytic_unavailable(msg: impl fmt::Display) -> Self {
        Error::AnalyticUnavailable(alloc::format!("{msg}"))
    }

    /// True for input/configuration problems (as opposed to numerical
    /// accuracy failures).
    pub fn is_validation(&self) -> bool {
        !matches!(self, Error::Accuracy(_))
    }
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Domain(msg) => write!(f, "invalid input: {msg}"),
            Error::NoCrossing => write!(
                f,
                "no crossing: the success probabilities never sum to 1 within the curves' horizons"
            ),
            Error::Unattainable { requested } => write!(
                f,
                "unattainable level: the curve never reaches probability {requested}"
            ),
            Error::DegenerateRenewal => write!(
                f,
                "degenerate renewal: a deterministic cycle of 0 never advances past the delay"
            ),
            Error::InsufficientPath => {
                write!(f, "insufficient path: last epoch lies below the threshold")
            }
            Error::AnalyticUnavailable(msg) => {
                write!(f, "analytic route unavailable: {msg}")
            }
            Error::Accuracy(msg) => write!(f, "numerical accuracy failure: {msg}"),
        }
    }
}

impl core::error::Error for Error {}
