use thiserror::Error;

use crate::dynamics::Trajectory;

/// Errors produced anywhere in the crate.
///
/// Variants map onto the failure classes the command line reports with
/// distinct exit codes: input problems ([`Error::is_domain`]) versus numeric
/// failures ([`Error::is_numeric`]).
#[derive(Debug, Error)]
pub enum Error {
    /// An instance or argument violates a documented constraint.
    #[error("domain error: {0}")]
    Domain(String),

    /// The requested quantity does not exist in this parameter regime.
    #[error("regime error: {0}")]
    Regime(String),

    /// No asymptotic class dominates by the configured ratio.
    #[error("ambiguous scaling: {0}")]
    AmbiguousScaling(String),

    /// The norm of the state drifted past the configured tolerance.
    #[error("norm drift {drift:.3e} exceeds tolerance {tol:.3e} at t = {t}")]
    NormDrift { t: f64, drift: f64, tol: f64 },

    /// The step-size controller could not make progress.
    #[error("step size underflow at t = {t} (h = {h:.3e})")]
    StepSize { t: f64, h: f64 },

    /// The integration horizon was reached before a requested event.
    #[error("horizon t_max = {t_max} reached before {awaited}")]
    Horizon {
        t_max: f64,
        awaited: String,
        partial: Box<Trajectory>,
    },

    /// The success probability never reaches the requested target.
    #[error("x = {target} is unreachable: {reason}")]
    Unreachable { target: f64, reason: String },

    /// A closed form left an imaginary residue above tolerance.
    #[error("closed form left imaginary residue {residue:.3e} (real part {real})")]
    Branch { residue: f64, real: f64 },

    #[error("numerical error: {0}")]
    Numerical(String),

    #[error("degenerate fit: {0}")]
    DegenerateFit(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn regime(msg: impl Into<String>) -> Self {
        Error::Regime(msg.into())
    }

    /// Input-side failures: bad parameters, wrong regime, unreachable targets.
    pub fn is_domain(&self) -> bool {
        matches!(
            self,
            Error::Domain(_)
                | Error::Regime(_)
                | Error::AmbiguousScaling(_)
                | Error::Unreachable { .. }
                | Error::DegenerateFit(_)
        )
    }

    /// Failures of the numerics themselves.
    pub fn is_numeric(&self) -> bool {
        matches!(
            self,
            Error::NormDrift { .. }
                | Error::StepSize { .. }
                | Error::Horizon { .. }
                | Error::Branch { .. }
                | Error::Numerical(_)
        )
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
