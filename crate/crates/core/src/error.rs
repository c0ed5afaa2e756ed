use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// The adapter could not build a legal neighbor of the current configuration.
    #[error("no legal move after {attempts} attempts")]
    AdapterMoveImpossible { attempts: usize },

    #[error("invalid instance: {0}")]
    InvalidInstance(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("averaged cost curve is flat; nothing to fit")]
    FitDegenerate,

    #[error("collapse objective has no interior minimum (c_crit={c_crit:.3}, nu={nu:.3})")]
    CollapseUnstable { c_crit: f64, nu: f64 },

    #[error("calibration unstable: passes differ by {relative_change:.1}%")]
    CalibrationUnstable { relative_change: f64 },

    #[error("state space of {states} configurations exceeds the brute-force limit")]
    TooLarge { states: u128 },

    #[error("ground-state set is empty")]
    EmptySet,

    #[error("flow does not conserve mass (sum of fractions = {sum})")]
    MassNotConserved { sum: f64 },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn parse(line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            message: message.into(),
        }
    }
}
