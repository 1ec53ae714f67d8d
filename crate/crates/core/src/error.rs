use thiserror::Error;

/// Errors raised by the numerical routines.
///
/// The variants are split so that callers (the CLI in particular) can tell
/// invalid input apart from a numerical obstruction such as a closed gap.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid field: {0}")]
    InvalidField(String),
    #[error("gauge mismatch: {0}")]
    GaugeMismatch(String),
    #[error("invalid domain: {0}")]
    Domain(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("commensurability violation: {0}")]
    Commensurability(String),
    #[error("not in the Iwatsuka-type algebra at this window size: {0}")]
    NotStabilizing(String),
    #[error("not a bulk gap: {0}")]
    NotABulkGap(String),
    #[error("rank jump: {0}")]
    RankJump(String),
    #[error("not converged: {0}")]
    NotConverged(String),
}

impl Error {
    /// True for failures of the computation itself (closed gaps, rank jumps,
    /// unconverged pairings) rather than of its inputs.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::NotStabilizing(_) | Error::NotABulkGap(_) | Error::RankJump(_) | Error::NotConverged(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
