use thiserror::Error;

/// Errors raised by game construction and the solvers.
///
/// Non-convergence of the forward-backward iteration is *not* an error; it is
/// reported as data by [`crate::multistage::solve_pbne`].
#[derive(Debug, Error, Clone, PartialEq)]
pub enum GameError {
    #[error("malformed input: {0}")]
    Malformed(String),

    #[error("invalid game: {}", .0.join("; "))]
    Invalid(Vec<String>),

    #[error("problem too large: {0}")]
    TooLarge(String),

    #[error("linear program failed: {0}")]
    Lp(String),

    #[error("stage {stage}, state {state}: {source}")]
    AtStage {
        stage: usize,
        state: usize,
        #[source]
        source: Box<GameError>,
    },
}

impl GameError {
    pub(crate) fn malformed(msg: impl Into<String>) -> Self {
        GameError::Malformed(msg.into())
    }

    pub(crate) fn at_stage(self, stage: usize, state: usize) -> Self {
        GameError::AtStage {
            stage,
            state,
            source: Box::new(self),
        }
    }
}

pub type Result<T, E = GameError> = std::result::Result<T, E>;
