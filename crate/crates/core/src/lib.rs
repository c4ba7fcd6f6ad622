pub mod distribution;
pub mod error;
pub mod game;
pub mod lp;
pub mod multistage;
pub mod profile;
pub mod scenarios;
pub mod schema;
pub mod signaling;
pub mod simulate;
pub mod static_solver;

pub use distribution::FiniteDistribution;
pub use error::{GameError, Result};
pub use game::{
    expected_stage_payoff, validate_game, MultiStageGame, OwnType, PayoffTensor, Player,
    StageGame, TypeSpace, Violation, ViolationKind,
};
pub use profile::{StrategyProfile, ValueFunction};
pub use lp::{solve_lp, LinearProgram, LpSolution, LpStatus};
pub use static_solver::{
    best_response_set, mixed_ne, pure_ne, solve_bne, BimatrixGame, EquilibriumResult, Information,
    StaticBayesianGame,
};
