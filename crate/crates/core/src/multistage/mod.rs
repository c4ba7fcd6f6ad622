//! Multistage games with two-sided private types: forward belief updates,
//! backward stage programs, their fixed-point iteration and ε-verification.

pub mod beliefs;
pub mod bilinear;
pub mod solve;
pub mod tree;
pub mod verify;

pub use beliefs::{belief_update, forward_pass, BeliefSystem};
pub use bilinear::{
    stage_bilinear_solve, BilinearStageSolution, StageBeliefs, StageProblem, StartOrigin,
    STAGE_GAP_TOL,
};
pub use solve::{
    backward_pass, evaluate_values, solve_pbne, BackwardPass, ConvergenceReport,
    IterationRecord, NonConvergence, PbneOutcome, PbneSolution, SolverOptions, StageReport,
};
pub use tree::{HistoryNode, HistoryTree};
pub use verify::{cumulative_utility, verify_epsilon, BeliefConsistency, EpsilonReport};
