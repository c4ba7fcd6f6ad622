//! Backward dynamic programming over stage programs and the forward-backward
//! fixed-point iteration.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::beliefs::{forward_pass_on, BeliefSystem};
use super::bilinear::{StageBeliefs, StageProblem, StartOrigin};
use super::tree::HistoryTree;
use super::verify::{verify_epsilon_on, EpsilonReport};
use crate::error::Result;
use crate::game::MultiStageGame;
use crate::profile::{StrategyProfile, ValueFunction};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverOptions {
    /// Sup-norm tolerance on both strategy and belief changes.
    pub tol: f64,
    pub max_iter: usize,
    /// Random starts per stage program.
    pub restarts: usize,
    pub seed: u64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            tol: 1e-6,
            max_iter: 100,
            restarts: 16,
            seed: 0,
        }
    }
}

/// Outcome of one stage program inside a backward pass.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StageReport {
    pub stage: usize,
    pub state: usize,
    pub gap: f64,
    pub objective: f64,
    pub origin: StartOrigin,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BackwardPass {
    pub profile: StrategyProfile,
    pub values: ValueFunction,
    pub stages: Vec<StageReport>,
    pub worst_gap: f64,
}

fn stage_beliefs(beliefs: &BeliefSystem, k: usize, x: usize) -> StageBeliefs {
    StageBeliefs {
        defender: beliefs.defender_aggregate[k][x].clone(),
        user: beliefs.user_aggregate[k][x].clone(),
        defender_weights: beliefs.defender_type_weights[k][x].clone(),
        user_weights: beliefs.user_type_weights[k][x].clone(),
    }
}

/// Solves every stage program from `K` down to `0` under the given beliefs.
///
/// `warm` supplies incumbent strategies that are kept wherever they remain
/// stage equilibria.
pub fn backward_pass(
    g: &MultiStageGame,
    beliefs: &BeliefSystem,
    options: &SolverOptions,
    warm: Option<&StrategyProfile>,
) -> Result<BackwardPass> {
    let mut profile = StrategyProfile::uniform(g);
    let mut values = ValueFunction::zeros(g);
    let mut reports = Vec::new();

    for k in (0..g.stages().len()).rev() {
        let stage = g.stage(k);
        let next: Option<(&[Vec<f64>], &[Vec<f64>])> = if k < g.horizon() {
            Some((&values.defender[k + 1], &values.user[k + 1]))
        } else {
            None
        };
        let solved = (0..stage.num_states())
            .into_par_iter()
            .map(|x| {
                let problem = StageProblem::new(stage, x, stage_beliefs(beliefs, k, x), next)
                    .map_err(|e| e.at_stage(k, x))?;
                let incumbent = warm.map(|w| (&w.defender[k][x][..], &w.user[k][x][..]));
                let stream = ((k as u64) << 24) | x as u64;
                problem
                    .solve(options.restarts, options.seed, stream, incumbent)
                    .map_err(|e| e.at_stage(k, x))
            })
            .collect::<Vec<_>>();
        for (x, sol) in solved.into_iter().enumerate() {
            let sol = sol?;
            profile.defender[k][x] = sol.defender;
            profile.user[k][x] = sol.user;
            values.defender[k][x] = sol.defender_values;
            values.user[k][x] = sol.user_values;
            reports.push(StageReport {
                stage: k,
                state: x,
                gap: sol.gap,
                objective: sol.objective,
                origin: sol.origin,
            });
        }
    }
    let worst_gap = reports.iter().map(|r| r.gap).fold(0.0, f64::max);
    Ok(BackwardPass {
        profile,
        values,
        stages: reports,
        worst_gap,
    })
}

/// `Ṽᵢᵏ(x, θᵢ)` of a fixed profile under the per-state aggregate beliefs.
pub fn evaluate_values(
    g: &MultiStageGame,
    profile: &StrategyProfile,
    beliefs: &BeliefSystem,
) -> Result<ValueFunction> {
    profile.check(g)?;
    let mut values = ValueFunction::zeros(g);
    for k in (0..g.stages().len()).rev() {
        let stage = g.stage(k);
        for x in 0..stage.num_states() {
            let next: Option<(&[Vec<f64>], &[Vec<f64>])> = if k < g.horizon() {
                Some((&values.defender[k + 1], &values.user[k + 1]))
            } else {
                None
            };
            let problem = StageProblem::new(stage, x, stage_beliefs(beliefs, k, x), next)
                .map_err(|e| e.at_stage(k, x))?;
            let (v1, v2) = problem.values(&profile.defender[k][x], &profile.user[k][x]);
            values.defender[k][x] = v1;
            values.user[k][x] = v2;
        }
    }
    Ok(values)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterationRecord {
    pub iteration: usize,
    /// Change of the profile from the previous iteration; absent on the first.
    pub strategy_residual: Option<f64>,
    pub belief_residual: f64,
    /// Largest stage-program gap in this iteration's backward pass.
    pub worst_stage_gap: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceReport {
    pub converged: bool,
    pub iterations: usize,
    pub tol: f64,
    pub trace: Vec<IterationRecord>,
}

impl ConvergenceReport {
    pub fn final_residuals(&self) -> (Option<f64>, f64) {
        self.trace
            .last()
            .map_or((None, f64::INFINITY), |r| (r.strategy_residual, r.belief_residual))
    }
}

/// A consistent profile-belief pair with its values and ε certificate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PbneSolution {
    pub profile: StrategyProfile,
    pub beliefs: BeliefSystem,
    pub values: ValueFunction,
    pub convergence: ConvergenceReport,
    pub epsilon: EpsilonReport,
}

/// The iteration ran out of budget; the last iterate is kept for inspection.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NonConvergence {
    pub convergence: ConvergenceReport,
    pub profile: StrategyProfile,
    pub beliefs: BeliefSystem,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum PbneOutcome {
    Converged(PbneSolution),
    NotConverged(NonConvergence),
}

impl PbneOutcome {
    pub fn convergence(&self) -> &ConvergenceReport {
        match self {
            PbneOutcome::Converged(s) => &s.convergence,
            PbneOutcome::NotConverged(n) => &n.convergence,
        }
    }

    pub fn solution(&self) -> Option<&PbneSolution> {
        match self {
            PbneOutcome::Converged(s) => Some(s),
            PbneOutcome::NotConverged(_) => None,
        }
    }

    pub fn is_converged(&self) -> bool {
        matches!(self, PbneOutcome::Converged(_))
    }
}

/// Forward-backward iteration from priors carried forward.
///
/// Each iteration solves all stage programs under the current beliefs
/// (warm-started from the previous profile) and recomputes beliefs from the
/// new profile. It stops when both sup-norm changes are within `tol`; the
/// first iteration has no previous profile, so only its belief change counts.
pub fn solve_pbne(g: &MultiStageGame, options: &SolverOptions) -> Result<PbneOutcome> {
    g.ensure_valid()?;
    let tree = HistoryTree::build(g)?;
    let mut beliefs = BeliefSystem::from_priors(g, &tree);
    let mut previous: Option<StrategyProfile> = None;
    let mut trace = Vec::new();

    for iteration in 1..=options.max_iter.max(1) {
        let pass = backward_pass(g, &beliefs, options, previous.as_ref())?;
        let next_beliefs = forward_pass_on(g, &tree, &pass.profile)?;
        let strategy_residual = previous.as_ref().and_then(|p| p.distance(&pass.profile));
        let belief_residual = beliefs.distance(&next_beliefs);
        trace.push(IterationRecord {
            iteration,
            strategy_residual,
            belief_residual,
            worst_stage_gap: pass.worst_gap,
        });
        beliefs = next_beliefs;
        let done = strategy_residual.is_none_or(|r| r <= options.tol) && belief_residual <= options.tol;
        previous = Some(pass.profile);
        if done {
            let profile = previous.expect("set above");
            let values = evaluate_values(g, &profile, &beliefs)?;
            let epsilon = verify_epsilon_on(g, &tree, &profile, &beliefs)?;
            return Ok(PbneOutcome::Converged(PbneSolution {
                profile,
                beliefs,
                values,
                convergence: ConvergenceReport {
                    converged: true,
                    iterations: iteration,
                    tol: options.tol,
                    trace,
                },
                epsilon,
            }));
        }
    }
    Ok(PbneOutcome::NotConverged(NonConvergence {
        convergence: ConvergenceReport {
            converged: false,
            iterations: trace.len(),
            tol: options.tol,
            trace,
        },
        profile: previous.expect("at least one iteration ran"),
        beliefs,
    }))
}
