//! Exact cumulative utilities and ε-certificates by traversal of the history tree.

use serde::{Deserialize, Serialize};

use super::beliefs::{forward_pass_on, BeliefSystem};
use super::tree::HistoryTree;
use crate::error::{GameError, Result};
use crate::game::{MultiStageGame, Player};
use crate::profile::StrategyProfile;

/// Tolerance for on-path Bayes consistency of supplied beliefs.
pub const CONSISTENCY_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BeliefConsistency {
    pub consistent: bool,
    /// Largest deviation from the recomputed Bayes posterior at an on-path node.
    pub max_error: f64,
    /// Number of `(player, node, own type)` entries exceeding the tolerance.
    pub violations: usize,
}

/// Per-type ε of both players.
///
/// `defender[θ₁]` is the gain of the best history-dependent deviation over
/// the profile's cumulative utility from the root. The `*_sequential`
/// fields take the worst such gain over every node the type reaches with
/// positive probability.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpsilonReport {
    pub defender: Vec<f64>,
    pub user: Vec<f64>,
    pub defender_sequential: Vec<f64>,
    pub user_sequential: Vec<f64>,
    pub defender_achieved: Vec<f64>,
    pub user_achieved: Vec<f64>,
    pub defender_best: Vec<f64>,
    pub user_best: Vec<f64>,
    /// Largest root ε over both players and all types.
    pub max: f64,
    pub consistency: BeliefConsistency,
}

impl EpsilonReport {
    pub fn of(&self, player: Player) -> &[f64] {
        match player {
            Player::Defender => &self.defender,
            Player::User => &self.user,
        }
    }
}

/// Achieved and best-response utility-to-go of `player` with type `own` at
/// every node, counting only stage payoffs from `from_stage` on.
fn node_values(
    g: &MultiStageGame,
    tree: &HistoryTree,
    profile: &StrategyProfile,
    beliefs: &BeliefSystem,
    player: Player,
    own: usize,
    from_stage: usize,
) -> (Vec<f64>, Vec<f64>) {
    let opp = player.opponent();
    let mut achieved = vec![0.0; tree.len()];
    let mut best = vec![0.0; tree.len()];
    for h in (0..tree.len()).rev() {
        let node = tree.node(h);
        let (k, x) = (node.stage, node.state);
        let stage = g.stage(k);
        let (n_own, n_opp) = (stage.num_actions(player), stage.num_actions(opp));
        let n2 = stage.num_actions(Player::User);
        let b = &beliefs.node_beliefs(player)[h][own];
        let sigma_opp = &profile.of(opp)[k][x];
        let sigma_own = &profile.of(player)[k][x][own];
        let count = k >= from_stage;

        let mut best_h = f64::NEG_INFINITY;
        let mut achieved_h = 0.0;
        for a_own in 0..n_own {
            let p_own = sigma_own.get(a_own);
            let feasible = stage.is_feasible(player, x, own, a_own);
            if !feasible && p_own == 0.0 {
                continue;
            }
            let (mut v_ach, mut v_best) = (0.0, 0.0);
            for a_opp in 0..n_opp {
                let (a1, a2) = match player {
                    Player::Defender => (a_own, a_opp),
                    Player::User => (a_opp, a_own),
                };
                let mut p_opp = 0.0;
                let mut stage_payoff = 0.0;
                for (t_opp, bt) in b.iter().enumerate() {
                    let q = bt * sigma_opp[t_opp].get(a_opp);
                    if q == 0.0 {
                        continue;
                    }
                    p_opp += q;
                    if count {
                        let (t1, t2) = match player {
                            Player::Defender => (own, t_opp),
                            Player::User => (t_opp, own),
                        };
                        stage_payoff += q * stage.payoff(player, x, a1, a2, t1, t2);
                    }
                }
                let (c_ach, c_best) = match tree.child(h, a1, a2, n2) {
                    Some(c) => (achieved[c], best[c]),
                    None => (0.0, 0.0),
                };
                v_ach += stage_payoff + p_opp * c_ach;
                v_best += stage_payoff + p_opp * c_best;
            }
            achieved_h += p_own * v_ach;
            if feasible {
                best_h = best_h.max(v_best);
            }
        }
        achieved[h] = achieved_h;
        best[h] = best_h;
    }
    (achieved, best)
}

fn check_inputs(g: &MultiStageGame, tree: &HistoryTree, profile: &StrategyProfile, beliefs: &BeliefSystem) -> Result<()> {
    profile.check(g)?;
    beliefs.check(g, tree)
}

/// Expected cumulative payoffs `(U₁(θ₁), U₂(θ₂))` from the root, counting
/// stage payoffs from `from_stage` on, with the opponent's type averaged
/// under the supplied node beliefs.
pub fn cumulative_utility(
    g: &MultiStageGame,
    profile: &StrategyProfile,
    beliefs: &BeliefSystem,
    t1: usize,
    t2: usize,
    from_stage: usize,
) -> Result<(f64, f64)> {
    let tree = HistoryTree::build(g)?;
    check_inputs(g, &tree, profile, beliefs)?;
    if t1 >= g.num_types(Player::Defender) || t2 >= g.num_types(Player::User) {
        return Err(GameError::malformed("type index out of range"));
    }
    let (u1, _) = node_values(g, &tree, profile, beliefs, Player::Defender, t1, from_stage);
    let (u2, _) = node_values(g, &tree, profile, beliefs, Player::User, t2, from_stage);
    Ok((u1[0], u2[0]))
}

/// ε per player and type: best-response value against the opponent's fixed
/// profile (by backward induction over histories, beliefs as supplied)
/// minus the achieved cumulative utility, clipped at zero.
pub fn verify_epsilon(
    g: &MultiStageGame,
    profile: &StrategyProfile,
    beliefs: &BeliefSystem,
) -> Result<EpsilonReport> {
    let tree = HistoryTree::build(g)?;
    verify_epsilon_on(g, &tree, profile, beliefs)
}

pub(crate) fn verify_epsilon_on(
    g: &MultiStageGame,
    tree: &HistoryTree,
    profile: &StrategyProfile,
    beliefs: &BeliefSystem,
) -> Result<EpsilonReport> {
    check_inputs(g, tree, profile, beliefs)?;
    let bayes = forward_pass_on(g, tree, profile)?;
    let (m1, m2) = (g.num_types(Player::Defender), g.num_types(Player::User));
    let pd = g.prior_about(Player::Defender);
    let pu = g.prior_about(Player::User);

    let clip = |e: f64| if e <= 1e-12 { 0.0 } else { e };
    let mut per_player = Vec::new();
    for (player, m) in [(Player::Defender, m1), (Player::User, m2)] {
        let mut eps = Vec::with_capacity(m);
        let mut seq = Vec::with_capacity(m);
        let mut ach = Vec::with_capacity(m);
        let mut br = Vec::with_capacity(m);
        for own in 0..m {
            let (a, b) = node_values(g, tree, profile, beliefs, player, own, 0);
            let reached = |h: usize| -> bool {
                match player {
                    Player::Defender => (0..m2).any(|t2| pu.get(t2) * bayes.reach[h][own * m2 + t2] > 0.0),
                    Player::User => (0..m1).any(|t1| pd.get(t1) * bayes.reach[h][t1 * m2 + own] > 0.0),
                }
            };
            let worst = (0..tree.len())
                .filter(|&h| reached(h))
                .map(|h| b[h] - a[h])
                .fold(0.0, f64::max);
            eps.push(clip(b[0] - a[0]));
            seq.push(clip(worst));
            ach.push(a[0]);
            br.push(b[0]);
        }
        per_player.push((eps, seq, ach, br));
    }

    let mut max_error: f64 = 0.0;
    let mut violations = 0;
    for player in Player::BOTH {
        let supplied = beliefs.node_beliefs(player);
        let recomputed = bayes.node_beliefs(player);
        for h in 0..tree.len() {
            if bayes.off_path(player)[h] {
                continue;
            }
            for (s, r) in supplied[h].iter().zip(&recomputed[h]) {
                let e = s.sup_distance(r);
                max_error = max_error.max(e);
                if e > CONSISTENCY_TOL {
                    violations += 1;
                }
            }
        }
    }

    let (user, defender) = (per_player.pop().unwrap(), per_player.pop().unwrap());
    let max = defender.0.iter().chain(&user.0).cloned().fold(0.0, f64::max);
    Ok(EpsilonReport {
        defender: defender.0,
        user: user.0,
        defender_sequential: defender.1,
        user_sequential: user.1,
        defender_achieved: defender.2,
        user_achieved: user.2,
        defender_best: defender.3,
        user_best: user.3,
        max,
        consistency: BeliefConsistency {
            consistent: violations == 0,
            max_error,
            violations,
        },
    })
}
