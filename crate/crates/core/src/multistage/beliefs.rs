//! Bayesian belief updates along the history tree and their per-state aggregation.

use serde::{Deserialize, Serialize};

use super::tree::HistoryTree;
use crate::distribution::FiniteDistribution;
use crate::error::{GameError, Result};
use crate::game::{MultiStageGame, Player};
use crate::profile::StrategyProfile;

/// Bayes' rule for one observed action of the opponent.
///
/// Returns the posterior and `false`, or the unchanged prior and `true`
/// when the observation has zero probability under the prior.
pub fn belief_update(
    prior: &FiniteDistribution,
    opponent_strategy: &[FiniteDistribution],
    observed: usize,
) -> (FiniteDistribution, bool) {
    let joint: Vec<f64> = prior
        .iter()
        .zip(opponent_strategy)
        .map(|(b, s)| b * s.get(observed))
        .collect();
    let total: f64 = joint.iter().sum();
    if total <= 0.0 {
        return (prior.clone(), true);
    }
    match FiniteDistribution::new(joint.iter().map(|j| j / total).collect()) {
        Ok(d) => (d, false),
        Err(_) => (prior.clone(), true),
    }
}

/// Beliefs of both players at every history node, plus the per-state
/// aggregates consumed by the stage programs.
///
/// Node beliefs are indexed `[node][own type]`; aggregates `[stage][state][own type]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BeliefSystem {
    /// Defender's belief over the user's types.
    pub defender: Vec<Vec<FiniteDistribution>>,
    /// User's belief over the defender's types.
    pub user: Vec<Vec<FiniteDistribution>>,
    /// Per node, whether Bayes' rule was undefined somewhere on the path to it.
    pub defender_off_path: Vec<bool>,
    pub user_off_path: Vec<bool>,
    /// `reach[node][t1 * m2 + t2]`: probability of the history given both types.
    pub reach: Vec<Vec<f64>>,
    pub defender_aggregate: Vec<Vec<Vec<FiniteDistribution>>>,
    pub user_aggregate: Vec<Vec<Vec<FiniteDistribution>>>,
    /// Posterior over the defender's types given that the state is reached,
    /// as seen by an outside observer who knows neither type.
    pub defender_type_weights: Vec<Vec<FiniteDistribution>>,
    pub user_type_weights: Vec<Vec<FiniteDistribution>>,
    /// Largest sup-distance between a reachable node belief and its state aggregate.
    pub disagreement: f64,
}

impl BeliefSystem {
    /// Priors at every node and every state, with only the root reached.
    pub fn from_priors(g: &MultiStageGame, tree: &HistoryTree) -> Self {
        let (m1, m2) = (g.num_types(Player::Defender), g.num_types(Player::User));
        let about_user = g.prior_about(Player::User);
        let about_defender = g.prior_about(Player::Defender);
        let per_state = |d: &FiniteDistribution, own: usize| -> Vec<Vec<Vec<FiniteDistribution>>> {
            g.stages()
                .iter()
                .map(|s| vec![vec![d.clone(); own]; s.num_states()])
                .collect()
        };
        let weights = |d: &FiniteDistribution| -> Vec<Vec<FiniteDistribution>> {
            g.stages().iter().map(|s| vec![d.clone(); s.num_states()]).collect()
        };
        let mut reach = vec![vec![0.0; m1 * m2]; tree.len()];
        reach[0] = vec![1.0; m1 * m2];
        BeliefSystem {
            defender: vec![vec![about_user.clone(); m1]; tree.len()],
            user: vec![vec![about_defender.clone(); m2]; tree.len()],
            defender_off_path: vec![false; tree.len()],
            user_off_path: vec![false; tree.len()],
            reach,
            defender_aggregate: per_state(&about_user, m1),
            user_aggregate: per_state(&about_defender, m2),
            defender_type_weights: weights(&about_defender),
            user_type_weights: weights(&about_user),
            disagreement: 0.0,
        }
    }

    pub fn node_beliefs(&self, player: Player) -> &Vec<Vec<FiniteDistribution>> {
        match player {
            Player::Defender => &self.defender,
            Player::User => &self.user,
        }
    }

    pub fn off_path(&self, player: Player) -> &[bool] {
        match player {
            Player::Defender => &self.defender_off_path,
            Player::User => &self.user_off_path,
        }
    }

    pub fn aggregate(&self, player: Player) -> &Vec<Vec<Vec<FiniteDistribution>>> {
        match player {
            Player::Defender => &self.defender_aggregate,
            Player::User => &self.user_aggregate,
        }
    }

    /// Weights over `subject`'s types at `(k, x)`.
    pub fn type_weights(&self, subject: Player, k: usize, x: usize) -> &FiniteDistribution {
        match subject {
            Player::Defender => &self.defender_type_weights[k][x],
            Player::User => &self.user_type_weights[k][x],
        }
    }

    /// Checks that the shapes match `g` and `tree`.
    pub fn check(&self, g: &MultiStageGame, tree: &HistoryTree) -> Result<()> {
        let (m1, m2) = (g.num_types(Player::Defender), g.num_types(Player::User));
        let nodes_ok = |b: &Vec<Vec<FiniteDistribution>>, own: usize, other: usize| {
            b.len() == tree.len() && b.iter().all(|v| v.len() == own && v.iter().all(|d| d.len() == other))
        };
        let agg_ok = |b: &Vec<Vec<Vec<FiniteDistribution>>>, own: usize, other: usize| {
            b.len() == g.stages().len()
                && b.iter().zip(g.stages()).all(|(bk, s)| {
                    bk.len() == s.num_states()
                        && bk.iter().all(|v| v.len() == own && v.iter().all(|d| d.len() == other))
                })
        };
        let w_ok = |w: &Vec<Vec<FiniteDistribution>>, n: usize| {
            w.len() == g.stages().len()
                && w.iter()
                    .zip(g.stages())
                    .all(|(wk, s)| wk.len() == s.num_states() && wk.iter().all(|d| d.len() == n))
        };
        let ok = nodes_ok(&self.defender, m1, m2)
            && nodes_ok(&self.user, m2, m1)
            && self.defender_off_path.len() == tree.len()
            && self.user_off_path.len() == tree.len()
            && self.reach.len() == tree.len()
            && self.reach.iter().all(|r| r.len() == m1 * m2)
            && agg_ok(&self.defender_aggregate, m1, m2)
            && agg_ok(&self.user_aggregate, m2, m1)
            && w_ok(&self.defender_type_weights, m1)
            && w_ok(&self.user_type_weights, m2);
        if ok {
            Ok(())
        } else {
            Err(GameError::malformed("belief system dimensions do not match the game"))
        }
    }

    /// Sup-norm change over node beliefs, aggregates and type weights.
    pub fn distance(&self, other: &BeliefSystem) -> f64 {
        let mut worst: f64 = 0.0;
        for (a, b) in [(&self.defender, &other.defender), (&self.user, &other.user)] {
            for (na, nb) in a.iter().zip(b) {
                for (da, db) in na.iter().zip(nb) {
                    worst = worst.max(da.sup_distance(db));
                }
            }
        }
        for (a, b) in [
            (&self.defender_aggregate, &other.defender_aggregate),
            (&self.user_aggregate, &other.user_aggregate),
        ] {
            for (ka, kb) in a.iter().zip(b) {
                for (xa, xb) in ka.iter().zip(kb) {
                    for (da, db) in xa.iter().zip(xb) {
                        worst = worst.max(da.sup_distance(db));
                    }
                }
            }
        }
        for (a, b) in [
            (&self.defender_type_weights, &other.defender_type_weights),
            (&self.user_type_weights, &other.user_type_weights),
        ] {
            for (ka, kb) in a.iter().zip(b) {
                for (da, db) in ka.iter().zip(kb) {
                    worst = worst.max(da.sup_distance(db));
                }
            }
        }
        worst
    }
}

/// Beliefs induced by `profile`: Bayes updates at every node from the priors,
/// reach probabilities per type pair, and reach-weighted per-state aggregates.
pub fn forward_pass(g: &MultiStageGame, profile: &StrategyProfile) -> Result<BeliefSystem> {
    let tree = HistoryTree::build(g)?;
    forward_pass_on(g, &tree, profile)
}

pub fn forward_pass_on(
    g: &MultiStageGame,
    tree: &HistoryTree,
    profile: &StrategyProfile,
) -> Result<BeliefSystem> {
    profile.check(g)?;
    let (m1, m2) = (g.num_types(Player::Defender), g.num_types(Player::User));
    let mut b = BeliefSystem::from_priors(g, tree);

    for k in 0..g.horizon() {
        let stage = g.stage(k);
        let (n1, n2) = (stage.num_actions(Player::Defender), stage.num_actions(Player::User));
        for h in tree.stage_nodes(k) {
            let x = tree.node(h).state;
            let (sd, su) = profile.at(k, x);
            for a1 in 0..n1 {
                for a2 in 0..n2 {
                    let c = tree.child(h, a1, a2, n2).expect("non-final nodes have children");
                    let (bd, off_d) = belief_update(&b.defender[h][0], su, a2);
                    let (bu, off_u) = belief_update(&b.user[h][0], sd, a1);
                    b.defender[c] = vec![bd; m1];
                    b.user[c] = vec![bu; m2];
                    b.defender_off_path[c] = b.defender_off_path[h] || off_d;
                    b.user_off_path[c] = b.user_off_path[h] || off_u;
                    for t1 in 0..m1 {
                        for t2 in 0..m2 {
                            b.reach[c][t1 * m2 + t2] =
                                b.reach[h][t1 * m2 + t2] * sd[t1].get(a1) * su[t2].get(a2);
                        }
                    }
                }
            }
        }
    }
    aggregate(g, tree, &mut b);
    Ok(b)
}

/// Fills the per-state aggregates, type weights and disagreement of `b`
/// from its node beliefs and reach probabilities.
pub(crate) fn aggregate(g: &MultiStageGame, tree: &HistoryTree, b: &mut BeliefSystem) {
    let (m1, m2) = (g.num_types(Player::Defender), g.num_types(Player::User));
    let pd = g.prior_about(Player::Defender);
    let pu = g.prior_about(Player::User);
    let mut disagreement: f64 = 0.0;

    for k in 0..g.stages().len() {
        let num_states = g.stage(k).num_states();
        let mut by_state: Vec<Vec<usize>> = vec![Vec::new(); num_states];
        for h in tree.stage_nodes(k) {
            by_state[tree.node(h).state].push(h);
        }
        for (x, nodes) in by_state.iter().enumerate() {
            for own in 0..m1 {
                let weight = |h: usize| (0..m2).map(|t2| pu.get(t2) * b.reach[h][own * m2 + t2]).sum();
                let agg = weighted_average(nodes, weight, |h| &b.defender[h][own], &pu, |h| {
                    (0..m1).map(|t1| pd.get(t1) * (0..m2).map(|t2| pu.get(t2) * b.reach[h][t1 * m2 + t2]).sum::<f64>()).sum()
                });
                for &h in nodes {
                    if weight(h) > 0.0 {
                        disagreement = disagreement.max(b.defender[h][own].sup_distance(&agg));
                    }
                }
                b.defender_aggregate[k][x][own] = agg;
            }
            for own in 0..m2 {
                let weight = |h: usize| (0..m1).map(|t1| pd.get(t1) * b.reach[h][t1 * m2 + own]).sum();
                let agg = weighted_average(nodes, weight, |h| &b.user[h][own], &pd, |h| {
                    (0..m1).map(|t1| pd.get(t1) * (0..m2).map(|t2| pu.get(t2) * b.reach[h][t1 * m2 + t2]).sum::<f64>()).sum()
                });
                for &h in nodes {
                    if weight(h) > 0.0 {
                        disagreement = disagreement.max(b.user[h][own].sup_distance(&agg));
                    }
                }
                b.user_aggregate[k][x][own] = agg;
            }

            let mut joint = vec![0.0; m1 * m2];
            for &h in nodes {
                for t1 in 0..m1 {
                    for t2 in 0..m2 {
                        joint[t1 * m2 + t2] += pd.get(t1) * pu.get(t2) * b.reach[h][t1 * m2 + t2];
                    }
                }
            }
            let over1: Vec<f64> = (0..m1).map(|t1| (0..m2).map(|t2| joint[t1 * m2 + t2]).sum()).collect();
            let over2: Vec<f64> = (0..m2).map(|t2| (0..m1).map(|t1| joint[t1 * m2 + t2]).sum()).collect();
            b.defender_type_weights[k][x] = FiniteDistribution::from_unnormalized(over1)
                .unwrap_or_else(|_| mix(&b.user_aggregate[k][x], &pu));
            b.user_type_weights[k][x] = FiniteDistribution::from_unnormalized(over2)
                .unwrap_or_else(|_| mix(&b.defender_aggregate[k][x], &pd));
        }
    }
    b.disagreement = disagreement;
}

/// Reach-weighted average of node beliefs. Falls back to type-blind reach
/// weights, then to a plain average, then to `prior` when nothing reaches.
fn weighted_average<'a>(
    nodes: &[usize],
    weight: impl Fn(usize) -> f64,
    belief: impl Fn(usize) -> &'a FiniteDistribution,
    prior: &FiniteDistribution,
    blind_weight: impl Fn(usize) -> f64,
) -> FiniteDistribution {
    if nodes.is_empty() {
        return prior.clone();
    }
    for w in [&weight as &dyn Fn(usize) -> f64, &blind_weight, &|_| 1.0] {
        let total: f64 = nodes.iter().map(|&h| w(h)).sum();
        if total > 0.0 {
            let n = prior.len();
            let mut acc = vec![0.0; n];
            for &h in nodes {
                let wh = w(h) / total;
                if wh == 0.0 {
                    continue;
                }
                for (i, v) in belief(h).iter().enumerate() {
                    acc[i] += wh * v;
                }
            }
            if let Ok(d) = FiniteDistribution::cleaned(&acc, 1e-9) {
                return d;
            }
        }
    }
    prior.clone()
}

fn mix(beliefs: &[FiniteDistribution], weights: &FiniteDistribution) -> FiniteDistribution {
    let n = beliefs[0].len();
    let acc: Vec<f64> = (0..n)
        .map(|i| beliefs.iter().zip(weights.iter()).map(|(b, w)| w * b.get(i)).sum())
        .collect();
    FiniteDistribution::cleaned(&acc, 1e-9).unwrap_or_else(|_| FiniteDistribution::uniform(n))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::{StageGame, TypeSpace};

    fn d(w: &[f64]) -> FiniteDistribution {
        FiniteDistribution::new(w.to_vec()).unwrap()
    }

    #[test]
    fn bayes_arithmetic() {
        let (post, off) = belief_update(&d(&[0.5, 0.5]), &[d(&[1.0, 0.0]), d(&[0.5, 0.5])], 0);
        assert!(!off);
        assert!((post.get(0) - 2.0 / 3.0).abs() < 1e-15);
        assert!((post.get(1) - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn type_independent_strategy_keeps_prior() {
        let s = d(&[0.3, 0.7]);
        let (post, off) = belief_update(&d(&[0.2, 0.8]), &[s.clone(), s], 1);
        assert!(!off);
        assert!(post.sup_distance(&d(&[0.2, 0.8])) < 1e-15);
    }

    #[test]
    fn degenerate_prior_absorbs() {
        let (post, off) = belief_update(&d(&[1.0, 0.0]), &[d(&[0.4, 0.6]), d(&[1.0, 0.0])], 1);
        assert!(!off);
        assert_eq!(post.weights(), &[1.0, 0.0]);
    }

    #[test]
    fn zero_probability_observation_is_off_path() {
        let prior = d(&[0.5, 0.5]);
        let (post, off) = belief_update(&prior, &[d(&[1.0, 0.0]), d(&[1.0, 0.0])], 1);
        assert!(off);
        assert_eq!(post, prior);
    }

    fn two_stage() -> MultiStageGame {
        let s0 = StageGame::new(["s"], ["A"], ["a", "b"], 1, 2).with_transition(|_, _, a2| a2);
        let s1 = StageGame::new(["x", "y"], ["A"], ["a"], 1, 2);
        MultiStageGame::new(
            TypeSpace::singleton(),
            TypeSpace::new(["bad", "good"]).unwrap(),
            vec![1.0],
            vec![0.5, 0.5],
            vec![s0, s1],
            0,
        )
        .unwrap()
    }

    #[test]
    fn forward_pass_posterior_after_observation() {
        let g = two_stage();
        let mut p = StrategyProfile::uniform(&g);
        p.user[0][0] = vec![d(&[1.0, 0.0]), d(&[0.5, 0.5])];
        let b = forward_pass(&g, &p).unwrap();
        // Node 1 is (A, a).
        assert!((b.defender[1][0].get(0) - 2.0 / 3.0).abs() < 1e-15);
        assert!((b.defender_aggregate[1][0][0].get(0) - 2.0 / 3.0).abs() < 1e-15);
        assert_eq!(b.defender[2][0].weights(), &[0.0, 1.0]);
        assert!(!b.defender_off_path[2]);
        assert_eq!(b.reach[1], vec![1.0, 0.5]);
    }

    #[test]
    fn separating_strategy_gives_degenerate_beliefs() {
        let g = two_stage();
        let mut p = StrategyProfile::uniform(&g);
        p.user[0][0] = vec![d(&[1.0, 0.0]), d(&[0.0, 1.0])];
        let b = forward_pass(&g, &p).unwrap();
        assert_eq!(b.defender[1][0].weights(), &[1.0, 0.0]);
        assert_eq!(b.defender[2][0].weights(), &[0.0, 1.0]);
        assert_eq!(b.defender_type_weights[0][0].weights(), &[1.0]);
        assert_eq!(b.user_type_weights[1][1].weights(), &[0.0, 1.0]);
    }

    #[test]
    fn type_independent_profile_keeps_priors_everywhere() {
        let g = two_stage();
        let b = forward_pass(&g, &StrategyProfile::uniform(&g)).unwrap();
        let prior = d(&[0.5, 0.5]);
        assert!(b.defender.iter().all(|n| n[0] == prior));
        assert_eq!(b.disagreement, 0.0);
    }
}
