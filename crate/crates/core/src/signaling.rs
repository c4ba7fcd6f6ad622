//! Sender-receiver games: the user (sender) observes its type and sends a
//! message, the defender (receiver) observes the message and acts.

use serde::{Deserialize, Serialize};

use crate::distribution::FiniteDistribution;
use crate::error::{GameError, Result};
use crate::game::{Player, TypeSpace};
use crate::lp::{solve_lp, LinearProgram, LpStatus};
use crate::static_solver::agent_form::{cartesian, subsets};
use crate::static_solver::{argmax_set, StaticBayesianGame, BR_TOL};

/// Sender strategies enumerated by [`solve_pure_pbne`] at most.
pub const PURE_BUDGET: u128 = 10_000;
/// Support profiles examined by [`solve_mixed_pbne`] at most.
pub const MIXED_BUDGET: u128 = 1_000_000;
pub const DEFAULT_GRID: usize = 11;
pub const PBNE_GAP_TOL: f64 = 1e-8;

const SUPPORT_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SignalingGame {
    types: TypeSpace,
    prior: FiniteDistribution,
    actions: Vec<String>,
    messages: Vec<String>,
    /// `[(a1 * messages + a2) * types + t]`
    payoffs: [Vec<f64>; 2],
    /// `[t * messages + a2]`
    allowed: Vec<bool>,
}

impl SignalingGame {
    /// `f(a1, a2, t) -> (J1, J2)` with `a1` the receiver's action and `a2`
    /// the message.
    pub fn new<S: Into<String>>(
        types: TypeSpace,
        prior: Vec<f64>,
        actions: impl IntoIterator<Item = S>,
        messages: impl IntoIterator<Item = S>,
        f: impl Fn(usize, usize, usize) -> (f64, f64),
    ) -> Result<Self> {
        let actions: Vec<String> = actions.into_iter().map(Into::into).collect();
        let messages: Vec<String> = messages.into_iter().map(Into::into).collect();
        if actions.is_empty() || messages.is_empty() {
            return Err(GameError::malformed("empty action or message set"));
        }
        if prior.len() != types.len() {
            return Err(GameError::malformed("prior length does not match the type space"));
        }
        let prior = FiniteDistribution::new(prior)?;
        let (n1, n2, m) = (actions.len(), messages.len(), types.len());
        let mut payoffs = [vec![0.0; n1 * n2 * m], vec![0.0; n1 * n2 * m]];
        for a1 in 0..n1 {
            for a2 in 0..n2 {
                for t in 0..m {
                    let (j1, j2) = f(a1, a2, t);
                    if !j1.is_finite() || !j2.is_finite() {
                        return Err(GameError::malformed("non-finite payoff"));
                    }
                    payoffs[0][(a1 * n2 + a2) * m + t] = j1;
                    payoffs[1][(a1 * n2 + a2) * m + t] = j2;
                }
            }
        }
        Ok(SignalingGame {
            types,
            prior,
            actions,
            messages,
            payoffs,
            allowed: vec![true; m * n2],
        })
    }

    /// The static game played sequentially: the user moves first and the
    /// defender sees the move. The defender must have a single type.
    pub fn from_static(g: &StaticBayesianGame) -> Result<Self> {
        if g.types(Player::Defender).len() != 1 {
            return Err(GameError::malformed("the receiver must have a single type"));
        }
        let stage = g.stage();
        let mut s = SignalingGame::new(
            g.types(Player::User).clone(),
            g.prior_about(Player::User).weights().to_vec(),
            stage.actions(Player::Defender).to_vec(),
            stage.actions(Player::User).to_vec(),
            |a1, a2, t| (g.payoff(Player::Defender, a1, a2, 0, t), g.payoff(Player::User, a1, a2, 0, t)),
        )?;
        for t in 0..s.num_types() {
            for a2 in 0..s.num_messages() {
                if !stage.is_feasible(Player::User, g.state(), t, a2) {
                    s = s.forbid(t, a2);
                }
            }
        }
        Ok(s)
    }

    /// Forbids message `a2` for type `t`.
    pub fn forbid(mut self, t: usize, a2: usize) -> Self {
        let n2 = self.messages.len();
        self.allowed[t * n2 + a2] = false;
        self
    }

    pub fn types(&self) -> &TypeSpace {
        &self.types
    }

    pub fn prior(&self) -> &FiniteDistribution {
        &self.prior
    }

    pub fn actions(&self) -> &[String] {
        &self.actions
    }

    pub fn messages(&self) -> &[String] {
        &self.messages
    }

    pub fn num_types(&self) -> usize {
        self.types.len()
    }

    pub fn num_actions(&self) -> usize {
        self.actions.len()
    }

    pub fn num_messages(&self) -> usize {
        self.messages.len()
    }

    #[inline]
    pub fn payoff(&self, player: Player, a1: usize, a2: usize, t: usize) -> f64 {
        self.payoffs[player.index()][(a1 * self.messages.len() + a2) * self.types.len() + t]
    }

    pub fn is_allowed(&self, t: usize, a2: usize) -> bool {
        self.allowed[t * self.messages.len() + a2]
    }

    pub fn allowed_messages(&self, t: usize) -> Vec<usize> {
        (0..self.num_messages()).filter(|&m| self.is_allowed(t, m)).collect()
    }

    /// Receiver's expected payoff of each action after `message` under `belief`.
    pub fn receiver_values(&self, belief: &FiniteDistribution, message: usize) -> Vec<f64> {
        (0..self.num_actions())
            .map(|a1| {
                belief
                    .iter()
                    .enumerate()
                    .map(|(t, b)| b * self.payoff(Player::Defender, a1, message, t))
                    .sum()
            })
            .collect()
    }

    /// Sender type `t`'s expected payoff of each message against `receiver`.
    pub fn sender_values(&self, t: usize, receiver: &[FiniteDistribution]) -> Vec<f64> {
        (0..self.num_messages())
            .map(|m| receiver[m].iter().enumerate().map(|(a1, p)| p * self.payoff(Player::User, a1, m, t)).sum())
            .collect()
    }

    fn ensure_valid(&self) -> Result<()> {
        for t in 0..self.num_types() {
            if self.allowed_messages(t).is_empty() {
                return Err(GameError::Invalid(vec![format!("type {t} has no allowed message")]));
            }
        }
        Ok(())
    }
}

/// Bayes posterior over types after `message`; `None` when the message has
/// probability zero under `sender`.
pub fn posterior_from_sender(
    prior: &FiniteDistribution,
    sender: &[FiniteDistribution],
    message: usize,
) -> Option<FiniteDistribution> {
    let joint: Vec<f64> = prior.iter().zip(sender).map(|(b, s)| b * s.get(message)).collect();
    let total: f64 = joint.iter().sum();
    if total > 0.0 {
        FiniteDistribution::from_unnormalized(joint).ok()
    } else {
        None
    }
}

/// Receiver actions maximizing expected payoff after `message`, ties included.
pub fn receiver_best_response(g: &SignalingGame, belief: &FiniteDistribution, message: usize) -> Vec<usize> {
    argmax_set(&g.receiver_values(belief, message), BR_TOL)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SenderClass {
    Pooling,
    Separating,
    SemiSeparating,
}

impl std::fmt::Display for SenderClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            SenderClass::Pooling => "pooling",
            SenderClass::Separating => "separating",
            SenderClass::SemiSeparating => "semi-separating",
        })
    }
}

/// Pooling if every type uses the same distribution, separating if the
/// supports are pairwise disjoint, semi-separating otherwise.
pub fn classify(sender: &[FiniteDistribution]) -> SenderClass {
    if sender.windows(2).all(|w| w[0].sup_distance(&w[1]) <= 1e-9) {
        return SenderClass::Pooling;
    }
    let supports: Vec<Vec<usize>> = sender.iter().map(|s| s.support(1e-12)).collect();
    let disjoint = supports
        .iter()
        .enumerate()
        .all(|(i, a)| supports[i + 1..].iter().all(|b| a.iter().all(|m| !b.contains(m))));
    if disjoint {
        SenderClass::Separating
    } else {
        SenderClass::SemiSeparating
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SignalingPbne {
    /// Per type, over messages.
    pub sender: Vec<FiniteDistribution>,
    /// Per message, over receiver actions.
    pub receiver: Vec<FiniteDistribution>,
    /// Per message, over types.
    pub beliefs: Vec<FiniteDistribution>,
    pub on_path: Vec<bool>,
    pub class: SenderClass,
    pub gap: f64,
    /// Receiver's best-response set at each message under the stored belief.
    pub receiver_ties: Vec<Vec<usize>>,
    /// Grid beliefs supporting the receiver's action at each off-path message.
    pub supporting_beliefs: Vec<Vec<FiniteDistribution>>,
}

/// Independent re-check of a candidate equilibrium.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SignalingCheck {
    /// Largest receiver gain at any message, on or off path.
    pub receiver_gap: f64,
    /// Largest sender gain over types with positive prior.
    pub sender_gap: f64,
    /// Largest distance between a stored on-path belief and Bayes' rule.
    pub consistency_error: f64,
}

impl SignalingCheck {
    pub fn gap(&self) -> f64 {
        self.receiver_gap.max(self.sender_gap)
    }

    pub fn passes(&self, tol: f64) -> bool {
        self.gap() <= tol && self.consistency_error <= 1e-9
    }
}

pub fn verify_pbne(
    g: &SignalingGame,
    sender: &[FiniteDistribution],
    receiver: &[FiniteDistribution],
    beliefs: &[FiniteDistribution],
) -> Result<SignalingCheck> {
    let (m, n1, n2) = (g.num_types(), g.num_actions(), g.num_messages());
    if sender.len() != m || receiver.len() != n2 || beliefs.len() != n2 {
        return Err(GameError::malformed("strategy dimensions do not match the game"));
    }
    if sender.iter().any(|s| s.len() != n2) || receiver.iter().any(|r| r.len() != n1) || beliefs.iter().any(|b| b.len() != m) {
        return Err(GameError::malformed("strategy dimensions do not match the game"));
    }
    for (t, s) in sender.iter().enumerate() {
        if s.support(0.0).iter().any(|&a2| !g.is_allowed(t, a2)) {
            return Err(GameError::Invalid(vec![format!("type {t} sends a forbidden message")]));
        }
    }
    let mut check = SignalingCheck {
        receiver_gap: 0.0,
        sender_gap: 0.0,
        consistency_error: 0.0,
    };
    for a2 in 0..n2 {
        let values = g.receiver_values(&beliefs[a2], a2);
        let best = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        check.receiver_gap = check.receiver_gap.max(best - receiver[a2].expectation(&values));
        if let Some(post) = posterior_from_sender(g.prior(), sender, a2) {
            check.consistency_error = check.consistency_error.max(post.sup_distance(&beliefs[a2]));
        }
    }
    for t in 0..m {
        if g.prior().get(t) <= 0.0 {
            continue;
        }
        let values = g.sender_values(t, receiver);
        let best = g.allowed_messages(t).iter().map(|&a2| values[a2]).fold(f64::NEG_INFINITY, f64::max);
        check.sender_gap = check.sender_gap.max(best - sender[t].expectation(&values));
    }
    Ok(check)
}

/// Points of the belief simplex over `n` types with `resolution` points per
/// edge, in lexicographic order of the integer coordinates.
pub fn simplex_grid(n: usize, resolution: usize) -> Vec<FiniteDistribution> {
    let steps = resolution.max(2) - 1;
    let mut out = Vec::new();
    let mut point = vec![0usize; n];
    fn rec(i: usize, left: usize, steps: usize, point: &mut Vec<usize>, out: &mut Vec<FiniteDistribution>) {
        if i + 1 == point.len() {
            point[i] = left;
            let w = point.iter().map(|&c| c as f64 / steps as f64).collect();
            out.push(FiniteDistribution::new(w).expect("grid point"));
            return;
        }
        for c in (0..=left).rev() {
            point[i] = c;
            rec(i + 1, left - c, steps, point, out);
        }
    }
    if n > 0 {
        rec(0, steps, steps, &mut point, &mut out);
    }
    out
}

fn finish(
    g: &SignalingGame,
    sender: Vec<FiniteDistribution>,
    receiver: Vec<FiniteDistribution>,
    beliefs: Vec<FiniteDistribution>,
    supporting_beliefs: Vec<Vec<FiniteDistribution>>,
) -> Result<Option<SignalingPbne>> {
    let check = verify_pbne(g, &sender, &receiver, &beliefs)?;
    if !check.passes(PBNE_GAP_TOL) {
        return Ok(None);
    }
    let on_path = (0..g.num_messages())
        .map(|a2| posterior_from_sender(g.prior(), &sender, a2).is_some())
        .collect();
    let receiver_ties = (0..g.num_messages())
        .map(|a2| receiver_best_response(g, &beliefs[a2], a2))
        .collect();
    Ok(Some(SignalingPbne {
        class: classify(&sender),
        sender,
        receiver,
        beliefs,
        on_path,
        gap: check.gap(),
        receiver_ties,
        supporting_beliefs,
    }))
}

/// All pure-strategy PBNE whose off-path beliefs lie on the grid or equal
/// the prior.
///
/// Every pure sender strategy is tried. On-path beliefs follow Bayes' rule;
/// at an off-path message the receiver may play any action that is a best
/// response to some grid belief, and the stored belief is the prior when the
/// prior supports that action, otherwise the first supporting grid point.
/// Receiver ties are enumerated, so one sender strategy can yield several
/// equilibria.
pub fn solve_pure_pbne(g: &SignalingGame, off_path_grid: usize) -> Result<Vec<SignalingPbne>> {
    g.ensure_valid()?;
    let allowed: Vec<Vec<usize>> = (0..g.num_types()).map(|t| g.allowed_messages(t)).collect();
    let count: u128 = allowed.iter().map(|a| a.len() as u128).product();
    if count > PURE_BUDGET {
        return Err(GameError::TooLarge(format!("{count} pure sender strategies exceed {PURE_BUDGET}")));
    }
    let grid = simplex_grid(g.num_types(), off_path_grid);
    let (n1, n2) = (g.num_actions(), g.num_messages());

    // Off-path candidates depend only on the message.
    let off_candidates: Vec<Vec<(usize, FiniteDistribution, Vec<FiniteDistribution>)>> = (0..n2)
        .map(|a2| {
            let prior_br = receiver_best_response(g, g.prior(), a2);
            (0..n1)
                .filter_map(|a1| {
                    let support: Vec<FiniteDistribution> = grid
                        .iter()
                        .filter(|b| receiver_best_response(g, b, a2).contains(&a1))
                        .cloned()
                        .collect();
                    let canonical = if prior_br.contains(&a1) {
                        g.prior().clone()
                    } else {
                        support.first()?.clone()
                    };
                    Some((a1, canonical, support))
                })
                .collect()
        })
        .collect();

    let mut out = Vec::new();
    for map in cartesian(&allowed) {
        let sender: Vec<FiniteDistribution> = map.iter().map(|&a2| FiniteDistribution::point(n2, a2)).collect();
        let mut choices: Vec<Vec<(usize, FiniteDistribution, Vec<FiniteDistribution>)>> = Vec::with_capacity(n2);
        for a2 in 0..n2 {
            match posterior_from_sender(g.prior(), &sender, a2) {
                Some(post) => {
                    let br = receiver_best_response(g, &post, a2);
                    choices.push(br.into_iter().map(|a1| (a1, post.clone(), Vec::new())).collect());
                }
                None => choices.push(off_candidates[a2].clone()),
            }
        }
        for pick in cartesian(&choices) {
            let receiver = pick.iter().map(|(a1, _, _)| FiniteDistribution::point(n1, *a1)).collect();
            let beliefs = pick.iter().map(|(_, b, _)| b.clone()).collect();
            let supporting = pick.into_iter().map(|(_, _, s)| s).collect();
            if let Some(eq) = finish(g, sender.clone(), receiver, beliefs, supporting)? {
                out.push(eq);
            }
        }
    }
    Ok(out)
}

/// Maximizes the smallest probability on the support; the result is accepted
/// only if that minimum is positive.
fn max_min_slack(lp: LinearProgram, num_strategy_vars: usize) -> Result<Option<Vec<f64>>> {
    let sol = solve_lp(&lp)?;
    if sol.status != LpStatus::Optimal || sol.value <= SUPPORT_SLACK {
        return Ok(None);
    }
    Ok(Some(sol.z[..num_strategy_vars].to_vec()))
}

/// Sender strategies with exactly the given supports under which the
/// receiver's supports are best responses at every on-path message.
fn sender_for_supports(
    g: &SignalingGame,
    s: &[Vec<usize>],
    r: &[Vec<usize>],
) -> Result<Option<Vec<FiniteDistribution>>> {
    let (m, n1, n2) = (g.num_types(), g.num_actions(), g.num_messages());
    let mut index = vec![vec![usize::MAX; n2]; m];
    let mut nv = 0;
    for t in 0..m {
        for &a2 in &s[t] {
            index[t][a2] = nv;
            nv += 1;
        }
    }
    let slack = nv;
    let mut obj = vec![0.0; nv + 1];
    obj[slack] = 1.0;
    let mut lp = LinearProgram::new(nv + 1).maximize(obj);
    lp.bounds(slack, 0.0, 1.0);
    for t in 0..m {
        let mut row = vec![0.0; nv + 1];
        for &a2 in &s[t] {
            row[index[t][a2]] = 1.0;
            let mut pos = vec![0.0; nv + 1];
            pos[index[t][a2]] = 1.0;
            pos[slack] = -1.0;
            lp.ge(pos, 0.0);
        }
        lp.equals(row, 1.0);
    }
    for a2 in 0..n2 {
        if !(0..m).any(|t| s[t].contains(&a2)) {
            continue;
        }
        for &a in &r[a2] {
            for b in 0..n1 {
                if a == b {
                    continue;
                }
                let mut row = vec![0.0; nv + 1];
                for t in 0..m {
                    if index[t][a2] != usize::MAX {
                        row[index[t][a2]] = g.prior().get(t)
                            * (g.payoff(Player::Defender, a, a2, t) - g.payoff(Player::Defender, b, a2, t));
                    }
                }
                if r[a2].contains(&b) {
                    lp.equals(row, 0.0);
                } else {
                    lp.ge(row, 0.0);
                }
            }
        }
    }
    Ok(max_min_slack(lp, nv)?.map(|z| {
        (0..m)
            .map(|t| {
                let mut w = vec![0.0; n2];
                for &a2 in &s[t] {
                    w[a2] = z[index[t][a2]].max(0.0);
                }
                FiniteDistribution::from_unnormalized(w).expect("positive mass on the support")
            })
            .collect()
    }))
}

/// Receiver strategies with exactly the given supports that make every
/// sender type indifferent over its support and unwilling to leave it.
fn receiver_for_supports(
    g: &SignalingGame,
    s: &[Vec<usize>],
    r: &[Vec<usize>],
) -> Result<Option<Vec<FiniteDistribution>>> {
    let (m, n1, n2) = (g.num_types(), g.num_actions(), g.num_messages());
    let mut index = vec![vec![usize::MAX; n1]; n2];
    let mut nv = 0;
    for a2 in 0..n2 {
        for &a1 in &r[a2] {
            index[a2][a1] = nv;
            nv += 1;
        }
    }
    let slack = nv;
    let mut obj = vec![0.0; nv + 1];
    obj[slack] = 1.0;
    let mut lp = LinearProgram::new(nv + 1).maximize(obj);
    lp.bounds(slack, 0.0, 1.0);
    for a2 in 0..n2 {
        let mut row = vec![0.0; nv + 1];
        for &a1 in &r[a2] {
            row[index[a2][a1]] = 1.0;
            let mut pos = vec![0.0; nv + 1];
            pos[index[a2][a1]] = 1.0;
            pos[slack] = -1.0;
            lp.ge(pos, 0.0);
        }
        lp.equals(row, 1.0);
    }
    let value_row = |t: usize, a2: usize| {
        let mut row = vec![0.0; nv + 1];
        for &a1 in &r[a2] {
            row[index[a2][a1]] = g.payoff(Player::User, a1, a2, t);
        }
        row
    };
    for t in 0..m {
        if g.prior().get(t) <= 0.0 {
            continue;
        }
        let base = s[t][0];
        let vb = value_row(t, base);
        for a2 in g.allowed_messages(t) {
            if a2 == base {
                continue;
            }
            let diff: Vec<f64> = vb.iter().zip(value_row(t, a2)).map(|(x, y)| x - y).collect();
            if s[t].contains(&a2) {
                lp.equals(diff, 0.0);
            } else {
                lp.ge(diff, 0.0);
            }
        }
    }
    Ok(max_min_slack(lp, nv)?.map(|z| {
        (0..n2)
            .map(|a2| {
                let mut w = vec![0.0; n1];
                for &a1 in &r[a2] {
                    w[a1] = z[index[a2][a1]].max(0.0);
                }
                FiniteDistribution::from_unnormalized(w).expect("positive mass on the support")
            })
            .collect()
    }))
}

/// A belief at an off-path message under which every action of `support`
/// is a best response; the prior when it qualifies.
fn off_path_belief(g: &SignalingGame, a2: usize, support: &[usize]) -> Result<Option<FiniteDistribution>> {
    let br = receiver_best_response(g, g.prior(), a2);
    let values = g.receiver_values(g.prior(), a2);
    let best = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if support.iter().all(|a| br.contains(a) && best - values[*a] <= BR_TOL) {
        return Ok(Some(g.prior().clone()));
    }
    let (m, n1) = (g.num_types(), g.num_actions());
    let mut lp = LinearProgram::new(m);
    lp.equals(vec![1.0; m], 1.0);
    for &a in support {
        for b in 0..n1 {
            if a == b {
                continue;
            }
            let row: Vec<f64> = (0..m)
                .map(|t| g.payoff(Player::Defender, a, a2, t) - g.payoff(Player::Defender, b, a2, t))
                .collect();
            if support.contains(&b) {
                lp.equals(row, 0.0);
            } else {
                lp.ge(row, 0.0);
            }
        }
    }
    let sol = solve_lp(&lp)?;
    if sol.status != LpStatus::Optimal {
        return Ok(None);
    }
    Ok(FiniteDistribution::cleaned(&sol.z, 1e-9).ok())
}

/// Mixed PBNE by support enumeration over sender types and receiver
/// information sets.
///
/// For fixed supports the conditions split into three linear feasibility
/// problems: receiver optimality on path (linear in the sender strategy once
/// beliefs are left unnormalized), sender optimality (linear in the receiver
/// strategy) and receiver optimality off path (linear in the belief). One
/// point is returned per feasible support profile.
pub fn solve_mixed_pbne(g: &SignalingGame) -> Result<Vec<SignalingPbne>> {
    g.ensure_valid()?;
    let (m, n1, n2) = (g.num_types(), g.num_actions(), g.num_messages());
    let sender_supports: Vec<Vec<Vec<usize>>> = (0..m).map(|t| subsets(&g.allowed_messages(t))).collect();
    let receiver_supports = subsets(&(0..n1).collect::<Vec<_>>());
    let count = sender_supports.iter().map(|s| s.len() as u128).product::<u128>()
        * (receiver_supports.len() as u128).pow(n2 as u32);
    if count > MIXED_BUDGET {
        return Err(GameError::TooLarge(format!("{count} support profiles exceed {MIXED_BUDGET}")));
    }
    let mut off_cache: Vec<Vec<Option<Option<FiniteDistribution>>>> = vec![vec![None; receiver_supports.len()]; n2];
    let mut out: Vec<SignalingPbne> = Vec::new();

    for s in cartesian(&sender_supports) {
        let on_path: Vec<bool> = (0..n2)
            .map(|a2| (0..m).any(|t| g.prior().get(t) > 0.0 && s[t].contains(&a2)))
            .collect();
        let on: Vec<usize> = (0..n2).filter(|&a| on_path[a]).collect();
        let off: Vec<usize> = (0..n2).filter(|&a| !on_path[a]).collect();
        let idx: Vec<usize> = (0..receiver_supports.len()).collect();
        for on_pick in cartesian(&vec![idx.clone(); on.len()]) {
            let mut r = vec![Vec::new(); n2];
            for (&a2, &i) in on.iter().zip(&on_pick) {
                r[a2] = receiver_supports[i].clone();
            }
            let Some(sender) = sender_for_supports(g, &s, &r)? else {
                continue;
            };
            for off_pick in cartesian(&vec![idx.clone(); off.len()]) {
                let mut beliefs_off = Vec::with_capacity(off.len());
                let mut ok = true;
                for (&a2, &i) in off.iter().zip(&off_pick) {
                    if off_cache[a2][i].is_none() {
                        off_cache[a2][i] = Some(off_path_belief(g, a2, &receiver_supports[i])?);
                    }
                    match off_cache[a2][i].clone().flatten() {
                        Some(b) => beliefs_off.push(b),
                        None => {
                            ok = false;
                            break;
                        }
                    }
                    r[a2] = receiver_supports[i].clone();
                }
                if !ok {
                    continue;
                }
                let Some(receiver) = receiver_for_supports(g, &s, &r)? else {
                    continue;
                };
                let mut beliefs = Vec::with_capacity(n2);
                let mut off_iter = beliefs_off.into_iter();
                for a2 in 0..n2 {
                    beliefs.push(match posterior_from_sender(g.prior(), &sender, a2) {
                        Some(p) => p,
                        None => off_iter.next().unwrap_or_else(|| g.prior().clone()),
                    });
                }
                if let Some(eq) = finish(g, sender.clone(), receiver, beliefs, vec![Vec::new(); n2])? {
                    let dup = out.iter().any(|o| {
                        o.sender.iter().zip(&eq.sender).all(|(a, b)| a.sup_distance(b) <= 1e-9)
                            && o.receiver.iter().zip(&eq.receiver).all(|(a, b)| a.sup_distance(b) <= 1e-9)
                    });
                    if !dup {
                        out.push(eq);
                    }
                }
            }
        }
    }
    Ok(out)
}
