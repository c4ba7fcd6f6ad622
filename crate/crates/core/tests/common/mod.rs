#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
pub mod tables;

use secgame_core::signaling::{SignalingGame, SignalingPbne};
use secgame_core::{
    FiniteDistribution, Information, MultiStageGame, Player, StageGame, StaticBayesianGame, StrategyProfile,
    TypeSpace,
};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn labels(prefix: &str, n: usize) -> Vec<String> {
    (0..n).map(|i| format!("{prefix}{i}")).collect()
}

pub fn types(n: usize) -> TypeSpace {
    if n == 1 {
        TypeSpace::singleton()
    } else {
        TypeSpace::new(labels("t", n)).unwrap()
    }
}

/// Strictly positive weights summing to one.
pub fn random_prior(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    let raw: Vec<f64> = (0..n).map(|_| rng.random_range(0.1..1.0)).collect();
    let s: f64 = raw.iter().sum();
    raw.iter().map(|w| w / s).collect()
}

pub fn random_dist(rng: &mut ChaCha8Rng, n: usize) -> FiniteDistribution {
    match rng.random_range(0..4) {
        0 => FiniteDistribution::point(n, rng.random_range(0..n)),
        _ => FiniteDistribution::new(random_prior(rng, n)).unwrap(),
    }
}

/// Payoffs on a quarter grid in `[-5, 5]`.
pub fn payoff(rng: &mut ChaCha8Rng) -> f64 {
    rng.random_range(-20..=20) as f64 / 4.0
}

pub fn random_stage(
    rng: &mut ChaCha8Rng,
    states: usize,
    n1: usize,
    n2: usize,
    m1: usize,
    m2: usize,
    next_states: Option<usize>,
) -> StageGame {
    let size = states * n1 * n2 * m1 * m2;
    let cells: Vec<(f64, f64)> = (0..size).map(|_| (payoff(rng), payoff(rng))).collect();
    let stage = StageGame::new(labels("x", states), labels("A", n1), labels("a", n2), m1, m2).with_payoffs(
        |x, a1, a2, t1, t2| cells[(((x * n1 + a1) * n2 + a2) * m1 + t1) * m2 + t2],
    );
    match next_states {
        None => stage,
        Some(next) => {
            let table: Vec<usize> = (0..states * n1 * n2).map(|_| rng.random_range(0..next)).collect();
            stage.with_transition(move |x, a1, a2| table[(x * n1 + a1) * n2 + a2])
        }
    }
}

/// Random game with `horizon + 1` stages, 1-2 types each, 1-2 states and
/// 2-3 actions per stage.
pub fn random_game(seed: u64, horizon: usize) -> MultiStageGame {
    let mut r = rng(seed);
    let m1 = r.random_range(1..=2);
    let m2 = r.random_range(1..=2);
    random_game_with_types(seed, horizon, m1, m2)
}

pub fn random_game_with_types(seed: u64, horizon: usize, m1: usize, m2: usize) -> MultiStageGame {
    let mut r = rng(seed.wrapping_add(1));
    let states: Vec<usize> = (0..=horizon).map(|k| if k == 0 { 1 } else { r.random_range(1..=2) }).collect();
    let stages = (0..=horizon)
        .map(|k| {
            let n1 = r.random_range(2..=3);
            let n2 = r.random_range(2..=3);
            let next = (k < horizon).then(|| states[k + 1]);
            random_stage(&mut r, states[k], n1, n2, m1, m2, next)
        })
        .collect();
    let p1 = random_prior(&mut r, m1);
    let p2 = random_prior(&mut r, m2);
    MultiStageGame::new(types(m1), types(m2), p1, p2, stages, 0).unwrap()
}

pub fn random_profile(g: &MultiStageGame, seed: u64) -> StrategyProfile {
    let mut r = rng(seed ^ 0x5eed);
    let mut p = StrategyProfile::uniform(g);
    for player in [Player::Defender, Player::User] {
        for (k, stage) in g.stages().iter().enumerate() {
            for x in 0..stage.num_states() {
                for t in 0..g.num_types(player) {
                    p.of_mut(player)[k][x][t] = random_dist(&mut r, stage.num_actions(player));
                }
            }
        }
    }
    p
}

/// Two types per player, 2-3 actions each, random priors.
pub fn random_static(seed: u64, information: Information) -> StaticBayesianGame {
    let mut r = rng(seed);
    let n1 = r.random_range(2..=3);
    let n2 = r.random_range(2..=3);
    let stage = random_stage(&mut r, 1, n1, n2, 2, 2, None);
    let p1 = random_prior(&mut r, 2);
    let p2 = random_prior(&mut r, 2);
    StaticBayesianGame::new(types(2), types(2), p1, p2, stage, information).unwrap()
}

/// Per-type deviation gaps of a static Bayesian game with private types,
/// computed directly from the payoff cells.
pub fn agent_gaps_by_hand(
    g: &StaticBayesianGame,
    defender: &[FiniteDistribution],
    user: &[FiniteDistribution],
) -> f64 {
    let stage = g.stage();
    let (n1, n2) = (stage.num_actions(Player::Defender), stage.num_actions(Player::User));
    let (m1, m2) = (defender.len(), user.len());
    let pd = g.prior_about(Player::Defender);
    let pu = g.prior_about(Player::User);
    let mut worst: f64 = 0.0;
    for t1 in 0..m1 {
        let value = |a1: usize| -> f64 {
            (0..m2)
                .map(|t2| pu.get(t2) * (0..n2).map(|a2| user[t2].get(a2) * g.payoff(Player::Defender, a1, a2, t1, t2)).sum::<f64>())
                .sum()
        };
        let vals: Vec<f64> = (0..n1).map(value).collect();
        let best = vals.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let got: f64 = (0..n1).map(|a| defender[t1].get(a) * vals[a]).sum();
        worst = worst.max(best - got);
    }
    for t2 in 0..m2 {
        let value = |a2: usize| -> f64 {
            (0..m1)
                .map(|t1| pd.get(t1) * (0..n1).map(|a1| defender[t1].get(a1) * g.payoff(Player::User, a1, a2, t1, t2)).sum::<f64>())
                .sum()
        };
        let vals: Vec<f64> = (0..n2).map(value).collect();
        let best = vals.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let got: f64 = (0..n2).map(|a| user[t2].get(a) * vals[a]).sum();
        worst = worst.max(best - got);
    }
    worst
}

/// Every history of a game as `(stage, state, path)` with the action pairs
/// taken to reach it, in depth-first order.
pub fn histories(g: &MultiStageGame) -> Vec<(usize, usize, Vec<(usize, usize)>)> {
    let mut out = Vec::new();
    let mut stack = vec![(0usize, g.initial_state(), Vec::new())];
    while let Some((k, x, path)) = stack.pop() {
        if k < g.horizon() {
            let stage = g.stage(k);
            for a1 in 0..stage.num_actions(Player::Defender) {
                for a2 in 0..stage.num_actions(Player::User) {
                    let mut p: Vec<(usize, usize)> = path.clone();
                    p.push((a1, a2));
                    stack.push((k + 1, stage.transition(x, a1, a2).unwrap(), p));
                }
            }
        }
        out.push((k, x, path));
    }
    out
}

/// Probability that the user of type `t2` plays the path, and the same for
/// the defender of type `t1`.
pub fn path_likelihood(
    g: &MultiStageGame,
    profile: &StrategyProfile,
    path: &[(usize, usize)],
    t1: usize,
    t2: usize,
) -> (f64, f64) {
    let (mut l1, mut l2) = (1.0, 1.0);
    let mut x = g.initial_state();
    for (k, &(a1, a2)) in path.iter().enumerate() {
        l1 *= profile.get(Player::Defender, k, x, t1).get(a1);
        l2 *= profile.get(Player::User, k, x, t2).get(a2);
        x = g.stage(k).transition(x, a1, a2).unwrap();
    }
    (l1, l2)
}

/// Expected total payoff of `player` with own type `own`, by enumerating
/// every complete path and the opponent's type under the prior.
pub fn brute_force_value(g: &MultiStageGame, profile: &StrategyProfile, player: Player, own: usize) -> f64 {
    let other = player.opponent();
    let prior = g.prior_about(other);
    let mut total = 0.0;
    for t_other in 0..g.num_types(other) {
        let (t1, t2) = if player == Player::Defender { (own, t_other) } else { (t_other, own) };
        total += prior.get(t_other) * walk(g, profile, player, t1, t2, 0, g.initial_state());
    }
    total
}

fn walk(g: &MultiStageGame, profile: &StrategyProfile, player: Player, t1: usize, t2: usize, k: usize, x: usize) -> f64 {
    let stage = g.stage(k);
    let s1 = profile.get(Player::Defender, k, x, t1);
    let s2 = profile.get(Player::User, k, x, t2);
    let mut v = 0.0;
    for a1 in 0..stage.num_actions(Player::Defender) {
        for a2 in 0..stage.num_actions(Player::User) {
            let p = s1.get(a1) * s2.get(a2);
            if p == 0.0 {
                continue;
            }
            let mut here = stage.payoff(player, x, a1, a2, t1, t2);
            if k < g.horizon() {
                here += walk(g, profile, player, t1, t2, k + 1, stage.transition(x, a1, a2).unwrap());
            }
            v += p * here;
        }
    }
    v
}

pub fn random_signaling(seed: u64) -> SignalingGame {
    let mut r = rng(seed);
    let m = r.random_range(1..=3);
    let n1 = r.random_range(2..=3);
    let n2 = r.random_range(2..=3);
    let cells: Vec<(f64, f64)> = (0..n1 * n2 * m).map(|_| (payoff(&mut r), payoff(&mut r))).collect();
    let prior = random_prior(&mut r, m);
    SignalingGame::new(types(m), prior, labels("A", n1), labels("m", n2), |a1, a2, t| {
        cells[(a1 * n2 + a2) * m + t]
    })
    .unwrap()
}

/// Largest violation of receiver optimality, sender optimality and Bayes'
/// rule, recomputed from the payoff cells.
pub fn signaling_violation(g: &SignalingGame, eq: &SignalingPbne) -> f64 {
    let (m, n1, n2) = (g.num_types(), g.num_actions(), g.num_messages());
    let prior = g.prior();
    let mut worst: f64 = 0.0;
    for msg in 0..n2 {
        let mass: Vec<f64> = (0..m).map(|t| prior.get(t) * eq.sender[t].get(msg)).collect();
        let total: f64 = mass.iter().sum();
        if total > 0.0 {
            for t in 0..m {
                worst = worst.max((eq.beliefs[msg].get(t) - mass[t] / total).abs());
            }
        }
        let vals: Vec<f64> = (0..n1)
            .map(|a| (0..m).map(|t| eq.beliefs[msg].get(t) * g.payoff(Player::Defender, a, msg, t)).sum())
            .collect();
        let best = vals.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let got: f64 = (0..n1).map(|a| eq.receiver[msg].get(a) * vals[a]).sum();
        worst = worst.max(best - got);
    }
    for t in 0..m {
        if prior.get(t) == 0.0 {
            continue;
        }
        let vals: Vec<f64> = (0..n2)
            .map(|msg| (0..n1).map(|a| eq.receiver[msg].get(a) * g.payoff(Player::User, a, msg, t)).sum())
            .collect();
        let best = vals.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let got: f64 = (0..n2).map(|msg| eq.sender[t].get(msg) * vals[msg]).sum();
        worst = worst.max(best - got);
    }
    worst
}
