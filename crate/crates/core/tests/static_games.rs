mod common;

use common::{agent_gaps_by_hand, random_stage, random_static, rng};
use proptest::prelude::*;
use secgame_core::multistage::{solve_pbne, SolverOptions, StageBeliefs, StageProblem};
use secgame_core::{mixed_ne, pure_ne, solve_bne, BimatrixGame, FiniteDistribution, Information, Player};

fn random_bimatrix(seed: u64) -> BimatrixGame {
    let mut r = rng(seed);
    use rand::Rng;
    let n1 = r.random_range(2..=4);
    let n2 = r.random_range(2..=4);
    let stage = random_stage(&mut r, 1, n1, n2, 1, 1, None);
    BimatrixGame::from_stage(&stage, 0, 0, 0)
}

/// Cells where each action is a best reply to the other, from the full table.
fn pure_by_table(g: &BimatrixGame) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for a1 in 0..g.rows() {
        for a2 in 0..g.cols() {
            let row_best = (0..g.rows()).all(|b| g.payoff(Player::Defender, b, a2) <= g.payoff(Player::Defender, a1, a2));
            let col_best = (0..g.cols()).all(|b| g.payoff(Player::User, a1, b) <= g.payoff(Player::User, a1, a2));
            if row_best && col_best {
                out.push((a1, a2));
            }
        }
    }
    out
}

fn bimatrix_gap(g: &BimatrixGame, s1: &FiniteDistribution, s2: &FiniteDistribution) -> f64 {
    let u = |p: Player, a1: usize, a2: usize| g.payoff(p, a1, a2);
    let v1: Vec<f64> = (0..g.rows()).map(|a| (0..g.cols()).map(|b| s2.get(b) * u(Player::Defender, a, b)).sum()).collect();
    let v2: Vec<f64> = (0..g.cols()).map(|b| (0..g.rows()).map(|a| s1.get(a) * u(Player::User, a, b)).sum()).collect();
    let e1: f64 = (0..g.rows()).map(|a| s1.get(a) * v1[a]).sum();
    let e2: f64 = (0..g.cols()).map(|b| s2.get(b) * v2[b]).sum();
    let m1 = v1.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let m2 = v2.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    (m1 - e1).max(m2 - e2)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn pure_ne_matches_best_response_table(seed in any::<u64>()) {
        let g = random_bimatrix(seed);
        prop_assert_eq!(pure_ne(&g), pure_by_table(&g));
    }

    #[test]
    fn pure_equilibria_appear_among_mixed(seed in any::<u64>()) {
        let g = random_bimatrix(seed);
        let mixed = mixed_ne(&g).unwrap();
        prop_assert!(!mixed.is_empty());
        for eq in &mixed {
            prop_assert!(bimatrix_gap(&g, &eq.defender[0], &eq.user[0]) <= 1e-6);
        }
        for (a1, a2) in pure_ne(&g) {
            let found = mixed.iter().any(|e| e.defender[0].is_pure(1e-9) == Some(a1) && e.user[0].is_pure(1e-9) == Some(a2));
            prop_assert!(found, "pure ({}, {}) missing", a1, a2);
        }
    }
}

#[test]
fn bayesian_equilibrium_exists_on_random_games() {
    for seed in 0..200 {
        let g = random_static(seed, Information::Private);
        let found = solve_bne(&g).unwrap();
        assert!(!found.is_empty(), "seed {seed}: no equilibrium");
        for eq in &found {
            let gap = agent_gaps_by_hand(&g, &eq.defender, &eq.user);
            assert!(gap <= 1e-6, "seed {seed}: gap {gap}");
        }
    }
}

#[test]
fn uninformed_solutions_are_equilibria_of_the_averaged_game() {
    for seed in 0..50 {
        let g = random_static(seed, Information::Uninformed);
        let avg = g.prior_averaged();
        for eq in solve_bne(&g).unwrap() {
            // Both types of a player share the strategy when nobody observes types.
            assert_eq!(eq.defender[0], eq.defender[1]);
            assert_eq!(eq.user[0], eq.user[1]);
            assert!(bimatrix_gap(&avg, &eq.defender[0], &eq.user[0]) <= 1e-6);
        }
    }
}

/// Agent-form enumeration and the one-stage bilinear program certify each other.
#[test]
fn agent_form_and_bilinear_agree() {
    let opts = SolverOptions { restarts: 16, ..SolverOptions::default() };
    for seed in 0..50 {
        let g = random_static(1000 + seed, Information::Private);
        let problem = StageProblem::new(
            g.stage(),
            0,
            StageBeliefs::common(g.prior_about(Player::Defender), g.prior_about(Player::User)),
            None,
        )
        .unwrap();
        for eq in solve_bne(&g).unwrap() {
            let (g1, g2) = problem.gaps(&eq.defender, &eq.user);
            assert!(g1.iter().chain(&g2).all(|v| *v <= 1e-6), "seed {seed}");
        }
        let out = solve_pbne(&g.to_multistage(), &opts).unwrap();
        let sol = out.solution().expect("one stage converges");
        let (d, u) = sol.profile.at(0, 0);
        let (g1, g2) = g.agent_gaps(d, u).unwrap();
        assert!(g1.iter().chain(&g2).all(|v| *v <= 1e-6), "seed {seed}");
        assert!(agent_gaps_by_hand(&g, d, u) <= 1e-6);
    }
}

#[test]
fn zero_weight_type_gets_a_best_response() {
    let mut r = rng(3);
    let stage = random_stage(&mut r, 1, 3, 2, 2, 2, None);
    let g = secgame_core::StaticBayesianGame::new(
        common::types(2),
        common::types(2),
        vec![1.0, 0.0],
        vec![0.4, 0.6],
        stage,
        Information::Private,
    )
    .unwrap();
    for eq in solve_bne(&g).unwrap() {
        assert!(agent_gaps_by_hand(&g, &eq.defender, &eq.user) <= 1e-6);
    }
}
