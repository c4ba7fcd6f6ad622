//! Every cell of the scenario payoff tables and transition maps, written out
//! by hand from the model description with distinct parameter values so that
//! swapped parameters show up.

use secgame_core::scenarios::{
    build_apt_game, build_exercise_qb, build_privilege_escalation, build_static_baseline, build_static_bayesian,
    exercise_qb_matrix, AptParameters, BAD, GOOD, HIGH, LOW,
};
use secgame_core::{Information, MultiStageGame, Player, StageGame};

const D: Player = Player::Defender;
const U: Player = Player::User;

fn cell(stage: &StageGame, x: usize, a1: usize, a2: usize, t1: usize, t2: usize) -> (f64, f64) {
    (stage.payoff(D, x, a1, a2, t1, t2), stage.payoff(U, x, a1, a2, t1, t2))
}

pub fn baseline_bimatrix() {
    let (r1, r2, r3, r4) = (1.5, 2.5, 3.5, 4.5);
    let g = build_static_baseline(r1, r2, r3, r4).unwrap();
    let expected = [[(0.0, 0.0), (-1.5, 2.5)], [(0.0, 0.0), (3.5, -4.5)]];
    for a1 in 0..2 {
        for a2 in 0..2 {
            assert_eq!((g.payoff(D, a1, a2), g.payoff(U, a1, a2)), expected[a1][a2], "({a1},{a2})");
        }
    }
}

pub fn baseline_rejects_non_positive_rewards() {
    assert!(build_static_baseline(0.0, 1.0, 1.0, 1.0).is_err());
    assert!(build_static_baseline(1.0, 1.0, -2.0, 1.0).is_err());
}

pub fn static_bayesian_bimatrices() {
    let g = build_static_bayesian(3.0, 1.25, 2.75).unwrap();
    let bad = [[(0.0, 0.0), (-2.75, 2.75)], [(0.0, 0.0), (3.0, -3.0)]];
    let good = [[(0.0, 0.0), (1.25, 1.25)], [(0.0, 0.0), (-1.25, -1.25)]];
    assert_eq!(g.stage().actions(D), ["Permit", "Restrict"]);
    assert_eq!(g.stage().actions(U), ["NOP", "Escalate"]);
    for a1 in 0..2 {
        for a2 in 0..2 {
            let got = |t2| (g.payoff(D, a1, a2, 0, t2), g.payoff(U, a1, a2, 0, t2));
            assert_eq!(got(BAD), bad[a1][a2]);
            assert_eq!(got(GOOD), good[a1][a2]);
        }
    }
    assert_eq!(g.prior_about(U).weights(), [0.5, 0.5]);
}

pub fn escalation_with_defender_types() {
    let (r1, r2, r3, r4) = (1.5, 2.5, 3.5, 4.5);
    let g = build_privilege_escalation(r1, r2, r3, r4).unwrap();
    for (t1, r0) in [(LOW, 3.5), (HIGH, 4.5)] {
        let bad = [[(0.0, 0.0), (-2.5, 2.5)], [(0.0, 0.0), (r0, -r0)]];
        let good = [[(0.0, 0.0), (1.5, 1.5)], [(0.0, 0.0), (-1.5, -1.5)]];
        for a1 in 0..2 {
            for a2 in 0..2 {
                let got = |t2| (g.payoff(D, a1, a2, t1, t2), g.payoff(U, a1, a2, t1, t2));
                assert_eq!(got(BAD), bad[a1][a2], "t1 {t1} ({a1},{a2})");
                assert_eq!(got(GOOD), good[a1][a2]);
            }
        }
    }
}

pub fn exercise_matrices() {
    let theta1 = [[(10.0, 10.0), (18.0, 4.0)], [(7.0, 19.0), (17.0, 17.0)]];
    let theta2 = [[(10.0, 10.0), (18.0, 18.0)], [(14.0, 18.0), (20.0, 20.0)]];
    for (t, table) in [(0, theta1), (1, theta2)] {
        let m = exercise_qb_matrix(t);
        let g = build_exercise_qb(Information::Private);
        for a1 in 0..2 {
            for a2 in 0..2 {
                assert_eq!((m.payoff(D, a1, a2), m.payoff(U, a1, a2)), table[a1][a2]);
                assert_eq!((g.payoff(D, a1, a2, t, 0), g.payoff(U, a1, a2, t, 0)), table[a1][a2]);
            }
        }
        assert_eq!(g.prior_about(D).weights(), [0.5, 0.5]);
    }
}

fn distinct() -> AptParameters {
    AptParameters {
        c1_0: 1.1,
        c2_0: 2.3,
        r1_0: 0.7,
        r2_0: 4.1,
        r3_0: 3.2,
        r4_0: 6.5,
        r5_0: 1.9,
        r1: 2.2,
        r2: 4.4,
        r3: 3.3,
        r4: 6.6,
        c_k: 1.05,
        r2_k: 2.5,
        r3_k: 4.7,
        r1_k: vec![0.1, 1.2, 2.3, 3.4],
        r4_k: vec![2.6, 4.8, 8.9, 12.1],
        ..AptParameters::default()
    }
}

fn apt(literal: bool) -> MultiStageGame {
    let p = AptParameters { literal_avatar_cost: literal, ..distinct() };
    assert!(p.validate().is_empty(), "{:?}", p.validate());
    build_apt_game(&p).unwrap()
}

pub fn initial_stage_table() {
    for literal in [false, true] {
        let g = apt(literal);
        let s = g.stage(0);
        assert_eq!(s.actions(D), ["None", "Employee", "CEO"]);
        assert_eq!(s.actions(U), ["Employee", "CEO", "Avatar"]);
        for (t1, c0, r0) in [(LOW, 1.1, 3.2), (HIGH, 2.3, 6.5)] {
            let avatar_ceo = if literal { -1.1 } else { -c0 };
            let bad = [
                [(-4.1, 4.1), (-4.1, 4.1), (0.0, 1.9)],
                [(-c0, -r0), (-c0, 4.1), (-c0, 1.9)],
                [(-c0, 4.1), (-c0, -r0), (avatar_ceo, 1.9)],
            ];
            let good = [[(0.0, 0.7), (0.0, 0.7)], [(-c0, 0.7), (-c0, 0.7)], [(-c0, 0.7), (-c0, 0.7)]];
            for x in 0..2 {
                for a1 in 0..3 {
                    for a2 in 0..3 {
                        assert_eq!(cell(s, x, a1, a2, t1, BAD), bad[a1][a2], "x {x} t1 {t1} ({a1},{a2})");
                    }
                    for a2 in 0..2 {
                        assert_eq!(cell(s, x, a1, a2, t1, GOOD), good[a1][a2]);
                    }
                }
                // A legitimate user never contacts the avatar.
                assert!(!s.is_feasible(U, x, GOOD, 2));
                assert!(s.is_feasible(U, x, BAD, 2));
                assert_eq!(s.feasible_actions(D, x, t1), [0, 1, 2]);
            }
        }
    }
}

pub fn intermediate_stage_table() {
    let g = apt(false);
    let s = g.stage(1);
    assert_eq!(s.states(), ["honeypot", "employee", "ceo"]);
    for (t1, r0) in [(LOW, 3.3), (HIGH, 6.6)] {
        let bad = [[(0.0, 0.0), (-4.4, 4.4)], [(0.0, 0.0), (r0, -r0)]];
        let good = [[(0.0, 0.0), (2.2, 2.2)], [(0.0, 0.0), (-2.2, -2.2)]];
        for x in 0..3 {
            for a1 in 0..2 {
                for a2 in 0..2 {
                    assert_eq!(cell(s, x, a1, a2, t1, BAD), bad[a1][a2]);
                    assert_eq!(cell(s, x, a1, a2, t1, GOOD), good[a1][a2]);
                }
            }
        }
    }
}

pub fn final_stage_table() {
    let g = apt(false);
    let s = g.stage(2);
    assert_eq!(s.states().len(), 4);
    assert_eq!(s.actions(D), ["NOP", "Monitor"]);
    assert_eq!(s.actions(U), ["NOP", "Access"]);
    let r1k = [0.1, 1.2, 2.3, 3.4];
    let r4k = [2.6, 4.8, 8.9, 12.1];
    let ck = 1.05;
    for (t1, r0) in [(LOW, 2.5), (HIGH, 4.7)] {
        for x in 0..4 {
            let (r1, r4) = (r1k[x], r4k[x]);
            let bad = [[(0.0, 0.0), (r1, r4 - r1)], [(-ck, 0.0), (r0 - ck, -r0)]];
            let good = [[(0.0, 0.0), (r4, r4)], [(-ck, 0.0), (r4 - ck, r4)]];
            for a1 in 0..2 {
                for a2 in 0..2 {
                    let (d, u) = cell(s, x, a1, a2, t1, BAD);
                    assert!((d - bad[a1][a2].0).abs() < 1e-12 && (u - bad[a1][a2].1).abs() < 1e-12, "x {x} ({a1},{a2})");
                    let (d, u) = cell(s, x, a1, a2, t1, GOOD);
                    assert!((d - good[a1][a2].0).abs() < 1e-12 && (u - good[a1][a2].1).abs() < 1e-12);
                }
            }
        }
    }
}

pub fn initial_transition_map() {
    let g = apt(false);
    let s = g.stage(0);
    // External email: indexed [a1][a2] to honeypot 0, employee 1, CEO 2.
    let external = [[1, 2, 0], [0, 2, 0], [1, 0, 0]];
    // Internal email: only the user's choice matters.
    let internal = [1, 2, 0];
    for a1 in 0..3 {
        for a2 in 0..3 {
            assert_eq!(s.transition(0, a1, a2).unwrap(), external[a1][a2], "external ({a1},{a2})");
            assert_eq!(s.transition(1, a1, a2).unwrap(), internal[a2], "internal ({a1},{a2})");
        }
    }
}

pub fn intermediate_transition_map() {
    let g = apt(false);
    let s = g.stage(1);
    let table = [[[0, 0], [0, 0]], [[1, 2], [1, 1]], [[2, 3], [2, 2]]];
    for x in 0..3 {
        for a1 in 0..2 {
            for a2 in 0..2 {
                assert_eq!(s.transition(x, a1, a2).unwrap(), table[x][a1][a2], "x {x} ({a1},{a2})");
            }
        }
    }
    assert!(g.stage(2).is_terminal());
}

pub fn apt_shape_and_priors() {
    let g = build_apt_game(&AptParameters::default()).unwrap();
    assert_eq!(g.horizon(), 2);
    assert_eq!(g.types(D).labels(), ["low", "high"]);
    assert_eq!(g.types(U).labels(), ["bad", "good"]);
    assert_eq!(g.initial_state(), 0);
    assert_eq!(g.prior_about(D).weights(), [0.5, 0.5]);
    assert_eq!(g.prior_about(U).weights(), [0.5, 0.5]);
}

/// Every fixture, by name.
pub const ALL: &[(&str, fn())] = &[
    ("baseline_bimatrix", baseline_bimatrix),
    ("baseline_rejects_non_positive_rewards", baseline_rejects_non_positive_rewards),
    ("static_bayesian_bimatrices", static_bayesian_bimatrices),
    ("escalation_with_defender_types", escalation_with_defender_types),
    ("exercise_matrices", exercise_matrices),
    ("initial_stage_table", initial_stage_table),
    ("intermediate_stage_table", intermediate_stage_table),
    ("final_stage_table", final_stage_table),
    ("initial_transition_map", initial_transition_map),
    ("intermediate_transition_map", intermediate_transition_map),
    ("apt_shape_and_priors", apt_shape_and_priors),
];
