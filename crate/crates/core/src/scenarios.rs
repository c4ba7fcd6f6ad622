//! Built-in game instances: the exercise game, the one-shot privilege
//! escalation games and the three-stage APT game.
//!
//! Type order is fixed: the user's types are `["bad", "good"]` and the
//! defender's are `["low", "high"]`.

use serde::{Deserialize, Serialize};

use crate::error::{GameError, Result};
use crate::game::{MultiStageGame, Player, StageGame, TypeSpace};
use crate::static_solver::{BimatrixGame, Information, StaticBayesianGame};

pub const BAD: usize = 0;
pub const GOOD: usize = 1;
pub const LOW: usize = 0;
pub const HIGH: usize = 1;

pub fn user_types() -> TypeSpace {
    TypeSpace::new(["bad", "good"]).expect("distinct labels")
}

pub fn defender_types() -> TypeSpace {
    TypeSpace::new(["low", "high"]).expect("distinct labels")
}

/// The exercise matrices `(J1, J2)` under type `t` (0 or 1).
pub fn exercise_qb_matrix(t: usize) -> BimatrixGame {
    let (j1, j2) = match t {
        0 => (
            vec![vec![10.0, 18.0], vec![7.0, 17.0]],
            vec![vec![10.0, 4.0], vec![19.0, 17.0]],
        ),
        _ => (
            vec![vec![10.0, 18.0], vec![14.0, 20.0]],
            vec![vec![10.0, 18.0], vec![18.0, 20.0]],
        ),
    };
    BimatrixGame::new(j1, j2).expect("2x2")
}

/// The exercise game with prior (0.5, 0.5) on the type.
///
/// The type is attached to the row player, so `Information::Private` is the
/// variant where only the row player knows it and `Information::Uninformed`
/// the one where neither does. Complete information per type is
/// [`exercise_qb_matrix`].
pub fn build_exercise_qb(information: Information) -> StaticBayesianGame {
    let m = [exercise_qb_matrix(0), exercise_qb_matrix(1)];
    let stage = StageGame::new(["s"], ["A", "B"], ["a", "b"], 2, 1).with_payoffs(|_, a1, a2, t1, _| {
        (m[t1].payoff(Player::Defender, a1, a2), m[t1].payoff(Player::User, a1, a2))
    });
    StaticBayesianGame::new(
        TypeSpace::new(["theta1", "theta2"]).expect("distinct labels"),
        TypeSpace::singleton(),
        vec![0.5, 0.5],
        vec![1.0],
        stage,
        information,
    )
    .expect("exercise game is well formed")
}

fn require_positive(named: &[(&str, f64)]) -> Result<()> {
    let bad: Vec<String> = named
        .iter()
        .filter(|(_, v)| !(v.is_finite() && *v > 0.0))
        .map(|(n, v)| format!("{n} = {v} must be positive"))
        .collect();
    if bad.is_empty() {
        Ok(())
    } else {
        Err(GameError::Invalid(bad))
    }
}

/// The complete-information permit/restrict game
/// `J1 = [0, -r1; 0, r3]`, `J2 = [0, r2; 0, -r4]`.
pub fn build_static_baseline(r1: f64, r2: f64, r3: f64, r4: f64) -> Result<BimatrixGame> {
    require_positive(&[("r1", r1), ("r2", r2), ("r3", r3), ("r4", r4)])?;
    BimatrixGame::new(vec![vec![0.0, -r1], vec![0.0, r3]], vec![vec![0.0, r2], vec![0.0, -r4]])
}

/// Payoffs of the privilege escalation stage for a bad or good user, with
/// `r0` the penalty/reward for restricting an escalation.
fn escalation_cell(a1: usize, a2: usize, bad: bool, r0: f64, r1: f64, r2: f64) -> (f64, f64) {
    match (a1, a2, bad) {
        (_, 0, _) => (0.0, 0.0),
        (0, _, true) => (-r2, r2),
        (_, _, true) => (r0, -r0),
        (0, _, false) => (r1, r1),
        (_, _, false) => (-r1, -r1),
    }
}

/// One-shot game where only the user has a type (bad or good), with prior
/// `(b, 1 - b)` held by the defender.
pub fn build_static_bayesian_with_prior(r0: f64, r1: f64, r2: f64, bad: f64) -> Result<StaticBayesianGame> {
    require_positive(&[("r0", r0), ("r1", r1), ("r2", r2)])?;
    let stage = StageGame::new(["s"], ["Permit", "Restrict"], ["NOP", "Escalate"], 1, 2)
        .with_payoffs(|_, a1, a2, _, t2| escalation_cell(a1, a2, t2 == BAD, r0, r1, r2));
    StaticBayesianGame::new(
        TypeSpace::singleton(),
        user_types(),
        vec![1.0],
        vec![bad, 1.0 - bad],
        stage,
        Information::Private,
    )
}

pub fn build_static_bayesian(r0: f64, r1: f64, r2: f64) -> Result<StaticBayesianGame> {
    build_static_bayesian_with_prior(r0, r1, r2, 0.5)
}

/// The privilege escalation stage with two-sided types over the given
/// states; `r0` is `r3` against a low and `r4` against a high defender.
pub fn privilege_escalation_stage<S: Into<String>>(
    states: impl IntoIterator<Item = S>,
    r1: f64,
    r2: f64,
    r3: f64,
    r4: f64,
) -> StageGame {
    let states: Vec<String> = states.into_iter().map(Into::into).collect();
    StageGame::new(states, vec!["Permit".into(), "Restrict".into()], vec!["NOP".into(), "Escalate".into()], 2, 2)
        .with_payoffs(|_, a1, a2, t1, t2| {
            let r0 = if t1 == HIGH { r4 } else { r3 };
            escalation_cell(a1, a2, t2 == BAD, r0, r1, r2)
        })
}

/// One-shot two-sided privilege escalation game with uniform priors.
pub fn build_privilege_escalation(r1: f64, r2: f64, r3: f64, r4: f64) -> Result<StaticBayesianGame> {
    require_positive(&[("r1", r1), ("r2", r2), ("r3", r3)])?;
    if r4 <= r3 {
        return Err(GameError::Invalid(vec![format!("r4 > r3 violated: {r4} <= {r3}")]));
    }
    StaticBayesianGame::new(
        defender_types(),
        user_types(),
        vec![0.5, 0.5],
        vec![0.5, 0.5],
        privilege_escalation_stage(["s"], r1, r2, r3, r4),
        Information::Private,
    )
}

/// Parameters of the three-stage APT game. Field suffix `_0` is the initial
/// stage, no suffix the intermediate stage and `_k` the final stage.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AptParameters {
    pub c1_0: f64,
    pub c2_0: f64,
    pub r1_0: f64,
    pub r2_0: f64,
    pub r3_0: f64,
    pub r4_0: f64,
    pub r5_0: f64,
    pub r1: f64,
    pub r2: f64,
    pub r3: f64,
    pub r4: f64,
    pub c_k: f64,
    pub r2_k: f64,
    pub r3_k: f64,
    /// Reward under compromised sensors, per final state.
    pub r1_k: Vec<f64>,
    /// Reward under regular operation, per final state.
    pub r4_k: Vec<f64>,
    /// User's prior over the defender's types (low, high).
    pub prior_about_defender: Vec<f64>,
    /// Defender's prior over the user's types (bad, good).
    pub prior_about_user: Vec<f64>,
    pub initial_state: usize,
    /// Charge `c1_0` instead of the type-dependent fee in the
    /// (bad user, CEO deployment, avatar) cell, as printed in the table.
    pub literal_avatar_cost: bool,
}

impl Default for AptParameters {
    fn default() -> Self {
        default_apt_parameters()
    }
}

/// Configuration defaults. The numbers are placeholders chosen to satisfy
/// every constraint, not calibrated values.
pub fn default_apt_parameters() -> AptParameters {
    AptParameters {
        c1_0: 1.0,
        c2_0: 2.0,
        r1_0: 2.0,
        r2_0: 4.0,
        r3_0: 3.0,
        r4_0: 6.0,
        r5_0: 1.0,
        r1: 2.0,
        r2: 4.0,
        r3: 3.0,
        r4: 6.0,
        c_k: 1.0,
        r2_k: 2.0,
        r3_k: 4.0,
        r1_k: vec![0.0, 1.0, 2.0, 3.0],
        r4_k: vec![2.0, 4.0, 8.0, 12.0],
        prior_about_defender: vec![0.5, 0.5],
        prior_about_user: vec![0.5, 0.5],
        initial_state: 0,
        literal_avatar_cost: false,
    }
}

impl AptParameters {
    /// Every violated inequality, as readable text; empty when valid.
    pub fn validate(&self) -> Vec<String> {
        let mut v = Vec::new();
        let mut check = |ok: bool, msg: String| {
            if !ok {
                v.push(msg);
            }
        };
        let scalars = [
            self.c1_0, self.c2_0, self.r1_0, self.r2_0, self.r3_0, self.r4_0, self.r5_0, self.r1, self.r2,
            self.r3, self.r4, self.c_k, self.r2_k, self.r3_k,
        ];
        check(scalars.iter().all(|x| x.is_finite()), "parameters must be finite".into());
        check(self.r4 > self.r3 && self.r3 > 0.0, format!("r4 > r3 > 0 violated: r4={}, r3={}", self.r4, self.r3));
        check(self.c2_0 > self.c1_0, format!("c2_0 > c1_0 violated: {} <= {}", self.c2_0, self.c1_0));
        check(self.r4_0 > self.r3_0, format!("r4_0 > r3_0 violated: {} <= {}", self.r4_0, self.r3_0));
        check(self.r5_0 > 0.0, format!("r5_0 > 0 violated: {}", self.r5_0));
        check(
            self.r3_k > self.r2_k && self.r2_k > self.c_k && self.c_k > 0.0,
            format!("r3_k > r2_k > c_k > 0 violated: r3_k={}, r2_k={}, c_k={}", self.r3_k, self.r2_k, self.c_k),
        );
        if self.r1_k.len() != 4 || self.r4_k.len() != 4 {
            check(false, "r1_k and r4_k need one entry per final state (4)".into());
        } else {
            for x in 0..4 {
                let d = self.r4_k[x] - self.r1_k[x];
                check(
                    d.is_finite() && d > self.c_k,
                    format!("r4_k({x}) - r1_k({x}) > c_k violated: {d} <= {}", self.c_k),
                );
            }
        }
        for (name, p) in [("prior_about_defender", &self.prior_about_defender), ("prior_about_user", &self.prior_about_user)] {
            let ok = p.len() == 2
                && p.iter().all(|w| w.is_finite() && *w >= 0.0)
                && (p.iter().sum::<f64>() - 1.0).abs() <= 1e-9;
            check(ok, format!("{name} must be a distribution over two types"));
        }
        check(self.initial_state < 2, format!("initial_state {} outside {{0, 1}}", self.initial_state));
        v
    }
}

/// Stage-0 next state. External mail (`x = 0`) is filtered by the sandbox;
/// internal mail (`x = 1`) reaches whoever the user targets.
pub fn apt_transition0(x: usize, a1: usize, a2: usize) -> usize {
    match (x, a1, a2) {
        (0, 1, 1) => 2,
        (0, 1, _) => 0,
        (0, 2, 0) => 1,
        (0, 2, _) => 0,
        (_, _, 0) => 1,
        (_, _, 1) => 2,
        _ => 0,
    }
}

/// Stage-1 next privilege level.
pub fn apt_transition1(x: usize, a1: usize, a2: usize) -> usize {
    match (x, a1, a2) {
        (0, _, _) => 0,
        (1, 0, 1) => 2,
        (1, _, _) => 1,
        (_, 0, 1) => 3,
        _ => 2,
    }
}

fn initial_stage(p: &AptParameters) -> StageGame {
    let mut stage = StageGame::new(
        ["external", "internal"],
        ["None", "Employee", "CEO"],
        ["Employee", "CEO", "Avatar"],
        2,
        2,
    )
    .with_payoffs(|_, a1, a2, t1, t2| {
        let (c0, r0) = if t1 == HIGH { (p.c2_0, p.r4_0) } else { (p.c1_0, p.r3_0) };
        let fee = if a1 == 0 { 0.0 } else { c0 };
        if t2 == GOOD {
            // The avatar column is masked for this type.
            let j2 = if a2 == 2 { 0.0 } else { p.r1_0 };
            return (-fee, j2);
        }
        match (a1, a2) {
            (0, 2) => (0.0, p.r5_0),
            (0, _) => (-p.r2_0, p.r2_0),
            (2, 2) if p.literal_avatar_cost => (-p.c1_0, p.r5_0),
            (_, 2) => (-c0, p.r5_0),
            (1, 0) | (2, 1) => (-c0, -r0),
            _ => (-c0, p.r2_0),
        }
    })
    .with_transition(apt_transition0);
    for x in 0..2 {
        stage.set_feasible(Player::User, x, GOOD, 2, false);
    }
    stage
}

fn final_stage(p: &AptParameters) -> StageGame {
    StageGame::new(
        ["level0", "level1", "level2", "level3"],
        ["NOP", "Monitor"],
        ["NOP", "Access"],
        2,
        2,
    )
    .with_payoffs(|x, a1, a2, t1, t2| {
        let r0 = if t1 == HIGH { p.r3_k } else { p.r2_k };
        let (r1, r4, c) = (p.r1_k[x], p.r4_k[x], p.c_k);
        match (a1, a2, t2 == BAD) {
            (0, 0, _) => (0.0, 0.0),
            (1, 0, _) => (-c, 0.0),
            (0, _, true) => (r1, r4 - r1),
            (_, _, true) => (r0 - c, -r0),
            (0, _, false) => (r4, r4),
            (_, _, false) => (r4 - c, r4),
        }
    })
}

/// The three-stage APT game: phishing entry, privilege escalation, and
/// sensor access.
pub fn build_apt_game(p: &AptParameters) -> Result<MultiStageGame> {
    let violations = p.validate();
    if !violations.is_empty() {
        return Err(GameError::Invalid(violations));
    }
    let middle = privilege_escalation_stage(["honeypot", "employee", "ceo"], p.r1, p.r2, p.r3, p.r4)
        .with_transition(apt_transition1);
    MultiStageGame::new(
        defender_types(),
        user_types(),
        p.prior_about_defender.clone(),
        p.prior_about_user.clone(),
        vec![initial_stage(p), middle, final_stage(p)],
        p.initial_state,
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_validate() {
        assert!(default_apt_parameters().validate().is_empty());
        assert!(build_apt_game(&default_apt_parameters()).is_ok());
    }

    #[test]
    fn violated_inequality_named() {
        let mut p = default_apt_parameters();
        p.r4_k[0] = 0.5;
        let err = build_apt_game(&p).unwrap_err();
        assert!(err.to_string().contains("r4_k(0) - r1_k(0) > c_k"));
    }

    #[test]
    fn partial_json_override() {
        let p: AptParameters = serde_json::from_str(r#"{"c_k": 0.5}"#).unwrap();
        assert_eq!(p.c_k, 0.5);
        assert_eq!(p.r4, 6.0);
        assert!(serde_json::from_str::<AptParameters>(r#"{"ck": 1}"#).is_err());
    }

    #[test]
    fn non_positive_rejected() {
        assert!(build_static_bayesian(0.0, 1.0, 1.0).is_err());
        assert!(build_static_baseline(1.0, -1.0, 1.0, 1.0).is_err());
    }
}
