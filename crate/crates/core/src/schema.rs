//! JSON game description.
//!
//! ```json
//! {
//!   "types": { "defender": ["low", "high"], "user": ["bad", "good"] },
//!   "priors": { "about_defender": [0.5, 0.5], "about_user": [0.5, 0.5] },
//!   "initial_state": "s0",
//!   "horizon": 0,
//!   "stages": [{
//!     "states": ["s0"], "actions1": ["Permit", "Restrict"], "actions2": ["NOP", "Escalate"],
//!     "payoffs1": [[[[[0, 0], [0, 0]], ...]]],
//!     "payoffs2": [[[[[0, 0], [0, 0]], ...]]],
//!     "mask": { "user": [[[true, true], [true, false]]] },
//!     "transition": [[["s0", "s1"], ...]]
//!   }]
//! }
//! ```
//!
//! Payoffs are indexed `[state][a1][a2][θ1][θ2]`; a payoff may be `null`
//! only where one of the actions is masked for that type. `mask` holds per
//! player `[state][own type][action]` flags and defaults to all allowed.
//! `transition[state][a1][a2]` is a state label of the next stage and is
//! omitted on the last stage.

use serde::{Deserialize, Serialize};

use crate::error::{GameError, Result};
use crate::game::{validate_game, MultiStageGame, Player, StageGame, TypeSpace, Violation, ViolationKind};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TypesFile {
    pub defender: Vec<String>,
    pub user: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PriorsFile {
    pub about_defender: Vec<f64>,
    pub about_user: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct MaskFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub defender: Option<Vec<Vec<Vec<bool>>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub user: Option<Vec<Vec<Vec<bool>>>>,
}

type Nested5 = Vec<Vec<Vec<Vec<Vec<Option<f64>>>>>>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StageFile {
    pub states: Vec<String>,
    pub actions1: Vec<String>,
    pub actions2: Vec<String>,
    pub payoffs1: Nested5,
    pub payoffs2: Nested5,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mask: Option<MaskFile>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub transition: Option<Vec<Vec<Vec<String>>>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GameFile {
    pub types: TypesFile,
    pub priors: PriorsFile,
    pub initial_state: String,
    pub horizon: usize,
    pub stages: Vec<StageFile>,
}

fn violation(kind: ViolationKind, detail: String) -> Violation {
    Violation::new(kind, detail)
}

fn shape_ok<T>(v: &[Vec<T>], n: usize, inner: impl Fn(&Vec<T>) -> bool) -> bool {
    v.len() == n && v.iter().all(inner)
}

fn check_payoff_shape(p: &Nested5, dims: [usize; 5]) -> bool {
    let [s, n1, n2, m1, m2] = dims;
    shape_ok(p, s, |a| shape_ok(a, n1, |b| shape_ok(b, n2, |c| shape_ok(c, m1, |d| d.len() == m2))))
}

fn check_mask_shape(mask: &[Vec<Vec<bool>>], s: usize, m: usize, n: usize) -> bool {
    mask.len() == s && mask.iter().all(|x| shape_ok(x, m, |t| t.len() == n))
}

impl GameFile {
    /// Converts to a game, collecting every problem found on the way.
    pub fn to_game(&self) -> std::result::Result<MultiStageGame, Vec<Violation>> {
        use ViolationKind::*;
        let mut out = Vec::new();
        let t1 = TypeSpace::new(self.types.defender.clone());
        let t2 = TypeSpace::new(self.types.user.clone());
        let (t1, t2) = match (t1, t2) {
            (Ok(a), Ok(b)) => (a, b),
            (a, b) => {
                for e in [a.err(), b.err()].into_iter().flatten() {
                    out.push(violation(BadLabel, e.to_string()));
                }
                return Err(out);
            }
        };
        let (m1, m2) = (t1.len(), t2.len());
        if self.stages.is_empty() {
            return Err(vec![violation(NoStages, "a game needs at least one stage".into())]);
        }
        if self.horizon + 1 != self.stages.len() {
            out.push(violation(
                DimensionMismatch,
                format!("horizon {} needs {} stages, found {}", self.horizon, self.horizon + 1, self.stages.len()),
            ));
        }
        let initial = self.stages[0].states.iter().position(|s| *s == self.initial_state);
        if initial.is_none() {
            out.push(violation(BadInitialState, format!("unknown initial state label {:?}", self.initial_state)));
        }

        let mut stages = Vec::with_capacity(self.stages.len());
        for (k, sf) in self.stages.iter().enumerate() {
            for (what, labels) in [("state", &sf.states), ("P1 action", &sf.actions1), ("P2 action", &sf.actions2)] {
                let mut seen = std::collections::HashSet::new();
                if let Some(dup) = labels.iter().find(|l| !seen.insert(*l)) {
                    out.push(violation(BadLabel, format!("stage {k}: duplicate {what} label {dup:?}")));
                }
            }
            let dims = [sf.states.len(), sf.actions1.len(), sf.actions2.len(), m1, m2];
            let mut stage = StageGame::new(sf.states.clone(), sf.actions1.clone(), sf.actions2.clone(), m1, m2);
            let mut mask_ok = true;
            if let Some(mask) = &sf.mask {
                for (p, grid) in [(Player::Defender, &mask.defender), (Player::User, &mask.user)] {
                    let Some(grid) = grid else { continue };
                    let (m, n) = (stage.num_types(p), stage.num_actions(p));
                    if !check_mask_shape(grid, dims[0], m, n) {
                        out.push(violation(DimensionMismatch, format!("stage {k}: {p} mask must be [state][type][action]")));
                        mask_ok = false;
                        continue;
                    }
                    for (x, per_type) in grid.iter().enumerate() {
                        for (t, flags) in per_type.iter().enumerate() {
                            for (a, &ok) in flags.iter().enumerate() {
                                stage.set_feasible(p, x, t, a, ok);
                            }
                        }
                    }
                }
            }
            for (p, tensor) in [(Player::Defender, &sf.payoffs1), (Player::User, &sf.payoffs2)] {
                if !check_payoff_shape(tensor, dims) {
                    out.push(violation(
                        DimensionMismatch,
                        format!("stage {k}: {p} payoffs must have shape {dims:?} ([state][a1][a2][θ1][θ2])"),
                    ));
                    continue;
                }
                for x in 0..dims[0] {
                    for a1 in 0..dims[1] {
                        for a2 in 0..dims[2] {
                            for th1 in 0..m1 {
                                for th2 in 0..m2 {
                                    match tensor[x][a1][a2][th1][th2] {
                                        Some(v) => stage.set_payoff(p, (x, a1, a2, th1, th2), v),
                                        None => {
                                            let masked = mask_ok
                                                && (!stage.is_feasible(Player::Defender, x, th1, a1)
                                                    || !stage.is_feasible(Player::User, x, th2, a2));
                                            if !masked {
                                                out.push(violation(
                                                    NonFinitePayoff,
                                                    format!("stage {k}: {p} payoff at {:?} is null but no action is masked", (x, a1, a2, th1, th2)),
                                                ));
                                            }
                                        }
                                    }
                                }
                            }
                        }
                    }
                }
            }
            match (&sf.transition, self.stages.get(k + 1)) {
                (Some(table), Some(next)) => {
                    if !shape_ok(table, dims[0], |a| shape_ok(a, dims[1], |b| b.len() == dims[2])) {
                        out.push(violation(DimensionMismatch, format!("stage {k}: transition must be [state][a1][a2]")));
                    } else {
                        let mut flat = Vec::with_capacity(dims[0] * dims[1] * dims[2]);
                        for (x, rows) in table.iter().enumerate() {
                            for (a1, row) in rows.iter().enumerate() {
                                for (a2, label) in row.iter().enumerate() {
                                    match next.states.iter().position(|s| s == label) {
                                        Some(i) => flat.push(i),
                                        None => {
                                            out.push(violation(
                                                DanglingTransition,
                                                format!("stage {k}: ({x}, {a1}, {a2}) leads to unknown state {label:?}"),
                                            ));
                                            flat.push(0);
                                        }
                                    }
                                }
                            }
                        }
                        stage = stage.with_raw_transition(Some(flat));
                    }
                }
                (None, Some(_)) => out.push(violation(MissingTransition, format!("stage {k} is not final but has no transition"))),
                (Some(_), None) => out.push(violation(DimensionMismatch, format!("final stage {k} must not have a transition"))),
                (None, None) => {}
            }
            stages.push(stage);
        }
        if !out.is_empty() {
            return Err(out);
        }
        let g = MultiStageGame::new_unchecked(
            t1,
            t2,
            self.priors.about_defender.clone(),
            self.priors.about_user.clone(),
            stages,
            initial.unwrap_or(0),
        );
        let v = validate_game(&g);
        if v.is_empty() {
            Ok(g)
        } else {
            Err(v)
        }
    }

    pub fn from_game(g: &MultiStageGame) -> GameFile {
        let (m1, m2) = (g.num_types(Player::Defender), g.num_types(Player::User));
        let stages = g
            .stages()
            .iter()
            .enumerate()
            .map(|(k, st)| {
                let (n1, n2) = (st.num_actions(Player::Defender), st.num_actions(Player::User));
                let payoff = |p: Player| {
                    (0..st.num_states())
                        .map(|x| {
                            (0..n1)
                                .map(|a1| {
                                    (0..n2)
                                        .map(|a2| {
                                            (0..m1)
                                                .map(|t1| (0..m2).map(|t2| Some(st.payoff(p, x, a1, a2, t1, t2))).collect())
                                                .collect()
                                        })
                                        .collect()
                                })
                                .collect()
                        })
                        .collect()
                };
                let mask = |p: Player| {
                    let grid: Vec<Vec<Vec<bool>>> = (0..st.num_states())
                        .map(|x| {
                            (0..g.num_types(p))
                                .map(|t| (0..st.num_actions(p)).map(|a| st.is_feasible(p, x, t, a)).collect())
                                .collect()
                        })
                        .collect();
                    let all = grid.iter().flatten().flatten().all(|&b| b);
                    (!all).then_some(grid)
                };
                let transition = (k < g.horizon()).then(|| {
                    let next = g.stage(k + 1).states();
                    (0..st.num_states())
                        .map(|x| {
                            (0..n1)
                                .map(|a1| {
                                    (0..n2)
                                        .map(|a2| next[st.transition(x, a1, a2).expect("validated game")].clone())
                                        .collect()
                                })
                                .collect()
                        })
                        .collect()
                });
                let (md, mu) = (mask(Player::Defender), mask(Player::User));
                StageFile {
                    states: st.states().to_vec(),
                    actions1: st.actions(Player::Defender).to_vec(),
                    actions2: st.actions(Player::User).to_vec(),
                    payoffs1: payoff(Player::Defender),
                    payoffs2: payoff(Player::User),
                    mask: (md.is_some() || mu.is_some()).then_some(MaskFile { defender: md, user: mu }),
                    transition,
                }
            })
            .collect();
        GameFile {
            types: TypesFile {
                defender: g.types(Player::Defender).labels().to_vec(),
                user: g.types(Player::User).labels().to_vec(),
            },
            priors: PriorsFile {
                about_defender: g.raw_prior_about(Player::Defender).to_vec(),
                about_user: g.raw_prior_about(Player::User).to_vec(),
            },
            initial_state: g.stage(0).states()[g.initial_state()].clone(),
            horizon: g.horizon(),
            stages,
        }
    }
}

/// Parses and validates a JSON game description.
///
/// Syntax errors are `Malformed`; structural problems are `Invalid` with one
/// entry per violation.
pub fn load_game(json: &str) -> Result<MultiStageGame> {
    let file: GameFile = serde_json::from_str(json).map_err(|e| GameError::Malformed(format!("game JSON: {e}")))?;
    file.to_game()
        .map_err(|v| GameError::Invalid(v.iter().map(|v| v.to_string()).collect()))
}

pub fn game_to_json(g: &MultiStageGame) -> String {
    serde_json::to_string_pretty(&GameFile::from_game(g)).expect("serializable")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenarios::{build_apt_game, default_apt_parameters};

    #[test]
    fn apt_round_trip() {
        let g = build_apt_game(&default_apt_parameters()).unwrap();
        let back = load_game(&game_to_json(&g)).unwrap();
        assert_eq!(back, g);
    }

    #[test]
    fn bad_prior_and_label_reported() {
        let g = build_apt_game(&default_apt_parameters()).unwrap();
        let mut f = GameFile::from_game(&g);
        f.priors.about_user = vec![0.6, 0.6];
        f.stages[0].transition.as_mut().unwrap()[0][0][0] = "nowhere".into();
        let v = f.to_game().unwrap_err();
        assert!(v.iter().any(|v| v.kind == ViolationKind::DanglingTransition));
        f.stages[0].transition.as_mut().unwrap()[0][0][0] = "honeypot".into();
        let v = f.to_game().unwrap_err();
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].kind, ViolationKind::PriorNotNormalized);
    }

    #[test]
    fn null_payoff_needs_mask() {
        let g = build_apt_game(&default_apt_parameters()).unwrap();
        let mut f = GameFile::from_game(&g);
        // avatar column for the good user is masked
        f.stages[0].payoffs2[0][0][2][0][1] = None;
        assert!(f.to_game().is_ok());
        f.stages[0].payoffs2[0][0][0][0][1] = None;
        assert!(f.to_game().is_err());
    }
}
