//! Markov behavioral strategies and value functions of a multistage game.

use serde::{Deserialize, Serialize};

use crate::distribution::FiniteDistribution;
use crate::error::{GameError, Result};
use crate::game::{MultiStageGame, Player};

/// `σ̃ᵢᵏ(· | x, θᵢ)` for both players, indexed `[stage][state][own type]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StrategyProfile {
    pub defender: Vec<Vec<Vec<FiniteDistribution>>>,
    pub user: Vec<Vec<Vec<FiniteDistribution>>>,
}

impl StrategyProfile {
    /// Uniform over the feasible actions everywhere.
    pub fn uniform(g: &MultiStageGame) -> Self {
        let build = |p: Player| {
            g.stages()
                .iter()
                .map(|stage| {
                    (0..stage.num_states())
                        .map(|x| {
                            (0..g.num_types(p))
                                .map(|t| {
                                    FiniteDistribution::uniform_over(
                                        stage.num_actions(p),
                                        &stage.feasible_actions(p, x, t),
                                    )
                                })
                                .collect()
                        })
                        .collect()
                })
                .collect()
        };
        StrategyProfile {
            defender: build(Player::Defender),
            user: build(Player::User),
        }
    }

    pub fn of(&self, player: Player) -> &Vec<Vec<Vec<FiniteDistribution>>> {
        match player {
            Player::Defender => &self.defender,
            Player::User => &self.user,
        }
    }

    pub fn of_mut(&mut self, player: Player) -> &mut Vec<Vec<Vec<FiniteDistribution>>> {
        match player {
            Player::Defender => &mut self.defender,
            Player::User => &mut self.user,
        }
    }

    #[inline]
    pub fn get(&self, player: Player, k: usize, x: usize, ty: usize) -> &FiniteDistribution {
        &self.of(player)[k][x][ty]
    }

    /// Per-type strategies of both players at `(k, x)`.
    pub fn at(&self, k: usize, x: usize) -> (&[FiniteDistribution], &[FiniteDistribution]) {
        (&self.defender[k][x], &self.user[k][x])
    }

    /// Checks dimensions against `g` and that masked actions carry no mass.
    pub fn check(&self, g: &MultiStageGame) -> Result<()> {
        let mut problems = Vec::new();
        for p in Player::BOTH {
            let s = self.of(p);
            if s.len() != g.stages().len() {
                problems.push(format!("{p} strategy covers {} stages, game has {}", s.len(), g.stages().len()));
                continue;
            }
            for (k, stage) in g.stages().iter().enumerate() {
                if s[k].len() != stage.num_states() {
                    problems.push(format!("{p} stage {k}: {} states, expected {}", s[k].len(), stage.num_states()));
                    continue;
                }
                for x in 0..stage.num_states() {
                    if s[k][x].len() != g.num_types(p) {
                        problems.push(format!("{p} stage {k} state {x}: wrong number of types"));
                        continue;
                    }
                    for (t, d) in s[k][x].iter().enumerate() {
                        if d.len() != stage.num_actions(p) {
                            problems.push(format!("{p} stage {k} state {x} type {t}: wrong number of actions"));
                            continue;
                        }
                        for a in d.support(0.0) {
                            if !stage.is_feasible(p, x, t, a) {
                                problems.push(format!(
                                    "{p} stage {k} state {x} type {t}: mass {} on masked action {a}",
                                    d.get(a)
                                ));
                            }
                        }
                    }
                }
            }
        }
        if problems.is_empty() {
            Ok(())
        } else {
            Err(GameError::Invalid(problems))
        }
    }

    /// Sup-norm distance over every strategy entry; `None` if shapes differ.
    pub fn distance(&self, other: &StrategyProfile) -> Option<f64> {
        let mut worst: f64 = 0.0;
        for p in Player::BOTH {
            let (a, b) = (self.of(p), other.of(p));
            if a.len() != b.len() {
                return None;
            }
            for (sa, sb) in a.iter().zip(b) {
                if sa.len() != sb.len() {
                    return None;
                }
                for (xa, xb) in sa.iter().zip(sb) {
                    if xa.len() != xb.len() {
                        return None;
                    }
                    for (da, db) in xa.iter().zip(xb) {
                        worst = worst.max(da.sup_distance(db));
                    }
                }
            }
        }
        Some(worst)
    }
}

/// `Ṽᵢᵏ(x, θᵢ)` for both players, indexed `[stage][state][own type]`.
/// Stage `K + 1` is implicit and identically zero.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValueFunction {
    pub defender: Vec<Vec<Vec<f64>>>,
    pub user: Vec<Vec<Vec<f64>>>,
}

impl ValueFunction {
    pub fn zeros(g: &MultiStageGame) -> Self {
        let build = |p: Player| {
            g.stages()
                .iter()
                .map(|stage| vec![vec![0.0; g.num_types(p)]; stage.num_states()])
                .collect()
        };
        ValueFunction {
            defender: build(Player::Defender),
            user: build(Player::User),
        }
    }

    pub fn of(&self, player: Player) -> &Vec<Vec<Vec<f64>>> {
        match player {
            Player::Defender => &self.defender,
            Player::User => &self.user,
        }
    }

    /// Value at `(k, x, θ)`; zero beyond the horizon.
    pub fn get(&self, player: Player, k: usize, x: usize, ty: usize) -> f64 {
        self.of(player).get(k).map_or(0.0, |s| s[x][ty])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::{StageGame, TypeSpace};

    fn game() -> MultiStageGame {
        let s0 = StageGame::new(["s"], ["A", "B"], ["a", "b", "c"], 1, 2)
            .forbid(Player::User, 0, 1, 2)
            .with_transition(|_, a1, _| a1);
        let s1 = StageGame::new(["u", "v"], ["A"], ["a"], 1, 2);
        MultiStageGame::new(
            TypeSpace::singleton(),
            TypeSpace::new(["b", "g"]).unwrap(),
            vec![1.0],
            vec![0.5, 0.5],
            vec![s0, s1],
            0,
        )
        .unwrap()
    }

    #[test]
    fn uniform_respects_mask() {
        let g = game();
        let p = StrategyProfile::uniform(&g);
        assert!(p.check(&g).is_ok());
        assert_eq!(p.get(Player::User, 0, 0, 1).weights(), &[0.5, 0.5, 0.0]);
        assert_eq!(p.distance(&p), Some(0.0));
    }

    #[test]
    fn mass_on_masked_action_rejected() {
        let g = game();
        let mut p = StrategyProfile::uniform(&g);
        p.user[0][0][1] = FiniteDistribution::point(3, 2);
        assert!(p.check(&g).is_err());
    }

    #[test]
    fn values_vanish_past_horizon() {
        let g = game();
        let v = ValueFunction::zeros(&g);
        assert_eq!(v.get(Player::User, 2, 0, 0), 0.0);
    }
}
