//! Equilibria of one-shot games: Nash equilibria of bimatrix games and
//! Bayesian Nash equilibria of static Bayesian games via the agent form.

pub mod agent_form;

use serde::{Deserialize, Serialize};

use crate::distribution::FiniteDistribution;
use crate::error::{GameError, Result};
use crate::game::{expected_stage_payoff, MultiStageGame, OwnType, Player, StageGame, TypeSpace};

pub use agent_form::{AgentForm, AgentProfile, EnumerationStats};

/// Ties within this margin count as best responses.
pub const BR_TOL: f64 = 1e-9;
/// Maximum deviation gap for anything reported as an equilibrium.
pub const EQ_GAP_TOL: f64 = 1e-8;
/// Largest action count accepted by [`mixed_ne`].
pub const MAX_BIMATRIX_ACTIONS: usize = 8;

/// A two-player normal-form game; the defender picks rows, the user columns.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BimatrixGame {
    j1: Vec<Vec<f64>>,
    j2: Vec<Vec<f64>>,
}

impl BimatrixGame {
    pub fn new(j1: Vec<Vec<f64>>, j2: Vec<Vec<f64>>) -> Result<Self> {
        let rows = j1.len();
        if rows == 0 || j2.len() != rows {
            return Err(GameError::malformed("payoff matrices must have the same non-zero row count"));
        }
        let cols = j1[0].len();
        if cols == 0
            || j1.iter().chain(&j2).any(|r| r.len() != cols)
        {
            return Err(GameError::malformed("payoff matrices must be rectangular with equal shapes"));
        }
        if j1.iter().chain(&j2).flatten().any(|v| !v.is_finite()) {
            return Err(GameError::malformed("payoffs must be finite"));
        }
        Ok(BimatrixGame { j1, j2 })
    }

    /// Complete-information game of `stage` in state `x` for a fixed type pair.
    pub fn from_stage(stage: &StageGame, x: usize, t1: usize, t2: usize) -> Self {
        let n1 = stage.num_actions(Player::Defender);
        let n2 = stage.num_actions(Player::User);
        let build = |p| {
            (0..n1)
                .map(|a1| (0..n2).map(|a2| stage.payoff(p, x, a1, a2, t1, t2)).collect())
                .collect()
        };
        BimatrixGame {
            j1: build(Player::Defender),
            j2: build(Player::User),
        }
    }

    pub fn rows(&self) -> usize {
        self.j1.len()
    }

    pub fn cols(&self) -> usize {
        self.j1[0].len()
    }

    pub fn matrix(&self, player: Player) -> &[Vec<f64>] {
        match player {
            Player::Defender => &self.j1,
            Player::User => &self.j2,
        }
    }

    pub fn payoff(&self, player: Player, a1: usize, a2: usize) -> f64 {
        self.matrix(player)[a1][a2]
    }

    /// Expected payoffs `(J1, J2)` under mixed strategies.
    pub fn value(&self, s1: &FiniteDistribution, s2: &FiniteDistribution) -> [f64; 2] {
        let mut v = [0.0; 2];
        for a1 in 0..self.rows() {
            for a2 in 0..self.cols() {
                let p = s1.get(a1) * s2.get(a2);
                v[0] += p * self.j1[a1][a2];
                v[1] += p * self.j2[a1][a2];
            }
        }
        v
    }

    /// Largest gain either player obtains from a pure deviation.
    pub fn gap(&self, s1: &FiniteDistribution, s2: &FiniteDistribution) -> f64 {
        let v = self.value(s1, s2);
        let best1 = action_values(&self.j1, s2, Player::Defender)
            .into_iter()
            .fold(f64::NEG_INFINITY, f64::max);
        let best2 = action_values(&self.j2, s1, Player::User)
            .into_iter()
            .fold(f64::NEG_INFINITY, f64::max);
        (best1 - v[0]).max(best2 - v[1]).max(0.0)
    }

    fn agent_form(&self) -> AgentForm {
        AgentForm::new(
            vec![(0..self.rows()).collect()],
            vec![(0..self.cols()).collect()],
            self.rows(),
            self.cols(),
            |_, a1, _, a2| self.j1[a1][a2],
            |_, a2, _, a1| self.j2[a1][a2],
        )
    }
}

fn action_values(j: &[Vec<f64>], opponent: &FiniteDistribution, player: Player) -> Vec<f64> {
    match player {
        Player::Defender => j.iter().map(|row| opponent.expectation(row)).collect(),
        Player::User => (0..j[0].len())
            .map(|a2| (0..j.len()).map(|a1| opponent.get(a1) * j[a1][a2]).sum())
            .collect(),
    }
}

/// Pure actions of `player` maximizing expected payoff in `j` (the player's
/// own matrix, rows = defender actions) against `opponent`, ties within 1e-9.
pub fn best_response_set(j: &[Vec<f64>], opponent: &FiniteDistribution, player: Player) -> Vec<usize> {
    let values = action_values(j, opponent, player);
    argmax_set(&values, BR_TOL)
}

pub(crate) fn argmax_set(values: &[f64], tol: f64) -> Vec<usize> {
    let best = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    (0..values.len()).filter(|&i| values[i] >= best - tol).collect()
}

/// Every pure action pair from which neither player gains by a pure deviation.
pub fn pure_ne(g: &BimatrixGame) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for a1 in 0..g.rows() {
        for a2 in 0..g.cols() {
            let col_best = (0..g.rows()).map(|b| g.j1[b][a2]).fold(f64::NEG_INFINITY, f64::max);
            let row_best = g.j2[a1].iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            if g.j1[a1][a2] >= col_best - BR_TOL && g.j2[a1][a2] >= row_best - BR_TOL {
                out.push((a1, a2));
            }
        }
    }
    out
}

/// Per-type strategies, values and deviation gap of an equilibrium.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EquilibriumResult {
    /// One strategy per defender type.
    pub defender: Vec<FiniteDistribution>,
    /// One strategy per user type.
    pub user: Vec<FiniteDistribution>,
    /// Expected payoff of each defender type, averaged over the user's types.
    pub defender_values: Vec<f64>,
    pub user_values: Vec<f64>,
    /// Ex-ante expected payoffs of both players.
    pub ex_ante: [f64; 2],
    pub gap: f64,
}

/// All Nash equilibria found by support enumeration, in lexicographic
/// support order. Pure equilibria appear as singleton supports.
pub fn mixed_ne(g: &BimatrixGame) -> Result<Vec<EquilibriumResult>> {
    if g.rows() > MAX_BIMATRIX_ACTIONS || g.cols() > MAX_BIMATRIX_ACTIONS {
        return Err(GameError::TooLarge(format!(
            "{}x{} game exceeds the {MAX_BIMATRIX_ACTIONS}x{MAX_BIMATRIX_ACTIONS} support enumeration budget",
            g.rows(),
            g.cols()
        )));
    }
    let (found, _) = g.agent_form().enumerate(EQ_GAP_TOL)?;
    Ok(found
        .into_iter()
        .map(|p| {
            let v = g.value(&p.defender[0], &p.user[0]);
            let gap = g.gap(&p.defender[0], &p.user[0]);
            EquilibriumResult {
                defender: p.defender,
                user: p.user,
                defender_values: vec![v[0]],
                user_values: vec![v[1]],
                ex_ante: v,
                gap,
            }
        })
        .collect())
}

/// Who observes the types in a static Bayesian game.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Information {
    /// Each player knows its own type; beliefs about the opponent are the priors.
    Private,
    /// Nobody observes any type; both play the prior-averaged game.
    Uninformed,
}

/// A one-shot game with private types, represented as one state of a stage game.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StaticBayesianGame {
    types: [TypeSpace; 2],
    prior_about_defender: FiniteDistribution,
    prior_about_user: FiniteDistribution,
    stage: StageGame,
    state: usize,
    information: Information,
}

impl StaticBayesianGame {
    pub fn new(
        types1: TypeSpace,
        types2: TypeSpace,
        prior_about_defender: Vec<f64>,
        prior_about_user: Vec<f64>,
        stage: StageGame,
        information: Information,
    ) -> Result<Self> {
        if prior_about_defender.len() != types1.len() || prior_about_user.len() != types2.len() {
            return Err(GameError::malformed("prior length does not match the type space"));
        }
        if stage.num_types(Player::Defender) != types1.len()
            || stage.num_types(Player::User) != types2.len()
        {
            return Err(GameError::malformed("payoff tensor type dimensions do not match the type spaces"));
        }
        if stage.num_states() != 1 {
            return Err(GameError::malformed("a static game has exactly one state"));
        }
        let game = StaticBayesianGame {
            types: [types1, types2],
            prior_about_defender: FiniteDistribution::new(prior_about_defender)?,
            prior_about_user: FiniteDistribution::new(prior_about_user)?,
            stage: stage.with_raw_transition(None),
            state: 0,
            information,
        };
        game.to_multistage().ensure_valid()?;
        Ok(game)
    }

    /// The single-stage game of a `K = 0` multistage game at its initial state.
    pub fn from_multistage(g: &MultiStageGame, information: Information) -> Result<Self> {
        g.ensure_valid()?;
        if g.horizon() != 0 {
            return Err(GameError::malformed("only a single-stage game is static"));
        }
        Ok(StaticBayesianGame {
            types: [g.types(Player::Defender).clone(), g.types(Player::User).clone()],
            prior_about_defender: g.prior_about(Player::Defender),
            prior_about_user: g.prior_about(Player::User),
            stage: g.stage(0).clone(),
            state: g.initial_state(),
            information,
        })
    }

    pub fn to_multistage(&self) -> MultiStageGame {
        MultiStageGame::new_unchecked(
            self.types[0].clone(),
            self.types[1].clone(),
            self.prior_about_defender.weights().to_vec(),
            self.prior_about_user.weights().to_vec(),
            vec![self.stage.clone()],
            self.state,
        )
    }

    pub fn with_information(mut self, information: Information) -> Self {
        self.information = information;
        self
    }

    pub fn information(&self) -> Information {
        self.information
    }

    pub fn types(&self, player: Player) -> &TypeSpace {
        &self.types[player.index()]
    }

    pub fn prior_about(&self, subject: Player) -> &FiniteDistribution {
        match subject {
            Player::Defender => &self.prior_about_defender,
            Player::User => &self.prior_about_user,
        }
    }

    pub fn stage(&self) -> &StageGame {
        &self.stage
    }

    pub fn state(&self) -> usize {
        self.state
    }

    pub fn payoff(&self, player: Player, a1: usize, a2: usize, t1: usize, t2: usize) -> f64 {
        self.stage.payoff(player, self.state, a1, a2, t1, t2)
    }

    /// Complete-information game for one type pair.
    pub fn complete_information(&self, t1: usize, t2: usize) -> BimatrixGame {
        BimatrixGame::from_stage(&self.stage, self.state, t1, t2)
    }

    /// Payoffs averaged over both priors.
    pub fn prior_averaged(&self) -> BimatrixGame {
        let n1 = self.stage.num_actions(Player::Defender);
        let n2 = self.stage.num_actions(Player::User);
        let avg = |p| {
            (0..n1)
                .map(|a1| {
                    (0..n2)
                        .map(|a2| {
                            let mut v = 0.0;
                            for (t1, w1) in self.prior_about_defender.iter().enumerate() {
                                for (t2, w2) in self.prior_about_user.iter().enumerate() {
                                    v += w1 * w2 * self.payoff(p, a1, a2, t1, t2);
                                }
                            }
                            v
                        })
                        .collect()
                })
                .collect()
        };
        BimatrixGame {
            j1: avg(Player::Defender),
            j2: avg(Player::User),
        }
    }

    fn feasible(&self, player: Player, ty: usize) -> Vec<usize> {
        self.stage.feasible_actions(player, self.state, ty)
    }

    /// Actions feasible for every type of `player`.
    fn common_feasible(&self, player: Player) -> Vec<usize> {
        let n = self.types[player.index()].len();
        (0..self.stage.num_actions(player))
            .filter(|&a| (0..n).all(|t| self.stage.is_feasible(player, self.state, t, a)))
            .collect()
    }

    /// Agent form restricted to the given defender and user types.
    fn agent_form_over(&self, types1: &[usize], types2: &[usize]) -> AgentForm {
        let pd = &self.prior_about_defender;
        let pu = &self.prior_about_user;
        AgentForm::new(
            types1.iter().map(|&t| self.feasible(Player::Defender, t)).collect(),
            types2.iter().map(|&t| self.feasible(Player::User, t)).collect(),
            self.stage.num_actions(Player::Defender),
            self.stage.num_actions(Player::User),
            |i1, a1, i2, a2| {
                let (t1, t2) = (types1[i1], types2[i2]);
                pu.get(t2) * self.payoff(Player::Defender, a1, a2, t1, t2)
            },
            |i2, a2, i1, a1| {
                let (t1, t2) = (types1[i1], types2[i2]);
                pd.get(t1) * self.payoff(Player::User, a1, a2, t1, t2)
            },
        )
    }

    /// The full agent form: each `(player, type)` is one agent whose payoff
    /// is its conditional expectation over the opponent's types.
    pub fn agent_form(&self) -> AgentForm {
        let t1: Vec<usize> = (0..self.types[0].len()).collect();
        let t2: Vec<usize> = (0..self.types[1].len()).collect();
        self.agent_form_over(&t1, &t2)
    }

    /// Per-type deviation gaps of a profile, for the game's information structure.
    pub fn agent_gaps(
        &self,
        defender: &[FiniteDistribution],
        user: &[FiniteDistribution],
    ) -> Result<(Vec<f64>, Vec<f64>)> {
        self.check_profile(defender, user)?;
        match self.information {
            Information::Private => Ok(self.agent_form().gaps(defender, user)),
            Information::Uninformed => {
                let avg = self.prior_averaged();
                let s1 = mixture(defender, &self.prior_about_defender);
                let s2 = mixture(user, &self.prior_about_user);
                let v = avg.value(&s1, &s2);
                let f1 = self.common_feasible(Player::Defender);
                let f2 = self.common_feasible(Player::User);
                let vals1 = action_values(&avg.j1, &s2, Player::Defender);
                let vals2 = action_values(&avg.j2, &s1, Player::User);
                let b1 = f1.iter().map(|&a| vals1[a]).fold(f64::NEG_INFINITY, f64::max);
                let b2 = f2.iter().map(|&a| vals2[a]).fold(f64::NEG_INFINITY, f64::max);
                Ok((
                    vec![(b1 - v[0]).max(0.0); defender.len()],
                    vec![(b2 - v[1]).max(0.0); user.len()],
                ))
            }
        }
    }

    fn check_profile(&self, defender: &[FiniteDistribution], user: &[FiniteDistribution]) -> Result<()> {
        if defender.len() != self.types[0].len() || user.len() != self.types[1].len() {
            return Err(GameError::malformed("one strategy per type is required"));
        }
        let n1 = self.stage.num_actions(Player::Defender);
        let n2 = self.stage.num_actions(Player::User);
        if defender.iter().any(|s| s.len() != n1) || user.iter().any(|s| s.len() != n2) {
            return Err(GameError::malformed("strategy length does not match the action set"));
        }
        Ok(())
    }

    /// Values and gap of a profile packaged as an [`EquilibriumResult`].
    pub fn evaluate(
        &self,
        defender: Vec<FiniteDistribution>,
        user: Vec<FiniteDistribution>,
    ) -> Result<EquilibriumResult> {
        let (g1, g2) = self.agent_gaps(&defender, &user)?;
        let gap = g1.iter().chain(&g2).cloned().fold(0.0, f64::max);
        let value = |p, t| {
            expected_stage_payoff(
                &self.stage,
                self.state,
                &defender,
                &user,
                &self.prior_about_defender,
                &self.prior_about_user,
                p,
                OwnType::Fixed(t),
            )
        };
        let defender_values = (0..defender.len())
            .map(|t| value(Player::Defender, t))
            .collect::<Result<Vec<_>>>()?;
        let user_values = (0..user.len())
            .map(|t| value(Player::User, t))
            .collect::<Result<Vec<_>>>()?;
        let ex_ante = [
            self.prior_about_defender.expectation(&defender_values),
            self.prior_about_user.expectation(&user_values),
        ];
        Ok(EquilibriumResult {
            defender,
            user,
            defender_values,
            user_values,
            ex_ante,
            gap,
        })
    }
}

fn mixture(strategies: &[FiniteDistribution], weights: &FiniteDistribution) -> FiniteDistribution {
    let n = strategies[0].len();
    let mixed: Vec<f64> = (0..n)
        .map(|a| strategies.iter().zip(weights.iter()).map(|(s, w)| w * s.get(a)).sum())
        .collect();
    FiniteDistribution::cleaned(&mixed, 1e-9).unwrap_or_else(|_| FiniteDistribution::uniform(n))
}

/// Bayesian Nash equilibria by agent-form support enumeration, in
/// lexicographic support order.
///
/// Types with zero prior weight do not influence the opponent; they are
/// left out of the enumeration and then assigned a pure best response.
pub fn solve_bne(g: &StaticBayesianGame) -> Result<Vec<EquilibriumResult>> {
    match g.information {
        Information::Uninformed => solve_uninformed(g),
        Information::Private => solve_private(g),
    }
}

fn solve_uninformed(g: &StaticBayesianGame) -> Result<Vec<EquilibriumResult>> {
    let avg = g.prior_averaged();
    let f1 = g.common_feasible(Player::Defender);
    let f2 = g.common_feasible(Player::User);
    if f1.is_empty() || f2.is_empty() {
        return Err(GameError::malformed(
            "uninformed play needs an action feasible for every type",
        ));
    }
    let form = AgentForm::new(
        vec![f1],
        vec![f2],
        avg.rows(),
        avg.cols(),
        |_, a1, _, a2| avg.j1[a1][a2],
        |_, a2, _, a1| avg.j2[a1][a2],
    );
    let (found, _) = form.enumerate(EQ_GAP_TOL)?;
    let m1 = g.types[0].len();
    let m2 = g.types[1].len();
    found
        .into_iter()
        .map(|p| g.evaluate(vec![p.defender[0].clone(); m1], vec![p.user[0].clone(); m2]))
        .collect()
}

fn solve_private(g: &StaticBayesianGame) -> Result<Vec<EquilibriumResult>> {
    let live1: Vec<usize> = (0..g.types[0].len())
        .filter(|&t| g.prior_about_defender.get(t) > 0.0)
        .collect();
    let live2: Vec<usize> = (0..g.types[1].len())
        .filter(|&t| g.prior_about_user.get(t) > 0.0)
        .collect();
    let form = g.agent_form_over(&live1, &live2);
    let (found, _) = form.enumerate(EQ_GAP_TOL)?;
    let full = g.agent_form();
    let n1 = g.stage.num_actions(Player::Defender);
    let n2 = g.stage.num_actions(Player::User);

    let mut out = Vec::with_capacity(found.len());
    for p in found {
        let mut defender = vec![FiniteDistribution::point(n1, 0); g.types[0].len()];
        let mut user = vec![FiniteDistribution::point(n2, 0); g.types[1].len()];
        for (i, &t) in live1.iter().enumerate() {
            defender[t] = p.defender[i].clone();
        }
        for (i, &t) in live2.iter().enumerate() {
            user[t] = p.user[i].clone();
        }
        // Dead types best-respond to the live part of the profile, which they cannot influence.
        for t in (0..defender.len()).filter(|t| !live1.contains(t)) {
            let vals = full.action_values1(t, &user);
            defender[t] = FiniteDistribution::point(n1, best_feasible(&vals, &full.feasible1[t]));
        }
        for t in (0..user.len()).filter(|t| !live2.contains(t)) {
            let vals = full.action_values2(t, &defender);
            user[t] = FiniteDistribution::point(n2, best_feasible(&vals, &full.feasible2[t]));
        }
        let result = g.evaluate(defender, user)?;
        if result.gap <= EQ_GAP_TOL {
            out.push(result);
        }
    }
    Ok(out)
}

/// Lowest-index feasible maximizer.
pub(crate) fn best_feasible(values: &[f64], feasible: &[usize]) -> usize {
    let best = feasible.iter().map(|&a| values[a]).fold(f64::NEG_INFINITY, f64::max);
    *feasible
        .iter()
        .find(|&&a| values[a] >= best - BR_TOL)
        .expect("feasible action set is non-empty")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table6(t: usize) -> BimatrixGame {
        let (j1, j2) = if t == 0 {
            (vec![vec![10.0, 18.0], vec![7.0, 17.0]], vec![vec![10.0, 4.0], vec![19.0, 17.0]])
        } else {
            (vec![vec![10.0, 18.0], vec![14.0, 20.0]], vec![vec![10.0, 18.0], vec![18.0, 20.0]])
        };
        BimatrixGame::new(j1, j2).unwrap()
    }

    fn exercise(information: Information) -> StaticBayesianGame {
        let m = [table6(0), table6(1)];
        let stage = StageGame::new(["s"], ["A", "B"], ["a", "b"], 2, 1).with_payoffs(|_, a1, a2, t1, _| {
            (m[t1].payoff(Player::Defender, a1, a2), m[t1].payoff(Player::User, a1, a2))
        });
        StaticBayesianGame::new(
            TypeSpace::new(["theta1", "theta2"]).unwrap(),
            TypeSpace::singleton(),
            vec![0.5, 0.5],
            vec![1.0],
            stage,
            information,
        )
        .unwrap()
    }

    #[test]
    fn pure_ne_of_exercise_matrices() {
        assert_eq!(pure_ne(&table6(0)), vec![(0, 0)]);
        assert_eq!(pure_ne(&table6(1)), vec![(1, 1)]);
    }

    #[test]
    fn best_response_ties_reported() {
        let j1 = vec![vec![0.0, -1.0], vec![0.0, 1.0]];
        assert_eq!(
            best_response_set(&j1, &FiniteDistribution::point(2, 1), Player::Defender),
            vec![1]
        );
        assert_eq!(
            best_response_set(&j1, &FiniteDistribution::point(2, 0), Player::Defender),
            vec![0, 1]
        );
        let zero = vec![vec![0.0; 3]; 2];
        assert_eq!(
            best_response_set(&zero, &FiniteDistribution::uniform(2), Player::User),
            vec![0, 1, 2]
        );
    }

    #[test]
    fn matching_pennies() {
        let g = BimatrixGame::new(
            vec![vec![1.0, -1.0], vec![-1.0, 1.0]],
            vec![vec![-1.0, 1.0], vec![1.0, -1.0]],
        )
        .unwrap();
        let eqs = mixed_ne(&g).unwrap();
        assert_eq!(eqs.len(), 1);
        assert!((eqs[0].defender[0].get(0) - 0.5).abs() < 1e-12);
        assert!(eqs[0].ex_ante[0].abs() < 1e-12);
    }

    #[test]
    fn mixed_ne_budget() {
        let g = BimatrixGame::new(vec![vec![0.0; 2]; 9], vec![vec![0.0; 2]; 9]).unwrap();
        assert!(matches!(mixed_ne(&g), Err(GameError::TooLarge(_))));
    }

    #[test]
    fn uninformed_exercise_contains_bb() {
        let eqs = solve_bne(&exercise(Information::Uninformed)).unwrap();
        let bb = eqs
            .iter()
            .find(|e| e.defender[0].get(1) == 1.0 && e.user[0].get(1) == 1.0)
            .expect("(B,b) present");
        assert!((bb.ex_ante[0] - 18.5).abs() < 1e-9);
        assert!((bb.ex_ante[1] - 18.5).abs() < 1e-9);
    }

    #[test]
    fn informed_defender_exercise() {
        let eqs = solve_bne(&exercise(Information::Private)).unwrap();
        assert_eq!(eqs.len(), 1);
        let e = &eqs[0];
        assert_eq!(e.defender[0].get(0), 1.0);
        assert_eq!(e.defender[1].get(1), 1.0);
        assert_eq!(e.user[0].get(0), 1.0);
        assert!((e.ex_ante[0] - 12.0).abs() < 1e-9);
    }

    #[test]
    fn zero_prior_type_gets_best_response() {
        let g = exercise(Information::Private);
        let g = StaticBayesianGame::new(
            g.types(Player::Defender).clone(),
            TypeSpace::singleton(),
            vec![1.0, 0.0],
            vec![1.0],
            g.stage().clone(),
            Information::Private,
        )
        .unwrap();
        let eqs = solve_bne(&g).unwrap();
        assert!(!eqs.is_empty());
        for e in &eqs {
            assert!(e.gap <= EQ_GAP_TOL);
            assert_eq!(e.defender[1].is_pure(0.0), Some(1));
        }
    }
}
