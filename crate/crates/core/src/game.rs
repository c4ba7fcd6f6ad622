//! Game model shared by every solver: type spaces, stage games with
//! type-dependent payoff tensors and deterministic transitions, and the
//! finite-horizon multistage game that chains them.
//!
//! States, actions and types are plain indices inside the library; string
//! labels exist for reporting and for the JSON boundary (see
//! [`crate::schema`]).

use std::collections::HashSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::distribution::FiniteDistribution;
use crate::error::{GameError, Result};

/// The two players. The defender is `P1`, the user (possibly an attacker) is `P2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Player {
    Defender,
    User,
}

impl Player {
    pub const BOTH: [Player; 2] = [Player::Defender, Player::User];

    pub fn index(self) -> usize {
        match self {
            Player::Defender => 0,
            Player::User => 1,
        }
    }

    pub fn opponent(self) -> Player {
        match self {
            Player::Defender => Player::User,
            Player::User => Player::Defender,
        }
    }
}

impl fmt::Display for Player {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Player::Defender => write!(f, "P1"),
            Player::User => write!(f, "P2"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TypeSpace {
    labels: Vec<String>,
}

impl TypeSpace {
    pub fn new<S: Into<String>>(labels: impl IntoIterator<Item = S>) -> Result<Self> {
        let labels: Vec<String> = labels.into_iter().map(Into::into).collect();
        if labels.is_empty() {
            return Err(GameError::malformed("type space must be non-empty"));
        }
        let unique: HashSet<&String> = labels.iter().collect();
        if unique.len() != labels.len() {
            return Err(GameError::malformed(format!("duplicate type labels in {labels:?}")));
        }
        Ok(TypeSpace { labels })
    }

    /// A single anonymous type, for players without private information.
    pub fn singleton() -> Self {
        TypeSpace {
            labels: vec!["-".into()],
        }
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }
}

/// Dense payoff tensor for one player indexed by
/// `(state, defender action, user action, defender type, user type)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PayoffTensor {
    dims: [usize; 5],
    values: Vec<f64>,
}

impl PayoffTensor {
    pub fn zeros(dims: [usize; 5]) -> Self {
        PayoffTensor {
            dims,
            values: vec![0.0; dims.iter().product()],
        }
    }

    pub fn dims(&self) -> [usize; 5] {
        self.dims
    }

    #[inline]
    fn offset(&self, x: usize, a1: usize, a2: usize, t1: usize, t2: usize) -> usize {
        let [_, n1, n2, m1, m2] = self.dims;
        (((x * n1 + a1) * n2 + a2) * m1 + t1) * m2 + t2
    }

    #[inline]
    pub fn get(&self, x: usize, a1: usize, a2: usize, t1: usize, t2: usize) -> f64 {
        self.values[self.offset(x, a1, a2, t1, t2)]
    }

    pub fn set(&mut self, x: usize, a1: usize, a2: usize, t1: usize, t2: usize, v: f64) {
        let i = self.offset(x, a1, a2, t1, t2);
        self.values[i] = v;
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

/// One stage of a multistage game.
///
/// The transition is absent on the final stage: play ends there.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StageGame {
    states: Vec<String>,
    actions: [Vec<String>; 2],
    num_types: [usize; 2],
    payoffs: [PayoffTensor; 2],
    /// `mask[p][(x * types_p + t) * actions_p + a]`: whether the action is allowed.
    mask: [Vec<bool>; 2],
    transition: Option<Vec<usize>>,
}

impl StageGame {
    /// A stage with all-zero payoffs, every action feasible and no transition.
    pub fn new<S: Into<String>>(
        states: impl IntoIterator<Item = S>,
        actions1: impl IntoIterator<Item = S>,
        actions2: impl IntoIterator<Item = S>,
        num_types1: usize,
        num_types2: usize,
    ) -> Self {
        let states: Vec<String> = states.into_iter().map(Into::into).collect();
        let actions1: Vec<String> = actions1.into_iter().map(Into::into).collect();
        let actions2: Vec<String> = actions2.into_iter().map(Into::into).collect();
        let dims = [
            states.len(),
            actions1.len(),
            actions2.len(),
            num_types1,
            num_types2,
        ];
        let mask = [
            vec![true; states.len() * num_types1 * actions1.len()],
            vec![true; states.len() * num_types2 * actions2.len()],
        ];
        StageGame {
            states,
            actions: [actions1, actions2],
            num_types: [num_types1, num_types2],
            payoffs: [PayoffTensor::zeros(dims), PayoffTensor::zeros(dims)],
            mask,
            transition: None,
        }
    }

    /// Fills both payoff tensors from `f(x, a1, a2, t1, t2) -> (J1, J2)`.
    pub fn with_payoffs(
        mut self,
        f: impl Fn(usize, usize, usize, usize, usize) -> (f64, f64),
    ) -> Self {
        for x in 0..self.num_states() {
            for a1 in 0..self.num_actions(Player::Defender) {
                for a2 in 0..self.num_actions(Player::User) {
                    for t1 in 0..self.num_types[0] {
                        for t2 in 0..self.num_types[1] {
                            let (j1, j2) = f(x, a1, a2, t1, t2);
                            self.payoffs[0].set(x, a1, a2, t1, t2, j1);
                            self.payoffs[1].set(x, a1, a2, t1, t2, j2);
                        }
                    }
                }
            }
        }
        self
    }

    /// Fills the transition table from `f(x, a1, a2) -> next state index`.
    pub fn with_transition(mut self, f: impl Fn(usize, usize, usize) -> usize) -> Self {
        let (n1, n2) = (self.actions[0].len(), self.actions[1].len());
        let mut table = Vec::with_capacity(self.num_states() * n1 * n2);
        for x in 0..self.num_states() {
            for a1 in 0..n1 {
                for a2 in 0..n2 {
                    table.push(f(x, a1, a2));
                }
            }
        }
        self.transition = Some(table);
        self
    }

    pub fn with_raw_transition(mut self, table: Option<Vec<usize>>) -> Self {
        self.transition = table;
        self
    }

    /// Marks `action` infeasible for `player` of type `ty` in state `x`.
    pub fn forbid(mut self, player: Player, x: usize, ty: usize, action: usize) -> Self {
        let i = self.mask_offset(player, x, ty, action);
        self.mask[player.index()][i] = false;
        self
    }

    pub fn set_feasible(&mut self, player: Player, x: usize, ty: usize, action: usize, ok: bool) {
        let i = self.mask_offset(player, x, ty, action);
        self.mask[player.index()][i] = ok;
    }

    pub fn set_payoff(
        &mut self,
        player: Player,
        (x, a1, a2, t1, t2): (usize, usize, usize, usize, usize),
        v: f64,
    ) {
        self.payoffs[player.index()].set(x, a1, a2, t1, t2, v);
    }

    fn mask_offset(&self, player: Player, x: usize, ty: usize, action: usize) -> usize {
        let p = player.index();
        (x * self.num_types[p] + ty) * self.actions[p].len() + action
    }

    pub fn states(&self) -> &[String] {
        &self.states
    }

    pub fn num_states(&self) -> usize {
        self.states.len()
    }

    pub fn actions(&self, player: Player) -> &[String] {
        &self.actions[player.index()]
    }

    pub fn num_actions(&self, player: Player) -> usize {
        self.actions[player.index()].len()
    }

    pub fn num_types(&self, player: Player) -> usize {
        self.num_types[player.index()]
    }

    #[inline]
    pub fn payoff(&self, player: Player, x: usize, a1: usize, a2: usize, t1: usize, t2: usize) -> f64 {
        self.payoffs[player.index()].get(x, a1, a2, t1, t2)
    }

    pub fn payoff_tensor(&self, player: Player) -> &PayoffTensor {
        &self.payoffs[player.index()]
    }

    #[inline]
    pub fn is_feasible(&self, player: Player, x: usize, ty: usize, action: usize) -> bool {
        self.mask[player.index()][self.mask_offset(player, x, ty, action)]
    }

    pub fn feasible_actions(&self, player: Player, x: usize, ty: usize) -> Vec<usize> {
        (0..self.num_actions(player))
            .filter(|&a| self.is_feasible(player, x, ty, a))
            .collect()
    }

    pub fn is_terminal(&self) -> bool {
        self.transition.is_none()
    }

    pub fn transition_table(&self) -> Option<&[usize]> {
        self.transition.as_deref()
    }

    /// Next-state index of `x -> f(x, a1, a2)`.
    pub fn transition(&self, x: usize, a1: usize, a2: usize) -> Result<usize> {
        self.check_indices(x, a1, a2)?;
        let table = self
            .transition
            .as_ref()
            .ok_or_else(|| GameError::malformed("final stage has no transition"))?;
        Ok(table[(x * self.actions[0].len() + a1) * self.actions[1].len() + a2])
    }

    fn check_indices(&self, x: usize, a1: usize, a2: usize) -> Result<()> {
        if x >= self.num_states() {
            return Err(GameError::malformed(format!("state {x} out of range")));
        }
        if a1 >= self.actions[0].len() || a2 >= self.actions[1].len() {
            return Err(GameError::malformed(format!("action pair ({a1}, {a2}) out of range")));
        }
        Ok(())
    }

    pub fn state_index(&self, label: &str) -> Option<usize> {
        self.states.iter().position(|s| s == label)
    }
}

/// How a player's own type enters [`expected_stage_payoff`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OwnType {
    Fixed(usize),
    /// Averaged under the opponent's belief about the evaluating player.
    Averaged,
}

/// Expected stage payoff of `player` in state `x`.
///
/// `about_defender` is a distribution over the defender's types and
/// `about_user` over the user's types. The opponent's type is averaged under
/// the distribution about the opponent; the player's own type is either
/// fixed or averaged per `own`.
#[allow(clippy::too_many_arguments)]
pub fn expected_stage_payoff(
    stage: &StageGame,
    x: usize,
    defender_strategy: &[FiniteDistribution],
    user_strategy: &[FiniteDistribution],
    about_defender: &FiniteDistribution,
    about_user: &FiniteDistribution,
    player: Player,
    own: OwnType,
) -> Result<f64> {
    let (m1, m2) = (stage.num_types(Player::Defender), stage.num_types(Player::User));
    let (n1, n2) = (
        stage.num_actions(Player::Defender),
        stage.num_actions(Player::User),
    );
    if x >= stage.num_states() {
        return Err(GameError::malformed(format!("state {x} out of range")));
    }
    if defender_strategy.len() != m1 || user_strategy.len() != m2 {
        return Err(GameError::malformed("one strategy per type is required"));
    }
    if defender_strategy.iter().any(|s| s.len() != n1) || user_strategy.iter().any(|s| s.len() != n2)
    {
        return Err(GameError::malformed("strategy length does not match the action set"));
    }
    if about_defender.len() != m1 || about_user.len() != m2 {
        return Err(GameError::malformed("belief length does not match the type space"));
    }

    let cell = |t1: usize, t2: usize| -> f64 {
        let mut acc = 0.0;
        for a1 in 0..n1 {
            let p1 = defender_strategy[t1].get(a1);
            if p1 == 0.0 {
                continue;
            }
            for a2 in 0..n2 {
                acc += p1 * user_strategy[t2].get(a2) * stage.payoff(player, x, a1, a2, t1, t2);
            }
        }
        acc
    };

    let own_types: Vec<(usize, f64)> = match (player, own) {
        (_, OwnType::Fixed(t)) => {
            let bound = if player == Player::Defender { m1 } else { m2 };
            if t >= bound {
                return Err(GameError::malformed(format!("own type {t} out of range")));
            }
            vec![(t, 1.0)]
        }
        (Player::Defender, OwnType::Averaged) => about_defender.iter().enumerate().collect(),
        (Player::User, OwnType::Averaged) => about_user.iter().enumerate().collect(),
    };

    let mut total = 0.0;
    for (own_t, w_own) in own_types {
        let mut v = 0.0;
        match player {
            Player::Defender => {
                for t2 in 0..m2 {
                    v += about_user.get(t2) * cell(own_t, t2);
                }
            }
            Player::User => {
                for t1 in 0..m1 {
                    v += about_defender.get(t1) * cell(t1, own_t);
                }
            }
        }
        total += w_own * v;
    }
    Ok(total)
}

/// A finite-horizon game with two-sided private types.
///
/// `stages[k]` is played at stage `k = 0..=K`; `prior_about_user` is the
/// defender's prior over the user's types and `prior_about_defender` the
/// user's prior over the defender's types. Types are drawn independently.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MultiStageGame {
    types: [TypeSpace; 2],
    prior_about_defender: Vec<f64>,
    prior_about_user: Vec<f64>,
    stages: Vec<StageGame>,
    initial_state: usize,
}

/// Category of a structural defect found by [`validate_game`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ViolationKind {
    NoStages,
    DimensionMismatch,
    DanglingTransition,
    MissingTransition,
    PriorNotNormalized,
    NonFinitePayoff,
    NoFeasibleAction,
    BadInitialState,
    BadLabel,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub kind: ViolationKind,
    pub detail: String,
}

impl Violation {
    pub fn new(kind: ViolationKind, detail: impl Into<String>) -> Self {
        Violation {
            kind,
            detail: detail.into(),
        }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = match self.kind {
            ViolationKind::NoStages => "no stages",
            ViolationKind::DimensionMismatch => "dimension mismatch",
            ViolationKind::DanglingTransition => "dangling transition",
            ViolationKind::MissingTransition => "missing transition",
            ViolationKind::PriorNotNormalized => "prior not normalized",
            ViolationKind::NonFinitePayoff => "non-finite payoff",
            ViolationKind::NoFeasibleAction => "no feasible action",
            ViolationKind::BadInitialState => "bad initial state",
            ViolationKind::BadLabel => "bad label",
        };
        write!(f, "{tag}: {}", self.detail)
    }
}

impl MultiStageGame {
    /// Builds a game and rejects it if [`validate_game`] finds anything.
    pub fn new(
        types1: TypeSpace,
        types2: TypeSpace,
        prior_about_defender: Vec<f64>,
        prior_about_user: Vec<f64>,
        stages: Vec<StageGame>,
        initial_state: usize,
    ) -> Result<Self> {
        let g = Self::new_unchecked(
            types1,
            types2,
            prior_about_defender,
            prior_about_user,
            stages,
            initial_state,
        );
        let violations = validate_game(&g);
        if violations.is_empty() {
            Ok(g)
        } else {
            Err(GameError::Invalid(violations.iter().map(|v| v.to_string()).collect()))
        }
    }

    /// Builds a game without checking it; run [`validate_game`] before solving.
    pub fn new_unchecked(
        types1: TypeSpace,
        types2: TypeSpace,
        prior_about_defender: Vec<f64>,
        prior_about_user: Vec<f64>,
        stages: Vec<StageGame>,
        initial_state: usize,
    ) -> Self {
        MultiStageGame {
            types: [types1, types2],
            prior_about_defender,
            prior_about_user,
            stages,
            initial_state,
        }
    }

    /// Horizon `K`; the game has `K + 1` stages.
    pub fn horizon(&self) -> usize {
        self.stages.len().saturating_sub(1)
    }

    pub fn stages(&self) -> &[StageGame] {
        &self.stages
    }

    pub fn stage(&self, k: usize) -> &StageGame {
        &self.stages[k]
    }

    pub fn types(&self, player: Player) -> &TypeSpace {
        &self.types[player.index()]
    }

    pub fn num_types(&self, player: Player) -> usize {
        self.types[player.index()].len()
    }

    pub fn initial_state(&self) -> usize {
        self.initial_state
    }

    pub fn with_initial_state(mut self, x: usize) -> Self {
        self.initial_state = x;
        self
    }

    /// Prior held by `holder` over the opponent's types.
    pub fn prior_held_by(&self, holder: Player) -> FiniteDistribution {
        match holder {
            Player::Defender => self.prior_about(Player::User),
            Player::User => self.prior_about(Player::Defender),
        }
    }

    /// Prior over `subject`'s types (held by the opponent).
    pub fn prior_about(&self, subject: Player) -> FiniteDistribution {
        let raw = match subject {
            Player::Defender => &self.prior_about_defender,
            Player::User => &self.prior_about_user,
        };
        FiniteDistribution::new(raw.clone())
            .expect("prior validated before use; call validate_game first")
    }

    pub fn raw_prior_about(&self, subject: Player) -> &[f64] {
        match subject {
            Player::Defender => &self.prior_about_defender,
            Player::User => &self.prior_about_user,
        }
    }

    /// Fails with the violation list unless the game is well formed.
    pub fn ensure_valid(&self) -> Result<()> {
        let violations = validate_game(self);
        if violations.is_empty() {
            Ok(())
        } else {
            Err(GameError::Invalid(violations.iter().map(|v| v.to_string()).collect()))
        }
    }
}

/// Lists every structural defect of `g`. An empty list means the game is well formed.
pub fn validate_game(g: &MultiStageGame) -> Vec<Violation> {
    use ViolationKind::*;
    let mut out = Vec::new();
    if g.stages.is_empty() {
        out.push(Violation::new(NoStages, "a game needs at least one stage"));
        return out;
    }

    for (subject, raw) in [
        (Player::Defender, &g.prior_about_defender),
        (Player::User, &g.prior_about_user),
    ] {
        let n = g.types[subject.index()].len();
        if raw.len() != n {
            out.push(Violation::new(
                DimensionMismatch,
                format!(
                    "prior over {subject} types has {} entries for {n} types",
                    raw.len()
                ),
            ));
        } else if let Some(problem) = FiniteDistribution::check(raw) {
            out.push(Violation::new(
                PriorNotNormalized,
                format!("prior over {subject} types: {problem}"),
            ));
        }
    }

    if g.initial_state >= g.stages[0].num_states() {
        out.push(Violation::new(
            BadInitialState,
            format!(
                "initial state {} not in stage 0 with {} states",
                g.initial_state,
                g.stages[0].num_states()
            ),
        ));
    }

    let last = g.stages.len() - 1;
    for (k, stage) in g.stages.iter().enumerate() {
        for p in Player::BOTH {
            if stage.num_types(p) != g.num_types(p) {
                out.push(Violation::new(
                    DimensionMismatch,
                    format!(
                        "stage {k} payoffs are indexed by {} {p} types, game declares {}",
                        stage.num_types(p),
                        g.num_types(p)
                    ),
                ));
            }
            if stage.num_actions(p) == 0 {
                out.push(Violation::new(
                    DimensionMismatch,
                    format!("stage {k}: {p} has an empty action set"),
                ));
            }
        }
        if stage.num_states() == 0 {
            out.push(Violation::new(
                DimensionMismatch,
                format!("stage {k} has an empty state space"),
            ));
        }
        let expected: usize = stage.payoffs[0].dims.iter().product();
        if stage.payoffs.iter().any(|t| t.values.len() != expected || t.dims != stage.payoffs[0].dims)
        {
            out.push(Violation::new(
                DimensionMismatch,
                format!("stage {k} payoff tensors disagree on shape"),
            ));
            continue;
        }
        for p in Player::BOTH {
            if let Some(v) = stage.payoffs[p.index()].values.iter().find(|v| !v.is_finite()) {
                out.push(Violation::new(
                    NonFinitePayoff,
                    format!("stage {k}: {p} payoff {v}"),
                ));
            }
            for x in 0..stage.num_states() {
                for t in 0..stage.num_types(p) {
                    if stage.feasible_actions(p, x, t).is_empty() {
                        out.push(Violation::new(
                            NoFeasibleAction,
                            format!("stage {k}, state {x}: {p} type {t} has every action masked"),
                        ));
                    }
                }
            }
        }

        match (&stage.transition, k < last) {
            (None, true) => out.push(Violation::new(
                MissingTransition,
                format!("stage {k} is not final but has no transition"),
            )),
            (Some(table), true) => {
                let expected = stage.num_states()
                    * stage.num_actions(Player::Defender)
                    * stage.num_actions(Player::User);
                if table.len() != expected {
                    out.push(Violation::new(
                        DimensionMismatch,
                        format!("stage {k} transition has {} entries, expected {expected}", table.len()),
                    ));
                    continue;
                }
                let next = g.stages[k + 1].num_states();
                for (i, &target) in table.iter().enumerate() {
                    if target >= next {
                        let n1 = stage.num_actions(Player::Defender);
                        let n2 = stage.num_actions(Player::User);
                        let (x, a1, a2) = (i / (n1 * n2), (i / n2) % n1, i % n2);
                        out.push(Violation::new(
                            DanglingTransition,
                            format!(
                                "stage {k}: f({x}, {a1}, {a2}) = {target} but stage {} has {next} states",
                                k + 1
                            ),
                        ));
                    }
                }
            }
            // A transition on the final stage is ignored.
            (_, false) => {}
        }
    }
    out
}
