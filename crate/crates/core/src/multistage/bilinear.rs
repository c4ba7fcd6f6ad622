//! The per-stage bilinear program and its alternating-ascent solver.
//!
//! Variables are the per-type strategies `σ₁, σ₂` and the scalar functions
//! `s(θ₁), w(θ₂)`. With `Qᵢ = J̃ᵢ + Ṽᵢᵏ⁺¹ ∘ f` the program is
//!
//! ```text
//! max  Σ_θ₁ λ₁(θ₁) [Σ_θ₂ β₁(θ₂|θ₁) σ₁ᵀQ₁σ₂ + s(θ₁)] + Σ_θ₂ λ₂(θ₂) [Σ_θ₁ β₂(θ₁|θ₂) σ₁ᵀQ₂σ₂ + w(θ₂)]
//! s.t. Σ_θ₁ β₂(θ₁|θ₂) σ₁ᵀQ₂(·, a₂) + w(θ₂) ≤ 0   for every feasible a₂
//!      Σ_θ₂ β₁(θ₂|θ₁) Q₁(a₁, ·)σ₂ + s(θ₁) ≤ 0   for every feasible a₁
//! ```
//!
//! `βᵢ` is player i's belief about the opponent and `λᵢ` the weight on
//! player i's own types, i.e. the opponent's belief about player i. When the
//! beliefs do not depend on the holder's own type and `λ` equals the
//! opponent's belief, this is exactly the textbook two-sided program. The
//! objective is never positive and is zero exactly when every type with
//! positive weight best-responds.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::Exp1;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::distribution::FiniteDistribution;
use crate::error::{GameError, Result};
use crate::game::{Player, StageGame};
use crate::lp::{solve_lp, LinearProgram, LpStatus};

/// Largest per-type deviation gap accepted as a stage equilibrium.
pub const STAGE_GAP_TOL: f64 = 1e-6;
/// Types weighted at most this much are fixed up by a pure best response.
const NEGLIGIBLE_WEIGHT: f64 = 1e-12;
const MAX_ALTERNATIONS: usize = 500;
const MAX_PURE_STARTS: usize = 256;
/// Batches of random restarts tried before the pure starts.
const RESTART_ROUNDS: usize = 4;

/// Beliefs entering one stage program.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StageBeliefs {
    /// `β₁(· | θ₁)` over the user's types, one per defender type.
    pub defender: Vec<FiniteDistribution>,
    /// `β₂(· | θ₂)` over the defender's types, one per user type.
    pub user: Vec<FiniteDistribution>,
    /// `λ₁` over the defender's types.
    pub defender_weights: FiniteDistribution,
    /// `λ₂` over the user's types.
    pub user_weights: FiniteDistribution,
}

impl StageBeliefs {
    /// Beliefs that do not depend on the holder's type.
    pub fn common(about_defender: &FiniteDistribution, about_user: &FiniteDistribution) -> Self {
        StageBeliefs {
            defender: vec![about_user.clone(); about_defender.len()],
            user: vec![about_defender.clone(); about_user.len()],
            defender_weights: about_defender.clone(),
            user_weights: about_user.clone(),
        }
    }
}

/// Where the reported stage solution started from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StartOrigin {
    /// The incumbent profile, still an equilibrium under the new beliefs.
    Incumbent,
    WarmAscent,
    Restart(usize),
    PureStart(usize),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BilinearStageSolution {
    pub defender: Vec<FiniteDistribution>,
    pub user: Vec<FiniteDistribution>,
    pub s: Vec<f64>,
    pub w: Vec<f64>,
    pub objective: f64,
    pub defender_gaps: Vec<f64>,
    pub user_gaps: Vec<f64>,
    /// Largest per-type deviation gap.
    pub gap: f64,
    /// Expected stage-plus-continuation payoff per own type.
    pub defender_values: Vec<f64>,
    pub user_values: Vec<f64>,
    /// Objective after every alternation of the run that produced the solution.
    pub trace: Vec<f64>,
    pub origin: StartOrigin,
}

/// One stage program with its payoff tensors already including continuation values.
#[derive(Debug, Clone)]
pub struct StageProblem {
    n1: usize,
    n2: usize,
    m1: usize,
    m2: usize,
    feasible1: Vec<Vec<usize>>,
    feasible2: Vec<Vec<usize>>,
    q1: Vec<f64>,
    q2: Vec<f64>,
    beliefs: StageBeliefs,
}

/// Continuation values `Ṽᵏ⁺¹[x'][θ]` of both players at the next stage.
pub type Continuation<'a> = (&'a [Vec<f64>], &'a [Vec<f64>]);

impl StageProblem {
    pub fn new(
        stage: &StageGame,
        x: usize,
        beliefs: StageBeliefs,
        next: Option<Continuation<'_>>,
    ) -> Result<Self> {
        let (n1, n2) = (stage.num_actions(Player::Defender), stage.num_actions(Player::User));
        let (m1, m2) = (stage.num_types(Player::Defender), stage.num_types(Player::User));
        if x >= stage.num_states() {
            return Err(GameError::malformed(format!("state {x} out of range")));
        }
        if beliefs.defender.len() != m1
            || beliefs.user.len() != m2
            || beliefs.defender.iter().any(|b| b.len() != m2)
            || beliefs.user.iter().any(|b| b.len() != m1)
            || beliefs.defender_weights.len() != m1
            || beliefs.user_weights.len() != m2
        {
            return Err(GameError::malformed("stage beliefs do not match the type spaces"));
        }
        let mut q1 = vec![0.0; n1 * n2 * m1 * m2];
        let mut q2 = vec![0.0; n1 * n2 * m1 * m2];
        for a1 in 0..n1 {
            for a2 in 0..n2 {
                let next_x = match next {
                    Some(_) => Some(stage.transition(x, a1, a2)?),
                    None => None,
                };
                for t1 in 0..m1 {
                    for t2 in 0..m2 {
                        let i = ((a1 * n2 + a2) * m1 + t1) * m2 + t2;
                        let (c1, c2) = match (next, next_x) {
                            (Some((v1, v2)), Some(nx)) => (v1[nx][t1], v2[nx][t2]),
                            _ => (0.0, 0.0),
                        };
                        q1[i] = stage.payoff(Player::Defender, x, a1, a2, t1, t2) + c1;
                        q2[i] = stage.payoff(Player::User, x, a1, a2, t1, t2) + c2;
                    }
                }
            }
        }
        Ok(StageProblem {
            n1,
            n2,
            m1,
            m2,
            feasible1: (0..m1).map(|t| stage.feasible_actions(Player::Defender, x, t)).collect(),
            feasible2: (0..m2).map(|t| stage.feasible_actions(Player::User, x, t)).collect(),
            q1,
            q2,
            beliefs,
        })
    }

    #[inline]
    fn idx(&self, a1: usize, a2: usize, t1: usize, t2: usize) -> usize {
        ((a1 * self.n2 + a2) * self.m1 + t1) * self.m2 + t2
    }

    pub fn feasible(&self, player: Player) -> &[Vec<usize>] {
        match player {
            Player::Defender => &self.feasible1,
            Player::User => &self.feasible2,
        }
    }

    pub fn beliefs(&self) -> &StageBeliefs {
        &self.beliefs
    }

    /// `Σ_θ₂ β₁(θ₂|θ₁) Σ_a₂ σ₂(a₂|θ₂) Q₁(a₁, a₂, θ₁, θ₂)` for every `a₁`.
    pub fn defender_action_values(&self, t1: usize, user: &[FiniteDistribution]) -> Vec<f64> {
        let b = &self.beliefs.defender[t1];
        (0..self.n1)
            .map(|a1| {
                let mut v = 0.0;
                for t2 in 0..self.m2 {
                    let bt = b.get(t2);
                    if bt == 0.0 {
                        continue;
                    }
                    for a2 in 0..self.n2 {
                        v += bt * user[t2].get(a2) * self.q1[self.idx(a1, a2, t1, t2)];
                    }
                }
                v
            })
            .collect()
    }

    pub fn user_action_values(&self, t2: usize, defender: &[FiniteDistribution]) -> Vec<f64> {
        let b = &self.beliefs.user[t2];
        (0..self.n2)
            .map(|a2| {
                let mut v = 0.0;
                for t1 in 0..self.m1 {
                    let bt = b.get(t1);
                    if bt == 0.0 {
                        continue;
                    }
                    for a1 in 0..self.n1 {
                        v += bt * defender[t1].get(a1) * self.q2[self.idx(a1, a2, t1, t2)];
                    }
                }
                v
            })
            .collect()
    }

    fn best(values: &[f64], feasible: &[usize]) -> f64 {
        feasible.iter().map(|&a| values[a]).fold(f64::NEG_INFINITY, f64::max)
    }

    /// Tight scalar functions: `s(θ₁) = −max_a₁ …`, `w(θ₂) = −max_a₂ …`.
    pub fn tight_scalars(
        &self,
        defender: &[FiniteDistribution],
        user: &[FiniteDistribution],
    ) -> (Vec<f64>, Vec<f64>) {
        let s = (0..self.m1)
            .map(|t1| -Self::best(&self.defender_action_values(t1, user), &self.feasible1[t1]))
            .collect();
        let w = (0..self.m2)
            .map(|t2| -Self::best(&self.user_action_values(t2, defender), &self.feasible2[t2]))
            .collect();
        (s, w)
    }

    /// Expected payoffs per own type under the profile.
    pub fn values(
        &self,
        defender: &[FiniteDistribution],
        user: &[FiniteDistribution],
    ) -> (Vec<f64>, Vec<f64>) {
        let v1 = (0..self.m1)
            .map(|t1| defender[t1].expectation(&self.defender_action_values(t1, user)))
            .collect();
        let v2 = (0..self.m2)
            .map(|t2| user[t2].expectation(&self.user_action_values(t2, defender)))
            .collect();
        (v1, v2)
    }

    /// Objective of the program at an arbitrary point.
    pub fn objective(
        &self,
        defender: &[FiniteDistribution],
        user: &[FiniteDistribution],
        s: &[f64],
        w: &[f64],
    ) -> f64 {
        let (v1, v2) = self.values(defender, user);
        let l1 = &self.beliefs.defender_weights;
        let l2 = &self.beliefs.user_weights;
        (0..self.m1).map(|t| l1.get(t) * (v1[t] + s[t])).sum::<f64>()
            + (0..self.m2).map(|t| l2.get(t) * (v2[t] + w[t])).sum::<f64>()
    }

    /// Largest violation of constraints (a) and (b); non-positive when feasible.
    pub fn constraint_violation(
        &self,
        defender: &[FiniteDistribution],
        user: &[FiniteDistribution],
        s: &[f64],
        w: &[f64],
    ) -> f64 {
        let mut worst = f64::NEG_INFINITY;
        for t1 in 0..self.m1 {
            let vals = self.defender_action_values(t1, user);
            worst = worst.max(Self::best(&vals, &self.feasible1[t1]) + s[t1]);
        }
        for t2 in 0..self.m2 {
            let vals = self.user_action_values(t2, defender);
            worst = worst.max(Self::best(&vals, &self.feasible2[t2]) + w[t2]);
        }
        worst
    }

    /// Per-type deviation gaps, unweighted.
    pub fn gaps(
        &self,
        defender: &[FiniteDistribution],
        user: &[FiniteDistribution],
    ) -> (Vec<f64>, Vec<f64>) {
        let g1 = (0..self.m1)
            .map(|t1| {
                let vals = self.defender_action_values(t1, user);
                (Self::best(&vals, &self.feasible1[t1]) - defender[t1].expectation(&vals)).max(0.0)
            })
            .collect();
        let g2 = (0..self.m2)
            .map(|t2| {
                let vals = self.user_action_values(t2, defender);
                (Self::best(&vals, &self.feasible2[t2]) - user[t2].expectation(&vals)).max(0.0)
            })
            .collect();
        (g1, g2)
    }

    /// Best `(σ₁, w)` for fixed `σ₂`; `s` is then determined by (b).
    fn improve_defender(&self, user: &[FiniteDistribution]) -> Result<Vec<FiniteDistribution>> {
        let l1 = &self.beliefs.defender_weights;
        let l2 = &self.beliefs.user_weights;
        let vars: Vec<(usize, usize)> = (0..self.m1)
            .flat_map(|t1| self.feasible1[t1].iter().map(move |&a1| (t1, a1)))
            .collect();
        let n = vars.len() + self.m2;
        let w_at = |t2: usize| vars.len() + t2;

        let mut c = vec![0.0; n];
        let own: Vec<Vec<f64>> = (0..self.m1).map(|t1| self.defender_action_values(t1, user)).collect();
        // Against σ₂, the user's payoff from each (θ₁, a₁) cell, averaged over a₂.
        let user_payoff = |t1: usize, a1: usize, t2: usize| -> f64 {
            (0..self.n2)
                .map(|a2| user[t2].get(a2) * self.q2[self.idx(a1, a2, t1, t2)])
                .sum()
        };
        for (j, &(t1, a1)) in vars.iter().enumerate() {
            c[j] = l1.get(t1) * own[t1][a1];
            for t2 in 0..self.m2 {
                c[j] += l2.get(t2) * self.beliefs.user[t2].get(t1) * user_payoff(t1, a1, t2);
            }
        }
        for t2 in 0..self.m2 {
            c[w_at(t2)] = l2.get(t2);
        }

        let mut lp = LinearProgram::new(n).maximize(c);
        for t2 in 0..self.m2 {
            lp.free(w_at(t2));
            for &a2 in &self.feasible2[t2] {
                let mut row = vec![0.0; n];
                for (j, &(t1, a1)) in vars.iter().enumerate() {
                    row[j] = self.beliefs.user[t2].get(t1) * self.q2[self.idx(a1, a2, t1, t2)];
                }
                row[w_at(t2)] = 1.0;
                lp.le(row, 0.0);
            }
        }
        for t1 in 0..self.m1 {
            let row = vars.iter().map(|&(t, _)| if t == t1 { 1.0 } else { 0.0 }).chain(std::iter::repeat(0.0).take(self.m2)).collect();
            lp.equals(row, 1.0);
        }
        let sol = solve_lp(&lp)?;
        if sol.status != LpStatus::Optimal {
            return Err(GameError::Lp(format!("defender step ended {:?}", sol.status)));
        }
        collect_strategies(&vars, &sol.z, self.m1, self.n1)
    }

    fn improve_user(&self, defender: &[FiniteDistribution]) -> Result<Vec<FiniteDistribution>> {
        let l1 = &self.beliefs.defender_weights;
        let l2 = &self.beliefs.user_weights;
        let vars: Vec<(usize, usize)> = (0..self.m2)
            .flat_map(|t2| self.feasible2[t2].iter().map(move |&a2| (t2, a2)))
            .collect();
        let n = vars.len() + self.m1;
        let s_at = |t1: usize| vars.len() + t1;

        let mut c = vec![0.0; n];
        let own: Vec<Vec<f64>> = (0..self.m2).map(|t2| self.user_action_values(t2, defender)).collect();
        let defender_payoff = |t2: usize, a2: usize, t1: usize| -> f64 {
            (0..self.n1)
                .map(|a1| defender[t1].get(a1) * self.q1[self.idx(a1, a2, t1, t2)])
                .sum()
        };
        for (j, &(t2, a2)) in vars.iter().enumerate() {
            c[j] = l2.get(t2) * own[t2][a2];
            for t1 in 0..self.m1 {
                c[j] += l1.get(t1) * self.beliefs.defender[t1].get(t2) * defender_payoff(t2, a2, t1);
            }
        }
        for t1 in 0..self.m1 {
            c[s_at(t1)] = l1.get(t1);
        }

        let mut lp = LinearProgram::new(n).maximize(c);
        for t1 in 0..self.m1 {
            lp.free(s_at(t1));
            for &a1 in &self.feasible1[t1] {
                let mut row = vec![0.0; n];
                for (j, &(t2, a2)) in vars.iter().enumerate() {
                    row[j] = self.beliefs.defender[t1].get(t2) * self.q1[self.idx(a1, a2, t1, t2)];
                }
                row[s_at(t1)] = 1.0;
                lp.le(row, 0.0);
            }
        }
        for t2 in 0..self.m2 {
            let row = vars.iter().map(|&(t, _)| if t == t2 { 1.0 } else { 0.0 }).chain(std::iter::repeat(0.0).take(self.m1)).collect();
            lp.equals(row, 1.0);
        }
        let sol = solve_lp(&lp)?;
        if sol.status != LpStatus::Optimal {
            return Err(GameError::Lp(format!("user step ended {:?}", sol.status)));
        }
        collect_strategies(&vars, &sol.z, self.m2, self.n2)
    }

    fn tight_objective(&self, defender: &[FiniteDistribution], user: &[FiniteDistribution]) -> f64 {
        let (s, w) = self.tight_scalars(defender, user);
        self.objective(defender, user, &s, &w)
    }

    /// Alternating ascent from `user`; returns the profile and the objective trace.
    fn ascend(
        &self,
        mut defender: Vec<FiniteDistribution>,
        mut user: Vec<FiniteDistribution>,
    ) -> Result<(Vec<FiniteDistribution>, Vec<FiniteDistribution>, Vec<f64>)> {
        let mut trace = vec![self.tight_objective(&defender, &user)];
        for _ in 0..MAX_ALTERNATIONS {
            let prev = *trace.last().expect("trace starts non-empty");
            if prev >= -1e-13 {
                break;
            }
            let d = self.improve_defender(&user)?;
            // Keep the incumbent if the LP only reproduced it up to rounding.
            if self.tight_objective(&d, &user) >= prev {
                defender = d;
            }
            trace.push(self.tight_objective(&defender, &user));
            let u = self.improve_user(&defender)?;
            if self.tight_objective(&defender, &u) >= *trace.last().unwrap() {
                user = u;
            }
            let now = self.tight_objective(&defender, &user);
            trace.push(now);
            if now - prev <= 1e-12 * (1.0 + prev.abs()) {
                break;
            }
        }
        Ok((defender, user, trace))
    }

    /// Replaces negligibly weighted types' strategies by a pure best response.
    fn fix_negligible(&self, defender: &mut [FiniteDistribution], user: &mut [FiniteDistribution]) {
        for t1 in 0..self.m1 {
            if self.beliefs.defender_weights.get(t1) <= NEGLIGIBLE_WEIGHT {
                let vals = self.defender_action_values(t1, user);
                defender[t1] = FiniteDistribution::point(self.n1, best_index(&vals, &self.feasible1[t1]));
            }
        }
        for t2 in 0..self.m2 {
            if self.beliefs.user_weights.get(t2) <= NEGLIGIBLE_WEIGHT {
                let vals = self.user_action_values(t2, defender);
                user[t2] = FiniteDistribution::point(self.n2, best_index(&vals, &self.feasible2[t2]));
            }
        }
    }

    fn finish(
        &self,
        mut defender: Vec<FiniteDistribution>,
        mut user: Vec<FiniteDistribution>,
        trace: Vec<f64>,
        origin: StartOrigin,
    ) -> BilinearStageSolution {
        self.fix_negligible(&mut defender, &mut user);
        let (s, w) = self.tight_scalars(&defender, &user);
        let objective = self.objective(&defender, &user, &s, &w);
        let (defender_gaps, user_gaps) = self.gaps(&defender, &user);
        let gap = defender_gaps.iter().chain(&user_gaps).cloned().fold(0.0, f64::max);
        let (defender_values, user_values) = self.values(&defender, &user);
        BilinearStageSolution {
            defender,
            user,
            s,
            w,
            objective,
            defender_gaps,
            user_gaps,
            gap,
            defender_values,
            user_values,
            trace,
            origin,
        }
    }

    fn random_profile(&self, rng: &mut ChaCha8Rng) -> (Vec<FiniteDistribution>, Vec<FiniteDistribution>) {
        let draw = |rng: &mut ChaCha8Rng, n: usize, feasible: &[usize]| {
            let mut w = vec![0.0; n];
            for &a in feasible {
                let e: f64 = rng.sample(Exp1);
                w[a] = e + 1e-12;
            }
            FiniteDistribution::from_unnormalized(w).expect("positive weights")
        };
        let d = (0..self.m1).map(|t| draw(rng, self.n1, &self.feasible1[t])).collect();
        let u = (0..self.m2).map(|t| draw(rng, self.n2, &self.feasible2[t])).collect();
        (d, u)
    }

    fn pure_user_profiles(&self) -> Vec<Vec<FiniteDistribution>> {
        let mut out: Vec<Vec<FiniteDistribution>> = vec![Vec::new()];
        for t2 in 0..self.m2 {
            let mut next = Vec::new();
            for prefix in &out {
                for &a2 in &self.feasible2[t2] {
                    let mut v = prefix.clone();
                    v.push(FiniteDistribution::point(self.n2, a2));
                    next.push(v);
                }
            }
            out = next;
            if out.len() > MAX_PURE_STARTS {
                out.truncate(MAX_PURE_STARTS);
            }
        }
        out
    }

    /// Multi-start alternating ascent.
    ///
    /// The incumbent `warm` profile is kept unchanged when it is still an
    /// equilibrium. Otherwise the first start (warm ascent, then seeded random
    /// restarts by index in up to [`RESTART_ROUNDS`] batches of `restarts`,
    /// then pure user profiles) reaching a gap of at most
    /// [`STAGE_GAP_TOL`] wins; failing that, the largest objective.
    pub fn solve(
        &self,
        restarts: usize,
        seed: u64,
        stream: u64,
        warm: Option<(&[FiniteDistribution], &[FiniteDistribution])>,
    ) -> Result<BilinearStageSolution> {
        let mut candidates: Vec<BilinearStageSolution> = Vec::new();
        if let Some((d, u)) = warm {
            let (d, u) = (d.to_vec(), u.to_vec());
            let incumbent = self.finish(d.clone(), u.clone(), vec![self.tight_objective(&d, &u)], StartOrigin::Incumbent);
            if incumbent.gap <= STAGE_GAP_TOL {
                return Ok(incumbent);
            }
            let (d, u, trace) = self.ascend(d, u)?;
            let sol = self.finish(d, u, trace, StartOrigin::WarmAscent);
            if sol.gap <= STAGE_GAP_TOL {
                return Ok(sol);
            }
            candidates.push(sol);
        }

        let batch = restarts.max(1);
        for round in 0..RESTART_ROUNDS {
            let runs: Vec<Result<BilinearStageSolution>> = (round * batch..(round + 1) * batch)
                .into_par_iter()
                .map(|r| {
                    let mut rng = ChaCha8Rng::seed_from_u64(seed);
                    rng.set_stream(stream.wrapping_mul(1 << 16).wrapping_add(r as u64));
                    let (d, u) = self.random_profile(&mut rng);
                    let (d, u, trace) = self.ascend(d, u)?;
                    Ok(self.finish(d, u, trace, StartOrigin::Restart(r)))
                })
                .collect();
            let runs = runs.into_iter().collect::<Result<Vec<_>>>()?;
            if let Some(sol) = runs.iter().find(|s| s.gap <= STAGE_GAP_TOL) {
                return Ok(sol.clone());
            }
            candidates.extend(runs);
        }

        let starts = self.pure_user_profiles();
        let runs: Vec<Result<BilinearStageSolution>> = starts
            .into_par_iter()
            .enumerate()
            .map(|(i, u)| {
                let d = self.improve_defender(&u)?;
                let (d, u, trace) = self.ascend(d, u)?;
                Ok(self.finish(d, u, trace, StartOrigin::PureStart(i)))
            })
            .collect();
        let runs = runs.into_iter().collect::<Result<Vec<_>>>()?;
        if let Some(sol) = runs.iter().find(|s| s.gap <= STAGE_GAP_TOL) {
            return Ok(sol.clone());
        }
        candidates.extend(runs);

        let mut best = candidates.swap_remove(0);
        for c in candidates {
            if c.objective > best.objective {
                best = c;
            }
        }
        Ok(best)
    }
}

fn best_index(values: &[f64], feasible: &[usize]) -> usize {
    crate::static_solver::best_feasible(values, feasible)
}

fn collect_strategies(
    vars: &[(usize, usize)],
    z: &[f64],
    types: usize,
    actions: usize,
) -> Result<Vec<FiniteDistribution>> {
    let mut raw = vec![vec![0.0; actions]; types];
    for (j, &(t, a)) in vars.iter().enumerate() {
        raw[t][a] = z[j];
    }
    raw.iter()
        .map(|w| FiniteDistribution::cleaned(w, 1e-7))
        .collect()
}

/// Solves the stage program at `(stage, x)` given beliefs and the next
/// stage's values (`None` on the final stage).
pub fn stage_bilinear_solve(
    stage: &StageGame,
    x: usize,
    beliefs: StageBeliefs,
    next: Option<Continuation<'_>>,
    restarts: usize,
    seed: u64,
) -> Result<BilinearStageSolution> {
    StageProblem::new(stage, x, beliefs, next)?.solve(restarts, seed, 0, None)
}
