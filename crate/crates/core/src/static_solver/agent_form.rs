//! Agent form of a two-player Bayesian game and equilibrium search by
//! support enumeration.
//!
//! Each `(player, type)` pair is an agent. A defender agent's payoff is
//! linear in the strategies of the user agents and vice versa, so for fixed
//! supports the indifference conditions form a square linear system whenever
//! the supports are balanced.

use nalgebra::{DMatrix, DVector};

use crate::distribution::FiniteDistribution;
use crate::error::{GameError, Result};
use crate::lp::{solve_lp, LinearProgram, LpStatus};

/// Upper bound on the number of support profiles examined.
pub const SUPPORT_BUDGET: u128 = 5_000_000;

const NONNEG_TOL: f64 = 1e-10;
const SINGULAR_TOL: f64 = 1e-10;

/// Payoff coefficients of a two-team agent game.
///
/// `coef1[t1][a1][t2][a2]` is what defender agent `t1` earns per unit of
/// probability that user agent `t2` puts on `a2` when `t1` plays `a1`;
/// belief weights are already folded in. `coef2[t2][a2][t1][a1]` likewise.
#[derive(Debug, Clone)]
pub struct AgentForm {
    pub feasible1: Vec<Vec<usize>>,
    pub feasible2: Vec<Vec<usize>>,
    pub num_actions1: usize,
    pub num_actions2: usize,
    coef1: Vec<f64>,
    coef2: Vec<f64>,
}

/// One equilibrium of an [`AgentForm`].
#[derive(Debug, Clone)]
pub struct AgentProfile {
    pub defender: Vec<FiniteDistribution>,
    pub user: Vec<FiniteDistribution>,
    pub support1: Vec<Vec<usize>>,
    pub support2: Vec<Vec<usize>>,
    pub gap: f64,
}

#[derive(Debug, Clone, Default)]
pub struct EnumerationStats {
    pub profiles_examined: u64,
    pub singular_systems: u64,
    /// Whether the LP pass over all support profiles was needed.
    pub degenerate_pass: bool,
}

impl AgentForm {
    pub fn new(
        feasible1: Vec<Vec<usize>>,
        feasible2: Vec<Vec<usize>>,
        num_actions1: usize,
        num_actions2: usize,
        payoff1: impl Fn(usize, usize, usize, usize) -> f64,
        payoff2: impl Fn(usize, usize, usize, usize) -> f64,
    ) -> Self {
        let (m1, m2) = (feasible1.len(), feasible2.len());
        let (n1, n2) = (num_actions1, num_actions2);
        let mut coef1 = vec![0.0; m1 * n1 * m2 * n2];
        let mut coef2 = vec![0.0; m2 * n2 * m1 * n1];
        for t1 in 0..m1 {
            for a1 in 0..n1 {
                for t2 in 0..m2 {
                    for a2 in 0..n2 {
                        coef1[((t1 * n1 + a1) * m2 + t2) * n2 + a2] = payoff1(t1, a1, t2, a2);
                        coef2[((t2 * n2 + a2) * m1 + t1) * n1 + a1] = payoff2(t2, a2, t1, a1);
                    }
                }
            }
        }
        AgentForm {
            feasible1,
            feasible2,
            num_actions1,
            num_actions2,
            coef1,
            coef2,
        }
    }

    pub fn num_agents1(&self) -> usize {
        self.feasible1.len()
    }

    pub fn num_agents2(&self) -> usize {
        self.feasible2.len()
    }

    #[inline]
    fn c1(&self, t1: usize, a1: usize, t2: usize, a2: usize) -> f64 {
        let (m2, n1, n2) = (self.num_agents2(), self.num_actions1, self.num_actions2);
        self.coef1[((t1 * n1 + a1) * m2 + t2) * n2 + a2]
    }

    #[inline]
    fn c2(&self, t2: usize, a2: usize, t1: usize, a1: usize) -> f64 {
        let (m1, n1, n2) = (self.num_agents1(), self.num_actions1, self.num_actions2);
        self.coef2[((t2 * n2 + a2) * m1 + t1) * n1 + a1]
    }

    /// Expected payoff of each defender action for agent `t1` against `user`.
    pub fn action_values1(&self, t1: usize, user: &[FiniteDistribution]) -> Vec<f64> {
        (0..self.num_actions1)
            .map(|a1| {
                let mut v = 0.0;
                for (t2, s) in user.iter().enumerate() {
                    for a2 in 0..self.num_actions2 {
                        v += s.get(a2) * self.c1(t1, a1, t2, a2);
                    }
                }
                v
            })
            .collect()
    }

    pub fn action_values2(&self, t2: usize, defender: &[FiniteDistribution]) -> Vec<f64> {
        (0..self.num_actions2)
            .map(|a2| {
                let mut v = 0.0;
                for (t1, s) in defender.iter().enumerate() {
                    for a1 in 0..self.num_actions1 {
                        v += s.get(a1) * self.c2(t2, a2, t1, a1);
                    }
                }
                v
            })
            .collect()
    }

    /// Per-agent deviation gaps: best feasible pure deviation minus achieved value.
    pub fn gaps(
        &self,
        defender: &[FiniteDistribution],
        user: &[FiniteDistribution],
    ) -> (Vec<f64>, Vec<f64>) {
        let g1 = (0..self.num_agents1())
            .map(|t1| {
                let vals = self.action_values1(t1, user);
                gap_of(&vals, &self.feasible1[t1], &defender[t1])
            })
            .collect();
        let g2 = (0..self.num_agents2())
            .map(|t2| {
                let vals = self.action_values2(t2, defender);
                gap_of(&vals, &self.feasible2[t2], &user[t2])
            })
            .collect();
        (g1, g2)
    }

    pub fn max_gap(&self, defender: &[FiniteDistribution], user: &[FiniteDistribution]) -> f64 {
        let (g1, g2) = self.gaps(defender, user);
        g1.into_iter().chain(g2).fold(0.0, f64::max)
    }

    fn support_count(&self) -> u128 {
        self.feasible1
            .iter()
            .chain(&self.feasible2)
            .map(|f| (1u128 << f.len().min(100)) - 1)
            .product()
    }

    /// All equilibria reachable from balanced support profiles, in lexicographic
    /// support order, each with gap at most `gap_tol`.
    pub fn enumerate(&self, gap_tol: f64) -> Result<(Vec<AgentProfile>, EnumerationStats)> {
        let count = self.support_count();
        if count > SUPPORT_BUDGET {
            return Err(GameError::TooLarge(format!(
                "{count} support profiles exceed the budget of {SUPPORT_BUDGET}"
            )));
        }
        let subsets1: Vec<Vec<Vec<usize>>> = self.feasible1.iter().map(|f| subsets(f)).collect();
        let subsets2: Vec<Vec<Vec<usize>>> = self.feasible2.iter().map(|f| subsets(f)).collect();

        let mut stats = EnumerationStats::default();
        let mut found = Vec::new();
        for s1 in cartesian(&subsets1) {
            let excess1: usize = s1.iter().map(|s| s.len() - 1).sum();
            for s2 in cartesian(&subsets2) {
                let excess2: usize = s2.iter().map(|s| s.len() - 1).sum();
                if excess1 != excess2 {
                    continue;
                }
                stats.profiles_examined += 1;
                match self.solve_supports(&s1, &s2, gap_tol) {
                    Solved::Equilibrium(p) => found.push(p),
                    Solved::Singular => stats.singular_systems += 1,
                    Solved::Rejected => {}
                }
            }
        }
        if found.is_empty() {
            // Degenerate game: equilibria may only exist on unbalanced supports.
            stats.degenerate_pass = true;
            for s1 in cartesian(&subsets1) {
                for s2 in cartesian(&subsets2) {
                    if let Some(p) = self.solve_supports_lp(&s1, &s2, gap_tol)? {
                        found.push(p);
                    }
                }
            }
        }
        found.sort_by(|a, b| (&a.support1, &a.support2).cmp(&(&b.support1, &b.support2)));
        let mut unique: Vec<AgentProfile> = Vec::new();
        for p in found {
            if !unique.iter().any(|q| same_profile(p.clone(), q)) {
                unique.push(p);
            }
        }
        Ok((unique, stats))
    }

    fn solve_supports(&self, s1: &[Vec<usize>], s2: &[Vec<usize>], gap_tol: f64) -> Solved {
        // Strategies of the user agents that make every defender agent indifferent on its support.
        let user = match solve_indifference(s1, s2, self.num_actions2, |t1, a1, t2, a2| {
            self.c1(t1, a1, t2, a2)
        }) {
            Ok(Some(x)) => x,
            Ok(None) => return Solved::Rejected,
            Err(()) => return Solved::Singular,
        };
        let defender = match solve_indifference(s2, s1, self.num_actions1, |t2, a2, t1, a1| {
            self.c2(t2, a2, t1, a1)
        }) {
            Ok(Some(x)) => x,
            Ok(None) => return Solved::Rejected,
            Err(()) => return Solved::Singular,
        };
        let gap = self.max_gap(&defender, &user);
        if gap > gap_tol {
            return Solved::Rejected;
        }
        Solved::Equilibrium(AgentProfile {
            defender,
            user,
            support1: s1.to_vec(),
            support2: s2.to_vec(),
            gap,
        })
    }
}

impl AgentForm {
    /// Equilibrium with supports contained in `s1`, `s2`, found by two
    /// feasibility LPs instead of square linear systems.
    fn solve_supports_lp(
        &self,
        s1: &[Vec<usize>],
        s2: &[Vec<usize>],
        gap_tol: f64,
    ) -> Result<Option<AgentProfile>> {
        let Some(user) = support_lp(&self.feasible1, s1, s2, self.num_actions2, |t1, a1, t2, a2| {
            self.c1(t1, a1, t2, a2)
        })?
        else {
            return Ok(None);
        };
        let Some(defender) = support_lp(&self.feasible2, s2, s1, self.num_actions1, |t2, a2, t1, a1| {
            self.c2(t2, a2, t1, a1)
        })?
        else {
            return Ok(None);
        };
        let gap = self.max_gap(&defender, &user);
        if gap > gap_tol {
            return Ok(None);
        }
        let support1 = defender.iter().map(|d| d.support(NONNEG_TOL)).collect();
        let support2 = user.iter().map(|d| d.support(NONNEG_TOL)).collect();
        Ok(Some(AgentProfile {
            defender,
            user,
            support1,
            support2,
            gap,
        }))
    }
}

/// Strategies of the other team, supported inside `other`, under which every
/// action in `own` is optimal among `own_feasible` for its agent.
fn support_lp(
    own_feasible: &[Vec<usize>],
    own: &[Vec<usize>],
    other: &[Vec<usize>],
    n_other: usize,
    coef: impl Fn(usize, usize, usize, usize) -> f64,
) -> Result<Option<Vec<FiniteDistribution>>> {
    let num_prob: usize = other.iter().map(Vec::len).sum();
    let n = num_prob + own.len();
    let mut offsets = Vec::with_capacity(other.len());
    let mut acc = 0;
    for s in other {
        offsets.push(acc);
        acc += s.len();
    }
    let mut lp = LinearProgram::new(n).maximize(vec![0.0; n]);
    for t in 0..own.len() {
        lp.free(num_prob + t);
    }
    for (t, feasible) in own_feasible.iter().enumerate() {
        for &a in feasible {
            let mut row = vec![0.0; n];
            for (u, osup) in other.iter().enumerate() {
                for (k, &oa) in osup.iter().enumerate() {
                    row[offsets[u] + k] = coef(t, a, u, oa);
                }
            }
            row[num_prob + t] = -1.0;
            if own[t].contains(&a) {
                lp.equals(row, 0.0);
            } else {
                lp.le(row, 0.0);
            }
        }
    }
    for (u, osup) in other.iter().enumerate() {
        let mut row = vec![0.0; n];
        for k in 0..osup.len() {
            row[offsets[u] + k] = 1.0;
        }
        lp.equals(row, 1.0);
    }
    let sol = solve_lp(&lp)?;
    if sol.status != LpStatus::Optimal {
        return Ok(None);
    }
    let mut out = Vec::with_capacity(other.len());
    for (u, osup) in other.iter().enumerate() {
        let mut w = vec![0.0; n_other];
        for (k, &oa) in osup.iter().enumerate() {
            w[oa] = sol.z[offsets[u] + k].max(0.0);
        }
        match FiniteDistribution::from_unnormalized(w) {
            Ok(d) => out.push(d),
            Err(_) => return Ok(None),
        }
    }
    Ok(Some(out))
}

enum Solved {
    Equilibrium(AgentProfile),
    Singular,
    Rejected,
}

fn gap_of(values: &[f64], feasible: &[usize], strategy: &FiniteDistribution) -> f64 {
    let best = feasible
        .iter()
        .map(|&a| values[a])
        .fold(f64::NEG_INFINITY, f64::max);
    (best - strategy.expectation(values)).max(0.0)
}

/// Solves for the mixed strategies of the "other" team (supports `other`,
/// `n_other` actions each) that make each agent of the "own" team indifferent
/// over its support `own`. Returns `Err` on a singular system and `Ok(None)`
/// when the solution has negative probabilities.
fn solve_indifference(
    own: &[Vec<usize>],
    other: &[Vec<usize>],
    n_other: usize,
    coef: impl Fn(usize, usize, usize, usize) -> f64,
) -> std::result::Result<Option<Vec<FiniteDistribution>>, ()> {
    let num_prob: usize = other.iter().map(Vec::len).sum();
    let unknowns = num_prob + own.len();
    let equations: usize = own.iter().map(Vec::len).sum::<usize>() + other.len();
    debug_assert_eq!(unknowns, equations);

    let mut offsets = Vec::with_capacity(other.len());
    let mut acc = 0;
    for s in other {
        offsets.push(acc);
        acc += s.len();
    }

    let mut m = DMatrix::<f64>::zeros(equations, unknowns);
    let mut b = DVector::<f64>::zeros(equations);
    let mut row = 0;
    for (t, support) in own.iter().enumerate() {
        for &a in support {
            for (u, osup) in other.iter().enumerate() {
                for (k, &oa) in osup.iter().enumerate() {
                    m[(row, offsets[u] + k)] = coef(t, a, u, oa);
                }
            }
            m[(row, num_prob + t)] = -1.0;
            row += 1;
        }
    }
    for (u, osup) in other.iter().enumerate() {
        for k in 0..osup.len() {
            m[(row, offsets[u] + k)] = 1.0;
        }
        b[row] = 1.0;
        row += 1;
    }

    let lu = m.clone().full_piv_lu();
    let u = lu.u();
    let diag: Vec<f64> = (0..unknowns).map(|i| u[(i, i)].abs()).collect();
    let max = diag.iter().cloned().fold(0.0, f64::max);
    let min = diag.iter().cloned().fold(f64::INFINITY, f64::min);
    if max == 0.0 || min <= SINGULAR_TOL * max.max(1.0) {
        return Err(());
    }
    let Some(x) = lu.solve(&b) else {
        return Err(());
    };
    if (&m * &x - &b).amax() > 1e-8 {
        return Err(());
    }

    let mut out = Vec::with_capacity(other.len());
    for (u, osup) in other.iter().enumerate() {
        let mut w = vec![0.0; n_other];
        for (k, &oa) in osup.iter().enumerate() {
            let p = x[offsets[u] + k];
            if p < -NONNEG_TOL {
                return Ok(None);
            }
            w[oa] = p.max(0.0);
        }
        match FiniteDistribution::from_unnormalized(w) {
            Ok(d) => out.push(d),
            Err(_) => return Ok(None),
        }
    }
    Ok(Some(out))
}

fn same_profile(p: AgentProfile, q: &AgentProfile) -> bool {
    p.defender
        .iter()
        .zip(&q.defender)
        .chain(p.user.iter().zip(&q.user))
        .all(|(a, b)| a.sup_distance(b) <= 1e-9)
}

/// Non-empty subsets of `items`, each sorted, in lexicographic order.
pub(crate) fn subsets(items: &[usize]) -> Vec<Vec<usize>> {
    let n = items.len();
    let mut out: Vec<Vec<usize>> = (1u64..(1u64 << n))
        .map(|mask| {
            (0..n)
                .filter(|i| mask & (1 << i) != 0)
                .map(|i| items[i])
                .collect()
        })
        .collect();
    out.sort();
    out
}

/// Cartesian product of per-agent choice lists.
pub(crate) fn cartesian<T: Clone>(choices: &[Vec<T>]) -> Vec<Vec<T>> {
    let mut out: Vec<Vec<T>> = vec![Vec::new()];
    for options in choices {
        let mut next = Vec::with_capacity(out.len() * options.len());
        for prefix in &out {
            for o in options {
                let mut v = prefix.clone();
                v.push(o.clone());
                next.push(v);
            }
        }
        out = next;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn subsets_are_lexicographic() {
        assert_eq!(
            subsets(&[0, 1, 2]),
            vec![
                vec![0],
                vec![0, 1],
                vec![0, 1, 2],
                vec![0, 2],
                vec![1],
                vec![1, 2],
                vec![2]
            ]
        );
    }

    #[test]
    fn cartesian_product_size() {
        let c = cartesian(&[vec![1, 2], vec![3, 4, 5]]);
        assert_eq!(c.len(), 6);
        assert_eq!(c[0], vec![1, 3]);
        assert_eq!(c[5], vec![2, 5]);
    }

    #[test]
    fn matching_pennies_agent_form() {
        let j = [[1.0, -1.0], [-1.0, 1.0]];
        let form = AgentForm::new(
            vec![vec![0, 1]],
            vec![vec![0, 1]],
            2,
            2,
            |_, a1, _, a2| j[a1][a2],
            |_, a2, _, a1| -j[a1][a2],
        );
        let (eqs, _) = form.enumerate(1e-8).unwrap();
        assert_eq!(eqs.len(), 1);
        assert!((eqs[0].defender[0].get(0) - 0.5).abs() < 1e-12);
        assert!((eqs[0].user[0].get(0) - 0.5).abs() < 1e-12);
    }

    #[test]
    fn unbalanced_supports_solved_by_lp() {
        let form = AgentForm::new(
            vec![vec![0, 1]],
            vec![vec![0, 1, 2]],
            2,
            3,
            |_, _, _, _| 0.0,
            |_, _, _, _| 0.0,
        );
        let p = form
            .solve_supports_lp(&[vec![0, 1]], &[vec![0, 1, 2]], 1e-8)
            .unwrap()
            .expect("zero game is solved by any profile");
        assert_eq!(p.gap, 0.0);
    }

    #[test]
    fn budget_enforced() {
        let f: Vec<usize> = (0..12).collect();
        let form = AgentForm::new(
            vec![f.clone(), f.clone()],
            vec![f.clone(), f],
            12,
            12,
            |_, _, _, _| 0.0,
            |_, _, _, _| 0.0,
        );
        assert!(matches!(form.enumerate(1e-8), Err(GameError::TooLarge(_))));
    }
}
