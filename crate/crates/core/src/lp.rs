//! Dense two-phase tableau simplex with Bland's anti-cycling rule.
//!
//! Problems here are tiny (tens of variables), so the tableau is kept dense
//! and every pivot is a full row operation.

use serde::Serialize;

use crate::error::{GameError, Result};

const PIVOT_EPS: f64 = 1e-11;
const COST_EPS: f64 = 1e-10;
const FEAS_EPS: f64 = 1e-8;
const MAX_PIVOTS: usize = 100_000;

/// `maximize c·z  s.t.  A z <= b,  Aeq z = beq,  lower <= z <= upper`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearProgram {
    objective: Vec<f64>,
    le_rows: Vec<(Vec<f64>, f64)>,
    eq_rows: Vec<(Vec<f64>, f64)>,
    lower: Vec<f64>,
    upper: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution {
    pub status: LpStatus,
    pub z: Vec<f64>,
    pub value: f64,
}

impl LinearProgram {
    /// `n` variables, zero objective, bounds `0 <= z`.
    pub fn new(n: usize) -> Self {
        LinearProgram {
            objective: vec![0.0; n],
            le_rows: Vec::new(),
            eq_rows: Vec::new(),
            lower: vec![0.0; n],
            upper: vec![f64::INFINITY; n],
        }
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn maximize(mut self, c: Vec<f64>) -> Self {
        self.objective = c;
        self
    }

    pub fn set_objective(&mut self, c: Vec<f64>) {
        self.objective = c;
    }

    pub fn le(&mut self, row: Vec<f64>, rhs: f64) -> &mut Self {
        self.le_rows.push((row, rhs));
        self
    }

    pub fn ge(&mut self, row: Vec<f64>, rhs: f64) -> &mut Self {
        self.le_rows.push((row.into_iter().map(|a| -a).collect(), -rhs));
        self
    }

    pub fn equals(&mut self, row: Vec<f64>, rhs: f64) -> &mut Self {
        self.eq_rows.push((row, rhs));
        self
    }

    pub fn bounds(&mut self, j: usize, lower: f64, upper: f64) -> &mut Self {
        self.lower[j] = lower;
        self.upper[j] = upper;
        self
    }

    pub fn free(&mut self, j: usize) -> &mut Self {
        self.bounds(j, f64::NEG_INFINITY, f64::INFINITY)
    }

    fn check_dims(&self) -> Result<()> {
        let n = self.num_vars();
        if self.lower.len() != n || self.upper.len() != n {
            return Err(GameError::malformed("bound vectors do not match variable count"));
        }
        for (row, rhs) in self.le_rows.iter().chain(&self.eq_rows) {
            if row.len() != n {
                return Err(GameError::malformed(format!(
                    "constraint row has {} coefficients for {n} variables",
                    row.len()
                )));
            }
            if !rhs.is_finite() || row.iter().any(|a| !a.is_finite()) {
                return Err(GameError::malformed("non-finite constraint data"));
            }
        }
        if self.objective.iter().any(|c| !c.is_finite()) {
            return Err(GameError::malformed("non-finite objective"));
        }
        if self.lower.iter().any(|l| l.is_nan() || *l == f64::INFINITY)
            || self.upper.iter().any(|u| u.is_nan() || *u == f64::NEG_INFINITY)
        {
            return Err(GameError::malformed("invalid variable bounds"));
        }
        Ok(())
    }

    /// Largest violation of any constraint or bound at `z`.
    pub fn max_violation(&self, z: &[f64]) -> f64 {
        let dot = |row: &[f64]| row.iter().zip(z).map(|(a, b)| a * b).sum::<f64>();
        let mut worst: f64 = 0.0;
        for (row, rhs) in &self.le_rows {
            worst = worst.max(dot(row) - rhs);
        }
        for (row, rhs) in &self.eq_rows {
            worst = worst.max((dot(row) - rhs).abs());
        }
        for (j, &v) in z.iter().enumerate() {
            worst = worst.max(self.lower[j] - v).max(v - self.upper[j]);
        }
        worst
    }

    pub fn objective_at(&self, z: &[f64]) -> f64 {
        self.objective.iter().zip(z).map(|(c, v)| c * v).sum()
    }
}

/// `z_j = offset + sum(coef * y_col)` with `y >= 0`.
struct VarMap {
    offset: f64,
    cols: Vec<(usize, f64)>,
}

struct Tableau {
    rows: usize,
    cols: usize,
    /// Row-major `rows x cols` constraint matrix.
    a: Vec<f64>,
    rhs: Vec<f64>,
    basis: Vec<usize>,
}

impl Tableau {
    #[inline]
    fn at(&self, r: usize, c: usize) -> f64 {
        self.a[r * self.cols + c]
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let cols = self.cols;
        let p = self.a[r * cols + c];
        for j in 0..cols {
            self.a[r * cols + j] /= p;
        }
        self.rhs[r] /= p;
        self.a[r * cols + c] = 1.0;
        for i in 0..self.rows {
            if i == r {
                continue;
            }
            let f = self.a[i * cols + c];
            if f == 0.0 {
                continue;
            }
            for j in 0..cols {
                let v = self.a[r * cols + j];
                if v != 0.0 {
                    self.a[i * cols + j] -= f * v;
                }
            }
            self.a[i * cols + c] = 0.0;
            self.rhs[i] -= f * self.rhs[r];
        }
        self.basis[r] = c;
    }

    /// Maximizes `cost · y` over columns with `allowed[c]`. Returns false if unbounded.
    fn run(&mut self, cost: &[f64], allowed: &[bool]) -> Result<bool> {
        for _ in 0..MAX_PIVOTS {
            // Reduced costs d_j = c_j - c_B^T A_j.
            let mut entering = None;
            for j in 0..self.cols {
                if !allowed[j] || self.basis.contains(&j) {
                    continue;
                }
                let mut d = cost[j];
                for r in 0..self.rows {
                    d -= cost[self.basis[r]] * self.at(r, j);
                }
                if d > COST_EPS {
                    entering = Some(j);
                    break;
                }
            }
            let Some(j) = entering else {
                return Ok(true);
            };
            // Ratio test; ties go to the basic variable with the smallest index.
            let mut leave: Option<(usize, f64)> = None;
            for r in 0..self.rows {
                let a = self.at(r, j);
                if a > PIVOT_EPS {
                    let ratio = self.rhs[r] / a;
                    leave = match leave {
                        None => Some((r, ratio)),
                        Some((lr, lratio)) => {
                            if ratio < lratio - 1e-12
                                || (ratio <= lratio + 1e-12 && self.basis[r] < self.basis[lr])
                            {
                                Some((r, ratio))
                            } else {
                                Some((lr, lratio))
                            }
                        }
                    };
                }
            }
            let Some((r, _)) = leave else {
                return Ok(false);
            };
            self.pivot(r, j);
        }
        Err(GameError::Lp("pivot limit reached".into()))
    }
}

/// Solves `p`. Infeasibility and unboundedness are reported through
/// [`LpSolution::status`]; only malformed input is an error.
pub fn solve_lp(p: &LinearProgram) -> Result<LpSolution> {
    p.check_dims()?;
    let n = p.num_vars();

    let mut maps = Vec::with_capacity(n);
    let mut ncols = 0usize;
    let mut bound_rows: Vec<(Vec<(usize, f64)>, f64)> = Vec::new();
    for j in 0..n {
        let (lo, hi) = (p.lower[j], p.upper[j]);
        if lo > hi {
            return Ok(infeasible(n));
        }
        if lo.is_finite() {
            let c = ncols;
            ncols += 1;
            maps.push(VarMap {
                offset: lo,
                cols: vec![(c, 1.0)],
            });
            if hi.is_finite() {
                bound_rows.push((vec![(c, 1.0)], hi - lo));
            }
        } else if hi.is_finite() {
            let c = ncols;
            ncols += 1;
            maps.push(VarMap {
                offset: hi,
                cols: vec![(c, -1.0)],
            });
        } else {
            let (plus, minus) = (ncols, ncols + 1);
            ncols += 2;
            maps.push(VarMap {
                offset: 0.0,
                cols: vec![(plus, 1.0), (minus, -1.0)],
            });
        }
    }
    let structural = ncols;

    enum Kind {
        Le,
        Eq,
    }
    let mut rows: Vec<(Vec<f64>, f64, Kind)> = Vec::new();
    let lift = |row: &[f64], rhs: f64| -> (Vec<f64>, f64) {
        let mut out = vec![0.0; structural];
        let mut b = rhs;
        for (j, &a) in row.iter().enumerate() {
            if a == 0.0 {
                continue;
            }
            b -= a * maps[j].offset;
            for &(c, coef) in &maps[j].cols {
                out[c] += a * coef;
            }
        }
        (out, b)
    };
    for (row, rhs) in &p.le_rows {
        let (r, b) = lift(row, *rhs);
        rows.push((r, b, Kind::Le));
    }
    for (row, rhs) in &p.eq_rows {
        let (r, b) = lift(row, *rhs);
        rows.push((r, b, Kind::Eq));
    }
    for (entries, b) in bound_rows {
        let mut r = vec![0.0; structural];
        for (c, v) in entries {
            r[c] = v;
        }
        rows.push((r, b, Kind::Le));
    }

    // Column layout: structural | slack/surplus (one per Le row) | artificials.
    let m = rows.len();
    let num_slack = rows.iter().filter(|r| matches!(r.2, Kind::Le)).count();
    let needs_art: Vec<bool> = rows
        .iter()
        .map(|(_, b, k)| match k {
            Kind::Le => *b < 0.0,
            Kind::Eq => true,
        })
        .collect();
    let num_art = needs_art.iter().filter(|x| **x).count();
    let cols = structural + num_slack + num_art;

    let mut t = Tableau {
        rows: m,
        cols,
        a: vec![0.0; m * cols],
        rhs: vec![0.0; m],
        basis: vec![0; m],
    };
    let mut slack = structural;
    let mut art = structural + num_slack;
    for (i, (row, b, kind)) in rows.into_iter().enumerate() {
        let sign = if b < 0.0 { -1.0 } else { 1.0 };
        for (c, v) in row.into_iter().enumerate() {
            t.a[i * cols + c] = sign * v;
        }
        t.rhs[i] = sign * b;
        if let Kind::Le = kind {
            t.a[i * cols + slack] = sign;
            if sign > 0.0 {
                t.basis[i] = slack;
            }
            slack += 1;
        }
        if needs_art[i] {
            t.a[i * cols + art] = 1.0;
            t.basis[i] = art;
            art += 1;
        }
    }

    let first_art = structural + num_slack;
    let mut allowed = vec![true; cols];
    if num_art > 0 {
        let mut cost = vec![0.0; cols];
        for c in cost.iter_mut().skip(first_art) {
            *c = -1.0;
        }
        t.run(&cost, &allowed)?;
        let infeas: f64 = (0..m)
            .filter(|&r| t.basis[r] >= first_art)
            .map(|r| t.rhs[r])
            .sum();
        let scale = 1.0 + t.rhs.iter().fold(0.0f64, |a, b| a.max(b.abs()));
        if infeas > FEAS_EPS * scale {
            return Ok(infeasible(n));
        }
        // Drive zero-level artificials out of the basis; drop redundant rows.
        let mut r = 0;
        while r < t.rows {
            if t.basis[r] >= first_art {
                let col = (0..first_art).find(|&c| t.at(r, c).abs() > 1e-9);
                match col {
                    Some(c) => t.pivot(r, c),
                    None => {
                        remove_row(&mut t, r);
                        continue;
                    }
                }
            }
            r += 1;
        }
        for a in allowed.iter_mut().skip(first_art) {
            *a = false;
        }
    }

    let mut cost = vec![0.0; cols];
    for (j, map) in maps.iter().enumerate() {
        for &(c, coef) in &map.cols {
            cost[c] += p.objective[j] * coef;
        }
    }
    if !t.run(&cost, &allowed)? {
        return Ok(LpSolution {
            status: LpStatus::Unbounded,
            z: vec![f64::NAN; n],
            value: f64::INFINITY,
        });
    }

    let mut y = vec![0.0; cols];
    for r in 0..t.rows {
        y[t.basis[r]] = t.rhs[r].max(0.0);
    }
    let z: Vec<f64> = maps
        .iter()
        .map(|m| m.offset + m.cols.iter().map(|&(c, coef)| coef * y[c]).sum::<f64>())
        .collect();
    let value = p.objective_at(&z);
    Ok(LpSolution {
        status: LpStatus::Optimal,
        z,
        value,
    })
}

fn remove_row(t: &mut Tableau, r: usize) {
    let cols = t.cols;
    t.a.drain(r * cols..(r + 1) * cols);
    t.rhs.remove(r);
    t.basis.remove(r);
    t.rows -= 1;
}

fn infeasible(n: usize) -> LpSolution {
    LpSolution {
        status: LpStatus::Infeasible,
        z: vec![f64::NAN; n],
        value: f64::NEG_INFINITY,
    }
}
