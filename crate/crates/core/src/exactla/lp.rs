//! Exact two-phase simplex with Bland's rule.
//!
//! Solves `max c·x` subject to `E x = e`, `G x >= g` over free real
//! variables `x`. Free variables are split as `x = x⁺ − x⁻`.

use num_traits::{One, Signed, Zero};
use serde::Serialize;

use super::rational::Rational;

/// A linear program over free variables.
#[derive(Clone, Debug, Default)]
pub struct LinearProgram {
    pub num_vars: usize,
    /// Objective to maximize; empty means the zero objective.
    pub objective: Vec<Rational>,
    /// Rows `(a, b)` meaning `a·x = b`.
    pub equalities: Vec<(Vec<Rational>, Rational)>,
    /// Rows `(a, b)` meaning `a·x >= b`.
    pub inequalities: Vec<(Vec<Rational>, Rational)>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LpResult {
    pub status: LpStatus,
    /// An optimal vertex when `status == Optimal`.
    pub point: Option<Vec<Rational>>,
    pub objective: Option<Rational>,
}

impl LinearProgram {
    pub fn new(num_vars: usize) -> Self {
        LinearProgram {
            num_vars,
            ..Default::default()
        }
    }

    pub fn maximize(mut self, c: Vec<Rational>) -> Self {
        assert_eq!(c.len(), self.num_vars);
        self.objective = c;
        self
    }

    pub fn eq(&mut self, a: Vec<Rational>, b: Rational) {
        assert_eq!(a.len(), self.num_vars);
        self.equalities.push((a, b));
    }

    pub fn ge(&mut self, a: Vec<Rational>, b: Rational) {
        assert_eq!(a.len(), self.num_vars);
        self.inequalities.push((a, b));
    }

    pub fn le(&mut self, a: Vec<Rational>, b: Rational) {
        self.ge(a.into_iter().map(|x| -x).collect(), -b);
    }

    /// True iff `x` satisfies every constraint exactly.
    pub fn satisfied_by(&self, x: &[Rational]) -> bool {
        let dot = |a: &[Rational]| -> Rational { a.iter().zip(x).map(|(p, q)| p * q).sum() };
        self.equalities.iter().all(|(a, b)| dot(a) == *b)
            && self.inequalities.iter().all(|(a, b)| dot(a) >= *b)
    }

    pub fn objective_at(&self, x: &[Rational]) -> Rational {
        self.objective.iter().zip(x).map(|(p, q)| p * q).sum()
    }

    pub fn solve(&self) -> LpResult {
        lp(self)
    }
}

struct Tableau {
    /// `rows × (cols + 1)`; the last column is the right-hand side.
    t: Vec<Vec<Rational>>,
    basis: Vec<usize>,
    cols: usize,
}

enum Outcome {
    Optimal,
    Unbounded,
}

impl Tableau {
    fn rhs(&self, i: usize) -> &Rational {
        &self.t[i][self.cols]
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let inv = self.t[r][c].recip();
        for x in self.t[r].iter_mut() {
            if !x.is_zero() {
                *x *= &inv;
            }
        }
        let prow = self.t[r].clone();
        for (i, row) in self.t.iter_mut().enumerate() {
            if i == r || row[c].is_zero() {
                continue;
            }
            let f = row[c].clone();
            for (x, p) in row.iter_mut().zip(&prow) {
                if !p.is_zero() {
                    *x -= &f * p;
                }
            }
        }
        self.basis[r] = c;
    }

    /// Maximizes `cost · z` over columns in `allowed` with Bland's rule.
    fn run(&mut self, cost: &[Rational], allowed: &dyn Fn(usize) -> bool) -> Outcome {
        loop {
            // Reduced profit c_j − c_Bᵀ B⁻¹ A_j; enter the first positive one.
            let entering = (0..self.cols).filter(|&j| allowed(j)).find(|&j| {
                if self.basis.contains(&j) {
                    return false;
                }
                let mut z = cost[j].clone();
                for (i, &b) in self.basis.iter().enumerate() {
                    if !cost[b].is_zero() && !self.t[i][j].is_zero() {
                        z -= &cost[b] * &self.t[i][j];
                    }
                }
                z.is_positive()
            });
            let Some(c) = entering else {
                return Outcome::Optimal;
            };
            let mut leave: Option<(Rational, usize, usize)> = None;
            for i in 0..self.t.len() {
                let a = &self.t[i][c];
                if a.is_positive() {
                    let ratio = self.rhs(i) / a;
                    let better = match &leave {
                        None => true,
                        Some((best, _, bidx)) => {
                            ratio < *best || (ratio == *best && self.basis[i] < *bidx)
                        }
                    };
                    if better {
                        leave = Some((ratio, i, self.basis[i]));
                    }
                }
            }
            match leave {
                None => return Outcome::Unbounded,
                Some((_, r, _)) => self.pivot(r, c),
            }
        }
    }
}

/// Solves the program exactly; see [`LinearProgram`].
pub fn lp(prog: &LinearProgram) -> LpResult {
    let m = prog.num_vars;
    let k = prog.inequalities.len();
    let rows: Vec<(&Vec<Rational>, &Rational, Option<usize>)> = prog
        .equalities
        .iter()
        .map(|(a, b)| (a, b, None))
        .chain(
            prog.inequalities
                .iter()
                .enumerate()
                .map(|(s, (a, b))| (a, b, Some(s))),
        )
        .collect();
    let r = rows.len();
    // Columns: x⁺ (m), x⁻ (m), surplus (k), artificial (r).
    let art0 = 2 * m + k;
    let cols = art0 + r;
    let mut t = Vec::with_capacity(r);
    for (i, (a, b, surplus)) in rows.iter().enumerate() {
        let mut row = vec![Rational::zero(); cols + 1];
        for j in 0..m {
            row[j] = a[j].clone();
            row[m + j] = -a[j].clone();
        }
        if let Some(s) = surplus {
            row[2 * m + s] = -Rational::one();
        }
        row[cols] = (*b).clone();
        if b.is_negative() {
            for x in row.iter_mut() {
                *x = -x.clone();
            }
        }
        row[art0 + i] = Rational::one();
        t.push(row);
    }
    let mut tab = Tableau {
        t,
        basis: (art0..art0 + r).collect(),
        cols,
    };

    // Phase 1: maximize −Σ artificials.
    let mut cost1 = vec![Rational::zero(); cols];
    for c in cost1.iter_mut().skip(art0) {
        *c = -Rational::one();
    }
    tab.run(&cost1, &|_| true);
    let infeas: Rational = (0..r)
        .filter(|&i| tab.basis[i] >= art0)
        .map(|i| tab.rhs(i).clone())
        .sum();
    if infeas.is_positive() {
        return LpResult {
            status: LpStatus::Infeasible,
            point: None,
            objective: None,
        };
    }
    // Drive zero-level artificials out of the basis; drop redundant rows.
    let mut i = 0;
    while i < tab.t.len() {
        if tab.basis[i] >= art0 {
            match (0..art0).find(|&j| !tab.t[i][j].is_zero()) {
                Some(j) => tab.pivot(i, j),
                None => {
                    tab.t.remove(i);
                    tab.basis.remove(i);
                    continue;
                }
            }
        }
        i += 1;
    }

    // Phase 2.
    let mut cost2 = vec![Rational::zero(); cols];
    for j in 0..m {
        if let Some(c) = prog.objective.get(j) {
            cost2[j] = c.clone();
            cost2[m + j] = -c.clone();
        }
    }
    match tab.run(&cost2, &|j| j < art0) {
        Outcome::Unbounded => LpResult {
            status: LpStatus::Unbounded,
            point: None,
            objective: None,
        },
        Outcome::Optimal => {
            let mut z = vec![Rational::zero(); cols];
            for (i, &b) in tab.basis.iter().enumerate() {
                z[b] = tab.rhs(i).clone();
            }
            let x: Vec<Rational> = (0..m).map(|j| &z[j] - &z[m + j]).collect();
            let obj = prog.objective_at(&x);
            debug_assert!(prog.satisfied_by(&x));
            LpResult {
                status: LpStatus::Optimal,
                point: Some(x),
                objective: Some(obj),
            }
        }
    }
}
