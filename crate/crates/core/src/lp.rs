//! A small dense simplex solver over exact rationals (two phases, Dantzig's rule with a Bland fallback).
//!
//! Sized for desk-scale systems: a few dozen rows and up to a few thousand columns.

use num_traits::{One, Signed, Zero};

use crate::rational::Rational;

/// `minimize c·v  subject to  A v = b, v ≥ 0`.
#[derive(Clone, Debug)]
pub struct LinearProgram {
    pub a: Vec<Vec<Rational>>,
    pub b: Vec<Rational>,
    pub c: Vec<Rational>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum LpOutcome {
    Optimal { value: Rational, solution: Vec<Rational> },
    Infeasible,
    Unbounded,
}

/// Consecutive degenerate pivots after which the entering rule switches to Bland's.
const DEGENERATE_PIVOTS: usize = 50;

struct Tableau {
    /// Constraint rows; the last entry of each row is the right-hand side.
    rows: Vec<Vec<Rational>>,
    /// Reduced costs; the last entry is minus the objective value.
    objective: Vec<Rational>,
    basis: Vec<usize>,
    width: usize,
}

impl Tableau {
    fn pivot(&mut self, r: usize, c: usize) {
        let inv = self.rows[r][c].recip();
        for v in self.rows[r].iter_mut() {
            *v *= &inv;
        }
        let pivot_row = self.rows[r].clone();
        let nonzero: Vec<usize> = (0..=self.width).filter(|&j| !pivot_row[j].is_zero()).collect();
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i == r || row[c].is_zero() {
                continue;
            }
            let factor = row[c].clone();
            for &j in &nonzero {
                let delta = &factor * &pivot_row[j];
                row[j] -= delta;
            }
        }
        if !self.objective[c].is_zero() {
            let factor = self.objective[c].clone();
            for &j in &nonzero {
                let delta = &factor * &pivot_row[j];
                self.objective[j] -= delta;
            }
        }
        self.basis[r] = c;
    }

    fn set_objective(&mut self, cost: &[Rational]) {
        let mut obj: Vec<Rational> = cost.to_vec();
        obj.push(Rational::zero());
        for (i, row) in self.rows.iter().enumerate() {
            let cb = &cost[self.basis[i]];
            if cb.is_zero() {
                continue;
            }
            for (j, v) in row.iter().enumerate() {
                if !v.is_zero() {
                    obj[j] -= cb * v;
                }
            }
        }
        self.objective = obj;
    }

    /// Entering column: the most negative reduced cost, or the first negative one under Bland's rule.
    fn entering(&self, allowed: usize, bland: bool) -> Option<usize> {
        let mut negative = (0..allowed).filter(|&j| self.objective[j].is_negative());
        match bland {
            true => negative.next(),
            false => negative.min_by(|&a, &b| self.objective[a].cmp(&self.objective[b]).then(a.cmp(&b))),
        }
    }

    /// Runs simplex iterations over the allowed columns. Returns false when unbounded.
    fn optimize(&mut self, allowed: usize) -> bool {
        let mut degenerate = 0;
        loop {
            // Dantzig's rule can cycle on degenerate vertices; Bland's rule cannot
            let Some(enter) = self.entering(allowed, degenerate > DEGENERATE_PIVOTS) else {
                return true;
            };
            let mut leave: Option<(usize, Rational)> = None;
            for (i, row) in self.rows.iter().enumerate() {
                if !row[enter].is_positive() {
                    continue;
                }
                let ratio = &row[self.width] / &row[enter];
                let better = match &leave {
                    None => true,
                    Some((li, best)) => ratio < *best || (ratio == *best && self.basis[i] < self.basis[*li]),
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
            match leave {
                Some((r, ratio)) => {
                    degenerate = if ratio.is_zero() { degenerate + 1 } else { 0 };
                    self.pivot(r, enter);
                }
                None => return false,
            }
        }
    }
}

pub fn solve(lp: &LinearProgram) -> LpOutcome {
    let m = lp.a.len();
    let n = lp.c.len();
    let width = n + m;
    let mut rows = Vec::with_capacity(m);
    for (i, (row, rhs)) in lp.a.iter().zip(&lp.b).enumerate() {
        let flip = rhs.is_negative();
        let mut full: Vec<Rational> = row.iter().map(|v| if flip { -v } else { v.clone() }).collect();
        full.resize(n, Rational::zero());
        full.extend((0..m).map(|k| if k == i { Rational::one() } else { Rational::zero() }));
        full.push(if flip { -rhs } else { rhs.clone() });
        rows.push(full);
    }
    let mut t = Tableau { rows, objective: Vec::new(), basis: (n..width).collect(), width };
    let phase_one: Vec<Rational> = (0..width).map(|j| if j < n { Rational::zero() } else { Rational::one() }).collect();
    t.set_objective(&phase_one);
    t.optimize(width);
    if !t.objective[width].is_zero() {
        return LpOutcome::Infeasible;
    }
    // Drive artificial variables out of the basis, dropping redundant rows.
    let mut r = 0;
    while r < t.rows.len() {
        if t.basis[r] >= n {
            match (0..n).find(|&j| !t.rows[r][j].is_zero()) {
                Some(j) => t.pivot(r, j),
                None => {
                    t.rows.remove(r);
                    t.basis.remove(r);
                    continue;
                }
            }
        }
        r += 1;
    }
    let mut cost = lp.c.clone();
    cost.resize(width, Rational::zero());
    t.set_objective(&cost);
    if !t.optimize(n) {
        return LpOutcome::Unbounded;
    }
    let mut solution = vec![Rational::zero(); n];
    for (i, &j) in t.basis.iter().enumerate() {
        solution[j] = t.rows[i][width].clone();
    }
    let value = -t.objective[width].clone();
    LpOutcome::Optimal { value, solution }
}

/// A basic feasible solution of `A v = b, v ≥ 0`, if one exists.
pub fn feasible_point(a: Vec<Vec<Rational>>, b: Vec<Rational>, columns: usize) -> Option<Vec<Rational>> {
    let lp = LinearProgram { a, b, c: vec![Rational::zero(); columns] };
    match solve(&lp) {
        LpOutcome::Optimal { solution, .. } => Some(solution),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, rat};

    #[test]
    fn small_optimum() {
        // min -x - y  s.t. x + 2y + s1 = 4, 3x + y + s2 = 6
        let lp = LinearProgram {
            a: vec![vec![int(1), int(2), int(1), int(0)], vec![int(3), int(1), int(0), int(1)]],
            b: vec![int(4), int(6)],
            c: vec![int(-1), int(-1), int(0), int(0)],
        };
        match solve(&lp) {
            LpOutcome::Optimal { value, solution } => {
                assert_eq!(value, rat(-14, 5));
                assert_eq!(solution[0], rat(8, 5));
                assert_eq!(solution[1], rat(6, 5));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn infeasible_and_unbounded() {
        let infeasible = LinearProgram { a: vec![vec![int(1)], vec![int(1)]], b: vec![int(1), int(2)], c: vec![int(0)] };
        assert_eq!(solve(&infeasible), LpOutcome::Infeasible);
        let unbounded = LinearProgram { a: vec![vec![int(1), int(-1)]], b: vec![int(0)], c: vec![int(-1), int(0)] };
        assert_eq!(solve(&unbounded), LpOutcome::Unbounded);
    }

    #[test]
    fn redundant_rows_are_tolerated() {
        let a = vec![vec![int(1), int(1)], vec![int(2), int(2)]];
        let point = feasible_point(a, vec![int(1), int(2)], 2).unwrap();
        assert_eq!(&point[0] + &point[1], int(1));
    }
}
