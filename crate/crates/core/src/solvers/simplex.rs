//! Dense two-phase simplex with Bland's rule.

use crate::error::{Error, Result};

const COST_TOL: f64 = 1e-10;
const PIVOT_TOL: f64 = 1e-12;
const MAX_PIVOTS: usize = 200_000;
/// Refuse tableaux above this many cells.
pub(crate) const MAX_CELLS: usize = 40_000_000;

/// `max c·x` subject to `A x ≤ b` (with `b ≥ 0`), `Σ x = 1`, `x ≥ 0`.
pub(crate) struct SimplexLp<'a> {
    pub n: usize,
    pub rows: &'a [(Vec<f64>, f64)],
}

#[derive(Debug)]
pub(crate) enum LpOutcome {
    Optimal { x: Vec<f64>, pivots: usize },
    Infeasible { pivots: usize },
}

struct Tableau {
    width: usize,
    cols: usize,
    t: Vec<Vec<f64>>,
    basis: Vec<usize>,
    basic: Vec<bool>,
    allowed: Vec<bool>,
    pivots: usize,
}

impl Tableau {
    fn rhs(&self, i: usize) -> f64 {
        self.t[i][self.cols]
    }

    fn reduced_costs(&self, obj: &[f64]) -> Vec<f64> {
        let mut r = obj.to_vec();
        for (i, row) in self.t.iter().enumerate() {
            let cb = obj[self.basis[i]];
            if cb != 0.0 {
                for j in 0..self.cols {
                    r[j] -= cb * row[j];
                }
            }
        }
        r
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let p = self.t[r][c];
        for v in self.t[r].iter_mut() {
            *v /= p;
        }
        let prow = self.t[r].clone();
        for (i, row) in self.t.iter_mut().enumerate() {
            if i == r {
                continue;
            }
            let f = row[c];
            if f != 0.0 {
                for j in 0..self.width {
                    row[j] -= f * prow[j];
                }
                row[c] = 0.0;
            }
        }
        self.basic[self.basis[r]] = false;
        self.basis[r] = c;
        self.basic[c] = true;
        self.pivots += 1;
    }

    /// Runs primal simplex on `obj` from the current feasible basis.
    fn optimize(&mut self, obj: &[f64]) -> Result<()> {
        loop {
            if self.pivots > MAX_PIVOTS {
                return Err(Error::Solver("simplex pivot limit exceeded".into()));
            }
            let r = self.reduced_costs(obj);
            let Some(enter) = (0..self.cols).find(|&j| self.allowed[j] && !self.basic[j] && r[j] > COST_TOL) else {
                return Ok(());
            };
            let mut leave: Option<(usize, f64)> = None;
            for i in 0..self.t.len() {
                let a = self.t[i][enter];
                if a <= PIVOT_TOL {
                    continue;
                }
                let ratio = self.rhs(i).max(0.0) / a;
                leave = match leave {
                    None => Some((i, ratio)),
                    Some((bi, br)) => {
                        let tie = (ratio - br).abs() <= 1e-12 * (1.0 + br);
                        if ratio < br && !tie || tie && self.basis[i] < self.basis[bi] {
                            Some((i, ratio))
                        } else {
                            Some((bi, br))
                        }
                    }
                };
            }
            let Some((row, _)) = leave else {
                return Err(Error::Solver("linear program is unbounded".into()));
            };
            self.pivot(row, enter);
        }
    }

    fn value_of(&self, j: usize) -> f64 {
        match self.basis.iter().position(|&b| b == j) {
            Some(i) => self.rhs(i),
            None => 0.0,
        }
    }
}

/// Solves the LP for `objectives[0]`, then breaks ties by maximizing each
/// later objective over the optimal face of all earlier ones.
pub(crate) fn solve_lexicographic(lp: &SimplexLp<'_>, objectives: &[Vec<f64>]) -> Result<LpOutcome> {
    let n = lp.n;
    let m = lp.rows.len();
    let cols = n + m + 1;
    if (m + 1) * (cols + 1) > MAX_CELLS {
        return Err(Error::Solver(format!(
            "linear program with {n} variables and {m} constraints exceeds the dense tableau limit"
        )));
    }
    let art = n + m;
    let mut t = Vec::with_capacity(m + 1);
    for (i, (a, b)) in lp.rows.iter().enumerate() {
        debug_assert!(*b >= 0.0);
        let mut row = vec![0.0; cols + 1];
        row[..n].copy_from_slice(a);
        row[n + i] = 1.0;
        row[cols] = *b;
        t.push(row);
    }
    let mut simplex_row = vec![0.0; cols + 1];
    simplex_row[..n].fill(1.0);
    simplex_row[art] = 1.0;
    simplex_row[cols] = 1.0;
    t.push(simplex_row);
    let basis: Vec<usize> = (n..n + m + 1).collect();
    let mut basic = vec![false; cols];
    for &b in &basis {
        basic[b] = true;
    }
    let mut tab = Tableau {
        width: cols + 1,
        cols,
        t,
        basis,
        basic,
        allowed: vec![true; cols],
        pivots: 0,
    };

    let mut phase1 = vec![0.0; cols];
    phase1[art] = -1.0;
    tab.optimize(&phase1)?;
    if tab.value_of(art) > 1e-9 {
        return Ok(LpOutcome::Infeasible { pivots: tab.pivots });
    }
    if let Some(i) = tab.basis.iter().position(|&b| b == art) {
        match (0..n + m).find(|&j| !tab.basic[j] && tab.t[i][j].abs() > 1e-9) {
            Some(j) => tab.pivot(i, j),
            None => {
                tab.t.remove(i);
                tab.basis.remove(i);
                tab.basic[art] = false;
            }
        }
    }
    tab.allowed[art] = false;

    let pad = |o: &Vec<f64>| {
        let mut v = vec![0.0; cols];
        v[..n].copy_from_slice(o);
        v
    };
    let mut prev: Option<Vec<f64>> = None;
    for obj in objectives {
        let obj = pad(obj);
        if let Some(p) = &prev {
            // Freeze every nonbasic column whose entry would lower an
            // earlier objective; what remains is that objective's optimal face.
            let r = tab.reduced_costs(p);
            for j in 0..cols {
                if !tab.basic[j] && r[j] < -COST_TOL {
                    tab.allowed[j] = false;
                }
            }
        }
        tab.optimize(&obj)?;
        prev = Some(obj);
    }

    let x: Vec<f64> = (0..n).map(|j| tab.value_of(j).max(0.0)).collect();
    Ok(LpOutcome::Optimal { x, pivots: tab.pivots })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn solve(n: usize, rows: &[(Vec<f64>, f64)], objs: &[Vec<f64>]) -> LpOutcome {
        solve_lexicographic(&SimplexLp { n, rows }, objs).unwrap()
    }

    #[test]
    fn simplex_vertex() {
        let LpOutcome::Optimal { x, .. } = solve(3, &[], &[vec![0.0, 1.0, 0.5]]) else {
            panic!()
        };
        assert_eq!(x, vec![0.0, 1.0, 0.0]);
    }

    #[test]
    fn capped_mass() {
        // max x1 + x2 with x1 + x2 ≤ 0.3.
        let rows = vec![(vec![0.0, 1.0, 1.0], 0.3)];
        let LpOutcome::Optimal { x, .. } = solve(3, &rows, &[vec![0.0, 1.0, 1.0], vec![0.0, 1.0, 0.0]]) else {
            panic!()
        };
        assert!((x[1] + x[2] - 0.3).abs() < 1e-15);
        assert!((x[1] - 0.3).abs() < 1e-15 && x[2] == 0.0);
    }

    #[test]
    fn lexicographic_tie_break() {
        // Every point is optimal for the zero objective; the tie-break puts
        // all mass on the first variable.
        let LpOutcome::Optimal { x, .. } = solve(3, &[], &[vec![0.0; 3], vec![1.0, 0.0, 0.0]]) else {
            panic!()
        };
        assert_eq!(x, vec![1.0, 0.0, 0.0]);
    }

    #[test]
    fn infeasible() {
        // x0 ≤ 0 and x1 ≤ 0 leave no room on a two-variable simplex.
        let rows = vec![(vec![1.0, 0.0], 0.0), (vec![0.0, 1.0], 0.0)];
        assert!(matches!(solve(2, &rows, &[vec![1.0, 0.0]]), LpOutcome::Infeasible { .. }));
    }
}
