//! Information maximization over the polytope of distributions with bounded
//! complement mass.
//!
//! Atoms that no constraint and no objective can tell apart are merged into
//! classes first, so problem size depends on the structure of the region and
//! not on the universe. Constraints are added lazily: the solvers start from
//! a subset, look for the most violated remaining constraints, and re-solve
//! until none is violated. Implicit classes only ever contribute their most
//! violated member.

mod dual;
mod reduce;
mod region;
mod simplex;

use serde::{Deserialize, Serialize};

pub use region::{feasible, FeasibleRegion};

use crate::error::{Error, Result};
use crate::measure::{renyi_entropy, shannon_entropy, Dist, InfoMeasure, Sample, COMPARE_TOL};
use dual::{DualProblem, Objective};
use reduce::Reduced;
use simplex::{solve_lexicographic, LpOutcome, SimplexLp};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolverStatus {
    Optimal,
    Infeasible,
    ToleranceReached,
}

/// Outcome of an information maximization.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolverReport {
    /// Maximizer; absent when the region is empty.
    pub argmax: Option<Dist>,
    pub value: f64,
    pub status: SolverStatus,
    pub iterations: usize,
    pub residual: f64,
}

impl SolverReport {
    fn infeasible(iterations: usize) -> Self {
        SolverReport {
            argmax: None,
            value: f64::NAN,
            status: SolverStatus::Infeasible,
            iterations,
            residual: f64::INFINITY,
        }
    }
}

/// Explicit rows are all loaded up front below this count.
const EAGER_ROWS: usize = 400;
/// Violated explicit rows added per round.
const ROWS_PER_ROUND: usize = 64;
const MAX_ROUNDS: usize = 2_000;
const CUT_TOL: f64 = 1e-11;

/// Rows currently handed to the inner solver.
struct ActiveSet {
    explicit: Vec<bool>,
    rows: Vec<(Vec<f64>, f64)>,
}

impl ActiveSet {
    fn new(red: &Reduced) -> Self {
        let mut s = ActiveSet {
            explicit: vec![false; red.rows.len()],
            rows: Vec::new(),
        };
        if red.rows.len() <= EAGER_ROWS {
            for r in 0..red.rows.len() {
                s.explicit[r] = true;
                s.rows.push(red.explicit_row(r));
            }
        }
        s
    }

    /// Adds the most violated constraints at `x`; false when none is.
    fn extend(&mut self, red: &Reduced, x: &[f64]) -> bool {
        let mut violated: Vec<(f64, usize)> = Vec::new();
        for (r, (classes, eps)) in red.rows.iter().enumerate() {
            if self.explicit[r] {
                continue;
            }
            let v = classes.iter().map(|&c| x[c]).sum::<f64>() - eps;
            if v > CUT_TOL {
                violated.push((v, r));
            }
        }
        violated.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)));
        let mut added = false;
        for &(_, r) in violated.iter().take(ROWS_PER_ROUND) {
            self.explicit[r] = true;
            self.rows.push(red.explicit_row(r));
            added = true;
        }
        for f in 0..red.families.len() {
            let (row, eps) = red.family_cut(f, x);
            let v = row.iter().zip(x).map(|(a, b)| a * b).sum::<f64>() - eps;
            if v > CUT_TOL && !self.rows.iter().any(|r| r.0 == row) {
                self.rows.push((row, eps));
                added = true;
            }
        }
        added
    }
}

/// Exact LP over class masses for objective `obj`, ties broken towards the
/// lowest-index classes. Returns class masses.
fn solve_lp(red: &Reduced, obj: &[f64]) -> Result<(Option<Vec<f64>>, usize)> {
    let n = red.len();
    let mut objectives = vec![obj.to_vec()];
    for c in 0..n.saturating_sub(1) {
        let mut e = vec![0.0; n];
        e[c] = 1.0;
        objectives.push(e);
    }
    let mut active = ActiveSet::new(red);
    let mut pivots = 0;
    for _ in 0..MAX_ROUNDS {
        let out = solve_lexicographic(&SimplexLp { n, rows: &active.rows }, &objectives)?;
        match out {
            LpOutcome::Infeasible { pivots: p } => return Ok((None, pivots + p)),
            LpOutcome::Optimal { x, pivots: p, .. } => {
                pivots += p;
                if !active.extend(red, &x) {
                    return Ok((Some(x), pivots));
                }
            }
        }
    }
    Err(Error::Solver("constraint generation did not settle".into()))
}

/// Largest mass outside the distinct sample points, solved exactly as a
/// linear program. Among optimal distributions the lexicographically largest
/// weight vector is returned, i.e. mass goes to the lowest-index atoms.
pub fn max_out_of_sample(region: &FeasibleRegion, s: &Sample) -> Result<SolverReport> {
    region.universe().ensure_same(s.universe())?;
    let seen = s.distinct();
    let red = Reduced::new(region, Some(&seen))?;
    let obj: Vec<f64> = red.in_sample.iter().map(|&f| if f { 0.0 } else { 1.0 }).collect();
    let (x, pivots) = solve_lp(&red, &obj)?;
    let Some(x) = x else {
        return Ok(SolverReport::infeasible(pivots));
    };
    let p = red.expand(&x, false)?;
    let value = crate::measure::info(InfoMeasure::OutOfSample, &p, s)?;
    finish(region, p, value, pivots, 0.0, true)
}

/// Maximum Shannon entropy over the region.
pub fn max_entropy(region: &FeasibleRegion) -> Result<SolverReport> {
    concave_max(region, Objective::Shannon)
}

/// Maximum Rényi entropy of order `alpha` over the region. For `α < 1` the
/// objective is concave in `p`; for `α > 1` the solver minimizes the concave
/// surrogate `Σ p^α`, which has the same maximizers.
pub fn max_renyi(region: &FeasibleRegion, alpha: f64) -> Result<SolverReport> {
    InfoMeasure::renyi(alpha)?;
    concave_max(region, Objective::Renyi(alpha))
}

/// Dispatches on the information measure.
pub fn max_info(measure: InfoMeasure, region: &FeasibleRegion, s: &Sample) -> Result<SolverReport> {
    match measure {
        InfoMeasure::OutOfSample => max_out_of_sample(region, s),
        InfoMeasure::Shannon => max_entropy(region),
        InfoMeasure::Renyi { alpha } => max_renyi(region, alpha),
    }
}

fn concave_max(region: &FeasibleRegion, objective: Objective) -> Result<SolverReport> {
    dual::check_objective(objective)?;
    let red = Reduced::new(region, None)?;
    let n = red.len();

    // A feasible point first; it also anchors the fallback below.
    let (anchor, pivots) = solve_lp(&red, &vec![0.0; n])?;
    let Some(anchor) = anchor else {
        return Ok(SolverReport::infeasible(pivots));
    };

    // Classes pinned to zero by an ε = 0 constraint leave the problem.
    let mut zero = vec![false; n];
    for (classes, eps) in &red.rows {
        if *eps <= 0.0 {
            for &c in classes {
                zero[c] = true;
            }
        }
    }
    for cut in &red.families {
        if cut.eps <= 0.0 {
            for &c in &cut.outside {
                zero[c] = true;
            }
            if cut.excluded > 0 {
                for &c in &cut.pool {
                    zero[c] = true;
                }
            }
        }
    }
    let keep: Vec<usize> = (0..n).filter(|&c| !zero[c]).collect();
    let sizes: Vec<f64> = keep.iter().map(|&c| red.size(c)).collect();
    let project = |row: &[f64]| -> Vec<f64> { keep.iter().map(|&c| row[c]).collect() };
    let lift = |y: &[f64]| -> Vec<f64> {
        let mut x = vec![0.0; n];
        for (k, &c) in keep.iter().enumerate() {
            x[c] = y[k];
        }
        x
    };

    let mut active = ActiveSet::new(&red);
    let mut iterations = 0;
    let mut warm: Vec<f64> = Vec::new();
    let mut last = None;
    for _ in 0..MAX_ROUNDS {
        let rows: Vec<(Vec<f64>, f64)> = active
            .rows
            .iter()
            .filter(|(_, eps)| *eps > 0.0)
            .map(|(a, b)| (project(a), *b))
            .collect();
        let out = DualProblem {
            sizes: &sizes,
            rows: &rows,
            objective,
        }
        .solve(Some(&warm))?;
        iterations += out.iterations;
        let x = lift(&out.x);
        let grew = active.extend(&red, &x);
        warm = out.lambda.clone();
        last = Some((x, out.residual, out.converged));
        if !grew {
            break;
        }
    }
    let Some((mut x, residual, converged)) = last else {
        return Err(Error::Solver("no dual rounds ran".into()));
    };

    // If the dual iterate is still outside the region, pull it towards the
    // feasible anchor until it is inside.
    let mut p = red.expand(&x, true)?;
    let mut pulled = false;
    if region.max_violation(&p)? > COMPARE_TOL {
        let (mut lo, mut hi) = (0.0f64, 1.0f64);
        for _ in 0..60 {
            let mid = 0.5 * (lo + hi);
            let mix: Vec<f64> = x.iter().zip(&anchor).map(|(a, b)| (1.0 - mid) * a + mid * b).collect();
            if region.max_violation(&red.expand(&mix, true)?)? <= COMPARE_TOL {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        x = x.iter().zip(&anchor).map(|(a, b)| (1.0 - hi) * a + hi * b).collect();
        p = red.expand(&x, true)?;
        pulled = true;
    }
    let value = match objective {
        Objective::Shannon => shannon_entropy(&p),
        Objective::Renyi(a) => renyi_entropy(&p, a),
    };
    finish(region, p, value, iterations, residual, converged && !pulled)
}

fn finish(
    region: &FeasibleRegion,
    p: Dist,
    value: f64,
    iterations: usize,
    residual: f64,
    converged: bool,
) -> Result<SolverReport> {
    let violation = region.max_violation(&p)?.max(0.0);
    let residual = residual.max(violation);
    let status = if converged && residual <= 1e-9 {
        SolverStatus::Optimal
    } else {
        SolverStatus::ToleranceReached
    };
    Ok(SolverReport {
        argmax: Some(p),
        value,
        status,
        iterations,
        residual,
    })
}
