//! Dual projected-Newton method for separable concave objectives over the
//! simplex with linear upper-bound constraints.
//!
//! For multipliers `λ ≥ 0` the inner problem `max_{P ∈ Δ} F(P) − λ·(A P − b)`
//! has a closed-form or one-dimensional solution; the dual function is
//! smooth and convex, and is minimized with Newton steps on the free
//! multipliers plus Armijo backtracking along the projection arc.

use crate::error::{Error, Result};

/// Objective over class masses `P_c` with class sizes `s_c`, assuming mass
/// is spread uniformly inside each class.
#[derive(Clone, Copy, Debug, PartialEq)]
pub(crate) enum Objective {
    /// `Σ −P log(P / s)`.
    Shannon,
    /// `±Σ s^{1−α} P^α`, signed to be concave.
    Renyi(f64),
}

pub(crate) struct DualProblem<'a> {
    pub sizes: &'a [f64],
    pub rows: &'a [(Vec<f64>, f64)],
    pub objective: Objective,
}

pub(crate) struct DualOutcome {
    pub x: Vec<f64>,
    pub lambda: Vec<f64>,
    pub iterations: usize,
    pub residual: f64,
    pub converged: bool,
}

pub(crate) const MAX_ITERATIONS: usize = 10_000;
const TARGET: f64 = 1e-10;

struct Inner {
    x: Vec<f64>,
    /// `−dP/d(score)` diagonal part.
    w: Vec<f64>,
    dual: f64,
}

impl DualProblem<'_> {
    fn scores(&self, lambda: &[f64]) -> Vec<f64> {
        let mut s = vec![0.0; self.sizes.len()];
        for ((a, _), &l) in self.rows.iter().zip(lambda) {
            if l != 0.0 {
                for (sc, &ac) in s.iter_mut().zip(a) {
                    *sc += l * ac;
                }
            }
        }
        s
    }

    fn inner(&self, lambda: &[f64]) -> Inner {
        let score = self.scores(lambda);
        let lb: f64 = self.rows.iter().zip(lambda).map(|((_, b), l)| b * l).sum();
        match self.objective {
            Objective::Shannon => {
                // P_c ∝ s_c e^{−score_c}, shifted for stability.
                let shift = score.iter().copied().fold(f64::INFINITY, f64::min);
                let e: Vec<f64> = score
                    .iter()
                    .zip(self.sizes)
                    .map(|(s, z)| z * (-(s - shift)).exp())
                    .collect();
                let z: f64 = e.iter().sum();
                let x: Vec<f64> = e.iter().map(|v| v / z).collect();
                Inner {
                    w: x.clone(),
                    x,
                    dual: z.ln() - shift + lb,
                }
            }
            Objective::Renyi(alpha) => self.renyi_inner(alpha, &score, lb),
        }
    }

    fn renyi_inner(&self, alpha: f64, score: &[f64], lb: f64) -> Inner {
        let beta = 1.0 / (alpha - 1.0);
        let mass = |nu: f64| -> Vec<f64> {
            score
                .iter()
                .zip(self.sizes)
                .map(|(&s, &z)| {
                    let arg = s + nu;
                    if alpha < 1.0 {
                        if arg > 0.0 { z * (arg / alpha).powf(beta) } else { f64::INFINITY }
                    } else if arg < 0.0 {
                        z * (-arg / alpha).powf(beta)
                    } else {
                        0.0
                    }
                })
                .collect()
        };
        let total = |nu: f64| mass(nu).iter().sum::<f64>();
        let smin = score.iter().copied().fold(f64::INFINITY, f64::min);
        // Total mass is decreasing in ν; bracket the root of total = 1.
        let edge = -smin;
        let (mut lo, mut hi) = (edge, edge);
        let mut step = 1.0;
        if alpha < 1.0 {
            while total(hi) > 1.0 {
                hi = edge + step;
                step *= 2.0;
            }
        } else {
            while total(lo) < 1.0 {
                lo = edge - step;
                step *= 2.0;
            }
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if total(mid) > 1.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let nu = if alpha < 1.0 { hi } else { lo };
        let mut x = mass(nu);
        let t: f64 = x.iter().sum();
        for v in &mut x {
            *v /= t;
        }
        let sign = if alpha < 1.0 { 1.0 } else { -1.0 };
        let mut f = 0.0;
        let mut w = vec![0.0; x.len()];
        for c in 0..x.len() {
            let z = self.sizes[c];
            if x[c] > 0.0 {
                f += sign * z.powf(1.0 - alpha) * x[c].powf(alpha) - score[c] * x[c];
                w[c] = x[c] / ((alpha - 1.0).abs() * (score[c] + nu).abs().max(1e-300));
            }
        }
        Inner { x, w, dual: f + lb }
    }

    pub fn solve(&self, warm: Option<&[f64]>) -> Result<DualOutcome> {
        let m = self.rows.len();
        let mut lambda = vec![0.0; m];
        if let Some(w) = warm {
            for (l, v) in lambda.iter_mut().zip(w) {
                *l = v.max(0.0);
            }
        }
        let mut cur = self.inner(&lambda);
        let mut iterations = 0;
        loop {
            let grad = self.gradient(&cur.x);
            let residual = kkt_residual(&lambda, &grad);
            if residual <= TARGET || iterations >= MAX_ITERATIONS {
                return Ok(DualOutcome {
                    x: cur.x,
                    lambda,
                    iterations,
                    residual,
                    converged: residual <= TARGET,
                });
            }
            iterations += 1;

            let free: Vec<usize> = (0..m).filter(|&i| lambda[i] > 0.0 || grad[i] < 0.0).collect();
            let dir = self.newton_direction(&free, &cur, &grad);
            let mut moved = false;
            for d in [dir, free.iter().map(|&i| -grad[i]).collect()] {
                let mut t = 1.0;
                while t > 1e-20 {
                    let mut trial = lambda.clone();
                    for (k, &i) in free.iter().enumerate() {
                        trial[i] = (lambda[i] + t * d[k]).max(0.0);
                    }
                    let next = self.inner(&trial);
                    let decrease: f64 = (0..m).map(|i| grad[i] * (trial[i] - lambda[i])).sum();
                    // Close to the optimum the dual change drops below its
                    // rounding error; a clear drop in the residual counts then.
                    let armijo = next.dual <= cur.dual + 1e-4 * decrease;
                    let flat = next.dual <= cur.dual + 1e-12 * (1.0 + cur.dual.abs());
                    let sharper = || flat && kkt_residual(&trial, &self.gradient(&next.x)) <= 0.5 * residual;
                    if trial != lambda && (armijo || sharper()) {
                        lambda = trial;
                        cur = next;
                        moved = true;
                        break;
                    }
                    t *= 0.5;
                }
                if moved {
                    break;
                }
            }
            if !moved {
                return Ok(DualOutcome {
                    x: cur.x,
                    lambda,
                    iterations,
                    residual,
                    converged: false,
                });
            }
        }
    }

    fn gradient(&self, x: &[f64]) -> Vec<f64> {
        self.rows
            .iter()
            .map(|(a, b)| b - a.iter().zip(x).map(|(u, v)| u * v).sum::<f64>())
            .collect()
    }

    fn newton_direction(&self, free: &[usize], cur: &Inner, grad: &[f64]) -> Vec<f64> {
        let k = free.len();
        let wsum: f64 = cur.w.iter().sum();
        // A_F (diag w − w wᵀ / W) A_Fᵀ
        let aw: Vec<f64> = free
            .iter()
            .map(|&i| self.rows[i].0.iter().zip(&cur.w).map(|(a, w)| a * w).sum())
            .collect();
        let mut h = vec![0.0; k * k];
        for r in 0..k {
            let ar = &self.rows[free[r]].0;
            for s in 0..=r {
                let as_ = &self.rows[free[s]].0;
                let mut v = 0.0;
                for c in 0..cur.w.len() {
                    v += ar[c] * as_[c] * cur.w[c];
                }
                if wsum > 0.0 {
                    v -= aw[r] * aw[s] / wsum;
                }
                h[r * k + s] = v;
                h[s * k + r] = v;
            }
        }
        let rhs: Vec<f64> = free.iter().map(|&i| -grad[i]).collect();
        let trace: f64 = (0..k).map(|i| h[i * k + i]).sum();
        let mut reg = 1e-12 * (1.0 + trace / k.max(1) as f64);
        for _ in 0..20 {
            if let Some(d) = cholesky_solve(&h, k, reg, &rhs) {
                return d;
            }
            reg *= 100.0;
        }
        rhs
    }
}

/// Largest of: projected dual gradient, primal infeasibility and
/// complementary slackness.
fn kkt_residual(lambda: &[f64], grad: &[f64]) -> f64 {
    let mut r = 0.0f64;
    for (&l, &g) in lambda.iter().zip(grad) {
        let pg = if l > 0.0 { g.abs() } else { (-g).max(0.0) };
        r = r.max(pg).max((l * g).abs());
    }
    r
}

fn cholesky_solve(h: &[f64], k: usize, reg: f64, rhs: &[f64]) -> Option<Vec<f64>> {
    let mut l = vec![0.0; k * k];
    for i in 0..k {
        for j in 0..=i {
            let mut s = h[i * k + j];
            if i == j {
                s += reg;
            }
            for p in 0..j {
                s -= l[i * k + p] * l[j * k + p];
            }
            if i == j {
                if s <= 0.0 || !s.is_finite() {
                    return None;
                }
                l[i * k + i] = s.sqrt();
            } else {
                l[i * k + j] = s / l[j * k + j];
            }
        }
    }
    let mut y = rhs.to_vec();
    for i in 0..k {
        for p in 0..i {
            y[i] -= l[i * k + p] * y[p];
        }
        y[i] /= l[i * k + i];
    }
    for i in (0..k).rev() {
        for p in i + 1..k {
            y[i] -= l[p * k + i] * y[p];
        }
        y[i] /= l[i * k + i];
    }
    Some(y)
}

pub(crate) fn check_objective(o: Objective) -> Result<()> {
    if let Objective::Renyi(a) = o {
        if !(a > 0.0 && (a - 1.0).abs() > 1e-9 && a.is_finite()) {
            return Err(Error::Solver(format!("invalid Rényi order {a}")));
        }
    }
    Ok(())
}
