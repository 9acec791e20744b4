use serde::{Deserialize, Serialize};

use super::numeric::neumaier_sum;
use super::{knapsack, Dist, EventSet};
use crate::error::{domain, Result};

/// Hallucination rate `hall(p, T) = p[X \ T]`.
pub fn hall(p: &Dist, facts: &EventSet) -> Result<f64> {
    p.universe().ensure_same(facts.universe())?;
    Ok(p.mass_split(facts).1)
}

/// Relative hallucination rate: the largest `p[A]` over events `A` with
/// `q[A] ≤ eps`, computed exactly.
///
/// Atoms that `q` ignores are always taken. The rest is a 0/1 knapsack that is
/// solved by enumeration or meet-in-the-middle; when it is too large for
/// either, [`crate::Error::ExactSearchInfeasible`] is returned instead of an
/// approximation.
pub fn hall_eps(p: &Dist, q: &Dist, eps: f64) -> Result<f64> {
    p.universe().ensure_same(q.universe())?;
    if !(0.0..=1.0).contains(&eps) {
        return Err(domain(format!("eps must lie in [0, 1], got {eps}")));
    }
    knapsack::relative_hallucination(p, q, eps)
}

/// Total variation distance `½ Σ |p − q|`.
pub fn tv(p: &Dist, q: &Dist) -> Result<f64> {
    p.universe().ensure_same(q.universe())?;
    let mut diffs = Vec::with_capacity(p.support_len() + q.support_len());
    merge_supports(p, q, |_, a, b| diffs.push((a - b).abs()));
    Ok((0.5 * neumaier_sum(diffs)).min(1.0))
}

/// `KL(p ‖ q)` in nats; `+∞` when `p` charges an atom `q` does not.
pub fn kl(p: &Dist, q: &Dist) -> Result<f64> {
    p.universe().ensure_same(q.universe())?;
    let mut terms = Vec::with_capacity(p.support_len());
    let mut infinite = false;
    merge_supports(p, q, |_, a, b| {
        if a > 0.0 {
            if b > 0.0 {
                terms.push(a * (a / b).ln());
            } else {
                infinite = true;
            }
        }
    });
    if infinite {
        return Ok(f64::INFINITY);
    }
    Ok(neumaier_sum(terms).max(0.0))
}

/// Walks the union of both supports in atom order.
pub(crate) fn merge_supports(p: &Dist, q: &Dist, mut f: impl FnMut(usize, f64, f64)) {
    let (pa, pw) = (p.support_atoms(), p.support_weights());
    let (qa, qw) = (q.support_atoms(), q.support_weights());
    let (mut i, mut j) = (0, 0);
    while i < pa.len() || j < qa.len() {
        if j == qa.len() || (i < pa.len() && pa[i] < qa[j]) {
            f(pa[i], pw[i], 0.0);
            i += 1;
        } else if i == pa.len() || qa[j] < pa[i] {
            f(qa[j], 0.0, qw[j]);
            j += 1;
        } else {
            f(pa[i], pw[i], qw[j]);
            i += 1;
            j += 1;
        }
    }
}

/// What a hallucination score is measured against.
#[derive(Clone, Copy, Debug)]
pub enum HallTarget<'a> {
    /// Absolute rate against a facts set.
    Facts(&'a EventSet),
    /// Relative rate against a demonstrator at level `eps`.
    Relative { q: &'a Dist, eps: f64 },
}

impl HallTarget<'_> {
    pub fn score(&self, p: &Dist) -> Result<f64> {
        match *self {
            HallTarget::Facts(t) => hall(p, t),
            HallTarget::Relative { q, eps } => hall_eps(p, q, eps),
        }
    }
}

/// The two halves of the agnostic comparison: the learned model's score and
/// the best score attainable inside the hypothesis class.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AgnosticScores {
    pub learned: f64,
    pub best_in_class: f64,
}

impl AgnosticScores {
    /// `learned − α · best_in_class`.
    pub fn excess(&self, alpha: f64) -> f64 {
        self.learned - alpha * self.best_in_class
    }
}

pub fn agnostic_excess(p_hat: &Dist, class: &[Dist], target: HallTarget<'_>) -> Result<AgnosticScores> {
    if class.is_empty() {
        return Err(domain("hypothesis class is empty"));
    }
    let learned = target.score(p_hat)?;
    let mut best = f64::INFINITY;
    for p in class {
        best = best.min(target.score(p)?);
    }
    Ok(AgnosticScores {
        learned,
        best_in_class: best,
    })
}

/// Largest `σ` with `p[A] ≤ q[A] / σ` for every event, i.e. the minimum of
/// `q[x] / p[x]` over the support of `p`. Zero when `p` charges a `q`-null atom.
pub fn smoothness_certificate(p: &Dist, q: &Dist) -> Result<f64> {
    p.universe().ensure_same(q.universe())?;
    let mut sigma = f64::INFINITY;
    merge_supports(p, q, |_, a, b| {
        if a > 0.0 {
            sigma = sigma.min(b / a);
        }
    });
    Ok(sigma)
}
