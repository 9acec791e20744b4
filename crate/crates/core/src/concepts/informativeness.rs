use serde::{Deserialize, Serialize};

use super::class::ConceptClass;
use crate::error::{domain, Result};
use crate::measure::{hall, Dist, COMPARE_TOL};

/// `{T ∈ C : hall(q, T) ≤ xi}`.
pub fn neighborhood(class: &ConceptClass, q: &Dist, xi: f64) -> Result<ConceptClass> {
    class.universe().ensure_same(q.universe())?;
    check_unit(xi, "xi")?;
    let mut keep = Vec::with_capacity(class.len());
    for t in class.concepts() {
        keep.push(hall(q, t)? <= xi + COMPARE_TOL);
    }
    let mut it = keep.into_iter();
    Ok(class.filter(|_| it.next().unwrap_or(false)))
}

/// Outcome of the min-max check behind sufficient informativeness.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Sufficiency {
    /// `min_{p ∈ P} max_{T ∈ neighborhood} hall(p, T)`.
    pub value: f64,
    /// Index in `P` of the first minimizer.
    pub best_hypothesis: usize,
    /// Zero means the neighborhood was empty and the value is 0 by
    /// convention.
    pub neighborhood_size: usize,
}

pub fn sufficiency_value(class: &ConceptClass, hypotheses: &[Dist], q: &Dist, xi: f64) -> Result<Sufficiency> {
    if hypotheses.is_empty() {
        return Err(domain("hypothesis list is empty"));
    }
    let hood = neighborhood(class, q, xi)?;
    let mut best = (f64::INFINITY, 0);
    for (i, p) in hypotheses.iter().enumerate() {
        let mut worst = 0.0f64;
        for t in hood.concepts() {
            worst = worst.max(hall(p, t)?);
        }
        if worst < best.0 {
            best = (worst, i);
        }
    }
    Ok(Sufficiency {
        value: best.0,
        best_hypothesis: best.1,
        neighborhood_size: hood.len(),
    })
}

/// A tabulated function `ξ(ε)`, read as a step function: the value at `ε` is
/// that of the largest tabulated point not above it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<(f64, f64)>", into = "Vec<(f64, f64)>")]
pub struct InformativenessProfile {
    xi: Vec<(f64, f64)>,
}

impl InformativenessProfile {
    pub fn new(mut xi: Vec<(f64, f64)>) -> Result<Self> {
        if xi.is_empty() {
            return Err(domain("informativeness profile is empty"));
        }
        for &(e, x) in &xi {
            check_unit(e, "eps")?;
            check_unit(x, "xi")?;
        }
        xi.sort_by(|a, b| a.0.total_cmp(&b.0));
        if xi.windows(2).any(|w| w[0].0 == w[1].0) {
            return Err(domain("informativeness profile repeats an eps value"));
        }
        Ok(InformativenessProfile { xi })
    }

    pub fn points(&self) -> &[(f64, f64)] {
        &self.xi
    }

    /// `ξ(eps)`; below the first tabulated point the first value is used.
    pub fn xi_at(&self, eps: f64) -> f64 {
        let i = self.xi.partition_point(|&(e, _)| e <= eps);
        self.xi[i.saturating_sub(1)].1
    }

    /// Sufficiency value at every tabulated `ε`, paired with whether it
    /// meets `ε`.
    pub fn check(&self, class: &ConceptClass, hypotheses: &[Dist], q: &Dist) -> Result<Vec<(f64, Sufficiency, bool)>> {
        self.xi
            .iter()
            .map(|&(eps, xi)| {
                let s = sufficiency_value(class, hypotheses, q, xi)?;
                Ok((eps, s, s.value <= eps + COMPARE_TOL))
            })
            .collect()
    }
}

impl TryFrom<Vec<(f64, f64)>> for InformativenessProfile {
    type Error = crate::Error;
    fn try_from(v: Vec<(f64, f64)>) -> Result<Self> {
        InformativenessProfile::new(v)
    }
}

impl From<InformativenessProfile> for Vec<(f64, f64)> {
    fn from(p: InformativenessProfile) -> Self {
        p.xi
    }
}

fn check_unit(x: f64, what: &str) -> Result<()> {
    if (0.0..=1.0).contains(&x) {
        Ok(())
    } else {
        Err(domain(format!("{what} must lie in [0, 1], got {x}")))
    }
}
