//! Learning rules: maps from a sample to a distribution.

use std::sync::Arc;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::concepts::ConceptFamily;
use crate::error::{domain, Error, Result};
use crate::measure::{info, Dist, InfoMeasure, Sample};
use crate::solvers::{max_info, FeasibleRegion, SolverReport, SolverStatus};

/// Gap between the constraint level handed to the solver and `ε`.
///
/// The learners must not ε-violate any consistent concept, i.e. keep
/// `hall < ε`. The open condition is realized as the closed constraint
/// `hall ≤ ε − STRICT_MARGIN`, so maxima exist.
pub const STRICT_MARGIN: f64 = 1e-9;

/// The closed constraint level standing in for "below `eps`".
pub fn effective_eps(eps: f64) -> f64 {
    (eps - STRICT_MARGIN).max(0.0)
}

/// How a fixed learner picks its hypothesis.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FixedChoice {
    /// Seeded hash of the sample multiset, reduced modulo `|P|`.
    Hashed { seed: u64 },
    /// Always the hypothesis at this index.
    Constant { index: usize },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum LearnerSpec {
    Empirical,
    ImproperMaxInfo {
        measure: InfoMeasure,
        eps: f64,
        concepts: ConceptFamily,
    },
    ProperMaxInfo {
        measure: InfoMeasure,
        eps: f64,
        concepts: ConceptFamily,
        hypotheses: Arc<Vec<Dist>>,
    },
    Fixed {
        hypotheses: Arc<Vec<Dist>>,
        choice: FixedChoice,
    },
}

impl LearnerSpec {
    pub fn kind(&self) -> &'static str {
        match self {
            LearnerSpec::Empirical => "empirical",
            LearnerSpec::ImproperMaxInfo { .. } => "improper_max_info",
            LearnerSpec::ProperMaxInfo { .. } => "proper_max_info",
            LearnerSpec::Fixed { .. } => "fixed",
        }
    }

    pub fn validate(&self) -> Result<()> {
        let check_eps = |eps: f64| {
            if (0.0..=1.0).contains(&eps) {
                Ok(())
            } else {
                Err(domain(format!("learner eps must lie in [0, 1], got {eps}")))
            }
        };
        let check_hyps = |h: &[Dist]| {
            let Some(first) = h.first() else {
                return Err(domain("hypothesis class is empty"));
            };
            for p in h {
                first.universe().ensure_same(p.universe())?;
            }
            Ok(())
        };
        match self {
            LearnerSpec::Empirical => Ok(()),
            LearnerSpec::ImproperMaxInfo { eps, .. } => check_eps(*eps),
            LearnerSpec::ProperMaxInfo {
                eps,
                concepts,
                hypotheses,
                ..
            } => {
                check_eps(*eps)?;
                check_hyps(hypotheses)?;
                concepts.universe().ensure_same(hypotheses[0].universe())
            }
            LearnerSpec::Fixed { hypotheses, choice } => {
                check_hyps(hypotheses)?;
                match choice {
                    FixedChoice::Constant { index } if *index >= hypotheses.len() => Err(domain(format!(
                        "constant choice {index} out of range for {} hypotheses",
                        hypotheses.len()
                    ))),
                    _ => Ok(()),
                }
            }
        }
    }
}

/// What a learner produced, with enough context to audit the run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LearnedModel {
    pub dist: Dist,
    pub solver_report: Option<SolverReport>,
    /// Size of the version space, saturating.
    pub version_space_size: u64,
    /// Index in `P` of the returned hypothesis, for proper and fixed rules.
    pub hypothesis_index: Option<usize>,
    /// No hypothesis met the constraints; the min-max fallback was used.
    pub relaxed: bool,
    /// The version space was empty, so nothing constrained the output.
    pub empty_version_space: bool,
}

impl LearnedModel {
    fn plain(dist: Dist) -> Self {
        LearnedModel {
            dist,
            solver_report: None,
            version_space_size: 0,
            hypothesis_index: None,
            relaxed: false,
            empty_version_space: false,
        }
    }
}

pub fn learn(spec: &LearnerSpec, s: &Sample) -> Result<LearnedModel> {
    spec.validate()?;
    match spec {
        LearnerSpec::Empirical => learn_empirical(s),
        LearnerSpec::ImproperMaxInfo { .. } => learn_improper(spec, s),
        LearnerSpec::ProperMaxInfo { .. } => learn_proper(spec, s),
        LearnerSpec::Fixed { .. } => learn_fixed(spec, s),
    }
}

/// Empirical distribution of the sample.
pub fn learn_empirical(s: &Sample) -> Result<LearnedModel> {
    if s.is_empty() {
        return Err(domain("empirical distribution of an empty sample"));
    }
    let mut pts = s.points().to_vec();
    pts.sort_unstable();
    let n = pts.len() as f64;
    let mut pairs: Vec<(usize, f64)> = Vec::new();
    for chunk in pts.chunk_by(|a, b| a == b) {
        pairs.push((chunk[0], chunk.len() as f64 / n));
    }
    Ok(LearnedModel::plain(Dist::new(s.universe(), pairs)?))
}

/// Maximizes information over every distribution that stays below `eps`
/// against all concepts consistent with the sample.
pub fn learn_improper(spec: &LearnerSpec, s: &Sample) -> Result<LearnedModel> {
    let LearnerSpec::ImproperMaxInfo { measure, eps, concepts } = spec else {
        return Err(domain(format!("improper learner given a {} spec", spec.kind())));
    };
    let vs = concepts.version_space(s)?;
    let region = FeasibleRegion::from_family(&vs, effective_eps(*eps))?;
    let report = max_info(*measure, &region, s)?;
    if report.status == SolverStatus::Infeasible {
        return Err(Error::Solver(format!("no distribution stays below eps = {eps}")));
    }
    Ok(LearnedModel {
        dist: report.argmax.clone().expect("feasible report carries a maximizer"),
        solver_report: Some(report),
        version_space_size: saturate(vs.len()),
        hypothesis_index: None,
        relaxed: false,
        empty_version_space: vs.is_empty(),
    })
}

/// Most informative hypothesis in `P` that stays below `eps` against the
/// version space, first in `P` order among ties. When none qualifies, the
/// hypothesis with the smallest worst-case rate is returned and flagged.
pub fn learn_proper(spec: &LearnerSpec, s: &Sample) -> Result<LearnedModel> {
    let LearnerSpec::ProperMaxInfo {
        measure,
        eps,
        concepts,
        hypotheses,
    } = spec
    else {
        return Err(domain(format!("proper learner given a {} spec", spec.kind())));
    };
    if hypotheses.is_empty() {
        return Err(domain("hypothesis class is empty"));
    }
    let vs = concepts.version_space(s)?;
    let level = effective_eps(*eps);
    let mut best_feasible: Option<(f64, usize)> = None;
    let mut best_relaxed: Option<(f64, usize)> = None;
    for (i, p) in hypotheses.iter().enumerate() {
        let worst = vs.max_hall(p)?.map_or(0.0, |(h, _)| h);
        if worst <= level + 1e-12 {
            let v = info(*measure, p, s)?;
            if best_feasible.is_none_or(|(b, _)| v > b + 1e-12) {
                best_feasible = Some((v, i));
            }
        } else if best_relaxed.is_none_or(|(b, _)| worst < b) {
            best_relaxed = Some((worst, i));
        }
    }
    let (index, relaxed) = match (best_feasible, best_relaxed) {
        (Some((_, i)), _) => (i, false),
        (None, Some((_, i))) => (i, true),
        (None, None) => unreachable!("P is nonempty"),
    };
    Ok(LearnedModel {
        dist: hypotheses[index].clone(),
        solver_report: None,
        version_space_size: saturate(vs.len()),
        hypothesis_index: Some(index),
        relaxed,
        empty_version_space: vs.is_empty(),
    })
}

/// A deterministic stand-in for an arbitrary proper learner.
pub fn learn_fixed(spec: &LearnerSpec, s: &Sample) -> Result<LearnedModel> {
    let LearnerSpec::Fixed { hypotheses, choice } = spec else {
        return Err(domain(format!("fixed learner given a {} spec", spec.kind())));
    };
    if hypotheses.is_empty() {
        return Err(domain("hypothesis class is empty"));
    }
    let index = match *choice {
        FixedChoice::Constant { index } => index,
        FixedChoice::Hashed { seed } => (sample_hash(s, seed) % hypotheses.len() as u64) as usize,
    };
    let p = hypotheses
        .get(index)
        .ok_or_else(|| domain(format!("hypothesis index {index} out of range")))?;
    let mut m = LearnedModel::plain(p.clone());
    m.hypothesis_index = Some(index);
    Ok(m)
}

/// Seeded hash of the sample as a multiset (order does not matter).
pub fn sample_hash(s: &Sample, seed: u64) -> u64 {
    let mut pts = s.points().to_vec();
    pts.sort_unstable();
    let mut h = Sha256::new();
    h.update(seed.to_le_bytes());
    for p in pts {
        h.update((p as u64).to_le_bytes());
    }
    let d = h.finalize();
    let mut b = [0u8; 8];
    b.copy_from_slice(&d[..8]);
    u64::from_le_bytes(b)
}

fn saturate(n: u128) -> u64 {
    u64::try_from(n).unwrap_or(u64::MAX)
}
