use rand::seq::index;
use serde::{Deserialize, Serialize};

use super::class::ConceptClass;
use crate::error::{domain, Error, Result};
use crate::measure::{EventSet, Universe};
use crate::rng;

pub const DEFAULT_MAX_TRIES: usize = 10_000;

/// How a packing was obtained.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PackingProvenance {
    pub seed: u64,
    /// Total number of candidate sets drawn.
    pub tries: usize,
    pub achieved_size: usize,
    /// `√(1/(4d)) · e^{d/16}`.
    pub target_size: f64,
}

pub fn packing_target(d: usize) -> f64 {
    (1.0 / (4.0 * d as f64)).sqrt() * (d as f64 / 16.0).exp()
}

/// Greedy random packing of `d/2`-subsets of `[d]` with pairwise
/// intersections at most `d/4`.
///
/// Candidates are drawn uniformly; a candidate is kept when it is new and
/// compatible with everything kept so far. Sampling stops after `max_tries`
/// consecutive rejections.
pub fn packing_construct(d: usize, seed: u64, max_tries: usize) -> Result<(ConceptClass, PackingProvenance)> {
    if d < 4 || d % 4 != 0 {
        return Err(domain(format!("packing needs d >= 4 divisible by 4, got {d}")));
    }
    let uni = Universe::new(d)?;
    let mut rng = rng::stream(seed, "packing");
    let mut kept: Vec<EventSet> = Vec::new();
    let mut tries = 0;
    let mut rejected_in_a_row = 0;
    while rejected_in_a_row < max_tries {
        tries += 1;
        let mut members = index::sample(&mut rng, d, d / 2).into_vec();
        members.sort_unstable();
        let cand = EventSet::new(&uni, members)?;
        if kept.iter().all(|t| t.intersection_len(&cand) <= d / 4) {
            kept.push(cand);
            rejected_in_a_row = 0;
        } else {
            rejected_in_a_row += 1;
        }
    }
    if kept.is_empty() {
        return Err(Error::Construction("packing found no sets".into()));
    }
    let prov = PackingProvenance {
        seed,
        tries,
        achieved_size: kept.len(),
        target_size: packing_target(d),
    };
    Ok((ConceptClass::new(format!("packing-{d}"), &uni, kept)?, prov))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn check(c: &ConceptClass, d: usize) {
        for (i, a) in c.concepts().iter().enumerate() {
            assert_eq!(a.len(), d / 2);
            for b in &c.concepts()[i + 1..] {
                let both = a.members().iter().filter(|x| b.members().contains(x)).count();
                assert!(both <= d / 4);
            }
        }
    }

    #[test]
    fn small_packings() {
        let (c, prov) = packing_construct(4, 1, 200).unwrap();
        assert!(c.len() >= 2);
        assert_eq!(prov.achieved_size, c.len());
        check(&c, 4);
    }

    #[test]
    fn d64_meets_target() {
        let (c, prov) = packing_construct(64, 7, DEFAULT_MAX_TRIES).unwrap();
        assert!((prov.target_size - 3.412_384_6).abs() < 1e-6);
        assert!(c.len() >= 4);
        check(&c, 64);
    }

    #[test]
    fn seeded() {
        let a = packing_construct(16, 3, 500).unwrap();
        let b = packing_construct(16, 3, 500).unwrap();
        assert_eq!(a, b);
        assert!(packing_construct(6, 3, 10).is_err());
    }
}
