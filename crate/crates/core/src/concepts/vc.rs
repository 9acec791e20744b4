use serde::{Deserialize, Serialize};

use super::class::{for_each_combination, ConceptClass};
use crate::error::{domain, Result};
use crate::measure::EventSet;

/// Largest set size `shatters` and `vc_dimension` will examine.
pub const MAX_SHATTER_SIZE: usize = 20;

/// Result of a capped VC-dimension search.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VcDimension {
    pub value: usize,
    /// The cap itself was shattered, so the true dimension may be larger.
    pub at_least: bool,
}

impl std::fmt::Display for VcDimension {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.at_least {
            write!(f, ">= {}", self.value)
        } else {
            write!(f, "{}", self.value)
        }
    }
}

/// Concept memberships restricted to a fixed list of atoms, one bit row per
/// concept.
struct Membership {
    words: usize,
    rows: Vec<u64>,
}

impl Membership {
    fn new(class: &ConceptClass, atoms: &[usize]) -> Self {
        let words = atoms.len().div_ceil(64).max(1);
        let mut rows = vec![0u64; words * class.len()];
        for (c, t) in class.concepts().iter().enumerate() {
            for (i, &a) in atoms.iter().enumerate() {
                if t.contains(a) {
                    rows[c * words + i / 64] |= 1 << (i % 64);
                }
            }
        }
        Membership { words, rows }
    }

    fn bit(&self, concept: usize, i: usize) -> bool {
        self.rows[concept * self.words + i / 64] >> (i % 64) & 1 == 1
    }

    /// Whether the atoms at positions `idx` are shattered.
    fn shatters(&self, concepts: usize, idx: &[usize]) -> bool {
        let needed = 1usize << idx.len();
        if concepts < needed {
            return false;
        }
        let mut seen = vec![false; needed];
        let mut count = 0;
        for c in 0..concepts {
            let mut pattern = 0usize;
            for (j, &i) in idx.iter().enumerate() {
                if self.bit(c, i) {
                    pattern |= 1 << j;
                }
            }
            if !seen[pattern] {
                seen[pattern] = true;
                count += 1;
                if count == needed {
                    return true;
                }
            }
        }
        false
    }
}

/// Whether every subset of `s` equals `T ∩ s` for some concept `T`.
pub fn shatters(class: &ConceptClass, s: &EventSet) -> Result<bool> {
    class.universe().ensure_same(s.universe())?;
    if s.len() > MAX_SHATTER_SIZE {
        return Err(domain(format!(
            "cannot test shattering of {} atoms (limit {MAX_SHATTER_SIZE})",
            s.len()
        )));
    }
    let m = Membership::new(class, s.members());
    let idx: Vec<usize> = (0..s.len()).collect();
    Ok(m.shatters(class.len(), &idx))
}

/// VC dimension by exhaustive search up to `cap`.
///
/// Sizes are tried in increasing order and subsets in lexicographic order,
/// stopping at the first shattered witness of each size. Atoms contained in
/// all concepts or in none can never be in a shattered set and are skipped.
/// An empty class has dimension 0 by convention.
pub fn vc_dimension(class: &ConceptClass, cap: usize) -> Result<VcDimension> {
    if cap > MAX_SHATTER_SIZE {
        return Err(domain(format!("VC cap {cap} exceeds {MAX_SHATTER_SIZE}")));
    }
    let n = class.len();
    let informative: Vec<usize> = (0..class.universe().size())
        .filter(|&a| {
            let hits = class.concepts().iter().filter(|t| t.contains(a)).count();
            hits > 0 && hits < n
        })
        .collect();
    let m = Membership::new(class, &informative);
    for k in 1..=cap {
        if k > informative.len() || (1u128 << k) > n as u128 {
            return Ok(VcDimension { value: k - 1, at_least: false });
        }
        let mut found = false;
        for_each_combination(informative.len(), k, |idx| {
            found = m.shatters(n, idx);
            !found
        });
        if !found {
            return Ok(VcDimension { value: k - 1, at_least: false });
        }
    }
    Ok(VcDimension { value: cap, at_least: cap > 0 || n > 0 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::concepts::KSubsetClass;
    use crate::measure::Universe;

    fn t3_class(d: usize) -> ConceptClass {
        let uni = Universe::new(2 * d + 1).unwrap();
        let core = EventSet::new(&uni, [0]).unwrap();
        let pool = EventSet::range(&uni, 1, 2 * d + 1).unwrap();
        KSubsetClass::new("t3", core, pool, d).unwrap().to_explicit(100_000).unwrap()
    }

    #[test]
    fn empty_set_is_shattered() {
        let c = t3_class(2);
        assert!(shatters(&c, &EventSet::empty(c.universe())).unwrap());
    }

    #[test]
    fn theorem3_class_d2_shatters_pairs() {
        // Oracle: enumerate T ∩ S for every concept.
        let c = t3_class(2);
        let s = EventSet::new(c.universe(), [1, 3]).unwrap();
        let patterns: std::collections::BTreeSet<Vec<usize>> = c
            .concepts()
            .iter()
            .map(|t| t.intersection(&s).unwrap().members().to_vec())
            .collect();
        assert_eq!(patterns.len(), 4);
        assert!(shatters(&c, &s).unwrap());
        // x0 lies in every concept.
        let s0 = EventSet::new(c.universe(), [0, 1]).unwrap();
        assert!(!shatters(&c, &s0).unwrap());
    }

    #[test]
    fn theorem3_class_d3_has_dimension_3() {
        let v = vc_dimension(&t3_class(3), 10).unwrap();
        assert_eq!(v, VcDimension { value: 3, at_least: false });
    }

    #[test]
    fn power_set_and_singleton() {
        let uni = Universe::new(5).unwrap();
        let ps = ConceptClass::power_set(&uni).unwrap();
        assert_eq!(vc_dimension(&ps, 10).unwrap().value, 5);
        let capped = vc_dimension(&ps, 3).unwrap();
        assert_eq!(capped, VcDimension { value: 3, at_least: true });
        assert_eq!(capped.to_string(), ">= 3");
        let single = ConceptClass::new("one", &uni, vec![EventSet::new(&uni, [1, 2]).unwrap()]).unwrap();
        assert_eq!(vc_dimension(&single, 5).unwrap().value, 0);
        assert!(shatters(&ps, &EventSet::full(&uni)).unwrap());
    }

    #[test]
    fn limits() {
        let uni = Universe::new(25).unwrap();
        let c = ConceptClass::new("e", &uni, vec![]).unwrap();
        assert!(vc_dimension(&c, 21).is_err());
        assert!(shatters(&c, &EventSet::full(&uni)).is_err());
    }
}
