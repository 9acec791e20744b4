use std::collections::HashMap;
use std::sync::Arc;

use crate::concepts::{ConceptFamily, KSubsetClass};
use crate::error::{domain, Result};
use crate::measure::{hall, Concept, Dist, Universe, COMPARE_TOL};

/// The polytope `{p ∈ Δ(X) : p[X \ T] ≤ ε_T for every constraint}`.
///
/// Constraints come either one concept at a time or as a whole implicit
/// [`KSubsetClass`] sharing one `ε`. Repeated concepts keep the smallest `ε`.
#[derive(Clone, Debug, PartialEq)]
pub struct FeasibleRegion {
    universe: Universe,
    constraints: Vec<(Concept, f64)>,
    index: HashMap<Vec<usize>, usize>,
    families: Vec<(Arc<KSubsetClass>, f64)>,
}

impl FeasibleRegion {
    /// The whole simplex.
    pub fn new(universe: &Universe) -> Self {
        FeasibleRegion {
            universe: universe.clone(),
            constraints: Vec::new(),
            index: HashMap::new(),
            families: Vec::new(),
        }
    }

    /// One constraint at level `eps` per concept of `family`.
    pub fn from_family(family: &ConceptFamily, eps: f64) -> Result<Self> {
        let mut r = FeasibleRegion::new(family.universe());
        r.add_family(family, eps)?;
        Ok(r)
    }

    pub fn add_constraint(&mut self, t: Concept, eps: f64) -> Result<()> {
        self.universe.ensure_same(t.universe())?;
        check_eps(eps)?;
        match self.index.get(t.members()) {
            Some(&i) => {
                let e = &mut self.constraints[i].1;
                *e = e.min(eps);
            }
            None => {
                self.index.insert(t.members().to_vec(), self.constraints.len());
                self.constraints.push((t, eps));
            }
        }
        Ok(())
    }

    pub fn add_family(&mut self, family: &ConceptFamily, eps: f64) -> Result<()> {
        self.universe.ensure_same(family.universe())?;
        check_eps(eps)?;
        match family {
            ConceptFamily::Explicit(c) => {
                for t in c.concepts() {
                    self.add_constraint(t.clone(), eps)?;
                }
            }
            ConceptFamily::KSubset(k) => self.families.push((k.clone(), eps)),
        }
        Ok(())
    }

    pub fn universe(&self) -> &Universe {
        &self.universe
    }

    pub fn constraints(&self) -> &[(Concept, f64)] {
        &self.constraints
    }

    pub fn families(&self) -> &[(Arc<KSubsetClass>, f64)] {
        &self.families
    }

    pub fn is_unconstrained(&self) -> bool {
        self.constraints.is_empty() && self.families.is_empty()
    }

    /// Largest `p[X \ T] − ε_T` over all constraints (negative when strictly
    /// inside, `-∞` without constraints).
    pub fn max_violation(&self, p: &Dist) -> Result<f64> {
        self.universe.ensure_same(p.universe())?;
        let mut worst = f64::NEG_INFINITY;
        for (t, eps) in &self.constraints {
            worst = worst.max(hall(p, t)? - eps);
        }
        for (k, eps) in &self.families {
            worst = worst.max(k.max_hall(p)?.0 - eps);
        }
        Ok(worst)
    }
}

/// Whether `p` satisfies every constraint of `region` up to [`COMPARE_TOL`].
pub fn feasible(p: &Dist, region: &FeasibleRegion) -> Result<bool> {
    Ok(region.max_violation(p)? <= COMPARE_TOL)
}

fn check_eps(eps: f64) -> Result<()> {
    if (0.0..=1.0).contains(&eps) {
        Ok(())
    } else {
        Err(domain(format!("constraint level must lie in [0, 1], got {eps}")))
    }
}
