use std::collections::HashSet;
use std::sync::Arc;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{domain, Result};
use crate::measure::numeric::neumaier_sum;
use crate::measure::{hall, Concept, Dist, EventSet, Sample, Universe};

/// An explicit, ordered, duplicate-free list of concepts.
///
/// The list order is the canonical tie-breaking order used everywhere a
/// choice among concepts has to be made.
#[derive(Clone, Debug, PartialEq)]
pub struct ConceptClass {
    name: String,
    universe: Universe,
    concepts: Vec<Concept>,
}

impl ConceptClass {
    pub fn new(name: impl Into<String>, universe: &Universe, concepts: Vec<Concept>) -> Result<Self> {
        let mut seen = HashSet::with_capacity(concepts.len());
        for c in &concepts {
            universe.ensure_same(c.universe())?;
            if !seen.insert(c.members()) {
                return Err(domain(format!("duplicate concept {:?}", c.members())));
            }
        }
        Ok(ConceptClass {
            name: name.into(),
            universe: universe.clone(),
            concepts,
        })
    }

    /// Every subset of the universe, in binary counting order.
    pub fn power_set(universe: &Universe) -> Result<Self> {
        let n = universe.size();
        if n > 20 {
            return Err(domain(format!("power set of {n} atoms is too large")));
        }
        let concepts = (0u32..1 << n)
            .map(|mask| {
                let members = (0..n).filter(|i| mask >> i & 1 == 1).collect();
                EventSet::from_sorted_unchecked(universe, members)
            })
            .collect();
        Ok(ConceptClass {
            name: format!("powerset-{n}"),
            universe: universe.clone(),
            concepts,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn universe(&self) -> &Universe {
        &self.universe
    }

    pub fn concepts(&self) -> &[Concept] {
        &self.concepts
    }

    pub fn len(&self) -> usize {
        self.concepts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.concepts.is_empty()
    }

    pub fn contains(&self, t: &Concept) -> bool {
        self.concepts.iter().any(|c| c == t)
    }

    pub fn position(&self, t: &Concept) -> Option<usize> {
        self.concepts.iter().position(|c| c == t)
    }

    /// Concepts satisfying `keep`, in canonical order.
    pub fn filter(&self, mut keep: impl FnMut(&Concept) -> bool) -> ConceptClass {
        ConceptClass {
            name: self.name.clone(),
            universe: self.universe.clone(),
            concepts: self.concepts.iter().filter(|c| keep(c)).cloned().collect(),
        }
    }
}

/// `{T ∈ C : every sample point lies in T}`.
pub fn version_space(class: &ConceptClass, s: &Sample) -> Result<ConceptClass> {
    class.universe.ensure_same(s.universe())?;
    let seen = s.distinct();
    Ok(class.filter(|t| seen.is_subset(t)))
}

#[derive(Serialize, Deserialize)]
struct ClassRepr {
    name: String,
    universe_size: usize,
    concepts: Vec<Vec<usize>>,
}

impl Serialize for ConceptClass {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        ClassRepr {
            name: self.name.clone(),
            universe_size: self.universe.size(),
            concepts: self.concepts.iter().map(|c| c.members().to_vec()).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for ConceptClass {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let repr = ClassRepr::deserialize(d)?;
        let u = Universe::new(repr.universe_size).map_err(D::Error::custom)?;
        let concepts = repr
            .concepts
            .into_iter()
            .map(|m| EventSet::new(&u, m))
            .collect::<Result<Vec<_>>>()
            .map_err(D::Error::custom)?;
        ConceptClass::new(repr.name, &u, concepts).map_err(D::Error::custom)
    }
}

/// The class `{core ∪ S : S ⊆ pool, |S| = k}`, kept implicit.
///
/// Classes of this shape are closed under version spaces, and the largest
/// complement mass over the class has a closed form (outside mass plus the
/// `|pool| − k` heaviest pool atoms), so nothing ever has to be enumerated.
#[derive(Clone, Debug, PartialEq)]
pub struct KSubsetClass {
    name: String,
    core: EventSet,
    pool: EventSet,
    k: usize,
}

impl KSubsetClass {
    pub fn new(name: impl Into<String>, core: EventSet, pool: EventSet, k: usize) -> Result<Self> {
        core.universe().ensure_same(pool.universe())?;
        if core.intersection_len(&pool) > 0 {
            return Err(domain("core and pool must be disjoint"));
        }
        if k > pool.len() {
            return Err(domain(format!("k = {k} exceeds pool size {}", pool.len())));
        }
        Ok(KSubsetClass {
            name: name.into(),
            core,
            pool,
            k,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn universe(&self) -> &Universe {
        self.core.universe()
    }

    pub fn core(&self) -> &EventSet {
        &self.core
    }

    pub fn pool(&self) -> &EventSet {
        &self.pool
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// Pool atoms each concept leaves out.
    pub fn excluded(&self) -> usize {
        self.pool.len() - self.k
    }

    /// Atoms outside every concept.
    pub fn outside(&self) -> EventSet {
        self.core
            .union(&self.pool)
            .expect("same universe")
            .complement()
    }

    /// Number of concepts, saturating at `u128::MAX`.
    pub fn len(&self) -> u128 {
        binomial(self.pool.len() as u128, self.k as u128)
    }

    pub fn contains(&self, t: &Concept) -> bool {
        if t.universe() != self.universe() || !self.core.is_subset(t) {
            return false;
        }
        let rest = t.difference(&self.core).expect("same universe");
        rest.len() == self.k && rest.is_subset(&self.pool)
    }

    /// Version space, which is again of this shape unless it is empty.
    pub fn version_space(&self, s: &Sample) -> Result<Option<KSubsetClass>> {
        self.universe().ensure_same(s.universe())?;
        let seen = s.distinct();
        let in_pool = seen.intersection(&self.pool)?;
        let covered = seen.difference(&self.core)?.difference(&self.pool)?;
        if !covered.is_empty() || in_pool.len() > self.k {
            return Ok(None);
        }
        Ok(Some(KSubsetClass {
            name: self.name.clone(),
            core: self.core.union(&in_pool)?,
            pool: self.pool.difference(&in_pool)?,
            k: self.k - in_pool.len(),
        }))
    }

    /// `max_T p[X \ T]` and a concept attaining it. The excluded pool atoms
    /// are the heaviest ones, lower atom index first among equal weights.
    pub fn max_hall(&self, p: &Dist) -> Result<(f64, Concept)> {
        self.universe().ensure_same(p.universe())?;
        let mut pool: Vec<(usize, f64)> = self.pool.members().iter().map(|&a| (a, p.weight(a))).collect();
        pool.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
        let m = self.excluded();
        let outside = self.outside();
        let value = neumaier_sum(
            outside
                .members()
                .iter()
                .map(|&a| p.weight(a))
                .chain(pool[..m].iter().map(|x| x.1)),
        );
        let chosen = EventSet::new(self.universe(), pool[m..].iter().map(|x| x.0))?;
        Ok((value.min(1.0), self.core.union(&chosen)?))
    }

    /// Enumerates the class explicitly, combinations in lexicographic order.
    pub fn to_explicit(&self, limit: usize) -> Result<ConceptClass> {
        if self.len() > limit as u128 {
            return Err(domain(format!(
                "class has {} concepts, above the enumeration limit {limit}",
                self.len()
            )));
        }
        let pool = self.pool.members();
        let mut out = Vec::new();
        for_each_combination(pool.len(), self.k, |idx| {
            let extra = EventSet::from_sorted_unchecked(self.universe(), idx.iter().map(|&i| pool[i]).collect());
            out.push(self.core.union(&extra).expect("same universe"));
            true
        });
        ConceptClass::new(self.name.clone(), self.universe(), out)
    }
}

#[derive(Serialize, Deserialize)]
struct KSubsetRepr {
    name: String,
    universe_size: usize,
    core: Vec<usize>,
    pool: Vec<usize>,
    k: usize,
}

impl Serialize for KSubsetClass {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        KSubsetRepr {
            name: self.name.clone(),
            universe_size: self.universe().size(),
            core: self.core.members().to_vec(),
            pool: self.pool.members().to_vec(),
            k: self.k,
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for KSubsetClass {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let r = KSubsetRepr::deserialize(d)?;
        let u = Universe::new(r.universe_size).map_err(D::Error::custom)?;
        let core = EventSet::new(&u, r.core).map_err(D::Error::custom)?;
        let pool = EventSet::new(&u, r.pool).map_err(D::Error::custom)?;
        KSubsetClass::new(r.name, core, pool, r.k).map_err(D::Error::custom)
    }
}

/// A concept class in either representation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ConceptFamily {
    Explicit(Arc<ConceptClass>),
    KSubset(Arc<KSubsetClass>),
}

impl From<Arc<ConceptClass>> for ConceptFamily {
    fn from(c: Arc<ConceptClass>) -> Self {
        ConceptFamily::Explicit(c)
    }
}

impl From<ConceptClass> for ConceptFamily {
    fn from(c: ConceptClass) -> Self {
        ConceptFamily::Explicit(Arc::new(c))
    }
}

impl From<KSubsetClass> for ConceptFamily {
    fn from(c: KSubsetClass) -> Self {
        ConceptFamily::KSubset(Arc::new(c))
    }
}

impl ConceptFamily {
    pub fn universe(&self) -> &Universe {
        match self {
            ConceptFamily::Explicit(c) => c.universe(),
            ConceptFamily::KSubset(c) => c.universe(),
        }
    }

    pub fn name(&self) -> &str {
        match self {
            ConceptFamily::Explicit(c) => c.name(),
            ConceptFamily::KSubset(c) => c.name(),
        }
    }

    /// Number of concepts, saturating at `u128::MAX`.
    pub fn len(&self) -> u128 {
        match self {
            ConceptFamily::Explicit(c) => c.len() as u128,
            ConceptFamily::KSubset(c) => c.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn contains(&self, t: &Concept) -> bool {
        match self {
            ConceptFamily::Explicit(c) => c.contains(t),
            ConceptFamily::KSubset(c) => c.contains(t),
        }
    }

    pub fn version_space(&self, s: &Sample) -> Result<ConceptFamily> {
        match self {
            ConceptFamily::Explicit(c) => Ok(version_space(c, s)?.into()),
            ConceptFamily::KSubset(c) => Ok(match c.version_space(s)? {
                Some(v) => v.into(),
                None => ConceptClass::new(c.name(), c.universe(), Vec::new())?.into(),
            }),
        }
    }

    /// `max_{T ∈ C} hall(p, T)` with the first maximizing concept; `None`
    /// for an empty class.
    pub fn max_hall(&self, p: &Dist) -> Result<Option<(f64, Concept)>> {
        match self {
            ConceptFamily::Explicit(c) => {
                let mut best: Option<(f64, &Concept)> = None;
                for t in c.concepts() {
                    let h = hall(p, t)?;
                    if best.is_none_or(|(b, _)| h > b) {
                        best = Some((h, t));
                    }
                }
                Ok(best.map(|(h, t)| (h, t.clone())))
            }
            ConceptFamily::KSubset(c) => Ok(Some(c.max_hall(p)?)),
        }
    }

    pub fn to_explicit(&self, limit: usize) -> Result<Arc<ConceptClass>> {
        match self {
            ConceptFamily::Explicit(c) => Ok(c.clone()),
            ConceptFamily::KSubset(c) => Ok(Arc::new(c.to_explicit(limit)?)),
        }
    }
}

/// `C(n, k)`, saturating.
pub fn binomial(n: u128, k: u128) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        // acc · (n − i) / (i + 1) stays integral at every step.
        match acc.checked_mul(n - i) {
            Some(v) => acc = v / (i + 1),
            None => return u128::MAX,
        }
    }
    acc
}

/// Calls `f` on every `k`-combination of `0..n` in lexicographic order until
/// it returns false.
pub fn for_each_combination(n: usize, k: usize, mut f: impl FnMut(&[usize]) -> bool) {
    if k > n {
        return;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        if !f(&idx) {
            return;
        }
        let mut i = k;
        loop {
            if i == 0 {
                return;
            }
            i -= 1;
            if idx[i] != i + n - k {
                break;
            }
            if i == 0 {
                return;
            }
        }
        idx[i] += 1;
        for j in i + 1..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}
