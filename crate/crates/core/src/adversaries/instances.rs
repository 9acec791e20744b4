use std::collections::BTreeMap;
use std::sync::Arc;

use rand::seq::index;
use rand::Rng;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::concepts::{packing_construct, ConceptClass, KSubsetClass, PackingProvenance};
use crate::error::{domain, Error, Result};
use crate::measure::{hall, Concept, Dist, EventSet, Universe};
use crate::rng;

/// A faithful demonstrator together with its facts set.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HardInstance {
    pub q: Dist,
    pub facts: Concept,
    /// Construction name, parameters and seed.
    pub meta: BTreeMap<String, Value>,
}

impl HardInstance {
    /// Fails unless `hall(q, facts)` is exactly zero.
    pub fn new(q: Dist, facts: Concept, meta: BTreeMap<String, Value>) -> Result<Self> {
        let h = hall(&q, &facts)?;
        if h != 0.0 {
            return Err(Error::Construction(format!("demonstrator is not faithful (hall = {h})")));
        }
        Ok(HardInstance { q, facts, meta })
    }
}

fn meta(name: &str, params: Value, seed: Option<u64>) -> BTreeMap<String, Value> {
    let mut m = BTreeMap::new();
    m.insert("construction".into(), json!(name));
    m.insert("params".into(), params);
    if let Some(s) = seed {
        m.insert("seed".into(), json!(s));
    }
    m
}

/// The three disjoint blocks `A`, `A₁`, `A₂` laid out left to right.
pub fn example1_sets(a: usize, a1: usize, a2: usize) -> Result<[EventSet; 3]> {
    if a == 0 || a1 == 0 || a2 == 0 {
        return Err(domain("all block sizes must be at least 1"));
    }
    let u = Universe::new(a + a1 + a2)?;
    Ok([
        EventSet::range(&u, 0, a)?,
        EventSet::range(&u, a, a + a1)?,
        EventSet::range(&u, a + a1, a + a1 + a2)?,
    ])
}

/// `q = Uni(A)`, `P = {Uni(A₁), Uni(A₂)}` and the facts set `A ∪ A_{3−i}`
/// aimed at a learner that returned `p_i`.
pub fn example1_instance(sizes: (usize, usize, usize), learner_output_index: usize) -> Result<(HardInstance, Vec<Dist>)> {
    if !(1..=2).contains(&learner_output_index) {
        return Err(domain("learner output index must be 1 or 2"));
    }
    let [a, a1, a2] = example1_sets(sizes.0, sizes.1, sizes.2)?;
    let other = if learner_output_index == 1 { &a2 } else { &a1 };
    let facts = a.union(other)?;
    let p = vec![Dist::uniform(&a1)?, Dist::uniform(&a2)?];
    let m = meta(
        "example1",
        json!({"a": sizes.0, "a1": sizes.1, "a2": sizes.2, "learner_output_index": learner_output_index}),
        None,
    );
    Ok((HardInstance::new(Dist::uniform(&a)?, facts, m)?, p))
}

/// Discretized two-block construction: `A₁ = [0, M)`, `A₂ = [M, 2M)`.
///
/// For branch `i` a set `Ã` of `m` atoms is drawn without replacement from
/// the other block, `T = A_i ∪ Ã` and `q = ½ Uni(A_i) + ½ Uni(Ã)`.
pub fn theorem1_ensemble(n: usize, big_m: usize, m: usize, branch: usize, seed: u64) -> Result<(HardInstance, Vec<Dist>)> {
    theorem1_build(n, big_m, m, branch, &[], seed)
}

/// Branch-`i` instance that could have produced `sample`: every sample atom
/// in the other block is placed in `Ã`, the rest of `Ã` is drawn as usual.
///
/// Lets the adversary pick the branch after seeing a learner's output, since
/// a repetition-free sample has the same law under both branches.
pub fn theorem1_completion(
    n: usize,
    big_m: usize,
    m: usize,
    branch: usize,
    sample: &crate::measure::Sample,
    seed: u64,
) -> Result<(HardInstance, Vec<Dist>)> {
    theorem1_build(n, big_m, m, branch, sample.points(), seed)
}

fn theorem1_build(
    n: usize,
    big_m: usize,
    m: usize,
    branch: usize,
    forced: &[usize],
    seed: u64,
) -> Result<(HardInstance, Vec<Dist>)> {
    if !(1..=2).contains(&branch) {
        return Err(domain("branch must be 1 or 2"));
    }
    if m < 2 * n * n || m == 0 {
        return Err(domain(format!("need m >= 2n^2 = {}, got {m}", 2 * n * n)));
    }
    if big_m < 100 * m {
        return Err(domain(format!("need M >= 100 m = {}, got {big_m}", 100 * m)));
    }
    let u = Universe::new(2 * big_m)?;
    let blocks = [EventSet::range(&u, 0, big_m)?, EventSet::range(&u, big_m, 2 * big_m)?];
    let own = &blocks[branch - 1];
    let offset = if branch == 1 { big_m } else { 0 };

    let mut chosen: Vec<usize> = Vec::new();
    for &x in forced {
        if x >= 2 * big_m {
            return Err(domain(format!("sample atom {x} outside the universe")));
        }
        if !own.contains(x) {
            chosen.push(x - offset);
        }
    }
    chosen.sort_unstable();
    chosen.dedup();
    if chosen.len() > m {
        return Err(domain(format!("sample has {} atoms in the other block, more than m = {m}", chosen.len())));
    }
    let mut r = rng::stream(seed, "theorem1");
    let mut taken: std::collections::HashSet<usize> = chosen.iter().copied().collect();
    let free = big_m - chosen.len();
    for i in index::sample(&mut r, free, m - chosen.len()) {
        // The i-th block position not already forced.
        let mut lo = 0;
        let mut hi = big_m;
        while lo < hi {
            let mid = (lo + hi) / 2;
            if mid + 1 - chosen.partition_point(|&c| c <= mid) > i {
                hi = mid;
            } else {
                lo = mid + 1;
            }
        }
        taken.insert(lo);
    }
    let tilde = EventSet::new(&u, taken.into_iter().map(|i| i + offset))?;

    // Built directly: the mixture has 2M-scale support.
    let (wa, wt) = (0.5 / big_m as f64, 0.5 / m as f64);
    let mut pairs: Vec<(usize, f64)> = own.members().iter().map(|&a| (a, wa)).collect();
    pairs.extend(tilde.members().iter().map(|&a| (a, wt)));
    let q = Dist::new(&u, pairs)?;
    let facts = own.union(&tilde)?;
    let p = vec![Dist::uniform(&blocks[0])?, Dist::uniform(&blocks[1])?];
    let mt = meta(
        "theorem1",
        json!({"n": n, "M": big_m, "m": m, "branch": branch, "forced": forced.len(), "discretization_gap": m as f64 / big_m as f64}),
        Some(seed),
    );
    Ok((HardInstance::new(q, facts, mt)?, p))
}

/// Two 100-atom sets sharing only `x₀ = 99` inside a 199-atom universe.
#[derive(Clone, Debug)]
pub struct Example4 {
    pub instance: HardInstance,
    pub concepts: ConceptClass,
    pub hypotheses: Vec<Dist>,
}

impl Example4 {
    /// The facts set aimed at a learner that returned hypothesis `i`
    /// (0-based): the other set.
    pub fn adversarial_facts(&self, learner_output: usize) -> &Concept {
        &self.concepts.concepts()[1 - learner_output.min(1)]
    }
}

pub fn example4_instance() -> Result<Example4> {
    let u = Universe::new(199)?;
    let a1 = EventSet::range(&u, 0, 100)?;
    let a2 = EventSet::range(&u, 99, 199)?;
    let q = Dist::point(&u, 99)?;
    let hyps = vec![Dist::uniform(&a1)?, Dist::uniform(&a2)?];
    let concepts = ConceptClass::new("example4", &u, vec![a1.clone(), a2])?;
    Ok(Example4 {
        instance: HardInstance::new(q, a1, meta("example4", json!({"x0": 99}), None))?,
        concepts,
        hypotheses: hyps,
    })
}

/// `{T : x₀ ∈ T, |T| = d + 1}` over `2d + 1` atoms with `x₀ = 0`.
pub fn theorem3_class(d: usize) -> Result<KSubsetClass> {
    if d < 2 {
        return Err(domain(format!("need d >= 2, got {d}")));
    }
    let u = Universe::new(2 * d + 1)?;
    KSubsetClass::new(
        format!("theorem3-d{d}"),
        EventSet::new(&u, [0])?,
        EventSet::range(&u, 1, 2 * d + 1)?,
        d,
    )
}

/// Draws `T` uniformly from the class and sets
/// `q = (1 − ε′) δ_{x₀} + ε′ Uni(T \ {x₀})`.
pub fn theorem3_ensemble(d: usize, eps_prime: f64, seed: u64) -> Result<HardInstance> {
    if !(eps_prime > 0.0 && eps_prime < 1.0) {
        return Err(domain(format!("eps' must lie in (0, 1), got {eps_prime}")));
    }
    let class = theorem3_class(d)?;
    let u = class.universe().clone();
    let mut r = rng::stream(seed, "theorem3");
    let picked = EventSet::new(&u, index::sample(&mut r, 2 * d, d).into_iter().map(|i| i + 1))?;
    let facts = class.core().union(&picked)?;
    let w = eps_prime / d as f64;
    let mut pairs = vec![(0, 1.0 - eps_prime)];
    pairs.extend(picked.members().iter().map(|&a| (a, w)));
    let q = Dist::new(&u, pairs)?;
    let m = meta("theorem3", json!({"d": d, "eps_prime": eps_prime}), Some(seed));
    HardInstance::new(q, facts, m)
}

/// The conditioning event of the lower-bound argument: `x₀` was seen and at
/// most `d/2 + 1` distinct atoms were.
pub fn theorem3_event(sample: &crate::measure::Sample, d: usize) -> bool {
    let a = sample.distinct();
    a.contains(0) && a.len() <= d / 2 + 1
}

pub const EXAMPLE5_MAX_D: usize = 16;

/// `X = A ∪ F` with `A = [0, a_size)` and `d` free atoms after it; the class
/// is every superset of `A`, in binary counting order over `F`.
pub fn example5_instance(d: usize, a_size: usize) -> Result<(HardInstance, ConceptClass)> {
    if d > EXAMPLE5_MAX_D {
        return Err(domain(format!("d = {d} exceeds the enumeration cap {EXAMPLE5_MAX_D}")));
    }
    if a_size < 10 * d || a_size == 0 {
        return Err(domain(format!("need |A| >= 10 d, got |A| = {a_size}, d = {d}")));
    }
    let u = Universe::new(a_size + d)?;
    let a = EventSet::range(&u, 0, a_size)?;
    let mut concepts = Vec::with_capacity(1 << d);
    for mask in 0u32..(1 << d) {
        let extra = EventSet::new(&u, (0..d).filter(|i| mask >> i & 1 == 1).map(|i| a_size + i))?;
        concepts.push(a.union(&extra)?);
    }
    let class = ConceptClass::new(format!("example5-d{d}"), &u, concepts)?;
    let m = meta("example5", json!({"d": d, "a_size": a_size}), None);
    Ok((HardInstance::new(Dist::uniform(&a)?, a, m)?, class))
}

/// Packing class over `[d]` with `q_T = Uni(T)` for each member.
#[derive(Clone, Debug)]
pub struct AppendixEnsemble {
    pub class: Arc<ConceptClass>,
    pub provenance: PackingProvenance,
}

impl AppendixEnsemble {
    pub fn new(d: usize, seed: u64, max_tries: usize) -> Result<Self> {
        if d < 8 || d % 4 != 0 {
            return Err(domain(format!("need d >= 8 divisible by 4, got {d}")));
        }
        let (class, provenance) = packing_construct(d, seed, max_tries)?;
        Ok(AppendixEnsemble {
            class: Arc::new(class),
            provenance,
        })
    }

    pub fn draw(&self, seed: u64) -> Result<HardInstance> {
        let mut r = rng::stream(seed, "appendix");
        let i = r.random_range(0..self.class.len());
        let t = self.class.concepts()[i].clone();
        let m = meta(
            "appendix",
            json!({"d": t.universe().size(), "packing_seed": self.provenance.seed, "index": i}),
            Some(seed),
        );
        HardInstance::new(Dist::uniform(&t)?, t, m)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measure::{hall_eps, kl, Sample};

    #[test]
    fn example1_properties() {
        for i in [1, 2] {
            let (inst, p) = example1_instance((5, 3, 4), i).unwrap();
            assert_eq!(hall(&p[i - 1], &inst.facts).unwrap(), 1.0);
            assert_eq!(hall(&p[2 - i], &inst.facts).unwrap(), 0.0);
            for eps in [0.0, 0.3, 0.99] {
                assert_eq!(hall_eps(&p[i - 1], &inst.q, eps).unwrap(), 1.0);
            }
        }
        assert!(example1_instance((0, 1, 1), 1).is_err());
    }

    #[test]
    fn theorem1_small() {
        let (inst, p) = theorem1_ensemble(2, 1000, 10, 1, 3).unwrap();
        assert_eq!(hall(&p[1], &inst.facts).unwrap(), 1.0 - 10.0 / 1000.0);
        assert_eq!(hall(&p[0], &inst.facts).unwrap(), 0.0);
        assert_eq!(inst, theorem1_ensemble(2, 1000, 10, 1, 3).unwrap().0);
        assert!(theorem1_ensemble(3, 10_000, 10, 1, 0).is_err());
        assert!(theorem1_ensemble(2, 999, 10, 1, 0).is_err());
    }

    #[test]
    fn theorem1_completion_is_consistent() {
        let (inst, _) = theorem1_ensemble(2, 1000, 10, 1, 3).unwrap();
        let s = Sample::new(inst.q.universe(), inst.facts.members()[995..1005].to_vec(), 0).unwrap();
        for branch in [1, 2] {
            let (other, p) = theorem1_completion(2, 1000, 10, branch, &s, 8).unwrap();
            assert!(s.points().iter().all(|&x| other.q.weight(x) > 0.0));
            assert_eq!(other.facts.len(), 1010);
            assert_eq!(hall(&p[2 - branch], &other.facts).unwrap(), 0.99);
        }
        let crowded = Sample::new(inst.q.universe(), (1000..1011).collect(), 0).unwrap();
        assert!(theorem1_completion(2, 1000, 10, 1, &crowded, 8).is_err());
    }

    #[test]
    fn example4_properties() {
        let e = example4_instance().unwrap();
        for t in e.concepts.concepts() {
            assert_eq!(hall(&e.instance.q, t).unwrap(), 0.0);
        }
        for i in 0..2 {
            assert_eq!(hall(&e.hypotheses[i], e.adversarial_facts(i)).unwrap(), 0.99);
        }
    }

    #[test]
    fn theorem3_properties() {
        let inst = theorem3_ensemble(4, 0.2, 11).unwrap();
        assert_eq!(inst.facts.len(), 5);
        assert!((inst.q.weight(0) - 0.8).abs() < 1e-15);
        for &a in &inst.facts.members()[1..] {
            assert!((inst.q.weight(a) - 0.05).abs() < 1e-15);
        }
        assert!(theorem3_class(4).unwrap().contains(&inst.facts));
        let s = Sample::new(inst.q.universe(), vec![0, 0, inst.facts.members()[1]], 0).unwrap();
        assert!(theorem3_event(&s, 4));
    }

    #[test]
    fn example5_properties() {
        let (inst, c) = example5_instance(3, 30).unwrap();
        assert_eq!(c.len(), 8);
        for t in c.concepts() {
            assert_eq!(hall(&inst.q, t).unwrap(), 0.0);
        }
        assert!(example5_instance(17, 1000).is_err());
        assert!(example5_instance(4, 39).is_err());
    }

    #[test]
    fn appendix_draws() {
        let e = AppendixEnsemble::new(16, 2, 2000).unwrap();
        let bar = Dist::uniform_over_universe(e.class.universe());
        for s in 0..10 {
            let inst = e.draw(s).unwrap();
            assert_eq!(inst.q.support_len(), 8);
            assert!((kl(&inst.q, &bar).unwrap() - 2f64.ln()).abs() < 1e-12);
        }
    }
}
