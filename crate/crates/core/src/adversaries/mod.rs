//! Hard instances from the lower-bound constructions and the bound
//! calculators used alongside them.

mod bounds;
mod instances;

use std::sync::Arc;

use serde::{Deserialize, Serialize};

pub use bounds::{entropy_threshold, fano_bound};
pub use instances::{
    example1_instance, example1_sets, example4_instance, example5_instance, theorem1_completion, theorem1_ensemble, theorem3_class,
    theorem3_ensemble, theorem3_event, AppendixEnsemble, Example4, HardInstance, EXAMPLE5_MAX_D,
};

use crate::concepts::{ConceptClass, ConceptFamily, DEFAULT_MAX_TRIES};
use crate::error::Result;
use crate::measure::{hall, Concept, Dist};

/// A construction addressable by name, with its parameters.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", content = "params", rename_all = "snake_case")]
pub enum Construction {
    Example1 {
        a: usize,
        a1: usize,
        a2: usize,
    },
    Theorem1 {
        n: usize,
        /// Size of the drawn subset; defaults to `10 n²`.
        #[serde(default)]
        m: Option<usize>,
        /// Block size; defaults to `100 m`.
        #[serde(default)]
        big_m: Option<usize>,
        branch: usize,
    },
    Example4,
    Theorem3 {
        d: usize,
        eps_prime: f64,
    },
    Example5 {
        d: usize,
        a_size: usize,
    },
    Appendix {
        d: usize,
        #[serde(default)]
        packing_seed: u64,
        #[serde(default = "default_tries")]
        max_tries: usize,
    },
}

fn default_tries() -> usize {
    DEFAULT_MAX_TRIES
}

impl Construction {
    pub fn name(&self) -> &'static str {
        match self {
            Construction::Example1 { .. } => "example1",
            Construction::Theorem1 { .. } => "theorem1",
            Construction::Example4 => "example4",
            Construction::Theorem3 { .. } => "theorem3",
            Construction::Example5 { .. } => "example5",
            Construction::Appendix { .. } => "appendix",
        }
    }

    /// Builds everything that does not depend on the per-draw seed.
    pub fn prepare(&self) -> Result<PreparedConstruction> {
        let shared = match self {
            Construction::Theorem3 { d, .. } => Shared::Family(theorem3_class(*d)?.into()),
            Construction::Example4 => Shared::Example4(Arc::new(example4_instance()?)),
            Construction::Example5 { d, a_size } => {
                let (inst, class) = example5_instance(*d, *a_size)?;
                Shared::Example5(Arc::new(inst), class.into())
            }
            Construction::Appendix {
                d,
                packing_seed,
                max_tries,
            } => Shared::Appendix(AppendixEnsemble::new(*d, *packing_seed, *max_tries)?),
            _ => Shared::None,
        };
        Ok(PreparedConstruction {
            construction: self.clone(),
            shared,
        })
    }
}

#[derive(Clone, Debug)]
enum Shared {
    None,
    Family(ConceptFamily),
    Example4(Arc<Example4>),
    Example5(Arc<HardInstance>, ConceptFamily),
    Appendix(AppendixEnsemble),
}

/// A construction ready to draw instances.
#[derive(Clone, Debug)]
pub struct PreparedConstruction {
    construction: Construction,
    shared: Shared,
}

/// One drawn instance with the classes a learner may use and the facts sets
/// the adversary may pick from after seeing the learner's output.
#[derive(Clone, Debug)]
pub struct Scenario {
    pub instance: HardInstance,
    pub concepts: ConceptFamily,
    pub hypotheses: Option<Arc<Vec<Dist>>>,
    /// Empty when the facts set is fixed by the instance.
    pub candidates: Vec<Concept>,
}

impl Scenario {
    /// The facts set the adversary plays against `learned`, and the
    /// resulting hallucination rate. Among candidates the first one
    /// maximizing the rate is chosen.
    pub fn adversarial_facts(&self, learned: &Dist) -> Result<(Concept, f64)> {
        if self.candidates.is_empty() {
            let h = hall(learned, &self.instance.facts)?;
            return Ok((self.instance.facts.clone(), h));
        }
        let mut best: Option<(f64, &Concept)> = None;
        for t in &self.candidates {
            let h = hall(learned, t)?;
            if best.is_none_or(|(b, _)| h > b) {
                best = Some((h, t));
            }
        }
        let (h, t) = best.expect("candidates are nonempty");
        Ok((t.clone(), h))
    }
}

impl PreparedConstruction {
    pub fn construction(&self) -> &Construction {
        &self.construction
    }

    pub fn draw(&self, seed: u64) -> Result<Scenario> {
        match (&self.construction, &self.shared) {
            (Construction::Example1 { a, a1, a2 }, _) => {
                let (inst, p) = example1_instance((*a, *a1, *a2), 1)?;
                let [sa, s1, s2] = example1_sets(*a, *a1, *a2)?;
                let cands = vec![sa.union(&s1)?, sa.union(&s2)?];
                let class = ConceptClass::new("example1", sa.universe(), cands.clone())?;
                Ok(Scenario {
                    instance: inst,
                    concepts: class.into(),
                    hypotheses: Some(Arc::new(p)),
                    candidates: cands,
                })
            }
            (Construction::Theorem1 { n, m, big_m, branch }, _) => {
                let m = m.unwrap_or(10 * n * n);
                let big_m = big_m.unwrap_or(100 * m);
                let (inst, p) = theorem1_ensemble(*n, big_m, m, *branch, seed)?;
                let class = ConceptClass::new("theorem1", inst.facts.universe(), vec![inst.facts.clone()])?;
                Ok(Scenario {
                    instance: inst,
                    concepts: class.into(),
                    hypotheses: Some(Arc::new(p)),
                    candidates: Vec::new(),
                })
            }
            (Construction::Example4, Shared::Example4(e)) => Ok(Scenario {
                instance: e.instance.clone(),
                concepts: e.concepts.clone().into(),
                hypotheses: Some(Arc::new(e.hypotheses.clone())),
                candidates: e.concepts.concepts().to_vec(),
            }),
            (Construction::Theorem3 { d, eps_prime }, Shared::Family(f)) => Ok(Scenario {
                instance: theorem3_ensemble(*d, *eps_prime, seed)?,
                concepts: f.clone(),
                hypotheses: None,
                candidates: Vec::new(),
            }),
            (Construction::Example5 { .. }, Shared::Example5(inst, f)) => Ok(Scenario {
                instance: (**inst).clone(),
                concepts: f.clone(),
                hypotheses: Some(Arc::new(vec![inst.q.clone()])),
                candidates: Vec::new(),
            }),
            (Construction::Appendix { .. }, Shared::Appendix(e)) => Ok(Scenario {
                instance: e.draw(seed)?,
                concepts: e.class.clone().into(),
                hypotheses: None,
                candidates: Vec::new(),
            }),
            _ => unreachable!("prepare() pairs every construction with its shared data"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_names() {
        let c: Construction = serde_json::from_str(r#"{"name":"theorem3","params":{"d":4,"eps_prime":0.1}}"#).unwrap();
        assert_eq!(c, Construction::Theorem3 { d: 4, eps_prime: 0.1 });
        let c: Construction = serde_json::from_str(r#"{"name":"example4"}"#).unwrap();
        assert_eq!(c.name(), "example4");
        let c: Construction = serde_json::from_str(r#"{"name":"appendix","params":{"d":8}}"#).unwrap();
        assert_eq!(
            c,
            Construction::Appendix {
                d: 8,
                packing_seed: 0,
                max_tries: DEFAULT_MAX_TRIES
            }
        );
        assert!(serde_json::from_str::<Construction>(r#"{"name":"theorem9","params":{}}"#).is_err());
    }

    #[test]
    fn draws_are_seeded_and_faithful() {
        for c in [
            Construction::Example1 { a: 3, a1: 2, a2: 2 },
            Construction::Theorem1 {
                n: 2,
                m: None,
                big_m: None,
                branch: 2,
            },
            Construction::Example4,
            Construction::Theorem3 { d: 3, eps_prime: 0.3 },
            Construction::Example5 { d: 2, a_size: 20 },
            Construction::Appendix {
                d: 8,
                packing_seed: 1,
                max_tries: 500,
            },
        ] {
            let p = c.prepare().unwrap();
            let a = p.draw(5).unwrap();
            let b = p.draw(5).unwrap();
            assert_eq!(a.instance, b.instance, "{}", c.name());
            assert_eq!(hall(&a.instance.q, &a.instance.facts).unwrap(), 0.0);
            assert!(a.concepts.contains(&a.instance.facts), "{}", c.name());
        }
    }

    #[test]
    fn adversary_picks_the_worst_candidate() {
        let s = Construction::Example4.prepare().unwrap().draw(0).unwrap();
        let p = &s.hypotheses.as_ref().unwrap()[1];
        let (t, h) = s.adversarial_facts(p).unwrap();
        assert_eq!(h, 0.99);
        assert_eq!(t, s.candidates[0]);
    }
}
