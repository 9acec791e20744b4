use std::collections::BTreeMap;

use serde::ser::SerializeMap;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::numeric::neumaier_sum;
use super::{EventSet, Universe, NORMALIZATION_TOL};
use crate::error::{domain, Result};

/// A probability distribution over a finite universe, stored sparsely.
///
/// Only atoms with strictly positive weight are stored, in increasing atom
/// order. Weights are validated to be finite, nonnegative and to sum to one
/// within [`NORMALIZATION_TOL`].
#[derive(Clone, Debug, PartialEq)]
pub struct Dist {
    universe: Universe,
    atoms: Vec<usize>,
    weights: Vec<f64>,
}

impl Dist {
    /// Builds a distribution from `(atom, weight)` pairs. Zero weights are
    /// dropped; a repeated atom is an error.
    pub fn new(universe: &Universe, pairs: impl IntoIterator<Item = (usize, f64)>) -> Result<Self> {
        let mut pairs: Vec<(usize, f64)> = pairs.into_iter().collect();
        for &(a, w) in &pairs {
            universe.check_atom(a)?;
            if !w.is_finite() || w < 0.0 {
                return Err(domain(format!("invalid weight {w} at atom {a}")));
            }
        }
        pairs.sort_unstable_by_key(|&(a, _)| a);
        if pairs.windows(2).any(|w| w[0].0 == w[1].0) {
            return Err(domain("duplicate atom in distribution"));
        }
        pairs.retain(|&(_, w)| w > 0.0);
        let (atoms, weights): (Vec<_>, Vec<_>) = pairs.into_iter().unzip();
        let total = neumaier_sum(weights.iter().copied());
        if (total - 1.0).abs() > NORMALIZATION_TOL {
            return Err(domain(format!("weights sum to {total}, not 1")));
        }
        Ok(Dist {
            universe: universe.clone(),
            atoms,
            weights,
        })
    }

    /// Dense constructor: `weights[i]` is the mass of atom `i`.
    pub fn from_dense(universe: &Universe, weights: &[f64]) -> Result<Self> {
        if weights.len() != universe.size() {
            return Err(domain(format!(
                "dense weight vector has length {}, universe has {} atoms",
                weights.len(),
                universe.size()
            )));
        }
        Dist::new(universe, weights.iter().copied().enumerate())
    }

    /// Normalizes arbitrary nonnegative scores into a distribution.
    pub fn from_unnormalized(universe: &Universe, scores: &[f64]) -> Result<Self> {
        if scores.iter().any(|s| !s.is_finite() || *s < 0.0) {
            return Err(domain("scores must be finite and nonnegative"));
        }
        let total = neumaier_sum(scores.iter().copied());
        if total <= 0.0 {
            return Err(domain("scores have zero total mass"));
        }
        let w: Vec<f64> = scores.iter().map(|s| s / total).collect();
        Dist::from_dense(universe, &w)
    }

    /// Uniform distribution over the members of `set`.
    pub fn uniform(set: &EventSet) -> Result<Self> {
        if set.is_empty() {
            return Err(domain("uniform distribution over an empty set"));
        }
        let w = 1.0 / set.len() as f64;
        Ok(Dist {
            universe: set.universe().clone(),
            atoms: set.members().to_vec(),
            weights: vec![w; set.len()],
        })
    }

    pub fn uniform_over_universe(universe: &Universe) -> Self {
        Dist::uniform(&EventSet::full(universe)).expect("universe is nonempty")
    }

    /// Point mass.
    pub fn point(universe: &Universe, atom: usize) -> Result<Self> {
        universe.check_atom(atom)?;
        Ok(Dist {
            universe: universe.clone(),
            atoms: vec![atom],
            weights: vec![1.0],
        })
    }

    /// Convex combination `Σ coef_i · dist_i`.
    pub fn mixture(parts: &[(f64, &Dist)]) -> Result<Self> {
        let Some((_, first)) = parts.first() else {
            return Err(domain("mixture of zero components"));
        };
        let mut acc: BTreeMap<usize, Vec<f64>> = BTreeMap::new();
        for (coef, d) in parts {
            first.universe.ensure_same(&d.universe)?;
            if !coef.is_finite() || *coef < 0.0 {
                return Err(domain(format!("invalid mixture coefficient {coef}")));
            }
            for (a, w) in d.iter() {
                acc.entry(a).or_default().push(coef * w);
            }
        }
        Dist::new(
            &first.universe,
            acc.into_iter().map(|(a, ws)| (a, neumaier_sum(ws))),
        )
    }

    pub fn universe(&self) -> &Universe {
        &self.universe
    }

    /// Mass of a single atom (zero if absent).
    pub fn weight(&self, atom: usize) -> f64 {
        match self.atoms.binary_search(&atom) {
            Ok(i) => self.weights[i],
            Err(_) => 0.0,
        }
    }

    /// `(atom, weight)` over the support, in atom order.
    pub fn iter(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.atoms.iter().copied().zip(self.weights.iter().copied())
    }

    pub fn support_atoms(&self) -> &[usize] {
        &self.atoms
    }

    pub fn support_weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn support(&self) -> EventSet {
        EventSet::from_sorted_unchecked(&self.universe, self.atoms.clone())
    }

    pub fn support_len(&self) -> usize {
        self.atoms.len()
    }

    pub fn to_dense(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.universe.size()];
        for (a, w) in self.iter() {
            out[a] = w;
        }
        out
    }

    /// `p[A]`.
    pub fn mass(&self, set: &EventSet) -> Result<f64> {
        self.universe.ensure_same(set.universe())?;
        Ok(self.mass_split(set).0)
    }

    /// `(p[A], p[X \ A])`, both summed directly rather than by complement.
    pub(crate) fn mass_split(&self, set: &EventSet) -> (f64, f64) {
        let members = set.members();
        let mut inside = Vec::new();
        let mut outside = Vec::new();
        let mut j = 0;
        for (a, w) in self.iter() {
            while j < members.len() && members[j] < a {
                j += 1;
            }
            if j < members.len() && members[j] == a {
                inside.push(w);
            } else {
                outside.push(w);
            }
        }
        (neumaier_sum(inside), neumaier_sum(outside))
    }
}

impl Serialize for Dist {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        struct Weights<'a>(&'a Dist);
        impl Serialize for Weights<'_> {
            fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
                let mut m = s.serialize_map(Some(self.0.atoms.len()))?;
                for (a, w) in self.0.iter() {
                    m.serialize_entry(&a.to_string(), &w)?;
                }
                m.end()
            }
        }
        let mut m = s.serialize_map(None)?;
        m.serialize_entry("universe_size", &self.universe.size())?;
        if let Some(labels) = self.universe.labels() {
            m.serialize_entry("labels", labels)?;
        }
        m.serialize_entry("weights", &Weights(self))?;
        m.end()
    }
}

#[derive(Deserialize)]
struct DistRepr {
    universe_size: usize,
    #[serde(default)]
    labels: Option<Vec<String>>,
    weights: BTreeMap<String, f64>,
}

impl<'de> Deserialize<'de> for Dist {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let repr = DistRepr::deserialize(d)?;
        let universe = match repr.labels {
            Some(labels) => {
                if labels.len() != repr.universe_size {
                    return Err(D::Error::custom("labels length differs from universe_size"));
                }
                Universe::with_labels(labels)
            }
            None => Universe::new(repr.universe_size),
        }
        .map_err(D::Error::custom)?;
        let mut pairs = Vec::with_capacity(repr.weights.len());
        for (k, w) in repr.weights {
            let a: usize = k
                .parse()
                .map_err(|_| D::Error::custom(format!("atom key {k:?} is not a decimal index")))?;
            pairs.push((a, w));
        }
        Dist::new(&universe, pairs).map_err(D::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn u(n: usize) -> Universe {
        Universe::new(n).unwrap()
    }

    #[test]
    fn validates_normalization() {
        assert!(Dist::new(&u(3), [(0, 0.5), (1, 0.4)]).is_err());
        assert!(Dist::new(&u(3), [(0, 0.5), (1, 0.5)]).is_ok());
        assert!(Dist::new(&u(3), [(0, 1.5), (1, -0.5)]).is_err());
        assert!(Dist::new(&u(3), [(0, 0.5), (0, 0.5)]).is_err());
        assert!(Dist::new(&u(3), [(3, 1.0)]).is_err());
    }

    #[test]
    fn drops_zero_weights() {
        let d = Dist::from_dense(&u(4), &[0.0, 0.25, 0.0, 0.75]).unwrap();
        assert_eq!(d.support_atoms(), &[1, 3]);
        assert_eq!(d.weight(0), 0.0);
        assert_eq!(d.weight(3), 0.75);
    }

    #[test]
    fn large_uniform_normalizes() {
        let uni = u(800_000);
        let set = EventSet::range(&uni, 0, 400_000).unwrap();
        let d = Dist::uniform(&set).unwrap();
        let total = neumaier_sum(d.support_weights().iter().copied());
        assert!((total - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn mixture_weights() {
        let uni = u(4);
        let a = Dist::uniform(&EventSet::new(&uni, [0, 1]).unwrap()).unwrap();
        let b = Dist::point(&uni, 3).unwrap();
        let m = Dist::mixture(&[(0.5, &a), (0.5, &b)]).unwrap();
        assert_eq!(m.to_dense(), vec![0.25, 0.25, 0.0, 0.5]);
    }

    #[test]
    fn json_round_trip() {
        let d = Dist::from_dense(&u(12), &[0.0, 0.5, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.25, 0.25])
            .unwrap();
        let j = serde_json::to_string(&d).unwrap();
        assert_eq!(
            j,
            r#"{"universe_size":12,"weights":{"1":0.5,"10":0.25,"11":0.25}}"#
        );
        let back: Dist = serde_json::from_str(&j).unwrap();
        assert_eq!(back, d);
        assert!(serde_json::from_str::<Dist>(r#"{"universe_size":2,"weights":{"x":1.0}}"#).is_err());
        assert!(serde_json::from_str::<Dist>(r#"{"universe_size":2,"weights":{"0":0.3}}"#).is_err());
    }
}
