use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::{EventSet, Universe};
use crate::error::Result;

/// An ordered training sample `x^n` (duplicates allowed) together with the
/// seed that produced it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Sample {
    universe: Universe,
    points: Vec<usize>,
    seed: u64,
}

impl Sample {
    pub fn new(universe: &Universe, points: Vec<usize>, seed: u64) -> Result<Self> {
        for &p in &points {
            universe.check_atom(p)?;
        }
        Ok(Sample {
            universe: universe.clone(),
            points,
            seed,
        })
    }

    pub fn empty(universe: &Universe) -> Self {
        Sample {
            universe: universe.clone(),
            points: Vec::new(),
            seed: 0,
        }
    }

    pub fn universe(&self) -> &Universe {
        &self.universe
    }

    pub fn points(&self) -> &[usize] {
        &self.points
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// The set `{x_1, ..., x_n}`.
    pub fn distinct(&self) -> EventSet {
        let mut pts = self.points.clone();
        pts.sort_unstable();
        pts.dedup();
        EventSet::from_sorted_unchecked(&self.universe, pts)
    }

    /// True when some atom occurs more than once.
    pub fn has_repetition(&self) -> bool {
        self.distinct().len() < self.points.len()
    }

    /// This sample followed by `more`.
    pub fn extended(&self, more: &[usize]) -> Result<Sample> {
        let mut points = self.points.clone();
        points.extend_from_slice(more);
        Sample::new(&self.universe, points, self.seed)
    }
}

#[derive(Serialize, Deserialize)]
struct SampleRepr {
    universe_size: usize,
    points: Vec<usize>,
    #[serde(default)]
    seed: u64,
}

impl Serialize for Sample {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        SampleRepr {
            universe_size: self.universe.size(),
            points: self.points.clone(),
            seed: self.seed,
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Sample {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let repr = SampleRepr::deserialize(d)?;
        let u = Universe::new(repr.universe_size).map_err(serde::de::Error::custom)?;
        Sample::new(&u, repr.points, repr.seed).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn distinct_and_repetition() {
        let u = Universe::new(5).unwrap();
        let s = Sample::new(&u, vec![3, 1, 3], 9).unwrap();
        assert_eq!(s.distinct().members(), &[1, 3]);
        assert!(s.has_repetition());
        assert!(!Sample::new(&u, vec![0, 1], 0).unwrap().has_repetition());
        assert!(Sample::new(&u, vec![5], 0).is_err());
    }
}
