use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::Universe;
use crate::error::Result;

/// A set of atoms. Members are kept sorted and unique, so equality is set
/// equality. Concepts (candidate facts sets) are event sets as well.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct EventSet {
    universe: Universe,
    members: Vec<usize>,
}

/// A candidate facts set.
pub type Concept = EventSet;

impl EventSet {
    pub fn new(universe: &Universe, members: impl IntoIterator<Item = usize>) -> Result<Self> {
        let mut members: Vec<usize> = members.into_iter().collect();
        for &a in &members {
            universe.check_atom(a)?;
        }
        members.sort_unstable();
        members.dedup();
        Ok(EventSet {
            universe: universe.clone(),
            members,
        })
    }

    pub fn empty(universe: &Universe) -> Self {
        EventSet {
            universe: universe.clone(),
            members: Vec::new(),
        }
    }

    pub fn full(universe: &Universe) -> Self {
        EventSet {
            universe: universe.clone(),
            members: (0..universe.size()).collect(),
        }
    }

    /// Half-open atom range `start..end`.
    pub fn range(universe: &Universe, start: usize, end: usize) -> Result<Self> {
        EventSet::new(universe, start..end)
    }

    pub(crate) fn from_sorted_unchecked(universe: &Universe, members: Vec<usize>) -> Self {
        debug_assert!(members.windows(2).all(|w| w[0] < w[1]));
        debug_assert!(members.last().map_or(true, |&a| a < universe.size()));
        EventSet {
            universe: universe.clone(),
            members,
        }
    }

    pub fn universe(&self) -> &Universe {
        &self.universe
    }

    pub fn members(&self) -> &[usize] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, atom: usize) -> bool {
        self.members.binary_search(&atom).is_ok()
    }

    pub fn complement(&self) -> EventSet {
        let mut out = Vec::with_capacity(self.universe.size() - self.members.len());
        let mut it = self.members.iter().peekable();
        for a in 0..self.universe.size() {
            if it.peek() == Some(&&a) {
                it.next();
            } else {
                out.push(a);
            }
        }
        EventSet::from_sorted_unchecked(&self.universe, out)
    }

    pub fn union(&self, other: &EventSet) -> Result<EventSet> {
        self.universe.ensure_same(&other.universe)?;
        let mut out = Vec::with_capacity(self.len() + other.len());
        let (a, b) = (&self.members, &other.members);
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a[i].cmp(&b[j]) {
                std::cmp::Ordering::Less => {
                    out.push(a[i]);
                    i += 1;
                }
                std::cmp::Ordering::Greater => {
                    out.push(b[j]);
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    out.push(a[i]);
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&a[i..]);
        out.extend_from_slice(&b[j..]);
        Ok(EventSet::from_sorted_unchecked(&self.universe, out))
    }

    pub fn intersection(&self, other: &EventSet) -> Result<EventSet> {
        self.universe.ensure_same(&other.universe)?;
        let out = self
            .members
            .iter()
            .copied()
            .filter(|&a| other.contains(a))
            .collect();
        Ok(EventSet::from_sorted_unchecked(&self.universe, out))
    }

    pub fn difference(&self, other: &EventSet) -> Result<EventSet> {
        self.universe.ensure_same(&other.universe)?;
        let out = self
            .members
            .iter()
            .copied()
            .filter(|&a| !other.contains(a))
            .collect();
        Ok(EventSet::from_sorted_unchecked(&self.universe, out))
    }

    pub fn is_subset(&self, other: &EventSet) -> bool {
        self.members.iter().all(|&a| other.contains(a))
    }

    pub fn intersection_len(&self, other: &EventSet) -> usize {
        let (a, b) = (&self.members, &other.members);
        let (mut i, mut j, mut n) = (0, 0, 0);
        while i < a.len() && j < b.len() {
            match a[i].cmp(&b[j]) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => {
                    n += 1;
                    i += 1;
                    j += 1;
                }
            }
        }
        n
    }
}

#[derive(Serialize, Deserialize)]
struct EventSetRepr {
    universe_size: usize,
    members: Vec<usize>,
}

impl Serialize for EventSet {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        EventSetRepr {
            universe_size: self.universe.size(),
            members: self.members.clone(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for EventSet {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let repr = EventSetRepr::deserialize(d)?;
        let u = Universe::new(repr.universe_size).map_err(serde::de::Error::custom)?;
        EventSet::new(&u, repr.members).map_err(serde::de::Error::custom)
    }
}
