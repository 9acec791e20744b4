//! Collapsing atoms that no constraint or objective can tell apart.

use std::collections::{BTreeMap, HashMap};

use super::FeasibleRegion;
use crate::error::{domain, Result};
use crate::measure::numeric::neumaier_sum;
use crate::measure::{Dist, EventSet, Universe};

/// A family constraint in class coordinates.
#[derive(Clone, Debug)]
pub(crate) struct FamilyCut {
    pub outside: Vec<usize>,
    pub pool: Vec<usize>,
    pub excluded: usize,
    pub eps: f64,
}

/// The region restated over classes of interchangeable atoms. Class `c`
/// carries total mass `P_c`; classes are ordered by their smallest atom.
#[derive(Clone, Debug)]
pub(crate) struct Reduced {
    pub universe: Universe,
    pub classes: Vec<Vec<usize>>,
    /// Mass must stay uniform inside these classes (they sit in a family
    /// pool, where concentrating mass could break feasibility).
    pub spread: Vec<bool>,
    /// In-sample flag per class.
    pub in_sample: Vec<bool>,
    /// Explicit constraints: classes outside `T`, and `ε`.
    pub rows: Vec<(Vec<usize>, f64)>,
    pub families: Vec<FamilyCut>,
}

impl Reduced {
    pub fn new(region: &FeasibleRegion, sample: Option<&EventSet>) -> Result<Self> {
        let n = region.universe().size();
        let cons = region.constraints();
        let words = cons.len().div_ceil(64);
        // bit j set when the atom lies outside constraint j.
        let mut bits = vec![u64::MAX; n * words.max(1)];
        for (j, (t, _)) in cons.iter().enumerate() {
            for &a in t.members() {
                bits[a * words + j / 64] &= !(1u64 << (j % 64));
            }
        }
        let mut cats = vec![0u8; n * region.families().len()];
        let nf = region.families().len();
        for (f, (k, _)) in region.families().iter().enumerate() {
            for &a in k.core().members() {
                cats[a * nf + f] = 1;
            }
            for &a in k.pool().members() {
                cats[a * nf + f] = 2;
            }
        }
        let mut flag = vec![false; n];
        if let Some(s) = sample {
            for &a in s.members() {
                flag[a] = true;
            }
        }

        let mut lookup: HashMap<(&[u64], &[u8], bool), usize> = HashMap::new();
        let mut classes: Vec<Vec<usize>> = Vec::new();
        for a in 0..n {
            let key = (&bits[a * words..(a + 1) * words], &cats[a * nf..(a + 1) * nf], flag[a]);
            let c = *lookup.entry(key).or_insert_with(|| {
                classes.push(Vec::new());
                classes.len() - 1
            });
            classes[c].push(a);
        }
        let rep: Vec<usize> = classes.iter().map(|c| c[0]).collect();
        let in_sample: Vec<bool> = rep.iter().map(|&a| flag[a]).collect();

        let mut dedup: BTreeMap<Vec<usize>, f64> = BTreeMap::new();
        for (j, (_, eps)) in cons.iter().enumerate() {
            let outside: Vec<usize> = (0..classes.len())
                .filter(|&c| bits[rep[c] * words + j / 64] >> (j % 64) & 1 == 1)
                .collect();
            if outside.is_empty() || *eps >= 1.0 {
                continue;
            }
            let e = dedup.entry(outside).or_insert(*eps);
            *e = e.min(*eps);
        }

        let mut spread = vec![false; classes.len()];
        let mut families = Vec::new();
        for (f, (k, eps)) in region.families().iter().enumerate() {
            let (mut outside, mut pool) = (Vec::new(), Vec::new());
            for (c, &a) in rep.iter().enumerate() {
                match cats[a * nf + f] {
                    0 => outside.push(c),
                    2 => {
                        pool.push(c);
                        spread[c] = true;
                    }
                    _ => {}
                }
            }
            families.push(FamilyCut {
                outside,
                pool,
                excluded: k.excluded(),
                eps: *eps,
            });
        }

        Ok(Reduced {
            universe: region.universe().clone(),
            classes,
            spread,
            in_sample,
            rows: dedup.into_iter().collect(),
            families,
        })
    }

    pub fn len(&self) -> usize {
        self.classes.len()
    }

    pub fn size(&self, c: usize) -> f64 {
        self.classes[c].len() as f64
    }

    /// The concept of family `f` with the largest complement mass under `x`,
    /// as a dense row over classes.
    pub fn family_cut(&self, f: usize, x: &[f64]) -> (Vec<f64>, f64) {
        let cut = &self.families[f];
        let mut row = vec![0.0; self.len()];
        for &c in &cut.outside {
            row[c] = 1.0;
        }
        let mut pool = cut.pool.clone();
        pool.sort_by(|&a, &b| (x[b] / self.size(b)).total_cmp(&(x[a] / self.size(a))).then(a.cmp(&b)));
        let mut left = cut.excluded;
        for c in pool {
            if left == 0 {
                break;
            }
            let take = left.min(self.classes[c].len());
            row[c] = take as f64 / self.size(c);
            left -= take;
        }
        (row, cut.eps)
    }

    pub fn explicit_row(&self, r: usize) -> (Vec<f64>, f64) {
        let mut row = vec![0.0; self.len()];
        for &c in &self.rows[r].0 {
            row[c] = 1.0;
        }
        (row, self.rows[r].1)
    }

    /// Distribution with class masses `x`. Mass stays on the smallest atom of
    /// a class unless the class is spread or `spread_all` is set.
    pub fn expand(&self, x: &[f64], spread_all: bool) -> Result<Dist> {
        let clean: Vec<f64> = x.iter().map(|v| v.max(0.0)).collect();
        let total = neumaier_sum(clean.iter().copied());
        if !(total > 0.0) {
            return Err(domain("class masses have no positive total"));
        }
        let mut pairs = Vec::new();
        for (c, atoms) in self.classes.iter().enumerate() {
            let m = clean[c] / total;
            if m <= 0.0 {
                continue;
            }
            if spread_all || self.spread[c] {
                let w = m / atoms.len() as f64;
                pairs.extend(atoms.iter().map(|&a| (a, w)));
            } else {
                pairs.push((atoms[0], m));
            }
        }
        normalized(&self.universe, pairs)
    }
}

/// Builds a distribution from weights that sum to one up to rounding.
pub(crate) fn normalized(universe: &Universe, mut pairs: Vec<(usize, f64)>) -> Result<Dist> {
    let total = neumaier_sum(pairs.iter().map(|p| p.1));
    for p in &mut pairs {
        p.1 /= total;
    }
    match Dist::new(universe, pairs.iter().copied()) {
        Ok(d) => Ok(d),
        Err(_) => {
            let mut dense = vec![0.0; universe.size()];
            for (a, w) in pairs {
                dense[a] = w;
            }
            Dist::from_unnormalized(universe, &dense)
        }
    }
}
