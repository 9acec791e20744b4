use crate::error::{domain, Result};
use crate::measure::numeric::neumaier_sum;
use crate::measure::{shannon_entropy, Dist, EventSet};

/// Chain-rule decomposition of `H(p)` over a three-block partition:
/// `Σ_i p[A_i] log(1/p[A_i]) + p[A_i] H(p | A_i)`.
///
/// Fails when the blocks do not partition the universe or when the
/// decomposition disagrees with `H(p)` by more than `1e-9`.
pub fn entropy_split_bound(p: &Dist, a1: &EventSet, a2: &EventSet, a3: &EventSet) -> Result<f64> {
    let blocks = [a1, a2, a3];
    let n = p.universe().size();
    let mut owner = vec![usize::MAX; n];
    for (i, b) in blocks.iter().enumerate() {
        p.universe().ensure_same(b.universe())?;
        for &a in b.members() {
            if owner[a] != usize::MAX {
                return Err(domain(format!("atom {a} lies in two blocks")));
            }
            owner[a] = i;
        }
    }
    if owner.contains(&usize::MAX) {
        return Err(domain("blocks do not cover the universe"));
    }
    let mut terms = Vec::new();
    for b in blocks {
        let mass = p.mass(b)?;
        if mass <= 0.0 {
            continue;
        }
        terms.push(-mass * mass.ln());
        let cond = neumaier_sum(b.members().iter().filter_map(|&a| {
            let w = p.weight(a);
            (w > 0.0).then(|| (w / mass) * (mass / w).ln())
        }));
        terms.push(mass * cond);
    }
    let split = neumaier_sum(terms);
    let h = shannon_entropy(p);
    if (split - h).abs() > 1e-9 {
        return Err(domain(format!("decomposition {split} differs from entropy {h}")));
    }
    Ok(split)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measure::Universe;

    #[test]
    fn uniform_thirds() {
        let uni = Universe::new(9).unwrap();
        let p = Dist::uniform_over_universe(&uni);
        let parts: Vec<EventSet> = (0..3).map(|i| EventSet::range(&uni, 3 * i, 3 * i + 3).unwrap()).collect();
        let v = entropy_split_bound(&p, &parts[0], &parts[1], &parts[2]).unwrap();
        assert!((v - 9f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn supported_in_one_block() {
        let uni = Universe::new(6).unwrap();
        let p = Dist::new(&uni, [(2, 0.5), (3, 0.5)]).unwrap();
        let a1 = EventSet::range(&uni, 0, 2).unwrap();
        let a2 = EventSet::range(&uni, 2, 4).unwrap();
        let a3 = EventSet::range(&uni, 4, 6).unwrap();
        assert!((entropy_split_bound(&p, &a1, &a2, &a3).unwrap() - 2f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn rejects_non_partitions() {
        let uni = Universe::new(4).unwrap();
        let p = Dist::uniform_over_universe(&uni);
        let a = EventSet::range(&uni, 0, 2).unwrap();
        let b = EventSet::range(&uni, 1, 3).unwrap();
        let c = EventSet::range(&uni, 3, 4).unwrap();
        assert!(entropy_split_bound(&p, &a, &b, &c).is_err());
        let b2 = EventSet::range(&uni, 2, 3).unwrap();
        let e = EventSet::empty(&uni);
        assert!(entropy_split_bound(&p, &a, &b2, &e).is_err());
    }
}
