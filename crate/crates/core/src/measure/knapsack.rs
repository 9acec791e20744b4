//! Exact subset search behind the relative hallucination rate.

use std::collections::BTreeMap;

use super::numeric::neumaier_sum;
use super::ops::merge_supports;
use super::{Dist, COMPARE_TOL};
use crate::error::{Error, Result};

/// Residual items up to which plain enumeration is used.
pub const ENUMERATION_LIMIT: usize = 25;
/// Residual items up to which meet-in-the-middle is used.
pub const MEET_IN_THE_MIDDLE_LIMIT: usize = 40;

#[derive(Clone, Copy, Debug)]
struct Item {
    weight: f64,
    value: f64,
}

pub(crate) fn relative_hallucination(p: &Dist, q: &Dist, eps: f64) -> Result<f64> {
    let cap = eps + COMPARE_TOL;
    let mut free = Vec::new();
    // Atoms with identical (q, p) weights are interchangeable; group them so
    // large uniform blocks collapse to a handful of items.
    let mut classes: BTreeMap<(u64, u64), (f64, f64, u64)> = BTreeMap::new();
    merge_supports(p, q, |_, pw, qw| {
        if pw <= 0.0 {
            return;
        }
        if qw <= 0.0 {
            free.push(pw);
        } else if qw <= cap {
            classes
                .entry((qw.to_bits(), pw.to_bits()))
                .or_insert((qw, pw, 0))
                .2 += 1;
        }
    });
    let base = neumaier_sum(free);

    let total_weight = neumaier_sum(classes.values().map(|&(w, _, c)| w * c as f64));
    if total_weight <= cap {
        let all = neumaier_sum(classes.values().map(|&(_, v, c)| v * c as f64));
        return Ok((base + all).min(1.0));
    }

    let items = split_classes(classes.values().copied());
    let best = if items.len() <= ENUMERATION_LIMIT {
        enumerate(&items, cap)
    } else if items.len() <= MEET_IN_THE_MIDDLE_LIMIT {
        meet_in_the_middle(&items, cap)
    } else {
        return Err(Error::ExactSearchInfeasible {
            items: items.len(),
            limit: MEET_IN_THE_MIDDLE_LIMIT,
        });
    };
    Ok((base + best).min(1.0))
}

/// Binary splitting: a class of `c` identical items becomes pieces of size
/// 1, 2, 4, ..., r whose subset sums cover every count in `0..=c`.
fn split_classes(classes: impl Iterator<Item = (f64, f64, u64)>) -> Vec<Item> {
    let mut out = Vec::new();
    for (w, v, mut count) in classes {
        let mut piece = 1u64;
        while count > 0 {
            let k = piece.min(count);
            out.push(Item {
                weight: w * k as f64,
                value: v * k as f64,
            });
            count -= k;
            piece *= 2;
        }
    }
    out
}

fn enumerate(items: &[Item], cap: f64) -> f64 {
    let mut sorted = items.to_vec();
    sorted.sort_by(|a, b| (b.value / b.weight).total_cmp(&(a.value / a.weight)));
    let mut best = 0.0;
    dfs(&sorted, 0, 0.0, 0.0, cap, &mut best);
    best
}

fn dfs(items: &[Item], i: usize, w: f64, v: f64, cap: f64, best: &mut f64) {
    if v > *best {
        *best = v;
    }
    if i == items.len() {
        return;
    }
    // Fractional relaxation of the remaining items bounds any completion.
    let mut room = cap - w;
    let mut bound = v;
    for it in &items[i..] {
        if it.weight <= room {
            room -= it.weight;
            bound += it.value;
        } else {
            bound += it.value * (room / it.weight);
            break;
        }
    }
    if bound <= *best {
        return;
    }
    let it = items[i];
    if w + it.weight <= cap {
        dfs(items, i + 1, w + it.weight, v + it.value, cap, best);
    }
    dfs(items, i + 1, w, v, cap, best);
}

fn subset_sums(items: &[Item], cap: f64) -> Vec<(f64, f64)> {
    let mut out = vec![(0.0, 0.0)];
    for it in items {
        let n = out.len();
        for k in 0..n {
            let (w, v) = out[k];
            if w + it.weight <= cap {
                out.push((w + it.weight, v + it.value));
            }
        }
    }
    out
}

fn meet_in_the_middle(items: &[Item], cap: f64) -> f64 {
    let (left, right) = items.split_at(items.len() / 2);
    let left = subset_sums(left, cap);
    let mut right = subset_sums(right, cap);
    right.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut prefix_best = Vec::with_capacity(right.len());
    let mut running = f64::NEG_INFINITY;
    for &(_, v) in &right {
        running = running.max(v);
        prefix_best.push(running);
    }
    let mut best = 0.0f64;
    for (wl, vl) in left {
        let room = cap - wl;
        let idx = right.partition_point(|&(w, _)| w <= room);
        if idx > 0 {
            best = best.max(vl + prefix_best[idx - 1]);
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute(items: &[Item], cap: f64) -> f64 {
        let mut best = 0.0f64;
        for mask in 0u32..(1 << items.len()) {
            let (mut w, mut v) = (0.0, 0.0);
            for (i, it) in items.iter().enumerate() {
                if mask >> i & 1 == 1 {
                    w += it.weight;
                    v += it.value;
                }
            }
            if w <= cap {
                best = best.max(v);
            }
        }
        best
    }

    fn items(seed: u64, n: usize) -> Vec<Item> {
        let mut x = seed.wrapping_mul(0x9E3779B97F4A7C15) | 1;
        let mut next = move || {
            x ^= x << 13;
            x ^= x >> 7;
            x ^= x << 17;
            (x >> 11) as f64 / (1u64 << 53) as f64
        };
        (0..n)
            .map(|_| Item {
                weight: 0.01 + next(),
                value: next(),
            })
            .collect()
    }

    #[test]
    fn enumeration_and_mitm_agree_with_brute_force() {
        for seed in 1..40u64 {
            let it = items(seed, 14);
            let cap = 2.5;
            let b = brute(&it, cap);
            assert!((enumerate(&it, cap) - b).abs() < 1e-12);
            assert!((meet_in_the_middle(&it, cap) - b).abs() < 1e-12);
        }
    }

    #[test]
    fn binary_split_covers_every_count() {
        let pieces = split_classes(std::iter::once((1.0, 1.0, 13)));
        let sizes: Vec<f64> = pieces.iter().map(|p| p.weight).collect();
        assert_eq!(sizes, vec![1.0, 2.0, 4.0, 6.0]);
        let mut reachable = std::collections::BTreeSet::new();
        for mask in 0u32..16 {
            let s: f64 = (0..4).filter(|i| mask >> i & 1 == 1).map(|i| sizes[i]).sum();
            reachable.insert(s as u64);
        }
        assert_eq!(reachable, (0..=13).collect());
    }
}
