use rand::Rng;

use crate::error::{domain, Result};
use crate::measure::{Dist, Sample};
use crate::rng;

/// Inverse-CDF sampler over the support of a distribution, in atom order.
#[derive(Clone, Debug)]
pub struct Sampler {
    dist: Dist,
    cdf: Vec<f64>,
}

impl Sampler {
    pub fn new(q: &Dist) -> Self {
        let mut acc = 0.0;
        let cdf = q
            .support_weights()
            .iter()
            .map(|w| {
                acc += w;
                acc
            })
            .collect();
        Sampler { dist: q.clone(), cdf }
    }

    /// `n` i.i.d. draws keyed by `seed`.
    pub fn draw(&self, n: usize, seed: u64) -> Result<Sample> {
        let atoms = self.dist.support_atoms();
        let last = atoms.len() - 1;
        let total = self.cdf[last];
        let mut r = rng::stream(seed, "sample");
        let points = (0..n)
            .map(|_| {
                let u = r.random::<f64>() * total;
                atoms[self.cdf.partition_point(|&c| c <= u).min(last)]
            })
            .collect();
        Sample::new(self.dist.universe(), points, seed)
    }
}

pub fn sample_from(q: &Dist, n: usize, seed: u64) -> Result<Sample> {
    Sampler::new(q).draw(n, seed)
}

/// Sample size at which the realizable VC bound guarantees error below
/// `eps` with confidence `1 − delta`:
/// `⌈(4/ε)(d·log₂(16/ε) + log₂(2/δ))⌉`.
pub fn required_n(d: usize, eps: f64, delta: f64) -> Result<u64> {
    if d == 0 {
        return Err(domain("required_n needs d >= 1"));
    }
    for (name, v) in [("eps", eps), ("delta", delta)] {
        if !(v > 0.0 && v < 1.0) {
            return Err(domain(format!("{name} must lie in (0, 1), got {v}")));
        }
    }
    let n = (4.0 / eps) * (d as f64 * (16.0 / eps).log2() + (2.0 / delta).log2());
    Ok(n.ceil() as u64)
}
