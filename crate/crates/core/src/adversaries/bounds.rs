use crate::error::{domain, Result};
use crate::measure::{binary_entropy, LogBase};

/// Fano lower bound on identification error:
/// `max(0, 1 − (n · kl_sup + log 2) / log |C|)`.
pub fn fano_bound(n: u64, class_size: u64, kl_sup: f64) -> Result<f64> {
    if class_size < 2 {
        return Err(domain(format!("Fano bound needs at least two hypotheses, got {class_size}")));
    }
    if !(kl_sup >= 0.0) {
        return Err(domain(format!("KL bound must be nonnegative, got {kl_sup}")));
    }
    let v = 1.0 - (n as f64 * kl_sup + std::f64::consts::LN_2) / (class_size as f64).ln();
    Ok(v.max(0.0))
}

/// Root of `h(2ε) + 5ε = 1` on `[0, 1/4]` by bisection to width `tol`.
///
/// The left side is increasing there, so the root is unique; below it no
/// high-entropy distribution can put mass `1 − ε` on two sets from the
/// packing at once.
pub fn entropy_threshold(base: LogBase, tol: f64) -> Result<f64> {
    if !(tol > 0.0) {
        return Err(domain("bisection tolerance must be positive"));
    }
    let f = |e: f64| -> Result<f64> { Ok(binary_entropy(2.0 * e, base)? + 5.0 * e - 1.0) };
    let (mut lo, mut hi) = (0.0f64, 0.25f64);
    if f(lo)? > 0.0 || f(hi)? < 0.0 {
        return Err(domain("threshold equation has no sign change on [0, 1/4]"));
    }
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if f(mid)? < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fano_cases() {
        assert!(fano_bound(0, 1, 0.0).is_err());
        let c: u64 = 1 << 40;
        let v = fano_bound(0, c, 0.0).unwrap();
        assert!((v - (1.0 - 2f64.ln() / (c as f64).ln())).abs() < 1e-15);
        // n · log 2 + log 2 exceeds log |C| once n = log|C| / log 2.
        assert_eq!(fano_bound(40, c, 2f64.ln()).unwrap(), 0.0);
        assert_eq!(fano_bound(1, 4, 2f64.ln()).unwrap(), 0.0);
    }

    #[test]
    fn threshold_values() {
        let bits = entropy_threshold(LogBase::Bits, 1e-12).unwrap();
        assert!((bits - 0.076_520_411_8).abs() < 1e-9);
        let nats = entropy_threshold(LogBase::Nats, 1e-12).unwrap();
        assert!((nats - 0.099_948_229_6).abs() < 1e-9);
    }
}
