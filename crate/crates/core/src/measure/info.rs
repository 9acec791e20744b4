use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::numeric::neumaier_sum;
use super::{Dist, Sample};
use crate::error::{domain, Error, Result};

/// An information functional `I(p, x^n)`.
///
/// Shannon and Rényi entropies ignore the sample; out-of-sample mass is the
/// probability `p` assigns outside the distinct training points.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", try_from = "InfoMeasureRepr")]
pub enum InfoMeasure {
    Shannon,
    Renyi { alpha: f64 },
    OutOfSample,
}

#[derive(Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
enum InfoMeasureRepr {
    Shannon,
    Renyi { alpha: f64 },
    OutOfSample,
}

impl TryFrom<InfoMeasureRepr> for InfoMeasure {
    type Error = Error;
    fn try_from(r: InfoMeasureRepr) -> Result<Self> {
        match r {
            InfoMeasureRepr::Shannon => Ok(InfoMeasure::Shannon),
            InfoMeasureRepr::OutOfSample => Ok(InfoMeasure::OutOfSample),
            InfoMeasureRepr::Renyi { alpha } => InfoMeasure::renyi(alpha),
        }
    }
}

impl InfoMeasure {
    pub fn renyi(alpha: f64) -> Result<Self> {
        if !(alpha.is_finite() && alpha > 0.0 && (alpha - 1.0).abs() > 1e-9) {
            return Err(domain(format!(
                "Rényi order must be positive and different from 1, got {alpha}"
            )));
        }
        Ok(InfoMeasure::Renyi { alpha })
    }
}

impl fmt::Display for InfoMeasure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            InfoMeasure::Shannon => write!(f, "shannon"),
            InfoMeasure::Renyi { alpha } => write!(f, "renyi:{alpha}"),
            InfoMeasure::OutOfSample => write!(f, "out-of-sample"),
        }
    }
}

impl FromStr for InfoMeasure {
    type Err = Error;

    /// Accepts `shannon`, `renyi:<alpha>` and `out-of-sample`.
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "shannon" => Ok(InfoMeasure::Shannon),
            "out-of-sample" | "out_of_sample" => Ok(InfoMeasure::OutOfSample),
            _ => match s.strip_prefix("renyi:") {
                Some(a) => {
                    let alpha: f64 = a
                        .parse()
                        .map_err(|_| domain(format!("bad Rényi order {a:?}")))?;
                    InfoMeasure::renyi(alpha)
                }
                None => Err(domain(format!("unknown information measure {s:?}"))),
            },
        }
    }
}

/// Evaluates `I(p, s)`.
pub fn info(measure: InfoMeasure, p: &Dist, s: &Sample) -> Result<f64> {
    match measure {
        InfoMeasure::Shannon => Ok(shannon_entropy(p)),
        InfoMeasure::Renyi { alpha } => {
            InfoMeasure::renyi(alpha)?;
            Ok(renyi_entropy(p, alpha))
        }
        InfoMeasure::OutOfSample => {
            p.universe().ensure_same(s.universe())?;
            Ok(p.mass_split(&s.distinct()).1)
        }
    }
}

/// `H(p) = Σ p log(1/p)` in nats, with `0 log(1/0) = 0`.
pub fn shannon_entropy(p: &Dist) -> f64 {
    neumaier_sum(p.support_weights().iter().map(|&w| -w * w.ln())).max(0.0)
}

/// `H_α(p) = log(Σ p^α) / (1 − α)` in nats.
pub fn renyi_entropy(p: &Dist, alpha: f64) -> f64 {
    let s = neumaier_sum(p.support_weights().iter().map(|&w| w.powf(alpha)));
    (s.ln() / (1.0 - alpha)).max(0.0)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LogBase {
    Nats,
    Bits,
}

/// Binary entropy `h(x) = −x log x − (1−x) log(1−x)`.
pub fn binary_entropy(x: f64, base: LogBase) -> Result<f64> {
    if !(0.0..=1.0).contains(&x) {
        return Err(domain(format!("binary entropy argument {x} outside [0, 1]")));
    }
    let term = |t: f64| if t > 0.0 { -t * t.ln() } else { 0.0 };
    let nats = term(x) + term(1.0 - x);
    Ok(match base {
        LogBase::Nats => nats,
        LogBase::Bits => nats / std::f64::consts::LN_2,
    })
}
