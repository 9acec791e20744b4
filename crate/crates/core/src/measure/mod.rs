//! Distributions over a finite universe and the scalar measures defined on
//! them.

mod dist;
mod event;
mod info;
pub mod knapsack;
pub mod numeric;
mod ops;
mod sample;
mod universe;

pub use dist::Dist;
pub use event::{Concept, EventSet};
pub use info::{binary_entropy, info, renyi_entropy, shannon_entropy, InfoMeasure, LogBase};
pub use ops::{agnostic_excess, hall, hall_eps, kl, smoothness_certificate, tv, AgnosticScores, HallTarget};
pub use sample::Sample;
pub use universe::Universe;

/// Distributions must sum to one within this tolerance.
pub const NORMALIZATION_TOL: f64 = 1e-12;

/// Slack used in mass comparisons (`q[A] ≤ eps`, constraint checks).
pub const COMPARE_TOL: f64 = 1e-9;
