//! Finite-universe laboratory for non-hallucinating learnability.
//!
//! A generative model is a distribution over a finite set of atoms; a facts
//! set is a subset of atoms. The crate provides:
//!
//! - [`measure`]: distributions, events, samples and the scalar measures on
//!   them (hallucination rate, relative hallucination rate, TV, KL, entropies).
//! - [`concepts`]: concept classes, version spaces, VC dimension, the
//!   informativeness neighborhood and the packing construction.
//! - [`solvers`]: exact LP and dual-ascent information maximization over the
//!   polytope of distributions with bounded complement mass.
//! - [`learners`]: empirical, improper and proper max-information learners.
//! - [`adversaries`]: seeded hard instances and lower-bound calculators.
//! - [`harness`]: seeded Monte Carlo trials, summaries and sample-complexity
//!   curves.

pub mod adversaries;
pub mod concepts;
pub mod error;
pub mod harness;
pub mod learners;
pub mod measure;
pub mod rng;
pub mod solvers;

pub use error::{Error, Result};
pub use measure::{Dist, EventSet, InfoMeasure, Sample, Universe};
