//! Concept classes and the combinatorics around them.

mod class;
mod entropy_split;
mod informativeness;
mod packing;
mod vc;

pub use class::{binomial, for_each_combination, version_space, ConceptClass, ConceptFamily, KSubsetClass};
pub use entropy_split::entropy_split_bound;
pub use informativeness::{neighborhood, sufficiency_value, InformativenessProfile, Sufficiency};
pub use packing::{packing_construct, packing_target, PackingProvenance, DEFAULT_MAX_TRIES};
pub use vc::{shatters, vc_dimension, VcDimension, MAX_SHATTER_SIZE};
