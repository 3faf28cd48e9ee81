//! Poisson representability of `{0,1}`-valued random vectors and processes.
//!
//! A process `X` is Poisson representable when it has the law of the union of
//! the sets of a Poisson process with some intensity `ν` on the nonempty
//! subsets of the index set. This crate inverts finite laws to their unique
//! signed intensity, decides membership by the sign of that intensity, and
//! provides closed forms and samplers for the structured families
//! (Markov and renewal chains, mixtures of product measures, mean-field and
//! lattice models, exchangeable sequences).

pub mod association;
pub mod error;
pub mod exchangeable;
pub mod fixtures;
pub mod json;
pub mod lattice;
pub mod markov;
pub mod measure;
pub mod mixture;
pub mod moebius;
pub mod pattern;
pub mod polylog;
pub mod precision;
pub mod stationary;
pub mod subset;
pub mod tolerance;

pub use error::{Error, Result};
pub use measure::{
    condition_zero, intersection_mass, restrict, superpose, union_mass, Mass, SignedSubsetMeasure,
    SubsetMeasure,
};
pub use moebius::{
    invert, is_representable, symmetric_invert, LevelMeasure, Representability,
    SymmetricZeroPattern,
};
pub use pattern::{
    distribution_to_zero_pattern, forward_zero_pattern, zero_pattern_to_distribution,
    BinaryDistribution, ZeroPattern,
};
pub use subset::Subset;
pub use tolerance::Tolerances;
