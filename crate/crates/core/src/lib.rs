//! Meta-learning based recommendation of classification algorithms.
//!
//! Given a collection of historical classification problems, this crate
//! characterizes each problem with five families of meta-features, derives a
//! multi-label meta-target marking which candidate algorithms are
//! statistically indistinguishable from the best, trains one binary decision
//! tree per (meta-feature combination, algorithm) pair, prunes that model
//! matrix by accuracy and kappa-based diversity, and combines the survivors
//! by weighted voting into ranked recommendations for new problems.

pub mod cli;
pub mod ensemble;
pub mod error;
pub mod eval;
pub mod learners;
pub mod metadata;
pub mod metafeatures;
pub mod metatarget;
pub mod rng;
pub mod stats;
pub mod synth;
pub mod tabular;

pub use error::{Error, Result};
