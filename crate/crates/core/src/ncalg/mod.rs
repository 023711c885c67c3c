//! Noncommutative algebra of coordinates, derivatives and dilatations.
//!
//! Elements are finite sums of words with Laurent-polynomial coefficients in
//! `r`. A [`RewriteSystem`] fixes an alphabet order and a rule for every
//! reducible adjacent pair; its normal form is the unique reduced
//! representative when the system is confluent, which
//! [`RewriteSystem::local_confluence`] checks on all overlaps.
//!
//! Indices are 1-based throughout, matching the usual `x^1, ..., x^N`.

mod element;
mod realization;
mod rewrite;
mod star;
mod suites;

use thiserror::Error;

pub use element::{Generator, NCElement};
pub use realization::{realization_symbol, Symbol};
pub use rewrite::{build_dilatation, DilatationVariant, RewriteSystem};
pub use star::{apply_star, verify_involution_consistency};
pub use suites::{verify_relation_suite, verify_subgroup_isomorphism, Suite};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum NcError {
    #[error("no rule orders the pair {0} {1}")]
    MissingRule(String, String),
    #[error("generator {0} is not in the alphabet of this system")]
    UnknownGenerator(String),
    #[error("index {index} out of range for N = {n}")]
    IndexOutOfRange { index: usize, n: usize },
    #[error("rule {0} does not decrease the termination measure")]
    NonDecreasingRule(String),
    #[error("rewriting exceeded {0} steps")]
    StepLimit(usize),
    #[error("star of {0} leaves the star-closed subalgebra")]
    NotStarClosed(String),
    #[error("{0} has no difference-operator realization")]
    NotRealizable(String),
    #[error("cannot parse generator `{0}`")]
    Parse(String),
}
