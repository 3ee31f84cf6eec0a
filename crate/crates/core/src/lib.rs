//! Manipulation of elections by cloning candidates.
//!
//! The crate covers seven voting rules, the mechanics of cloning (expansion,
//! exhaustive and sampled success checks), constructive strategy analyzers,
//! a cost model with budgeted decision procedures, and brute-force oracles
//! that every analyzer is tested against.

pub mod error;
pub mod election;
pub mod rules;
pub mod tournament;
pub mod cloning;
pub mod analyzers;
pub mod cost;
pub mod oracle;
pub mod io;

pub use error::{Error, Result};
pub use election::{CandidateId, Election, LinearOrder, PairwiseMatrix};
pub use rules::{Rule, ScoreTable};
pub use cost::{Budget, Cost, CostFunction};
pub use oracle::SearchCaps;
