//! Exact laboratory for the fixpoint dynamics of voting rules.
//!
//! Voting rules on `n` voters and `m` candidates are dense lookup tables;
//! probabilities, distances and forces are exact rationals. The crate covers
//! the metric `d_μ` on Pareto rules, voter force and the `Φ` map, the
//! equivalence classes of rules under voter relabeling, quotient metrics,
//! lifted distributions, and an exhaustive check of Arrow's theorem at small
//! scale.

pub mod arrowcheck;
pub mod cli;
pub mod dynamics;
pub mod error;
pub mod measures;
pub mod orders;
pub mod quotient;
pub mod ratio;
pub mod rules;

pub use error::{Error, Result};
pub use measures::Distribution;
pub use orders::{LinearOrder, Profile, ProfileSpace, VoterPermutation};
pub use ratio::Rational;
pub use rules::VotingRule;
