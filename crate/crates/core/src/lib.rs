//! Profit-sharing games built from monotone submodular valuations.
//!
//! Players choose one of `m` parties; each party `j` earns `v_j(Q_j)` from its
//! members and pays them according to one of three marginal-contribution
//! schemes (fair value, labor union, Shapley). The crate computes payoffs and
//! potentials exactly, runs best-response dynamics, and verifies equilibrium,
//! niceness and price-of-anarchy properties by exhaustive enumeration on
//! small instances.
//!
//! Indices are 0-based throughout the Rust API. The JSON file formats and the
//! CLI use 1-based players and parties, with party `0` meaning unaffiliated.

pub mod analysis;
pub mod claims;
pub mod corpus;
pub mod dynamics;
mod engine;
mod error;
pub mod format;
pub mod games;
pub mod graphgames;
pub mod rational;
pub mod valuations;

pub use error::{Error, Result};
pub use games::{GameSpec, OrderedState, PartitionState, Scheme, State, Strategy};
pub use rational::Rational;
pub use valuations::{Coalition, Valuation};
