//! Configurable differential evolution whose design — initialization,
//! mutation, crossover, population size, F, Cr — is chosen per problem by a
//! multi-head double DQN reading a 62-value landscape fingerprint, trained
//! offline over a synthetic benchmark suite.
//!
//! Modules: [`bbob`] implements the 24-function benchmark, [`sampling`] the
//! initialization strategies, [`de`] the search engine, [`ela`] the landscape
//! features, [`madqn`] the agent, [`meta`] offline training and per-problem
//! design, and [`harness`] experiments, metrics, and file formats.

pub mod bbob;
pub mod de;
pub mod ela;
pub mod error;
pub mod harness;
pub mod madqn;
pub mod meta;
pub mod rng;
pub mod sampling;

pub use error::{Error, Result};
