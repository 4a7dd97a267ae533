//! Peer-review corpus assembly, entity resolution, decision-stage surrogate
//! modelling and group-fairness auditing.

pub mod config;
pub mod corpus;
pub mod error;
pub mod fairness;
pub mod features;
pub mod linkage;
pub mod pipeline;
pub mod stats;
pub mod synth;

pub use error::{Error, Result};
