//! Data-gathering schedules for multihop wireless sensor networks.
//!
//! The crate builds BS-rooted aggregation trees that maximize the minimum
//! expected node lifetime, realizes the same construction as a message-passing
//! protocol, and simulates data-gathering rounds with half-life rescheduling.
//! Baseline MST and SPT schedules are provided for comparison, together with a
//! sweep harness that produces long-format CSV.
//!
//! Node ids are dense: sensors are `0..n` and the base station is `n`.

pub mod bench;
pub mod energy;
pub mod error;
pub mod protocol;
pub mod schedule;
pub mod sim;
pub mod topology;

pub use error::{Error, Result};

/// Dense node identifier. Sensors occupy `0..n`, the base station is `n`.
pub type NodeId = usize;
