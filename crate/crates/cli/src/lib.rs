//! Experiment harness for the stability laboratory: config parsing,
//! orchestration of the experiment kinds, and CSV/JSON emission.

pub mod config;
pub mod experiments;
pub mod output;
pub mod stats;
