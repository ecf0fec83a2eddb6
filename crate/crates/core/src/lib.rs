//! Source detection games on temporal graphs.
//!
//! A deterministic SIR engine, the round-based game between a Discoverer and
//! an oblivious Adversary, the Discoverer strategies, adversarial instance
//! generators and a reproducible experiment runner.

pub mod adversaries;
pub mod experiments;
pub mod format;
pub mod game;
pub mod graph;
pub mod infection;
pub mod rng;
pub mod separators;
pub mod strategies;
pub mod verify;
