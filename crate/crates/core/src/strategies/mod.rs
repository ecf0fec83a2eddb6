//! Discoverer strategies and the name registry used by the CLI.

mod brute;
mod centroid;
mod registry;
mod sampling;
mod separator_search;
mod trace_back;
mod wrappers;

pub use brute::BruteForce;
pub use centroid::CentroidTwoWatch;
pub use registry::StrategySpec;
pub use sampling::{RandomWatch, RandomWatchUntilHit};
pub use separator_search::SeparatorSearch;
pub use trace_back::TraceBack;
pub use wrappers::{KToOne, UnknownViaKnown};
