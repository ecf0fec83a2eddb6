use rand::RngCore;

use crate::game::{Action, ConfigError, Discoverer, DiscovererInfo, Observation, WatchOutcome};
use crate::graph::NodeId;

/// Watches nodes `0, 1, 2, ...` one per round and guesses the first node
/// seen being seed-infected. After `n - 1` misses the last node must be the
/// source, so it always wins within `n` rounds.
#[derive(Debug, Clone, Default)]
pub struct BruteForce {
    n: usize,
    next: usize,
    found: Option<NodeId>,
}

impl BruteForce {
    pub fn new() -> Self {
        Self::default()
    }

    /// A brute-force completion used as the fallback of other strategies.
    pub(crate) fn for_nodes(n: usize) -> Self {
        BruteForce {
            n,
            next: 0,
            found: None,
        }
    }
}

impl Discoverer for BruteForce {
    fn name(&self) -> String {
        "brute".into()
    }

    fn begin(&mut self, info: &DiscovererInfo) -> Result<(), ConfigError> {
        *self = Self::for_nodes(info.params.n);
        Ok(())
    }

    fn act(&mut self, _rng: &mut dyn RngCore) -> Action {
        match self.found {
            Some(v) => Action::Guess(v),
            None if self.next + 1 >= self.n => Action::Guess(self.n.saturating_sub(1)),
            None => Action::Watch(vec![self.next]),
        }
    }

    fn observe(&mut self, observations: &[Observation]) {
        for o in observations {
            if let WatchOutcome::SeedInfected { .. } = o.outcome {
                self.found = Some(o.node);
            }
        }
        self.next += 1;
    }
}
