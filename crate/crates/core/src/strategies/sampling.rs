use rand::{Rng, RngCore};

use crate::game::{Action, ConfigError, Discoverer, DiscovererInfo, Observation, WatchOutcome};
use crate::graph::NodeId;

/// Uniform rejection sampling of infected nodes: watch one uniformly chosen
/// node of `pool` per round until a watched node gets infected.
#[derive(Debug, Clone, Default)]
pub struct RandomWatch {
    pool: Vec<NodeId>,
}

impl RandomWatch {
    pub fn over(pool: Vec<NodeId>) -> Self {
        RandomWatch { pool }
    }

    pub fn pool(&self) -> &[NodeId] {
        &self.pool
    }

    pub fn pick(&self, rng: &mut dyn RngCore) -> NodeId {
        Self::pick_from(&self.pool, rng)
    }

    pub fn pick_from(pool: &[NodeId], rng: &mut dyn RngCore) -> NodeId {
        pool[rng.gen_range(0..pool.len())]
    }

    /// The hit, if this observation ends the primitive.
    pub fn hit(o: &Observation) -> Option<(NodeId, WatchOutcome)> {
        o.outcome.is_infected().then_some((o.node, o.outcome))
    }
}

/// The sampling primitive as a stand-alone strategy: sample until a hit,
/// then guess the hit node. It wins only if the hit was the source itself.
#[derive(Debug, Clone, Default)]
pub struct RandomWatchUntilHit {
    sampler: RandomWatch,
    hit: Option<NodeId>,
}

impl RandomWatchUntilHit {
    pub fn new() -> Self {
        Self::default()
    }
}

impl Discoverer for RandomWatchUntilHit {
    fn name(&self) -> String {
        "lemma1".into()
    }

    fn begin(&mut self, info: &DiscovererInfo) -> Result<(), ConfigError> {
        self.sampler = RandomWatch::over((0..info.params.n).collect());
        self.hit = None;
        Ok(())
    }

    fn act(&mut self, rng: &mut dyn RngCore) -> Action {
        match self.hit {
            Some(v) => Action::Guess(v),
            None => Action::Watch(vec![self.sampler.pick(rng)]),
        }
    }

    fn observe(&mut self, observations: &[Observation]) {
        if let Some((v, _)) = observations.iter().find_map(RandomWatch::hit) {
            self.hit = Some(v);
        }
    }
}
