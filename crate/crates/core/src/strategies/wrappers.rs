use std::collections::VecDeque;

use rand::RngCore;

use crate::game::{
    Action, Behavior, ConfigError, Discoverer, DiscovererInfo, Knowledge, Observation,
};
use crate::graph::{NodeId, StaticGraph};

/// Runs a `k`-watch strategy with one watch per round.
///
/// Every multi-watch round of the inner strategy is replayed as consecutive
/// single-watch rounds; the inner strategy then receives all of their
/// observations at once, stamped with its own round number. Only sound under
/// consistent behavior, where each replayed round is identical.
pub struct KToOne {
    inner: Box<dyn Discoverer>,
    inner_k: usize,
    queue: VecDeque<NodeId>,
    merged: Vec<Observation>,
    inner_round: usize,
}

impl KToOne {
    pub fn new(inner: Box<dyn Discoverer>, inner_k: usize) -> Self {
        KToOne {
            inner,
            inner_k,
            queue: VecDeque::new(),
            merged: Vec::new(),
            inner_round: 0,
        }
    }
}

impl Discoverer for KToOne {
    fn name(&self) -> String {
        format!("k2one({})", self.inner.name())
    }

    fn begin(&mut self, info: &DiscovererInfo) -> Result<(), ConfigError> {
        if info.params.behavior != Behavior::Consistent {
            return Err(ConfigError::NeedsConsistent);
        }
        let mut inner_info = info.clone();
        inner_info.params.k = self.inner_k;
        self.queue.clear();
        self.merged.clear();
        self.inner_round = 0;
        self.inner.begin(&inner_info)
    }

    fn act(&mut self, rng: &mut dyn RngCore) -> Action {
        if self.queue.is_empty() {
            match self.inner.act(rng) {
                Action::Guess(v) => return Action::Guess(v),
                Action::Watch(vs) => {
                    self.inner_round += 1;
                    if vs.is_empty() {
                        return Action::Watch(Vec::new());
                    }
                    self.queue.extend(vs);
                }
            }
        }
        let v = self.queue.pop_front().expect("queue refilled above");
        Action::Watch(vec![v])
    }

    fn observe(&mut self, observations: &[Observation]) {
        let round = self.inner_round;
        self.merged
            .extend(observations.iter().map(|o| Observation { round, ..*o }));
        if self.queue.is_empty() {
            let merged = std::mem::take(&mut self.merged);
            self.inner.observe(&merged);
        }
    }

    fn candidates(&self) -> Option<&[NodeId]> {
        self.inner.candidates()
    }

    fn phases(&self) -> usize {
        self.inner.phases()
    }
}

/// Plays an unknown-graph game with a known-graph strategy by telling it the
/// graph is complete and the lifetime is `t_max + delta + 1`. Watches,
/// observations and the guess are relayed unchanged.
pub struct UnknownViaKnown {
    inner: Box<dyn Discoverer>,
}

impl UnknownViaKnown {
    pub fn new(inner: Box<dyn Discoverer>) -> Self {
        UnknownViaKnown { inner }
    }
}

impl Discoverer for UnknownViaKnown {
    fn name(&self) -> String {
        format!("unknown-via({})", self.inner.name())
    }

    fn begin(&mut self, info: &DiscovererInfo) -> Result<(), ConfigError> {
        let mut params = info.params;
        params.t_max = params.t_max + params.delta + 1;
        params.knowledge = Knowledge::KnownStatic;
        let lifted = DiscovererInfo {
            params,
            graph: Some(StaticGraph::complete(params.n)),
        };
        self.inner.begin(&lifted)
    }

    fn act(&mut self, rng: &mut dyn RngCore) -> Action {
        self.inner.act(rng)
    }

    fn observe(&mut self, observations: &[Observation]) {
        self.inner.observe(observations)
    }

    fn candidates(&self) -> Option<&[NodeId]> {
        self.inner.candidates()
    }

    fn phases(&self) -> usize {
        self.inner.phases()
    }
}
