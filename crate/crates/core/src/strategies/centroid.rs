use std::collections::VecDeque;

use rand::RngCore;

use crate::game::{Action, ConfigError, Discoverer, DiscovererInfo, Observation, WatchOutcome};
use crate::graph::{NodeId, StaticGraph};
use crate::separators::{find_centroid, NodeWeights};

use super::brute::BruteForce;
use super::sampling::RandomWatch;

#[derive(Debug, Clone)]
enum Stage {
    Search,
    Verify(NodeId),
    Found(NodeId),
    Fallback(BruteForce),
}

/// Centroid search on known trees that tolerates obliviously dynamic seed
/// times by watching two nodes per round.
///
/// Every round watches the centroid of the candidate subtree together with a
/// uniformly random candidate. Each round is a genuine infection chain from
/// the source, so an infected centroid points at the side the chain came
/// from, and an infected random node with an uninfected centroid lies on the
/// source's side. Both cases keep at most half of the candidates.
#[derive(Debug, Clone)]
pub struct CentroidTwoWatch {
    tree: StaticGraph,
    in_cand: Vec<bool>,
    cand: Vec<NodeId>,
    centroid: Option<NodeId>,
    last_random: Option<NodeId>,
    stage: Stage,
    phases: usize,
}

impl Default for CentroidTwoWatch {
    fn default() -> Self {
        Self::new()
    }
}

impl CentroidTwoWatch {
    pub fn new() -> Self {
        CentroidTwoWatch {
            tree: StaticGraph::complete(0),
            in_cand: Vec::new(),
            cand: Vec::new(),
            centroid: None,
            last_random: None,
            stage: Stage::Search,
            phases: 0,
        }
    }

    fn current_centroid(&mut self) -> NodeId {
        if let Some(c) = self.centroid {
            return c;
        }
        let (sub, map) = self.tree.induced(&self.cand);
        let c = find_centroid(&sub, &NodeWeights::uniform(sub.n()))
            .map(|i| map[i])
            .expect("candidate set is a nonempty subtree");
        self.centroid = Some(c);
        c
    }

    /// Restricts the candidates to the component of `cand - cut` holding `anchor`.
    fn recurse(&mut self, cut: NodeId, anchor: NodeId) {
        let mut keep = vec![false; self.tree.n()];
        let mut queue = VecDeque::from([anchor]);
        keep[anchor] = true;
        while let Some(u) = queue.pop_front() {
            for &v in self.tree.neighbors(u) {
                if v != cut && self.in_cand[v] && !keep[v] {
                    keep[v] = true;
                    queue.push_back(v);
                }
            }
        }
        self.cand.retain(|&v| keep[v]);
        self.in_cand = keep;
        self.centroid = None;
        self.phases += 1;
    }
}

impl Discoverer for CentroidTwoWatch {
    fn name(&self) -> String {
        "centroid2".into()
    }

    fn begin(&mut self, info: &DiscovererInfo) -> Result<(), ConfigError> {
        if info.params.k < 2 {
            return Err(ConfigError::WatchBudget {
                need: 2,
                have: info.params.k,
            });
        }
        let tree = info.graph.clone().ok_or(ConfigError::NeedsStaticGraph)?;
        if !tree.is_tree() {
            return Err(ConfigError::NotATree);
        }
        let n = tree.n();
        self.tree = tree;
        self.in_cand = vec![true; n];
        self.cand = (0..n).collect();
        self.centroid = None;
        self.last_random = None;
        self.stage = Stage::Search;
        self.phases = 0;
        Ok(())
    }

    fn act(&mut self, rng: &mut dyn RngCore) -> Action {
        if let Stage::Search = self.stage {
            if self.cand.len() == 1 {
                self.stage = Stage::Verify(self.cand[0]);
            }
        }
        match &mut self.stage {
            Stage::Search => {
                let c = self.current_centroid();
                let r = RandomWatch::pick_from(&self.cand, rng);
                self.last_random = Some(r);
                if r == c {
                    Action::Watch(vec![c])
                } else {
                    Action::Watch(vec![c, r])
                }
            }
            Stage::Verify(v) => Action::Watch(vec![*v]),
            Stage::Found(v) => Action::Guess(*v),
            Stage::Fallback(b) => b.act(rng),
        }
    }

    fn observe(&mut self, observations: &[Observation]) {
        let outcome_of = |v: NodeId| observations.iter().find(|o| o.node == v).map(|o| o.outcome);
        match &mut self.stage {
            Stage::Search => {
                let c = self.centroid.expect("centroid chosen in act");
                let r = self.last_random.expect("random node chosen in act");
                match outcome_of(c) {
                    Some(WatchOutcome::SeedInfected { .. }) => {
                        self.stage = Stage::Found(c);
                        return;
                    }
                    Some(WatchOutcome::Infected { via, .. }) => {
                        if self.in_cand[via] {
                            self.recurse(c, via);
                        }
                        return;
                    }
                    _ => {}
                }
                match outcome_of(r) {
                    Some(WatchOutcome::SeedInfected { .. }) => self.stage = Stage::Found(r),
                    Some(WatchOutcome::Infected { .. }) if r != c => self.recurse(c, r),
                    _ => {}
                }
            }
            Stage::Verify(v) => {
                let v = *v;
                self.stage = match outcome_of(v) {
                    Some(WatchOutcome::SeedInfected { .. }) => Stage::Found(v),
                    _ => Stage::Fallback(BruteForce::for_nodes(self.tree.n())),
                };
            }
            Stage::Found(_) => {}
            Stage::Fallback(b) => b.observe(observations),
        }
    }

    fn candidates(&self) -> Option<&[NodeId]> {
        match self.stage {
            Stage::Fallback(_) => None,
            _ => Some(&self.cand),
        }
    }

    fn phases(&self) -> usize {
        self.phases
    }
}
