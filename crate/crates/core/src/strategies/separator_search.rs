use rand::RngCore;

use crate::game::{Action, ConfigError, Discoverer, DiscovererInfo, Observation, WatchOutcome};
use crate::graph::{NodeId, StaticGraph};
use crate::separators::{
    balanced_separator, heuristic_tree_decomposition, NodeWeights, TreeDecomposition,
};

use super::brute::BruteForce;
use super::sampling::RandomWatch;

#[derive(Debug, Clone)]
enum Stage {
    Plan,
    Separator {
        sep: Vec<NodeId>,
        seen: Vec<WatchOutcome>,
    },
    Search {
        sep: Vec<NodeId>,
        sampler: RandomWatch,
    },
    Verify(NodeId),
    Found(NodeId),
    Fallback(BruteForce),
}

/// Binary search over balanced separators of the candidate set, for known
/// graphs under consistent behavior.
///
/// Each phase watches a balanced separator of the current candidates one node
/// per round. If the infection entered the separator, the source lies in the
/// component the earliest separator infection came from; otherwise uniform
/// sampling among the remaining candidates finds an infected node whose
/// component must hold the source. Either way at most half the candidates
/// survive. A single remaining candidate is watched once before guessing.
#[derive(Debug, Clone)]
pub struct SeparatorSearch {
    graph: StaticGraph,
    td: TreeDecomposition,
    in_cand: Vec<bool>,
    cand: Vec<NodeId>,
    stage: Stage,
    phases: usize,
}

impl Default for SeparatorSearch {
    fn default() -> Self {
        Self::new()
    }
}

impl SeparatorSearch {
    pub fn new() -> Self {
        SeparatorSearch {
            graph: StaticGraph::complete(0),
            td: TreeDecomposition {
                bags: Vec::new(),
                tree: Vec::new(),
            },
            in_cand: Vec::new(),
            cand: Vec::new(),
            stage: Stage::Plan,
            phases: 0,
        }
    }

    pub fn width(&self) -> usize {
        self.td.width()
    }

    /// Keeps only the candidates in the component of `g - sep` containing `anchor`.
    fn restrict(&mut self, sep: &[NodeId], anchor: NodeId) {
        let mut removed = vec![false; self.graph.n()];
        for &s in sep {
            removed[s] = true;
        }
        let (comp, _) = self.graph.components(&removed);
        let keep = comp[anchor];
        self.cand.retain(|&v| comp[v] == keep && keep != usize::MAX);
        self.in_cand.iter_mut().for_each(|b| *b = false);
        for &v in &self.cand {
            self.in_cand[v] = true;
        }
        self.stage = Stage::Plan;
    }

    fn drop_nodes(&mut self, nodes: &[NodeId]) {
        for &v in nodes {
            self.in_cand[v] = false;
        }
        let in_cand = &self.in_cand;
        self.cand.retain(|&v| in_cand[v]);
    }

    fn fallback(&mut self) {
        self.stage = Stage::Fallback(BruteForce::for_nodes(self.graph.n()));
    }

    /// All separator nodes have been watched once and none was the seed.
    fn resolve_separator(&mut self, sep: Vec<NodeId>, seen: Vec<WatchOutcome>) {
        let earliest = sep
            .iter()
            .zip(&seen)
            .filter_map(|(&v, o)| o.time().map(|t| (t, v)))
            .min();
        let Some((_, mut x)) = earliest else {
            // No separator node was infected, so none of them is the source.
            self.drop_nodes(&sep);
            if self.cand.is_empty() {
                self.fallback();
            } else {
                let sampler = RandomWatch::over(self.cand.clone());
                self.stage = Stage::Search { sep, sampler };
            }
            return;
        };
        // Follow infector links inside the separator until they leave it.
        for _ in 0..=sep.len() {
            let i = sep
                .iter()
                .position(|&s| s == x)
                .expect("x is a separator node");
            match seen[i] {
                WatchOutcome::Infected { via, .. } => match sep.iter().position(|&s| s == via) {
                    Some(_) => x = via,
                    None => {
                        self.drop_nodes(&sep);
                        self.restrict(&sep, via);
                        if self.cand.is_empty() {
                            self.fallback();
                        }
                        return;
                    }
                },
                WatchOutcome::SeedInfected { .. } => {
                    self.stage = Stage::Found(x);
                    return;
                }
                WatchOutcome::NotInfected => break,
            }
        }
        self.fallback();
    }
}

impl Discoverer for SeparatorSearch {
    fn name(&self) -> String {
        "alg2".into()
    }

    fn begin(&mut self, info: &DiscovererInfo) -> Result<(), ConfigError> {
        let graph = info.graph.clone().ok_or(ConfigError::NeedsStaticGraph)?;
        let n = graph.n();
        self.td = heuristic_tree_decomposition(&graph);
        self.graph = graph;
        self.in_cand = vec![true; n];
        self.cand = (0..n).collect();
        self.stage = Stage::Plan;
        self.phases = 0;
        Ok(())
    }

    fn act(&mut self, rng: &mut dyn RngCore) -> Action {
        loop {
            match &mut self.stage {
                Stage::Plan => {
                    if self.cand.len() <= 1 {
                        self.stage = match self.cand.first() {
                            Some(&v) => Stage::Verify(v),
                            None => Stage::Fallback(BruteForce::for_nodes(self.graph.n())),
                        };
                        continue;
                    }
                    self.phases += 1;
                    let w = NodeWeights::from_set(self.graph.n(), self.cand.iter().copied());
                    let sep = balanced_separator(&self.graph, &w, &self.td);
                    self.stage = Stage::Separator {
                        sep,
                        seen: Vec::new(),
                    };
                }
                Stage::Separator { sep, seen } => return Action::Watch(vec![sep[seen.len()]]),
                Stage::Search { sampler, .. } => return Action::Watch(vec![sampler.pick(rng)]),
                Stage::Verify(v) => return Action::Watch(vec![*v]),
                Stage::Found(v) => return Action::Guess(*v),
                Stage::Fallback(b) => return b.act(rng),
            }
        }
    }

    fn observe(&mut self, observations: &[Observation]) {
        let Some(o) = observations.first().copied() else {
            return;
        };
        if let (WatchOutcome::SeedInfected { .. }, false) =
            (o.outcome, matches!(self.stage, Stage::Fallback(_)))
        {
            self.stage = Stage::Found(o.node);
            return;
        }
        match std::mem::replace(&mut self.stage, Stage::Plan) {
            Stage::Separator { sep, mut seen } => {
                seen.push(o.outcome);
                if seen.len() == sep.len() {
                    self.resolve_separator(sep, seen);
                } else {
                    self.stage = Stage::Separator { sep, seen };
                }
            }
            Stage::Search { sep, sampler } => {
                if o.outcome.is_infected() {
                    self.restrict(&sep, o.node);
                } else {
                    self.stage = Stage::Search { sep, sampler };
                }
            }
            Stage::Verify(_) => self.fallback(),
            Stage::Fallback(mut b) => {
                b.observe(observations);
                self.stage = Stage::Fallback(b);
            }
            other => self.stage = other,
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
