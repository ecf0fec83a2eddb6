use rand::RngCore;

use crate::game::{Action, ConfigError, Discoverer, DiscovererInfo, Observation, WatchOutcome};
use crate::graph::{NodeId, Time};

use super::brute::BruteForce;
use super::sampling::RandomWatch;

#[derive(Debug, Clone)]
enum Stage {
    /// Collecting infected nodes with the sampling primitive.
    Sampling,
    /// Following infector links towards the root.
    Tracing {
        current: NodeId,
        steps: usize,
    },
    Found(NodeId),
    Fallback(BruteForce),
}

/// Randomized trace-back for unknown graphs under consistent behavior.
///
/// Samples `ceil(sqrt(n))` infected nodes, starts at the earliest-infected one
/// and walks up the infection tree one watch per round. The capped variant
/// gives up after `ceil(sqrt(n))` tracing watches and guesses where it stands.
#[derive(Debug, Clone)]
pub struct TraceBack {
    capped: bool,
    quota: usize,
    sampler: RandomWatch,
    samples: Vec<(NodeId, Time, NodeId)>,
    stage: Stage,
    n: usize,
}

impl TraceBack {
    pub fn new(capped: bool) -> Self {
        TraceBack {
            capped,
            quota: 0,
            sampler: RandomWatch::default(),
            samples: Vec::new(),
            stage: Stage::Sampling,
            n: 0,
        }
    }

    fn start_tracing(&mut self) {
        let &(_, _, via) = self
            .samples
            .iter()
            .min_by_key(|&&(v, t, _)| (t, v))
            .expect("quota is at least one sample");
        // The earliest sample's own observation already names its infector.
        self.stage = Stage::Tracing {
            current: via,
            steps: 0,
        };
    }
}

fn ceil_sqrt(n: usize) -> usize {
    let mut r = (n as f64).sqrt() as usize;
    while r * r < n {
        r += 1;
    }
    while r > 0 && (r - 1) * (r - 1) >= n {
        r -= 1;
    }
    r.max(1)
}

impl Discoverer for TraceBack {
    fn name(&self) -> String {
        if self.capped { "alg1-capped" } else { "alg1" }.into()
    }

    fn begin(&mut self, info: &DiscovererInfo) -> Result<(), ConfigError> {
        self.n = info.params.n;
        self.quota = ceil_sqrt(self.n);
        self.sampler = RandomWatch::over((0..self.n).collect());
        self.samples.clear();
        self.stage = Stage::Sampling;
        Ok(())
    }

    fn act(&mut self, rng: &mut dyn RngCore) -> Action {
        match &mut self.stage {
            Stage::Sampling => Action::Watch(vec![self.sampler.pick(rng)]),
            Stage::Tracing { current, steps } => {
                if self.capped && *steps >= self.quota {
                    Action::Guess(*current)
                } else {
                    Action::Watch(vec![*current])
                }
            }
            Stage::Found(v) => Action::Guess(*v),
            Stage::Fallback(b) => b.act(rng),
        }
    }

    fn observe(&mut self, observations: &[Observation]) {
        let Some(o) = observations.first() else {
            return;
        };
        match &mut self.stage {
            Stage::Sampling => match o.outcome {
                WatchOutcome::SeedInfected { .. } => self.stage = Stage::Found(o.node),
                WatchOutcome::Infected { time, via } => {
                    self.samples.push((o.node, time, via));
                    if self.samples.len() >= self.quota {
                        self.start_tracing();
                    }
                }
                WatchOutcome::NotInfected => {}
            },
            Stage::Tracing { current, steps } => match o.outcome {
                WatchOutcome::SeedInfected { .. } => self.stage = Stage::Found(o.node),
                WatchOutcome::Infected { via, .. } => {
                    *current = via;
                    *steps += 1;
                }
                WatchOutcome::NotInfected => {
                    self.stage = Stage::Fallback(BruteForce::for_nodes(self.n));
                }
            },
            Stage::Found(_) => {}
            Stage::Fallback(b) => b.observe(observations),
        }
    }
}
