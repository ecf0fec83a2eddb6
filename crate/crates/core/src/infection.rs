//! One round of SIR spreading on a temporal graph.
//!
//! A node infected at step `t` is infectious during `[t + 1, t + delta]` and
//! resistant afterwards. A susceptible node `u` is infected at step `t` iff
//! some neighbor infectious at `t` shares an edge labelled `t` with it. When
//! several neighbors qualify, the [`TiePolicy`] picks the infector.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use rand::Rng;
use thiserror::Error;

use crate::graph::{NodeId, TemporalGraph, Time};
use crate::rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SeedInfection {
    pub node: NodeId,
    pub time: Time,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TiePolicy {
    LowestId,
    HighestId,
    SeededRandom(u64),
}

impl TiePolicy {
    /// The policy to use in a round keyed by `key`. Deterministic policies are
    /// returned unchanged; a random policy gets its own derived stream.
    pub fn for_round(self, key: u64) -> TiePolicy {
        match self {
            TiePolicy::SeededRandom(s) => TiePolicy::SeededRandom(rng::derive_seed(s, &[key])),
            other => other,
        }
    }

    pub fn is_deterministic(self) -> bool {
        !matches!(self, TiePolicy::SeededRandom(_))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Infector {
    Seed,
    Node(NodeId),
}

/// Who got infected in a round, when, and by whom.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InfectionOutcome {
    times: Vec<Option<Time>>,
    infector: Vec<Option<Infector>>,
    count: usize,
    seed: NodeId,
}

impl InfectionOutcome {
    pub fn time(&self, v: NodeId) -> Option<Time> {
        self.times[v]
    }

    pub fn infector(&self, v: NodeId) -> Option<Infector> {
        self.infector[v]
    }

    /// Infected nodes including the seed.
    pub fn count(&self) -> usize {
        self.count
    }

    pub fn seed(&self) -> NodeId {
        self.seed
    }

    pub fn times(&self) -> &[Option<Time>] {
        &self.times
    }

    pub fn infected(&self) -> impl Iterator<Item = (NodeId, Time)> + '_ {
        self.times
            .iter()
            .enumerate()
            .filter_map(|(v, t)| t.map(|t| (v, t)))
    }

    /// Nodes from the seed down to `v` along infector links.
    pub fn chain_to(&self, v: NodeId) -> Option<Vec<NodeId>> {
        let mut chain = vec![v];
        let mut cur = v;
        loop {
            match self.infector[cur]? {
                Infector::Seed => break,
                Infector::Node(p) => {
                    if chain.len() > self.times.len() {
                        return None;
                    }
                    chain.push(p);
                    cur = p;
                }
            }
        }
        chain.reverse();
        Some(chain)
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum EngineError {
    #[error("seed node {node} not in graph with {n} nodes")]
    SeedOutOfRange { node: NodeId, n: usize },
    #[error("seed time {time} outside [0, {t_max}]")]
    SeedTimeOutOfRange { time: Time, t_max: Time },
    #[error("infectious duration must be at least 1")]
    ZeroDelta,
}

fn check_inputs(g: &TemporalGraph, seed: SeedInfection, delta: Time) -> Result<(), EngineError> {
    if seed.node >= g.n() {
        return Err(EngineError::SeedOutOfRange {
            node: seed.node,
            n: g.n(),
        });
    }
    if seed.time > g.t_max() {
        return Err(EngineError::SeedTimeOutOfRange {
            time: seed.time,
            t_max: g.t_max(),
        });
    }
    if delta == 0 {
        return Err(EngineError::ZeroDelta);
    }
    Ok(())
}

#[inline]
fn infectious(time: Option<Time>, t: Time, delta: Time) -> bool {
    matches!(time, Some(tv) if tv < t && u64::from(t) <= u64::from(tv) + u64::from(delta))
}

struct Pending {
    target: NodeId,
    chosen: NodeId,
    seen: u32,
}

/// Simulates one round from a single seed infection.
///
/// Sweeps the edges in label order starting after the seed time; each label
/// group is resolved against the state before the group, so a node infected
/// at `t` cannot pass the infection on at `t`.
pub fn run_round(
    g: &TemporalGraph,
    seed: SeedInfection,
    delta: Time,
    tie: TiePolicy,
) -> Result<InfectionOutcome, EngineError> {
    check_inputs(g, seed, delta)?;
    let n = g.n();
    let mut times: Vec<Option<Time>> = vec![None; n];
    let mut infector: Vec<Option<Infector>> = vec![None; n];
    times[seed.node] = Some(seed.time);
    infector[seed.node] = Some(Infector::Seed);
    let mut count = 1;
    let mut horizon = u64::from(seed.time) + u64::from(delta);

    let mut rng = match tie {
        TiePolicy::SeededRandom(s) => Some(rng::stream(s, &[])),
        _ => None,
    };
    let mut slot = vec![usize::MAX; n];
    let mut pending: Vec<Pending> = Vec::new();

    let mut offer =
        |target: NodeId, from: NodeId, pending: &mut Vec<Pending>, slot: &mut [usize]| {
            if slot[target] == usize::MAX {
                slot[target] = pending.len();
                pending.push(Pending {
                    target,
                    chosen: from,
                    seen: 1,
                });
                return;
            }
            let p = &mut pending[slot[target]];
            p.seen += 1;
            match tie {
                TiePolicy::LowestId => p.chosen = p.chosen.min(from),
                TiePolicy::HighestId => p.chosen = p.chosen.max(from),
                TiePolicy::SeededRandom(_) => {
                    let r = rng.as_mut().expect("random tie policy has a stream");
                    if r.gen_range(0..p.seen) == 0 {
                        p.chosen = from;
                    }
                }
            }
        };

    let mut edges = g
        .edges_by_label()
        .skip_while(|e| e.label <= seed.time)
        .peekable();
    while let Some(first) = edges.peek() {
        let t = first.label;
        if u64::from(t) > horizon {
            break;
        }
        while let Some(e) = edges.next_if(|e| e.label == t) {
            let (tu, tv) = (times[e.u], times[e.v]);
            if tv.is_none() && infectious(tu, t, delta) {
                offer(e.v, e.u, &mut pending, &mut slot);
            } else if tu.is_none() && infectious(tv, t, delta) {
                offer(e.u, e.v, &mut pending, &mut slot);
            }
        }
        for p in pending.drain(..) {
            times[p.target] = Some(t);
            infector[p.target] = Some(Infector::Node(p.chosen));
            slot[p.target] = usize::MAX;
            count += 1;
            horizon = horizon.max(u64::from(t) + u64::from(delta));
        }
    }

    Ok(InfectionOutcome {
        times,
        infector,
        count,
        seed: seed.node,
    })
}

/// Earliest delta-constrained temporal arrival time of every node.
///
/// Label-setting search over nodes: a node's time is final when it is
/// popped, and only its final time opens the window its edges may use.
/// Kept separate from [`run_round`] so the two can check each other.
pub fn foremost_times_oracle(
    g: &TemporalGraph,
    seed: SeedInfection,
    delta: Time,
) -> Result<Vec<Option<Time>>, EngineError> {
    check_inputs(g, seed, delta)?;
    let mut best: Vec<Option<Time>> = vec![None; g.n()];
    let mut done = vec![false; g.n()];
    let mut heap = BinaryHeap::new();
    best[seed.node] = Some(seed.time);
    heap.push(Reverse((seed.time, seed.node)));
    while let Some(Reverse((tu, u))) = heap.pop() {
        if done[u] {
            continue;
        }
        done[u] = true;
        let lo = u64::from(tu) + 1;
        let hi = u64::from(tu) + u64::from(delta);
        for &(v, label) in g.neighbors(u) {
            let l = u64::from(label);
            if done[v] || l < lo || l > hi {
                continue;
            }
            if best[v].is_none_or(|b| label < b) {
                best[v] = Some(label);
                heap.push(Reverse((label, v)));
            }
        }
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path(labels: &[Time], t_max: Time) -> TemporalGraph {
        TemporalGraph::new(
            labels.len() + 1,
            t_max,
            labels.iter().enumerate().map(|(i, &l)| (i, i + 1, l)),
        )
        .unwrap()
    }

    #[test]
    fn forced_chain() {
        let g = path(&[1, 2, 3], 3);
        let out = run_round(
            &g,
            SeedInfection { node: 0, time: 0 },
            4,
            TiePolicy::LowestId,
        )
        .unwrap();
        assert_eq!(out.times(), &[Some(0), Some(1), Some(2), Some(3)]);
        assert_eq!(out.infector(0), Some(Infector::Seed));
        assert_eq!(out.infector(1), Some(Infector::Node(0)));
        assert_eq!(out.infector(2), Some(Infector::Node(1)));
        assert_eq!(out.infector(3), Some(Infector::Node(2)));
        assert_eq!(out.count(), 4);
        assert_eq!(out.chain_to(3), Some(vec![0, 1, 2, 3]));
    }

    #[test]
    fn window_expiry_stops_chain() {
        let g = path(&[1, 3], 3);
        let seed = SeedInfection { node: 0, time: 0 };
        let out = run_round(&g, seed, 1, TiePolicy::LowestId).unwrap();
        assert_eq!(out.times(), &[Some(0), Some(1), None]);
        assert_eq!(out.count(), 2);
        assert_eq!(
            foremost_times_oracle(&g, seed, 1).unwrap(),
            vec![Some(0), Some(1), None]
        );
    }

    // a=0, b=1, c=2, d=3
    fn diamond() -> TemporalGraph {
        TemporalGraph::new(4, 2, [(0, 1, 1), (0, 2, 1), (1, 3, 2), (2, 3, 2)]).unwrap()
    }

    #[test]
    fn diamond_tie_attribution() {
        let g = diamond();
        let seed = SeedInfection { node: 0, time: 0 };
        let lo = run_round(&g, seed, 3, TiePolicy::LowestId).unwrap();
        let hi = run_round(&g, seed, 3, TiePolicy::HighestId).unwrap();
        let expected = [Some(0), Some(1), Some(1), Some(2)];
        assert_eq!(lo.times(), &expected);
        assert_eq!(hi.times(), &expected);
        assert_eq!(lo.infector(3), Some(Infector::Node(1)));
        assert_eq!(hi.infector(3), Some(Infector::Node(2)));
        let mut seen = [false; 2];
        for s in 0..64 {
            let r = run_round(&g, seed, 3, TiePolicy::SeededRandom(s)).unwrap();
            assert_eq!(r.times(), &expected);
            match r.infector(3) {
                Some(Infector::Node(1)) => seen[0] = true,
                Some(Infector::Node(2)) => seen[1] = true,
                other => panic!("unexpected infector {other:?}"),
            }
        }
        assert_eq!(seen, [true, true]);
    }

    #[test]
    fn seeded_random_is_reproducible() {
        let g = diamond();
        let seed = SeedInfection { node: 0, time: 0 };
        let a = run_round(&g, seed, 3, TiePolicy::SeededRandom(9)).unwrap();
        let b = run_round(&g, seed, 3, TiePolicy::SeededRandom(9)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn same_label_edges_do_not_chain() {
        // 0 -1- 1 -1- 2: node 1 is infected at 1 and cannot use label 1 again.
        let g = path(&[1, 1], 1);
        let out = run_round(
            &g,
            SeedInfection { node: 0, time: 0 },
            5,
            TiePolicy::LowestId,
        )
        .unwrap();
        assert_eq!(out.times(), &[Some(0), Some(1), None]);
    }

    #[test]
    fn seed_after_labels_infects_only_seed() {
        let g = path(&[1, 2], 3);
        let out = run_round(
            &g,
            SeedInfection { node: 0, time: 3 },
            5,
            TiePolicy::LowestId,
        )
        .unwrap();
        assert_eq!(out.count(), 1);
    }

    #[test]
    fn rejects_bad_inputs() {
        let g = path(&[1], 1);
        assert_eq!(
            run_round(
                &g,
                SeedInfection { node: 5, time: 0 },
                1,
                TiePolicy::LowestId
            ),
            Err(EngineError::SeedOutOfRange { node: 5, n: 2 })
        );
        assert_eq!(
            foremost_times_oracle(&g, SeedInfection { node: 0, time: 2 }, 1),
            Err(EngineError::SeedTimeOutOfRange { time: 2, t_max: 1 })
        );
        assert_eq!(
            run_round(
                &g,
                SeedInfection { node: 0, time: 0 },
                0,
                TiePolicy::LowestId
            ),
            Err(EngineError::ZeroDelta)
        );
    }

    #[test]
    fn oracle_matches_forced_chain() {
        let g = path(&[1, 2, 3], 3);
        let t = foremost_times_oracle(&g, SeedInfection { node: 0, time: 0 }, 4).unwrap();
        assert_eq!(t, vec![Some(0), Some(1), Some(2), Some(3)]);
    }
}
