//! Instance generators: the lower-bound families and random instance pools.
//!
//! Every generator shuffles node identifiers before returning, so an index
//! reveals nothing about the construction.

use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashSet};
use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, RngCore};
use thiserror::Error;

use crate::game::AdversaryInstance;
use crate::graph::{NodeId, StaticGraph, TemporalGraph, Time};
use crate::infection::TiePolicy;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GenError {
    #[error("{family} needs n >= {min}, got {n}")]
    TooSmall {
        family: &'static str,
        n: usize,
        min: usize,
    },
    #[error("hamiltonian family needs odd n, got {0}")]
    EvenOrder(usize),
    #[error("source position {s} outside 1..={n}")]
    SplitOutOfRange { s: usize, n: usize },
    #[error("no connected simple graph with {n} nodes and {m} edges")]
    EdgeCount { n: usize, m: usize },
    #[error("unknown family {name:?}; known: {known}")]
    UnknownFamily { name: String, known: String },
}

const FAMILIES: &str = "path, tree-reversed, hamiltonian, random-tree, random-graph, partial-ktree";

/// Label scheme for the random families.
///
/// Every edge gets `spacing * layer + jitter` where `layer` is the BFS layer
/// of its endpoint farther from the source and `jitter` is uniform in
/// `0..spacing`. With `delta >= 2 * spacing - 1` this lets the infection
/// sweep outward layer by layer. Each edge is independently blocked with
/// probability `block_rate / sqrt(n)`; a blocked edge is pushed `delta + 1`
/// later so it is never live when its near endpoint is infectious.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LabelScheme {
    pub spacing: Time,
    pub delta: Time,
    pub block_rate: f64,
    /// Seed times per round cycle; 0 means consistent (seed time 0). Dynamic
    /// seed times are drawn uniformly from `0..=spacing`.
    pub dynamic_seeds: usize,
}

impl Default for LabelScheme {
    fn default() -> Self {
        LabelScheme {
            spacing: 2,
            delta: 3,
            block_rate: 0.25,
            dynamic_seeds: 0,
        }
    }
}

/// An instance family with its shape parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Family {
    /// Increasing labels along a path, seeded at an endpoint.
    Path,
    /// Path whose labels decrease towards the source from the left and
    /// increase from it to the right. `None` draws the source uniformly.
    TreeReversed {
        s: Option<usize>,
    },
    /// Complete graph on `n - 1` nodes cycled through edge-disjoint
    /// Hamiltonian paths, one per round.
    Hamiltonian,
    RandomTree,
    /// Connected random graph; `None` uses `n - 1 + n / 2` edges.
    RandomGraph {
        m: Option<usize>,
    },
    /// Random `k`-tree with every non-backbone edge kept with probability `keep`.
    PartialKTree {
        k: usize,
        keep: f64,
    },
}

impl Family {
    pub fn name(&self) -> &'static str {
        match self {
            Family::Path => "path",
            Family::TreeReversed { .. } => "tree-reversed",
            Family::Hamiltonian => "hamiltonian",
            Family::RandomTree => "random-tree",
            Family::RandomGraph { .. } => "random-graph",
            Family::PartialKTree { .. } => "partial-ktree",
        }
    }

    /// Whether the family's static graph is always a tree.
    pub fn is_tree(&self) -> bool {
        matches!(
            self,
            Family::Path | Family::TreeReversed { .. } | Family::RandomTree
        )
    }

    pub fn generate(
        &self,
        n: usize,
        labels: &LabelScheme,
        rng: &mut dyn RngCore,
    ) -> Result<AdversaryInstance, GenError> {
        match *self {
            Family::Path => gen_path_consistent(n, rng),
            Family::TreeReversed { s } => {
                if n == 0 {
                    return Err(GenError::TooSmall {
                        family: "tree-reversed",
                        n,
                        min: 1,
                    });
                }
                let s = s.unwrap_or_else(|| rng.gen_range(1..=n));
                gen_tree_reversed(n, s, rng)
            }
            Family::Hamiltonian => gen_hamiltonian_cycler(n, rng),
            Family::RandomTree => gen_random_tree(n, labels, rng),
            Family::RandomGraph { m } => {
                let m = m.unwrap_or_else(|| {
                    (n.saturating_sub(1) + n / 2).min(n * n.saturating_sub(1) / 2)
                });
                gen_random_graph(n, m, labels, rng)
            }
            Family::PartialKTree { k, keep } => gen_partial_ktree(n, k, keep, labels, rng),
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = GenError;

    /// Parses a family name with default parameters.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s {
            "path" => Family::Path,
            "tree-reversed" => Family::TreeReversed { s: None },
            "hamiltonian" => Family::Hamiltonian,
            "random-tree" => Family::RandomTree,
            "random-graph" => Family::RandomGraph { m: None },
            "partial-ktree" => Family::PartialKTree { k: 2, keep: 0.9 },
            _ => {
                return Err(GenError::UnknownFamily {
                    name: s.into(),
                    known: FAMILIES.into(),
                })
            }
        })
    }
}

/// A construction in its natural node order, before identifiers are shuffled.
struct Construction {
    n: usize,
    t_max: Time,
    edges: Vec<(NodeId, NodeId, Time)>,
    delta: Time,
    source: NodeId,
    schedule: Vec<Time>,
    tie: TiePolicy,
}

impl Construction {
    /// Relabels nodes by a uniform permutation and builds the instance.
    fn shuffled(self, rng: &mut dyn RngCore) -> AdversaryInstance {
        let mut perm: Vec<NodeId> = (0..self.n).collect();
        perm.shuffle(rng);
        let edges = self
            .edges
            .into_iter()
            .map(|(u, v, l)| (perm[u], perm[v], l));
        let graph = TemporalGraph::new(self.n, self.t_max, edges)
            .expect("generator produced an invalid graph");
        AdversaryInstance::new(
            graph,
            self.delta,
            perm[self.source],
            self.schedule,
            self.tie,
        )
        .expect("generator produced an invalid instance")
    }
}

/// Path `0 - 1 - ... - n-1` with label `i` on the `i`-th edge, seeded at node
/// 0 at time 0 with `delta = t_max = n`. Every round infects the whole path.
pub fn gen_path_consistent(n: usize, rng: &mut dyn RngCore) -> Result<AdversaryInstance, GenError> {
    if n < 2 {
        return Err(GenError::TooSmall {
            family: "path",
            n,
            min: 2,
        });
    }
    let edges = (0..n - 1).map(|i| (i, i + 1, (i + 1) as Time)).collect();
    let n_t = n as Time;
    Ok(Construction {
        n,
        t_max: n_t,
        edges,
        delta: n_t,
        source: 0,
        schedule: vec![0],
        tie: TiePolicy::LowestId,
    }
    .shuffled(rng))
}

/// Path on positions `1..=n` with source at position `s`: the edge
/// `(i, i+1)` is labeled `n - i` left of the source and `i` from it onward.
/// With `delta = n` every node is infected every round, and an observation
/// only tells which side of the source a node is on.
pub fn gen_tree_reversed(
    n: usize,
    s: usize,
    rng: &mut dyn RngCore,
) -> Result<AdversaryInstance, GenError> {
    if n == 0 {
        return Err(GenError::TooSmall {
            family: "tree-reversed",
            n,
            min: 1,
        });
    }
    if !(1..=n).contains(&s) {
        return Err(GenError::SplitOutOfRange { s, n });
    }
    let edges = (1..n)
        .map(|i| {
            let label = if i < s { n - i } else { i };
            (i - 1, i, label as Time)
        })
        .collect();
    let n_t = n as Time;
    Ok(Construction {
        n,
        t_max: n_t,
        edges,
        delta: n_t,
        source: s - 1,
        schedule: vec![0],
        tie: TiePolicy::LowestId,
    }
    .shuffled(rng))
}

/// `m / 2` edge-disjoint Hamiltonian paths covering `K_m` for even `m`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HamiltonianDecomposition {
    pub m: usize,
    pub paths: Vec<Vec<NodeId>>,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DecompositionError {
    #[error("node count {0} is not even and positive")]
    BadOrder(usize),
    #[error("expected {expected} paths, found {found}")]
    PathCount { expected: usize, found: usize },
    #[error("path {0} is not a Hamiltonian path")]
    NotHamiltonian(usize),
    #[error("edge ({0}, {1}) lies on two paths")]
    SharedEdge(NodeId, NodeId),
}

impl HamiltonianDecomposition {
    /// Zigzag construction: path `i` visits `i, i+1, i-1, i+2, i-2, ...` mod `m`.
    pub fn zigzag(m: usize) -> Result<Self, DecompositionError> {
        if m == 0 || m % 2 == 1 {
            return Err(DecompositionError::BadOrder(m));
        }
        let paths = (0..m / 2)
            .map(|i| {
                (0..m)
                    .map(|j| {
                        // Offsets 0, +1, -1, +2, -2, ...
                        let step = j.div_ceil(2);
                        if j % 2 == 1 {
                            (i + step) % m
                        } else {
                            (i + m - step) % m
                        }
                    })
                    .collect()
            })
            .collect();
        Ok(HamiltonianDecomposition { m, paths })
    }

    /// Each path visits every node once, and no edge of `K_m` is used twice.
    /// With `m / 2` paths of `m - 1` edges that is an exact cover of `K_m`.
    pub fn check(&self) -> Result<(), DecompositionError> {
        let m = self.m;
        if m == 0 || m % 2 == 1 {
            return Err(DecompositionError::BadOrder(m));
        }
        if self.paths.len() != m / 2 {
            return Err(DecompositionError::PathCount {
                expected: m / 2,
                found: self.paths.len(),
            });
        }
        let mut used = HashSet::new();
        for (i, p) in self.paths.iter().enumerate() {
            let mut seen = vec![false; m];
            if p.len() != m
                || p.iter()
                    .any(|&v| v >= m || std::mem::replace(&mut seen[v], true))
            {
                return Err(DecompositionError::NotHamiltonian(i));
            }
            for w in p.windows(2) {
                let e = (w[0].min(w[1]), w[0].max(w[1]));
                if !used.insert(e) {
                    return Err(DecompositionError::SharedEdge(e.0, e.1));
                }
            }
        }
        Ok(())
    }
}

/// `K_{n-1}` plus a source joined to the first node of each of the
/// `(n-1)/2` zigzag paths. Path `p` (1-based, in shuffled order) together
/// with its source edge carries labels `p*n + 1, p*n + 2, ...`; with
/// `delta = 1` and seed time `p*n` only that path is live, so round `i`
/// infects all `n` nodes along path `i mod (n-1)/2`.
pub fn gen_hamiltonian_cycler(
    n: usize,
    rng: &mut dyn RngCore,
) -> Result<AdversaryInstance, GenError> {
    if n.is_multiple_of(2) {
        return Err(GenError::EvenOrder(n));
    }
    if n < 5 {
        return Err(GenError::TooSmall {
            family: "hamiltonian",
            n,
            min: 5,
        });
    }
    let m = n - 1;
    let mut dec = HamiltonianDecomposition::zigzag(m).expect("n - 1 is even");
    dec.paths.shuffle(rng);
    let source = m;
    let n_t = n as Time;
    let mut edges = Vec::with_capacity(m * (m - 1) / 2 + m / 2);
    for (i, path) in dec.paths.iter().enumerate() {
        let base = (i as Time + 1) * n_t;
        edges.push((source, path[0], base + 1));
        for (q, w) in path.windows(2).enumerate() {
            edges.push((w[0], w[1], base + q as Time + 2));
        }
    }
    let blocks = (m / 2) as Time;
    let t_max = blocks * n_t + n_t - 1;
    let schedule = (1..=blocks).map(|p| p * n_t).collect();
    Ok(Construction {
        n,
        t_max,
        edges,
        delta: 1,
        source,
        schedule,
        tie: TiePolicy::LowestId,
    }
    .shuffled(rng))
}

/// Decodes a uniform Prüfer sequence into a labeled tree.
fn random_tree_edges(n: usize, rng: &mut dyn RngCore) -> Vec<(NodeId, NodeId)> {
    match n {
        0 | 1 => return Vec::new(),
        2 => return vec![(0, 1)],
        _ => {}
    }
    let seq: Vec<NodeId> = (0..n - 2).map(|_| rng.gen_range(0..n)).collect();
    let mut degree = vec![1usize; n];
    for &v in &seq {
        degree[v] += 1;
    }
    let mut leaves: BinaryHeap<Reverse<NodeId>> =
        (0..n).filter(|&v| degree[v] == 1).map(Reverse).collect();
    let mut edges = Vec::with_capacity(n - 1);
    for &v in &seq {
        let Reverse(leaf) = leaves.pop().expect("a tree always has a leaf");
        edges.push((leaf, v));
        degree[v] -= 1;
        if degree[v] == 1 {
            leaves.push(Reverse(v));
        }
    }
    let Reverse(a) = leaves.pop().expect("two leaves remain");
    let Reverse(b) = leaves.pop().expect("two leaves remain");
    edges.push((a, b));
    edges
}

/// Labels a connected static graph with [`LabelScheme`] from a uniform source.
fn layered_instance(
    n: usize,
    edges: Vec<(NodeId, NodeId)>,
    scheme: &LabelScheme,
    rng: &mut dyn RngCore,
) -> AdversaryInstance {
    let g = StaticGraph::new(n, edges).expect("generator produced an invalid static graph");
    let source = rng.gen_range(0..n);
    let layer = g.bfs_layers(source);
    let max_layer = layer.iter().copied().max().unwrap_or(0) as Time;
    let spacing = scheme.spacing.max(1);
    let block_p = (scheme.block_rate / (n as f64).sqrt()).clamp(0.0, 1.0);
    let labeled = g
        .edges()
        .iter()
        .map(|&(u, v)| {
            let far = layer[u].max(layer[v]) as Time;
            let mut label = spacing * far + rng.gen_range(0..spacing);
            if rng.gen_bool(block_p) {
                label += scheme.delta + 1;
            }
            // Layer-0 edges cannot exist; the smallest label is `spacing`.
            (u, v, label)
        })
        .collect();
    let t_max = spacing * (max_layer + 2) + scheme.delta + 1;
    let schedule = if scheme.dynamic_seeds == 0 {
        vec![0]
    } else {
        (0..scheme.dynamic_seeds.max(2))
            .map(|_| rng.gen_range(0..=spacing))
            .collect()
    };
    let tie = TiePolicy::SeededRandom(rng.next_u64());
    Construction {
        n,
        t_max,
        edges: labeled,
        delta: scheme.delta,
        source,
        schedule,
        tie,
    }
    .shuffled(rng)
}

/// Uniform random labeled tree, labeled by [`LabelScheme`].
pub fn gen_random_tree(
    n: usize,
    scheme: &LabelScheme,
    rng: &mut dyn RngCore,
) -> Result<AdversaryInstance, GenError> {
    if n == 0 {
        return Err(GenError::TooSmall {
            family: "random-tree",
            n,
            min: 1,
        });
    }
    let edges = random_tree_edges(n, rng);
    Ok(layered_instance(n, edges, scheme, rng))
}

/// A uniform random tree plus `m - (n - 1)` uniform extra edges.
pub fn gen_random_graph(
    n: usize,
    m: usize,
    scheme: &LabelScheme,
    rng: &mut dyn RngCore,
) -> Result<AdversaryInstance, GenError> {
    if n == 0 {
        return Err(GenError::TooSmall {
            family: "random-graph",
            n,
            min: 1,
        });
    }
    let max_m = n * (n - 1) / 2;
    if m + 1 < n || m > max_m {
        return Err(GenError::EdgeCount { n, m });
    }
    let mut edges = random_tree_edges(n, rng);
    let mut present: HashSet<(NodeId, NodeId)> =
        edges.iter().map(|&(u, v)| (u.min(v), u.max(v))).collect();
    let extra = m - edges.len();
    if 2 * extra > max_m - edges.len() {
        let mut missing: Vec<(NodeId, NodeId)> = (0..n)
            .flat_map(|u| (u + 1..n).map(move |v| (u, v)))
            .filter(|e| !present.contains(e))
            .collect();
        missing.shuffle(rng);
        edges.extend(missing.into_iter().take(extra));
    } else {
        while edges.len() < m {
            let u = rng.gen_range(0..n);
            let v = rng.gen_range(0..n);
            if u != v && present.insert((u.min(v), u.max(v))) {
                edges.push((u, v));
            }
        }
    }
    Ok(layered_instance(n, edges, scheme, rng))
}

/// Random `k`-tree: a `(k+1)`-clique grown by attaching each new node to a
/// uniformly chosen existing `k`-clique. Each new node keeps one edge into its
/// clique as a spanning backbone; every other edge survives with probability
/// `keep`. The result is connected with treewidth at most `k`.
pub fn gen_partial_ktree(
    n: usize,
    k: usize,
    keep: f64,
    scheme: &LabelScheme,
    rng: &mut dyn RngCore,
) -> Result<AdversaryInstance, GenError> {
    let k = k.max(1);
    if n < k + 1 {
        return Err(GenError::TooSmall {
            family: "partial-ktree",
            n,
            min: k + 1,
        });
    }
    let keep = keep.clamp(0.0, 1.0);
    let mut edges = Vec::new();
    let mut keep_edge = |u: NodeId, v: NodeId, backbone: bool, rng: &mut dyn RngCore| {
        if backbone || rng.gen_bool(keep) {
            edges.push((u, v));
        }
    };
    for v in 1..=k {
        for u in 0..v {
            keep_edge(u, v, u + 1 == v, rng);
        }
    }
    let mut cliques: Vec<Vec<NodeId>> = (0..=k)
        .map(|skip| (0..=k).filter(|&x| x != skip).collect())
        .collect();
    for v in k + 1..n {
        let c = cliques[rng.gen_range(0..cliques.len())].clone();
        let anchor = rng.gen_range(0..k);
        for (i, &u) in c.iter().enumerate() {
            keep_edge(u, v, i == anchor, rng);
        }
        for skip in 0..k {
            let mut next: Vec<NodeId> = c
                .iter()
                .copied()
                .enumerate()
                .filter(|&(i, _)| i != skip)
                .map(|(_, x)| x)
                .collect();
            next.push(v);
            cliques.push(next);
        }
    }
    Ok(layered_instance(n, edges, scheme, rng))
}
