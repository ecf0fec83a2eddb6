//! Simple temporal graphs and their underlying static graphs.
//!
//! Nodes are dense indices `0..n`. Every undirected edge is stored once as
//! `(min, max)` and carries exactly one time label in `1..=t_max`; time step
//! `0` is reserved for seed infections.

use std::collections::{HashMap, HashSet, VecDeque};
use std::fmt;

use thiserror::Error;

pub type NodeId = usize;
pub type Time = u32;

/// A single invariant violation found by [`TemporalGraph::validate`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    SelfLoop {
        node: NodeId,
    },
    DuplicateEdge {
        u: NodeId,
        v: NodeId,
    },
    NodeOutOfRange {
        node: NodeId,
        n: usize,
    },
    LabelOutOfRange {
        u: NodeId,
        v: NodeId,
        label: Time,
        t_max: Time,
    },
    ZeroLifetime,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::SelfLoop { node } => write!(f, "self-loop at node {node}"),
            Violation::DuplicateEdge { u, v } => write!(f, "duplicate edge ({u}, {v})"),
            Violation::NodeOutOfRange { node, n } => {
                write!(f, "node {node} out of range for n = {n}")
            }
            Violation::LabelOutOfRange { u, v, label, t_max } => {
                write!(f, "label {label} of edge ({u}, {v}) outside [1, {t_max}]")
            }
            Violation::ZeroLifetime => write!(f, "lifetime t_max must be positive"),
        }
    }
}

#[derive(Debug, Error)]
#[error("invalid temporal graph: {}", join_violations(.0))]
pub struct InvalidGraph(pub Vec<Violation>);

fn join_violations(v: &[Violation]) -> String {
    v.iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join("; ")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Edge {
    pub u: NodeId,
    pub v: NodeId,
    pub label: Time,
}

impl Edge {
    pub fn other(&self, x: NodeId) -> NodeId {
        if x == self.u {
            self.v
        } else {
            self.u
        }
    }
}

fn ordered(u: NodeId, v: NodeId) -> (NodeId, NodeId) {
    if u <= v {
        (u, v)
    } else {
        (v, u)
    }
}

/// A simple temporal graph with lifetime `t_max`.
///
/// Immutable after construction. Adjacency lists and a label-sorted edge
/// order are built once so the infection engine can sweep edges in time
/// order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TemporalGraph {
    n: usize,
    t_max: Time,
    edges: Vec<Edge>,
    adj: Vec<Vec<(NodeId, Time)>>,
    by_label: Vec<usize>,
}

impl TemporalGraph {
    /// Builds and validates a temporal graph.
    pub fn new(
        n: usize,
        t_max: Time,
        edges: impl IntoIterator<Item = (NodeId, NodeId, Time)>,
    ) -> Result<Self, InvalidGraph> {
        let g = Self::new_unchecked(n, t_max, edges);
        g.validate().map_err(InvalidGraph)?;
        Ok(g)
    }

    /// Builds a graph without checking invariants. Out-of-range endpoints are
    /// kept in the edge list (so [`validate`](Self::validate) can report them)
    /// but left out of the adjacency structure.
    pub fn new_unchecked(
        n: usize,
        t_max: Time,
        edges: impl IntoIterator<Item = (NodeId, NodeId, Time)>,
    ) -> Self {
        let edges: Vec<Edge> = edges
            .into_iter()
            .map(|(u, v, label)| {
                let (u, v) = ordered(u, v);
                Edge { u, v, label }
            })
            .collect();
        let mut adj = vec![Vec::new(); n];
        for e in &edges {
            if e.u < n && e.v < n && e.u != e.v {
                adj[e.u].push((e.v, e.label));
                adj[e.v].push((e.u, e.label));
            }
        }
        for list in &mut adj {
            list.sort_unstable();
        }
        let mut by_label: Vec<usize> = (0..edges.len()).collect();
        by_label.sort_by_key(|&i| (edges[i].label, edges[i].u, edges[i].v));
        TemporalGraph {
            n,
            t_max,
            edges,
            adj,
            by_label,
        }
    }

    /// Returns every invariant violation; `Ok` iff there are none.
    pub fn validate(&self) -> Result<(), Vec<Violation>> {
        let mut out = Vec::new();
        if self.t_max == 0 {
            out.push(Violation::ZeroLifetime);
        }
        let mut seen = HashSet::with_capacity(self.edges.len());
        for e in &self.edges {
            for x in [e.u, e.v] {
                if x >= self.n {
                    out.push(Violation::NodeOutOfRange { node: x, n: self.n });
                }
            }
            if e.u == e.v {
                out.push(Violation::SelfLoop { node: e.u });
            }
            if !seen.insert((e.u, e.v)) {
                out.push(Violation::DuplicateEdge { u: e.u, v: e.v });
            }
            if e.label == 0 || e.label > self.t_max {
                out.push(Violation::LabelOutOfRange {
                    u: e.u,
                    v: e.v,
                    label: e.label,
                    t_max: self.t_max,
                });
            }
        }
        if out.is_empty() {
            Ok(())
        } else {
            Err(out)
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn t_max(&self) -> Time {
        self.t_max
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn m(&self) -> usize {
        self.edges.len()
    }

    /// Neighbors of `v` with the label of the connecting edge, sorted by id.
    pub fn neighbors(&self, v: NodeId) -> &[(NodeId, Time)] {
        &self.adj[v]
    }

    /// Edges sorted by `(label, u, v)`.
    pub fn edges_by_label(&self) -> impl Iterator<Item = &Edge> + '_ {
        self.by_label.iter().map(move |&i| &self.edges[i])
    }

    pub fn label(&self, u: NodeId, v: NodeId) -> Option<Time> {
        if u >= self.n || v >= self.n {
            return None;
        }
        let (a, b) = if self.adj[u].len() <= self.adj[v].len() {
            (u, v)
        } else {
            (v, u)
        };
        self.adj[a]
            .binary_search_by_key(&b, |&(x, _)| x)
            .ok()
            .map(|i| self.adj[a][i].1)
    }

    /// True iff `seq` walks along edges with strictly increasing labels.
    /// A single node is a temporal path; an empty sequence is not.
    pub fn is_temporal_path(&self, seq: &[NodeId]) -> bool {
        if seq.is_empty() || seq.iter().any(|&v| v >= self.n) {
            return false;
        }
        let mut visited = HashSet::with_capacity(seq.len());
        if !seq.iter().all(|&v| visited.insert(v)) {
            return false;
        }
        let mut prev: Option<Time> = None;
        for w in seq.windows(2) {
            match self.label(w[0], w[1]) {
                Some(l) if prev.is_none_or(|p| p < l) => prev = Some(l),
                _ => return false,
            }
        }
        true
    }

    /// Forgets the labels.
    pub fn underlying_static(&self) -> StaticGraph {
        StaticGraph::new_unchecked(self.n, self.edges.iter().map(|e| (e.u, e.v)))
    }

    /// Completes the graph to `K_n`: original edges keep their labels, every
    /// added pair gets the new lifetime `t_max + delta + 1`.
    pub fn complete_lift(&self, delta: Time) -> TemporalGraph {
        let lifted = self.t_max + delta + 1;
        let mut known: HashMap<(NodeId, NodeId), Time> =
            self.edges.iter().map(|e| ((e.u, e.v), e.label)).collect();
        let mut edges = Vec::with_capacity(self.n * self.n.saturating_sub(1) / 2);
        for u in 0..self.n {
            for v in u + 1..self.n {
                let label = known.remove(&(u, v)).unwrap_or(lifted);
                edges.push((u, v, label));
            }
        }
        TemporalGraph::new_unchecked(self.n, lifted, edges)
    }
}

/// An undirected simple graph on nodes `0..n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StaticGraph {
    n: usize,
    edges: Vec<(NodeId, NodeId)>,
    adj: Vec<Vec<NodeId>>,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum StaticGraphError {
    #[error("self-loop at node {0}")]
    SelfLoop(NodeId),
    #[error("duplicate edge ({0}, {1})")]
    DuplicateEdge(NodeId, NodeId),
    #[error("node {0} out of range")]
    NodeOutOfRange(NodeId),
}

impl StaticGraph {
    pub fn new(
        n: usize,
        edges: impl IntoIterator<Item = (NodeId, NodeId)>,
    ) -> Result<Self, StaticGraphError> {
        let mut seen = HashSet::new();
        let mut list = Vec::new();
        for (u, v) in edges {
            let (u, v) = ordered(u, v);
            if v >= n {
                return Err(StaticGraphError::NodeOutOfRange(v));
            }
            if u == v {
                return Err(StaticGraphError::SelfLoop(u));
            }
            if !seen.insert((u, v)) {
                return Err(StaticGraphError::DuplicateEdge(u, v));
            }
            list.push((u, v));
        }
        Ok(Self::new_unchecked(n, list))
    }

    fn new_unchecked(n: usize, edges: impl IntoIterator<Item = (NodeId, NodeId)>) -> Self {
        let edges: Vec<_> = edges.into_iter().map(|(u, v)| ordered(u, v)).collect();
        let mut adj = vec![Vec::new(); n];
        for &(u, v) in &edges {
            if u < n && v < n && u != v {
                adj[u].push(v);
                adj[v].push(u);
            }
        }
        for list in &mut adj {
            list.sort_unstable();
        }
        StaticGraph { n, edges, adj }
    }

    pub fn complete(n: usize) -> Self {
        Self::new_unchecked(n, (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(NodeId, NodeId)] {
        &self.edges
    }

    pub fn neighbors(&self, v: NodeId) -> &[NodeId] {
        &self.adj[v]
    }

    pub fn has_edge(&self, u: NodeId, v: NodeId) -> bool {
        u < self.n && self.adj[u].binary_search(&v).is_ok()
    }

    pub fn is_connected(&self) -> bool {
        self.n == 0 || self.components(&vec![false; self.n]).1 == 1
    }

    pub fn is_tree(&self) -> bool {
        self.n >= 1 && self.edges.len() == self.n - 1 && self.is_connected()
    }

    /// Connected components of the graph with `removed` nodes deleted.
    /// Returns a component index per node (`usize::MAX` for removed nodes)
    /// and the component count. Components are numbered by lowest member.
    pub fn components(&self, removed: &[bool]) -> (Vec<usize>, usize) {
        let mut comp = vec![usize::MAX; self.n];
        let mut count = 0;
        let mut queue = VecDeque::new();
        for start in 0..self.n {
            if removed[start] || comp[start] != usize::MAX {
                continue;
            }
            comp[start] = count;
            queue.push_back(start);
            while let Some(u) = queue.pop_front() {
                for &v in &self.adj[u] {
                    if !removed[v] && comp[v] == usize::MAX {
                        comp[v] = count;
                        queue.push_back(v);
                    }
                }
            }
            count += 1;
        }
        (comp, count)
    }

    /// Subgraph induced by `nodes`. Returns the subgraph on `0..nodes.len()`
    /// and the map from new index to original node.
    pub fn induced(&self, nodes: &[NodeId]) -> (StaticGraph, Vec<NodeId>) {
        let mut index = vec![usize::MAX; self.n];
        for (i, &v) in nodes.iter().enumerate() {
            index[v] = i;
        }
        let mut edges = Vec::new();
        for (i, &v) in nodes.iter().enumerate() {
            for &w in &self.adj[v] {
                let j = index[w];
                if j != usize::MAX && i < j {
                    edges.push((i, j));
                }
            }
        }
        (Self::new_unchecked(nodes.len(), edges), nodes.to_vec())
    }

    /// BFS distances from `src`; unreachable nodes get `usize::MAX`.
    pub fn bfs_layers(&self, src: NodeId) -> Vec<usize> {
        let mut dist = vec![usize::MAX; self.n];
        let mut queue = VecDeque::from([src]);
        dist[src] = 0;
        while let Some(u) = queue.pop_front() {
            for &v in &self.adj[u] {
                if dist[v] == usize::MAX {
                    dist[v] = dist[u] + 1;
                    queue.push_back(v);
                }
            }
        }
        dist
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path3() -> TemporalGraph {
        TemporalGraph::new(3, 2, [(0, 1, 1), (1, 2, 2)]).unwrap()
    }

    #[test]
    fn validate_accepts_well_formed_path() {
        assert!(path3().validate().is_ok());
    }

    #[test]
    fn validate_reports_self_loop() {
        let g = TemporalGraph::new_unchecked(2, 3, [(0, 0, 1)]);
        assert_eq!(g.validate(), Err(vec![Violation::SelfLoop { node: 0 }]));
    }

    #[test]
    fn validate_reports_label_range() {
        let g = TemporalGraph::new_unchecked(2, 3, [(0, 1, 5)]);
        assert_eq!(
            g.validate(),
            Err(vec![Violation::LabelOutOfRange {
                u: 0,
                v: 1,
                label: 5,
                t_max: 3
            }])
        );
    }

    #[test]
    fn validate_collects_all_violations() {
        let g = TemporalGraph::new_unchecked(3, 2, [(0, 1, 1), (1, 0, 2), (2, 2, 0), (1, 7, 1)]);
        let errs = g.validate().unwrap_err();
        assert!(errs.contains(&Violation::DuplicateEdge { u: 0, v: 1 }));
        assert!(errs.contains(&Violation::SelfLoop { node: 2 }));
        assert!(errs.contains(&Violation::NodeOutOfRange { node: 7, n: 3 }));
        assert!(errs
            .iter()
            .any(|e| matches!(e, Violation::LabelOutOfRange { label: 0, .. })));
    }

    #[test]
    fn temporal_path_predicate() {
        let g = path3();
        assert!(g.is_temporal_path(&[0, 1, 2]));
        assert!(!g.is_temporal_path(&[2, 1, 0]));
        assert!(g.is_temporal_path(&[1]));
        assert!(!g.is_temporal_path(&[0, 2]));
        assert!(!g.is_temporal_path(&[]));
    }

    #[test]
    fn underlying_static_keeps_edges() {
        let g = path3();
        let s = g.underlying_static();
        assert_eq!(s.edges(), &[(0, 1), (1, 2)]);
        let empty = TemporalGraph::new(4, 1, []).unwrap().underlying_static();
        assert_eq!(empty.m(), 0);
        let k3 = TemporalGraph::new(3, 9, [(0, 1, 4), (1, 2, 9), (0, 2, 1)]).unwrap();
        let mut edges = k3.underlying_static().edges().to_vec();
        edges.sort_unstable();
        assert_eq!(edges, StaticGraph::complete(3).edges());
    }

    #[test]
    fn complete_lift_of_path() {
        let lifted = path3().complete_lift(1);
        assert_eq!(lifted.t_max(), 4);
        assert_eq!(lifted.m(), 3);
        assert_eq!(lifted.label(0, 1), Some(1));
        assert_eq!(lifted.label(1, 2), Some(2));
        assert_eq!(lifted.label(0, 2), Some(4));
        assert!(lifted.validate().is_ok());
    }

    #[test]
    fn complete_lift_of_clique_adds_nothing() {
        let k3 = TemporalGraph::new(3, 5, [(0, 1, 3), (1, 2, 5), (0, 2, 1)]).unwrap();
        let lifted = k3.complete_lift(2);
        assert_eq!(lifted.t_max(), 8);
        for e in k3.edges() {
            assert_eq!(lifted.label(e.u, e.v), Some(e.label));
        }
        assert_eq!(lifted.m(), 3);
        let single = TemporalGraph::new(1, 1, []).unwrap().complete_lift(1);
        assert_eq!((single.n(), single.m()), (1, 0));
    }

    #[test]
    fn lifting_twice_adds_no_new_pairs() {
        let g = path3();
        let once = g.complete_lift(2);
        let twice = once.complete_lift(2);
        let pairs =
            |g: &TemporalGraph| g.edges().iter().map(|e| (e.u, e.v)).collect::<HashSet<_>>();
        assert_eq!(pairs(&once), pairs(&twice));
    }

    #[test]
    fn static_components_and_trees() {
        let g = StaticGraph::new(5, [(0, 1), (1, 2), (3, 4)]).unwrap();
        assert!(!g.is_connected());
        let (comp, count) = g.components(&[false; 5]);
        assert_eq!(count, 2);
        assert_eq!(comp, vec![0, 0, 0, 1, 1]);
        let (comp, count) = g.components(&[false, true, false, false, false]);
        assert_eq!(count, 3);
        assert_eq!(comp[1], usize::MAX);
        let t = StaticGraph::new(3, [(0, 1), (1, 2)]).unwrap();
        assert!(t.is_tree());
        assert_eq!(
            StaticGraph::new(2, [(1, 1)]),
            Err(StaticGraphError::SelfLoop(1))
        );
    }
}
