//! Weighted centroids, min-fill tree decompositions and balanced separators.
//!
//! Weights are 0/1 so that a separator can balance an arbitrary subset of
//! nodes (the candidate set of a search) while the rest of the graph still
//! carries the connectivity.

use std::collections::{BTreeSet, HashSet};

use thiserror::Error;

use crate::graph::{NodeId, StaticGraph};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SeparatorError {
    #[error("graph is not a tree")]
    NotATree,
    #[error("total node weight is zero")]
    ZeroWeight,
    #[error("weights cover {got} nodes but the graph has {n}")]
    WeightLength { got: usize, n: usize },
}

/// 0/1 node weights.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NodeWeights(Vec<bool>);

impl NodeWeights {
    pub fn uniform(n: usize) -> Self {
        NodeWeights(vec![true; n])
    }

    pub fn from_set(n: usize, nodes: impl IntoIterator<Item = NodeId>) -> Self {
        let mut w = vec![false; n];
        for v in nodes {
            w[v] = true;
        }
        NodeWeights(w)
    }

    pub fn get(&self, v: NodeId) -> u64 {
        u64::from(self.0[v])
    }

    pub fn total(&self) -> u64 {
        self.0.iter().filter(|&&b| b).count() as u64
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Lowest-id node whose removal leaves every component of the tree with at
/// most half of the total weight.
pub fn find_centroid(t: &StaticGraph, w: &NodeWeights) -> Result<NodeId, SeparatorError> {
    if w.len() != t.n() {
        return Err(SeparatorError::WeightLength {
            got: w.len(),
            n: t.n(),
        });
    }
    if !t.is_tree() {
        return Err(SeparatorError::NotATree);
    }
    let total = w.total();
    if total == 0 {
        return Err(SeparatorError::ZeroWeight);
    }
    let n = t.n();
    let mut parent = vec![usize::MAX; n];
    let mut order = Vec::with_capacity(n);
    let mut stack = vec![0];
    parent[0] = 0;
    while let Some(u) = stack.pop() {
        order.push(u);
        for &v in t.neighbors(u) {
            if parent[v] == usize::MAX {
                parent[v] = u;
                stack.push(v);
            }
        }
    }
    let mut sub: Vec<u64> = (0..n).map(|v| w.get(v)).collect();
    let mut heaviest_child = vec![0u64; n];
    for &u in order.iter().rev() {
        if u != 0 {
            let p = parent[u];
            sub[p] += sub[u];
            heaviest_child[p] = heaviest_child[p].max(sub[u]);
        }
    }
    (0..n)
        .find(|&v| 2 * heaviest_child[v].max(total - sub[v]) <= total)
        .ok_or(SeparatorError::NotATree)
}

/// A tree decomposition: bags of graph nodes connected by a tree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TreeDecomposition {
    pub bags: Vec<Vec<NodeId>>,
    pub tree: Vec<Vec<usize>>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DecompositionViolation {
    NoBags,
    NotATree,
    NodeOutOfRange { bag: usize, node: NodeId },
    UncoveredNode(NodeId),
    UncoveredEdge(NodeId, NodeId),
    DisconnectedOccurrences(NodeId),
}

impl TreeDecomposition {
    /// Largest bag size minus one.
    pub fn width(&self) -> usize {
        self.bags
            .iter()
            .map(Vec::len)
            .max()
            .unwrap_or(0)
            .saturating_sub(1)
    }

    /// Checks the three decomposition axioms against `g`, plus that the bag
    /// structure is itself a tree.
    pub fn check(&self, g: &StaticGraph) -> Result<(), Vec<DecompositionViolation>> {
        use DecompositionViolation as V;
        let mut out = Vec::new();
        let b = self.bags.len();
        if b == 0 {
            return Err(vec![V::NoBags]);
        }
        let tree_edges: usize = self.tree.iter().map(Vec::len).sum();
        let tree_ok = self.tree.len() == b
            && tree_edges == 2 * (b - 1)
            && self.tree.iter().flatten().all(|&j| j < b)
            && {
                let tg = StaticGraph::new(
                    b,
                    self.tree.iter().enumerate().flat_map(|(i, ns)| {
                        ns.iter().filter(move |&&j| i < j).map(move |&j| (i, j))
                    }),
                );
                tg.is_ok_and(|tg| tg.is_connected())
            };
        if !tree_ok {
            out.push(V::NotATree);
        }

        let n = g.n();
        let mut occurs: Vec<Vec<usize>> = vec![Vec::new(); n];
        for (i, bag) in self.bags.iter().enumerate() {
            for &v in bag {
                if v >= n {
                    out.push(V::NodeOutOfRange { bag: i, node: v });
                } else {
                    occurs[v].push(i);
                }
            }
        }
        for (v, occ) in occurs.iter().enumerate() {
            if occ.is_empty() {
                out.push(V::UncoveredNode(v));
            }
        }
        let bag_sets: Vec<HashSet<NodeId>> = self
            .bags
            .iter()
            .map(|bag| bag.iter().copied().collect())
            .collect();
        for &(u, v) in g.edges() {
            if !occurs[u].iter().any(|&i| bag_sets[i].contains(&v)) {
                out.push(V::UncoveredEdge(u, v));
            }
        }
        if tree_ok {
            // On a tree, the bags holding v induce a connected subtree iff
            // the number of tree edges between them is one less than their count.
            let mut shared = vec![0usize; n];
            for (i, ns) in self.tree.iter().enumerate() {
                for &j in ns.iter().filter(|&&j| i < j) {
                    for v in bag_sets[i].intersection(&bag_sets[j]) {
                        if *v < n {
                            shared[*v] += 1;
                        }
                    }
                }
            }
            for v in 0..n {
                if !occurs[v].is_empty() && shared[v] + 1 != occurs[v].len() {
                    out.push(V::DisconnectedOccurrences(v));
                }
            }
        }
        if out.is_empty() {
            Ok(())
        } else {
            Err(out)
        }
    }
}

fn fill_in(adj: &[HashSet<NodeId>], v: NodeId) -> usize {
    let d = adj[v].len();
    // Each edge inside the neighborhood is counted from both ends; scanning
    // the smaller of the two sets keeps hubs cheap.
    let twice_present: usize = adj[v]
        .iter()
        .map(|&a| {
            let (small, large) = if adj[a].len() < d {
                (&adj[a], &adj[v])
            } else {
                (&adj[v], &adj[a])
            };
            small.iter().filter(|x| large.contains(x)).count()
        })
        .sum();
    d * d.saturating_sub(1) / 2 - twice_present / 2
}

/// Tree decomposition from a greedy min-fill elimination ordering (ties by
/// degree, then id). Disconnected inputs are handled by chaining the roots.
pub fn heuristic_tree_decomposition(g: &StaticGraph) -> TreeDecomposition {
    let n = g.n();
    if n == 0 {
        return TreeDecomposition {
            bags: vec![Vec::new()],
            tree: vec![Vec::new()],
        };
    }
    let mut adj: Vec<HashSet<NodeId>> = (0..n)
        .map(|v| g.neighbors(v).iter().copied().collect())
        .collect();
    let mut key: Vec<(usize, usize)> = (0..n).map(|v| (fill_in(&adj, v), adj[v].len())).collect();
    let mut queue: BTreeSet<(usize, usize, NodeId)> =
        (0..n).map(|v| (key[v].0, key[v].1, v)).collect();
    let mut pos = vec![usize::MAX; n];
    let mut later: Vec<Vec<NodeId>> = vec![Vec::new(); n];

    for step in 0..n {
        let (_, _, v) = queue
            .pop_first()
            .expect("queue holds every uneliminated node");
        pos[v] = step;
        let ns: Vec<NodeId> = adj[v].iter().copied().collect();
        let mut touched: HashSet<NodeId> = ns.iter().copied().collect();
        for &a in &ns {
            adj[a].remove(&v);
        }
        for (i, &a) in ns.iter().enumerate() {
            for &b in &ns[i + 1..] {
                if adj[a].insert(b) {
                    adj[b].insert(a);
                    // common neighbors of a and b lose one missing pair
                    touched.extend(adj[a].intersection(&adj[b]).copied());
                }
            }
        }
        adj[v].clear();
        later[v] = ns;
        for u in touched {
            let new_key = (fill_in(&adj, u), adj[u].len());
            if new_key != key[u] {
                queue.remove(&(key[u].0, key[u].1, u));
                key[u] = new_key;
                queue.insert((new_key.0, new_key.1, u));
            }
        }
    }

    let mut bags: Vec<Vec<NodeId>> = Vec::with_capacity(n);
    let mut tree: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut roots = Vec::new();
    for v in 0..n {
        let mut bag = later[v].clone();
        bag.push(v);
        bag.sort_unstable();
        bags.push(bag);
        match later[v].iter().min_by_key(|&&u| pos[u]) {
            Some(&p) => {
                tree[v].push(p);
                tree[p].push(v);
            }
            None => roots.push(v),
        }
    }
    for w in roots.windows(2) {
        tree[w[0]].push(w[1]);
        tree[w[1]].push(w[0]);
    }
    for ns in &mut tree {
        ns.sort_unstable();
    }
    TreeDecomposition { bags, tree }
}

/// Largest component weight of `g - removed`.
pub fn max_component_weight(g: &StaticGraph, w: &NodeWeights, removed: &[bool]) -> u64 {
    let (comp, count) = g.components(removed);
    let mut weight = vec![0u64; count];
    for v in 0..g.n() {
        if comp[v] != usize::MAX {
            weight[comp[v]] += w.get(v);
        }
    }
    weight.into_iter().max().unwrap_or(0)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SeparatorViolation {
    TooLarge { size: usize, limit: usize },
    HeavyComponent { weight: u64, total: u64 },
    NodeOutOfRange(NodeId),
}

/// Every component of `g - s` weighs at most `floor(W / 2)` and `|s| <= limit`.
pub fn check_separator(
    g: &StaticGraph,
    w: &NodeWeights,
    s: &[NodeId],
    limit: usize,
) -> Result<(), Vec<SeparatorViolation>> {
    let mut out = Vec::new();
    if s.len() > limit {
        out.push(SeparatorViolation::TooLarge {
            size: s.len(),
            limit,
        });
    }
    let mut removed = vec![false; g.n()];
    for &v in s {
        if v >= g.n() {
            out.push(SeparatorViolation::NodeOutOfRange(v));
        } else {
            removed[v] = true;
        }
    }
    let total = w.total();
    let heaviest = max_component_weight(g, w, &removed);
    if heaviest > total / 2 {
        out.push(SeparatorViolation::HeavyComponent {
            weight: heaviest,
            total,
        });
    }
    if out.is_empty() {
        Ok(())
    } else {
        Err(out)
    }
}

/// A bag `B` together with the components of `g - B`, so that subsets of
/// `B` can be tested as separators without re-traversing the graph.
struct BagSplit {
    bag: Vec<NodeId>,
    bag_weight: Vec<u64>,
    comp_weight: Vec<u64>,
    comp_links: Vec<Vec<usize>>,
    bag_links: Vec<Vec<usize>>,
}

impl BagSplit {
    fn new(g: &StaticGraph, w: &NodeWeights, bag: Vec<NodeId>) -> Self {
        let mut removed = vec![false; g.n()];
        let mut index = vec![usize::MAX; g.n()];
        for (i, &b) in bag.iter().enumerate() {
            removed[b] = true;
            index[b] = i;
        }
        let (comp, count) = g.components(&removed);
        let mut comp_weight = vec![0u64; count];
        for v in 0..g.n() {
            if comp[v] != usize::MAX {
                comp_weight[comp[v]] += w.get(v);
            }
        }
        let mut comp_links = Vec::with_capacity(bag.len());
        let mut bag_links = Vec::with_capacity(bag.len());
        for &b in &bag {
            let mut cs: Vec<usize> = Vec::new();
            let mut bs: Vec<usize> = Vec::new();
            for &u in g.neighbors(b) {
                if index[u] != usize::MAX {
                    bs.push(index[u]);
                } else {
                    cs.push(comp[u]);
                }
            }
            cs.sort_unstable();
            cs.dedup();
            comp_links.push(cs);
            bag_links.push(bs);
        }
        let bag_weight = bag.iter().map(|&b| w.get(b)).collect();
        BagSplit {
            bag,
            bag_weight,
            comp_weight,
            comp_links,
            bag_links,
        }
    }

    /// Heaviest component when only the bag members flagged in `keep` stay removed.
    fn heaviest(&self, keep: &[bool]) -> u64 {
        let c = self.comp_weight.len();
        let mut dsu = Dsu::new(c + self.bag.len());
        let mut weight: Vec<u64> = self.comp_weight.clone();
        weight.extend(self.bag.iter().enumerate().map(|(i, _)| {
            if keep[i] {
                0
            } else {
                self.bag_weight[i]
            }
        }));
        for i in 0..self.bag.len() {
            if keep[i] {
                continue;
            }
            for &ci in &self.comp_links[i] {
                dsu.union(c + i, ci, &mut weight);
            }
            for &j in &self.bag_links[i] {
                if !keep[j] {
                    dsu.union(c + i, c + j, &mut weight);
                }
            }
        }
        (0..weight.len())
            .filter(|&x| dsu.find(x) == x)
            .map(|x| weight[x])
            .max()
            .unwrap_or(0)
    }
}

struct Dsu(Vec<usize>);

impl Dsu {
    fn new(n: usize) -> Self {
        Dsu((0..n).collect())
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.0[x] != x {
            self.0[x] = self.0[self.0[x]];
            x = self.0[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize, weight: &mut [u64]) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.0[rb] = ra;
            weight[ra] += weight[rb];
        }
    }
}

const EXHAUSTIVE_BAG_LIMIT: usize = 12;

/// A balanced separator of size at most `td.width() + 1`.
///
/// Roots the decomposition at bag 0, charges each weighted node to the
/// topmost bag containing it and descends into the unique heavy child until
/// none is heavy; that bag separates. The bag is then shrunk to a smallest
/// valid subset (exhaustively for small bags, greedily otherwise).
pub fn balanced_separator(g: &StaticGraph, w: &NodeWeights, td: &TreeDecomposition) -> Vec<NodeId> {
    let total = w.total();
    if total == 0 || td.bags.is_empty() {
        return Vec::new();
    }
    let b = td.bags.len();
    let mut parent = vec![usize::MAX; b];
    let mut order = Vec::with_capacity(b);
    parent[0] = 0;
    let mut stack = vec![0];
    while let Some(i) = stack.pop() {
        order.push(i);
        for &j in &td.tree[i] {
            if parent[j] == usize::MAX {
                parent[j] = i;
                stack.push(j);
            }
        }
    }
    // Preorder: the first bag that mentions a node is its topmost bag.
    let mut charged = vec![false; g.n()];
    let mut sub = vec![0u64; b];
    for &i in &order {
        for &v in &td.bags[i] {
            if !charged[v] {
                charged[v] = true;
                sub[i] += w.get(v);
            }
        }
    }
    for &i in order.iter().rev() {
        if i != 0 {
            sub[parent[i]] += sub[i];
        }
    }
    let mut cur = 0;
    loop {
        let heavy = td.tree[cur]
            .iter()
            .copied()
            .filter(|&j| parent[j] == cur)
            .find(|&j| 2 * sub[j] > total);
        match heavy {
            Some(j) => cur = j,
            None => break,
        }
    }

    let split = BagSplit::new(g, w, td.bags[cur].clone());
    let k = split.bag.len();
    let half = total / 2;
    if k <= EXHAUSTIVE_BAG_LIMIT {
        let mut masks: Vec<u32> = (0..(1u32 << k)).collect();
        masks.sort_by_key(|m| (m.count_ones(), m.reverse_bits()));
        for m in masks {
            let keep: Vec<bool> = (0..k).map(|i| m >> i & 1 == 1).collect();
            if split.heaviest(&keep) <= half {
                return (0..k).filter(|&i| keep[i]).map(|i| split.bag[i]).collect();
            }
        }
        unreachable!("the full bag is a valid separator");
    }
    let mut keep = vec![true; k];
    let mut tries: Vec<usize> = (0..k).collect();
    tries.sort_by_key(|&i| (split.bag_weight[i], split.bag[i]));
    for i in tries {
        keep[i] = false;
        if split.heaviest(&keep) > half {
            keep[i] = true;
        }
    }
    (0..k).filter(|&i| keep[i]).map(|i| split.bag[i]).collect()
}
