//! Self-check suites over randomly generated inputs.
//!
//! Each suite counts the cases it examined and collects a description of
//! every violation; an empty violation list means the suite passed.

use std::fmt;

use rand::seq::SliceRandom;
use rand::{Rng, RngCore};

use crate::adversaries::{
    gen_hamiltonian_cycler, gen_random_graph, gen_random_tree, HamiltonianDecomposition,
    LabelScheme,
};
use crate::graph::{NodeId, StaticGraph, TemporalGraph, Time};
use crate::infection::{foremost_times_oracle, run_round, Infector, SeedInfection, TiePolicy};
use crate::rng::stream;
use crate::separators::{
    balanced_separator, check_separator, find_centroid, heuristic_tree_decomposition, NodeWeights,
};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SuiteReport {
    pub name: &'static str,
    pub cases: usize,
    pub violations: Vec<String>,
}

impl SuiteReport {
    fn new(name: &'static str) -> Self {
        SuiteReport {
            name,
            cases: 0,
            violations: Vec::new(),
        }
    }

    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for SuiteReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let verdict = if self.passed() { "PASS" } else { "FAIL" };
        write!(
            f,
            "{verdict} {}: {} cases, {} violations",
            self.name,
            self.cases,
            self.violations.len()
        )
    }
}

/// A random engine input: labels uniform in `1..=t_max`, any seed time.
#[derive(Debug, Clone)]
pub struct EngineCase {
    pub graph: TemporalGraph,
    pub seed: SeedInfection,
    pub delta: Time,
}

pub fn random_engine_case(n_max: usize, rng: &mut dyn RngCore) -> EngineCase {
    let n = rng.gen_range(1..=n_max.max(1));
    let max_m = n * (n - 1) / 2;
    let m = rng.gen_range(0..=max_m.min(3 * n));
    let t_max: Time = rng.gen_range(1..=(2 * n as Time).max(2));
    let delta: Time = rng.gen_range(1..=5);
    let mut pairs: Vec<(NodeId, NodeId)> = (0..n)
        .flat_map(|u| (u + 1..n).map(move |v| (u, v)))
        .collect();
    pairs.shuffle(rng);
    let edges: Vec<(NodeId, NodeId, Time)> = pairs
        .into_iter()
        .take(m)
        .map(|(u, v)| (u, v, rng.gen_range(1..=t_max)))
        .collect();
    let graph = TemporalGraph::new(n, t_max, edges).expect("distinct pairs with labels in range");
    let seed = SeedInfection {
        node: rng.gen_range(0..n),
        time: rng.gen_range(0..=t_max),
    };
    EngineCase { graph, seed, delta }
}

/// Checks one engine input against the oracle and the structural properties
/// of the infection tree under every tie policy.
pub fn check_engine_case(case: &EngineCase, tie_seed: u64) -> Vec<String> {
    let EngineCase {
        graph: g,
        seed,
        delta,
    } = case;
    let mut out = Vec::new();
    let oracle = match foremost_times_oracle(g, *seed, *delta) {
        Ok(t) => t,
        Err(e) => return vec![format!("oracle rejected a valid case: {e}")],
    };
    let policies = [
        TiePolicy::LowestId,
        TiePolicy::HighestId,
        TiePolicy::SeededRandom(tie_seed),
    ];
    for tie in policies {
        let o = match run_round(g, *seed, *delta, tie) {
            Ok(o) => o,
            Err(e) => {
                out.push(format!("{tie:?}: engine rejected a valid case: {e}"));
                continue;
            }
        };
        if o.times() != oracle.as_slice() {
            out.push(format!("{tie:?}: times differ from the oracle"));
        }
        for (v, t) in o.infected() {
            match o.infector(v) {
                Some(Infector::Seed) if v == seed.node && t == seed.time => {}
                Some(Infector::Node(u)) => {
                    let tu = o.time(u);
                    let label = g.label(u, v);
                    if !(tu.is_some_and(|tu| tu < t && t - tu <= *delta) && label == Some(t)) {
                        out.push(format!(
                            "{tie:?}: node {v} at {t} via {u} at {tu:?} over label {label:?} breaks the heap or window"
                        ));
                    }
                }
                other => out.push(format!("{tie:?}: node {v} has infector {other:?}")),
            }
            match o.chain_to(v) {
                Some(chain) if chain[0] == seed.node && g.is_temporal_path(&chain) => {}
                chain => out.push(format!(
                    "{tie:?}: root path to {v} is not temporal: {chain:?}"
                )),
            }
        }
    }
    out
}

/// Engine times equal the independent foremost-time oracle.
pub fn oracle_suite(cases: usize, n_max: usize, seed: u64) -> SuiteReport {
    let mut report = SuiteReport::new("oracles");
    for i in 0..cases {
        let mut rng = stream(seed, &[1, i as u64]);
        let case = random_engine_case(n_max, &mut rng);
        report.cases += 1;
        let engine = run_round(&case.graph, case.seed, case.delta, TiePolicy::LowestId);
        let oracle = foremost_times_oracle(&case.graph, case.seed, case.delta);
        match (engine, oracle) {
            (Ok(o), Ok(t)) if o.times() == t.as_slice() => {}
            _ => report
                .violations
                .push(format!("case {i}: engine and oracle disagree")),
        }
    }
    report
}

/// Infection trees are heaps with gaps at most `delta`, times do not depend
/// on tie-breaking, root paths are temporal, and lifting to the complete graph
/// changes nothing.
pub fn invariant_suite(cases: usize, n_max: usize, seed: u64) -> SuiteReport {
    let mut report = SuiteReport::new("invariants");
    for i in 0..cases {
        let mut rng = stream(seed, &[2, i as u64]);
        let case = random_engine_case(n_max, &mut rng);
        report.cases += 1;
        for v in check_engine_case(&case, rng.next_u64()) {
            report.violations.push(format!("case {i}: {v}"));
        }
        let lifted = case.graph.complete_lift(case.delta);
        let a = run_round(&case.graph, case.seed, case.delta, TiePolicy::LowestId);
        let b = run_round(&lifted, case.seed, case.delta, TiePolicy::LowestId);
        if a.ok() != b.ok() {
            report
                .violations
                .push(format!("case {i}: lifting changed the outcome"));
        }
    }
    report
}

fn check_separators_on(g: &StaticGraph, rng: &mut dyn RngCore) -> Vec<String> {
    let mut out = Vec::new();
    let td = heuristic_tree_decomposition(g);
    if let Err(v) = td.check(g) {
        out.push(format!("decomposition axioms: {v:?}"));
        return out;
    }
    let n = g.n();
    let subset: Vec<NodeId> = (0..n).filter(|_| rng.gen_bool(0.3)).collect();
    let mut weights = vec![NodeWeights::uniform(n)];
    if !subset.is_empty() {
        weights.push(NodeWeights::from_set(n, subset));
    }
    for w in &weights {
        let s = balanced_separator(g, w, &td);
        if let Err(v) = check_separator(g, w, &s, td.width() + 1) {
            out.push(format!("separator {s:?} (width {}): {v:?}", td.width()));
        }
        if g.is_tree() {
            match find_centroid(g, w) {
                Ok(c) => {
                    if let Err(v) = check_separator(g, w, &[c], 1) {
                        out.push(format!("centroid {c}: {v:?}"));
                    }
                }
                Err(e) => out.push(format!("centroid: {e}")),
            }
        }
    }
    out
}

/// Min-fill decompositions satisfy the axioms and the balanced separators
/// derived from them are valid, on random trees and random graphs.
pub fn separator_suite(trees: usize, graphs: usize, n_max: usize, seed: u64) -> SuiteReport {
    let mut report = SuiteReport::new("separators");
    let scheme = LabelScheme::default();
    for i in 0..trees + graphs {
        let mut rng = stream(seed, &[3, i as u64]);
        let n = rng.gen_range(1..=n_max.max(1));
        let inst = if i < trees {
            gen_random_tree(n, &scheme, &mut rng)
        } else {
            let max_m = n * (n - 1) / 2;
            let m = rng.gen_range(n - 1..=max_m.min(3 * n).max(n - 1));
            gen_random_graph(n, m, &scheme, &mut rng)
        };
        let g = match inst {
            Ok(inst) => inst.graph.underlying_static(),
            Err(e) => {
                report
                    .violations
                    .push(format!("case {i}: generator failed: {e}"));
                continue;
            }
        };
        report.cases += 1;
        for v in check_separators_on(&g, &mut rng) {
            report.violations.push(format!("case {i} (n = {n}): {v}"));
        }
    }
    report
}

/// Zigzag decompositions of `K_{n-1}` and full infection in every scheduled
/// round of the Hamiltonian family, for all odd `n` in `5..=n_max`.
pub fn decomposition_suite(n_max: usize, seed: u64) -> SuiteReport {
    let mut report = SuiteReport::new("decomposition");
    for n in (5..=n_max).step_by(2) {
        report.cases += 1;
        match HamiltonianDecomposition::zigzag(n - 1) {
            Ok(dec) => {
                if let Err(e) = dec.check() {
                    report.violations.push(format!("n = {n}: {e}"));
                }
            }
            Err(e) => report.violations.push(format!("n = {n}: {e}")),
        }
        let inst = match gen_hamiltonian_cycler(n, &mut stream(seed, &[4, n as u64])) {
            Ok(inst) => inst,
            Err(e) => {
                report.violations.push(format!("n = {n}: {e}"));
                continue;
            }
        };
        for round in 0..inst.schedule.len() {
            match inst.outcome(round) {
                Ok(o) if o.count() == n => {}
                Ok(o) => report
                    .violations
                    .push(format!("n = {n}, round {round}: {} infected", o.count())),
                Err(e) => report
                    .violations
                    .push(format!("n = {n}, round {round}: {e}")),
            }
        }
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_suites_pass() {
        for r in [
            oracle_suite(200, 12, 1),
            invariant_suite(200, 12, 1),
            separator_suite(50, 20, 30, 1),
            decomposition_suite(21, 1),
        ] {
            assert!(
                r.passed(),
                "{r}: {:?}",
                &r.violations[..r.violations.len().min(3)]
            );
            assert!(r.cases > 0);
        }
    }
}
