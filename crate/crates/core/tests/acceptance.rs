//! End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
//! exits non-zero if any fails.

use std::process::ExitCode;
use std::time::Instant;

use rayon::prelude::*;

use tsd_core::adversaries::{Family, LabelScheme};
use tsd_core::experiments::{
    fit_scaling, mean, run_experiment, trial_seed, ExperimentSpec, TrialRecord,
};
use tsd_core::game::{
    default_max_rounds, play, AdversaryInstance, GameParameters, GameTranscript, Knowledge,
};
use tsd_core::rng::stream;
use tsd_core::separators::heuristic_tree_decomposition;
use tsd_core::strategies::StrategySpec;
use tsd_core::verify::{decomposition_suite, invariant_suite, separator_suite};

type Criterion = (&'static str, fn() -> Verdict);

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: impl Into<String>) -> Verdict {
    Verdict {
        pass,
        detail: detail.into(),
    }
}

fn spec(
    strategy: &str,
    family: Family,
    sizes: &[usize],
    trials: usize,
    seed: u64,
) -> ExperimentSpec {
    ExperimentSpec::new(
        strategy.parse().unwrap(),
        family,
        sizes.to_vec(),
        trials,
        seed,
    )
}

fn instance(family: Family, labels: &LabelScheme, n: usize, seed: u64) -> AdversaryInstance {
    family.generate(n, labels, &mut stream(seed, &[0])).unwrap()
}

/// Plays `strategy` on `inst` with the strategy stream of `seed`.
fn play_on(
    inst: &AdversaryInstance,
    strategy: &StrategySpec,
    knowledge: Knowledge,
    seed: u64,
) -> GameTranscript {
    let params = GameParameters::for_instance(inst, strategy.watch_budget(), knowledge);
    let mut s = strategy.build();
    play(
        inst,
        s.as_mut(),
        &params,
        default_max_rounds(inst.graph.n()),
        &mut stream(seed, &[1]),
    )
    .unwrap()
}

fn at(records: &[TrialRecord], n: usize) -> Vec<&TrialRecord> {
    records.iter().filter(|r| r.n == n).collect()
}

fn drift(values: &[f64]) -> f64 {
    let max = values.iter().copied().fold(f64::MIN, f64::max);
    let min = values.iter().copied().fold(f64::MAX, f64::min);
    max / min
}

fn fmt_list(values: &[f64]) -> String {
    values
        .iter()
        .map(|v| format!("{v:.3}"))
        .collect::<Vec<_>>()
        .join(", ")
}

fn brute_totality() -> Verdict {
    let sizes = [3, 10, 100, 500, 1000, 2000];
    let dynamic = LabelScheme {
        dynamic_seeds: 8,
        ..LabelScheme::default()
    };
    let mut specs = Vec::new();
    for family in [
        Family::Path,
        Family::TreeReversed { s: None },
        Family::RandomTree,
        Family::RandomGraph { m: None },
        Family::PartialKTree { k: 2, keep: 0.9 },
    ] {
        specs.push(spec("brute", family, &sizes, 100, 11));
    }
    let mut dyn_spec = spec("brute", Family::RandomTree, &sizes, 100, 12);
    dyn_spec.labels = dynamic;
    specs.push(dyn_spec);
    // Complete graphs on n - 1 nodes: simulating every scheduled round is
    // quadratic in n per round, so this family stops at 201.
    specs.push(spec(
        "brute",
        Family::Hamiltonian,
        &[5, 11, 51, 101, 201],
        100,
        13,
    ));
    let mut games = 0;
    let mut bad = Vec::new();
    for s in &specs {
        for r in run_experiment(s).unwrap() {
            games += 1;
            if !r.won || r.price > (r.n * r.n) as u64 {
                bad.push(format!(
                    "{} n={} trial {} won={} price={}",
                    r.family, r.n, r.trial, r.won, r.price
                ));
            }
        }
    }
    verdict(
        bad.is_empty(),
        format!(
            "{games} games, {} violations {:?}",
            bad.len(),
            bad.iter().take(3).collect::<Vec<_>>()
        ),
    )
}

fn lemma1_constant() -> Verdict {
    let n = 1000;
    let strategy = StrategySpec::Lemma1;
    let mut pass = true;
    let mut detail = Vec::new();
    for family in [Family::Path, Family::RandomTree] {
        let labels = LabelScheme::default();
        let prices: Vec<f64> = (0..1000)
            .into_par_iter()
            .map(|trial| {
                let seed = trial_seed(21, n, trial);
                let inst = instance(family, &labels, n, seed);
                let t = play_on(&inst, &strategy, Knowledge::Unknown, seed);
                // Infections until the first infected node is watched.
                let hit = t
                    .rounds
                    .iter()
                    .position(|r| r.observations.iter().any(|o| o.outcome.is_infected()));
                let rounds = hit.map_or(t.rounds.len(), |i| i + 1);
                t.rounds[..rounds]
                    .iter()
                    .map(|r| r.infections as f64)
                    .sum::<f64>()
            })
            .collect();
        let m = mean(&prices) / n as f64;
        let within =
            prices.iter().filter(|&&p| p <= 6.0 * n as f64).count() as f64 / prices.len() as f64;
        pass &= m <= 3.3 && within >= 0.45;
        detail.push(format!("{family}: mean {m:.3}n, P(<=6n) {within:.3}"));
    }
    verdict(pass, detail.join("; "))
}

fn trace_back_scaling() -> Verdict {
    let sizes = [400, 900, 1600, 2500];
    let mut pass = true;
    let mut detail = Vec::new();
    for family in [Family::Path, Family::RandomTree] {
        let records = run_experiment(&spec("alg1-capped", family, &sizes, 500, 31)).unwrap();
        let mut success = Vec::new();
        let mut points = Vec::new();
        for &n in &sizes {
            let rs = at(&records, n);
            let wins: Vec<f64> = rs
                .iter()
                .filter(|r| r.won)
                .map(|r| r.price as f64)
                .collect();
            success.push(wins.len() as f64 / rs.len() as f64);
            points.push((n as f64, mean(&wins)));
        }
        let fit = fit_scaling(&points);
        let slope = fit.as_ref().map_or(f64::NAN, |f| f.slope);
        pass &= success.iter().all(|&p| p >= 0.25) && (1.35..=1.65).contains(&slope);
        detail.push(format!(
            "{family}: success [{}], slope {slope:.3}",
            fmt_list(&success)
        ));
    }
    verdict(pass, detail.join("; "))
}

fn separator_search_trees() -> Verdict {
    let sizes = [512, 1024, 2048, 4096];
    let records = run_experiment(&spec("alg2", Family::RandomTree, &sizes, 300, 41)).unwrap();
    let mut ratios = Vec::new();
    let mut phase_violations = 0;
    let mut lost = 0;
    for &n in &sizes {
        let rs = at(&records, n);
        let nlogn = n as f64 * (n as f64).log2();
        ratios.push(mean(&rs.iter().map(|r| r.price as f64).collect::<Vec<_>>()) / nlogn);
        phase_violations += rs
            .iter()
            .filter(|r| r.phases as f64 > (n as f64).log2() + 1.0)
            .count();
        lost += rs.iter().filter(|r| !r.won).count();
    }
    let d = drift(&ratios);
    verdict(
        d < 2.0 && phase_violations == 0,
        format!(
            "price/(n log2 n) [{}], drift {d:.3}, phase violations {phase_violations}, lost {lost}",
            fmt_list(&ratios)
        ),
    )
}

fn separator_search_width() -> Verdict {
    let sizes = [512, 1024, 2048];
    let mut pass = true;
    let mut detail = Vec::new();
    for k in [2, 4] {
        let family = Family::PartialKTree { k, keep: 0.9 };
        let s = spec("alg2", family, &sizes, 200, 50 + k as u64);
        let records = run_experiment(&s).unwrap();
        let mut cs = Vec::new();
        let mut widths = Vec::new();
        for &n in &sizes {
            let per_trial: Vec<(f64, usize)> = at(&records, n)
                .par_iter()
                .map(|r| {
                    let inst = instance(family, &s.labels, n, r.seed);
                    let w = heuristic_tree_decomposition(&inst.graph.underlying_static())
                        .width()
                        .max(1);
                    (
                        r.price as f64 / (w as f64 * n as f64 * (n as f64).log2()),
                        w,
                    )
                })
                .collect();
            cs.push(mean(&per_trial.iter().map(|p| p.0).collect::<Vec<_>>()));
            widths.extend(per_trial.iter().map(|p| p.1));
        }
        let d = drift(&cs);
        pass &= d < 2.0;
        let (wmin, wmax) = (widths.iter().min().unwrap(), widths.iter().max().unwrap());
        detail.push(format!(
            "k={k}: width {wmin}..={wmax}, c [{}], drift {d:.3}",
            fmt_list(&cs)
        ));
    }
    verdict(pass, detail.join("; "))
}

fn centroid_dynamic() -> Verdict {
    let sizes = [512, 1024, 2048];
    let mut s = spec("centroid2", Family::RandomTree, &sizes, 300, 61);
    s.labels = LabelScheme {
        dynamic_seeds: 8,
        ..LabelScheme::default()
    };
    let records = run_experiment(&s).unwrap();
    let mut ratios = Vec::new();
    let mut success = Vec::new();
    for &n in &sizes {
        let rs = at(&records, n);
        success.push(rs.iter().filter(|r| r.won).count() as f64 / rs.len() as f64);
        ratios.push(
            mean(&rs.iter().map(|r| r.price as f64).collect::<Vec<_>>())
                / (n as f64 * (n as f64).log2()),
        );
    }
    let d = drift(&ratios);
    verdict(
        success.iter().all(|&p| p == 1.0) && d < 2.0,
        format!(
            "success [{}], price/(n log2 n) [{}], drift {d:.3}",
            fmt_list(&success),
            fmt_list(&ratios)
        ),
    )
}

fn k_to_one() -> Verdict {
    let n = 500;
    let inner: StrategySpec = "centroid2".parse().unwrap();
    let wrapped: StrategySpec = "k2one(centroid2)".parse().unwrap();
    let bad: Vec<String> = (0..200)
        .into_par_iter()
        .filter_map(|trial| {
            let seed = trial_seed(71, n, trial);
            let inst = instance(Family::RandomTree, &LabelScheme::default(), n, seed);
            let a = play_on(&inst, &inner, Knowledge::KnownStatic, seed);
            let b = play_on(&inst, &wrapped, Knowledge::KnownStatic, seed);
            (b.price > 2 * a.price || b.guess != a.guess || !a.won).then(|| {
                format!(
                    "trial {trial}: {} vs {}, guesses {:?} {:?}",
                    b.price, a.price, b.guess, a.guess
                )
            })
        })
        .collect();
    verdict(
        bad.is_empty(),
        format!("200 trials, {} violations {:?}", bad.len(), bad.first()),
    )
}

fn known_to_unknown() -> Verdict {
    let inner = StrategySpec::Alg2;
    let wrapped: StrategySpec = "unknown-via(alg2)".parse().unwrap();
    let bad: Vec<String> = (0..200usize)
        .into_par_iter()
        .filter_map(|trial| {
            let n = 10 + trial % 51;
            let family = if trial % 2 == 0 {
                Family::RandomTree
            } else {
                Family::RandomGraph { m: None }
            };
            let seed = trial_seed(81, n, trial);
            let inst = instance(family, &LabelScheme::default(), n, seed);
            let lifted = AdversaryInstance {
                graph: inst.graph.complete_lift(inst.delta),
                ..inst.clone()
            };
            let a = play_on(&lifted, &inner, Knowledge::KnownStatic, seed);
            let b = play_on(&inst, &wrapped, Knowledge::Unknown, seed);
            (a.to_log() != b.to_log()).then(|| format!("trial {trial} (n = {n})"))
        })
        .collect();
    verdict(
        bad.is_empty(),
        format!(
            "200 instances, {} transcript mismatches {:?}",
            bad.len(),
            bad.first()
        ),
    )
}

fn engine_suite() -> Verdict {
    let r = invariant_suite(5000, 50, 91);
    verdict(r.passed(), format!("{r} {:?}", r.violations.first()))
}

fn lower_bound_generators() -> Verdict {
    let dec = decomposition_suite(201, 101);
    let mut detail = vec![format!("{dec}")];
    let mut pass = dec.passed();
    for n in [51, 101] {
        let records = run_experiment(&spec("brute", Family::Hamiltonian, &[n], 100, 102)).unwrap();
        let m = mean(&records.iter().map(|r| r.price as f64).collect::<Vec<_>>()) / (n * n) as f64;
        pass &= m >= 0.3;
        detail.push(format!("n={n}: brute mean price {m:.3}n^2"));
    }
    verdict(pass, detail.join("; "))
}

fn separator_suite_check() -> Verdict {
    let r = separator_suite(1000, 200, 200, 111);
    verdict(r.passed(), format!("{r} {:?}", r.violations.first()))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 11] = [
        (
            "brute force wins within n^2 on every family",
            brute_totality,
        ),
        (
            "random watching finds an infected node within ~3n",
            lemma1_constant,
        ),
        (
            "trace-back succeeds with constant probability at n^1.5 price",
            trace_back_scaling,
        ),
        (
            "separator search on trees costs O(n log n)",
            separator_search_trees,
        ),
        (
            "separator search scales with width on partial k-trees",
            separator_search_width,
        ),
        (
            "two-watch centroid wins under dynamic seed times",
            centroid_dynamic,
        ),
        ("k-to-1 wrapper at most doubles the price", k_to_one),
        (
            "unknown-graph wrapper replays the lifted game exactly",
            known_to_unknown,
        ),
        ("infection engine invariants", engine_suite),
        ("lower-bound instance generators", lower_bound_generators),
        (
            "balanced separators and decompositions",
            separator_suite_check,
        ),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let v = check();
        let verdict = if v.pass { "PASS" } else { "FAIL" };
        failed += usize::from(!v.pass);
        println!(
            "{verdict} [{:>2}] {name} ({:.1}s): {}",
            i + 1,
            start.elapsed().as_secs_f64(),
            v.detail
        );
    }
    println!(
        "{} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
