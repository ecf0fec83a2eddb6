//! Batch experiments: many seeded trials per size, statistics and CSV export.
//!
//! A trial's instance and strategy randomness depend only on the master seed,
//! the size and the trial index, so results do not depend on how trials are
//! scheduled across threads.

use std::fmt::Write;

use rayon::prelude::*;
use thiserror::Error;

use crate::adversaries::{Family, GenError, LabelScheme};
use crate::game::{default_max_rounds, play, GameError, GameParameters, Knowledge};
use crate::rng::{derive_seed, stream};
use crate::strategies::StrategySpec;

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error("invalid experiment: {0}")]
    Spec(String),
    #[error("n = {n}, trial {trial}: {source}")]
    Generate {
        n: usize,
        trial: usize,
        source: GenError,
    },
    #[error("n = {n}, trial {trial}: {source}")]
    Game {
        n: usize,
        trial: usize,
        source: GameError,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentSpec {
    pub strategy: StrategySpec,
    pub family: Family,
    pub labels: LabelScheme,
    pub sizes: Vec<usize>,
    pub trials: usize,
    pub seed: u64,
    /// Watch budget; defaults to what the strategy needs.
    pub k: Option<usize>,
    /// Defaults to what the strategy expects.
    pub knowledge: Option<Knowledge>,
    /// Defaults to `n^2`.
    pub max_rounds: Option<usize>,
}

impl ExperimentSpec {
    pub fn new(
        strategy: StrategySpec,
        family: Family,
        sizes: Vec<usize>,
        trials: usize,
        seed: u64,
    ) -> Self {
        ExperimentSpec {
            strategy,
            family,
            labels: LabelScheme::default(),
            sizes,
            trials,
            seed,
            k: None,
            knowledge: None,
            max_rounds: None,
        }
    }
}

/// One played game.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TrialRecord {
    pub strategy: String,
    pub family: String,
    pub n: usize,
    pub trial: usize,
    pub seed: u64,
    pub won: bool,
    pub rounds: usize,
    pub price: u64,
    /// Search phases the strategy reported at the end of the game.
    pub phases: usize,
}

pub fn trial_seed(master: u64, n: usize, trial: usize) -> u64 {
    derive_seed(master, &[n as u64, trial as u64])
}

pub fn run_trial(
    spec: &ExperimentSpec,
    n: usize,
    trial: usize,
) -> Result<TrialRecord, ExperimentError> {
    let seed = trial_seed(spec.seed, n, trial);
    let inst = spec
        .family
        .generate(n, &spec.labels, &mut stream(seed, &[0]))
        .map_err(|source| ExperimentError::Generate { n, trial, source })?;
    let k = spec.k.unwrap_or_else(|| spec.strategy.watch_budget());
    let knowledge = spec.knowledge.unwrap_or_else(|| spec.strategy.knowledge());
    let params = GameParameters::for_instance(&inst, k, knowledge);
    let mut strat = spec.strategy.build();
    let max_rounds = spec.max_rounds.unwrap_or_else(|| default_max_rounds(n));
    let t = play(
        &inst,
        strat.as_mut(),
        &params,
        max_rounds,
        &mut stream(seed, &[1]),
    )
    .map_err(|source| ExperimentError::Game { n, trial, source })?;
    Ok(TrialRecord {
        strategy: spec.strategy.to_string(),
        family: spec.family.to_string(),
        n,
        trial,
        seed,
        won: t.won,
        rounds: t.rounds.len(),
        price: t.price,
        phases: strat.phases(),
    })
}

/// Runs every (size, trial) pair in parallel; records come back in size then
/// trial order.
pub fn run_experiment(spec: &ExperimentSpec) -> Result<Vec<TrialRecord>, ExperimentError> {
    if spec.trials == 0 {
        return Err(ExperimentError::Spec("trials must be at least 1".into()));
    }
    if spec.sizes.is_empty() {
        return Err(ExperimentError::Spec("no sizes given".into()));
    }
    let jobs: Vec<(usize, usize)> = spec
        .sizes
        .iter()
        .flat_map(|&n| (0..spec.trials).map(move |t| (n, t)))
        .collect();
    jobs.par_iter()
        .map(|&(n, t)| run_trial(spec, n, t))
        .collect()
}

pub const CSV_HEADER: &str = "strategy,family,n,trial,seed,won,rounds,price";

pub fn to_csv(records: &[TrialRecord]) -> String {
    let mut s = String::from(CSV_HEADER);
    s.push('\n');
    for r in records {
        let _ = writeln!(
            s,
            "{},{},{},{},{},{},{},{}",
            r.strategy,
            r.family,
            r.n,
            r.trial,
            r.seed,
            u8::from(r.won),
            r.rounds,
            r.price
        );
    }
    s
}

/// Summary of the trials at one size.
#[derive(Debug, Clone, PartialEq)]
pub struct SizeStats {
    pub n: usize,
    pub trials: usize,
    pub wins: usize,
    pub success: f64,
    /// 95% Wilson score interval for the success probability.
    pub success_interval: (f64, f64),
    /// Price statistics over the trials selected by `summarize`.
    pub price_mean: f64,
    pub price_median: f64,
    pub price_q10: f64,
    pub price_q90: f64,
    pub price_max: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentStats {
    pub sizes: Vec<SizeStats>,
    /// Log-log fit of mean price against `n`, when there are at least three
    /// sizes with positive mean price.
    pub fit: Option<Fit>,
}

/// Which trials feed the price statistics.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PriceOver {
    AllTrials,
    WinningTrials,
}

impl PriceOver {
    /// Winning trials for randomized strategies, all trials for brute force.
    pub fn for_strategy(s: &StrategySpec) -> Self {
        match s {
            StrategySpec::Brute => PriceOver::AllTrials,
            _ => PriceOver::WinningTrials,
        }
    }
}

pub fn summarize(records: &[TrialRecord], over: PriceOver) -> ExperimentStats {
    let mut sizes: Vec<usize> = records.iter().map(|r| r.n).collect();
    sizes.sort_unstable();
    sizes.dedup();
    let stats: Vec<SizeStats> = sizes
        .iter()
        .map(|&n| {
            let at: Vec<&TrialRecord> = records.iter().filter(|r| r.n == n).collect();
            let wins = at.iter().filter(|r| r.won).count();
            let mut prices: Vec<f64> = at
                .iter()
                .filter(|r| over == PriceOver::AllTrials || r.won)
                .map(|r| r.price as f64)
                .collect();
            prices.sort_by(f64::total_cmp);
            SizeStats {
                n,
                trials: at.len(),
                wins,
                success: wins as f64 / at.len() as f64,
                success_interval: wilson_interval(wins, at.len()),
                price_mean: mean(&prices),
                price_median: quantile(&prices, 0.5),
                price_q10: quantile(&prices, 0.1),
                price_q90: quantile(&prices, 0.9),
                price_max: at.iter().map(|r| r.price).max().unwrap_or(0),
            }
        })
        .collect();
    let points: Vec<(f64, f64)> = stats.iter().map(|s| (s.n as f64, s.price_mean)).collect();
    let fit = fit_scaling(&points).ok();
    ExperimentStats { sizes: stats, fit }
}

pub fn mean(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        f64::NAN
    } else {
        xs.iter().sum::<f64>() / xs.len() as f64
    }
}

/// Linear-interpolation quantile of sorted data; NaN when empty.
pub fn quantile(sorted: &[f64], q: f64) -> f64 {
    match sorted.len() {
        0 => f64::NAN,
        1 => sorted[0],
        len => {
            let pos = q.clamp(0.0, 1.0) * (len - 1) as f64;
            let lo = pos.floor() as usize;
            let hi = pos.ceil() as usize;
            sorted[lo] + (sorted[hi] - sorted[lo]) * (pos - lo as f64)
        }
    }
}

/// 95% Wilson score interval for `wins` successes out of `trials`.
pub fn wilson_interval(wins: usize, trials: usize) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    const Z: f64 = 1.959_963_984_540_054;
    let n = trials as f64;
    let p = wins as f64 / n;
    let z2 = Z * Z;
    let center = (p + z2 / (2.0 * n)) / (1.0 + z2 / n);
    let half = Z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / (1.0 + z2 / n);
    ((center - half).max(0.0), (center + half).min(1.0))
}

/// Least-squares fit of `ln price = slope * ln n + intercept`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Fit {
    pub slope: f64,
    pub intercept: f64,
    /// Standard error of the slope (0 for an exact fit or three collinear points).
    pub stderr: f64,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FitError {
    #[error("need at least 3 points, got {0}")]
    TooFewPoints(usize),
    #[error("point ({0}, {1}) is not positive")]
    NonPositive(f64, f64),
    #[error("all sizes are equal")]
    DegenerateSizes,
}

pub fn fit_scaling(points: &[(f64, f64)]) -> Result<Fit, FitError> {
    if points.len() < 3 {
        return Err(FitError::TooFewPoints(points.len()));
    }
    if let Some(&(x, y)) = points.iter().find(|&&(x, y)| !(x > 0.0 && y > 0.0)) {
        return Err(FitError::NonPositive(x, y));
    }
    let logs: Vec<(f64, f64)> = points.iter().map(|&(x, y)| (x.ln(), y.ln())).collect();
    let k = logs.len() as f64;
    let mx = logs.iter().map(|p| p.0).sum::<f64>() / k;
    let my = logs.iter().map(|p| p.1).sum::<f64>() / k;
    let sxx: f64 = logs.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx <= f64::EPSILON {
        return Err(FitError::DegenerateSizes);
    }
    let sxy: f64 = logs.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let rss: f64 = logs
        .iter()
        .map(|p| (p.1 - intercept - slope * p.0).powi(2))
        .sum();
    let stderr = (rss / (k - 2.0) / sxx).sqrt();
    Ok(Fit {
        slope,
        intercept,
        stderr,
    })
}
