use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use tsd_core::adversaries::{Family, LabelScheme};
use tsd_core::experiments::{run_experiment, summarize, to_csv, ExperimentSpec, PriceOver};
use tsd_core::format::{parse_instance, write_instance};
use tsd_core::game::{default_max_rounds, play, GameParameters};
use tsd_core::rng::stream;
use tsd_core::strategies::StrategySpec;
use tsd_core::verify::{decomposition_suite, invariant_suite, oracle_suite, separator_suite};

/// Source detection games on temporal graphs.
#[derive(Parser)]
#[command(name = "tsd", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Play one game on an instance file.
    Play {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long)]
        strategy: String,
        #[arg(long)]
        seed: u64,
        /// Watches per round (defaults to what the strategy needs).
        #[arg(long, value_parser = clap::value_parser!(u8).range(1..=2))]
        k: Option<u8>,
        /// Defaults to n^2.
        #[arg(long)]
        max_rounds: Option<usize>,
        /// Write the round-by-round log here.
        #[arg(long)]
        transcript: Option<PathBuf>,
    },
    /// Generate an instance file.
    Generate {
        #[arg(long)]
        family: String,
        #[arg(long)]
        n: usize,
        #[command(flatten)]
        params: FamilyArgs,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run many seeded games and write one CSV row per game.
    Experiment {
        #[arg(long)]
        strategy: String,
        #[arg(long)]
        family: String,
        /// Comma-separated sizes.
        #[arg(long, value_delimiter = ',', required = true)]
        sizes: Vec<usize>,
        #[arg(long)]
        trials: usize,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        params: FamilyArgs,
        #[arg(long)]
        k: Option<usize>,
        #[arg(long)]
        max_rounds: Option<usize>,
    },
    /// Run a self-check suite; exits with 2 on any violation.
    Verify {
        #[arg(long, value_enum)]
        suite: Suite,
        /// Largest instance size to generate.
        #[arg(long)]
        n_max: Option<usize>,
        /// Number of random cases.
        #[arg(long)]
        cases: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Suite {
    Invariants,
    Oracles,
    Separators,
    Decomposition,
}

/// Family parameters; each applies only to the families that have it.
#[derive(Args)]
struct FamilyArgs {
    /// Source position 1..=n for tree-reversed (random if omitted).
    #[arg(long)]
    s: Option<usize>,
    /// Edge count for random-graph.
    #[arg(long)]
    m: Option<usize>,
    /// Clique size k for partial-ktree.
    #[arg(long)]
    tree_k: Option<usize>,
    /// Probability of keeping a non-backbone edge for partial-ktree.
    #[arg(long)]
    keep: Option<f64>,
    /// Number of dynamic seed times for the random families (0 = consistent).
    #[arg(long)]
    dynamic: Option<usize>,
    /// Blocked-edge rate for the random families, scaled by 1/sqrt(n).
    #[arg(long)]
    block_rate: Option<f64>,
}

impl FamilyArgs {
    fn resolve(&self, name: &str) -> Result<(Family, LabelScheme)> {
        let mut family: Family = name.parse()?;
        match &mut family {
            Family::TreeReversed { s } => *s = self.s.or(*s),
            Family::RandomGraph { m } => *m = self.m.or(*m),
            Family::PartialKTree { k, keep } => {
                *k = self.tree_k.unwrap_or(*k);
                *keep = self.keep.unwrap_or(*keep);
            }
            _ => {}
        }
        let mut labels = LabelScheme::default();
        if let Some(d) = self.dynamic {
            labels.dynamic_seeds = d;
        }
        if let Some(b) = self.block_rate {
            labels.block_rate = b;
        }
        Ok((family, labels))
    }
}

/// Exit code 2 marks a failed self-check; everything else that goes wrong is 1.
enum Outcome {
    Done,
    SuiteFailed,
}

fn run(cli: Cli) -> Result<Outcome> {
    match cli.command {
        Command::Play {
            instance,
            strategy,
            seed,
            k,
            max_rounds,
            transcript,
        } => {
            let text = fs::read_to_string(&instance)
                .with_context(|| format!("reading {}", instance.display()))?;
            let inst =
                parse_instance(&text).with_context(|| format!("parsing {}", instance.display()))?;
            let spec: StrategySpec = strategy.parse()?;
            let k = k.map_or_else(|| spec.watch_budget(), usize::from);
            let params = GameParameters::for_instance(&inst, k, spec.knowledge());
            let max_rounds = max_rounds.unwrap_or_else(|| default_max_rounds(inst.graph.n()));
            let mut strat = spec.build();
            let t = play(
                &inst,
                strat.as_mut(),
                &params,
                max_rounds,
                &mut stream(seed, &[1]),
            )?;
            if let Some(path) = transcript {
                fs::write(&path, t.to_log())
                    .with_context(|| format!("writing {}", path.display()))?;
            }
            let guess = t.guess.map_or("-".to_string(), |g| g.to_string());
            println!(
                "won {} guess {guess} rounds {} price {}",
                u8::from(t.won),
                t.rounds.len(),
                t.price
            );
        }
        Command::Generate {
            family,
            n,
            params,
            seed,
            out,
        } => {
            let (family, labels) = params.resolve(&family)?;
            let inst = family.generate(n, &labels, &mut stream(seed, &[0]))?;
            fs::write(&out, write_instance(&inst))
                .with_context(|| format!("writing {}", out.display()))?;
        }
        Command::Experiment {
            strategy,
            family,
            sizes,
            trials,
            seed,
            out,
            params,
            k,
            max_rounds,
        } => {
            let (family, labels) = params.resolve(&family)?;
            let mut spec = ExperimentSpec::new(strategy.parse()?, family, sizes, trials, seed);
            spec.labels = labels;
            spec.k = k;
            spec.max_rounds = max_rounds;
            let records = run_experiment(&spec)?;
            fs::write(&out, to_csv(&records))
                .with_context(|| format!("writing {}", out.display()))?;
            let stats = summarize(&records, PriceOver::for_strategy(&spec.strategy));
            for s in &stats.sizes {
                println!(
                    "n {} success {:.3} [{:.3}, {:.3}] price mean {:.1} median {:.1} max {}",
                    s.n,
                    s.success,
                    s.success_interval.0,
                    s.success_interval.1,
                    s.price_mean,
                    s.price_median,
                    s.price_max
                );
            }
            if let Some(f) = stats.fit {
                println!("slope {:.3} +- {:.3}", f.slope, f.stderr);
            }
        }
        Command::Verify {
            suite,
            n_max,
            cases,
            seed,
        } => {
            let report = match suite {
                Suite::Oracles => oracle_suite(cases.unwrap_or(5000), n_max.unwrap_or(50), seed),
                Suite::Invariants => {
                    invariant_suite(cases.unwrap_or(5000), n_max.unwrap_or(50), seed)
                }
                Suite::Separators => {
                    let c = cases.unwrap_or(1000);
                    separator_suite(c, c / 5, n_max.unwrap_or(200), seed)
                }
                Suite::Decomposition => {
                    if cases.is_some() {
                        bail!("--cases does not apply to the decomposition suite");
                    }
                    decomposition_suite(n_max.unwrap_or(201), seed)
                }
            };
            for v in report.violations.iter().take(20) {
                eprintln!("{v}");
            }
            println!("{report}");
            if !report.passed() {
                return Ok(Outcome::SuiteFailed);
            }
        }
    }
    Ok(Outcome::Done)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(Outcome::Done) => ExitCode::SUCCESS,
        Ok(Outcome::SuiteFailed) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
