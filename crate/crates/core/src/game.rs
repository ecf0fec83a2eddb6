//! The round-based source detection game.
//!
//! The Adversary commits to an [`AdversaryInstance`] before the first round.
//! Each round the Discoverer either watches up to `k` nodes or guesses the
//! source; either way the round is played and its infections are charged to
//! the price of detection.

use std::fmt::{self, Write as _};

use rand::RngCore;
use thiserror::Error;

use crate::graph::{NodeId, StaticGraph, TemporalGraph, Time};
use crate::infection::{
    run_round, EngineError, InfectionOutcome, Infector, SeedInfection, TiePolicy,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Knowledge {
    KnownStatic,
    Unknown,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Behavior {
    Consistent,
    ObliviousDynamic,
}

/// What the Discoverer is told before the first round.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GameParameters {
    pub n: usize,
    pub t_max: Time,
    pub delta: Time,
    pub k: usize,
    pub knowledge: Knowledge,
    pub behavior: Behavior,
}

impl GameParameters {
    /// Parameters matching `inst`, with behavior read off its schedule.
    pub fn for_instance(inst: &AdversaryInstance, k: usize, knowledge: Knowledge) -> Self {
        GameParameters {
            n: inst.graph.n(),
            t_max: inst.graph.t_max(),
            delta: inst.delta,
            k,
            knowledge,
            behavior: inst.behavior(),
        }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum InstanceError {
    #[error("source {node} not in graph with {n} nodes")]
    SourceOutOfRange { node: NodeId, n: usize },
    #[error("seed schedule is empty")]
    EmptySchedule,
    #[error("scheduled seed time {time} outside [0, {t_max}]")]
    SeedTime { time: Time, t_max: Time },
    #[error("infectious duration must be at least 1")]
    ZeroDelta,
    #[error("graph fails validation: {0}")]
    Graph(String),
}

/// The environment the Adversary commits to in advance.
///
/// A one-entry schedule is consistent behavior; longer schedules are cycled
/// round by round.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AdversaryInstance {
    pub graph: TemporalGraph,
    pub delta: Time,
    pub source: NodeId,
    pub schedule: Vec<Time>,
    pub tie: TiePolicy,
}

impl AdversaryInstance {
    pub fn new(
        graph: TemporalGraph,
        delta: Time,
        source: NodeId,
        schedule: Vec<Time>,
        tie: TiePolicy,
    ) -> Result<Self, InstanceError> {
        let inst = AdversaryInstance {
            graph,
            delta,
            source,
            schedule,
            tie,
        };
        inst.check()?;
        Ok(inst)
    }

    pub fn check(&self) -> Result<(), InstanceError> {
        if let Err(v) = self.graph.validate() {
            let msg = v
                .iter()
                .map(ToString::to_string)
                .collect::<Vec<_>>()
                .join("; ");
            return Err(InstanceError::Graph(msg));
        }
        if self.source >= self.graph.n() {
            return Err(InstanceError::SourceOutOfRange {
                node: self.source,
                n: self.graph.n(),
            });
        }
        if self.delta == 0 {
            return Err(InstanceError::ZeroDelta);
        }
        if self.schedule.is_empty() {
            return Err(InstanceError::EmptySchedule);
        }
        if let Some(&time) = self.schedule.iter().find(|&&t| t > self.graph.t_max()) {
            return Err(InstanceError::SeedTime {
                time,
                t_max: self.graph.t_max(),
            });
        }
        Ok(())
    }

    pub fn behavior(&self) -> Behavior {
        if self.schedule.len() == 1 {
            Behavior::Consistent
        } else {
            Behavior::ObliviousDynamic
        }
    }

    /// Seed time of the 0-based `round`.
    pub fn seed_time(&self, round: usize) -> Time {
        self.schedule[round % self.schedule.len()]
    }

    /// Key for the tie-breaking stream of `round`. Consistent instances repeat
    /// the very same round, attribution included.
    fn tie_key(&self, round: usize) -> u64 {
        match self.behavior() {
            Behavior::Consistent => 0,
            Behavior::ObliviousDynamic => round as u64,
        }
    }

    /// The full infection outcome of the 0-based `round`.
    pub fn outcome(&self, round: usize) -> Result<InfectionOutcome, EngineError> {
        let seed = SeedInfection {
            node: self.source,
            time: self.seed_time(round),
        };
        run_round(
            &self.graph,
            seed,
            self.delta,
            self.tie.for_round(self.tie_key(round)),
        )
    }
}

/// What a watched node reveals in one round.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum WatchOutcome {
    NotInfected,
    Infected { time: Time, via: NodeId },
    SeedInfected { time: Time },
}

impl WatchOutcome {
    pub fn of(outcome: &InfectionOutcome, v: NodeId) -> Self {
        match (outcome.time(v), outcome.infector(v)) {
            (Some(time), Some(Infector::Seed)) => WatchOutcome::SeedInfected { time },
            (Some(time), Some(Infector::Node(via))) => WatchOutcome::Infected { time, via },
            _ => WatchOutcome::NotInfected,
        }
    }

    pub fn is_infected(self) -> bool {
        !matches!(self, WatchOutcome::NotInfected)
    }

    pub fn time(self) -> Option<Time> {
        match self {
            WatchOutcome::NotInfected => None,
            WatchOutcome::Infected { time, .. } | WatchOutcome::SeedInfected { time } => Some(time),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Observation {
    /// 1-based round in which the node was watched.
    pub round: usize,
    pub node: NodeId,
    pub outcome: WatchOutcome,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Action {
    Watch(Vec<NodeId>),
    Guess(NodeId),
}

/// Everything the Discoverer is given upfront. The static graph is present
/// only for [`Knowledge::KnownStatic`]; labels are never revealed.
#[derive(Debug, Clone)]
pub struct DiscovererInfo {
    pub params: GameParameters,
    pub graph: Option<StaticGraph>,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ConfigError {
    #[error("strategy needs the static graph")]
    NeedsStaticGraph,
    #[error("strategy needs consistent source behavior")]
    NeedsConsistent,
    #[error("strategy needs to watch {need} nodes per round, budget is {have}")]
    WatchBudget { need: usize, have: usize },
    #[error("strategy needs a tree")]
    NotATree,
    #[error("unknown strategy {name:?}; known: {known}")]
    UnknownStrategy { name: String, known: String },
}

/// A Discoverer strategy. One value plays one game; build a fresh one per trial.
pub trait Discoverer: Send {
    fn name(&self) -> String;

    fn begin(&mut self, info: &DiscovererInfo) -> Result<(), ConfigError>;

    fn act(&mut self, rng: &mut dyn RngCore) -> Action;

    /// Observations for the nodes watched in the last round, in watch order.
    fn observe(&mut self, observations: &[Observation]);

    /// Nodes the strategy still considers possible sources, if it tracks them.
    fn candidates(&self) -> Option<&[NodeId]> {
        None
    }

    /// Number of search phases started so far (separator computations,
    /// centroid recursions), for strategies that have phases.
    fn phases(&self) -> usize {
        0
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RoundRecord {
    pub round: usize,
    pub watch: Vec<NodeId>,
    pub observations: Vec<Observation>,
    pub guess: Option<NodeId>,
    pub infections: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GameTranscript {
    pub rounds: Vec<RoundRecord>,
    pub guess: Option<NodeId>,
    pub won: bool,
    pub price: u64,
}

/// Total infections over all played rounds.
pub fn price_of_detection(t: &GameTranscript) -> u64 {
    t.rounds.iter().map(|r| r.infections as u64).sum()
}

impl fmt::Display for WatchOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WatchOutcome::NotInfected => write!(f, "none"),
            WatchOutcome::Infected { time, via } => write!(f, "inf@{time}/{via}"),
            WatchOutcome::SeedInfected { time } => write!(f, "seed@{time}"),
        }
    }
}

impl GameTranscript {
    /// Line-oriented log: one `round` line per round and a final `guess` line.
    pub fn to_log(&self) -> String {
        let mut s = String::new();
        for r in &self.rounds {
            let watch = if r.watch.is_empty() {
                "-".to_string()
            } else {
                r.watch
                    .iter()
                    .map(ToString::to_string)
                    .collect::<Vec<_>>()
                    .join(" ")
            };
            let obs = if r.observations.is_empty() {
                "-".to_string()
            } else {
                r.observations
                    .iter()
                    .map(|o| format!("{}:{}", o.node, o.outcome))
                    .collect::<Vec<_>>()
                    .join(" ")
            };
            let _ = writeln!(
                s,
                "round {} watch {watch} obs {obs} infections {}",
                r.round, r.infections
            );
        }
        let guess = self.guess.map_or("-".to_string(), |g| g.to_string());
        let _ = writeln!(
            s,
            "guess {guess} won {} price {}",
            u8::from(self.won),
            self.price
        );
        s
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GameError {
    #[error("round {round}: watched {watched} nodes with budget {k}")]
    TooManyWatches {
        round: usize,
        watched: usize,
        k: usize,
    },
    #[error("round {round}: node {node} is not in the graph")]
    UnknownNode { round: usize, node: NodeId },
    #[error("round {round}: node {node} watched twice")]
    DuplicateWatch { round: usize, node: NodeId },
    #[error("parameters do not match the instance: {0}")]
    Mismatch(String),
    #[error(transparent)]
    Instance(#[from] InstanceError),
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Engine(#[from] EngineError),
}

/// Memoizes round outcomes that are fully determined by the schedule slot.
struct Rounds<'a> {
    inst: &'a AdversaryInstance,
    cached: Vec<Option<InfectionOutcome>>,
    reusable: bool,
}

impl<'a> Rounds<'a> {
    fn new(inst: &'a AdversaryInstance) -> Self {
        let reusable = inst.behavior() == Behavior::Consistent || inst.tie.is_deterministic();
        Rounds {
            inst,
            cached: vec![None; inst.schedule.len()],
            reusable,
        }
    }

    fn get(&mut self, round: usize) -> Result<std::borrow::Cow<'_, InfectionOutcome>, EngineError> {
        use std::borrow::Cow;
        if !self.reusable {
            return Ok(Cow::Owned(self.inst.outcome(round)?));
        }
        let slot = round % self.cached.len();
        if self.cached[slot].is_none() {
            self.cached[slot] = Some(self.inst.outcome(round)?);
        }
        Ok(Cow::Borrowed(
            self.cached[slot].as_ref().expect("filled above"),
        ))
    }
}

fn check_params(inst: &AdversaryInstance, p: &GameParameters) -> Result<(), GameError> {
    let mismatch = |what: String| Err(GameError::Mismatch(what));
    if p.n != inst.graph.n() {
        return mismatch(format!(
            "n = {} but graph has {} nodes",
            p.n,
            inst.graph.n()
        ));
    }
    if p.t_max != inst.graph.t_max() {
        return mismatch(format!(
            "t_max = {} but graph has {}",
            p.t_max,
            inst.graph.t_max()
        ));
    }
    if p.delta != inst.delta {
        return mismatch(format!(
            "delta = {} but instance has {}",
            p.delta, inst.delta
        ));
    }
    if p.k == 0 {
        return mismatch("watch budget k must be at least 1".into());
    }
    if p.behavior == Behavior::Consistent && inst.schedule.len() != 1 {
        return mismatch(format!(
            "consistent behavior needs one seed time, schedule has {}",
            inst.schedule.len()
        ));
    }
    Ok(())
}

/// Plays one game; see [`play_with`].
pub fn play(
    inst: &AdversaryInstance,
    strat: &mut dyn Discoverer,
    params: &GameParameters,
    max_rounds: usize,
    rng: &mut dyn RngCore,
) -> Result<GameTranscript, GameError> {
    play_with(inst, strat, params, max_rounds, rng, |_, _| {})
}

/// Plays one game, calling `probe` after every round with the round record
/// and the strategy (so tests can compare its state to the ground truth).
pub fn play_with(
    inst: &AdversaryInstance,
    strat: &mut dyn Discoverer,
    params: &GameParameters,
    max_rounds: usize,
    rng: &mut dyn RngCore,
    mut probe: impl FnMut(&RoundRecord, &dyn Discoverer),
) -> Result<GameTranscript, GameError> {
    inst.check()?;
    check_params(inst, params)?;
    let info = DiscovererInfo {
        params: *params,
        graph: match params.knowledge {
            Knowledge::KnownStatic => Some(inst.graph.underlying_static()),
            Knowledge::Unknown => None,
        },
    };
    strat.begin(&info)?;

    let mut rounds_cache = Rounds::new(inst);
    let mut transcript = GameTranscript {
        rounds: Vec::new(),
        guess: None,
        won: false,
        price: 0,
    };
    for round in 0..max_rounds {
        let number = round + 1;
        let action = strat.act(rng);
        let outcome = rounds_cache.get(round)?;
        let infections = outcome.count();
        transcript.price += infections as u64;
        match action {
            Action::Guess(v) => {
                let record = RoundRecord {
                    round: number,
                    watch: Vec::new(),
                    observations: Vec::new(),
                    guess: Some(v),
                    infections,
                };
                transcript.guess = Some(v);
                transcript.won = v == inst.source;
                probe(&record, &*strat);
                transcript.rounds.push(record);
                return Ok(transcript);
            }
            Action::Watch(watch) => {
                if watch.len() > params.k {
                    return Err(GameError::TooManyWatches {
                        round: number,
                        watched: watch.len(),
                        k: params.k,
                    });
                }
                for (i, &v) in watch.iter().enumerate() {
                    if v >= params.n {
                        return Err(GameError::UnknownNode {
                            round: number,
                            node: v,
                        });
                    }
                    if watch[..i].contains(&v) {
                        return Err(GameError::DuplicateWatch {
                            round: number,
                            node: v,
                        });
                    }
                }
                let observations: Vec<Observation> = watch
                    .iter()
                    .map(|&node| Observation {
                        round: number,
                        node,
                        outcome: WatchOutcome::of(&outcome, node),
                    })
                    .collect();
                drop(outcome);
                strat.observe(&observations);
                let record = RoundRecord {
                    round: number,
                    watch,
                    observations,
                    guess: None,
                    infections,
                };
                probe(&record, &*strat);
                transcript.rounds.push(record);
            }
        }
    }
    Ok(transcript)
}

/// Default round cap: `n^2`.
pub fn default_max_rounds(n: usize) -> usize {
    (n * n).max(1)
}
