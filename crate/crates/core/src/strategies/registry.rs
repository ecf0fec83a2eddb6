use std::fmt;
use std::str::FromStr;

use crate::game::{ConfigError, Discoverer, Knowledge};

use super::{
    BruteForce, CentroidTwoWatch, KToOne, RandomWatchUntilHit, SeparatorSearch, TraceBack,
    UnknownViaKnown,
};

const KNOWN: &str =
    "brute, lemma1, alg1, alg1-capped, alg2, centroid2, k2one(<name>), unknown-via(<name>)";

/// A strategy name as accepted on the command line.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum StrategySpec {
    Brute,
    Lemma1,
    Alg1,
    Alg1Capped,
    Alg2,
    Centroid2,
    KToOne(Box<StrategySpec>),
    UnknownVia(Box<StrategySpec>),
}

impl StrategySpec {
    pub fn build(&self) -> Box<dyn Discoverer> {
        match self {
            StrategySpec::Brute => Box::new(BruteForce::new()),
            StrategySpec::Lemma1 => Box::new(RandomWatchUntilHit::default()),
            StrategySpec::Alg1 => Box::new(TraceBack::new(false)),
            StrategySpec::Alg1Capped => Box::new(TraceBack::new(true)),
            StrategySpec::Alg2 => Box::new(SeparatorSearch::new()),
            StrategySpec::Centroid2 => Box::new(CentroidTwoWatch::new()),
            StrategySpec::KToOne(inner) => {
                Box::new(KToOne::new(inner.build(), inner.watch_budget()))
            }
            StrategySpec::UnknownVia(inner) => Box::new(UnknownViaKnown::new(inner.build())),
        }
    }

    /// Watches per round the strategy needs.
    pub fn watch_budget(&self) -> usize {
        match self {
            StrategySpec::Centroid2 => 2,
            StrategySpec::UnknownVia(inner) => inner.watch_budget(),
            _ => 1,
        }
    }

    /// What the Discoverer is told about the graph when playing this strategy.
    pub fn knowledge(&self) -> Knowledge {
        match self {
            StrategySpec::Alg2 | StrategySpec::Centroid2 => Knowledge::KnownStatic,
            StrategySpec::KToOne(inner) => inner.knowledge(),
            _ => Knowledge::Unknown,
        }
    }
}

impl fmt::Display for StrategySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StrategySpec::Brute => f.write_str("brute"),
            StrategySpec::Lemma1 => f.write_str("lemma1"),
            StrategySpec::Alg1 => f.write_str("alg1"),
            StrategySpec::Alg1Capped => f.write_str("alg1-capped"),
            StrategySpec::Alg2 => f.write_str("alg2"),
            StrategySpec::Centroid2 => f.write_str("centroid2"),
            StrategySpec::KToOne(inner) => write!(f, "k2one({inner})"),
            StrategySpec::UnknownVia(inner) => write!(f, "unknown-via({inner})"),
        }
    }
}

impl FromStr for StrategySpec {
    type Err = ConfigError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let unknown = || ConfigError::UnknownStrategy {
            name: s.to_string(),
            known: KNOWN.into(),
        };
        let s = s.trim();
        let wrapped = |prefix: &str| {
            s.strip_prefix(prefix)
                .and_then(|rest| rest.strip_prefix('('))
                .and_then(|rest| rest.strip_suffix(')'))
        };
        if let Some(inner) = wrapped("k2one") {
            return Ok(StrategySpec::KToOne(Box::new(
                inner.parse().map_err(|_| unknown())?,
            )));
        }
        if let Some(inner) = wrapped("unknown-via") {
            return Ok(StrategySpec::UnknownVia(Box::new(
                inner.parse().map_err(|_| unknown())?,
            )));
        }
        Ok(match s {
            "brute" => StrategySpec::Brute,
            "lemma1" => StrategySpec::Lemma1,
            "alg1" => StrategySpec::Alg1,
            "alg1-capped" => StrategySpec::Alg1Capped,
            "alg2" => StrategySpec::Alg2,
            "centroid2" => StrategySpec::Centroid2,
            _ => return Err(unknown()),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_round_trip() {
        for name in [
            "brute",
            "lemma1",
            "alg1",
            "alg1-capped",
            "alg2",
            "centroid2",
            "k2one(centroid2)",
            "unknown-via(alg2)",
            "k2one(unknown-via(alg2))",
        ] {
            let spec: StrategySpec = name.parse().unwrap();
            assert_eq!(spec.to_string(), name);
            assert_eq!(spec.build().name(), name);
        }
    }

    #[test]
    fn unknown_names_list_the_known_ones() {
        let err = "alg3".parse::<StrategySpec>().unwrap_err();
        assert!(err.to_string().contains("centroid2"));
        assert!("k2one(alg3)".parse::<StrategySpec>().is_err());
        assert!("k2one(alg2".parse::<StrategySpec>().is_err());
    }

    #[test]
    fn budgets_and_knowledge() {
        let c2: StrategySpec = "centroid2".parse().unwrap();
        assert_eq!(
            (c2.watch_budget(), c2.knowledge()),
            (2, Knowledge::KnownStatic)
        );
        let k: StrategySpec = "k2one(centroid2)".parse().unwrap();
        assert_eq!(
            (k.watch_budget(), k.knowledge()),
            (1, Knowledge::KnownStatic)
        );
        let u: StrategySpec = "unknown-via(alg2)".parse().unwrap();
        assert_eq!((u.watch_budget(), u.knowledge()), (1, Knowledge::Unknown));
    }
}
