//! The `tsd 1` instance text format.
//!
//! ```text
//! tsd 1
//! n <n> m <m> tmax <t_max> delta <delta>
//! e <u> <v> <label>          (m lines)
//! source <s>
//! schedule consistent <t0>   or   schedule dynamic <t0_1> ... <t0_R>
//! tie lowest|highest|random <seed>   (optional, default lowest)
//! ```

use std::fmt::Write;

use thiserror::Error;

use crate::game::AdversaryInstance;
use crate::graph::{NodeId, TemporalGraph, Time};
use crate::infection::TiePolicy;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParseError {
    #[error("line {line}: {msg}")]
    Line { line: usize, msg: String },
    #[error("unexpected end of input, expected {0}")]
    Eof(&'static str),
    #[error("invalid instance: {0}")]
    Invalid(String),
}

fn bad(line: usize, msg: impl Into<String>) -> ParseError {
    ParseError::Line {
        line,
        msg: msg.into(),
    }
}

struct Lines<'a> {
    inner: std::iter::Enumerate<std::str::Lines<'a>>,
}

impl<'a> Lines<'a> {
    /// Next line split into whitespace tokens, with its 1-based number.
    fn next(&mut self, expected: &'static str) -> Result<(usize, Vec<&'a str>), ParseError> {
        let (i, l) = self.inner.next().ok_or(ParseError::Eof(expected))?;
        Ok((i + 1, l.split_whitespace().collect()))
    }
}

fn num<T: std::str::FromStr>(line: usize, tok: &str, what: &str) -> Result<T, ParseError> {
    tok.parse()
        .map_err(|_| bad(line, format!("{what} {tok:?} is not a valid number")))
}

/// Checks `tokens` against `keywords`, where `None` marks a number slot, and
/// returns the number slots in order.
fn fields<'a>(
    line: usize,
    tokens: &[&'a str],
    keywords: &[Option<&str>],
) -> Result<Vec<&'a str>, ParseError> {
    let shape = keywords
        .iter()
        .map(|k| k.unwrap_or("<int>"))
        .collect::<Vec<_>>()
        .join(" ");
    if tokens.len() != keywords.len() {
        return Err(bad(line, format!("expected `{shape}`")));
    }
    let mut out = Vec::new();
    for (tok, k) in tokens.iter().zip(keywords) {
        match k {
            Some(k) if tok != k => return Err(bad(line, format!("expected `{shape}`"))),
            Some(_) => {}
            None => out.push(*tok),
        }
    }
    Ok(out)
}

pub fn parse_instance(text: &str) -> Result<AdversaryInstance, ParseError> {
    let mut lines = Lines {
        inner: text.lines().enumerate(),
    };

    let (ln, toks) = lines.next("header")?;
    fields(ln, &toks, &[Some("tsd"), Some("1")])?;

    let (ln, toks) = lines.next("size line")?;
    let f = fields(
        ln,
        &toks,
        &[
            Some("n"),
            None,
            Some("m"),
            None,
            Some("tmax"),
            None,
            Some("delta"),
            None,
        ],
    )?;
    let n: usize = num(ln, f[0], "n")?;
    let m: usize = num(ln, f[1], "m")?;
    let t_max: Time = num(ln, f[2], "tmax")?;
    let delta: Time = num(ln, f[3], "delta")?;

    let mut edges = Vec::with_capacity(m.min(1 << 20));
    for _ in 0..m {
        let (ln, toks) = lines.next("edge line")?;
        let f = fields(ln, &toks, &[Some("e"), None, None, None])?;
        let u: NodeId = num(ln, f[0], "node")?;
        let v: NodeId = num(ln, f[1], "node")?;
        let label: Time = num(ln, f[2], "label")?;
        if u >= n || v >= n {
            return Err(bad(ln, format!("node out of range 0..{n}")));
        }
        if label == 0 || label > t_max {
            return Err(bad(ln, format!("label {label} outside 1..={t_max}")));
        }
        edges.push((u, v, label));
    }

    let (ln, toks) = lines.next("source line")?;
    let f = fields(ln, &toks, &[Some("source"), None])?;
    let source: NodeId = num(ln, f[0], "source")?;

    let (ln, toks) = lines.next("schedule line")?;
    let schedule: Vec<Time> = match toks.get(..2) {
        Some(["schedule", "consistent"]) => {
            let f = fields(ln, &toks, &[Some("schedule"), Some("consistent"), None])?;
            vec![num(ln, f[0], "seed time")?]
        }
        Some(["schedule", "dynamic"]) if toks.len() > 2 => toks[2..]
            .iter()
            .map(|t| num(ln, t, "seed time"))
            .collect::<Result<_, _>>()?,
        _ => {
            return Err(bad(
                ln,
                "expected `schedule consistent <t0>` or `schedule dynamic <t0> ...`",
            ))
        }
    };

    let mut tie = TiePolicy::LowestId;
    for (i, l) in lines.inner.by_ref() {
        let ln = i + 1;
        let toks: Vec<&str> = l.split_whitespace().collect();
        match toks.as_slice() {
            [] => {}
            ["tie", "lowest"] => tie = TiePolicy::LowestId,
            ["tie", "highest"] => tie = TiePolicy::HighestId,
            ["tie", "random", seed] => tie = TiePolicy::SeededRandom(num(ln, seed, "tie seed")?),
            _ => return Err(bad(ln, "unexpected trailing line")),
        }
    }

    let graph =
        TemporalGraph::new(n, t_max, edges).map_err(|e| ParseError::Invalid(e.to_string()))?;
    AdversaryInstance::new(graph, delta, source, schedule, tie)
        .map_err(|e| ParseError::Invalid(e.to_string()))
}

pub fn write_instance(inst: &AdversaryInstance) -> String {
    let g = &inst.graph;
    let mut s = String::new();
    let _ = writeln!(s, "tsd 1");
    let _ = writeln!(
        s,
        "n {} m {} tmax {} delta {}",
        g.n(),
        g.m(),
        g.t_max(),
        inst.delta
    );
    for e in g.edges() {
        let _ = writeln!(s, "e {} {} {}", e.u, e.v, e.label);
    }
    let _ = writeln!(s, "source {}", inst.source);
    if inst.schedule.len() == 1 {
        let _ = writeln!(s, "schedule consistent {}", inst.schedule[0]);
    } else {
        let times: Vec<String> = inst.schedule.iter().map(ToString::to_string).collect();
        let _ = writeln!(s, "schedule dynamic {}", times.join(" "));
    }
    match inst.tie {
        TiePolicy::LowestId => {}
        TiePolicy::HighestId => {
            let _ = writeln!(s, "tie highest");
        }
        TiePolicy::SeededRandom(seed) => {
            let _ = writeln!(s, "tie random {seed}");
        }
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    const P3: &str =
        "tsd 1\nn 3 m 2 tmax 2 delta 2\ne 0 1 1\ne 1 2 2\nsource 0\nschedule consistent 0\n";

    #[test]
    fn parses_a_small_instance() {
        let inst = parse_instance(P3).unwrap();
        assert_eq!(
            (inst.graph.n(), inst.graph.m(), inst.delta, inst.source),
            (3, 2, 2, 0)
        );
        assert_eq!(inst.schedule, vec![0]);
        assert_eq!(inst.tie, TiePolicy::LowestId);
        assert_eq!(write_instance(&inst), P3);
    }

    #[test]
    fn dynamic_schedule_and_tie_line() {
        let text =
            P3.replace("schedule consistent 0", "schedule dynamic 0 1 0") + "tie random 42\n";
        let inst = parse_instance(&text).unwrap();
        assert_eq!(inst.schedule, vec![0, 1, 0]);
        assert_eq!(inst.tie, TiePolicy::SeededRandom(42));
        assert_eq!(write_instance(&inst), text);
    }

    fn line_of(text: &str) -> usize {
        match parse_instance(text).unwrap_err() {
            ParseError::Line { line, .. } => line,
            other => panic!("expected a line error, got {other}"),
        }
    }

    #[test]
    fn malformed_lines_report_their_number() {
        assert_eq!(line_of(&P3.replace("tsd 1", "tsd 2")), 1);
        assert_eq!(line_of(&P3.replace("delta 2", "delta x")), 2);
        assert_eq!(line_of(&P3.replace("e 1 2 2", "e 1 2")), 4);
        assert_eq!(line_of(&P3.replace("e 1 2 2", "e 1 5 2")), 4);
        assert_eq!(line_of(&P3.replace("e 1 2 2", "e 1 2 3")), 4);
        assert_eq!(line_of(&P3.replace("source 0", "src 0")), 5);
        assert_eq!(line_of(&P3.replace("consistent 0", "dynamic")), 6);
        assert_eq!(line_of(&(P3.to_string() + "extra\n")), 7);
    }

    #[test]
    fn truncated_and_invalid_input() {
        assert_eq!(
            parse_instance("tsd 1\n").unwrap_err(),
            ParseError::Eof("size line")
        );
        let dup = P3.replace("e 1 2 2", "e 1 0 2");
        assert!(matches!(parse_instance(&dup), Err(ParseError::Invalid(_))));
        let src = P3.replace("source 0", "source 3");
        assert!(matches!(parse_instance(&src), Err(ParseError::Invalid(_))));
    }
}
