//! Plain-text formats for elections, majority specifications and cost tables.
//!
//! Elections:
//!
//! ```text
//! # comment
//! candidates: a, b, c
//! 8: c > a > b
//! 3: a > b > c
//! ```
//!
//! Majority specifications list `candidates:`, then `beats: x y` lines and an
//! optional `parity: even|odd` (default even); unlisted pairs are ties.
//!
//! Cost tables start with `t: T`, followed by `clone-cost: name c2 ... cT`
//! rows; `inf` is allowed and omitted candidates cost nothing.

use crate::cloning::{CloningVector, SuccessMode};
use crate::cost::{Cost, CostFunction, CostTable};
use crate::election::{CandidateId, Election};
use crate::error::{Error, Result};
use crate::tournament::{MajoritySpec, Parity};
use num_rational::Ratio;
use std::fmt::Write as _;

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

/// Non-blank lines with comments stripped, numbered from 1.
fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().filter_map(|(i, raw)| {
        let body = raw.split('#').next().unwrap_or("").trim();
        (!body.is_empty()).then_some((i + 1, body))
    })
}

/// Splits `key: rest` when the key is a known keyword.
fn keyword<'a>(body: &'a str, key: &str) -> Option<&'a str> {
    let (k, rest) = body.split_once(':')?;
    (k.trim() == key).then(|| rest.trim())
}

fn parse_roster(line: usize, rest: &str) -> Result<Vec<String>> {
    let labels: Vec<String> = rest.split(',').map(|s| s.trim().to_string()).collect();
    if labels.iter().all(|l| l.is_empty()) {
        return Err(parse_err(line, "empty candidate list"));
    }
    for (i, l) in labels.iter().enumerate() {
        crate::election::validate_label(l).map_err(|e| parse_err(line, e.to_string()))?;
        if labels[..i].contains(l) {
            return Err(parse_err(line, format!("candidate {l:?} declared twice")));
        }
    }
    Ok(labels)
}

fn lookup(labels: &[String], line: usize, name: &str) -> Result<CandidateId> {
    labels
        .iter()
        .position(|l| l == name)
        .map(CandidateId)
        .ok_or_else(|| parse_err(line, format!("unknown candidate {name:?}")))
}

/// Reads an election; weighted ballots expand to that many voters in file order.
pub fn parse_election(text: &str) -> Result<Election> {
    let mut labels: Option<Vec<String>> = None;
    let mut votes: Vec<Vec<CandidateId>> = vec![];
    let mut last_line = 0;
    for (line, body) in content_lines(text) {
        last_line = line;
        if let Some(rest) = keyword(body, "candidates") {
            if labels.is_some() {
                return Err(parse_err(line, "candidates declared twice"));
            }
            labels = Some(parse_roster(line, rest)?);
            continue;
        }
        let roster = labels
            .as_ref()
            .ok_or_else(|| parse_err(line, "ballot before the candidates line"))?;
        let (w, ranking) = body
            .split_once(':')
            .ok_or_else(|| parse_err(line, "expected `WEIGHT: a > b > ...`"))?;
        let weight: usize = w
            .trim()
            .parse()
            .map_err(|_| parse_err(line, format!("weight {:?} is not a positive integer", w.trim())))?;
        if weight == 0 {
            return Err(parse_err(line, "weight must be positive"));
        }
        let mut seen = vec![false; roster.len()];
        let mut ballot = Vec::with_capacity(roster.len());
        for name in ranking.split('>').map(str::trim) {
            let id = lookup(roster, line, name)?;
            if std::mem::replace(&mut seen[id.0], true) {
                return Err(parse_err(line, format!("candidate {name:?} listed twice")));
            }
            ballot.push(id);
        }
        if let Some(missing) = seen.iter().position(|s| !s) {
            return Err(parse_err(line, format!("candidate {:?} missing", roster[missing])));
        }
        votes.extend(std::iter::repeat_n(ballot, weight));
    }
    let labels = labels.ok_or_else(|| parse_err(last_line.max(1), "no candidates line"))?;
    if votes.is_empty() {
        return Err(parse_err(last_line.max(1), "no ballots"));
    }
    Election::from_rankings(labels, votes)
}

/// Writes an election, merging runs of identical consecutive ballots.
pub fn serialize_election(e: &Election) -> String {
    let mut out = format!("candidates: {}\n", e.labels().join(", "));
    let votes: Vec<&[CandidateId]> = e.votes().collect();
    let mut i = 0;
    while i < votes.len() {
        let run = votes[i..].iter().take_while(|v| **v == votes[i]).count();
        let names: Vec<&str> = votes[i].iter().map(|&c| e.label(c)).collect();
        let _ = writeln!(out, "{run}: {}", names.join(" > "));
        i += run;
    }
    out
}

pub fn parse_majority_spec(text: &str) -> Result<MajoritySpec> {
    let mut labels: Option<Vec<String>> = None;
    let mut beats = vec![];
    let mut parity = None;
    for (line, body) in content_lines(text) {
        if let Some(rest) = keyword(body, "candidates") {
            if labels.is_some() {
                return Err(parse_err(line, "candidates declared twice"));
            }
            labels = Some(parse_roster(line, rest)?);
        } else if let Some(rest) = keyword(body, "beats") {
            let roster = labels
                .as_ref()
                .ok_or_else(|| parse_err(line, "beats before the candidates line"))?;
            let names: Vec<&str> = rest.split_whitespace().collect();
            let [x, y] = names[..] else {
                return Err(parse_err(line, "expected `beats: x y`"));
            };
            let (x, y) = (lookup(roster, line, x)?, lookup(roster, line, y)?);
            if x == y {
                return Err(parse_err(line, "a candidate cannot beat itself"));
            }
            if beats.iter().any(|&(a, b)| (a, b) == (x, y) || (a, b) == (y, x)) {
                return Err(parse_err(line, "pair listed twice"));
            }
            beats.push((x, y));
        } else if let Some(rest) = keyword(body, "parity") {
            if parity.is_some() {
                return Err(parse_err(line, "parity declared twice"));
            }
            parity = Some(match rest {
                "even" => Parity::Even,
                "odd" => Parity::Odd,
                other => return Err(parse_err(line, format!("parity must be even or odd, got {other:?}"))),
            });
        } else {
            return Err(parse_err(line, format!("unrecognized line {body:?}")));
        }
    }
    let labels = labels.ok_or_else(|| parse_err(1, "no candidates line"))?;
    Ok(MajoritySpec {
        labels,
        beats,
        parity: parity.unwrap_or(Parity::Even),
    })
}

pub fn serialize_majority_spec(spec: &MajoritySpec) -> String {
    let mut out = format!("candidates: {}\n", spec.labels.join(", "));
    for &(x, y) in &spec.beats {
        let _ = writeln!(out, "beats: {} {}", spec.labels[x.0], spec.labels[y.0]);
    }
    let parity = match spec.parity {
        Parity::Even => "even",
        Parity::Odd => "odd",
    };
    let _ = writeln!(out, "parity: {parity}");
    out
}

/// Reads a cost table for the candidates of `e`.
pub fn parse_costs(text: &str, e: &Election) -> Result<CostFunction> {
    let mut t: Option<usize> = None;
    let mut rows: Vec<Option<Vec<Cost>>> = vec![None; e.num_candidates()];
    for (line, body) in content_lines(text) {
        if let Some(rest) = keyword(body, "t") {
            if t.is_some() {
                return Err(parse_err(line, "t declared twice"));
            }
            let v: usize = rest
                .parse()
                .map_err(|_| parse_err(line, format!("t must be an integer, got {rest:?}")))?;
            if v < 2 {
                return Err(parse_err(line, "t must be at least 2"));
            }
            t = Some(v);
        } else if let Some(rest) = keyword(body, "clone-cost") {
            let t = t.ok_or_else(|| parse_err(line, "clone-cost before the t line"))?;
            let mut tokens = rest.split_whitespace();
            let name = tokens.next().ok_or_else(|| parse_err(line, "missing candidate name"))?;
            let id = e.candidate(name).map_err(|_| parse_err(line, format!("unknown candidate {name:?}")))?;
            let costs = tokens
                .map(|tok| tok.parse::<Cost>().map_err(|err| parse_err(line, err.to_string())))
                .collect::<Result<Vec<_>>>()?;
            if costs.len() != t - 1 {
                return Err(parse_err(line, format!("expected {} costs, found {}", t - 1, costs.len())));
            }
            if rows[id.0].replace(costs).is_some() {
                return Err(parse_err(line, format!("costs for {name:?} given twice")));
            }
        } else {
            return Err(parse_err(line, format!("unrecognized line {body:?}")));
        }
    }
    let t = t.ok_or_else(|| parse_err(1, "no t line"))?;
    let rows = rows
        .into_iter()
        .map(|r| r.unwrap_or_else(|| vec![Cost::ZERO; t - 1]))
        .collect();
    Ok(CostFunction::General(CostTable::new(t, rows)?))
}

/// Reads `name=k,name=k` or `none`; unlisted candidates keep one copy.
pub fn parse_vector(spec: &str, e: &Election) -> Result<CloningVector> {
    let mut v = CloningVector::ones(e.num_candidates());
    let mut given = vec![false; e.num_candidates()];
    if spec.trim() == "none" {
        return Ok(v);
    }
    for item in spec.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let (name, k) = item
            .split_once('=')
            .ok_or_else(|| Error::InvalidVector(format!("expected name=k, got {item:?}")))?;
        let c = e.candidate(name.trim())?;
        let k: usize = k
            .trim()
            .parse()
            .map_err(|_| Error::InvalidVector(format!("{:?} is not a clone count", k.trim())))?;
        if k == 0 {
            return Err(Error::InvalidVector(format!("{name} needs at least one copy")));
        }
        if std::mem::replace(&mut given[c.0], true) {
            return Err(Error::InvalidVector(format!("{name} given twice")));
        }
        v.set(c, k);
    }
    Ok(v)
}

/// `name=k` for every entry above one, or `none`.
pub fn format_vector(v: &CloningVector, e: &Election) -> String {
    let parts: Vec<String> = e
        .candidates()
        .filter(|&c| v.get(c) > 1)
        .map(|c| format!("{}={}", e.label(c), v.get(c)))
        .collect();
    if parts.is_empty() {
        "none".into()
    } else {
        parts.join(",")
    }
}

/// `0plus`, `1`, or a probability strictly between 0 and 1 written `p/q` or
/// as a decimal.
pub fn parse_mode(s: &str) -> Result<SuccessMode> {
    let s = s.trim();
    match s {
        "0plus" | "0+" => return Ok(SuccessMode::ZeroPlus),
        "1" => return Ok(SuccessMode::One),
        _ => {}
    }
    let q = if let Some((p, d)) = s.split_once('/') {
        let (p, d): (u64, u64) = (
            p.trim().parse().map_err(|_| Error::InvalidThreshold)?,
            d.trim().parse().map_err(|_| Error::InvalidThreshold)?,
        );
        if d == 0 {
            return Err(Error::InvalidThreshold);
        }
        Ratio::new(p, d)
    } else {
        let (int, frac) = s.split_once('.').unwrap_or((s, ""));
        if int.is_empty() && frac.is_empty() || frac.len() > 18 {
            return Err(Error::InvalidThreshold);
        }
        let digits = format!("{int}{frac}");
        let num: u64 = digits.parse().map_err(|_| Error::InvalidThreshold)?;
        Ratio::new(num, 10u64.pow(frac.len() as u32))
    };
    SuccessMode::threshold(q)
}
