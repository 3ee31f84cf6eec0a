//! Pairwise majority graphs, covering, the Uncovered Set, McGarvey
//! realization and the rotational (k-cyclic) profile.

use crate::election::{pairwise_matrix, CandidateId, Election};
use crate::error::{Error, Result};
use serde::Serialize;
use std::collections::BTreeSet;

/// Outcome of each pairwise contest under strict majority.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MajorityGraph {
    m: usize,
    // sign[a*m+b] = 1 if a beats b, -1 if b beats a, 0 if tied (or a == b).
    sign: Vec<i8>,
}

impl MajorityGraph {
    /// Builds a graph from explicit edges; unlisted pairs are ties.
    pub fn from_edges(m: usize, beats: &[(CandidateId, CandidateId)]) -> Result<Self> {
        let mut sign = vec![0i8; m * m];
        for &(a, b) in beats {
            if a.0 >= m || b.0 >= m {
                return Err(Error::InvalidSpec(format!("edge {a}->{b} out of range")));
            }
            if a == b {
                return Err(Error::InvalidSpec(format!("self-loop on {a}")));
            }
            if sign[a.0 * m + b.0] != 0 {
                return Err(Error::InvalidSpec(format!("pair {a},{b} listed twice")));
            }
            sign[a.0 * m + b.0] = 1;
            sign[b.0 * m + a.0] = -1;
        }
        Ok(Self { m, sign })
    }

    pub fn num_candidates(&self) -> usize {
        self.m
    }

    pub fn beats(&self, a: CandidateId, b: CandidateId) -> bool {
        self.sign[a.0 * self.m + b.0] == 1
    }

    pub fn tied(&self, a: CandidateId, b: CandidateId) -> bool {
        a != b && self.sign[a.0 * self.m + b.0] == 0
    }

    pub fn candidates(&self) -> impl Iterator<Item = CandidateId> {
        (0..self.m).map(CandidateId)
    }

    /// All `(a, b)` with `a` beating `b`, in row-major order.
    pub fn beats_edges(&self) -> Vec<(CandidateId, CandidateId)> {
        let mut out = vec![];
        for a in self.candidates() {
            for b in self.candidates() {
                if self.beats(a, b) {
                    out.push((a, b));
                }
            }
        }
        out
    }

    /// Unordered tied pairs `(a, b)` with `a < b`.
    pub fn ties(&self) -> Vec<(CandidateId, CandidateId)> {
        let mut out = vec![];
        for a in self.candidates() {
            for b in self.candidates().filter(|b| b.0 > a.0) {
                if self.tied(a, b) {
                    out.push((a, b));
                }
            }
        }
        out
    }

    pub fn is_tournament(&self) -> bool {
        self.ties().is_empty()
    }

    /// Copeland score read off the graph: wins minus losses.
    pub fn copeland_score(&self, c: CandidateId) -> i64 {
        self.candidates()
            .map(|a| self.sign[c.0 * self.m + a.0] as i64)
            .sum()
    }

    fn check(&self, c: CandidateId) -> Result<()> {
        if c.0 < self.m {
            Ok(())
        } else {
            Err(Error::UnknownCandidate(c.to_string()))
        }
    }
}

pub fn majority_graph(e: &Election) -> MajorityGraph {
    let w = pairwise_matrix(e);
    let m = e.num_candidates();
    let mut sign = vec![0i8; m * m];
    for a in e.candidates() {
        for b in e.candidates() {
            sign[a.0 * m + b.0] = w.margin(a, b).signum() as i8;
        }
    }
    MajorityGraph { m, sign }
}

/// `U(c)`: candidates beating `c`; `D(c)`: beaten by `c`; `T(c)`: tied with `c`.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize)]
pub struct UdtPartition {
    pub up: BTreeSet<CandidateId>,
    pub down: BTreeSet<CandidateId>,
    pub tied: BTreeSet<CandidateId>,
}

pub fn udt_partition(g: &MajorityGraph, c: CandidateId) -> Result<UdtPartition> {
    g.check(c)?;
    let mut p = UdtPartition::default();
    for a in g.candidates().filter(|&a| a != c) {
        if g.beats(a, c) {
            p.up.insert(a);
        } else if g.beats(c, a) {
            p.down.insert(a);
        } else {
            p.tied.insert(a);
        }
    }
    Ok(p)
}

/// `u` covers `c`: `u` beats `c`, beats everything `c` beats, and everything
/// beating `u` also beats `c`. On tournaments the last clause is implied.
pub fn covers(g: &MajorityGraph, u: CandidateId, c: CandidateId) -> Result<bool> {
    g.check(u)?;
    g.check(c)?;
    if u == c {
        return Err(Error::SameCandidate);
    }
    if !g.beats(u, c) {
        return Ok(false);
    }
    Ok(g.candidates().all(|x| {
        (!g.beats(c, x) || g.beats(u, x)) && (!g.beats(x, u) || g.beats(x, c))
    }))
}

pub fn uncovered_set(g: &MajorityGraph) -> BTreeSet<CandidateId> {
    g.candidates()
        .filter(|&c| {
            !g.candidates()
                .filter(|&u| u != c)
                .any(|u| covers(g, u, c).unwrap_or(false))
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    Even,
    Odd,
}

/// Desired majority relation: listed pairs are strict wins, the rest ties.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MajoritySpec {
    pub labels: Vec<String>,
    pub beats: Vec<(CandidateId, CandidateId)>,
    pub parity: Parity,
}

impl MajoritySpec {
    pub fn graph(&self) -> Result<MajorityGraph> {
        MajorityGraph::from_edges(self.labels.len(), &self.beats)
    }
}

/// Builds a profile whose majority graph is exactly `spec`.
///
/// Each edge `(a, b)` contributes the voters `a > b > rest` and
/// `reverse(rest) > a > b`, which give `a` a margin of two over `b` and cancel
/// on every other pair. An edgeless spec gets the roster order and its reverse.
/// Odd parity appends one roster-order voter, turning every margin of ±2 into
/// ±1 or ±3.
pub fn mcgarvey_realize(spec: &MajoritySpec) -> Result<Election> {
    let g = spec.graph()?;
    let m = spec.labels.len();
    if m == 0 {
        return Err(Error::EmptyRoster);
    }
    if spec.parity == Parity::Odd && !g.is_tournament() {
        return Err(Error::UnrealizableParity);
    }
    let roster: Vec<CandidateId> = (0..m).map(CandidateId).collect();
    let mut votes: Vec<Vec<CandidateId>> = vec![];
    for &(a, b) in &spec.beats {
        let rest: Vec<CandidateId> = roster.iter().copied().filter(|&x| x != a && x != b).collect();
        let mut first = vec![a, b];
        first.extend(&rest);
        let mut second: Vec<CandidateId> = rest.iter().rev().copied().collect();
        second.extend([a, b]);
        votes.push(first);
        votes.push(second);
    }
    if votes.is_empty() {
        votes.push(roster.clone());
        votes.push(roster.iter().rev().copied().collect());
    }
    if spec.parity == Parity::Odd {
        votes.push(roster);
    }
    Election::from_rankings(spec.labels.clone(), votes)
}

/// The rotational profile on `a1..ak`: voter `i` ranks `a_i > a_{i+1} > ... > a_{i-1}`.
pub fn k_cyclic_profile(k: usize) -> Result<Election> {
    if k == 0 {
        return Err(Error::InvalidSize);
    }
    let labels = (1..=k).map(|i| format!("a{i}")).collect();
    let votes = (0..k)
        .map(|i| (0..k).map(|s| CandidateId((i + s) % k)).collect())
        .collect();
    Election::from_rankings(labels, votes)
}
