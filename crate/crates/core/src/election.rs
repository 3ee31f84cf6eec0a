//! Elections over strict linear orders and the pairwise facts derived from them.

use crate::error::{Error, Result};
use serde::Serialize;
use std::fmt;

/// Position of a candidate in the roster.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(transparent)]
pub struct CandidateId(pub usize);

impl CandidateId {
    pub fn index(self) -> usize {
        self.0
    }
}

impl fmt::Display for CandidateId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

/// A ranking of the whole roster, best first.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LinearOrder {
    ranking: Vec<CandidateId>,
}

impl LinearOrder {
    /// Checks that `ranking` is a permutation of `0..m`.
    pub fn new(ranking: Vec<CandidateId>, m: usize) -> Result<Self> {
        check_permutation(&ranking, m).map_err(|reason| Error::InvalidVote { voter: 0, reason })?;
        Ok(Self { ranking })
    }

    pub fn ranking(&self) -> &[CandidateId] {
        &self.ranking
    }
}

fn check_permutation(ranking: &[CandidateId], m: usize) -> std::result::Result<(), String> {
    if ranking.len() != m {
        return Err(format!("expected {m} candidates, found {}", ranking.len()));
    }
    let mut seen = vec![false; m];
    for &c in ranking {
        if c.0 >= m {
            return Err(format!("candidate index {} out of range", c.0));
        }
        if std::mem::replace(&mut seen[c.0], true) {
            return Err(format!("candidate index {} listed twice", c.0));
        }
    }
    Ok(())
}

pub(crate) fn validate_label(label: &str) -> Result<()> {
    if label.is_empty()
        || label.trim() != label
        || label.contains(['>', ',', ':'])
        || label.starts_with('#')
    {
        return Err(Error::InvalidLabel(label.to_string()));
    }
    Ok(())
}

/// An election `(A, R)`: a roster and one strict linear order per voter.
///
/// Ballots are stored flat (`n * m` entries, voter-major) so that the rule
/// evaluators and the exhaustive search can rewrite them in place.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Election {
    labels: Vec<String>,
    ballots: Vec<CandidateId>,
}

impl Election {
    pub fn new(labels: Vec<String>, votes: Vec<LinearOrder>) -> Result<Self> {
        let votes = votes.into_iter().map(|v| v.ranking).collect();
        Self::from_rankings(labels, votes)
    }

    /// Builds an election from raw rankings, validating every vote.
    pub fn from_rankings(labels: Vec<String>, votes: Vec<Vec<CandidateId>>) -> Result<Self> {
        if labels.is_empty() {
            return Err(Error::EmptyRoster);
        }
        if votes.is_empty() {
            return Err(Error::NoVoters);
        }
        let mut sorted: Vec<&String> = labels.iter().collect();
        for l in &labels {
            validate_label(l)?;
        }
        sorted.sort();
        if let Some(w) = sorted.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::DuplicateLabel(w[0].clone()));
        }
        let m = labels.len();
        let mut ballots = Vec::with_capacity(m * votes.len());
        for (voter, v) in votes.into_iter().enumerate() {
            check_permutation(&v, m).map_err(|reason| Error::InvalidVote { voter, reason })?;
            ballots.extend(v);
        }
        Ok(Self { labels, ballots })
    }

    /// Convenience constructor from label strings, mostly for fixtures.
    pub fn from_labels(labels: &[&str], votes: &[&[&str]]) -> Result<Self> {
        let labels: Vec<String> = labels.iter().map(|s| s.to_string()).collect();
        let mut rankings = Vec::with_capacity(votes.len());
        for v in votes {
            let mut r = Vec::with_capacity(v.len());
            for name in v.iter() {
                let id = labels
                    .iter()
                    .position(|l| l == name)
                    .ok_or_else(|| Error::UnknownCandidate(name.to_string()))?;
                r.push(CandidateId(id));
            }
            rankings.push(r);
        }
        Self::from_rankings(labels, rankings)
    }

    /// Skips validation; callers guarantee the ballots are permutations.
    pub(crate) fn from_parts_unchecked(labels: Vec<String>, ballots: Vec<CandidateId>) -> Self {
        debug_assert!(!labels.is_empty() && ballots.len().is_multiple_of(labels.len()));
        Self { labels, ballots }
    }

    pub fn num_candidates(&self) -> usize {
        self.labels.len()
    }

    pub fn num_voters(&self) -> usize {
        self.ballots.len() / self.labels.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, c: CandidateId) -> &str {
        &self.labels[c.0]
    }

    pub fn candidates(&self) -> impl Iterator<Item = CandidateId> {
        (0..self.labels.len()).map(CandidateId)
    }

    pub fn candidate(&self, label: &str) -> Result<CandidateId> {
        self.labels
            .iter()
            .position(|l| l == label)
            .map(CandidateId)
            .ok_or_else(|| Error::UnknownCandidate(label.to_string()))
    }

    pub fn check_candidate(&self, c: CandidateId) -> Result<()> {
        if c.0 < self.labels.len() {
            Ok(())
        } else {
            Err(Error::UnknownCandidate(c.to_string()))
        }
    }

    pub fn vote(&self, voter: usize) -> &[CandidateId] {
        let m = self.labels.len();
        &self.ballots[voter * m..(voter + 1) * m]
    }

    pub fn votes(&self) -> impl Iterator<Item = &[CandidateId]> {
        self.ballots.chunks(self.labels.len())
    }

    pub(crate) fn ballots(&self) -> &[CandidateId] {
        &self.ballots
    }

    /// The election with every ballot reversed.
    pub fn reversed(&self) -> Election {
        let ballots = self
            .votes()
            .flat_map(|v| v.iter().rev().copied())
            .collect();
        Self::from_parts_unchecked(self.labels.clone(), ballots)
    }
}

/// `W(c, a)`: number of voters ranking `c` above `a`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PairwiseMatrix {
    m: usize,
    n: usize,
    wins: Vec<u32>,
}

impl PairwiseMatrix {
    pub fn get(&self, c: CandidateId, a: CandidateId) -> u32 {
        self.wins[c.0 * self.m + a.0]
    }

    pub fn num_candidates(&self) -> usize {
        self.m
    }

    pub fn num_voters(&self) -> usize {
        self.n
    }

    /// `W(c,a) - W(a,c)`.
    pub fn margin(&self, c: CandidateId, a: CandidateId) -> i64 {
        self.get(c, a) as i64 - self.get(a, c) as i64
    }

    pub fn beats(&self, c: CandidateId, a: CandidateId) -> bool {
        self.get(c, a) > self.get(a, c)
    }
}

pub fn pairwise_matrix(e: &Election) -> PairwiseMatrix {
    let m = e.num_candidates();
    let mut wins = vec![0u32; m * m];
    fill_pairwise(e.ballots.as_slice(), m, &mut wins);
    PairwiseMatrix {
        m,
        n: e.num_voters(),
        wins,
    }
}

pub(crate) fn fill_pairwise(ballots: &[CandidateId], m: usize, wins: &mut [u32]) {
    wins.iter_mut().for_each(|w| *w = 0);
    for vote in ballots.chunks(m) {
        for (p, &hi) in vote.iter().enumerate() {
            let row = hi.0 * m;
            for &lo in &vote[p + 1..] {
                wins[row + lo.0] += 1;
            }
        }
    }
}

/// True iff every other candidate is ranked below `c` by at least one voter.
pub fn is_pareto_undominated(e: &Election, c: CandidateId) -> Result<bool> {
    e.check_candidate(c)?;
    let w = pairwise_matrix(e);
    Ok(e.candidates().filter(|&a| a != c).all(|a| w.get(c, a) >= 1))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct CondorcetStatus {
    pub winner: Option<CandidateId>,
    pub loser: Option<CandidateId>,
}

pub fn condorcet_status(e: &Election) -> CondorcetStatus {
    let w = pairwise_matrix(e);
    let find = |pred: &dyn Fn(CandidateId, CandidateId) -> bool| {
        e.candidates()
            .find(|&c| e.candidates().filter(|&a| a != c).all(|a| pred(c, a)))
    };
    CondorcetStatus {
        winner: find(&|c, a| w.beats(c, a)),
        loser: find(&|c, a| w.beats(a, c)),
    }
}
