//! Winner determination for the seven rules under the non-unique winner model.

use crate::election::{fill_pairwise, CandidateId, Election};
use crate::error::{Error, Result};
use serde::{Serialize, Serializer};
use std::collections::BTreeSet;
use std::fmt;
use std::num::NonZeroUsize;
use std::str::FromStr;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Rule {
    Plurality,
    Veto,
    Borda,
    KApproval(NonZeroUsize),
    PluralityRunoff,
    Maximin,
    Copeland,
}

impl Rule {
    pub fn k_approval(k: usize) -> Result<Rule> {
        NonZeroUsize::new(k)
            .map(Rule::KApproval)
            .ok_or(Error::InvalidApprovalWidth)
    }

    pub fn is_score_based(self) -> bool {
        !matches!(self, Rule::PluralityRunoff)
    }

    /// Parses a rule name; `k` is required for k-approval and ignored otherwise.
    pub fn parse(name: &str, k: Option<usize>) -> Result<Rule> {
        let lower = name.to_ascii_lowercase();
        Ok(match lower.as_str() {
            "plurality" => Rule::Plurality,
            "veto" => Rule::Veto,
            "borda" => Rule::Borda,
            "kapproval" | "k-approval" | "approval" => {
                Rule::k_approval(k.ok_or_else(|| Error::Unsupported("k-approval needs --k".into()))?)?
            }
            "runoff" | "plurality-runoff" | "plurality-with-runoff" => Rule::PluralityRunoff,
            "maximin" => Rule::Maximin,
            "copeland" => Rule::Copeland,
            other => return Err(Error::Unsupported(format!("unknown rule {other:?}"))),
        })
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Rule::Plurality => f.write_str("plurality"),
            Rule::Veto => f.write_str("veto"),
            Rule::Borda => f.write_str("borda"),
            Rule::KApproval(k) => write!(f, "{k}-approval"),
            Rule::PluralityRunoff => f.write_str("runoff"),
            Rule::Maximin => f.write_str("maximin"),
            Rule::Copeland => f.write_str("copeland"),
        }
    }
}

impl FromStr for Rule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Rule> {
        if let Some(k) = s.strip_suffix("-approval") {
            if let Ok(k) = k.parse::<usize>() {
                return Rule::k_approval(k);
            }
        }
        Rule::parse(s, None)
    }
}

impl Serialize for Rule {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ScoreTable {
    pub rule: Rule,
    pub scores: Vec<i64>,
}

impl ScoreTable {
    pub fn get(&self, c: CandidateId) -> i64 {
        self.scores[c.0]
    }

    pub fn max(&self) -> i64 {
        self.scores.iter().copied().max().unwrap_or(0)
    }
}

pub fn scores(e: &Election, r: Rule) -> Result<ScoreTable> {
    if !r.is_score_based() {
        return Err(Error::NotScoreBased(r.to_string()));
    }
    let mut ev = RuleEvaluator::default();
    ev.compute_scores(flat(e), e.num_candidates(), r);
    Ok(ScoreTable {
        rule: r,
        scores: ev.scores,
    })
}

pub fn winners(e: &Election, r: Rule) -> BTreeSet<CandidateId> {
    let mut ev = RuleEvaluator::default();
    collect(ev.winner_flags(flat(e), e.num_candidates(), r))
}

/// Plurality with runoff under parallel-universe tie-breaking.
pub fn runoff_winners(e: &Election) -> BTreeSet<CandidateId> {
    winners(e, Rule::PluralityRunoff)
}

fn collect(flags: &[bool]) -> BTreeSet<CandidateId> {
    flags
        .iter()
        .enumerate()
        .filter(|(_, &w)| w)
        .map(|(i, _)| CandidateId(i))
        .collect()
}

fn flat(e: &Election) -> &[CandidateId] {
    e.ballots()
}

/// Reusable buffers for repeated rule evaluation on same-shaped profiles.
#[derive(Debug, Default, Clone)]
pub(crate) struct RuleEvaluator {
    scores: Vec<i64>,
    wins: Vec<u32>,
    flags: Vec<bool>,
}

impl RuleEvaluator {
    fn compute_pairwise(&mut self, ballots: &[CandidateId], m: usize) {
        self.wins.resize(m * m, 0);
        fill_pairwise(ballots, m, &mut self.wins);
    }

    fn compute_scores(&mut self, ballots: &[CandidateId], m: usize, r: Rule) {
        let n = ballots.len() / m;
        self.scores.clear();
        self.scores.resize(m, 0);
        match r {
            Rule::Plurality => {
                for v in ballots.chunks(m) {
                    self.scores[v[0].0] += 1;
                }
            }
            Rule::Veto => {
                self.scores.iter_mut().for_each(|s| *s = n as i64);
                for v in ballots.chunks(m) {
                    self.scores[v[m - 1].0] -= 1;
                }
            }
            Rule::Borda => {
                for v in ballots.chunks(m) {
                    for (p, c) in v.iter().enumerate() {
                        self.scores[c.0] += (m - 1 - p) as i64;
                    }
                }
            }
            Rule::KApproval(k) => {
                let k = k.get().min(m);
                for v in ballots.chunks(m) {
                    for c in &v[..k] {
                        self.scores[c.0] += 1;
                    }
                }
            }
            Rule::Maximin => {
                self.compute_pairwise(ballots, m);
                for c in 0..m {
                    self.scores[c] = (0..m)
                        .filter(|&a| a != c)
                        .map(|a| self.wins[c * m + a] as i64)
                        .min()
                        .unwrap_or(n as i64);
                }
            }
            Rule::Copeland => {
                self.compute_pairwise(ballots, m);
                for c in 0..m {
                    for a in c + 1..m {
                        let (x, y) = (self.wins[c * m + a], self.wins[a * m + c]);
                        if x > y {
                            self.scores[c] += 1;
                            self.scores[a] -= 1;
                        } else if y > x {
                            self.scores[c] -= 1;
                            self.scores[a] += 1;
                        }
                    }
                }
            }
            Rule::PluralityRunoff => unreachable!("runoff is not score-based"),
        }
    }

    /// Winner indicator per candidate; the returned slice has length `m`.
    pub(crate) fn winner_flags(&mut self, ballots: &[CandidateId], m: usize, r: Rule) -> &[bool] {
        self.flags.clear();
        self.flags.resize(m, false);
        if r == Rule::PluralityRunoff {
            self.runoff(ballots, m);
        } else {
            self.compute_scores(ballots, m, r);
            let best = self.scores.iter().copied().max().unwrap_or(0);
            for (f, &s) in self.flags.iter_mut().zip(&self.scores) {
                *f = s == best;
            }
        }
        &self.flags
    }

    fn runoff(&mut self, ballots: &[CandidateId], m: usize) {
        if m == 1 {
            self.flags[0] = true;
            return;
        }
        let n = ballots.len() / m;
        self.compute_scores(ballots, m, Rule::Plurality);
        self.compute_pairwise(ballots, m);
        // Three best Plurality scores (with their holders) decide which pairs can survive.
        let mut top: [(i64, usize); 3] = [(-1, usize::MAX); 3];
        for (c, &s) in self.scores.iter().enumerate() {
            if s > top[2].0 {
                top[2] = (s, c);
                top.sort_by(|a, b| b.0.cmp(&a.0));
            }
        }
        let best_outside = |x: usize, y: usize| {
            top.iter()
                .find(|&&(_, c)| c != x && c != y && c != usize::MAX)
                .map_or(-1, |&(s, _)| s)
        };
        let need = n.div_ceil(2) as u32;
        for x in 0..m {
            for y in x + 1..m {
                let floor = self.scores[x].min(self.scores[y]);
                if best_outside(x, y) > floor {
                    continue;
                }
                if self.wins[x * m + y] >= need {
                    self.flags[x] = true;
                }
                if self.wins[y * m + x] >= need {
                    self.flags[y] = true;
                }
            }
        }
    }
}
