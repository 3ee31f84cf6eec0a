//! Constructive characterizations of manipulability by cloning, one module
//! per rule, and the report types they share.

mod borda;
mod copeland;
mod kapproval;
mod maximin;
mod plurality;
mod runoff;
mod veto;

pub use borda::{borda_0plus_strategy, borda_adversarial_ordering, borda_clone_c_analysis};
pub use copeland::{copeland_strategy, copeland_strategy_with, CopelandOptions};
pub use kapproval::kapproval_saturate;
pub use maximin::maximin_strategy;
pub use plurality::{plurality_0plus, plurality_q};
pub use runoff::runoff_strategy;
pub use veto::veto_strategy;

use crate::cloning::{CloningVector, OrderingAssignment, SuccessMode};
use crate::election::{CandidateId, Election};
use crate::error::Result;
use crate::rules::{winners, Rule};
use num_rational::Ratio;
use serde::ser::SerializeMap;
use serde::{Serialize, Serializer};
use std::collections::BTreeMap;
use std::fmt;

/// A derived quantity: an exact rational or `+inf`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Quantity {
    Finite(Ratio<i64>),
    Infinite,
}

impl Quantity {
    pub fn int(x: i64) -> Self {
        Quantity::Finite(Ratio::from_integer(x))
    }

    pub fn ratio(p: i64, q: i64) -> Self {
        Quantity::Finite(Ratio::new(p, q))
    }

    pub fn ceil(self) -> Self {
        match self {
            Quantity::Finite(r) => Quantity::Finite(r.ceil()),
            Quantity::Infinite => Quantity::Infinite,
        }
    }

    pub fn floor(self) -> Self {
        match self {
            Quantity::Finite(r) => Quantity::Finite(r.floor()),
            Quantity::Infinite => Quantity::Infinite,
        }
    }

    pub fn as_integer(self) -> Option<i64> {
        match self {
            Quantity::Finite(r) if r.is_integer() => Some(r.to_integer()),
            _ => None,
        }
    }
}

impl fmt::Display for Quantity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Quantity::Finite(r) => write!(f, "{r}"),
            Quantity::Infinite => f.write_str("inf"),
        }
    }
}

impl Serialize for Quantity {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self.as_integer() {
            Some(x) => s.serialize_i64(x),
            None => s.collect_str(self),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    AlreadyWinner,
    Manipulable,
    NotManipulable,
    NecessaryConditionFails,
    Inconclusive,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::AlreadyWinner => "already-winner",
            Verdict::Manipulable => "manipulable",
            Verdict::NotManipulable => "not-manipulable",
            Verdict::NecessaryConditionFails => "necessary-condition-fails",
            Verdict::Inconclusive => "inconclusive",
        })
    }
}

/// Why a strategy is believed to succeed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Certificate {
    /// One ordering assignment under which a clone of the preferred candidate wins.
    Witness(OrderingAssignment),
    /// Success under every ordering assignment, by construction.
    AllOrderings,
    SampledEvidence { seed: u64, samples: u64, successes: u64 },
}

impl Certificate {
    pub fn kind(&self) -> &'static str {
        match self {
            Certificate::Witness(_) => "witness",
            Certificate::AllOrderings => "all-orderings",
            Certificate::SampledEvidence { .. } => "sampled",
        }
    }
}

impl Serialize for Certificate {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut map = s.serialize_map(None)?;
        map.serialize_entry("kind", self.kind())?;
        match self {
            // Clone numbers are 1-based on the wire, matching `label#s`.
            Certificate::Witness(o) => {
                let one_based: Vec<Vec<Vec<usize>>> = o
                    .perms()
                    .iter()
                    .map(|row| row.iter().map(|p| p.iter().map(|x| x + 1).collect()).collect())
                    .collect();
                map.serialize_entry("orderings", &one_based)?;
            }
            Certificate::AllOrderings => {}
            Certificate::SampledEvidence { seed, samples, successes } => {
                map.serialize_entry("seed", seed)?;
                map.serialize_entry("samples", samples)?;
                map.serialize_entry("successes", successes)?;
            }
        }
        map.end()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Strategy {
    pub vector: CloningVector,
    pub mode: SuccessMode,
    pub certificate: Certificate,
    /// Which construction produced the strategy.
    pub note: String,
}

impl Strategy {
    pub fn extra_clones(&self) -> usize {
        self.vector.extra_clones()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AnalysisReport {
    pub rule: Rule,
    pub preferred: CandidateId,
    pub verdict: Verdict,
    pub derived: BTreeMap<String, Quantity>,
    /// Cheapest (fewest extra clones) first.
    pub strategies: Vec<Strategy>,
    /// Set on negative verdicts: the condition that fails.
    pub violated: Option<String>,
    /// Set when no strategy with fewer extra clones exists for this mode.
    pub minimal: bool,
    /// Set on inconclusive verdicts.
    pub reason: Option<String>,
}

impl AnalysisReport {
    pub(crate) fn new(rule: Rule, preferred: CandidateId) -> Self {
        Self {
            rule,
            preferred,
            verdict: Verdict::Inconclusive,
            derived: BTreeMap::new(),
            strategies: vec![],
            violated: None,
            minimal: false,
            reason: None,
        }
    }

    pub fn best(&self) -> Option<&Strategy> {
        self.strategies.first()
    }

    pub(crate) fn set(&mut self, key: impl Into<String>, q: Quantity) {
        self.derived.insert(key.into(), q);
    }

    pub(crate) fn fail(mut self, condition: impl Into<String>) -> Self {
        self.verdict = Verdict::NotManipulable;
        self.violated = Some(condition.into());
        self
    }

    pub(crate) fn inconclusive(mut self, reason: impl Into<String>) -> Self {
        self.verdict = Verdict::Inconclusive;
        self.reason = Some(reason.into());
        self
    }

    pub(crate) fn succeed(mut self, mut strategies: Vec<Strategy>) -> Self {
        strategies.sort_by_key(|s| s.extra_clones());
        self.verdict = Verdict::Manipulable;
        self.strategies = strategies;
        self
    }
}

/// Starts a report, or returns the finished one when `c` already wins.
pub(crate) fn start(e: &Election, rule: Rule, c: CandidateId) -> Result<std::result::Result<AnalysisReport, AnalysisReport>> {
    e.check_candidate(c)?;
    let mut rep = AnalysisReport::new(rule, c);
    if winners(e, rule).contains(&c) {
        rep.verdict = Verdict::AlreadyWinner;
        return Ok(Err(rep));
    }
    Ok(Ok(rep))
}

pub(crate) fn ceil_div(a: i64, b: i64) -> i64 {
    (a + b - 1).div_euclid(b)
}

/// Among voters ranking `a` first, the `t`-th (0-based) puts clone `t / group`
/// on top and keeps the remaining clones in increasing order.
pub(crate) fn split_top_voters(e: &Election, a: CandidateId, group: usize, k: usize, o: &mut OrderingAssignment) {
    let tops = (0..e.num_voters()).filter(|&i| e.vote(i)[0] == a);
    for (t, i) in tops.enumerate() {
        let g = t / group;
        debug_assert!(g < k);
        let mut perm = vec![g];
        perm.extend((0..k).filter(|&x| x != g));
        o.set(i, a, perm);
    }
}

pub(crate) fn key(name: &str, e: &Election, a: CandidateId) -> String {
    format!("{name}({})", e.label(a))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AnalyzeOptions {
    /// Borda: restrict the analysis to cloning the preferred candidate.
    pub clone_preferred_only: bool,
    /// Samples drawn when a strategy is backed by sampled evidence.
    pub samples: u64,
    pub seed: u64,
    pub copeland: CopelandOptions,
}

impl Default for AnalyzeOptions {
    fn default() -> Self {
        Self {
            clone_preferred_only: false,
            samples: 1000,
            seed: 0,
            copeland: CopelandOptions::default(),
        }
    }
}

/// Runs the analyzer that fits `rule` and `mode`.
///
/// A negative 0⁺ answer is also negative for every stronger mode; modes an
/// analyzer has no construction for come back inconclusive.
pub fn analyze(e: &Election, rule: Rule, c: CandidateId, mode: SuccessMode, opts: &AnalyzeOptions) -> Result<AnalysisReport> {
    use SuccessMode::*;
    Ok(match (rule, mode) {
        (Rule::Plurality, ZeroPlus) => plurality_0plus(e, c)?,
        (Rule::Plurality, _) => plurality_q(e, c, mode, opts)?,
        (Rule::Veto, ZeroPlus) => veto_strategy(e, c, ZeroPlus)?,
        (Rule::Veto, _) => veto_strategy(e, c, One)?,
        (Rule::PluralityRunoff, _) => runoff_strategy(e, c, mode, opts)?,
        (Rule::Maximin, ZeroPlus | One) => maximin_strategy(e, c, mode)?,
        (Rule::Maximin, Threshold(_)) => {
            let base = maximin_strategy(e, c, ZeroPlus)?;
            weaken(base, "no threshold construction for maximin")
        }
        (Rule::Borda, _) if opts.clone_preferred_only => borda_clone_c_analysis(e, c)?,
        (Rule::Borda, ZeroPlus) => borda_0plus_strategy(e, c)?,
        (Rule::Borda, _) => {
            let base = borda_0plus_strategy(e, c)?;
            if base.verdict != Verdict::Manipulable {
                base
            } else {
                let only_c = borda_clone_c_analysis(e, c)?;
                match only_c.verdict {
                    Verdict::Manipulable => only_c,
                    _ => only_c.inconclusive("cloning the preferred candidate alone does not settle this mode"),
                }
            }
        }
        (Rule::KApproval(k), ZeroPlus) => kapproval_saturate(e, c, k.get())?,
        (Rule::KApproval(k), _) => {
            let base = kapproval_saturate(e, c, k.get())?;
            weaken(base, "no construction for this mode under k-approval")
        }
        (Rule::Copeland, _) => {
            let base = copeland_strategy_with(e, c, &opts.copeland)?;
            let all_orderings = base
                .best()
                .is_some_and(|s| s.certificate == Certificate::AllOrderings);
            if mode == ZeroPlus || base.verdict != Verdict::Manipulable || all_orderings {
                base
            } else {
                weaken(base, "the construction only guarantees success for some orderings")
            }
        }
    })
}

/// Keeps negative and already-winner verdicts, demotes positive ones.
fn weaken(rep: AnalysisReport, reason: &str) -> AnalysisReport {
    match rep.verdict {
        Verdict::Manipulable => {
            let mut r = rep.inconclusive(reason);
            r.strategies.clear();
            r.minimal = false;
            r
        }
        _ => rep,
    }
}
