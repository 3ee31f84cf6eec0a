//! Costs of cloning, budgets, and the budgeted decision procedure.

use crate::analyzers::{self, AnalyzeOptions, Strategy, Verdict};
use crate::cloning::{CloningVector, SuccessMode};
use crate::election::{CandidateId, Election};
use crate::error::{Error, Result};
use crate::oracle::{brute_force_search, min_cost_with_extra, OracleOutcome, SearchCaps};
use crate::rules::{winners, Rule};
use serde::{Serialize, Serializer};
use std::fmt;
use std::ops::Add;

/// A nonnegative cost, possibly infinite. `Finite(_) < Infinite`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Cost {
    Finite(u64),
    Infinite,
}

impl Cost {
    pub const ZERO: Cost = Cost::Finite(0);
}

impl Add for Cost {
    type Output = Cost;

    fn add(self, rhs: Cost) -> Cost {
        match (self, rhs) {
            (Cost::Finite(a), Cost::Finite(b)) => a.checked_add(b).map_or(Cost::Infinite, Cost::Finite),
            _ => Cost::Infinite,
        }
    }
}

impl fmt::Display for Cost {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Cost::Finite(x) => write!(f, "{x}"),
            Cost::Infinite => f.write_str("inf"),
        }
    }
}

impl std::str::FromStr for Cost {
    type Err = Error;

    fn from_str(s: &str) -> Result<Cost> {
        match s.trim() {
            "inf" | "infinity" => Ok(Cost::Infinite),
            t => t
                .parse::<u64>()
                .map(Cost::Finite)
                .map_err(|_| Error::InvalidCost(format!("{s:?} is not a nonnegative integer or inf"))),
        }
    }
}

impl Serialize for Cost {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Cost::Finite(x) => s.serialize_u64(*x),
            Cost::Infinite => s.serialize_str("inf"),
        }
    }
}

/// The most a manipulator is willing to spend.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(transparent)]
pub struct Budget(pub Cost);

impl Budget {
    pub const UNLIMITED: Budget = Budget(Cost::Infinite);

    pub fn finite(b: u64) -> Self {
        Budget(Cost::Finite(b))
    }

    /// Infinite costs are never affordable, even on an unlimited budget.
    pub fn allows(self, c: Cost) -> bool {
        c != Cost::Infinite && c <= self.0
    }
}

/// Marginal costs `p(i, j)` of the `j`-th copy of candidate `i` for
/// `j = 2..=t`; copies beyond `t` cost `p(i, t)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CostTable {
    t: usize,
    rows: Vec<Vec<Cost>>,
}

impl CostTable {
    /// `rows[i]` lists `p(i,2), ..., p(i,t)`.
    pub fn new(t: usize, rows: Vec<Vec<Cost>>) -> Result<Self> {
        if t < 2 {
            return Err(Error::InvalidCost(format!("t must be at least 2, got {t}")));
        }
        if let Some(i) = rows.iter().position(|r| r.len() != t - 1) {
            return Err(Error::InvalidCost(format!("row {i} needs {} entries", t - 1)));
        }
        Ok(Self { t, rows })
    }

    pub fn t(&self) -> usize {
        self.t
    }

    pub fn rows(&self) -> &[Vec<Cost>] {
        &self.rows
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CostFunction {
    ZeroCost,
    UnitCost,
    General(CostTable),
}

impl CostFunction {
    /// `p(i, j)`; the first copy is free.
    pub fn marginal(&self, i: CandidateId, j: usize) -> Cost {
        if j <= 1 {
            return Cost::ZERO;
        }
        match self {
            CostFunction::ZeroCost => Cost::ZERO,
            CostFunction::UnitCost => Cost::Finite(1),
            CostFunction::General(tab) => tab.rows[i.0][j.min(tab.t) - 2],
        }
    }

    fn check(&self, m: usize) -> Result<()> {
        match self {
            CostFunction::General(tab) if tab.rows.len() != m => Err(Error::InvalidCost(format!(
                "table has {} rows, election has {m} candidates",
                tab.rows.len()
            ))),
            _ => Ok(()),
        }
    }
}

/// `sum_j sum_{s=2..k_j} p(j, min(s, t))`.
pub fn cost_of(p: &CostFunction, v: &CloningVector) -> Result<Cost> {
    p.check(v.len())?;
    let mut total = Cost::ZERO;
    for (j, &k) in v.as_slice().iter().enumerate() {
        for s in 2..=k {
            total = total + p.marginal(CandidateId(j), s);
        }
    }
    Ok(total)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Decision {
    Yes {
        strategy: Strategy,
        cost: Cost,
        /// No cheaper strategy exists.
        minimal: bool,
    },
    No {
        reason: String,
    },
    Inconclusive(String),
}

impl Decision {
    pub fn is_yes(&self) -> bool {
        matches!(self, Decision::Yes { .. })
    }

    pub fn is_no(&self) -> bool {
        matches!(self, Decision::No { .. })
    }
}

/// Rules, modes and cost functions for which the analyzer's vector is a
/// cheapest strategy.
fn analyzer_is_optimal(r: Rule, mode: SuccessMode, p: &CostFunction) -> bool {
    let simple = matches!(p, CostFunction::ZeroCost | CostFunction::UnitCost);
    match (r, mode) {
        (Rule::Plurality | Rule::Maximin, SuccessMode::ZeroPlus) => true,
        (Rule::Veto, SuccessMode::ZeroPlus | SuccessMode::One) => true,
        (Rule::PluralityRunoff | Rule::Borda, SuccessMode::ZeroPlus) => simple,
        _ => false,
    }
}

/// Is there a cloning that succeeds in `mode` and costs at most `b`?
///
/// Derivable answers come first: an already winning candidate and negative
/// analyzer verdicts give `No`; an analyzer strategy within budget gives
/// `Yes`; where the analyzer's strategy is a cheapest one, exceeding the
/// budget gives `No`. Everything else goes to the brute-force oracle, whose
/// negative answer is final only when every vector beyond its caps costs more
/// than `b`.
pub fn decide_q_cloning(
    e: &Election,
    r: Rule,
    c: CandidateId,
    mode: SuccessMode,
    p: &CostFunction,
    b: Budget,
    caps: SearchCaps,
) -> Result<Decision> {
    e.check_candidate(c)?;
    p.check(e.num_candidates())?;
    if winners(e, r).contains(&c) {
        return Ok(Decision::No {
            reason: format!("{} already wins", e.label(c)),
        });
    }
    // Negative analyzer verdicts hold for every mode and every budget.
    let rep = analyzers::analyze(e, r, c, mode, &AnalyzeOptions::default())?;
    if rep.verdict == Verdict::NotManipulable {
        return Ok(Decision::No {
            reason: rep.violated.clone().unwrap_or_default(),
        });
    }
    if rep.verdict == Verdict::Manipulable {
        let optimal = analyzer_is_optimal(r, mode, p) && rep.minimal;
        let mut best: Option<(Cost, &Strategy)> = None;
        for s in &rep.strategies {
            let cost = cost_of(p, &s.vector)?;
            if best.is_none_or(|(bc, _)| cost < bc) {
                best = Some((cost, s));
            }
        }
        if let Some((cost, s)) = best {
            if b.allows(cost) {
                return Ok(Decision::Yes {
                    strategy: s.clone(),
                    cost,
                    minimal: optimal,
                });
            }
            if optimal {
                return Ok(Decision::No {
                    reason: format!("cheapest strategy costs {cost}, budget is {}", b.0),
                });
            }
        }
    }
    match brute_force_search(e, r, c, mode, p, b, caps)? {
        OracleOutcome::Yes {
            vector,
            cost,
            certificate,
            minimal,
        } => Ok(Decision::Yes {
            strategy: Strategy {
                vector,
                mode,
                certificate,
                note: "exhaustive search".into(),
            },
            cost,
            minimal,
        }),
        OracleOutcome::NotApplicable => Ok(Decision::No {
            reason: format!("{} already wins", e.label(c)),
        }),
        OracleOutcome::No { .. } => {
            let beyond = min_cost_with_extra(p, e.num_candidates(), caps.max_extra_clones + 1)?;
            if !b.allows(beyond) {
                Ok(Decision::No {
                    reason: format!(
                        "no strategy with at most {} extra clones, and more cost at least {beyond}",
                        caps.max_extra_clones
                    ),
                })
            } else {
                Ok(Decision::Inconclusive(format!(
                    "no strategy with at most {} extra clones",
                    caps.max_extra_clones
                )))
            }
        }
        OracleOutcome::CapExceeded { skipped } => Ok(Decision::Inconclusive(format!(
            "{skipped} vectors exceeded the assignment cap"
        ))),
    }
}
