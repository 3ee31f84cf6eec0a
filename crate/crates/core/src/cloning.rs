//! Cloning mechanics: expanding an election, exhaustive ordering checks and
//! Monte Carlo estimation of success probabilities.

use crate::election::{CandidateId, Election};
use crate::error::{Error, Result};
use crate::rules::{winners, Rule, RuleEvaluator};
use num_rational::Ratio;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use std::fmt;
use std::ops::Range;

/// Clone multiplicities `k_j >= 1`, one per original candidate.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(transparent)]
pub struct CloningVector(Vec<usize>);

impl CloningVector {
    pub fn new(k: Vec<usize>) -> Result<Self> {
        if k.is_empty() {
            return Err(Error::InvalidVector("empty vector".into()));
        }
        if let Some(j) = k.iter().position(|&x| x == 0) {
            return Err(Error::InvalidVector(format!("entry {j} is zero")));
        }
        Ok(Self(k))
    }

    /// The no-op vector: every candidate kept once.
    pub fn ones(m: usize) -> Self {
        Self(vec![1; m])
    }

    /// Starts from all ones and sets the listed multiplicities.
    pub fn with(m: usize, entries: &[(CandidateId, usize)]) -> Result<Self> {
        let mut k = vec![1; m];
        for &(c, x) in entries {
            if c.0 >= m {
                return Err(Error::InvalidVector(format!("candidate {c} out of range")));
            }
            k[c.0] = x;
        }
        Self::new(k)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, c: CandidateId) -> usize {
        self.0[c.0]
    }

    pub fn set(&mut self, c: CandidateId, k: usize) {
        assert!(k >= 1, "clone multiplicity must be positive");
        self.0[c.0] = k;
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    /// Total number of candidates after cloning.
    pub fn total(&self) -> usize {
        self.0.iter().sum()
    }

    /// `sum(k_j - 1)`.
    pub fn extra_clones(&self) -> usize {
        self.total() - self.0.len()
    }

    /// Families with at least two clones.
    pub fn cloned(&self) -> impl Iterator<Item = CandidateId> + '_ {
        self.0
            .iter()
            .enumerate()
            .filter(|(_, &k)| k >= 2)
            .map(|(j, _)| CandidateId(j))
    }

    /// `prod_j k_j!`, saturating: the number of ways one voter can order its clones.
    pub fn orderings_per_voter(&self) -> u128 {
        self.0
            .iter()
            .fold(1u128, |acc, &k| acc.saturating_mul(factorial(k)))
    }

    fn check_len(&self, m: usize) -> Result<()> {
        if self.0.len() != m {
            return Err(Error::InvalidVector(format!(
                "vector has {} entries, election has {m} candidates",
                self.0.len()
            )));
        }
        Ok(())
    }
}

impl fmt::Display for CloningVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|k| k.to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}

fn factorial(k: usize) -> u128 {
    (2..=k as u128).fold(1u128, |acc, x| acc.saturating_mul(x))
}

fn binomial(n: u128, k: u128) -> u128 {
    let k = k.min(n.saturating_sub(k));
    let mut acc: u128 = 1;
    for i in 0..k {
        // acc * (n - i) / (i + 1) stays integral at every step.
        acc = match acc.checked_mul(n - i) {
            Some(x) => x / (i + 1),
            None => return u128::MAX,
        };
    }
    acc
}

/// Per voter and per candidate, the order of that candidate's clones, best
/// first, as 0-based clone indices. Uncloned candidates carry `[0]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct OrderingAssignment {
    perms: Vec<Vec<Vec<usize>>>,
}

impl OrderingAssignment {
    /// Every voter lists every family in clone order `#1 > #2 > ...`.
    pub fn identity(n: usize, v: &CloningVector) -> Self {
        let row: Vec<Vec<usize>> = v.as_slice().iter().map(|&k| (0..k).collect()).collect();
        Self {
            perms: vec![row; n],
        }
    }

    /// Builds from explicit per-voter, per-candidate permutations (0-based).
    pub fn from_perms(perms: Vec<Vec<Vec<usize>>>) -> Self {
        Self { perms }
    }

    pub fn num_voters(&self) -> usize {
        self.perms.len()
    }

    pub fn get(&self, voter: usize, family: CandidateId) -> &[usize] {
        &self.perms[voter][family.0]
    }

    pub fn set(&mut self, voter: usize, family: CandidateId, perm: Vec<usize>) {
        self.perms[voter][family.0] = perm;
    }

    pub fn perms(&self) -> &[Vec<Vec<usize>>] {
        &self.perms
    }

    fn validate(&self, n: usize, v: &CloningVector) -> Result<()> {
        if self.perms.len() != n {
            return Err(Error::MalformedAssignment(format!(
                "{} voters in assignment, {n} in election",
                self.perms.len()
            )));
        }
        for (i, row) in self.perms.iter().enumerate() {
            if row.len() != v.len() {
                return Err(Error::MalformedAssignment(format!(
                    "voter {i} lists {} families, expected {}",
                    row.len(),
                    v.len()
                )));
            }
            for (j, p) in row.iter().enumerate() {
                let k = v.as_slice()[j];
                let mut seen = vec![false; k];
                let ok = p.len() == k
                    && p.iter().all(|&s| s < k && !std::mem::replace(&mut seen[s], true));
                if !ok {
                    return Err(Error::MalformedAssignment(format!(
                        "voter {i}, family {j}: {p:?} is not a permutation of {k} clones"
                    )));
                }
            }
        }
        Ok(())
    }
}

/// An election over clones together with the family map.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExpandedElection {
    pub election: Election,
    family: Vec<CandidateId>,
    offsets: Vec<usize>,
}

impl ExpandedElection {
    /// Original candidate a clone descends from.
    pub fn family_of(&self, clone: CandidateId) -> CandidateId {
        self.family[clone.0]
    }

    /// Clone ids of `c`; clone `#s` has id `start + s - 1`.
    pub fn clones_of(&self, c: CandidateId) -> Range<usize> {
        self.offsets[c.0]..self.offsets[c.0 + 1]
    }

    pub fn clone_id(&self, c: CandidateId, s: usize) -> CandidateId {
        CandidateId(self.offsets[c.0] + s)
    }
}

fn offsets(v: &CloningVector) -> Vec<usize> {
    let mut off = Vec::with_capacity(v.len() + 1);
    off.push(0);
    for &k in v.as_slice() {
        off.push(off.last().unwrap() + k);
    }
    off
}

fn clone_labels(e: &Election, v: &CloningVector) -> Vec<String> {
    e.candidates()
        .flat_map(|c| (1..=v.get(c)).map(move |s| format!("{}#{s}", e.label(c))))
        .collect()
}

/// Replaces every candidate `j` by `k_j` adjacent clones, ordered per `o`.
pub fn apply_cloning(e: &Election, v: &CloningVector, o: &OrderingAssignment) -> Result<ExpandedElection> {
    v.check_len(e.num_candidates())?;
    o.validate(e.num_voters(), v)?;
    let off = offsets(v);
    let mut ballots = Vec::with_capacity(v.total() * e.num_voters());
    for (i, vote) in e.votes().enumerate() {
        for &c in vote {
            ballots.extend(o.perms[i][c.0].iter().map(|&s| CandidateId(off[c.0] + s)));
        }
    }
    let family = e
        .candidates()
        .flat_map(|c| std::iter::repeat_n(c, v.get(c)))
        .collect();
    Ok(ExpandedElection {
        election: Election::from_parts_unchecked(clone_labels(e, v), ballots),
        family,
        offsets: off,
    })
}

/// How a cloning must succeed: for some ordering, for all orderings, or with
/// probability at least `q` under uniform independent orderings.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SuccessMode {
    ZeroPlus,
    One,
    Threshold(Ratio<u64>),
}

impl SuccessMode {
    pub fn threshold(q: Ratio<u64>) -> Result<Self> {
        if q > Ratio::from_integer(0) && q < Ratio::from_integer(1) {
            Ok(SuccessMode::Threshold(q))
        } else {
            Err(Error::InvalidThreshold)
        }
    }
}

impl fmt::Display for SuccessMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SuccessMode::ZeroPlus => f.write_str("0plus"),
            SuccessMode::One => f.write_str("1"),
            SuccessMode::Threshold(q) => write!(f, "{q}"),
        }
    }
}

impl Serialize for SuccessMode {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// Result of an exhaustive ordering check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ExactOutcome {
    /// For `ZeroPlus` the witness is the first succeeding assignment; `One`
    /// and `Threshold` successes carry none.
    Success {
        witness: Option<OrderingAssignment>,
        examined: u64,
    },
    /// For `One` the counterexample is the first failing assignment.
    Failure {
        counterexample: Option<OrderingAssignment>,
        examined: u64,
    },
    /// The preferred candidate already wins without cloning.
    NotApplicable(String),
}

impl ExactOutcome {
    pub fn is_success(&self) -> bool {
        matches!(self, ExactOutcome::Success { .. })
    }

    pub fn examined(&self) -> u64 {
        match self {
            ExactOutcome::Success { examined, .. } | ExactOutcome::Failure { examined, .. } => *examined,
            ExactOutcome::NotApplicable(_) => 0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ExactOptions {
    pub limit: u64,
    /// Enumerate one assignment per orbit of clone relabeling and voter
    /// anonymity instead of all `prod(k_j!)^n`.
    pub reduce_symmetry: bool,
}

/// `prod(k_j!)^n`, saturating.
pub fn ordering_space(v: &CloningVector, n: usize) -> u128 {
    let t = v.orderings_per_voter();
    (0..n).fold(1u128, |acc, _| acc.saturating_mul(t))
}

/// Number of canonical assignments visited with symmetry reduction on.
pub fn reduced_ordering_space(e: &Election, v: &CloningVector) -> u128 {
    let t = v.orderings_per_voter();
    if t == 1 {
        return 1;
    }
    let mut acc: u128 = 1;
    for (idx, size) in voter_classes(e).into_iter().enumerate() {
        let s = size as u128;
        // The class of voter 0 has that voter pinned to the identity.
        let ways = if idx == 0 {
            binomial(t.saturating_add(s) - 2, s - 1)
        } else {
            binomial(t.saturating_add(s - 1), s)
        };
        acc = acc.saturating_mul(ways);
    }
    acc
}

/// Sizes of groups of identical ballots, in order of first appearance.
fn voter_classes(e: &Election) -> Vec<usize> {
    let mut reps: Vec<&[CandidateId]> = vec![];
    let mut sizes = vec![];
    for vote in e.votes() {
        match reps.iter().position(|r| *r == vote) {
            Some(p) => sizes[p] += 1,
            None => {
                reps.push(vote);
                sizes.push(1);
            }
        }
    }
    sizes
}

/// Exhaustive check over all `prod(k_j!)^n` ordering assignments.
pub fn check_success_exact(
    e: &Election,
    r: Rule,
    c: CandidateId,
    v: &CloningVector,
    mode: SuccessMode,
    limit: u64,
) -> Result<ExactOutcome> {
    check_success_exact_with(
        e,
        r,
        c,
        v,
        mode,
        ExactOptions {
            limit,
            reduce_symmetry: false,
        },
    )
}

pub fn check_success_exact_with(
    e: &Election,
    r: Rule,
    c: CandidateId,
    v: &CloningVector,
    mode: SuccessMode,
    opts: ExactOptions,
) -> Result<ExactOutcome> {
    e.check_candidate(c)?;
    v.check_len(e.num_candidates())?;
    if winners(e, r).contains(&c) {
        return Ok(ExactOutcome::NotApplicable(format!(
            "{} already wins under {r}",
            e.label(c)
        )));
    }
    // Probabilities need every assignment with its true multiplicity.
    let reduce = opts.reduce_symmetry && !matches!(mode, SuccessMode::Threshold(_));
    let space = if reduce {
        reduced_ordering_space(e, v)
    } else {
        ordering_space(v, e.num_voters())
    };
    if space > opts.limit as u128 {
        return Err(Error::SearchSpaceTooLarge {
            space,
            limit: opts.limit,
        });
    }
    let mut en = Enumerator::new(e, v, r, c, reduce);
    Ok(match mode {
        SuccessMode::ZeroPlus => {
            let mut examined = 0u64;
            let hit = en.run(&mut |ok| {
                examined += 1;
                ok
            });
            if hit {
                ExactOutcome::Success {
                    witness: Some(en.assignment()),
                    examined,
                }
            } else {
                ExactOutcome::Failure {
                    counterexample: None,
                    examined,
                }
            }
        }
        SuccessMode::One => {
            let mut examined = 0u64;
            let miss = en.run(&mut |ok| {
                examined += 1;
                !ok
            });
            if miss {
                ExactOutcome::Failure {
                    counterexample: Some(en.assignment()),
                    examined,
                }
            } else {
                ExactOutcome::Success {
                    witness: None,
                    examined,
                }
            }
        }
        SuccessMode::Threshold(q) => {
            let (mut examined, mut hits) = (0u64, 0u64);
            en.run(&mut |ok| {
                examined += 1;
                hits += ok as u64;
                false
            });
            if Ratio::new(hits, examined) >= q {
                ExactOutcome::Success {
                    witness: None,
                    examined,
                }
            } else {
                ExactOutcome::Failure {
                    counterexample: None,
                    examined,
                }
            }
        }
    })
}

/// Exact fraction of assignments under which a clone of `c` wins.
pub fn exact_success_fraction(
    e: &Election,
    r: Rule,
    c: CandidateId,
    v: &CloningVector,
    limit: u64,
) -> Result<Ratio<u64>> {
    e.check_candidate(c)?;
    v.check_len(e.num_candidates())?;
    let space = ordering_space(v, e.num_voters());
    if space > limit as u128 {
        return Err(Error::SearchSpaceTooLarge { space, limit });
    }
    let mut en = Enumerator::new(e, v, r, c, false);
    let (mut examined, mut hits) = (0u64, 0u64);
    en.run(&mut |ok| {
        examined += 1;
        hits += ok as u64;
        false
    });
    Ok(Ratio::new(hits, examined))
}

/// Does a clone of `c` win the expansion of `e` under `o`?
pub fn clone_wins(e: &Election, r: Rule, c: CandidateId, v: &CloningVector, o: &OrderingAssignment) -> Result<bool> {
    let x = apply_cloning(e, v, o)?;
    let w = winners(&x.election, r);
    Ok(x.clones_of(c).any(|id| w.contains(&CandidateId(id))))
}

#[derive(Debug, Clone, Copy)]
struct Slot {
    voter: usize,
    family: usize,
    pos: usize,
    offset: usize,
    first_of_voter: bool,
    pinned: bool,
    pred: Option<usize>,
}

/// Depth-first walk over (voter, family) slots; each slot steps through its
/// family's permutations in lexicographic order, so leaves are visited in
/// lexicographic order of the whole assignment.
struct Enumerator {
    n: usize,
    m2: usize,
    rule: Rule,
    target: Range<usize>,
    k: Vec<usize>,
    slots: Vec<Slot>,
    perms: Vec<Vec<usize>>,
    ballots: Vec<CandidateId>,
    eval: RuleEvaluator,
}

impl Enumerator {
    fn new(e: &Election, v: &CloningVector, rule: Rule, c: CandidateId, reduce: bool) -> Self {
        let off = offsets(v);
        let m2 = v.total();
        let mut ballots = Vec::with_capacity(m2 * e.num_voters());
        let mut slots = vec![];
        let mut last_same: Vec<Option<usize>> = vec![None; e.num_voters()];
        let votes: Vec<&[CandidateId]> = e.votes().collect();
        let per_voter = v.cloned().count();
        let mut pos = vec![0usize; v.len()];
        for (i, vote) in votes.iter().enumerate() {
            last_same[i] = (0..i).rev().find(|&p| votes[p] == *vote);
            for &a in vote.iter() {
                pos[a.0] = ballots.len();
                ballots.extend((0..v.get(a)).map(|s| CandidateId(off[a.0] + s)));
            }
            for (f, a) in v.cloned().enumerate() {
                slots.push(Slot {
                    voter: i,
                    family: a.0,
                    pos: pos[a.0],
                    offset: off[a.0],
                    first_of_voter: f == 0,
                    pinned: reduce && i == 0,
                    pred: last_same[i].filter(|_| reduce).map(|p| p * per_voter + f),
                });
            }
        }
        let perms = slots.iter().map(|s| (0..v.get(CandidateId(s.family))).collect()).collect();
        Self {
            n: e.num_voters(),
            m2,
            rule,
            target: off[c.0]..off[c.0 + 1],
            k: v.as_slice().to_vec(),
            slots,
            perms,
            ballots,
            eval: RuleEvaluator::default(),
        }
    }

    /// Calls `visit(success)` on each leaf; stops early when it returns true.
    fn run(&mut self, visit: &mut dyn FnMut(bool) -> bool) -> bool {
        self.dfs(0, false, visit)
    }

    fn leaf(&mut self) -> bool {
        let flags = self.eval.winner_flags(&self.ballots, self.m2, self.rule);
        flags[self.target.clone()].iter().any(|&f| f)
    }

    fn write(&mut self, idx: usize) {
        let s = self.slots[idx];
        for (p, &x) in self.perms[idx].iter().enumerate() {
            self.ballots[s.pos + p] = CandidateId(s.offset + x);
        }
    }

    fn dfs(&mut self, idx: usize, eq: bool, visit: &mut dyn FnMut(bool) -> bool) -> bool {
        if idx == self.slots.len() {
            let ok = self.leaf();
            return visit(ok);
        }
        let s = self.slots[idx];
        if s.pinned {
            self.perms[idx].iter_mut().enumerate().for_each(|(p, x)| *x = p);
            self.write(idx);
            return self.dfs(idx + 1, false, visit);
        }
        // While the voter's tuple equals its predecessor's, it may not drop below it.
        let eq_in = if s.first_of_voter { s.pred.is_some() } else { eq };
        let bound = if eq_in { s.pred } else { None };
        match bound {
            Some(p) => {
                let start = self.perms[p].clone();
                self.perms[idx].copy_from_slice(&start);
            }
            None => self.perms[idx].iter_mut().enumerate().for_each(|(p, x)| *x = p),
        }
        loop {
            self.write(idx);
            let eq_out = bound.is_some_and(|p| self.perms[p] == self.perms[idx]);
            if self.dfs(idx + 1, eq_out, visit) {
                return true;
            }
            if !next_permutation(&mut self.perms[idx]) {
                return false;
            }
        }
    }

    /// The assignment at the current leaf.
    fn assignment(&self) -> OrderingAssignment {
        let row: Vec<Vec<usize>> = self.k.iter().map(|&k| (0..k).collect()).collect();
        let mut perms = vec![row; self.n];
        for (s, p) in self.slots.iter().zip(&self.perms) {
            perms[s.voter][s.family] = p.clone();
        }
        OrderingAssignment { perms }
    }
}

/// Advances to the next permutation in lexicographic order; false on wrap.
pub(crate) fn next_permutation(p: &mut [usize]) -> bool {
    if p.len() < 2 {
        return false;
    }
    let mut i = p.len() - 1;
    while i > 0 && p[i - 1] >= p[i] {
        i -= 1;
    }
    if i == 0 {
        p.reverse();
        return false;
    }
    let mut j = p.len() - 1;
    while p[j] <= p[i - 1] {
        j -= 1;
    }
    p.swap(i - 1, j);
    p[i..].reverse();
    true
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Estimate {
    pub successes: u64,
    pub samples: u64,
}

impl Estimate {
    pub fn ratio(&self) -> Ratio<u64> {
        Ratio::new(self.successes, self.samples)
    }

    pub fn value(&self) -> f64 {
        self.successes as f64 / self.samples as f64
    }
}

/// Per-trial generator: ChaCha8 keyed by `seed`, stream selected by the trial index.
pub(crate) fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

/// Monte Carlo estimate of the probability that a clone of `c` wins when
/// every voter orders every family uniformly and independently.
///
/// Trial `t` draws with [`trial_rng`]`(seed, t)`, shuffling voter by voter
/// and, within a voter, family by family in roster order. The result does not
/// depend on the number of worker threads.
pub fn estimate_success_probability(
    e: &Election,
    r: Rule,
    c: CandidateId,
    v: &CloningVector,
    samples: u64,
    seed: u64,
) -> Result<Estimate> {
    e.check_candidate(c)?;
    v.check_len(e.num_candidates())?;
    if samples == 0 {
        return Err(Error::InvalidSize);
    }
    let en = Enumerator::new(e, v, r, c, false);
    let successes = (0..samples)
        .into_par_iter()
        .map_init(
            || (en.ballots.clone(), en.perms.clone(), RuleEvaluator::default()),
            |(ballots, perms, eval), t| {
                let mut rng = trial_rng(seed, t);
                for (s, p) in en.slots.iter().zip(perms.iter_mut()) {
                    p.iter_mut().enumerate().for_each(|(q, x)| *x = q);
                    p.shuffle(&mut rng);
                    for (q, &x) in p.iter().enumerate() {
                        ballots[s.pos + q] = CandidateId(s.offset + x);
                    }
                }
                let flags = eval.winner_flags(ballots, en.m2, en.rule);
                flags[en.target.clone()].iter().any(|&f| f) as u64
            },
        )
        .sum();
    Ok(Estimate { successes, samples })
}
