//! Brute-force reference search over cloning vectors and ordering
//! assignments, and the random-profile experiment for cloning under Plurality
//! with a fixed winner.

use crate::analyzers::Certificate;
use crate::cloning::{
    check_success_exact_with, clone_wins, trial_rng, CloningVector, ExactOptions, ExactOutcome, OrderingAssignment, SuccessMode,
};
use crate::cost::{cost_of, Budget, Cost, CostFunction};
use crate::election::{CandidateId, Election};
use crate::error::{Error, Result};
use crate::rules::Rule;
use rand::seq::SliceRandom;
use rayon::prelude::*;
use serde::Serialize;
use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

/// Bounds on the brute-force search.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SearchCaps {
    /// Vectors with more than this many extra clones are never tried.
    pub max_extra_clones: usize,
    /// Vectors whose (symmetry-reduced) ordering space exceeds this are skipped.
    pub max_assignments: u64,
}

impl Default for SearchCaps {
    fn default() -> Self {
        Self {
            max_extra_clones: 4,
            max_assignments: 1_000_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum OracleOutcome {
    Yes {
        vector: CloningVector,
        cost: Cost,
        certificate: Certificate,
        /// Every cheaper vector within the caps was fully checked.
        minimal: bool,
    },
    /// Every affordable vector within the caps was fully checked and fails.
    No { vectors_checked: usize },
    /// The preferred candidate already wins.
    NotApplicable,
    /// Nothing found, but some vectors were too large to check.
    CapExceeded { skipped: usize },
}

/// All vectors of length `m` with at most `cap` extra clones.
fn vectors_within(m: usize, cap: usize) -> Vec<CloningVector> {
    fn rec(j: usize, left: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if j == cur.len() {
            out.push(cur.clone());
            return;
        }
        for x in 0..=left {
            cur[j] = x + 1;
            rec(j + 1, left - x, cur, out);
        }
    }
    let mut out = vec![];
    rec(0, cap, &mut vec![1; m], &mut out);
    out.into_iter()
        .map(|k| CloningVector::new(k).expect("entries are positive"))
        .collect()
}

/// Searches vectors in order of cost, then extra clones, then
/// lexicographically, checking each exhaustively with symmetry reduction.
///
/// Threshold modes count every assignment with its multiplicity, so the
/// reduction is off for them.
pub fn brute_force_search(
    e: &Election,
    r: Rule,
    c: CandidateId,
    mode: SuccessMode,
    p: &CostFunction,
    b: Budget,
    caps: SearchCaps,
) -> Result<OracleOutcome> {
    e.check_candidate(c)?;
    let mut cands: Vec<(Cost, usize, CloningVector)> = vec![];
    for v in vectors_within(e.num_candidates(), caps.max_extra_clones) {
        let cost = cost_of(p, &v)?;
        if b.allows(cost) {
            cands.push((cost, v.extra_clones(), v));
        }
    }
    cands.sort_by(|x, y| (x.0, x.1, x.2.as_slice()).cmp(&(y.0, y.1, y.2.as_slice())));
    let opts = ExactOptions {
        limit: caps.max_assignments,
        reduce_symmetry: true,
    };
    let mut skipped_below: Option<Cost> = None;
    let mut skipped = 0;
    let exact_mode = !matches!(mode, SuccessMode::Threshold(_));
    let pairwise = matches!(r, Rule::Copeland | Rule::Maximin) && exact_mode;
    let positional = matches!(r, Rule::Plurality | Rule::Veto | Rule::Borda | Rule::KApproval(_)) && exact_mode;
    let mut tallies = TallyCache::new(e.num_voters(), caps.max_assignments);
    for (cost, _, v) in &cands {
        let checked = if pairwise {
            check_pairwise(e, r, c, v, mode, &mut tallies)
        } else if positional {
            check_positional(e, r, c, v, mode, caps.max_assignments)
        } else {
            check_success_exact_with(e, r, c, v, mode, opts)
        };
        let out = match checked {
            Ok(out) => out,
            Err(Error::SearchSpaceTooLarge { .. }) => {
                skipped += 1;
                skipped_below.get_or_insert(*cost);
                continue;
            }
            Err(err) => return Err(err),
        };
        match out {
            ExactOutcome::NotApplicable(_) => return Ok(OracleOutcome::NotApplicable),
            ExactOutcome::Success { witness, .. } => {
                let certificate = match witness {
                    Some(o) => Certificate::Witness(o),
                    None => Certificate::AllOrderings,
                };
                return Ok(OracleOutcome::Yes {
                    vector: v.clone(),
                    cost: *cost,
                    certificate,
                    minimal: skipped_below.is_none_or(|s| s >= *cost),
                });
            }
            ExactOutcome::Failure { .. } => {}
        }
    }
    if crate::rules::winners(e, r).contains(&c) {
        return Ok(OracleOutcome::NotApplicable);
    }
    Ok(if skipped > 0 {
        OracleOutcome::CapExceeded { skipped }
    } else {
        OracleOutcome::No {
            vectors_checked: cands.len(),
        }
    })
}

/// Reachable intra-family tallies of a family of `k` clones, layer by layer
/// over voters, one representative per relabeling of the clones.
///
/// A tally counts, for every pair `s < t` of clones, the voters putting `s`
/// above `t`; it is packed into a `u64`, `bits` per pair. Tallies depend only
/// on `k` and the number of voters, and every score computed from them is
/// invariant under relabeling, so only the least relabeled form is kept.
/// Entries remember their parent, the permutation added and the relabeling
/// applied, which is enough to trace concrete orderings back.
struct FamilyTallies {
    k: usize,
    bits: u32,
    pairs: Vec<(usize, usize)>,
    perms: Vec<Vec<usize>>,
    /// `relabel[r][x]` is the new name of clone `x` under relabeling `r`.
    relabel: Vec<Vec<usize>>,
    layers: Vec<Vec<TallyEntry>>,
}

#[derive(Clone, Copy)]
struct TallyEntry {
    tally: u64,
    parent: u32,
    perm: u32,
    relabel: u32,
}

fn all_perms(k: usize) -> Vec<Vec<usize>> {
    let mut out = vec![];
    let mut p: Vec<usize> = (0..k).collect();
    loop {
        out.push(p.clone());
        if !crate::cloning::next_permutation(&mut p) {
            return out;
        }
    }
}

impl FamilyTallies {
    fn build(k: usize, n: usize, limit: u64) -> Option<Self> {
        let pairs = pair_list(k);
        let bits = usize::BITS - n.leading_zeros();
        if pairs.len() as u32 * bits > 64 {
            return None;
        }
        let perms = all_perms(k);
        let relabel = perms.clone();
        let mut ft = Self {
            k,
            bits,
            pairs,
            perms,
            relabel,
            layers: vec![vec![TallyEntry {
                tally: 0,
                parent: 0,
                perm: 0,
                relabel: 0,
            }]],
        };
        let contrib: Vec<u64> = ft.perms.iter().map(|p| ft.pack_perm(p)).collect();
        for voters in 1..=n {
            let prev = ft.layers.last().expect("nonempty");
            let mut raw = std::collections::HashSet::new();
            let mut seen = std::collections::HashSet::new();
            let mut next = vec![];
            for (pi, entry) in prev.iter().enumerate() {
                for (qi, &add) in contrib.iter().enumerate() {
                    // Fields never carry: each stays at most `voters <= n`.
                    let t = entry.tally + add;
                    if !raw.insert(t) {
                        continue;
                    }
                    let (canon, ri) = ft.canonical(t, voters);
                    if seen.insert(canon) {
                        next.push(TallyEntry {
                            tally: canon,
                            parent: pi as u32,
                            perm: qi as u32,
                            relabel: ri as u32,
                        });
                    }
                }
            }
            if next.len() as u64 > limit {
                return None;
            }
            ft.layers.push(next);
        }
        Some(ft)
    }

    fn field(&self, t: u64, p: usize) -> u64 {
        (t >> (p as u32 * self.bits)) & ((1 << self.bits) - 1)
    }

    fn pack_perm(&self, p: &[usize]) -> u64 {
        let mut at = vec![0; self.k];
        for (i, &x) in p.iter().enumerate() {
            at[x] = i;
        }
        self.pairs
            .iter()
            .enumerate()
            .map(|(i, &(s, t))| ((at[s] < at[t]) as u64) << (i as u32 * self.bits))
            .sum()
    }

    fn pair_index(&self, s: usize, t: usize) -> usize {
        // Pairs are listed row by row: (0,1), (0,2), ..., (1,2), ...
        s * (2 * self.k - s - 1) / 2 + (t - s - 1)
    }

    /// Tally over `voters` voters after renaming clone `x` to `rho[x]`.
    fn apply(&self, t: u64, voters: usize, rho: &[usize]) -> u64 {
        let mut out = 0;
        for (i, &(s, u)) in self.pairs.iter().enumerate() {
            let x = self.field(t, i);
            let (a, b) = (rho[s], rho[u]);
            let (j, val) = if a < b {
                (self.pair_index(a, b), x)
            } else {
                (self.pair_index(b, a), voters as u64 - x)
            };
            out |= val << (j as u32 * self.bits);
        }
        out
    }

    fn canonical(&self, t: u64, voters: usize) -> (u64, usize) {
        self.relabel
            .iter()
            .enumerate()
            .map(|(ri, rho)| (self.apply(t, voters, rho), ri))
            .min()
            .expect("k >= 1")
    }

    fn finals(&self) -> &[TallyEntry] {
        self.layers.last().expect("nonempty")
    }

    /// Counts `over[s][t]` of a final tally.
    fn unpack(&self, t: u64, n: usize) -> Vec<Vec<i64>> {
        let mut over = vec![vec![0i64; self.k]; self.k];
        for (i, &(s, u)) in self.pairs.iter().enumerate() {
            let x = self.field(t, i) as i64;
            over[s][u] = x;
            over[u][s] = n as i64 - x;
        }
        over
    }

    /// Per-voter permutations whose tally is final entry `idx`.
    fn trace(&self, mut idx: usize) -> Vec<Vec<usize>> {
        // Invariant: voters 1..=i sum to mu applied to the stored tally of layer i.
        let mut mu: Vec<usize> = (0..self.k).collect();
        let mut out = vec![];
        for layer in self.layers[1..].iter().rev() {
            let entry = layer[idx];
            let rho = &self.relabel[entry.relabel as usize];
            let composed: Vec<usize> = (0..self.k).map(|x| mu[rho[x]]).collect();
            out.push(self.perms[entry.perm as usize].iter().map(|&x| composed[x]).collect());
            mu = composed;
            idx = entry.parent as usize;
        }
        out.reverse();
        out
    }
}

/// Tallies per clone count for one electorate size; `None` marks a family
/// size whose tally set exceeds the limit. Tallies depend only on the family
/// size, electorate size and limit, so they are shared across searches.
struct TallyCache {
    n: usize,
    limit: u64,
    by_k: HashMap<usize, Option<Arc<FamilyTallies>>>,
}

type SharedTallies = Mutex<HashMap<(usize, usize, u64), Option<Arc<FamilyTallies>>>>;

fn shared_tallies() -> &'static SharedTallies {
    static SHARED: OnceLock<SharedTallies> = OnceLock::new();
    SHARED.get_or_init(Default::default)
}

impl TallyCache {
    fn new(n: usize, limit: u64) -> Self {
        Self {
            n,
            limit,
            by_k: Default::default(),
        }
    }

    fn get(&mut self, k: usize) -> Result<&FamilyTallies> {
        let (n, limit) = (self.n, self.limit);
        self.by_k
            .entry(k)
            .or_insert_with(|| {
                let mut shared = shared_tallies().lock().unwrap_or_else(|p| p.into_inner());
                shared
                    .entry((k, n, limit))
                    .or_insert_with(|| FamilyTallies::build(k, n, limit).map(Arc::new))
                    .clone()
            })
            .as_deref()
            .ok_or(Error::SearchSpaceTooLarge {
                space: limit as u128 + 1,
                limit,
            })
    }
}

fn pair_list(k: usize) -> Vec<(usize, usize)> {
    (0..k).flat_map(|s| (s + 1..k).map(move |t| (s, t))).collect()
}

/// Highest score among a family's clones for one intra-family tally.
///
/// Clones of different families compare exactly as their originals do, so a
/// clone's Copeland score is the family's fixed cross score plus its record
/// inside the family, and its Maximin score is the smaller of the fixed cross
/// minimum and its worst count inside the family.
fn family_top_score(r: Rule, k: usize, cross: i64, over: &[Vec<i64>]) -> i64 {
    (0..k)
        .map(|s| {
            let others = (0..k).filter(move |&t| t != s);
            match r {
                Rule::Copeland => cross + others.map(|t| (over[s][t] - over[t][s]).signum()).sum::<i64>(),
                _ => others.map(|t| over[s][t]).fold(cross, i64::min),
            }
        })
        .max()
        .expect("k >= 1")
}

/// Exact success check for Copeland and Maximin through intra-family
/// tallies instead of full ordering assignments. The cap applies to the
/// number of distinct tallies of one family.
///
/// Families are independent: `c` succeeds for some orderings iff its best
/// achievable top score reaches every rival family's least achievable top
/// score, and for all orderings iff its least reaches every rival's best.
fn check_pairwise(
    e: &Election,
    r: Rule,
    c: CandidateId,
    v: &CloningVector,
    mode: SuccessMode,
    cache: &mut TallyCache,
) -> Result<ExactOutcome> {
    e.check_candidate(c)?;
    if crate::rules::winners(e, r).contains(&c) {
        return Ok(ExactOutcome::NotApplicable(format!("{} already wins under {r}", e.label(c))));
    }
    let (m, n) = (e.num_candidates(), e.num_voters());
    let w = crate::election::pairwise_matrix(e);
    let mut tops_by_family = vec![];
    let mut examined = 0u64;
    for x in e.candidates() {
        let k = v.get(x);
        let rivals = e.candidates().filter(|&y| y != x);
        let cross = match r {
            Rule::Copeland => rivals.map(|y| v.get(y) as i64 * w.margin(x, y).signum()).sum(),
            _ => rivals.map(|y| w.get(x, y) as i64).min().unwrap_or(n as i64),
        };
        let ft = cache.get(k)?;
        let tops: Vec<i64> = ft
            .finals()
            .iter()
            .map(|f| family_top_score(r, k, cross, &ft.unpack(f.tally, n)))
            .collect();
        examined += tops.len() as u64;
        tops_by_family.push(tops);
    }
    let fams = &tops_by_family;
    let argext = |tops: &[i64], best: bool| -> usize {
        let pick = if best { tops.iter().max() } else { tops.iter().min() };
        let val = *pick.expect("nonempty");
        tops.iter().position(|&x| x == val).expect("present")
    };
    Ok(match mode {
        SuccessMode::One => {
            let worst_c = *fams[c.0].iter().min().expect("nonempty");
            let rival = (0..m).filter(|&y| y != c.0).map(|y| *fams[y].iter().max().expect("nonempty")).max();
            if rival.is_none_or(|b| worst_c >= b) {
                ExactOutcome::Success { witness: None, examined }
            } else {
                ExactOutcome::Failure { counterexample: None, examined }
            }
        }
        _ => {
            let choice: Vec<usize> = (0..m).map(|y| argext(&fams[y], y == c.0)).collect();
            let best_c = fams[c.0][choice[c.0]];
            let rival = (0..m).filter(|&y| y != c.0).map(|y| fams[y][choice[y]]).max();
            if rival.is_none_or(|b| best_c >= b) {
                let mut traces: Vec<Vec<Vec<usize>>> = vec![];
                for y in 0..m {
                    traces.push(cache.get(v.get(CandidateId(y)))?.trace(choice[y]));
                }
                let perms = (0..n).map(|i| (0..m).map(|y| traces[y][i].clone()).collect()).collect();
                let o = OrderingAssignment::from_perms(perms);
                assert!(clone_wins(e, r, c, v, &o)?, "tally witness must verify");
                ExactOutcome::Success { witness: Some(o), examined }
            } else {
                ExactOutcome::Failure { counterexample: None, examined }
            }
        }
    })
}

/// Points for expanded position `p` out of `total` under a positional rule.
fn position_weight(r: Rule, p: usize, total: usize) -> i64 {
    match r {
        Rule::Plurality => (p == 0) as i64,
        Rule::Veto => (p + 1 < total) as i64,
        Rule::Borda => (total - 1 - p) as i64,
        Rule::KApproval(k) => (p < k.get()) as i64,
        _ => unreachable!("not positional"),
    }
}

/// Reachable per-clone scores of one family, layer by layer over voters.
///
/// Clones are interchangeable, so each layer keeps score vectors sorted
/// ascending; `relabel` of an entry renames the clones into that order.
struct ScoreLayers {
    k: usize,
    perms: Vec<Vec<usize>>,
    layers: Vec<Vec<ScoreEntry>>,
}

struct ScoreEntry {
    scores: Vec<i64>,
    parent: u32,
    perm: u32,
    relabel: Vec<usize>,
}

impl ScoreLayers {
    /// `weights[i][j]` is what voter `i` gives the clone at family position `j`.
    fn build(weights: &[Vec<i64>], limit: u64) -> Result<Self> {
        let k = weights.first().map_or(1, Vec::len);
        let perms = all_perms(k);
        let mut layers = vec![vec![ScoreEntry {
            scores: vec![0; k],
            parent: 0,
            perm: 0,
            relabel: (0..k).collect(),
        }]];
        for w in weights {
            let prev = layers.last().expect("nonempty");
            let mut seen = std::collections::HashSet::new();
            let mut next = vec![];
            for (pi, entry) in prev.iter().enumerate() {
                for (qi, perm) in perms.iter().enumerate() {
                    let mut t = entry.scores.clone();
                    for (j, &x) in perm.iter().enumerate() {
                        t[x] += w[j];
                    }
                    let mut order: Vec<usize> = (0..k).collect();
                    order.sort_by_key(|&x| (t[x], x));
                    let canon: Vec<i64> = order.iter().map(|&x| t[x]).collect();
                    if !seen.insert(canon.clone()) {
                        continue;
                    }
                    let mut relabel = vec![0; k];
                    for (rank, &x) in order.iter().enumerate() {
                        relabel[x] = rank;
                    }
                    next.push(ScoreEntry {
                        scores: canon,
                        parent: pi as u32,
                        perm: qi as u32,
                        relabel,
                    });
                }
            }
            if next.len() as u64 > limit {
                return Err(Error::SearchSpaceTooLarge {
                    space: next.len() as u128,
                    limit,
                });
            }
            layers.push(next);
        }
        Ok(Self { k, perms, layers })
    }

    fn tops(&self) -> Vec<i64> {
        self.layers.last().expect("nonempty").iter().map(|f| *f.scores.last().expect("k >= 1")).collect()
    }

    /// Per-voter permutations reaching final entry `idx`; same scheme as
    /// [`FamilyTallies::trace`].
    fn trace(&self, mut idx: usize) -> Vec<Vec<usize>> {
        let mut mu: Vec<usize> = (0..self.k).collect();
        let mut out = vec![];
        for layer in self.layers[1..].iter().rev() {
            let entry = &layer[idx];
            let composed: Vec<usize> = (0..self.k).map(|x| mu[entry.relabel[x]]).collect();
            out.push(self.perms[entry.perm as usize].iter().map(|&x| composed[x]).collect());
            mu = composed;
            idx = entry.parent as usize;
        }
        out.reverse();
        out
    }
}

/// Exact success check for positional rules through per-family score
/// vectors. A clone's score depends only on where its family sits in each
/// ballot and on its place inside the family, so families are independent
/// exactly as in [`check_pairwise`]. The cap applies to the number of
/// distinct score vectors of one family.
fn check_positional(e: &Election, r: Rule, c: CandidateId, v: &CloningVector, mode: SuccessMode, limit: u64) -> Result<ExactOutcome> {
    e.check_candidate(c)?;
    if crate::rules::winners(e, r).contains(&c) {
        return Ok(ExactOutcome::NotApplicable(format!("{} already wins under {r}", e.label(c))));
    }
    let (m, n) = (e.num_candidates(), e.num_voters());
    let total = v.total();
    let mut fams = vec![];
    let mut examined = 0u64;
    for x in e.candidates() {
        let k = v.get(x);
        let weights: Vec<Vec<i64>> = e
            .votes()
            .map(|ballot| {
                let start: usize = ballot.iter().take_while(|&&y| y != x).map(|&y| v.get(y)).sum();
                (0..k).map(|j| position_weight(r, start + j, total)).collect()
            })
            .collect();
        let layers = ScoreLayers::build(&weights, limit)?;
        examined += layers.layers.iter().map(|l| l.len() as u64).sum::<u64>();
        fams.push(layers);
    }
    let tops: Vec<Vec<i64>> = fams.iter().map(ScoreLayers::tops).collect();
    let rivals = || (0..m).filter(|&y| y != c.0);
    Ok(match mode {
        SuccessMode::One => {
            let worst_c = *tops[c.0].iter().min().expect("nonempty");
            if rivals().all(|y| tops[y].iter().all(|&t| t <= worst_c)) {
                ExactOutcome::Success { witness: None, examined }
            } else {
                ExactOutcome::Failure { counterexample: None, examined }
            }
        }
        _ => {
            let pick = |y: usize| {
                let t = &tops[y];
                let val = if y == c.0 { t.iter().max() } else { t.iter().min() };
                t.iter().position(|x| Some(x) == val).expect("present")
            };
            let choice: Vec<usize> = (0..m).map(pick).collect();
            let best_c = tops[c.0][choice[c.0]];
            if rivals().all(|y| tops[y][choice[y]] <= best_c) {
                let traces: Vec<Vec<Vec<usize>>> = (0..m).map(|y| fams[y].trace(choice[y])).collect();
                let perms = (0..n).map(|i| (0..m).map(|y| traces[y][i].clone()).collect()).collect();
                let o = OrderingAssignment::from_perms(perms);
                assert!(clone_wins(e, r, c, v, &o)?, "score witness must verify");
                ExactOutcome::Success { witness: Some(o), examined }
            } else {
                ExactOutcome::Failure { counterexample: None, examined }
            }
        }
    })
}

/// Cheapest cost of any vector with exactly `extra` extra clones.
///
/// Marginal costs are nonnegative, so every vector with more extra clones
/// costs at least this much.
pub fn min_cost_with_extra(p: &CostFunction, m: usize, extra: usize) -> Result<Cost> {
    if m == 0 {
        return Err(Error::EmptyRoster);
    }
    // best[x]: cheapest way to place x extra clones on the families so far.
    let mut best = vec![Cost::Infinite; extra + 1];
    best[0] = Cost::ZERO;
    for j in 0..m {
        let mut family = vec![Cost::ZERO; extra + 1];
        for x in 1..=extra {
            family[x] = family[x - 1] + p.marginal(CandidateId(j), x + 1);
        }
        let mut next = vec![Cost::Infinite; extra + 1];
        for (x, &bx) in best.iter().enumerate() {
            for (y, &fy) in family.iter().enumerate().take(extra + 1 - x) {
                next[x + y] = next[x + y].min(bx + fy);
            }
        }
        best = next;
    }
    Ok(best[extra])
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct PnkResult {
    pub n: usize,
    pub k: usize,
    pub trials: u64,
    pub successes: u64,
}

impl PnkResult {
    pub fn fraction(&self) -> f64 {
        self.successes as f64 / self.trials as f64
    }
}

/// Random trials for the question whether `n` uniform permutations of `k`
/// clones leave every clone beaten by some other clone.
///
/// A trial succeeds when every `i` has a distinct `j` placed above it in at
/// least `n - 1` of the permutations. Trial `t` uses the same generator as the sampler, keyed by `seed`
/// with stream `t`; the count does not depend on the thread count.
pub fn pnk_experiment(n: usize, k: usize, trials: u64, seed: u64) -> Result<PnkResult> {
    if n == 0 || k == 0 || trials == 0 {
        return Err(Error::InvalidSize);
    }
    let successes = (0..trials)
        .into_par_iter()
        .map_init(
            || (vec![0usize; k], vec![vec![0usize; k]; n]),
            |(perm, pos), t| {
                let mut rng = trial_rng(seed, t);
                for row in pos.iter_mut() {
                    perm.iter_mut().enumerate().for_each(|(q, x)| *x = q);
                    perm.shuffle(&mut rng);
                    for (place, &x) in perm.iter().enumerate() {
                        row[x] = place;
                    }
                }
                pnk_trial_succeeds(pos, n) as u64
            },
        )
        .sum();
    Ok(PnkResult { n, k, trials, successes })
}

/// `pos[v][x]` is the position of candidate `x` in vote `v`.
fn pnk_trial_succeeds(pos: &[Vec<usize>], n: usize) -> bool {
    let k = pos[0].len();
    (0..k).all(|i| {
        (0..k).any(|j| j != i && pos.iter().filter(|row| row[j] < row[i]).count() + 1 >= n)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cost::CostTable;

    fn three_voter_plurality() -> Election {
        Election::from_labels(&["a", "c"], &[&["a", "c"], &["a", "c"], &["c", "a"]]).unwrap()
    }

    #[test]
    fn vector_enumeration_counts() {
        // C(m + cap, cap)
        assert_eq!(vectors_within(4, 4).len(), 70);
        assert_eq!(vectors_within(1, 3).len(), 4);
        assert_eq!(vectors_within(3, 0).len(), 1);
    }

    #[test]
    fn finds_cheapest_plurality_vector() {
        let e = three_voter_plurality();
        let c = CandidateId(1);
        let out = brute_force_search(&e, Rule::Plurality, c, SuccessMode::ZeroPlus, &CostFunction::UnitCost, Budget::UNLIMITED, SearchCaps::default())
            .unwrap();
        let OracleOutcome::Yes { vector, cost, certificate, minimal } = out else { panic!("{out:?}") };
        assert_eq!(vector.as_slice(), &[2, 1]);
        assert_eq!(cost, Cost::Finite(1));
        assert!(minimal);
        assert_eq!(certificate.kind(), "witness");
    }

    #[test]
    fn plurality_never_succeeds_for_all_orderings() {
        let e = three_voter_plurality();
        let out = brute_force_search(&e, Rule::Plurality, CandidateId(1), SuccessMode::One, &CostFunction::UnitCost, Budget::UNLIMITED, SearchCaps::default())
            .unwrap();
        assert_eq!(out, OracleOutcome::No { vectors_checked: 15 });
    }

    #[test]
    fn budget_and_winner() {
        let e = three_voter_plurality();
        let caps = SearchCaps::default();
        let out = brute_force_search(&e, Rule::Plurality, CandidateId(1), SuccessMode::ZeroPlus, &CostFunction::UnitCost, Budget::finite(0), caps)
            .unwrap();
        assert!(matches!(out, OracleOutcome::No { vectors_checked: 1 }));
        let out = brute_force_search(&e, Rule::Plurality, CandidateId(0), SuccessMode::ZeroPlus, &CostFunction::UnitCost, Budget::UNLIMITED, caps)
            .unwrap();
        assert_eq!(out, OracleOutcome::NotApplicable);
    }

    #[test]
    fn tight_caps_skip_vectors() {
        let e = three_voter_plurality();
        let caps = SearchCaps { max_extra_clones: 2, max_assignments: 1 };
        // Cloning only c keeps one score vector per voter and fails; every
        // vector cloning a is skipped.
        let out = brute_force_search(&e, Rule::Plurality, CandidateId(1), SuccessMode::ZeroPlus, &CostFunction::UnitCost, Budget::UNLIMITED, caps)
            .unwrap();
        assert_eq!(out, OracleOutcome::CapExceeded { skipped: 3 });
    }

    #[test]
    fn min_cost_dp() {
        let tab = CostTable::new(3, vec![vec![Cost::Finite(5), Cost::Finite(1)], vec![Cost::Finite(2), Cost::Finite(4)]]).unwrap();
        let p = CostFunction::General(tab);
        assert_eq!(min_cost_with_extra(&p, 2, 0).unwrap(), Cost::ZERO);
        assert_eq!(min_cost_with_extra(&p, 2, 1).unwrap(), Cost::Finite(2));
        // a twice costs 5 + 1, b twice 2 + 4, one each 7.
        assert_eq!(min_cost_with_extra(&p, 2, 2).unwrap(), Cost::Finite(6));
        // Copies beyond t cost p(a, t) = 1: a three times is 7.
        assert_eq!(min_cost_with_extra(&p, 2, 3).unwrap(), Cost::Finite(7));
        assert_eq!(min_cost_with_extra(&CostFunction::UnitCost, 4, 5).unwrap(), Cost::Finite(5));
    }

    #[test]
    fn pnk_small_cases() {
        // One voter: n - 1 = 0 holds for any other clone.
        assert_eq!(pnk_experiment(1, 2, 50, 1).unwrap().successes, 50);
        for n in 1..4 {
            assert_eq!(pnk_experiment(n, 1, 50, 1).unwrap().successes, 0);
        }
        let a = pnk_experiment(3, 4, 2000, 9).unwrap();
        let b = rayon::ThreadPoolBuilder::new()
            .num_threads(1)
            .build()
            .unwrap()
            .install(|| pnk_experiment(3, 4, 2000, 9).unwrap());
        assert_eq!(a, b);
    }

    #[test]
    fn pnk_trial_predicate() {
        // Identical votes: the top clone has nobody above it.
        for n in 2..5 {
            let same = vec![vec![0, 1, 2, 3]; n];
            assert!(!pnk_trial_succeeds(&same, n));
        }
        // Three voters in a cycle: each clone trails its predecessor twice.
        let cyc = vec![vec![0, 1, 2], vec![1, 2, 0], vec![2, 0, 1]];
        assert!(pnk_trial_succeeds(&cyc, 3));
        // Two voters, reversed: each clone is above the other once.
        assert!(pnk_trial_succeeds(&[vec![0, 1], vec![1, 0]], 2));
        assert!(!pnk_trial_succeeds(&[vec![0, 1], vec![1, 0], vec![0, 1]], 3));
    }

    fn tied_cover() -> Election {
        use crate::tournament::{mcgarvey_realize, MajoritySpec, Parity};
        let c = CandidateId;
        let spec = MajoritySpec {
            labels: ["a", "b", "c", "u", "w"].map(String::from).to_vec(),
            beats: vec![(c(0), c(3)), (c(3), c(1)), (c(1), c(4)), (c(4), c(0)), (c(3), c(2)), (c(4), c(2))],
            parity: Parity::Even,
        };
        mcgarvey_realize(&spec).unwrap()
    }

    #[test]
    fn covered_copeland_candidate_has_no_cheap_cloning() {
        let e = tied_cover();
        assert_eq!(e.num_voters(), 12);
        let caps = SearchCaps { max_extra_clones: 3, max_assignments: 1_000_000 };
        let out = brute_force_search(&e, Rule::Copeland, CandidateId(2), SuccessMode::ZeroPlus, &CostFunction::ZeroCost, Budget::UNLIMITED, caps)
            .unwrap();
        assert_eq!(out, OracleOutcome::No { vectors_checked: 56 });
    }

    #[test]
    fn borda_all_orderings_by_cloning_a_rival() {
        let e = Election::from_labels(
            &["a", "b", "c", "d"],
            &[&["a", "c", "b", "d"], &["a", "c", "b", "d"], &["a", "c", "b", "d"], &["d", "c", "b", "a"]],
        )
        .unwrap();
        let out = brute_force_search(&e, Rule::Borda, CandidateId(2), SuccessMode::One, &CostFunction::UnitCost, Budget::finite(2), SearchCaps::default())
            .unwrap();
        let OracleOutcome::Yes { vector, cost, certificate, .. } = out else { panic!("{out:?}") };
        // Two copies of b already tie a and c at 12 under every ordering.
        assert_eq!(vector.as_slice(), &[1, 2, 1, 1]);
        assert_eq!(cost, Cost::Finite(1));
        assert_eq!(certificate, Certificate::AllOrderings);
        let three = CloningVector::new(vec![1, 3, 1, 1]).unwrap();
        let full = ExactOptions { limit: 10_000, reduce_symmetry: false };
        let out = check_success_exact_with(&e, Rule::Borda, CandidateId(2), &three, SuccessMode::One, full).unwrap();
        assert!(out.is_success());
        assert_eq!(out.examined(), 1296);
    }

    fn random_election(rng: &mut impl rand::Rng, m: usize, n: usize) -> Election {
        let labels: Vec<String> = (0..m).map(|i| format!("x{i}")).collect();
        let votes = (0..n)
            .map(|_| {
                let mut v: Vec<CandidateId> = (0..m).map(CandidateId).collect();
                v.shuffle(rng);
                v
            })
            .collect();
        Election::from_rankings(labels, votes).unwrap()
    }

    #[test]
    fn tallies_agree_with_full_enumeration() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        let full = ExactOptions { limit: 200_000, reduce_symmetry: false };
        let mut compared = 0;
        for _ in 0..60 {
            let m = rng.gen_range(2..=3);
            let n = rng.gen_range(1..=3);
            let e = random_election(&mut rng, m, n);
            let rules = [Rule::Copeland, Rule::Maximin, Rule::Plurality, Rule::Veto, Rule::Borda, Rule::k_approval(2).unwrap()];
            for r in rules {
                for v in vectors_within(m, 3) {
                    for mode in [SuccessMode::ZeroPlus, SuccessMode::One] {
                        let c = CandidateId(0);
                        let Ok(slow) = check_success_exact_with(&e, r, c, &v, mode, full) else { continue };
                        let fast = if matches!(r, Rule::Copeland | Rule::Maximin) {
                            check_pairwise(&e, r, c, &v, mode, &mut TallyCache::new(n, 1_000_000)).unwrap()
                        } else {
                            check_positional(&e, r, c, &v, mode, 1_000_000).unwrap()
                        };
                        match (&slow, &fast) {
                            (ExactOutcome::NotApplicable(_), ExactOutcome::NotApplicable(_)) => {}
                            _ => {
                                assert_eq!(slow.is_success(), fast.is_success(), "{r} {mode} {v} {e:?}");
                                compared += 1;
                            }
                        }
                    }
                }
            }
        }
        assert!(compared > 600, "{compared}");
    }
}
