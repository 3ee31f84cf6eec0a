use super::{key, start, AnalysisReport, Certificate, Quantity, Strategy};
use crate::cloning::{clone_wins, CloningVector, OrderingAssignment, SuccessMode};
use crate::election::{CandidateId, Election};
use crate::error::Result;
use crate::rules::{scores, Rule};
use crate::tournament::{covers, majority_graph, udt_partition, MajorityGraph};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CopelandOptions {
    /// Per-variable bound for the integer search; `None` uses `max(s_z) * |Y|`.
    pub bound: Option<i64>,
    /// Points examined by the integer search before giving up.
    pub search_limit: u64,
}

impl Default for CopelandOptions {
    fn default() -> Self {
        Self {
            bound: None,
            search_limit: 10_000_000,
        }
    }
}

pub fn copeland_strategy(e: &Election, c: CandidateId) -> Result<AnalysisReport> {
    copeland_strategy_with(e, c, &CopelandOptions::default())
}

/// Copeland.
///
/// Odd `n`: manipulable iff `c` does not win and is uncovered; cloning `c`
/// into `2m+1` and each candidate `c` beats into `4m+1` works for every
/// ordering.
///
/// Even `n`: a covered `c` cannot be helped. Otherwise let `Y` be the
/// candidates tied with `c` and `Z` those beating `c` and everything `c`
/// beats, with `s_z = Sc_C(z) - Sc_C(c)`. Splitting `y` into `q(y) + 1` clones
/// lowers `z` by `sum_{y beats z} q(y) - sum_{z beats y} q(y)`, and no other
/// cloning narrows these gaps, so `c` is manipulable iff that system has a
/// nonnegative integer solution. Rational infeasibility is decided exactly;
/// integer solutions are searched up to a bound.
pub fn copeland_strategy_with(e: &Election, c: CandidateId, opts: &CopelandOptions) -> Result<AnalysisReport> {
    let mut rep = match start(e, Rule::Copeland, c)? {
        Ok(r) => r,
        Err(done) => return Ok(done),
    };
    let g = majority_graph(e);
    let m = e.num_candidates();
    if let Some(u) = g.candidates().find(|&u| u != c && covers(&g, u, c).unwrap_or(false)) {
        return Ok(rep.fail(format!("covered by {}", e.label(u))));
    }
    let p = udt_partition(&g, c)?;
    rep.set("|U|", Quantity::int(p.up.len() as i64));
    rep.set("|D|", Quantity::int(p.down.len() as i64));
    rep.set("|T|", Quantity::int(p.tied.len() as i64));

    if e.num_voters() % 2 == 1 {
        let mut v = CloningVector::with(m, &[(c, 2 * m + 1)])?;
        for &d in &p.down {
            v.set(d, 4 * m + 1);
        }
        return Ok(rep.succeed(vec![Strategy {
            vector: v,
            mode: SuccessMode::One,
            certificate: Certificate::AllOrderings,
            note: "outnumber the candidates the preferred one beats".into(),
        }]));
    }

    let sc = scores(e, Rule::Copeland)?;
    let ys: Vec<CandidateId> = p.tied.iter().copied().collect();
    let zs: Vec<CandidateId> = p
        .up
        .iter()
        .copied()
        .filter(|&z| p.down.iter().all(|&d| g.beats(z, d)))
        .collect();
    let rows: Vec<(Vec<i64>, i64)> = zs
        .iter()
        .map(|&z| {
            let s_z = sc.get(z) - sc.get(c);
            rep.set(key("s_z", e, z), Quantity::int(s_z));
            (coefficients(&g, &ys, z), s_z)
        })
        .collect();
    if fourier_motzkin_infeasible(&rows, ys.len()) == Some(true) {
        return Ok(rep.fail("no nonnegative q(y) satisfies the tie-cloning system"));
    }
    let max_s = rows.iter().map(|r| r.1).max().unwrap_or(0).max(0);
    let bound = opts.bound.unwrap_or(max_s * ys.len() as i64);
    rep.set("q_bound", Quantity::int(bound));
    let Some(q) = bounded_search(&rows, ys.len(), bound, opts.search_limit) else {
        return Ok(rep.inconclusive("no integer solution within the search bound"));
    };
    for (&y, &qy) in ys.iter().zip(&q) {
        rep.set(key("q", e, y), Quantity::int(qy));
    }

    // Follow-up: identically ordered clones of c and of every candidate c beats.
    let mut v = CloningVector::ones(m);
    for (&y, &qy) in ys.iter().zip(&q) {
        v.set(y, qy as usize + 1);
    }
    let m1 = m + q.iter().sum::<i64>() as usize;
    let mut big = 2 * m1 - 1;
    for _ in 0..6 {
        let mut w = v.clone();
        if big > 1 {
            w.set(c, big);
            for &d in &p.down {
                w.set(d, big);
            }
        }
        let o = OrderingAssignment::identity(e.num_voters(), &w);
        if clone_wins(e, Rule::Copeland, c, &w, &o)? {
            rep.set("follow_up_clones", Quantity::int(big as i64));
            return Ok(rep.succeed(vec![Strategy {
                vector: w,
                mode: SuccessMode::ZeroPlus,
                certificate: Certificate::Witness(o),
                note: "clone tied candidates, then the preferred one and those it beats".into(),
            }]));
        }
        big *= 2;
    }
    Ok(rep.inconclusive("follow-up cloning did not verify"))
}

/// Coefficient of each `q(y)` in the constraint for `z`.
fn coefficients(g: &MajorityGraph, ys: &[CandidateId], z: CandidateId) -> Vec<i64> {
    ys.iter()
        .map(|&y| {
            if g.beats(y, z) {
                1
            } else if g.beats(z, y) {
                -1
            } else {
                0
            }
        })
        .collect()
}

const FM_MAX_ROWS: usize = 20_000;

/// Decides whether `{a.q >= b, q >= 0}` has no rational solution by
/// Fourier-Motzkin elimination. `None` when the row count blows past the cap.
fn fourier_motzkin_infeasible(rows: &[(Vec<i64>, i64)], vars: usize) -> Option<bool> {
    let mut sys: Vec<(Vec<i128>, i128)> = rows
        .iter()
        .map(|(a, b)| (a.iter().map(|&x| x as i128).collect(), *b as i128))
        .collect();
    for j in 0..vars {
        let mut unit = vec![0i128; vars];
        unit[j] = 1;
        sys.push((unit, 0));
    }
    for j in 0..vars {
        let (mut pos, mut neg, mut rest) = (vec![], vec![], vec![]);
        for r in sys {
            match r.0[j].signum() {
                1 => pos.push(r),
                -1 => neg.push(r),
                _ => rest.push(r),
            }
        }
        for (ap, bp) in &pos {
            for (an, bn) in &neg {
                let (cp, cn) = (-an[j], ap[j]);
                let a: Vec<i128> = ap.iter().zip(an).map(|(x, y)| cp * x + cn * y).collect();
                let b = cp * bp + cn * bn;
                rest.push(normalize(a, b));
                if rest.len() > FM_MAX_ROWS {
                    return None;
                }
            }
        }
        rest.sort();
        rest.dedup();
        sys = rest;
    }
    Some(sys.iter().any(|(_, b)| *b > 0))
}

fn normalize(a: Vec<i128>, b: i128) -> (Vec<i128>, i128) {
    let g = a.iter().fold(0i128, |g, &x| gcd(g, x.abs()));
    if g <= 1 {
        return (a, b);
    }
    // a.q >= b with integer a/g gives a/g.q >= b/g over the rationals.
    (a.into_iter().map(|x| x / g).collect(), b.div_euclid(g) + (b.rem_euclid(g) != 0) as i128)
}

fn gcd(a: i128, b: i128) -> i128 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Smallest-sum nonnegative integer solution with entries `<= bound`, ties
/// broken lexicographically.
fn bounded_search(rows: &[(Vec<i64>, i64)], vars: usize, bound: i64, limit: u64) -> Option<Vec<i64>> {
    let ok = |q: &[i64]| {
        rows.iter()
            .all(|(a, b)| a.iter().zip(q).map(|(x, y)| x * y).sum::<i64>() >= *b)
    };
    let mut examined = 0u64;
    for total in 0..=bound * vars as i64 {
        let mut q = vec![0i64; vars];
        if let Some(found) = compositions(&mut q, 0, total, bound, &mut examined, limit, &ok) {
            return Some(found);
        }
        if examined >= limit {
            return None;
        }
    }
    None
}

fn compositions(
    q: &mut Vec<i64>,
    idx: usize,
    left: i64,
    bound: i64,
    examined: &mut u64,
    limit: u64,
    ok: &dyn Fn(&[i64]) -> bool,
) -> Option<Vec<i64>> {
    if idx == q.len() {
        if left != 0 {
            return None;
        }
        *examined += 1;
        return ok(q).then(|| q.clone());
    }
    for x in 0..=left.min(bound) {
        if *examined >= limit {
            return None;
        }
        q[idx] = x;
        if let Some(f) = compositions(q, idx + 1, left - x, bound, examined, limit, ok) {
            return Some(f);
        }
    }
    q[idx] = 0;
    None
}
