use super::{ceil_div, key, start, AnalysisReport, Certificate, Quantity, Strategy, Verdict};
use crate::cloning::{CloningVector, OrderingAssignment, SuccessMode};
use crate::election::{is_pareto_undominated, pairwise_matrix, CandidateId, Election};
use crate::error::{Error, Result};
use crate::rules::{scores, Rule};
use num_rational::Ratio;

/// Borda, 0⁺: manipulable iff `c` does not win and is Pareto undominated.
///
/// For each `a` outscoring `c` let `s_a = Sc_B(a) - Sc_B(c)` and
/// `n_a = W(c,a)`. Each extra clone of `c`, ordered identically by all voters,
/// closes the gap to `a` by `n_a`, so `k = max ceil(s_a/n_a)` extra clones do.
pub fn borda_0plus_strategy(e: &Election, c: CandidateId) -> Result<AnalysisReport> {
    let mut rep = match start(e, Rule::Borda, c)? {
        Ok(r) => r,
        Err(done) => return Ok(done),
    };
    if !is_pareto_undominated(e, c)? {
        return Ok(rep.fail("preferred candidate is Pareto dominated"));
    }
    let sc = scores(e, Rule::Borda)?;
    let w = pairwise_matrix(e);
    let mut k = 0;
    for a in e.candidates().filter(|&a| sc.get(a) > sc.get(c)) {
        let (s_a, n_a) = (sc.get(a) - sc.get(c), w.get(c, a) as i64);
        rep.set(key("s_a", e, a), Quantity::int(s_a));
        rep.set(key("n_a", e, a), Quantity::int(n_a));
        k = k.max(ceil_div(s_a, n_a));
    }
    rep.set("uc_extra_clones", Quantity::int(k));
    rep.set("uc_clones_total", Quantity::int(k + 1));
    let v = CloningVector::with(e.num_candidates(), &[(c, k as usize + 1)])?;
    let o = OrderingAssignment::identity(e.num_voters(), &v);
    rep.minimal = true;
    Ok(rep.succeed(vec![Strategy {
        vector: v,
        mode: SuccessMode::ZeroPlus,
        certificate: Certificate::Witness(o),
        note: "identically ordered clones of the preferred candidate".into(),
    }]))
}

fn ratio_or_inf(num: i64, den: i64) -> Quantity {
    Quantity::Finite(Ratio::new(num, den))
}

/// Borda, cloning only `c`, success under every ordering.
///
/// `A+` holds candidates outscoring `c`, `A-` the rest. With
/// `n_a = W(c,a) - W(a,c)` on `A+` (reversed on `A-`), `k` clones of `c`
/// survive the worst ordering iff `r+ <= k - 1 <= r-` where `r+ = max 2s_a/n_a`
/// and `r- = min 2s_a/n_a` over positive `n_a`. For an even number of voters
/// the worst ordering gives every clone exactly the average gain, so this is
/// exact. For an odd number it stays sufficient, and the half-point looser
/// `r̂` bounds give a necessary condition.
pub fn borda_clone_c_analysis(e: &Election, c: CandidateId) -> Result<AnalysisReport> {
    let mut rep = match start(e, Rule::Borda, c)? {
        Ok(r) => r,
        Err(done) => return Ok(done),
    };
    let sc = scores(e, Rule::Borda)?;
    let w = pairwise_matrix(e);
    let n = e.num_voters();
    let (mut r_plus, mut r_minus) = (Quantity::int(0), Quantity::Infinite);
    let (mut rh_plus, mut rh_minus) = (Quantity::int(0), Quantity::Infinite);
    for a in e.candidates().filter(|&a| a != c) {
        let s_a = (sc.get(a) - sc.get(c)).abs();
        let m = w.margin(c, a);
        rep.set(key("s_a", e, a), Quantity::int(s_a));
        if sc.get(a) > sc.get(c) {
            rep.set(key("n_a", e, a), Quantity::int(m));
            if m <= 0 {
                r_plus = Quantity::Infinite;
                rh_plus = Quantity::Infinite;
            } else {
                r_plus = r_plus.max(ratio_or_inf(2 * s_a, m));
                rh_plus = rh_plus.max(ratio_or_inf(2 * s_a - 1, m));
            }
        } else {
            rep.set(key("n_a", e, a), Quantity::int(-m));
            if -m > 0 {
                r_minus = r_minus.min(ratio_or_inf(2 * s_a, -m));
                rh_minus = rh_minus.min(ratio_or_inf(2 * s_a + 1, -m));
            }
        }
    }
    rep.set("r_plus", r_plus);
    rep.set("r_minus", r_minus);
    let holds = r_plus != Quantity::Infinite && r_plus.ceil() <= r_minus.floor();
    if holds {
        let k = r_plus.ceil().as_integer().expect("finite") + 1;
        rep.set("k", Quantity::int(k));
        return Ok(rep.succeed(vec![Strategy {
            vector: CloningVector::with(e.num_candidates(), &[(c, k as usize)])?,
            mode: SuccessMode::One,
            certificate: Certificate::AllOrderings,
            note: "clone the preferred candidate only".into(),
        }]));
    }
    if n.is_multiple_of(2) {
        let why = if r_plus == Quantity::Infinite {
            "r_plus is infinite"
        } else {
            "ceil(r_plus) > floor(r_minus)"
        };
        return Ok(rep.fail(why));
    }
    rep.set("r_hat_plus", rh_plus);
    rep.set("r_hat_minus", rh_minus);
    if rh_plus == Quantity::Infinite || rh_plus.ceil() > rh_minus.floor() {
        rep.verdict = Verdict::NecessaryConditionFails;
        rep.violated = Some("ceil(r_hat_plus) > floor(r_hat_minus)".into());
        return Ok(rep);
    }
    Ok(rep.inconclusive("odd number of voters: only the necessary condition holds"))
}

/// Orders `k` clones of one candidate for `n` voters so that no clone gains
/// more than `ceil(n(k-1)/2)` Borda points.
///
/// Even `n`: half the voters list the clones forward, half backward. Odd
/// `n >= 3` and odd `k`: two interleaved voters, one forward voter, then
/// backward/forward pairs; every clone gains exactly `n(k-1)/2`. Odd `n` and
/// even `k`: the construction for `k - 1`, with the last clone on top for
/// `(n-1)/2` voters and at the bottom for the rest.
///
/// Entries are 0-based clone indices, best first.
pub fn borda_adversarial_ordering(n: usize, k: usize) -> Result<Vec<Vec<usize>>> {
    if k == 0 || n == 0 {
        return Err(Error::InvalidSize);
    }
    let forward: Vec<usize> = (0..k).collect();
    let backward: Vec<usize> = (0..k).rev().collect();
    if n.is_multiple_of(2) {
        let mut out = vec![forward; n / 2];
        out.extend(vec![backward; n / 2]);
        return Ok(out);
    }
    if n < 3 {
        return Err(Error::Unsupported("odd orderings need at least three voters".into()));
    }
    if k.is_multiple_of(2) {
        let mut out = borda_adversarial_ordering(n, k - 1)?;
        for (i, p) in out.iter_mut().enumerate() {
            if i < (n - 1) / 2 {
                p.insert(0, k - 1);
            } else {
                p.push(k - 1);
            }
        }
        return Ok(out);
    }
    // 1-based: k, k-2, ..., 1, k-1, k-3, ..., 2 and k-1, ..., 2, k, ..., 1.
    let odd_down: Vec<usize> = (0..k).rev().step_by(2).collect();
    let even_down: Vec<usize> = (0..k - 1).rev().step_by(2).collect();
    let first = [odd_down.clone(), even_down.clone()].concat();
    let second = [even_down, odd_down].concat();
    let mut out = vec![first, second, forward.clone()];
    for _ in 0..(n - 3) / 2 {
        out.push(backward.clone());
        out.push(forward.clone());
    }
    Ok(out)
}
