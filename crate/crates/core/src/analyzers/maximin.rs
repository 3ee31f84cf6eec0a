use super::{ceil_div, key, start, AnalysisReport, Certificate, Quantity, Strategy};
use crate::cloning::{CloningVector, OrderingAssignment, SuccessMode};
use crate::election::{is_pareto_undominated, CandidateId, Election};
use crate::error::Result;
use crate::rules::{scores, Rule};

/// Maximin, 0⁺: manipulable iff `c` does not win and is Pareto undominated.
///
/// With `s = Sc_M(c)`, every rival scoring above `s` becomes `L = ceil(n/s)`
/// clones. Voters are cut into consecutive blocks of `L`; the `p`-th voter of a
/// block orders the clones as a rotation starting at `p`, so within a block at
/// most one voter puts a clone above its cyclic predecessor. Every clone then
/// loses to its predecessor in all but `ceil(n/L) <= s` votes.
pub fn maximin_strategy(e: &Election, c: CandidateId, mode: SuccessMode) -> Result<AnalysisReport> {
    let mut rep = match start(e, Rule::Maximin, c)? {
        Ok(r) => r,
        Err(done) => return Ok(done),
    };
    if mode != SuccessMode::ZeroPlus {
        return Ok(rep.fail("no maximin election is manipulable under every ordering"));
    }
    if !is_pareto_undominated(e, c)? {
        return Ok(rep.fail("preferred candidate is Pareto dominated"));
    }
    let sc = scores(e, Rule::Maximin)?;
    let n = e.num_voters() as i64;
    let s = sc.get(c);
    let l = ceil_div(n, s) as usize;
    rep.set("s", Quantity::int(s));
    rep.set("L", Quantity::int(l as i64));
    let mut v = CloningVector::ones(e.num_candidates());
    for a in e.candidates().filter(|&a| sc.get(a) > s) {
        v.set(a, l);
        rep.set(key("Sc_M", e, a), Quantity::int(sc.get(a)));
    }
    let mut o = OrderingAssignment::identity(e.num_voters(), &v);
    for i in 0..e.num_voters() {
        let p = i % l;
        let rotation: Vec<usize> = (0..l).map(|x| (p + x) % l).collect();
        for a in v.cloned().collect::<Vec<_>>() {
            o.set(i, a, rotation.clone());
        }
    }
    rep.minimal = true;
    Ok(rep.succeed(vec![Strategy {
        vector: v,
        mode,
        certificate: Certificate::Witness(o),
        note: "rotational blocks over every stronger rival".into(),
    }]))
}
