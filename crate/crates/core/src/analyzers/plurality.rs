use super::{ceil_div, key, split_top_voters, start, AnalysisReport, AnalyzeOptions, Certificate, Quantity, Strategy};
use crate::cloning::{estimate_success_probability, CloningVector, OrderingAssignment, SuccessMode};
use crate::election::{CandidateId, Election};
use crate::error::{Error, Result};
use crate::rules::{scores, Rule};
use num_rational::Ratio;

/// Plurality, 0⁺: manipulable iff some voter ranks `c` first. Every rival
/// outscoring `c` is split into `ceil(Sc(a)/Sc(c))` clones, each topped by at
/// most `Sc(c)` of its voters.
pub fn plurality_0plus(e: &Election, c: CandidateId) -> Result<AnalysisReport> {
    let mut rep = match start(e, Rule::Plurality, c)? {
        Ok(r) => r,
        Err(done) => return Ok(done),
    };
    let sc = scores(e, Rule::Plurality)?;
    let s = sc.get(c);
    rep.set("Sc_P(c)", Quantity::int(s));
    if s == 0 {
        return Ok(rep.fail("preferred candidate is ranked first by no voter"));
    }
    let mut v = CloningVector::ones(e.num_candidates());
    for a in e.candidates().filter(|&a| sc.get(a) > s) {
        let k = ceil_div(sc.get(a), s);
        rep.set(key("k_a", e, a), Quantity::int(k));
        v.set(a, k as usize);
    }
    let mut o = OrderingAssignment::identity(e.num_voters(), &v);
    for a in v.cloned().collect::<Vec<_>>() {
        split_top_voters(e, a, s as usize, v.get(a), &mut o);
    }
    rep.minimal = true;
    Ok(rep.succeed(vec![Strategy {
        vector: v,
        mode: SuccessMode::ZeroPlus,
        certificate: Certificate::Witness(o),
        note: "split every stronger rival".into(),
    }]))
}

/// Plurality under mode 1 or a threshold `q`.
///
/// Mode 1 is never achievable. For `q` the condition is the 0⁺ one, and each
/// rival `a` with `s = Sc(a) > Sc(c)` becomes `C(s,2) * ceil((m-1)/(1-q))`
/// clones, enough that with probability at least `q` no clone collects two
/// first places.
pub fn plurality_q(e: &Election, c: CandidateId, mode: SuccessMode, opts: &AnalyzeOptions) -> Result<AnalysisReport> {
    let q = match mode {
        SuccessMode::Threshold(q) => q,
        SuccessMode::One => {
            return Ok(match start(e, Rule::Plurality, c)? {
                Ok(r) => r.fail("no plurality election is manipulable under every ordering"),
                Err(done) => done,
            })
        }
        SuccessMode::ZeroPlus => return plurality_0plus(e, c),
    };
    if q <= Ratio::from_integer(0) || q >= Ratio::from_integer(1) {
        return Err(Error::InvalidThreshold);
    }
    let mut rep = match start(e, Rule::Plurality, c)? {
        Ok(r) => r,
        Err(done) => return Ok(done),
    };
    let sc = scores(e, Rule::Plurality)?;
    let s = sc.get(c);
    rep.set("Sc_P(c)", Quantity::int(s));
    if s == 0 {
        return Ok(rep.fail("preferred candidate is ranked first by no voter"));
    }
    let m = e.num_candidates() as u64;
    let one = Ratio::from_integer(1u64);
    let factor = (Ratio::from_integer(m - 1) / (one - q)).ceil().to_integer() as usize;
    rep.set("ceil((m-1)/(1-q))", Quantity::int(factor as i64));
    let mut v = CloningVector::ones(e.num_candidates());
    for a in e.candidates().filter(|&a| sc.get(a) > s) {
        let sa = sc.get(a) as usize;
        let k = sa * (sa - 1) / 2 * factor;
        rep.set(key("k_a", e, a), Quantity::int(k as i64));
        v.set(a, k);
    }
    let est = estimate_success_probability(e, Rule::Plurality, c, &v, opts.samples, opts.seed)?;
    Ok(rep.succeed(vec![Strategy {
        vector: v,
        mode,
        certificate: Certificate::SampledEvidence {
            seed: opts.seed,
            samples: est.samples,
            successes: est.successes,
        },
        note: "spread every stronger rival thinly".into(),
    }]))
}
