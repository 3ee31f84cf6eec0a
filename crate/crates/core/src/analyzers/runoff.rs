use super::{
    ceil_div, key, split_top_voters, start, AnalysisReport, AnalyzeOptions, Certificate, Quantity, Strategy,
};
use crate::cloning::{estimate_success_probability, CloningVector, OrderingAssignment, SuccessMode};
use crate::election::{pairwise_matrix, CandidateId, Election};
use crate::error::Result;
use crate::rules::{scores, Rule, ScoreTable};
use num_rational::Ratio;

/// Plurality with runoff.
///
/// 0⁺: manipulable iff `Sc_P(c) >= 2`, or `Sc_P(c) = 1` and `c` wins or ties
/// its contest against some `w` with positive plurality score. Two
/// constructions are emitted: split `c` into two near-equal clones that meet
/// in the final, or steer `c` into a final against such a `w`. Mode 1 is never
/// achievable. Threshold `q` thins every family with two or more first places.
pub fn runoff_strategy(e: &Election, c: CandidateId, mode: SuccessMode, opts: &AnalyzeOptions) -> Result<AnalysisReport> {
    let mut rep = match start(e, Rule::PluralityRunoff, c)? {
        Ok(r) => r,
        Err(done) => return Ok(done),
    };
    if mode == SuccessMode::One {
        return Ok(rep.fail("no runoff election is manipulable under every ordering"));
    }
    let sc = scores(e, Rule::Plurality)?;
    let s = sc.get(c);
    rep.set("Sc_P(c)", Quantity::int(s));
    let w = pairwise_matrix(e);
    let rivals: Vec<CandidateId> = e
        .candidates()
        .filter(|&a| a != c && sc.get(a) >= 1 && w.get(c, a) >= w.get(a, c))
        .collect();
    rep.set("|D|", Quantity::int(rivals.len() as i64));
    if s == 0 {
        return Ok(rep.fail("preferred candidate is ranked first by no voter"));
    }
    if s == 1 && rivals.is_empty() {
        return Ok(rep.fail("every candidate with a first place beats the preferred candidate"));
    }
    if let SuccessMode::Threshold(q) = mode {
        let families: Vec<CandidateId> = e.candidates().filter(|&a| sc.get(a) >= 2).collect();
        let f = families.len() as u64;
        let factor = (Ratio::from_integer(f) / (Ratio::from_integer(1u64) - q)).ceil().to_integer() as usize;
        let mut v = CloningVector::ones(e.num_candidates());
        for &a in &families {
            let sa = sc.get(a) as usize;
            v.set(a, sa * (sa - 1) / 2 * factor);
            rep.set(key("k_a", e, a), Quantity::int(v.get(a) as i64));
        }
        let est = estimate_success_probability(e, Rule::PluralityRunoff, c, &v, opts.samples, opts.seed)?;
        return Ok(rep.succeed(vec![Strategy {
            vector: v,
            mode,
            certificate: Certificate::SampledEvidence {
                seed: opts.seed,
                samples: est.samples,
                successes: est.successes,
            },
            note: "thin every family with two or more first places".into(),
        }]));
    }

    let mut options = vec![];
    if s >= 2 {
        let k = s / 2;
        rep.set("k", Quantity::int(k));
        let mut v = CloningVector::ones(e.num_candidates());
        v.set(c, 2);
        let mut o = thin_rivals(e, &sc, &[c], k, v);
        // The first ceil(s/2) supporters top clone 1, the rest clone 2.
        split_top_voters(e, c, (s - k) as usize, 2, &mut o.1);
        options.push(Strategy {
            vector: o.0,
            mode,
            certificate: Certificate::Witness(o.1),
            note: "two clones of the preferred candidate meet in the final".into(),
        });
    }
    for &r in &rivals {
        let k = s.min(sc.get(r));
        let (v, o) = thin_rivals(e, &sc, &[c, r], k, CloningVector::ones(e.num_candidates()));
        options.push(Strategy {
            vector: v,
            mode,
            certificate: Certificate::Witness(o),
            note: format!("final against {}", e.label(r)),
        });
    }
    rep.minimal = true;
    Ok(rep.succeed(options))
}

/// Clones every candidate outside `keep` scoring above `k` into
/// `ceil(Sc_P(a)/k)` clones, each topped by at most `k` voters.
fn thin_rivals(
    e: &Election,
    sc: &ScoreTable,
    keep: &[CandidateId],
    k: i64,
    mut v: CloningVector,
) -> (CloningVector, OrderingAssignment) {
    let thinned: Vec<CandidateId> = e
        .candidates()
        .filter(|a| !keep.contains(a) && sc.get(*a) > k)
        .collect();
    for &a in &thinned {
        v.set(a, ceil_div(sc.get(a), k) as usize);
    }
    let mut o = OrderingAssignment::identity(e.num_voters(), &v);
    for &a in &thinned {
        split_top_voters(e, a, k as usize, v.get(a), &mut o);
    }
    (v, o)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analyzers::Verdict;
    use crate::cloning::clone_wins;

    fn seventeen() -> Election {
        let mut votes: Vec<&[&str]> = vec![&["c", "a", "b", "d"]; 8];
        votes.extend(vec![&["a", "b", "d", "c"][..]; 3]);
        votes.extend(vec![&["b", "a", "d", "c"][..]; 3]);
        votes.extend(vec![&["d", "a", "b", "c"][..]; 3]);
        Election::from_labels(&["a", "b", "c", "d"], &votes).unwrap()
    }

    fn r5() -> Election {
        Election::from_labels(
            &["c", "a", "w"],
            &[&["c", "a", "w"], &["a", "c", "w"], &["a", "c", "w"], &["w", "c", "a"], &["w", "c", "a"]],
        )
        .unwrap()
    }

    fn verify_all(e: &Election, c: CandidateId, rep: &AnalysisReport) {
        for s in &rep.strategies {
            let Certificate::Witness(o) = &s.certificate else { panic!() };
            assert!(clone_wins(e, Rule::PluralityRunoff, c, &s.vector, o).unwrap(), "{}", s.note);
        }
    }

    #[test]
    fn split_preferred_into_two() {
        let e = seventeen();
        let c = e.candidate("c").unwrap();
        let rep = runoff_strategy(&e, c, SuccessMode::ZeroPlus, &AnalyzeOptions::default()).unwrap();
        assert_eq!(rep.verdict, Verdict::Manipulable);
        let best = rep.best().unwrap();
        assert_eq!(best.vector.as_slice(), &[1, 1, 2, 1]);
        verify_all(&e, c, &rep);
    }

    #[test]
    fn final_against_beaten_rival() {
        let e = r5();
        let c = CandidateId(0);
        let rep = runoff_strategy(&e, c, SuccessMode::ZeroPlus, &AnalyzeOptions::default()).unwrap();
        assert_eq!(rep.verdict, Verdict::Manipulable);
        assert_eq!(rep.best().unwrap().extra_clones(), 1);
        assert!(rep.strategies.iter().any(|s| s.vector.as_slice() == [1, 2, 1]));
        verify_all(&e, c, &rep);
    }

    #[test]
    fn lone_supporter_beaten_by_all() {
        let e = Election::from_labels(
            &["c", "a", "b"],
            &[&["c", "a", "b"], &["a", "b", "c"], &["a", "b", "c"], &["b", "a", "c"]],
        )
        .unwrap();
        let rep = runoff_strategy(&e, CandidateId(0), SuccessMode::ZeroPlus, &AnalyzeOptions::default()).unwrap();
        assert_eq!(rep.verdict, Verdict::NotManipulable);
        let rep = runoff_strategy(&seventeen(), CandidateId(2), SuccessMode::One, &AnalyzeOptions::default()).unwrap();
        assert_eq!(rep.verdict, Verdict::NotManipulable);
    }

    #[test]
    fn threshold_vector() {
        let e = seventeen();
        let c = CandidateId(2);
        let q = SuccessMode::threshold(Ratio::new(1, 2)).unwrap();
        let opts = AnalyzeOptions { samples: 200, ..AnalyzeOptions::default() };
        let rep = runoff_strategy(&e, c, q, &opts).unwrap();
        let s = rep.best().unwrap();
        // Four families with >= 2 first places: c has 8, the others 3.
        assert_eq!(s.vector.get(c), 28 * 8);
        let Certificate::SampledEvidence { successes, samples, .. } = s.certificate else { panic!() };
        assert!(successes * 2 >= samples);
    }
}
