use super::{start, AnalysisReport, Certificate, Quantity, Strategy};
use crate::cloning::{CloningVector, OrderingAssignment, SuccessMode};
use crate::election::{CandidateId, Election};
use crate::error::{Error, Result};
use crate::rules::{scores, Rule};

/// Veto: every non-winner can be made to win, even under every ordering.
///
/// For 0⁺ two identically ordered clones of `c` suffice: the top one is never
/// vetoed. For mode 1, with `l` the winners' score and `k = Sc_V(c)`, the
/// `n - k` vetoes of `c` are spread over enough clones that some clone keeps
/// at most `n - l` of them.
pub fn veto_strategy(e: &Election, c: CandidateId, mode: SuccessMode) -> Result<AnalysisReport> {
    let mut rep = match start(e, Rule::Veto, c)? {
        Ok(r) => r,
        Err(done) => return Ok(done),
    };
    let m = e.num_candidates();
    let n = e.num_voters() as i64;
    let sc = scores(e, Rule::Veto)?;
    let (l, k) = (sc.max(), sc.get(c));
    rep.set("ell", Quantity::int(l));
    rep.set("k", Quantity::int(k));
    rep.minimal = true;
    let strategy = match mode {
        SuccessMode::ZeroPlus => {
            let v = CloningVector::with(m, &[(c, 2)])?;
            Strategy {
                certificate: Certificate::Witness(OrderingAssignment::identity(e.num_voters(), &v)),
                vector: v,
                mode,
                note: "two identically ordered clones of the preferred candidate".into(),
            }
        }
        SuccessMode::One => {
            let clones = if l == n {
                n - k + 1
            } else {
                let (l1, k1) = (n - l, n - k);
                let r = k1 / (l1 + 1);
                rep.set("ell_prime", Quantity::int(l1));
                rep.set("k_prime", Quantity::int(k1));
                rep.set("r", Quantity::int(r));
                r + 1
            };
            Strategy {
                vector: CloningVector::with(m, &[(c, clones as usize)])?,
                mode,
                certificate: Certificate::AllOrderings,
                note: "spread the vetoes of the preferred candidate".into(),
            }
        }
        SuccessMode::Threshold(_) => return Err(Error::Unsupported("veto threshold mode; use mode 1".into())),
    };
    Ok(rep.succeed(vec![strategy]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analyzers::Verdict;
    use crate::cloning::{check_success_exact, check_success_exact_with, ExactOptions};

    // n = 5; c is last for three voters, so Sc_V(c) = 2.
    fn vetoed_thrice(rival_vetoes: usize) -> Election {
        let mut votes: Vec<Vec<&str>> = vec![vec!["a", "b", "c"]; 3];
        let rest = 2;
        for i in 0..rest {
            votes.push(if i < rival_vetoes { vec!["c", "b", "a"] } else { vec!["c", "a", "b"] });
        }
        let refs: Vec<&[&str]> = votes.iter().map(|v| v.as_slice()).collect();
        Election::from_labels(&["a", "b", "c"], &refs).unwrap()
    }

    #[test]
    fn unvetoed_winner_needs_n_minus_k_plus_one() {
        // a vetoed by nobody: l = n = 5.
        let e = vetoed_thrice(0);
        let c = CandidateId(2);
        let rep = veto_strategy(&e, c, SuccessMode::One).unwrap();
        assert_eq!(rep.best().unwrap().vector.get(c), 4);
        let v = &rep.best().unwrap().vector;
        let opts = ExactOptions { limit: 1 << 20, reduce_symmetry: true };
        assert!(check_success_exact_with(&e, Rule::Veto, c, v, SuccessMode::One, opts).unwrap().is_success());
        let fewer = CloningVector::with(3, &[(c, 3)]).unwrap();
        assert!(!check_success_exact_with(&e, Rule::Veto, c, &fewer, SuccessMode::One, opts).unwrap().is_success());
    }

    #[test]
    fn spread_vetoes_when_winner_is_vetoed() {
        // a and b each vetoed once: l = 4, l' = 1, k' = 3, r = 1.
        let e = vetoed_thrice(1);
        let c = CandidateId(2);
        let rep = veto_strategy(&e, c, SuccessMode::One).unwrap();
        assert_eq!(rep.derived["r"], Quantity::int(1));
        let v = &rep.best().unwrap().vector;
        assert_eq!(v.get(c), 2);
        let out = check_success_exact(&e, Rule::Veto, c, v, SuccessMode::One, 1000).unwrap();
        assert!(out.is_success());
        assert_eq!(out.examined(), 32);
    }

    #[test]
    fn zero_plus_and_winner() {
        let e = vetoed_thrice(1);
        let rep = veto_strategy(&e, CandidateId(2), SuccessMode::ZeroPlus).unwrap();
        assert_eq!(rep.verdict, Verdict::Manipulable);
        assert_eq!(rep.best().unwrap().extra_clones(), 1);
        assert_eq!(veto_strategy(&e, CandidateId(0), SuccessMode::One).unwrap().verdict, Verdict::AlreadyWinner);
    }
}
