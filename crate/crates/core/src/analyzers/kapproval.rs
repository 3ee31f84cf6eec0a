use super::{start, AnalysisReport, Certificate, Quantity, Strategy};
use crate::cloning::{CloningVector, OrderingAssignment, SuccessMode};
use crate::election::{CandidateId, Election};
use crate::error::{Error, Result};
use crate::rules::Rule;

/// k-Approval, sufficient condition: if some voter ranks `c` first, cloning
/// every other candidate `k * n` times lets each voter approve clones nobody
/// else approves, so every rival clone ends with at most one point.
///
/// Voter `i` puts clones `i*k .. i*k + k - 1` of each family on top.
pub fn kapproval_saturate(e: &Election, c: CandidateId, k: usize) -> Result<AnalysisReport> {
    let rule = Rule::k_approval(k)?;
    let mut rep = match start(e, rule, c)? {
        Ok(r) => r,
        Err(done) => return Ok(done),
    };
    let n = e.num_voters();
    let firsts = e.votes().filter(|v| v[0] == c).count();
    rep.set("first_places", Quantity::int(firsts as i64));
    if firsts == 0 {
        return Ok(rep.inconclusive("preferred candidate is ranked first by no voter"));
    }
    let per = k
        .checked_mul(n)
        .ok_or_else(|| Error::Unsupported("clone count overflows".into()))?;
    let mut v = CloningVector::ones(e.num_candidates());
    for a in e.candidates().filter(|&a| a != c) {
        v.set(a, per);
    }
    rep.set("clones_per_rival", Quantity::int(per as i64));
    let mut o = OrderingAssignment::identity(n, &v);
    for i in 0..n {
        let lead: Vec<usize> = (i * k..i * k + k).collect();
        let mut perm = lead.clone();
        perm.extend((0..per).filter(|x| !lead.contains(x)));
        for a in e.candidates().filter(|&a| a != c) {
            o.set(i, a, perm.clone());
        }
    }
    Ok(rep.succeed(vec![Strategy {
        vector: v,
        mode: SuccessMode::ZeroPlus,
        certificate: Certificate::Witness(o),
        note: "saturate every rival with clones".into(),
    }]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analyzers::Verdict;
    use crate::cloning::apply_cloning;
    use crate::rules::{scores, winners};

    fn camera() -> Election {
        let mut votes: Vec<&[&str]> = vec![&["S", "N", "K"]; 6];
        votes.extend(vec![&["K", "N", "S"][..]; 4]);
        Election::from_labels(&["S", "N", "K"], &votes).unwrap()
    }

    #[test]
    fn saturating_the_camera_market() {
        let e = camera();
        let s_id = CandidateId(0);
        let rep = kapproval_saturate(&e, s_id, 2).unwrap();
        assert_eq!(rep.verdict, Verdict::Manipulable);
        let st = rep.best().unwrap();
        assert_eq!(st.vector.as_slice(), &[1, 20, 20]);
        let Certificate::Witness(o) = &st.certificate else { panic!() };
        let x = apply_cloning(&e, &st.vector, o).unwrap();
        let r = Rule::k_approval(2).unwrap();
        let sc = scores(&x.election, r).unwrap();
        assert_eq!(sc.get(x.clone_id(s_id, 0)), 6);
        assert!(x.election.candidates().filter(|&y| x.family_of(y) != s_id).all(|y| sc.get(y) <= 1));
        assert!(winners(&x.election, r).contains(&x.clone_id(s_id, 0)));
    }

    #[test]
    fn never_first_or_already_winning() {
        let e = camera();
        let rep = kapproval_saturate(&e, CandidateId(2), 2).unwrap();
        assert_eq!(rep.verdict, Verdict::Manipulable);
        let e2 = Election::from_labels(&["a", "b", "c"], &[&["a", "c", "b"], &["b", "c", "a"]]).unwrap();
        assert_eq!(kapproval_saturate(&e2, CandidateId(2), 2).unwrap().verdict, Verdict::AlreadyWinner);
        let e3 = Election::from_labels(&["a", "b", "c"], &[&["a", "b", "c"], &["b", "a", "c"]]).unwrap();
        assert_eq!(kapproval_saturate(&e3, CandidateId(2), 2).unwrap().verdict, Verdict::Inconclusive);
        assert_eq!(kapproval_saturate(&e, CandidateId(1), 2).unwrap().verdict, Verdict::AlreadyWinner);
    }
}
