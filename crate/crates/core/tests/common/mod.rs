#![allow(dead_code)]

use cloning_core::analyzers::{AnalysisReport, Certificate, Verdict};
use cloning_core::cloning::{
    check_success_exact_with, clone_wins, estimate_success_probability, reduced_ordering_space, ExactOptions, SuccessMode,
};
use cloning_core::io::parse_election;
use cloning_core::oracle::OracleOutcome;
use cloning_core::{CandidateId, Election, Rule};
use rand::seq::SliceRandom;
use rand::Rng;
use std::path::PathBuf;

pub fn fixture_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

pub fn fixture(name: &str) -> Election {
    parse_election(&std::fs::read_to_string(fixture_path(name)).unwrap()).unwrap()
}

pub fn random_election(rng: &mut impl Rng, m: usize, n: usize) -> Election {
    let labels: Vec<String> = ["a", "b", "c", "d", "e", "f"][..m].iter().map(|s| s.to_string()).collect();
    let votes = (0..n)
        .map(|_| {
            let mut v: Vec<CandidateId> = (0..m).map(CandidateId).collect();
            v.shuffle(rng);
            v
        })
        .collect();
    Election::from_rankings(labels, votes).unwrap()
}

/// Re-checks a strategy's certificate independently of the analyzer.
pub fn certificate_holds(e: &Election, r: Rule, c: CandidateId, rep: &AnalysisReport) -> Result<(), String> {
    let s = rep.best().ok_or("manipulable without a strategy")?;
    match &s.certificate {
        Certificate::Witness(o) => {
            if clone_wins(e, r, c, &s.vector, o).map_err(|x| x.to_string())? {
                Ok(())
            } else {
                Err("witness does not make a clone win".into())
            }
        }
        Certificate::AllOrderings => {
            let opts = ExactOptions {
                limit: 1_000_000,
                reduce_symmetry: true,
            };
            if reduced_ordering_space(e, &s.vector) <= opts.limit as u128 {
                let out = check_success_exact_with(e, r, c, &s.vector, SuccessMode::One, opts).map_err(|x| x.to_string())?;
                return if out.is_success() { Ok(()) } else { Err("some ordering defeats the strategy".into()) };
            }
            let est = estimate_success_probability(e, r, c, &s.vector, 300, 11).map_err(|x| x.to_string())?;
            if est.successes == est.samples {
                Ok(())
            } else {
                Err(format!("{} of {} sampled orderings fail", est.samples - est.successes, est.samples))
            }
        }
        Certificate::SampledEvidence { .. } => Ok(()),
    }
}

/// Outcome of comparing one analyzer report with the oracle.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Comparison {
    Agree,
    /// The analyzer made no claim, or the oracle could not finish.
    NoClaim,
    Disagree(String),
}

/// Analyzer and oracle agree when neither contradicts the other within the
/// oracle's caps (unit costs, so cost equals extra clones).
pub fn compare(
    e: &Election,
    r: Rule,
    c: CandidateId,
    rep: &AnalysisReport,
    oracle: &OracleOutcome,
    cap: usize,
) -> Comparison {
    use Comparison::*;
    match rep.verdict {
        Verdict::AlreadyWinner => match oracle {
            OracleOutcome::NotApplicable => Agree,
            o => Disagree(format!("already winner but oracle says {o:?}")),
        },
        Verdict::NotManipulable => match oracle {
            OracleOutcome::Yes { vector, .. } => Disagree(format!("not manipulable but oracle found {vector}")),
            OracleOutcome::NotApplicable => Disagree("oracle says c already wins".into()),
            OracleOutcome::No { .. } => Agree,
            OracleOutcome::CapExceeded { .. } => NoClaim,
        },
        Verdict::Manipulable => {
            if let Err(why) = certificate_holds(e, r, c, rep) {
                return Disagree(why);
            }
            let extra = rep.best().expect("checked").extra_clones();
            match oracle {
                OracleOutcome::Yes { vector, minimal, .. } => {
                    let found = vector.extra_clones();
                    if found > extra && *minimal {
                        Disagree(format!("oracle's cheapest is {vector}, the analyzer's strategy needs {extra}"))
                    } else if rep.minimal && *minimal && found < extra {
                        Disagree(format!("analyzer claims minimal {extra} but oracle found {vector}"))
                    } else {
                        Agree
                    }
                }
                OracleOutcome::No { .. } if extra <= cap => Disagree(format!("oracle finds nothing up to {cap} extra clones")),
                OracleOutcome::No { .. } => Agree,
                OracleOutcome::NotApplicable => Disagree("oracle says c already wins".into()),
                OracleOutcome::CapExceeded { .. } => NoClaim,
            }
        }
        Verdict::Inconclusive | Verdict::NecessaryConditionFails => NoClaim,
    }
}
