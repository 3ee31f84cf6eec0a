//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
//! failure. Runs as a plain binary (`harness = false`).

mod common;

use cloning_core::analyzers::{analyze, borda_adversarial_ordering, copeland_strategy, AnalyzeOptions, Verdict};
use cloning_core::cloning::SuccessMode;
use cloning_core::cost::{cost_of, decide_q_cloning, Budget, CostFunction, Decision};
use cloning_core::election::condorcet_status;
use cloning_core::io::parse_majority_spec;
use cloning_core::oracle::{brute_force_search, OracleOutcome, SearchCaps};
use cloning_core::rules::scores;
use cloning_core::tournament::{k_cyclic_profile, majority_graph, mcgarvey_realize};
use cloning_core::{CandidateId, Election, Rule};
use common::{compare, fixture, fixture_path, random_election, Comparison};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::Value;
use std::process::Command;
use std::time::{Duration, Instant};

// Pinned limits.
const FIXTURE_TIME: Duration = Duration::from_secs(1);
const COVER_SEARCH_TIME: Duration = Duration::from_secs(60);
const PNK_TIME: Duration = Duration::from_secs(300);
const PNK_TRIALS: u64 = 1_000_000;
const PNK_N5_MAX: u64 = 10;
const PNK_N7_MAX: u64 = 3;
const SWEEP_ELECTIONS: usize = 500;
const SWEEP_SEED: u64 = 2024;
const COST_INSTANCES: usize = 100;
const COST_SEED: u64 = 77;

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

/// Runs the command-line tool and parses its JSON output.
fn cli(args: &[&str]) -> Result<Value, String> {
    let out = Command::new(env!("CARGO_BIN_EXE_cloning"))
        .arg("--json")
        .args(args)
        .output()
        .map_err(|e| e.to_string())?;
    if !out.status.success() {
        return Err(format!(
            "{args:?} exited with {:?}: {}",
            out.status.code(),
            String::from_utf8_lossy(&out.stderr)
        ));
    }
    serde_json::from_slice(&out.stdout).map_err(|e| e.to_string())
}

fn path(name: &str) -> String {
    fixture_path(name).to_string_lossy().into_owned()
}

fn runoff_fixture() -> Outcome {
    let start = Instant::now();
    let file = path("runoff17.txt");
    let w = cli(&["winners", &file, "--rule", "runoff"])?;
    let ws: Vec<&str> = w["winners"].as_array().unwrap().iter().map(|x| x.as_str().unwrap()).collect();
    ensure(!ws.contains(&"c"), format!("c among runoff winners {ws:?}"))?;
    let e = fixture("runoff17.txt");
    let c = e.candidate("c").unwrap();
    ensure(e.num_voters() == 17, "fixture must have 17 voters")?;
    ensure(condorcet_status(&e).loser == Some(c), "c is not the Condorcet loser")?;
    ensure(w["condorcet_loser"] == "c", "CLI does not report c as Condorcet loser")?;
    let a = cli(&["analyze", &file, "--rule", "runoff", "--preferred", "c", "--mode", "0plus"])?;
    ensure(a["verdict"] == "manipulable", format!("verdict {}", a["verdict"]))?;
    ensure(a["vector"]["c"] == 2 && a["extra_clones"] == 1, format!("vector {}", a["vector"]))?;
    ensure(a["certificate"]["kind"] == "witness", "no witness")?;
    ensure(a["witness_verified"] == true, "witness does not verify")?;
    let t = start.elapsed();
    ensure(t < FIXTURE_TIME, format!("took {t:?}"))?;
    Ok(format!("winners {ws:?}, c=2 with verified witness, {t:?}"))
}

fn borda_fixture() -> Outcome {
    let start = Instant::now();
    let file = path("borda4.txt");
    let s = cli(&["score", &file, "--rule", "borda"])?;
    let got: Vec<i64> = ["a", "b", "c", "d"].iter().map(|x| s["scores"][x].as_i64().unwrap()).collect();
    ensure(got == [9, 4, 8, 3], format!("scores {got:?}"))?;
    let v = cli(&["verify", &file, "--rule", "borda", "--preferred", "c", "--vector", "b=3", "--mode", "1"])?;
    ensure(v["result"] == "success", format!("verify {}", v["result"]))?;
    ensure(v["examined"] == 1296, format!("examined {}", v["examined"]))?;
    let a = cli(&["analyze", &file, "--rule", "borda", "--preferred", "c", "--mode", "1", "--clone-preferred-only"])?;
    ensure(a["verdict"] == "not_manipulable", format!("verdict {}", a["verdict"]))?;
    ensure(a["derived"]["r_plus"] == "inf", format!("r_plus {}", a["derived"]["r_plus"]))?;
    let t = start.elapsed();
    ensure(t < FIXTURE_TIME, format!("took {t:?}"))?;
    Ok(format!("scores 9/4/8/3, 1296 assignments succeed, r_plus = inf, {t:?}"))
}

fn tied_cover() -> Outcome {
    let start = Instant::now();
    let spec = parse_majority_spec(&std::fs::read_to_string(fixture_path("tied_cover.spec")).unwrap()).unwrap();
    let e = mcgarvey_realize(&spec).map_err(|x| x.to_string())?;
    ensure(majority_graph(&e) == spec.graph().unwrap(), "realized graph differs")?;
    let m = cli(&["mcgarvey", &path("tied_cover.spec")])?;
    ensure(m["graph_matches"] == true, "CLI round trip differs")?;
    let c = e.candidate("c").unwrap();
    let rep = copeland_strategy(&e, c).map_err(|x| x.to_string())?;
    ensure(rep.verdict == Verdict::NotManipulable, format!("verdict {}", rep.verdict))?;
    ensure(
        rep.violated.as_deref().is_some_and(|v| v.contains("system")),
        format!("violated {:?}", rep.violated),
    )?;
    let s = |l: &str| rep.derived.get(&format!("s_z({l})")).and_then(|q| q.as_integer());
    ensure(s("u") == Some(3) && s("w") == Some(3), "gaps to u and w must both be 3")?;
    let caps = SearchCaps {
        max_extra_clones: 3,
        max_assignments: 1_000_000,
    };
    let out = brute_force_search(&e, Rule::Copeland, c, SuccessMode::ZeroPlus, &CostFunction::ZeroCost, Budget::UNLIMITED, caps)
        .map_err(|x| x.to_string())?;
    ensure(matches!(out, OracleOutcome::No { .. }), format!("oracle says {out:?}"))?;
    let t = start.elapsed();
    ensure(t < COVER_SEARCH_TIME, format!("took {t:?}"))?;
    Ok(format!("graph rebuilt, system infeasible, oracle {out:?}, {t:?}"))
}

fn pnk() -> Outcome {
    let mut parts = vec![];
    for (n, max) in [(5, PNK_N5_MAX), (7, PNK_N7_MAX)] {
        let start = Instant::now();
        let trials = PNK_TRIALS.to_string();
        let out = cli(&["pnk", "--n", &n.to_string(), "--k", "20", "--trials", &trials, "--seed", "1"])?;
        let t = start.elapsed();
        let hits = out["successes"].as_u64().unwrap();
        ensure(hits <= max, format!("n={n}: {hits} successes"))?;
        ensure(t < PNK_TIME, format!("n={n} took {t:?}"))?;
        parts.push(format!("n={n}: {hits}/{PNK_TRIALS} in {t:.1?}"));
    }
    Ok(parts.join(", "))
}

#[derive(Default)]
struct SweepStats {
    compared: usize,
    agreed: usize,
    no_claim: usize,
    disagreements: Vec<String>,
    one_successes: Vec<String>,
    one_checked: usize,
    /// Oracle time per rule and mode.
    oracle_time: std::collections::BTreeMap<String, Duration>,
}

fn sweep() -> SweepStats {
    let mut rng = ChaCha8Rng::seed_from_u64(SWEEP_SEED);
    let caps = SearchCaps::default();
    let opts = AnalyzeOptions::default();
    let mut st = SweepStats::default();
    for idx in 0..SWEEP_ELECTIONS {
        let m = rng.gen_range(2..=4);
        let n = rng.gen_range(1..=5);
        let e = random_election(&mut rng, m, n);
        let c = CandidateId(rng.gen_range(0..m));
        let mut runs: Vec<(Rule, SuccessMode)> = vec![];
        for r in [Rule::Plurality, Rule::Veto, Rule::Maximin, Rule::PluralityRunoff] {
            runs.push((r, SuccessMode::ZeroPlus));
            runs.push((r, SuccessMode::One));
        }
        runs.push((Rule::Borda, SuccessMode::ZeroPlus));
        if n % 2 == 1 {
            runs.push((Rule::Copeland, SuccessMode::ZeroPlus));
            runs.push((Rule::Copeland, SuccessMode::One));
        }
        for (r, mode) in runs {
            let rep = analyze(&e, r, c, mode, &opts).expect("analyzer");
            let t = Instant::now();
            let oracle = brute_force_search(&e, r, c, mode, &CostFunction::UnitCost, Budget::UNLIMITED, caps).expect("oracle");
            *st.oracle_time.entry(format!("{r}/{mode}")).or_default() += t.elapsed();
            let tag = || format!("#{idx} {r} {mode} c={} {:?}", e.label(c), e.votes().collect::<Vec<_>>());
            if mode == SuccessMode::One && matches!(r, Rule::Plurality | Rule::PluralityRunoff | Rule::Maximin) {
                st.one_checked += 1;
                if let OracleOutcome::Yes { vector, .. } = &oracle {
                    st.one_successes.push(format!("{} found {vector}", tag()));
                }
            }
            st.compared += 1;
            match compare(&e, r, c, &rep, &oracle, caps.max_extra_clones) {
                Comparison::Agree => st.agreed += 1,
                Comparison::NoClaim => st.no_claim += 1,
                Comparison::Disagree(why) => st.disagreements.push(format!("{}: {why}", tag())),
            }
        }
    }
    st
}

fn agreement(st: &SweepStats) -> Outcome {
    ensure(
        st.disagreements.is_empty(),
        format!("{} disagreements, first: {}", st.disagreements.len(), st.disagreements[..].first().map_or("", |s| s)),
    )?;
    let times: Vec<String> = st.oracle_time.iter().map(|(k, t)| format!("{k} {t:.1?}")).collect();
    Ok(format!(
        "{SWEEP_ELECTIONS} elections, {} comparisons: {} agree, {} without a decidable claim; oracle time {}",
        st.compared,
        st.agreed,
        st.no_claim,
        times.join(", ")
    ))
}

fn impossibility(st: &SweepStats) -> Outcome {
    ensure(
        st.one_successes.is_empty(),
        format!("{} exceptions, first: {}", st.one_successes.len(), st.one_successes[..].first().map_or("", |s| s)),
    )?;
    Ok(format!("{} searches in mode 1, none successful", st.one_checked))
}

fn identities() -> Outcome {
    for k in 2..=7 {
        let e = k_cyclic_profile(k).map_err(|x| x.to_string())?;
        let sc = scores(&e, Rule::Maximin).unwrap();
        ensure(sc.scores.iter().all(|&s| s == 1), format!("k={k}: maximin scores {:?}", sc.scores))?;
    }
    let mut checked = 0;
    for n in 1..=7usize {
        for k in 1..=5usize {
            let res = borda_adversarial_ordering(n, k);
            if n % 2 == 1 && n < 3 {
                ensure(res.is_err(), format!("n={n} k={k} must be unsupported"))?;
                continue;
            }
            let orders = res.map_err(|x| x.to_string())?;
            // Score each clone by a direct Borda count on a profile of just the clones.
            let labels: Vec<String> = (0..k).map(|i| format!("x{i}")).collect();
            let votes = orders.iter().map(|p| p.iter().map(|&i| CandidateId(i)).collect()).collect();
            let e = Election::from_rankings(labels, votes).map_err(|x| x.to_string())?;
            let sc = scores(&e, Rule::Borda).unwrap().scores;
            let full = (n * (k - 1)) as i64;
            for (i, &s) in sc.iter().enumerate() {
                let expect = if n % 2 == 0 || k % 2 == 1 || i < k - 1 {
                    (full + 1) / 2
                } else {
                    ((k - 1) * (n - 1) / 2) as i64
                };
                ensure(s == expect, format!("n={n} k={k}: clone {i} gains {s}, expected {expect}"))?;
                ensure(s <= (full + 1) / 2, format!("n={n} k={k}: clone {i} over the bound"))?;
            }
            checked += 1;
        }
    }
    Ok(format!("k-cyclic 2..=7 all score 1; {checked} adversarial orderings exact"))
}

fn fast_paths() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(COST_SEED);
    let caps = SearchCaps::default();
    let p = CostFunction::UnitCost;
    let combos = [
        (Rule::Plurality, SuccessMode::ZeroPlus),
        (Rule::Plurality, SuccessMode::One),
        (Rule::Veto, SuccessMode::ZeroPlus),
        (Rule::Veto, SuccessMode::One),
        (Rule::Maximin, SuccessMode::ZeroPlus),
        (Rule::Maximin, SuccessMode::One),
        (Rule::PluralityRunoff, SuccessMode::ZeroPlus),
        (Rule::PluralityRunoff, SuccessMode::One),
        (Rule::Borda, SuccessMode::ZeroPlus),
    ];
    let (mut budgets, mut unsettled) = (0, 0);
    for idx in 0..COST_INSTANCES {
        let m = rng.gen_range(2..=4);
        let n = rng.gen_range(1..=4);
        let e = random_election(&mut rng, m, n);
        let c = CandidateId(rng.gen_range(0..m));
        for (r, mode) in combos {
            let rep = analyze(&e, r, c, mode, &AnalyzeOptions::default()).unwrap();
            let top = match rep.best() {
                Some(s) => match cost_of(&p, &s.vector).unwrap() {
                    cloning_core::Cost::Finite(x) => x,
                    cloning_core::Cost::Infinite => unreachable!("unit costs are finite"),
                },
                None => caps.max_extra_clones as u64,
            };
            let mut seen_yes = false;
            // Unit costs equal extra clones, so the oracle sees every vector within budget.
            for b in 0..=top.min(caps.max_extra_clones as u64) {
                let budget = Budget::finite(b);
                let d = decide_q_cloning(&e, r, c, mode, &p, budget, caps).unwrap();
                let o = brute_force_search(&e, r, c, mode, &p, budget, caps).unwrap();
                let tag = format!("#{idx} {r} {mode} B={b} {:?}", e.votes().collect::<Vec<_>>());
                budgets += 1;
                match (&d, &o) {
                    (Decision::Yes { .. }, OracleOutcome::Yes { .. }) => {}
                    (Decision::No { .. }, OracleOutcome::No { .. } | OracleOutcome::NotApplicable) => {}
                    (Decision::No { .. }, OracleOutcome::CapExceeded { .. }) => unsettled += 1,
                    (Decision::Inconclusive(_), _) => return Err(format!("{tag}: fast path inconclusive")),
                    _ => return Err(format!("{tag}: decision {d:?} vs oracle {o:?}")),
                }
                if seen_yes && !d.is_yes() {
                    return Err(format!("{tag}: not monotone in the budget"));
                }
                seen_yes |= d.is_yes();
            }
        }
    }
    Ok(format!(
        "{COST_INSTANCES} instances, {budgets} budgets compared ({unsettled} beyond the oracle's caps), monotone"
    ))
}

fn main() {
    let mut failed = 0;
    let mut report = |n: usize, name: &str, f: &dyn Fn() -> Outcome| {
        let start = Instant::now();
        let res = f();
        let t = start.elapsed();
        match res {
            Ok(detail) => println!("PASS criterion {n} ({name}): {detail} [{t:.1?}]"),
            Err(why) => {
                failed += 1;
                println!("FAIL criterion {n} ({name}): {why} [{t:.1?}]");
            }
        }
    };
    report(1, "seventeen-voter runoff", &runoff_fixture);
    report(2, "four-voter borda", &borda_fixture);
    report(3, "covered copeland candidate", &tied_cover);
    report(4, "random permutation experiment", &pnk);
    let start = Instant::now();
    let st = sweep();
    let took = start.elapsed();
    report(5, "analyzer/oracle agreement", &|| agreement(&st).map(|d| format!("{d}, sweep {took:.1?}")));
    report(6, "no success under every ordering", &|| impossibility(&st));
    report(7, "construction identities", &identities);
    report(8, "cost fast paths", &fast_paths);
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
