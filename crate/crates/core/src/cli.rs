//! Command-line front end. Exit status: 0 answered, 1 inconclusive or over
//! the search caps, 2 usage or input error.

use clap::{Args, Parser, Subcommand};
use cloning_core::analyzers::{analyze, AnalysisReport, AnalyzeOptions, Certificate, Verdict};
use cloning_core::cloning::{
    apply_cloning, check_success_exact_with, clone_wins, estimate_success_probability, ExactOptions, ExactOutcome,
};
use cloning_core::cost::{decide_q_cloning, Budget, Cost, CostFunction, Decision};
use cloning_core::election::condorcet_status;
use cloning_core::io::{format_vector, parse_costs, parse_election, parse_majority_spec, parse_mode, parse_vector, serialize_election};
use cloning_core::oracle::{pnk_experiment, SearchCaps};
use cloning_core::rules::{scores, winners};
use cloning_core::tournament::{majority_graph, mcgarvey_realize};
use cloning_core::{CandidateId, Election, Error, Rule};
use serde_json::{json, Map, Value};
use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "cloning", version, about = "Election manipulation by cloning candidates")]
struct Cli {
    /// Emit JSON instead of text.
    #[arg(long, global = true)]
    json: bool,
    /// Largest number of extra clones the brute-force search tries.
    #[arg(long, global = true, default_value_t = 4)]
    caps_clones: usize,
    /// Largest ordering space checked exhaustively for one vector.
    #[arg(long, global = true, default_value_t = 1_000_000)]
    caps_assignments: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct RuleArgs {
    /// plurality, veto, borda, k-approval, runoff, maximin or copeland.
    #[arg(long)]
    rule: String,
    /// Approval width for k-approval.
    #[arg(long)]
    k: Option<usize>,
}

impl RuleArgs {
    fn rule(&self) -> Result<Rule, Error> {
        Rule::parse(&self.rule, self.k)
    }
}

#[derive(Subcommand)]
enum Command {
    /// Scores of every candidate.
    Score {
        file: PathBuf,
        #[command(flatten)]
        rule: RuleArgs,
    },
    /// Co-winners, plus the Condorcet winner and loser if any.
    Winners {
        file: PathBuf,
        #[command(flatten)]
        rule: RuleArgs,
    },
    /// Runs the constructive analyzer for the rule.
    Analyze {
        file: PathBuf,
        #[command(flatten)]
        rule: RuleArgs,
        /// Label of the candidate the manipulator wants to win.
        #[arg(long)]
        preferred: String,
        /// 0plus, 1, or a probability such as 1/2.
        #[arg(long, default_value = "0plus")]
        mode: String,
        /// Borda: only consider cloning the preferred candidate.
        #[arg(long)]
        clone_preferred_only: bool,
        #[arg(long, default_value_t = 1000)]
        samples: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Decides whether a successful cloning fits the budget.
    Solve {
        file: PathBuf,
        #[command(flatten)]
        rule: RuleArgs,
        /// Label of the candidate the manipulator wants to win.
        #[arg(long)]
        preferred: String,
        #[arg(long, default_value = "0plus")]
        mode: String,
        /// zc, uc, or a cost table file.
        #[arg(long, default_value = "uc")]
        costs: String,
        /// Nonnegative integer or inf.
        #[arg(long, default_value = "inf")]
        budget: String,
    },
    /// Checks one cloning vector against every ordering assignment.
    Verify {
        file: PathBuf,
        #[command(flatten)]
        rule: RuleArgs,
        /// Label of the candidate the manipulator wants to win.
        #[arg(long)]
        preferred: String,
        /// name=k pairs, comma separated.
        #[arg(long)]
        vector: String,
        #[arg(long, default_value = "1")]
        mode: String,
        /// Visit one assignment per symmetry class.
        #[arg(long)]
        reduce_symmetry: bool,
    },
    /// Samples ordering assignments to estimate the success probability.
    Estimate {
        file: PathBuf,
        #[command(flatten)]
        rule: RuleArgs,
        /// Label of the candidate the manipulator wants to win.
        #[arg(long)]
        preferred: String,
        /// name=k pairs, comma separated.
        #[arg(long)]
        vector: String,
        #[arg(long, default_value_t = 10_000)]
        samples: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Builds a profile realizing a majority specification.
    Mcgarvey { spec: PathBuf },
    /// Random-permutation experiment on clone predecessors.
    Pnk {
        /// Permutations per trial.
        #[arg(long)]
        n: usize,
        /// Length of each permutation.
        #[arg(long)]
        k: usize,
        #[arg(long, default_value_t = 1_000_000)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

/// What a command produced: text, JSON, and whether it settled the question.
struct Output {
    text: String,
    json: Value,
    settled: bool,
}

enum Failure {
    Usage(String),
    Caps(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::SearchSpaceTooLarge { .. } => Failure::Caps(e.to_string()),
            _ => Failure::Usage(e.to_string()),
        }
    }
}

/// Writes to stdout; a closed pipe is not an error for a report.
fn emit(s: &str) {
    let _ = std::io::stdout().write_all(s.as_bytes());
}

pub fn run() -> ExitCode {
    let cli = Cli::parse();
    if cli.caps_assignments == 0 {
        eprintln!("error: --caps-assignments must be positive");
        return ExitCode::from(2);
    }
    let caps = SearchCaps {
        max_extra_clones: cli.caps_clones,
        max_assignments: cli.caps_assignments,
    };
    match execute(&cli.command, caps) {
        Ok(out) => {
            if cli.json {
                emit(&format!("{}\n", serde_json::to_string_pretty(&out.json).expect("serializable")));
            } else {
                emit(&out.text);
            }
            ExitCode::from(if out.settled { 0 } else { 1 })
        }
        Err(Failure::Caps(msg)) => {
            if cli.json {
                emit(&format!("{}\n", json!({ "status": "cap-exceeded", "message": msg })));
            } else {
                eprintln!("cap exceeded: {msg}");
            }
            ExitCode::from(1)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn load(path: &Path) -> Result<Election, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
    parse_election(&text).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn names(e: &Election, ids: impl IntoIterator<Item = CandidateId>) -> Vec<String> {
    ids.into_iter().map(|c| e.label(c).to_string()).collect()
}

fn vector_json(e: &Election, v: &cloning_core::cloning::CloningVector) -> Value {
    Value::Object(e.candidates().map(|c| (e.label(c).to_string(), json!(v.get(c)))).collect())
}

fn cost_function(spec: &str, e: &Election) -> Result<CostFunction, Failure> {
    match spec {
        "zc" => Ok(CostFunction::ZeroCost),
        "uc" => Ok(CostFunction::UnitCost),
        path => {
            let text = std::fs::read_to_string(path).map_err(|err| Failure::Usage(format!("{path}: {err}")))?;
            parse_costs(&text, e).map_err(|err| Failure::Usage(format!("{path}: {err}")))
        }
    }
}

/// Prints the expanded ballots of a witness and re-checks it.
fn describe_witness(e: &Election, report: &AnalysisReport, out: &mut String) -> Option<bool> {
    let s = report.best()?;
    let Certificate::Witness(o) = &s.certificate else { return None };
    let x = apply_cloning(e, &s.vector, o).ok()?;
    let _ = writeln!(out, "witness ballots:");
    for (i, vote) in x.election.votes().enumerate() {
        let _ = writeln!(out, "  {}: {}", i + 1, names(&x.election, vote.iter().copied()).join(" > "));
    }
    clone_wins(e, report.rule, report.preferred, &s.vector, o).ok()
}

fn execute(cmd: &Command, caps: SearchCaps) -> Result<Output, Failure> {
    match cmd {
        Command::Score { file, rule } => {
            let e = load(file)?;
            let r = rule.rule()?;
            let sc = scores(&e, r)?;
            let mut text = String::new();
            let mut map = Map::new();
            for c in e.candidates() {
                let _ = writeln!(text, "{} {}", e.label(c), sc.get(c));
                map.insert(e.label(c).to_string(), json!(sc.get(c)));
            }
            Ok(Output {
                text,
                json: json!({ "rule": r, "scores": map }),
                settled: true,
            })
        }
        Command::Winners { file, rule } => {
            let e = load(file)?;
            let r = rule.rule()?;
            let w = names(&e, winners(&e, r));
            let cs = condorcet_status(&e);
            let label = |c: Option<CandidateId>| c.map(|c| e.label(c).to_string());
            let (cw, cl) = (label(cs.winner), label(cs.loser));
            let text = format!(
                "winners: {}\ncondorcet winner: {}\ncondorcet loser: {}\n",
                w.join(", "),
                cw.as_deref().unwrap_or("none"),
                cl.as_deref().unwrap_or("none")
            );
            Ok(Output {
                text,
                json: json!({ "rule": r, "winners": w, "condorcet_winner": cw, "condorcet_loser": cl }),
                settled: true,
            })
        }
        Command::Analyze {
            file,
            rule,
            preferred,
            mode,
            clone_preferred_only,
            samples,
            seed,
        } => {
            let e = load(file)?;
            let r = rule.rule()?;
            let c = e.candidate(preferred)?;
            let mode = parse_mode(mode)?;
            let opts = AnalyzeOptions {
                clone_preferred_only: *clone_preferred_only,
                samples: *samples,
                seed: *seed,
                ..AnalyzeOptions::default()
            };
            let rep = analyze(&e, r, c, mode, &opts)?;
            let mut text = format!("verdict: {}\n", rep.verdict);
            let mut j = json!({ "rule": r, "preferred": preferred, "mode": mode, "verdict": rep.verdict });
            if let Some(s) = rep.best() {
                let _ = writeln!(text, "vector: {}", format_vector(&s.vector, &e));
                let _ = writeln!(text, "extra clones: {}", s.extra_clones());
                let _ = writeln!(text, "certificate: {}", s.certificate.kind());
                if let Certificate::SampledEvidence { samples, successes, .. } = s.certificate {
                    let _ = writeln!(text, "sampled successes: {successes}/{samples}");
                }
                j["vector"] = vector_json(&e, &s.vector);
                j["extra_clones"] = json!(s.extra_clones());
                j["certificate"] = json!(s.certificate);
                j["minimal"] = json!(rep.minimal);
                if let Some(ok) = describe_witness(&e, &rep, &mut text) {
                    let _ = writeln!(text, "witness verified: {}", if ok { "yes" } else { "no" });
                    j["witness_verified"] = json!(ok);
                }
            }
            if let Some(v) = &rep.violated {
                let _ = writeln!(text, "violated: {v}");
                j["violated"] = json!(v);
            }
            if let Some(why) = &rep.reason {
                let _ = writeln!(text, "reason: {why}");
                j["reason"] = json!(why);
            }
            for (k, q) in &rep.derived {
                let _ = writeln!(text, "{k} = {q}");
            }
            j["derived"] = json!(rep.derived);
            Ok(Output {
                text,
                json: j,
                settled: rep.verdict != Verdict::Inconclusive,
            })
        }
        Command::Solve {
            file,
            rule,
            preferred,
            mode,
            costs,
            budget,
        } => {
            let e = load(file)?;
            let r = rule.rule()?;
            let c = e.candidate(preferred)?;
            let mode = parse_mode(mode)?;
            let p = cost_function(costs, &e)?;
            let b = Budget(budget.parse::<Cost>()?);
            let d = decide_q_cloning(&e, r, c, mode, &p, b, caps)?;
            let mut j = json!({ "rule": r, "preferred": preferred, "mode": mode, "budget": b });
            let (text, settled) = match &d {
                Decision::Yes { strategy, cost, minimal } => {
                    j["decision"] = json!("yes");
                    j["vector"] = vector_json(&e, &strategy.vector);
                    j["cost"] = json!(cost);
                    j["certificate"] = json!(strategy.certificate.kind());
                    j["minimal"] = json!(minimal);
                    (
                        format!(
                            "decision: yes\nvector: {}\ncost: {cost}\ncertificate: {}\n",
                            format_vector(&strategy.vector, &e),
                            strategy.certificate.kind()
                        ),
                        true,
                    )
                }
                Decision::No { reason } => {
                    j["decision"] = json!("no");
                    j["reason"] = json!(reason);
                    (format!("decision: no\nreason: {reason}\n"), true)
                }
                Decision::Inconclusive(why) => {
                    j["decision"] = json!("inconclusive");
                    j["reason"] = json!(why);
                    (format!("decision: inconclusive\nreason: {why}\n"), false)
                }
            };
            Ok(Output { text, json: j, settled })
        }
        Command::Verify {
            file,
            rule,
            preferred,
            vector,
            mode,
            reduce_symmetry,
        } => {
            let e = load(file)?;
            let r = rule.rule()?;
            let c = e.candidate(preferred)?;
            let v = parse_vector(vector, &e)?;
            let mode = parse_mode(mode)?;
            let opts = ExactOptions {
                limit: caps.max_assignments,
                reduce_symmetry: *reduce_symmetry,
            };
            let out = check_success_exact_with(&e, r, c, &v, mode, opts)?;
            let mut j = json!({ "rule": r, "preferred": preferred, "mode": mode, "vector": vector_json(&e, &v) });
            let text = match &out {
                ExactOutcome::NotApplicable(why) => {
                    j["result"] = json!("not-applicable");
                    j["reason"] = json!(why);
                    format!("result: not applicable\nreason: {why}\n")
                }
                ExactOutcome::Success { examined, .. } | ExactOutcome::Failure { examined, .. } => {
                    let ok = out.is_success();
                    j["result"] = json!(if ok { "success" } else { "failure" });
                    j["examined"] = json!(examined);
                    format!(
                        "result: {}\nassignments examined: {examined}\n",
                        if ok { "success" } else { "failure" }
                    )
                }
            };
            Ok(Output {
                text,
                json: j,
                settled: true,
            })
        }
        Command::Estimate {
            file,
            rule,
            preferred,
            vector,
            samples,
            seed,
        } => {
            let e = load(file)?;
            let r = rule.rule()?;
            let c = e.candidate(preferred)?;
            let v = parse_vector(vector, &e)?;
            let est = estimate_success_probability(&e, r, c, &v, *samples, *seed)?;
            Ok(Output {
                text: format!(
                    "successes: {}/{}\nestimate: {:.6}\n",
                    est.successes,
                    est.samples,
                    est.value()
                ),
                json: json!({
                    "rule": r, "preferred": preferred, "vector": vector_json(&e, &v),
                    "seed": seed, "successes": est.successes, "samples": est.samples, "estimate": est.value()
                }),
                settled: true,
            })
        }
        Command::Mcgarvey { spec } => {
            let text = std::fs::read_to_string(spec).map_err(|err| Failure::Usage(format!("{}: {err}", spec.display())))?;
            let s = parse_majority_spec(&text).map_err(|err| Failure::Usage(format!("{}: {err}", spec.display())))?;
            let e = mcgarvey_realize(&s)?;
            let matches = majority_graph(&e) == s.graph()?;
            let doc = serialize_election(&e);
            Ok(Output {
                text: doc.clone(),
                json: json!({ "voters": e.num_voters(), "election": doc, "graph_matches": matches }),
                settled: matches,
            })
        }
        Command::Pnk { n, k, trials, seed } => {
            let res = pnk_experiment(*n, *k, *trials, *seed)?;
            Ok(Output {
                text: format!(
                    "successes: {}/{}\nestimate: {}\n",
                    res.successes,
                    res.trials,
                    res.fraction()
                ),
                json: json!({ "n": n, "k": k, "trials": trials, "seed": seed, "successes": res.successes, "estimate": res.fraction() }),
                settled: true,
            })
        }
    }
}
