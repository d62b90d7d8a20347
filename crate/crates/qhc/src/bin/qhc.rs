//! Batch front end: parse, check proofs, translate, refute, run the corpus.
//!
//! Exit status: 0 on success, 1 on a logical failure (rejected proof, or
//! a refuted formula under --expect-theorem), 2 on usage or input errors.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use qhc::calculi::CalculusRegistry;
use qhc::corpus::CorpusRegistry;
use qhc::formula::{typecheck, Signature};
use qhc::kernel::{self, CheckOptions};
use qhc::parser::{parse_formula, parse_signature};
use qhc::printer::{pretty, pretty_modal};
use qhc::script::parse_proof_script;
use qhc::semantics::{refute_qhc, RefuteOutcome};
use qhc::translate;

#[derive(Parser)]
#[command(name = "qhc", version, about = "calculus of problems and propositions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct SigOpts {
    /// File with `prob ...` / `prop ...` declarations. Without it the
    /// ambient signature `a b c d f g : prob; p q r s : prop` is used.
    #[arg(long)]
    signature: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Parse and typecheck a formula; print its canonical form and sort.
    Parse {
        formula: String,
        #[command(flatten)]
        sig: SigOpts,
        #[arg(long)]
        json: bool,
    },
    /// Check a proof script.
    Check {
        file: PathBuf,
        /// Corpus directory for lemma citations.
        #[arg(long)]
        corpus_dir: Option<PathBuf>,
        /// Check against this calculus instead of the script's header.
        #[arg(long)]
        calculus: Option<String>,
        /// Register extensions from a theory file before checking.
        #[arg(long)]
        theory: Vec<PathBuf>,
        #[arg(long)]
        json: bool,
    },
    /// Apply a syntactic interpretation to a formula (or a file with a
    /// signature preamble followed by the formula).
    Translate {
        /// One of: box, nabla, negneg, diamond, embed-qs4, embed-qh4.
        #[arg(long)]
        target: String,
        input: String,
        /// Print ?/! spelled out instead of box/nabla.
        #[arg(long)]
        expand_modality: bool,
        #[command(flatten)]
        sig: SigOpts,
        #[arg(long)]
        json: bool,
    },
    /// Search for a countermodel certifying non-theoremhood.
    Refute {
        formula: String,
        /// Report every successful channel, not just the first.
        #[arg(long)]
        all_channels: bool,
        /// Exit with status 1 if the formula is refuted.
        #[arg(long)]
        expect_theorem: bool,
        #[command(flatten)]
        sig: SigOpts,
        #[arg(long)]
        json: bool,
    },
    /// Corpus operations.
    Corpus {
        #[command(subcommand)]
        command: CorpusCommand,
    },
}

#[derive(Subcommand)]
enum CorpusCommand {
    /// Check every entry and report per-entry status.
    Run {
        /// `*`-glob over entry identifiers.
        #[arg(long)]
        filter: Option<String>,
        /// Corpus directory (defaults to the shipped corpus).
        #[arg(long)]
        dir: Option<PathBuf>,
        #[arg(long)]
        json: bool,
    },
}

fn usage_error(msg: impl std::fmt::Display) -> ExitCode {
    eprintln!("error: {msg}");
    ExitCode::from(2)
}

fn load_signature(opts: &SigOpts) -> Result<Signature, String> {
    match &opts.signature {
        None => Ok(Signature::default_cli()),
        Some(path) => {
            let text =
                std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
            parse_signature(&text).map_err(|e| format!("{}: {e}", path.display()))
        }
    }
}

/// A formula argument may be a file: signature preamble lines followed by
/// the formula itself.
fn formula_input(input: &str, base: Signature) -> Result<(Signature, String), String> {
    let path = std::path::Path::new(input);
    if !path.is_file() {
        return Ok((base, input.to_string()));
    }
    let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    let mut decls = String::new();
    let mut formula = String::new();
    for line in text.lines() {
        let t = line.trim();
        if t.is_empty() || t.starts_with('#') {
            continue;
        }
        if t.starts_with("prob ") || t.starts_with("prop ") {
            decls.push_str(t);
            decls.push('\n');
        } else {
            formula.push_str(t);
            formula.push(' ');
        }
    }
    let sig = if decls.is_empty() {
        base
    } else {
        parse_signature(&decls).map_err(|e| e.to_string())?
    };
    Ok((sig, formula.trim().to_string()))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Parse { formula, sig, json } => {
            let sig = match load_signature(&sig) {
                Ok(s) => s,
                Err(e) => return usage_error(e),
            };
            match parse_formula(&formula, &sig) {
                Ok(f) => {
                    let sort = typecheck(&f, &sig).expect("parse implies well-typed");
                    if json {
                        println!(
                            "{}",
                            json!({"status": "ok", "sort": sort, "formula": pretty(&f)})
                        );
                    } else {
                        println!("{} : {sort}", pretty(&f));
                    }
                    ExitCode::SUCCESS
                }
                Err(e) => {
                    if json {
                        println!("{}", json!({"status": "error", "reason": e.to_string()}));
                    }
                    usage_error(e)
                }
            }
        }
        Command::Check {
            file,
            corpus_dir,
            calculus,
            theory,
            json,
        } => {
            let text = match std::fs::read_to_string(&file) {
                Ok(t) => t,
                Err(e) => return usage_error(format!("{}: {e}", file.display())),
            };
            let mut proof = match parse_proof_script(&text) {
                Ok(p) => p,
                Err(e) => return usage_error(e),
            };
            if let Some(name) = calculus {
                proof.calculus = name;
            }
            let register = |calculi: &mut CalculusRegistry| -> Result<(), String> {
                for path in &theory {
                    let text = std::fs::read_to_string(path)
                        .map_err(|e| format!("{}: {e}", path.display()))?;
                    let t = qhc::script::parse_theory(&text).map_err(|e| e.to_string())?;
                    let base = calculi.get(&t.base).map_err(|e| e.to_string())?;
                    let ext = base
                        .extend(t.name.clone(), t.axioms, t.rules)
                        .map_err(|e| e.to_string())?;
                    calculi.register(ext).map_err(|e| e.to_string())?;
                }
                Ok(())
            };
            let dir = corpus_dir.unwrap_or_else(qhc::corpus::default_dir);
            let result = if dir.is_dir() {
                match CorpusRegistry::load_dir(&dir) {
                    Ok(mut corpus) => {
                        if let Err(e) = register(&mut corpus.calculi) {
                            return usage_error(e);
                        }
                        kernel::check(&proof, &corpus.calculi, &corpus, &CheckOptions::default())
                    }
                    Err(e) => return usage_error(e),
                }
            } else {
                let mut calculi = CalculusRegistry::new();
                if let Err(e) = register(&mut calculi) {
                    return usage_error(e);
                }
                kernel::check(
                    &proof,
                    &calculi,
                    &kernel::EmptyResolver,
                    &CheckOptions::default(),
                )
            };
            match result {
                Ok(()) => {
                    if json {
                        println!("{}", json!({"status": "accepted"}));
                    } else {
                        println!("accepted");
                    }
                    ExitCode::SUCCESS
                }
                Err(rejection) => {
                    if json {
                        println!(
                            "{}",
                            json!({
                                "status": "rejected",
                                "failing_line": rejection.line,
                                "reason": rejection.reason,
                            })
                        );
                    } else {
                        println!("rejected: {rejection}");
                    }
                    ExitCode::from(1)
                }
            }
        }
        Command::Translate {
            target,
            input,
            expand_modality,
            sig,
            json,
        } => {
            let base = match load_signature(&sig) {
                Ok(s) => s,
                Err(e) => return usage_error(e),
            };
            let (sig, text) = match formula_input(&input, base) {
                Ok(x) => x,
                Err(e) => return usage_error(e),
            };
            let f = match parse_formula(&text, &sig) {
                Ok(f) => f,
                Err(e) => return usage_error(e),
            };
            let Some(interp) = translate::lookup(&target) else {
                return usage_error(format!("unknown translation {target}"));
            };
            match interp.apply(&f, &sig) {
                Ok(out) => {
                    let printed = if expand_modality {
                        pretty(&out)
                    } else {
                        pretty_modal(&out)
                    };
                    if json {
                        println!(
                            "{}",
                            json!({"status": "ok", "target": interp.target(), "formula": printed})
                        );
                    } else {
                        println!("{printed}");
                    }
                    ExitCode::SUCCESS
                }
                Err(e) => usage_error(e),
            }
        }
        Command::Refute {
            formula,
            all_channels,
            expect_theorem,
            sig,
            json,
        } => {
            let sig = match load_signature(&sig) {
                Ok(s) => s,
                Err(e) => return usage_error(e),
            };
            let f = match parse_formula(&formula, &sig) {
                Ok(f) => f,
                Err(e) => return usage_error(e),
            };
            match refute_qhc(&f, &sig, all_channels) {
                Ok(RefuteOutcome::Refuted(refutations)) => {
                    if json {
                        let first = &refutations[0];
                        println!(
                            "{}",
                            json!({
                                "status": "refuted",
                                "channel": first.channel,
                                "translated": pretty(&first.translated),
                                "countermodel": first.countermodel,
                                "world": first.world,
                                "all": refutations,
                            })
                        );
                    } else {
                        for r in &refutations {
                            println!(
                                "refuted via the {:?} channel: {} fails at world {} of a {}-world model",
                                r.channel,
                                pretty(&r.translated),
                                r.world,
                                r.countermodel.worlds
                            );
                        }
                    }
                    if expect_theorem {
                        ExitCode::from(1)
                    } else {
                        ExitCode::SUCCESS
                    }
                }
                Ok(RefuteOutcome::Unknown) => {
                    if json {
                        println!("{}", json!({"status": "unknown"}));
                    } else {
                        println!("unknown: neither channel refutes this formula");
                    }
                    ExitCode::SUCCESS
                }
                Err(e) => usage_error(e),
            }
        }
        Command::Corpus { command } => match command {
            CorpusCommand::Run { filter, dir, json } => {
                let dir = dir.unwrap_or_else(qhc::corpus::default_dir);
                let corpus = match CorpusRegistry::load_dir(&dir) {
                    Ok(c) => c,
                    Err(e) => {
                        eprintln!("error: {e}");
                        return ExitCode::from(1);
                    }
                };
                let report = corpus.run(filter.as_deref());
                if json {
                    println!("{}", serde_json::to_string_pretty(&report).unwrap());
                } else {
                    for entry in &report.entries {
                        let status = if entry.accepted {
                            "accepted"
                        } else {
                            "REJECTED"
                        };
                        println!("{:<28} {status} ({} us)", entry.id, entry.micros);
                        if let Some(reason) = &entry.reason {
                            println!("    {reason}");
                        }
                    }
                    println!("{}/{} accepted", report.accepted, report.total);
                }
                if report.all_accepted() {
                    ExitCode::SUCCESS
                } else {
                    ExitCode::from(1)
                }
            }
        },
    }
}
