//! `hoass` — command-line front end for the operad engine.
//!
//! Exit codes: 0 when every requested check passes, 1 when a check fails,
//! 2 for usage, parse and cap errors, 3 when the ∂▼ signs are inconsistent.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use hoass::diff::{d_squared_check, solve_down_signs, DOWN_CAP};
use hoass::homology::{build_complex, cohomology_dims, format_dims, Operad, Profile};
use hoass::strata::{codim1_strata, to_dot, Space};
use hoass::{parse, Corolla, Differential, Error, Family, Structure, Tree};

/// Arity cap for `d2` on the families other than ▼.
const D2_CAP: usize = 8;

#[derive(Parser)]
#[command(name = "hoass", version, about = "Symbolic engine for the dg operads A∞, Mor(As)∞ and Ho(As)∞")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Differentiate a tree, e.g. `diff "dn2(1,2)"`.
    Diff {
        /// Tree in the text grammar.
        expr: String,
    },
    /// Check ∂² = 0 on the generators of one family up to an arity.
    D2 {
        /// Generator family: b, w, lt, dn, rt or sq.
        #[arg(long)]
        family: String,
        #[arg(long)]
        max_arity: usize,
    },
    /// Cohomology of one arity component of a model operad.
    Cohomology {
        #[arg(long)]
        arity: usize,
        /// mixed, pure-solid or pure-dashed.
        #[arg(long, default_value = "mixed")]
        profile: Profile,
        /// ainf, morinf or hoinf.
        #[arg(long, default_value = "hoinf")]
        operad: Operad,
        /// Dump the whole complex instead; only `json` is supported.
        #[arg(long, value_parser = ["json"])]
        emit: Option<String>,
    },
    /// List the codimension-one boundary strata of a compactified space.
    Strata {
        /// c, fc or conf.
        #[arg(long)]
        space: Space,
        #[arg(long)]
        n: usize,
        /// Emit a graphviz description per stratum.
        #[arg(long)]
        dot: bool,
    },
    /// Check the A∞ algebra, morphism and homotopy relations of a structure file.
    AinftyCheck {
        structure: PathBuf,
        #[arg(long, default_value_t = 4)]
        nmax: usize,
    },
    /// Sign solver for the ∂▼ differential.
    Signs {
        #[command(subcommand)]
        action: SignsAction,
    },
}

#[derive(Subcommand)]
enum SignsAction {
    /// Solve the signs up to an arity and print the table.
    Solve {
        #[arg(long, default_value_t = 5)]
        max_arity: usize,
        /// Print the table and the per-arity report as one JSON document.
        #[arg(long)]
        json: bool,
    },
}

enum Failure {
    Check,
    Usage(String),
    Signs(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::InconsistentSigns { .. } => Failure::Signs(e.to_string()),
            other => Failure::Usage(other.to_string()),
        }
    }
}

type Outcome = Result<(), Failure>;

fn max_down_arity(t: &Tree) -> usize {
    t.vertices().iter().filter(|c| c.family() == Family::Down).map(Corolla::arity).max().unwrap_or(1)
}

fn differential(max_down: usize) -> Result<Differential, Failure> {
    if max_down > DOWN_CAP {
        return Err(Failure::Usage(format!("∂▼ signs are solved up to arity {DOWN_CAP}, asked for {max_down}")));
    }
    Ok(Differential::solved(max_down.max(1))?)
}

fn run_diff(expr: &str) -> Outcome {
    let t = parse(expr)?;
    let d = differential(max_down_arity(&t))?.tree(&t)?;
    for line in d.to_lines() {
        println!("{line}");
    }
    Ok(())
}

fn run_d2(family: &str, max_arity: usize) -> Outcome {
    let fam = Family::from_name(family)
        .ok_or_else(|| Failure::Usage(format!("unknown family `{family}` (expected b, w, lt, dn, rt or sq)")))?;
    let cap = if fam == Family::Down { DOWN_CAP } else { D2_CAP };
    if max_arity > cap {
        return Err(Error::ArityCap { what: format!("d2 on {family}"), arity: max_arity, cap }.into());
    }
    let diff = differential(if fam == Family::Down { max_arity } else { 1 })?;
    let mut ok = true;
    for n in fam.min_arity()..=max_arity {
        let report = d_squared_check(Corolla::of(fam, n), &diff)?;
        if report.passed() {
            println!("ok   ∂²{} = 0 ({} first-order terms)", report.corolla, report.first_order_terms);
        } else {
            ok = false;
            println!("FAIL ∂²{}: {} surviving terms", report.corolla, report.surviving.len());
            for line in report.surviving.to_lines() {
                println!("     {line}");
            }
        }
    }
    if ok {
        Ok(())
    } else {
        Err(Failure::Check)
    }
}

fn run_cohomology(arity: usize, profile: Profile, operad: Operad, emit: Option<&str>) -> Outcome {
    let diff = differential(arity.min(DOWN_CAP))?;
    let c = build_complex(arity, profile, operad, &diff)?;
    match emit {
        Some(_) => println!("{}", serde_json::to_string_pretty(&c.to_json()).expect("json")),
        None => println!("{}", format_dims(&cohomology_dims(&c))),
    }
    Ok(())
}

fn run_strata(space: Space, n: usize, dot: bool) -> Outcome {
    let strata = codim1_strata(space, n)?;
    for (i, s) in strata.iter().enumerate() {
        if dot {
            println!("{}", to_dot(s, &format!("stratum{}", i + 1)));
        } else {
            println!("{}", s.descriptor);
        }
    }
    println!("count: {}", strata.len());
    Ok(())
}

fn run_ainfty_check(path: &PathBuf, nmax: usize) -> Outcome {
    let structure = Structure::load(path)?;
    let report = structure.check(nmax);
    for line in report.lines() {
        println!("{line}");
    }
    if report.passed() {
        Ok(())
    } else {
        Err(Failure::Check)
    }
}

fn run_signs(max_arity: usize, json: bool) -> Outcome {
    if !(2..=DOWN_CAP).contains(&max_arity) {
        return Err(Failure::Usage(format!("--max-arity must lie in 2..={DOWN_CAP}")));
    }
    let report = solve_down_signs(max_arity)?;
    if json {
        let arities: Vec<serde_json::Value> = report
            .arities
            .iter()
            .map(|a| {
                serde_json::json!({
                    "arity": a.arity,
                    "unknowns": a.unknowns,
                    "free_classes": a.free_classes,
                    "printed_compared": a.printed_compared,
                    "discrepancies": a.discrepancies.iter().map(|d| serde_json::json!({
                        "term": d.term.to_string(), "printed": d.printed, "solved": d.solved,
                    })).collect::<Vec<_>>(),
                })
            })
            .collect();
        let doc = serde_json::json!({ "table": report.table.to_json(), "arities": arities, "unique": report.unique() });
        println!("{}", serde_json::to_string_pretty(&doc).expect("json"));
        return Ok(());
    }
    println!("cluster: {:+} lt_n, {:+} rt_n", report.table.left, report.table.right);
    for (n, terms) in &report.table.down {
        for (term, s) in terms {
            println!("n={n} {term} {s:+}");
        }
    }
    for a in &report.arities {
        println!(
            "arity {}: {} unknowns, {} free classes, {} printed signs compared, {} discrepancies",
            a.arity,
            a.unknowns,
            a.free_classes,
            a.printed_compared,
            a.discrepancies.len()
        );
    }
    for d in report.discrepancies() {
        println!("discrepancy: n={} {} printed {:+} solved {:+}", d.arity, d.term, d.printed, d.solved);
    }
    println!("unique: {}", report.unique());
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Diff { expr } => run_diff(expr),
        Command::D2 { family, max_arity } => run_d2(family, *max_arity),
        Command::Cohomology { arity, profile, operad, emit } => {
            run_cohomology(*arity, *profile, *operad, emit.as_deref())
        }
        Command::Strata { space, n, dot } => run_strata(*space, *n, *dot),
        Command::AinftyCheck { structure, nmax } => run_ainfty_check(structure, *nmax),
        Command::Signs { action: SignsAction::Solve { max_arity, json } } => run_signs(*max_arity, *json),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Check) => ExitCode::from(1),
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Signs(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(3)
        }
    }
}
