use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Parser, Subcommand};

use conflict_resolution::cnd::cr_to_cnd;
use conflict_resolution::graph::graph_from_cr;
use conflict_resolution::io::{
    export_dot, load_certificate, parse_literal, parse_tptp_cnf, Calculus, Certificate, ProblemFile,
};
use conflict_resolution::search::{solve, Limits, SolverOptions, Verdict};
use conflict_resolution::transform::{
    combine_split_refutations, resolution_to_cr, simulation_metrics, split_components,
};
use conflict_resolution::{Clause, CrDerivation};

const UNSAT: u8 = 20;
const CHECK_FAILED: u8 = 2;
const USAGE: u8 = 1;

#[derive(Parser)]
#[command(name = "crprove", version, about = "Conflict resolution prover and proof checker")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Search for a CR refutation of a TPTP CNF problem.
    Prove {
        problem: PathBuf,
        #[arg(long, default_value_t = Limits::default().max_decisions)]
        max_decisions: usize,
        #[arg(long, default_value_t = Limits::default().max_propagations)]
        max_propagations: usize,
        #[arg(long, default_value_t = Limits::default().max_term_depth)]
        max_depth: usize,
        /// First decision literal, e.g. `p(X)` or `~q`.
        #[arg(long)]
        seed_decision: Option<String>,
        /// Write the refutation certificate here.
        #[arg(long)]
        emit_cr: Option<PathBuf>,
    },
    /// Check a certificate against a problem.
    Check {
        #[arg(long)]
        calculus: Calculus,
        certificate: PathBuf,
        problem: PathBuf,
    },
    /// Translate a resolution certificate into a CR certificate.
    Res2cr {
        certificate: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Translate a CR proof certificate into a CND certificate.
    Cr2cnd {
        certificate: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Combine refutations of the components of a split clause.
    SplitCombine {
        problem: PathBuf,
        #[arg(required = true)]
        certificates: Vec<PathBuf>,
        /// Name of the split clause; found from the certificates if omitted.
        #[arg(long)]
        clause: Option<String>,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Export the conflict graph of one conflict node as DOT.
    Graph {
        certificate: PathBuf,
        #[arg(long)]
        node: usize,
        /// Output file, `-` for stdout.
        #[arg(long, default_value = "-")]
        dot: PathBuf,
    },
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

fn read_problem(path: &Path) -> Result<ProblemFile> {
    parse_tptp_cnf(&read(path)?).with_context(|| format!("{}", path.display()))
}

fn read_certificate(path: &Path) -> Result<Certificate> {
    load_certificate(&read(path)?).with_context(|| format!("{}", path.display()))
}

fn write_out(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) if p != Path::new("-") => fs::write(p, text).with_context(|| format!("cannot write {}", p.display())),
        _ => Ok(std::io::stdout().write_all(text.as_bytes())?),
    }
}

fn run(command: Command) -> Result<u8> {
    match command {
        Command::Prove { problem, max_decisions, max_propagations, max_depth, seed_decision, emit_cr } => {
            let file = read_problem(&problem)?;
            let seed =
                seed_decision.map(|s| parse_literal(&s).map_err(|e| anyhow!("--seed-decision: {e}"))).transpose()?;
            let opts =
                SolverOptions { limits: Limits { max_decisions, max_propagations, max_term_depth: max_depth }, seed };
            let result = solve(&file.clause_set(), &opts);
            let s = &result.stats;
            println!(
                "c decisions {} propagations {} conflicts {} learned {} backjumps {}",
                s.decisions, s.propagations, s.conflicts, s.learned, s.backjumps
            );
            for c in &result.learned {
                println!("c learned {c}");
            }
            match &result.verdict {
                Verdict::Unsat(d) => {
                    println!("s UNSATISFIABLE");
                    if let Some(path) = emit_cr {
                        let cert = Certificate::cr(d.clone(), Some(file.digest()));
                        write_out(Some(&path), &cert.to_string())?;
                    }
                    Ok(UNSAT)
                }
                Verdict::Unknown(reason) => {
                    println!("s UNKNOWN ({reason})");
                    Ok(0)
                }
            }
        }
        Command::Check { calculus, certificate, problem } => {
            let cert = conflict_resolution::io::parse_certificate(&read(&certificate)?)
                .with_context(|| format!("{}", certificate.display()))?;
            let file = read_problem(&problem)?;
            if cert.proof.calculus() != calculus {
                bail!("certificate is for calculus {}, not {}", cert.proof.calculus().name(), calculus.name());
            }
            let violations = cert.check_against(&file);
            if violations.is_empty() {
                println!("ok {}", describe(&cert));
                Ok(0)
            } else {
                for v in &violations {
                    println!("violation {v}");
                }
                println!("rejected");
                Ok(CHECK_FAILED)
            }
        }
        Command::Res2cr { certificate, output } => {
            let cert = read_certificate(&certificate)?;
            let problem = cert.problem.clone();
            let res = cert.into_res()?;
            let sim = resolution_to_cr(&res)?;
            let m = simulation_metrics(&res, &sim)?;
            eprintln!(
                "c resolutions {} factorings {} length {} (2n+m+2 = {}) size {} (closed form {})",
                m.n, m.m, m.length_cr, m.length_formula, m.size_cr, m.size_formula
            );
            write_out(output.as_deref(), &Certificate::cr(sim.cr, problem).to_string())?;
            Ok(0)
        }
        Command::Cr2cnd { certificate, output } => {
            let cert = read_certificate(&certificate)?;
            let problem = cert.problem.clone();
            let cnd = cr_to_cnd(&cert.into_cr()?)?;
            write_out(output.as_deref(), &Certificate::cnd(cnd, problem).to_string())?;
            Ok(0)
        }
        Command::SplitCombine { problem, certificates, clause, output } => {
            let file = read_problem(&problem)?;
            let proofs = certificates
                .iter()
                .map(|p| read_certificate(p)?.into_cr().with_context(|| format!("{}", p.display())))
                .collect::<Result<Vec<_>>>()?;
            let (components, proofs) = match_components(&file, clause.as_deref(), proofs)?;
            let combined = combine_split_refutations(&components, &proofs)?;
            let cert = Certificate::cr(combined, Some(file.digest()));
            let violations = cert.check_against(&file);
            if !violations.is_empty() {
                for v in &violations {
                    eprintln!("violation {v}");
                }
                return Ok(CHECK_FAILED);
            }
            write_out(output.as_deref(), &cert.to_string())?;
            Ok(0)
        }
        Command::Graph { certificate, node, dot } => {
            let d = read_certificate(&certificate)?.into_cr()?;
            let g = graph_from_cr(&d, node)?;
            write_out(Some(&dot), &export_dot(&g))?;
            Ok(0)
        }
    }
}

fn describe(cert: &Certificate) -> String {
    use conflict_resolution::io::Proof;
    let sink = match &cert.proof {
        Proof::Cr(d) => d.sink().map(|s| d.conclusion(s).to_string()),
        Proof::Res(d) => d.nodes().last().map(|n| n.conclusion.to_string()),
        Proof::Cnd(p) => p.root().map(|r| p.conclusion(r).to_string()),
    };
    format!("{} {}", cert.proof.calculus().name(), sink.unwrap_or_else(|| "(empty)".into()))
}

/// Picks the split clause and orders the proofs by the component each one
/// takes as input.
fn match_components(
    file: &ProblemFile,
    name: Option<&str>,
    proofs: Vec<CrDerivation>,
) -> Result<(Vec<Clause>, Vec<CrDerivation>)> {
    let uses = |d: &CrDerivation, c: &Clause| d.inputs().any(|i| d.conclusion(i).is_variant(c));
    let order = |components: &[Clause]| -> Option<Vec<usize>> {
        if components.len() != proofs.len() {
            return None;
        }
        let mut order = Vec::new();
        for c in components {
            let i = (0..proofs.len()).find(|&i| !order.contains(&i) && uses(&proofs[i], c))?;
            order.push(i);
        }
        Some(order)
    };
    let candidates: Vec<&Clause> = match name {
        Some(n) => {
            vec![&file.clauses.iter().find(|c| c.name == n).ok_or_else(|| anyhow!("no clause named `{n}`"))?.clause]
        }
        None => file.clauses.iter().map(|c| &c.clause).filter(|c| split_components(c).len() > 1).collect(),
    };
    for c in candidates {
        let components = split_components(c);
        if let Some(order) = order(&components) {
            let mut slots: Vec<Option<CrDerivation>> = proofs.into_iter().map(Some).collect();
            let ordered = order.into_iter().map(|i| slots[i].take().expect("order is a permutation")).collect();
            return Ok((components, ordered));
        }
    }
    bail!("no problem clause splits into components matching the {} certificates", proofs.len())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { USAGE } else { 0 });
        }
    };
    match run(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(USAGE)
        }
    }
}
