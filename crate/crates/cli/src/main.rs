use std::io::Read;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context};
use clap::{Parser, Subcommand, ValueEnum};
use featlog::models::{valuation_to_json, witness_prime, ModelKind, Oracle, Truth, Valuation};
use featlog::qe::DEFAULT_MAX_DNF_CLAUSES;
use featlog::{
    basic_simplify, classify, decide, expand_sugar, parse_formula, parse_formula_pair, prime_entails, print_formula,
    simplify_epc, BasicFormula, BoolComb, Formula, Limits, PrimeFormula, QeError, Session, Sort, Verdict,
};
use serde_json::json;

#[derive(Parser, Debug)]
#[command(name = "featlog", version, about = "Decide formulae over feature trees")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    format: Format,
    /// Abort when a disjunctive normal form grows beyond this many clauses.
    #[arg(long, default_value_t = DEFAULT_MAX_DNF_CLAUSES, value_parser = positive, global = true)]
    max_dnf_clauses: usize,
    /// Sort given to witness nodes that carry no sort constraint.
    #[arg(long, default_value = "_Default", global = true)]
    default_sort: String,
    /// Node bound for the enumerating oracle.
    #[arg(long, default_value_t = 4, value_parser = positive, global = true)]
    oracle_bound: usize,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Classify a formula as VALID, INVALID, SATISFIABLE or UNSATISFIABLE.
    Decide { file: PathBuf },
    /// Print the solved form of a conjunction, or an equivalent quantifier-free combination.
    Simplify { file: PathBuf },
    /// Check whether the first of two `;`-separated formulae entails the second.
    Entail { file: PathBuf },
    /// Print a satisfying valuation of an existential-conjunctive formula as JSON.
    Witness { file: PathBuf },
    /// Evaluate a closed formula with the bounded enumerating oracle.
    Oracle { file: PathBuf },
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Format {
    Text,
    Json,
}

fn positive(s: &str) -> Result<usize, String> {
    match s.parse::<usize>() {
        Ok(0) => Err("must be positive".into()),
        Ok(n) => Ok(n),
        Err(e) => Err(e.to_string()),
    }
}

enum Failure {
    Input(anyhow::Error),
    Limit(QeError),
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Input(e)
    }
}

impl From<QeError> for Failure {
    fn from(e: QeError) -> Self {
        Failure::Limit(e)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(out) => {
            println!("{out}");
            ExitCode::SUCCESS
        }
        Err(Failure::Input(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
        Err(Failure::Limit(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(3)
        }
    }
}

fn read_input(path: &PathBuf) -> anyhow::Result<String> {
    let mut text = String::new();
    if path.as_os_str() == "-" {
        std::io::stdin()
            .read_to_string(&mut text)
            .context("reading standard input")?;
    } else {
        text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    }
    Ok(text)
}

fn parse(text: &str) -> anyhow::Result<Formula> {
    parse_formula(text).map_err(|e| located(text, e))
}

fn located(text: &str, e: featlog::ParseError) -> anyhow::Error {
    let (line, col) = e.span.line_col(text);
    anyhow!("{line}:{col}: {}", e.message)
}

fn run(cli: &Cli) -> Result<String, Failure> {
    let limits = Limits {
        max_dnf_clauses: cli.max_dnf_clauses,
    };
    match &cli.command {
        Command::Decide { file } => {
            let phi = parse(&read_input(file)?)?;
            let verdict = classify(&phi, &limits)?;
            Ok(render_verdict(cli.format, &verdict))
        }
        Command::Simplify { file } => {
            let phi = parse(&read_input(file)?)?;
            let out = match phi.as_conjunction() {
                Some(atoms) if atoms.iter().all(|a| a.is_basic()) => match basic_simplify(&BasicFormula::Conj(atoms)) {
                    Some(solved) => solved.to_formula(),
                    None => Formula::False,
                },
                _ => decide(&phi, &limits)?.to_formula(),
            };
            Ok(render_formula(cli.format, &out))
        }
        Command::Entail { file } => {
            let text = read_input(file)?;
            let (a, b) = parse_formula_pair(&text).map_err(|e| located(&text, e))?;
            let mut session = Session::new();
            let pa = to_prime(&a, &limits, &mut session)?;
            let pb = to_prime(&b, &limits, &mut session)?;
            let holds = match (pa, pb) {
                (None, _) => true,
                (Some(_), None) => false,
                (Some(pa), Some(pb)) => prime_entails(&pa, &pb),
            };
            Ok(match cli.format {
                Format::Text => if holds { "ENTAILED" } else { "NOT ENTAILED" }.to_owned(),
                Format::Json => json!({ "entailed": holds }).to_string(),
            })
        }
        Command::Witness { file } => {
            let phi = parse(&read_input(file)?)?;
            let sort = identifier(&cli.default_sort)?;
            let mut session = Session::new();
            let plain = expand_sugar(&phi, &mut session);
            let prime = simplify_epc(&plain, &mut session)
                .map_err(|e| anyhow!("witness needs an existential-conjunctive formula: {e}"))?
                .ok_or_else(|| anyhow!("formula is unsatisfiable"))?;
            let alpha = witness_prime(&prime, &sort);
            let json = serde_json::to_string_pretty(&valuation_to_json(&alpha)).map_err(anyhow::Error::from)?;
            Ok(json)
        }
        Command::Oracle { file } => {
            let phi = parse(&read_input(file)?)?;
            if !phi.free_vars().is_empty() {
                return Err(anyhow!("the oracle needs a closed formula").into());
            }
            let truth = Oracle::new(cli.oracle_bound)
                .eval(&Valuation::new(ModelKind::Tree), &phi)
                .map_err(anyhow::Error::from)?;
            let word = match truth {
                Truth::True => "TRUE",
                Truth::False => "FALSE",
                Truth::Unknown => "UNKNOWN",
            };
            Ok(match cli.format {
                Format::Text => word.to_owned(),
                Format::Json => json!({ "oracle": word, "bound": cli.oracle_bound }).to_string(),
            })
        }
    }
}

fn identifier(name: &str) -> anyhow::Result<Sort> {
    let ok = name.chars().next().is_some_and(|c| c.is_alphabetic() || c == '_')
        && name.chars().all(|c| c.is_alphanumeric() || c == '_');
    if !ok {
        bail!("`{name}` is not a sort name");
    }
    Ok(Sort::new(name))
}

/// Converts a formula to a prime formula, `None` standing for falsity.
fn to_prime(phi: &Formula, limits: &Limits, session: &mut Session) -> Result<Option<PrimeFormula>, Failure> {
    let plain = expand_sugar(phi, session);
    if let Ok(p) = simplify_epc(&plain, session) {
        return Ok(p);
    }
    let d = decide(phi, limits)?;
    if d.is_bottom() {
        return Ok(None);
    }
    match d {
        BoolComb::Leaf(p) => Ok(Some(p)),
        _ => Err(anyhow!("`{}` is not equivalent to a prime formula", print_formula(phi)).into()),
    }
}

fn render_verdict(format: Format, verdict: &Verdict) -> String {
    match format {
        Format::Text => match verdict.residue() {
            Some(d) => format!("{}\n{d}", verdict.keyword()),
            None => verdict.keyword().to_owned(),
        },
        Format::Json => {
            let residue = verdict.residue().map(|d| d.to_string());
            json!({ "verdict": verdict.keyword(), "residue": residue }).to_string()
        }
    }
}

fn render_formula(format: Format, phi: &Formula) -> String {
    let text = featlog::text::print_formula_readable(phi);
    match format {
        Format::Text => text,
        Format::Json => json!({ "formula": text }).to_string(),
    }
}
