use std::fmt::Write as _;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use alphabase::classification::{
    classify, classify_two_element, q_gr, q_gr_exact, q_kl, ClassificationError, Method, UniquenessClass,
};
use alphabase::expansion::{
    alpha_j, expand, gamma_j, is_unique, unique_point_test, validate, ExpansionError, ExpansionKind, Uniqueness,
    Validity,
};
use alphabase::numerics::{Scalar, DEFAULT_PRECISION_BITS};
use alphabase::oracle::{census_unique, joint_census, verify_against, enumerate_expansions, OracleError};
use alphabase::sequences::{alpha_gr, alpha_kl, render_word, DigitSequence, SequenceError};
use alphabase::system::{AlphabetBaseSystem, RegularSystem, SystemError};
use clap::{Args, Parser, Subcommand};
use num_rational::BigRational;
use rayon::prelude::*;

const MALFORMED: u8 = 2;
const PRECONDITION: u8 = 3;
const UNDETERMINED: u8 = 4;

#[derive(Parser)]
#[command(name = "alphabase", version, about = "Expansions in alphabet-base systems")]
struct Cli {
    /// Bits of precision for irrational quantities.
    #[arg(long, global = true, env = "ALPHABASE_PRECISION", default_value_t = DEFAULT_PRECISION_BITS,
          value_parser = clap::value_parser!(u32).range(8..=1_000_000))]
    precision: u32,

    /// Exit with status 4 when a verdict is Undetermined.
    #[arg(long, global = true)]
    strict: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// λ, Λ and the regularity predicates of a system.
    Check { system: PathBuf },
    /// Expand a point.
    Expand {
        system: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        x: String,
        #[arg(long, default_value = "greedy")]
        kind: String,
        #[arg(long, default_value_t = 32)]
        digits: usize,
    },
    /// The characteristic sequences α^j and γ^j.
    Alphas {
        system: PathBuf,
        #[arg(long, default_value_t = 32)]
        digits: usize,
    },
    /// Check a digit sequence against the lexicographic characterization of a kind.
    Validate {
        system: PathBuf,
        #[arg(long)]
        seq: String,
        #[arg(long, default_value = "greedy")]
        kind: String,
        #[arg(long, default_value_t = 64)]
        depth: usize,
    },
    /// Decide whether a sequence or a point has a unique expansion.
    Unique {
        system: PathBuf,
        #[command(flatten)]
        target: Target,
        #[arg(long, default_value_t = 64)]
        depth: usize,
    },
    /// Classify the set of unique expansions.
    Classify {
        system: PathBuf,
        #[arg(long, default_value_t = 64)]
        depth: usize,
    },
    /// Classify a grid of two-element systems and write CSV.
    Scan {
        /// Digit values d0,d1.
        #[arg(long, allow_hyphen_values = true)]
        digits: String,
        /// lo:hi:steps for q0.
        #[arg(long)]
        q0: String,
        /// lo:hi:steps for q1.
        #[arg(long)]
        q1: String,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value_t = 64)]
        depth: usize,
    },
    /// Golden-ratio and q_KL thresholds for alphabet size M.
    Thresholds {
        #[arg(long = "M", alias = "max", value_parser = clap::value_parser!(u8).range(1..))]
        m: u8,
        #[arg(long, default_value_t = 32)]
        digits: usize,
    },
    /// Brute-force enumeration and extremality checks.
    Oracle {
        system: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        x: String,
        #[arg(long, default_value_t = 10)]
        depth: usize,
        /// Also run the unique-prefix census at this depth.
        #[arg(long)]
        census: bool,
    },
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct Target {
    #[arg(long)]
    seq: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    x: Option<String>,
}

#[derive(Debug)]
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn malformed(message: impl Into<String>) -> Self {
        Failure {
            code: MALFORMED,
            message: message.into(),
        }
    }

    fn precondition(message: impl Into<String>) -> Self {
        Failure {
            code: PRECONDITION,
            message: message.into(),
        }
    }
}

impl From<SystemError> for Failure {
    fn from(e: SystemError) -> Self {
        let code = match e {
            SystemError::NotRegular | SystemError::DigitIndexOutOfRange { .. } => PRECONDITION,
            SystemError::Undetermined(_) => UNDETERMINED,
            _ => MALFORMED,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

impl From<SequenceError> for Failure {
    fn from(e: SequenceError) -> Self {
        let code = match e {
            SequenceError::TruncatedTail => PRECONDITION,
            _ => MALFORMED,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

impl From<ExpansionError> for Failure {
    fn from(e: ExpansionError) -> Self {
        match e {
            ExpansionError::System(e) => e.into(),
            ExpansionError::Sequence(e) => e.into(),
            ExpansionError::Undetermined { .. } => Failure {
                code: UNDETERMINED,
                message: e.to_string(),
            },
            _ => Failure::precondition(e.to_string()),
        }
    }
}

impl From<ClassificationError> for Failure {
    fn from(e: ClassificationError) -> Self {
        match e {
            ClassificationError::System(e) => e.into(),
            ClassificationError::Expansion(e) => e.into(),
            _ => Failure::precondition(e.to_string()),
        }
    }
}

impl From<OracleError> for Failure {
    fn from(e: OracleError) -> Self {
        match e {
            OracleError::System(e) => e.into(),
            OracleError::Expansion(e) => e.into(),
            _ => Failure::precondition(e.to_string()),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok((text, undetermined)) => {
            let mut stdout = io::stdout().lock();
            if stdout.write_all(text.as_bytes()).is_err() {
                return ExitCode::FAILURE;
            }
            if undetermined && cli.strict {
                ExitCode::from(UNDETERMINED)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

/// Output text and whether some reported verdict is Undetermined.
type Outcome = Result<(String, bool), Failure>;

fn run(cli: &Cli) -> Outcome {
    let p = cli.precision;
    match &cli.command {
        Command::Check { system } => check(&load(system)?, p),
        Command::Expand { system, x, kind, digits } => {
            let r = regular(system)?;
            run_expand(&r, &scalar(x)?, parse_kind(kind)?, *digits, p)
        }
        Command::Alphas { system, digits } => alphas(&regular(system)?, *digits),
        Command::Validate { system, seq, kind, depth } => {
            let r = regular(system)?;
            let seq = DigitSequence::parse(seq, r.max_digit())?;
            let v = validate(&r, &seq, parse_kind(kind)?, *depth)?;
            Ok((format!("{v}\n"), matches!(v, Validity::Undetermined(_))))
        }
        Command::Unique { system, target, depth } => {
            let r = regular(system)?;
            let u = match (&target.seq, &target.x) {
                (Some(seq), _) => is_unique(&r, &DigitSequence::parse(seq, r.max_digit())?, *depth)?,
                (None, Some(x)) => unique_point_test(&r, &scalar(x)?, *depth)?,
                (None, None) => return Err(Failure::malformed("one of --seq or --x is required")),
            };
            Ok((format!("{u}\n"), matches!(u, Uniqueness::Undetermined(_))))
        }
        Command::Classify { system, depth } => run_classify(&regular(system)?, *depth),
        Command::Scan {
            digits,
            q0,
            q1,
            out,
            depth,
        } => scan(digits, q0, q1, out.as_deref(), *depth),
        Command::Thresholds { m, digits } => thresholds(*m, *digits, p),
        Command::Oracle { system, x, depth, census } => run_oracle(&regular(system)?, &scalar(x)?, *depth, *census),
    }
}

fn load(path: &Path) -> Result<AlphabetBaseSystem, Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure::malformed(format!("{}: {e}", path.display())))?;
    Ok(AlphabetBaseSystem::from_json(&text)?)
}

fn regular(path: &Path) -> Result<RegularSystem, Failure> {
    Ok(RegularSystem::new(load(path)?)?)
}

fn scalar(text: &str) -> Result<Scalar, Failure> {
    text.parse().map_err(|e| Failure::malformed(format!("{e}")))
}

fn parse_kind(text: &str) -> Result<ExpansionKind, Failure> {
    text.parse().map_err(|_| {
        Failure::malformed(format!(
            "unknown kind {text:?} (expected greedy, quasi-greedy, lazy or quasi-lazy)"
        ))
    })
}

/// Exact values as written; surds also get a decimal enclosure.
fn show(s: &Scalar, p: u32) -> String {
    match s {
        Scalar::Surd(_) => format!("{s} ≈ {}", Scalar::Interval(s.to_interval(p))),
        _ => s.to_string(),
    }
}

fn verdict(v: Result<bool, SystemError>) -> Result<(String, bool), Failure> {
    match v {
        Ok(b) => Ok((b.to_string(), false)),
        Err(SystemError::Undetermined(_)) => Ok(("undetermined".into(), true)),
        Err(e) => Err(e.into()),
    }
}

fn check(system: &AlphabetBaseSystem, p: u32) -> Outcome {
    let (lambda, big_lambda) = system.bounds();
    let (semi, u1) = verdict(system.is_semi_regular())?;
    let (reg, u2) = verdict(system.is_regular())?;
    let mut out = String::new();
    writeln!(out, "system = {system}").unwrap();
    writeln!(out, "lambda = {}", show(&lambda, p)).unwrap();
    writeln!(out, "Lambda = {}", show(&big_lambda, p)).unwrap();
    writeln!(out, "semi-regular = {semi}").unwrap();
    writeln!(out, "regular = {reg}").unwrap();
    Ok((out, u1 || u2))
}

fn run_expand(r: &RegularSystem, x: &Scalar, kind: ExpansionKind, digits: usize, p: u32) -> Outcome {
    let state = expand(r, x, kind, digits)?;
    let m = r.max_digit();
    let mut out = String::new();
    writeln!(out, "kind = {kind}").unwrap();
    writeln!(out, "x = {}", show(x, p)).unwrap();
    writeln!(out, "digits = {}", render_word(state.digits(), m)).unwrap();
    match state.cycle_info() {
        Some(c) => writeln!(out, "cycle = start {} period {}", c.start, c.period).unwrap(),
        None => writeln!(out, "cycle = none within {digits} digits").unwrap(),
    }
    writeln!(out, "sequence = {}", state.sequence().render(m)).unwrap();
    writeln!(out, "residual = {}", show(state.current_value(), p)).unwrap();
    Ok((out, false))
}

fn alphas(r: &RegularSystem, digits: usize) -> Outcome {
    let m = r.max_digit() as usize;
    let mut out = String::new();
    for j in 0..m {
        let a = alpha_j(r, j, digits)?.sequence();
        writeln!(out, "alpha^{j} = {}", a.render(m as u8)).unwrap();
    }
    for j in 1..=m {
        let g = gamma_j(r, j, digits)?.sequence();
        writeln!(out, "gamma^{j} = {}", g.render(m as u8)).unwrap();
    }
    Ok((out, false))
}

fn run_classify(r: &RegularSystem, depth: usize) -> Outcome {
    let c = classify(r, depth)?;
    let mut out = String::new();
    writeln!(out, "class = {}", c.class).unwrap();
    let method = match c.method {
        Method::TwoElement => "two-element thresholds",
        Method::CharacteristicBounds => "characteristic sequences",
    };
    writeln!(out, "method = {method}").unwrap();
    writeln!(out, "depth = {}", c.depth).unwrap();
    let names = ["trivial", "infinite", "countable", "continuum"];
    for (name, case) in names.iter().zip(c.cases) {
        let v = case.map_or("undetermined".to_string(), |b| b.to_string());
        writeln!(out, "case {name} = {v}").unwrap();
    }
    for cmp in &c.comparisons {
        let at = cmp.position.map_or(String::new(), |n| format!(" at {n}"));
        let sat = cmp.satisfied.map_or("undetermined".to_string(), |b| b.to_string());
        writeln!(out, "  ({}) {}: {}{at} -> {sat}", cmp.case, cmp.label, cmp.outcome).unwrap();
    }
    Ok((out, matches!(c.class, UniquenessClass::Undetermined(_))))
}

/// `lo:hi:steps`, sampled at `steps` equally spaced points including both ends.
fn grid(text: &str) -> Result<Vec<BigRational>, Failure> {
    let parts: Vec<&str> = text.split(':').collect();
    let [lo, hi, steps] = parts[..] else {
        return Err(Failure::malformed(format!("range {text:?} is not lo:hi:steps")));
    };
    let rational = |s: &str| -> Result<BigRational, Failure> {
        scalar(s)?
            .as_rational()
            .cloned()
            .ok_or_else(|| Failure::malformed(format!("range endpoint {s:?} is not rational")))
    };
    let (lo, hi) = (rational(lo)?, rational(hi)?);
    let steps: usize = steps
        .trim()
        .parse()
        .map_err(|_| Failure::malformed(format!("bad step count in {text:?}")))?;
    let one = BigRational::from_integer(1.into());
    let two = BigRational::from_integer(2.into());
    if steps == 0 || lo <= one || hi > two || lo > hi {
        return Err(Failure::precondition(format!(
            "range {text:?} must satisfy 1 < lo <= hi <= 2 with steps >= 1"
        )));
    }
    if steps == 1 {
        return Ok(vec![lo]);
    }
    let gap = (&hi - &lo) / BigRational::from_integer((steps - 1).into());
    Ok((0..steps)
        .map(|k| &lo + &gap * BigRational::from_integer(k.into()))
        .collect())
}

fn scan(digits: &str, q0: &str, q1: &str, out: Option<&Path>, depth: usize) -> Outcome {
    let d: Vec<Scalar> = digits.split(',').map(|s| scalar(s.trim())).collect::<Result<_, _>>()?;
    if d.len() != 2 {
        return Err(Failure::malformed(format!("--digits needs two values, got {}", d.len())));
    }
    let (xs, ys) = (grid(q0)?, grid(q1)?);
    let cells: Vec<(&BigRational, &BigRational)> = xs.iter().flat_map(|a| ys.iter().map(move |b| (a, b))).collect();
    let rows: Vec<Result<[String; 3], Failure>> = cells
        .par_iter()
        .map(|(a, b)| {
            let system = AlphabetBaseSystem::new(
                d.clone(),
                vec![Scalar::from_rational((*a).clone()), Scalar::from_rational((*b).clone())],
            )?;
            let class = classify_two_element(&RegularSystem::new(system)?, depth)?;
            Ok([a.to_string(), b.to_string(), class.to_string()])
        })
        .collect();
    let mut csv = csv::Writer::from_writer(Vec::new());
    csv.write_record(["q0", "q1", "class"]).unwrap();
    let mut undetermined = false;
    for row in rows {
        let row = row?;
        undetermined |= row[2].starts_with("Undetermined");
        csv.write_record(&row).unwrap();
    }
    let bytes = csv.into_inner().map_err(|e| Failure::malformed(e.to_string()))?;
    let text = String::from_utf8(bytes).expect("csv output is utf-8");
    match out {
        Some(path) => {
            fs::write(path, &text).map_err(|e| Failure::malformed(format!("{}: {e}", path.display())))?;
            Ok((format!("wrote {} cells to {}\n", xs.len() * ys.len(), path.display()), undetermined))
        }
        None => Ok((text, undetermined)),
    }
}

fn thresholds(m: u8, digits: usize, p: u32) -> Outcome {
    let mut out = String::new();
    writeln!(out, "M = {m}").unwrap();
    writeln!(out, "q_GR = {}", q_gr(m, p)).unwrap();
    writeln!(out, "q_GR exact = {}", q_gr_exact(m)).unwrap();
    writeln!(out, "q_KL = {}", q_kl(m, p)).unwrap();
    writeln!(out, "alpha_GR = {}", alpha_gr(m).render(m)).unwrap();
    writeln!(out, "alpha_KL = {}", alpha_kl(m, digits).render(m)).unwrap();
    Ok((out, false))
}

fn run_oracle(r: &RegularSystem, x: &Scalar, depth: usize, census: bool) -> Outcome {
    let m = r.max_digit();
    let tree = enumerate_expansions(r.system(), x, depth)?;
    let mut out = String::new();
    writeln!(out, "x = {}", tree.x).unwrap();
    writeln!(out, "depth = {depth}").unwrap();
    writeln!(out, "survivors = {}", tree.surviving_prefixes.len()).unwrap();
    for w in tree.surviving_prefixes.iter() {
        writeln!(out, "  {}", render_word(w, m)).unwrap();
    }
    for kind in ExpansionKind::ALL {
        let c = verify_against(r, &tree, kind)?;
        let oracle = c.oracle.as_deref().map_or("none".to_string(), |w| render_word(w, m));
        let verdict = if c.holds { "agrees" } else { "DISAGREES" };
        writeln!(
            out,
            "{kind}: engine {} oracle {oracle} {verdict}",
            render_word(&c.engine, m)
        )
        .unwrap();
    }
    if census {
        let c = census_unique(r, depth)?;
        let joint = joint_census(r, depth)?;
        writeln!(out, "census lexicographic = {}", c.lexicographic.len()).unwrap();
        writeln!(out, "census windows = {}", c.windows.len()).unwrap();
        writeln!(out, "census agree = {}", c.agree()).unwrap();
        writeln!(out, "census joint = {}", joint.len()).unwrap();
    }
    Ok((out, false))
}
