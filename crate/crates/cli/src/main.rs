use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use qinterp_core::bernstein_vazirani::{bv_run, BvInstance};
use qinterp_core::interpolation::{self, build_image, Mode, ProtocolParams, CSV_HEADER};
use qinterp_core::polynomial::MonomialBasis;
use qinterp_core::sharing::{run_sessions, AdversaryStructure, SessionSummary, SESSION_CSV_HEADER};
use qinterp_core::{Error, Field};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::json;

const MAX_BV_BITS: usize = 12;
const FIELD_TABLE_LIMIT: u32 = 64;

#[derive(Parser)]
#[command(name = "qinterp", version, about = "Fourier-query protocols over finite fields")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Field parameters with trace and character tables.
    Field {
        p: u32,
        r: u32,
        /// Monic modulus as comma-separated coefficients, constant term first.
        #[arg(long, value_delimiter = ',')]
        modulus: Option<Vec<u32>>,
        #[command(flatten)]
        out: Output,
    },
    /// Recover a hidden bit string with one query.
    Bv {
        #[arg(value_name = "N")]
        n: usize,
        /// Hidden string, bit i is the coefficient of x_{i+1}.
        #[arg(long, conflicts_with = "random")]
        a: Option<String>,
        /// Draw the hidden string from the seed.
        #[arg(long)]
        random: bool,
        #[arg(long)]
        seed: Option<u64>,
        #[command(flatten)]
        out: Output,
    },
    /// Exact success probability and seeded trials of polynomial interpolation.
    Interpolate {
        #[command(flatten)]
        proto: Proto,
        /// Query count; defaults to the optimal value.
        k: Option<usize>,
        #[arg(long, default_value_t = 0)]
        trials: u64,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, value_enum, default_value_t = ModeArg::Analytic)]
        mode: ModeArg,
        /// Cache file for the image table.
        #[arg(long)]
        table: Option<PathBuf>,
        #[command(flatten)]
        out: Output,
    },
    /// Distribute queries to k players, optionally intercepting some.
    Share {
        #[command(flatten)]
        proto: Proto,
        /// 1-based share indices taken in transit.
        #[arg(long, value_delimiter = ',')]
        intercept: Vec<usize>,
        #[arg(long, default_value_t = 1)]
        trials: u64,
        #[arg(long)]
        seed: Option<u64>,
        /// Directory for per-session JSONL transcripts.
        #[arg(long)]
        transcripts: Option<PathBuf>,
        #[command(flatten)]
        out: Output,
    },
    /// Downward closure, Q2, Q2*, self-duality and the dual structure.
    Adversary {
        #[arg(long)]
        players: usize,
        /// JSON array of subsets, inline or as a file path.
        #[arg(long, conflicts_with = "threshold", required_unless_present = "threshold")]
        structure: Option<String>,
        /// All coalitions of at most t players.
        #[arg(long)]
        threshold: Option<usize>,
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

#[derive(Args)]
struct Proto {
    p: u32,
    r: u32,
    n: usize,
    d: u32,
}

#[derive(Args)]
struct Output {
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Analytic,
    Circuit,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Analytic => Mode::Analytic,
            ModeArg::Circuit => Mode::Circuit,
        }
    }
}

enum Failure {
    Usage(String),
    Infeasible(String),
    Core(Error),
    Invariant(String),
    /// Ran to completion but the protocol did not succeed.
    Unsuccessful,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Core(e.into())
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Self {
        Failure::Core(e.into())
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Unsuccessful) => ExitCode::from(1),
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Infeasible(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Invariant(msg)) => {
            eprintln!("internal error: {msg}");
            ExitCode::from(3)
        }
        Err(Failure::Core(e)) => {
            eprintln!("error: {e}");
            match e {
                e if e.is_infeasible() => ExitCode::from(2),
                Error::NormDrift(_) => ExitCode::from(3),
                _ => ExitCode::from(1),
            }
        }
    }
}

fn run(command: Command) -> Result<(), Failure> {
    match command {
        Command::Field { p, r, modulus, out } => field(p, r, modulus.as_deref(), &out),
        Command::Bv { n, a, random, seed, out } => bv(n, a.as_deref(), random, seed, &out),
        Command::Interpolate { proto, k, trials, seed, mode, table, out } => {
            interpolate(&proto, k, trials, seed, mode.into(), table.as_deref(), &out)
        }
        Command::Share { proto, intercept, trials, seed, transcripts, out } => {
            share(&proto, &intercept, trials, seed, transcripts.as_deref(), &out)
        }
        Command::Adversary { players, structure, threshold, output } => {
            adversary(players, structure.as_deref(), threshold, output.as_deref())
        }
    }
}

fn emit(text: &str, path: Option<&Path>) -> Result<(), Failure> {
    match path {
        Some(path) => fs::write(path, text)?,
        None => std::io::stdout().lock().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn require_seed(seed: Option<u64>, what: &str) -> Result<u64, Failure> {
    seed.ok_or_else(|| Failure::Usage(format!("--seed is required for {what}")))
}

fn field(p: u32, r: u32, modulus: Option<&[u32]>, out: &Output) -> Result<(), Failure> {
    let field = Field::new(p, r, modulus)?;
    let q = field.q();
    let rows: Vec<_> = if q <= FIELD_TABLE_LIMIT { (0..q).collect() } else { Vec::new() };
    let text = match out.format {
        Format::Json => {
            let elements: Vec<_> = rows
                .iter()
                .map(|&z| {
                    let e = field.character(z);
                    json!({
                        "value": z,
                        "element": field.format(z),
                        "coeffs": field.coeffs(z),
                        "trace": field.trace(z),
                        "character": [e.re, e.im],
                    })
                })
                .collect();
            let report = json!({
                "p": p,
                "r": r,
                "q": q,
                "modulus": field.modulus(),
                "modulus_poly": field.format_modulus(),
                "elements": elements,
            });
            serde_json::to_string_pretty(&report)? + "\n"
        }
        Format::Csv => {
            let mut s = format!("# q={q}\n# modulus={}\nvalue,element,trace,char_re,char_im\n", field.format_modulus());
            for &z in &rows {
                let e = field.character(z);
                s += &format!("{z},{},{},{:.12},{:.12}\n", field.format(z), field.trace(z), e.re, e.im);
            }
            s
        }
    };
    emit(&text, out.output.as_deref())
}

fn bv(n: usize, a: Option<&str>, random: bool, seed: Option<u64>, out: &Output) -> Result<(), Failure> {
    if n > MAX_BV_BITS {
        return Err(Failure::Infeasible(format!("oversize: N = {n} exceeds {MAX_BV_BITS}")));
    }
    let instance = match (a, random) {
        (Some(bits), _) => {
            if bits.len() != n {
                return Err(Failure::Usage(format!("--a has {} bits, expected {n}", bits.len())));
            }
            BvInstance::from_bits(bits)?
        }
        (None, true) => {
            let mut rng = ChaCha8Rng::seed_from_u64(require_seed(seed, "--random")?);
            BvInstance::random(n, &mut rng)?
        }
        (None, false) => return Err(Failure::Usage("give --a <bits> or --random".into())),
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed.unwrap_or(0));
    let result = bv_run(&instance, &mut rng)?;
    if result.queries != 1 {
        return Err(Failure::Invariant(format!("{} oracle calls", result.queries)));
    }
    let text = match out.format {
        Format::Json => serde_json::to_string(&result)? + "\n",
        Format::Csv => {
            let v = serde_json::to_value(&result)?;
            format!("N,a,a_hat,success,queries\n{},{},{},{},{}\n", v["N"], v["a"].as_str().unwrap_or(""), v["a_hat"].as_str().unwrap_or(""), v["success"], v["queries"])
        }
    };
    emit(&text, out.output.as_deref())?;
    if result.success {
        Ok(())
    } else {
        Err(Failure::Unsuccessful)
    }
}

fn protocol_params(proto: &Proto, k: Option<usize>) -> Result<ProtocolParams, Failure> {
    let field = Field::new(proto.p, proto.r, None)?;
    let basis = MonomialBasis::new(proto.n, proto.d, true)?;
    Ok(ProtocolParams::with_options(field, basis, k)?)
}

fn interpolate(
    proto: &Proto,
    k: Option<usize>,
    trials: u64,
    seed: Option<u64>,
    mode: Mode,
    table_path: Option<&Path>,
    out: &Output,
) -> Result<(), Failure> {
    let seed = if trials > 0 { require_seed(seed, "trials")? } else { seed.unwrap_or(0) };
    let params = protocol_params(proto, k)?;
    let table = match table_path {
        Some(path) if path.exists() => interpolation::TransversalTable::load(&params, path)?,
        Some(path) => {
            let table = build_image(&params)?;
            table.save(&params, path)?;
            table
        }
        None => build_image(&params)?,
    };
    let summary = interpolation::trials(&params, &table, trials, seed, mode)?;
    if summary.successes > summary.trials {
        return Err(Failure::Invariant("more successes than trials".into()));
    }
    let text = match out.format {
        Format::Json => serde_json::to_string_pretty(&summary)? + "\n",
        Format::Csv => format!("{CSV_HEADER}\n{}\n", summary.csv_row()),
    };
    emit(&text, out.output.as_deref())
}

fn share(
    proto: &Proto,
    intercept: &[usize],
    trials: u64,
    seed: Option<u64>,
    transcripts: Option<&Path>,
    out: &Output,
) -> Result<(), Failure> {
    let seed = require_seed(seed, "share")?;
    let params = protocol_params(proto, None)?;
    if let Some(&bad) = intercept.iter().find(|&&i| i == 0 || i > params.k()) {
        return Err(Failure::Usage(format!("interception index {bad} is outside 1..={}", params.k())));
    }
    let table = build_image(&params)?;
    let reports = run_sessions(&params, &table, trials, seed, intercept)?;
    if !intercept.is_empty() && reports.iter().any(|r| !r.outcome.is_destroyed()) {
        return Err(Failure::Invariant("intercepted session was not destroyed".into()));
    }
    if let Some(dir) = transcripts {
        fs::create_dir_all(dir)?;
        for (i, report) in reports.iter().enumerate() {
            fs::write(dir.join(format!("session_{i:06}.jsonl")), report.transcript.to_jsonl()?)?;
        }
    }
    let summary = SessionSummary::new(&params, &table, intercept, seed, &reports);
    let dir = transcripts.map(|d| d.display().to_string()).unwrap_or_default();
    let text = match out.format {
        Format::Json => {
            let mut v = serde_json::to_value(&summary)?;
            v["transcripts"] = json!(dir);
            serde_json::to_string_pretty(&v)? + "\n"
        }
        Format::Csv => format!("{SESSION_CSV_HEADER},transcripts\n{},{dir}\n", summary.csv_row()),
    };
    emit(&text, out.output.as_deref())
}

fn adversary(players: usize, structure: Option<&str>, threshold: Option<usize>, output: Option<&Path>) -> Result<(), Failure> {
    let a = match (structure, threshold) {
        (Some(s), _) => {
            let json = if s.trim_start().starts_with('[') {
                s.to_string()
            } else {
                fs::read_to_string(s).map_err(|e| Failure::Usage(format!("cannot read structure file {s}: {e}")))?
            };
            AdversaryStructure::from_json(players, &json)?
        }
        (None, Some(t)) => AdversaryStructure::threshold(players, t)?,
        (None, None) => return Err(Failure::Usage("give --structure or --threshold".into())),
    };
    let text = serde_json::to_string_pretty(&a.report())? + "\n";
    emit(&text, output)
}
