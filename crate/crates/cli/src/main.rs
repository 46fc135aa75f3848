mod bench;
mod size;
mod verify;

use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use halftime::analysis::{entropy_report, EntropyReport};
use halftime::vectors::{check, emit, parse_file, standard_grid};
use halftime::{hash, HashParams, SeedBuffer, Variant};

/// Exit status for a check that ran and failed.
const CHECK_FAILED: u8 = 1;
/// Exit status for bad arguments and I/O errors, as clap uses.
const USAGE: u8 = 2;

#[derive(Parser)]
#[command(
    name = "halftime",
    version,
    about = "HalftimeHash long-string hashing and verification"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Hash files, or standard input when none are given.
    Hash(HashArgs),
    /// Print entropy, seed size and cost figures for an input length.
    Analyze(AnalyzeArgs),
    /// Check the algebraic and statistical properties of the shipped parameters.
    Verify(VerifyArgs),
    /// Measure hashing throughput as CSV.
    Bench(BenchArgs),
    /// Write or check known-answer test vectors.
    Vectors(VectorArgs),
}

fn parse_variant(s: &str) -> Result<Variant, String> {
    let n: usize = s.parse().map_err(|_| format!("{s:?} is not a number"))?;
    Variant::try_from(n).map_err(|e| e.to_string())
}

#[derive(Args)]
struct HashArgs {
    /// Output width in bytes: 16, 24, 32 or 40.
    #[arg(long, default_value = "24", value_parser = parse_variant)]
    variant: Variant,
    /// 32-byte master seed as 64 hex digits. Defaults to all zeros.
    #[arg(long, conflicts_with = "seed_file")]
    seed_hex: Option<String>,
    /// File holding the master seed, as 32 raw bytes or 64 hex digits.
    #[arg(long)]
    seed_file: Option<PathBuf>,
    files: Vec<PathBuf>,
}

#[derive(Args)]
struct AnalyzeArgs {
    #[arg(long, default_value = "24", value_parser = parse_variant)]
    variant: Variant,
    /// Input length, e.g. 1336, 1M or 1E (powers of 1024). May be repeated.
    #[arg(long, required = true, value_parser = size::parse_size)]
    length: Vec<u64>,
    #[arg(long)]
    csv: bool,
}

#[derive(Args)]
struct VerifyArgs {
    /// Fewer trials; finishes in a few seconds.
    #[arg(long)]
    quick: bool,
    /// Replace the shipped parameters with a known-bad one, to see the check fail.
    #[arg(long, value_enum)]
    inject: Option<verify::Injection>,
}

#[derive(Args)]
struct BenchArgs {
    /// Comma-separated input sizes.
    #[arg(long, default_value = "1K,64K,1M,16M", value_delimiter = ',', value_parser = size::parse_size)]
    sizes: Vec<u64>,
    /// Repetitions per size; the fastest is reported.
    #[arg(long, default_value_t = 5)]
    reps: u32,
    /// Only this variant; all four by default.
    #[arg(long, value_parser = parse_variant)]
    variant: Option<Variant>,
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct VectorArgs {
    /// Write the standard grid to this file, or `-` for standard output.
    #[arg(long, value_name = "PATH")]
    emit: Option<PathBuf>,
    /// Recompute every record in this file.
    #[arg(long, value_name = "PATH")]
    check: Option<PathBuf>,
}

enum Failure {
    Check(String),
    Usage(String),
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

impl From<halftime::Error> for Failure {
    fn from(e: halftime::Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

fn read_input(path: &Path) -> Result<Vec<u8>, Failure> {
    std::fs::read(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn decode_seed(bytes: &[u8]) -> Result<[u8; 32], Failure> {
    if let Ok(raw) = <[u8; 32]>::try_from(bytes) {
        return Ok(raw);
    }
    let text = std::str::from_utf8(bytes).unwrap_or("").trim();
    hex::decode(text)
        .ok()
        .and_then(|v| v.try_into().ok())
        .ok_or_else(|| Failure::Usage("seed must be 32 bytes or 64 hex digits".into()))
}

fn master_seed(args: &HashArgs) -> Result<[u8; 32], Failure> {
    match (&args.seed_hex, &args.seed_file) {
        (Some(hex), _) if hex.trim().len() == 64 => decode_seed(hex.as_bytes()),
        (Some(_), _) => Err(Failure::Usage(
            "--seed-hex needs exactly 64 hex digits".into(),
        )),
        (None, Some(path)) => decode_seed(&read_input(path)?),
        (None, None) => Ok([0; 32]),
    }
}

fn cmd_hash(args: HashArgs) -> Result<(), Failure> {
    let params = HashParams::of(args.variant);
    let master = master_seed(&args)?;
    let digest_of = |input: &[u8]| -> Result<String, Failure> {
        let seed = SeedBuffer::for_input_len(&master, &params, input.len() as u64);
        Ok(hash(input, &seed, &params)?.to_hex())
    };
    let mut out = io::stdout().lock();
    if args.files.is_empty() {
        let mut input = Vec::new();
        io::stdin().read_to_end(&mut input)?;
        writeln!(out, "{}", digest_of(&input)?)?;
    }
    for path in &args.files {
        let input = read_input(path)?;
        writeln!(out, "{}  {}", digest_of(&input)?, path.display())?;
    }
    Ok(())
}

fn cmd_analyze(args: AnalyzeArgs) -> Result<(), Failure> {
    if args.length.contains(&0) {
        return Err(Failure::Usage("length must be positive".into()));
    }
    let params = HashParams::of(args.variant);
    let mut out = io::stdout().lock();
    if args.csv {
        writeln!(out, "{}", EntropyReport::CSV_HEADER)?;
    }
    for (i, &n) in args.length.iter().enumerate() {
        let report = entropy_report(&params, n);
        if args.csv {
            writeln!(out, "{}", report.csv_row())?;
        } else {
            if i > 0 {
                writeln!(out)?;
            }
            write!(out, "{}", report.table())?;
        }
    }
    Ok(())
}

fn cmd_verify(args: VerifyArgs) -> Result<(), Failure> {
    let failures = verify::run(&verify::Options {
        quick: args.quick,
        inject: args.inject,
    });
    if failures == 0 {
        Ok(())
    } else {
        Err(Failure::Check(format!("{failures} check(s) failed")))
    }
}

fn cmd_bench(args: BenchArgs) -> Result<(), Failure> {
    let variants = args.variant.map_or(Variant::ALL.to_vec(), |v| vec![v]);
    let mut out = io::stdout().lock();
    writeln!(out, "{}", bench::CSV_HEADER)?;
    for row in bench::measure(&args.sizes, &variants, args.reps) {
        writeln!(out, "{}", row.csv())?;
    }
    Ok(())
}

fn cmd_vectors(args: VectorArgs) -> Result<(), Failure> {
    if let Some(path) = args.emit {
        let text = emit(&standard_grid()?);
        if path.as_os_str() == "-" {
            io::stdout().lock().write_all(text.as_bytes())?;
        } else {
            std::fs::write(&path, text)
                .map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
        }
        return Ok(());
    }
    let path = args.check.expect("clap requires one of --emit and --check");
    let text = String::from_utf8(read_input(&path)?)
        .map_err(|_| Failure::Usage("vector file is not UTF-8".into()))?;
    let records = parse_file(&text)?;
    let failed = check(&records)?;
    for r in &failed {
        println!("mismatch: {r}");
    }
    println!(
        "{} of {} vectors match",
        records.len() - failed.len(),
        records.len()
    );
    if failed.is_empty() {
        Ok(())
    } else {
        Err(Failure::Check(format!("{} vector(s) differ", failed.len())))
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Hash(a) => cmd_hash(a),
        Command::Analyze(a) => cmd_analyze(a),
        Command::Verify(a) => cmd_verify(a),
        Command::Bench(a) => cmd_bench(a),
        Command::Vectors(a) => cmd_vectors(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Check(msg)) => {
            eprintln!("halftime: {msg}");
            ExitCode::from(CHECK_FAILED)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("halftime: {msg}");
            ExitCode::from(USAGE)
        }
    }
}
