//! Command-line front end. [`run`] is the whole program; `main` only
//! forwards the process arguments and exit code.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use floorpi_core::exact::{self, ArithFn, BruteForce};
use floorpi_core::harness::{self, Normalizer, OutputFormat, ScanConfig, ScanQuantity};
use floorpi_core::psisum::{self, Weight};
use floorpi_core::{asym, floorset, PrimeTable};

#[derive(Debug, Parser)]
#[command(
    name = "floorpi",
    version,
    about = "Prime statistics of floor function sets"
)]
struct Cli {
    /// Worker threads (default: all cores). Never changes results.
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Number of primes in S(x)
    PiS(XArg),
    /// S_f(x) = Σ_{n≤x} f(⌊x/n⌋)
    SCount {
        #[arg(long, value_enum)]
        f: FArg,
        #[command(flatten)]
        x: XArg,
    },
    /// |S(x)|
    Cardinality(XArg),
    /// #{m ∈ S(x) : m ≡ a (mod q)}, with a = q meaning residue 0
    Progression {
        #[command(flatten)]
        x: XArg,
        #[arg(long)]
        q: u64,
        #[arg(long)]
        a: u64,
    },
    /// Li_S(x)
    Lis {
        #[arg(long, allow_hyphen_values = true)]
        x: f64,
    },
    /// Li(x) = ∫_2^x dt/log t
    Li {
        #[arg(long, allow_hyphen_values = true)]
        x: f64,
    },
    /// Expansion coefficients a_1..a_n, one per line
    Coeffs {
        #[arg(long)]
        n: usize,
    },
    /// Enclosure of the density constant C_f
    Constants {
        #[arg(long, value_enum)]
        f: FArg,
        #[arg(long)]
        tol: f64,
    },
    /// Weighted sawtooth sum over D < d ≤ D'
    Psisum {
        #[arg(long, value_parser = parse_x)]
        x: XValue,
        #[arg(long)]
        d_lo: u64,
        #[arg(long)]
        d_hi: u64,
        #[arg(long, default_value_t = 0, value_parser = clap::value_parser!(u8).range(0..=1))]
        delta: u8,
        #[arg(long, value_enum)]
        weight: WeightArg,
    },
    /// Remainder sum R_δ^f(x, N) over N < d ≤ x/N
    Remainder {
        #[arg(long, value_parser = parse_x)]
        x: XValue,
        #[arg(long)]
        n_param: u64,
        #[arg(long, default_value_t = 0, value_parser = clap::value_parser!(u8).range(0..=1))]
        delta: u8,
        #[arg(long, value_enum)]
        f: RemainderF,
    },
    /// Exact vs predicted values over a geometric grid
    Scan(ScanArgs),
    /// Fit log|delta| against log x from a scan CSV
    Fit {
        #[arg(long)]
        input: PathBuf,
    },
    /// Compare block methods against the O(x) loop for every x ≤ max-x
    Verify {
        #[arg(long, value_parser = parse_x)]
        max_x: XValue,
    },
}

#[derive(Debug, Args)]
struct XArg {
    /// Integer or real (floored); scientific notation accepted
    #[arg(long, value_parser = parse_x)]
    x: XValue,
}

#[derive(Debug, Args)]
struct ScanArgs {
    #[arg(long, value_enum)]
    quantity: QuantityArg,
    #[arg(long, value_parser = parse_x)]
    from: XValue,
    #[arg(long, value_parser = parse_x)]
    to: XValue,
    #[arg(long)]
    points: usize,
    #[arg(long, value_enum, default_value = "sqrt-x")]
    normalizer: NormalizerArg,
    /// Constant in the pnt-envelope normalizer
    #[arg(long, default_value_t = 1.0)]
    c: f64,
    /// Modulus for --quantity progression
    #[arg(long)]
    q: Option<u64>,
    /// Residue for --quantity progression
    #[arg(long)]
    a: Option<u64>,
    /// Width of the enclosure of C_f (default 1e-2/sqrt(to))
    #[arg(long)]
    constant_tol: Option<f64>,
    #[arg(long, value_enum, default_value = "csv")]
    format: FormatArg,
    /// Output file (default: stdout)
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum FArg {
    Prime,
    PrimePower,
    Lambda,
}

impl From<FArg> for ArithFn {
    fn from(f: FArg) -> Self {
        match f {
            FArg::Prime => ArithFn::Prime,
            FArg::PrimePower => ArithFn::PrimePower,
            FArg::Lambda => ArithFn::Lambda,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum RemainderF {
    Prime,
    PrimePower,
    Lambda,
    One,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum WeightArg {
    Lambda,
    Logp,
    Prime,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum QuantityArg {
    PiS,
    SPrime,
    SPrimePower,
    SLambda,
    Cardinality,
    Progression,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum NormalizerArg {
    SqrtX,
    #[value(name = "x-9-19")]
    X919,
    PntEnvelope,
    LisTail,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

/// A parsed `--x`: the integer used, and the original text when it was
/// not a plain integer literal.
#[derive(Debug, Clone)]
struct XValue {
    value: u64,
    original: Option<String>,
    floored: bool,
}

fn parse_x(s: &str) -> Result<XValue, String> {
    if let Ok(v) = s.parse::<u64>() {
        return Ok(XValue {
            value: v,
            original: None,
            floored: false,
        });
    }
    let f: f64 = s.parse().map_err(|_| format!("`{s}` is not a number"))?;
    if !f.is_finite() || f < 0.0 || f >= u64::MAX as f64 {
        return Err(format!("`{s}` is out of range"));
    }
    let v = f.floor() as u64;
    Ok(XValue {
        value: v,
        original: Some(s.to_string()),
        floored: v as f64 != f,
    })
}

type CmdResult = Result<(), Box<dyn std::error::Error + Send + Sync>>;

/// Runs the CLI. Returns the process exit code: 0 on success, 2 on usage
/// errors, 1 on runtime errors.
pub fn run<I, T>(args: I, out: &mut (dyn Write + Send), err: &mut (dyn Write + Send)) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            let rendered = e.render();
            let _ = if e.use_stderr() {
                write!(err, "{rendered}")
            } else {
                write!(out, "{rendered}")
            };
            return code;
        }
    };
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = cli.threads {
        if n == 0 {
            let _ = writeln!(err, "error: --threads must be at least 1");
            return 2;
        }
        builder = builder.num_threads(n);
    }
    let pool = match builder.build() {
        Ok(p) => p,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return 1;
        }
    };
    match pool.install(|| dispatch(cli.command, out, err)) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            1
        }
    }
}

fn note_floor(x: &XValue, err: &mut (dyn Write + Send)) -> std::io::Result<u64> {
    match &x.original {
        Some(orig) if x.floored => writeln!(err, "note: x = {orig} floored to {}", x.value)?,
        Some(orig) => writeln!(err, "note: x = {orig} read as {}", x.value)?,
        None => {}
    }
    Ok(x.value)
}

fn dispatch(
    command: Command,
    out: &mut (dyn Write + Send),
    err: &mut (dyn Write + Send),
) -> CmdResult {
    match command {
        Command::PiS(x) => {
            let x = note_floor(&x.x, err)?;
            writeln!(out, "{}", exact::pi_s(x)?.value)?;
        }
        Command::SCount { f, x } => {
            let x = note_floor(&x.x, err)?;
            writeln!(out, "{}", exact::s_f(x, f.into())?.value)?;
        }
        Command::Cardinality(x) => {
            let x = note_floor(&x.x, err)?;
            writeln!(out, "{}", floorset::cardinality(x)?)?;
        }
        Command::Progression { x, q, a } => {
            let x = note_floor(&x.x, err)?;
            writeln!(out, "{}", floorset::count_in_progression(x, q, a)?)?;
        }
        Command::Lis { x } => {
            if x < 4.0 {
                writeln!(
                    err,
                    "warning: Li_S(x) is an empty integral for x < 4; reporting 0"
                )?;
                writeln!(out, "0")?;
            } else {
                writeln!(out, "{}", asym::li_s(x)?)?;
            }
        }
        Command::Li { x } => writeln!(out, "{}", asym::li(x)?)?,
        Command::Coeffs { n } => {
            for a in asym::coeffs(n)?.a {
                writeln!(out, "{a}")?;
            }
        }
        Command::Constants { f, tol } => {
            let f: ArithFn = f.into();
            let table = PrimeTable::new(asym::required_limit(f, tol)?)?;
            let c = asym::constant(f, tol, &table)?;
            writeln!(out, "{}", serde_json::to_string_pretty(&c)?)?;
        }
        Command::Psisum {
            x,
            d_lo,
            d_hi,
            delta,
            weight,
        } => {
            let x = note_floor(&x, err)?;
            let weight = match weight {
                WeightArg::Lambda => Weight::Lambda,
                WeightArg::Logp => Weight::LogPrime,
                WeightArg::Prime => Weight::PrimeIndicator,
            };
            let r = psisum::frak_s(x, d_lo, d_hi, delta, weight)?;
            writeln!(out, "{}", serde_json::to_string_pretty(&r)?)?;
        }
        Command::Remainder {
            x,
            n_param,
            delta,
            f,
        } => {
            let x = note_floor(&x, err)?;
            let f = match f {
                RemainderF::Prime => ArithFn::Prime,
                RemainderF::PrimePower => ArithFn::PrimePower,
                RemainderF::Lambda => ArithFn::Lambda,
                RemainderF::One => ArithFn::One,
            };
            let r = psisum::remainder_r(x, n_param, delta, f)?;
            writeln!(out, "{}", serde_json::to_string_pretty(&r)?)?;
        }
        Command::Scan(args) => scan(args, out, err)?,
        Command::Fit { input } => {
            let records = harness::read_csv(File::open(&input)?)?;
            let fit = harness::fit_exponent(&records)?;
            writeln!(out, "{}", serde_json::to_string_pretty(&fit)?)?;
        }
        Command::Verify { max_x } => verify(note_floor(&max_x, err)?, out)?,
    }
    Ok(())
}

fn scan(args: ScanArgs, out: &mut (dyn Write + Send), err: &mut (dyn Write + Send)) -> CmdResult {
    let quantity = match args.quantity {
        QuantityArg::PiS => ScanQuantity::PiS,
        QuantityArg::SPrime => ScanQuantity::SPrime,
        QuantityArg::SPrimePower => ScanQuantity::SPrimePower,
        QuantityArg::SLambda => ScanQuantity::SLambda,
        QuantityArg::Cardinality => ScanQuantity::Cardinality,
        QuantityArg::Progression => match (args.q, args.a) {
            (Some(q), Some(a)) => ScanQuantity::Progression { q, a },
            _ => return Err("--quantity progression needs --q and --a".into()),
        },
    };
    let normalizer = match args.normalizer {
        NormalizerArg::SqrtX => Normalizer::SqrtX,
        NormalizerArg::X919 => Normalizer::X919,
        NormalizerArg::PntEnvelope => Normalizer::PntEnvelope { c: args.c },
        NormalizerArg::LisTail => Normalizer::LiSTail,
    };
    let mut config = ScanConfig::new(
        quantity,
        note_floor(&args.from, err)?,
        note_floor(&args.to, err)?,
        args.points,
        normalizer,
    );
    config.constant_tol = args.constant_tol;
    let report = harness::scan_report(&config)?;
    let format = match args.format {
        FormatArg::Csv => OutputFormat::Csv,
        FormatArg::Json => OutputFormat::Json,
    };
    match args.out {
        Some(path) => {
            let mut w = BufWriter::new(File::create(path)?);
            harness::emit(&report, format, &mut w)?;
            w.flush()?;
        }
        None => harness::emit(&report, format, out)?,
    }
    Ok(())
}

fn verify(max_x: u64, out: &mut (dyn Write + Send)) -> CmdResult {
    let oracle = BruteForce::new(max_x)?;
    let mut mismatches = 0u64;
    for x in 1..=max_x {
        let sweep = oracle.sweep(x)?;
        let mut check = |what: &str, ok: bool| -> std::io::Result<()> {
            if !ok {
                mismatches += 1;
                writeln!(out, "MISMATCH x={x} {what}")?;
            }
            Ok(())
        };
        check("pi_S", exact::pi_s(x)?.value.as_count() == Some(sweep.pi_s))?;
        check(
            "S_prime",
            exact::s_f(x, ArithFn::Prime)?.value.as_count() == Some(sweep.s_prime),
        )?;
        check(
            "S_prime_power",
            exact::s_f(x, ArithFn::PrimePower)?.value.as_count() == Some(sweep.s_prime_power),
        )?;
        check(
            "S_one",
            exact::s_f(x, ArithFn::One)?.value.as_count() == Some(sweep.s_one),
        )?;
        let l = exact::s_f(x, ArithFn::Lambda)?.value.as_f64();
        check(
            "S_lambda",
            (l - sweep.s_lambda).abs() <= 1e-9 * (1.0 + l.abs()),
        )?;
        check(
            "cardinality",
            floorset::cardinality(x)? == sweep.cardinality(),
        )?;
    }
    writeln!(out, "verified x = 1..={max_x}: {mismatches} mismatches")?;
    if mismatches > 0 {
        return Err(format!("{mismatches} mismatches").into());
    }
    Ok(())
}
