use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use ptsym::error::Error;
use ptsym::opmethod::PairingScheme;
use ptsym::sweep::{self, Source, SweepResult};

/// Operator-method eigenvalues of H = -d²/dx² - (ix)^(ε+2) and baselines.
#[derive(Parser, Debug)]
#[command(name = "ptsym", version)]
struct Cli {
    /// Worker threads (default: available parallelism).
    #[arg(long, global = true)]
    jobs: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Quartic anharmonic oscillator: zeroth-order vs exact levels.
    Table1(Output),
    /// ε ∈ {1, 2}: exact, operator-method and WKB levels.
    Table2(Output),
    /// Spectra over a grid of ε.
    Sweep(SweepArgs),
    /// Branch point of a mixing pair.
    Branch(BranchArgs),
}

#[derive(Args, Debug)]
struct Output {
    /// Write the data to this file.
    #[arg(long)]
    out: Option<PathBuf>,
    /// JSON instead of CSV.
    #[arg(long)]
    json: bool,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Scheme {
    Solo,
    Standard,
    Outlook,
    Auto,
}

impl Scheme {
    fn pairing(self) -> Option<PairingScheme> {
        match self {
            Scheme::Solo => Some(PairingScheme::Solo),
            Scheme::Standard => Some(PairingScheme::StandardMix),
            Scheme::Outlook => Some(PairingScheme::OutlookMix),
            Scheme::Auto => None,
        }
    }
}

#[derive(Args, Debug)]
struct SweepArgs {
    /// Single ε values (comma separated).
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true, conflicts_with = "eps_range")]
    eps: Vec<f64>,
    /// Grid `lo:hi:step`, both ends included.
    #[arg(long, allow_hyphen_values = true)]
    eps_range: Option<String>,
    #[arg(long, default_value_t = 5)]
    levels: usize,
    #[arg(long, value_enum, default_value_t = Scheme::Auto)]
    scheme: Scheme,
    /// Any of analytic, reference, wkb.
    #[arg(long, value_delimiter = ',', default_value = "analytic,reference")]
    methods: Vec<String>,
    /// Output file (default sweep.csv, or sweep.json with --json).
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    json: bool,
}

#[derive(Args, Debug)]
struct BranchArgs {
    /// The two mixed levels, e.g. `1,2`.
    #[arg(long, default_value = "1,2")]
    pair: String,
    #[arg(long, value_enum, default_value_t = Scheme::Standard)]
    scheme: Scheme,
    /// Search interval `lo:hi`.
    #[arg(long, allow_hyphen_values = true, default_value = "-0.9:-0.3")]
    eps_range: String,
    /// Also write the report to this file.
    #[arg(long)]
    out: Option<PathBuf>,
}

/// A failure together with its exit status.
struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::NoRoot { .. } | Error::NoSignChange { .. } | Error::NegativeBracket { .. } => 2,
            Error::ReferenceNonConvergence { .. } => 4,
            _ => 1,
        };
        Failure { code, message: e.to_string() }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure { code: 1, message: e.to_string() }
    }
}

impl From<csv::Error> for Failure {
    fn from(e: csv::Error) -> Self {
        Failure { code: 1, message: e.to_string() }
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Self {
        Failure { code: 1, message: e.to_string() }
    }
}

fn usage(message: String) -> Failure {
    Failure { code: 1, message }
}

fn create(path: &Path) -> Result<BufWriter<File>, Failure> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| usage(format!("cannot write {}: {e}", path.display())))
}

fn write_table<T: serde::Serialize>(rows: &[T], out: &Output) -> Result<(), Failure> {
    let Some(path) = &out.out else { return Ok(()) };
    let mut w = create(path)?;
    if out.json {
        serde_json::to_writer_pretty(&mut w, rows)?;
        writeln!(w)?;
    } else {
        sweep::write_rows_csv(&mut w, rows)?;
    }
    w.flush()?;
    Ok(())
}

fn table1(out: &Output) -> Result<(), Failure> {
    let rows = sweep::table1()?;
    let mut stdout = io::stdout().lock();
    write!(stdout, "{:>4}", "n")?;
    for l in sweep::TABLE1_COUPLINGS {
        write!(stdout, " {:>22}", format!("λ = {l}"))?;
    }
    writeln!(stdout)?;
    for n in sweep::TABLE1_LEVELS {
        write!(stdout, "{n:>4}")?;
        for r in rows.iter().filter(|r| r.n == n) {
            write!(stdout, " {:>22}", format!("{:.4} ({:.4})", r.analytic, r.reference))?;
        }
        writeln!(stdout)?;
    }
    write_table(&rows, out)
}

fn table2(out: &Output) -> Result<(), Failure> {
    let rows = sweep::table2()?;
    let mut stdout = io::stdout().lock();
    for e in sweep::TABLE2_EPS {
        writeln!(stdout, "ε = {e}\n{:>4} {:>10} {:>10} {:>10}", "n", "exact", "analytic", "wkb")?;
        for r in rows.iter().filter(|r| r.eps == e) {
            writeln!(stdout, "{:>4} {:>10.3} {:>10.3} {:>10.3}", r.n, r.exact, r.analytic, r.wkb)?;
        }
    }
    write_table(&rows, out)
}

fn parse_numbers(s: &str, count: usize) -> Result<Vec<f64>, Failure> {
    let parts: Vec<&str> = s.split(':').collect();
    let bad = || usage(format!("expected {count} numbers separated by ':', got {s:?}"));
    if parts.len() != count {
        return Err(bad());
    }
    parts.iter().map(|p| p.trim().parse::<f64>().map_err(|_| bad())).collect()
}

fn print_point(result: &SweepResult) -> io::Result<()> {
    let mut stdout = io::stdout().lock();
    writeln!(stdout, "{:>3} {:>10} {:>26} {:>10} {:>10} {:>10}", "n", "method", "E", "omega", "u", "u_phys")?;
    for r in &result.rows {
        let e = r.energy().map_or("failed".into(), |e| format!("{:.6} {:+.6}i", e.re, e.im));
        let (w, u, phys) = match (r.omega, r.ushift) {
            (Some(w), Some(u)) => (format!("{w:.6}"), format!("{u:.6}"), format!("{:.6}", u / w.sqrt())),
            _ => ("-".into(), "-".into(), "-".into()),
        };
        writeln!(stdout, "{:>3} {:>10} {e:>26} {w:>10} {u:>10} {phys:>10}", r.n, r.method)?;
    }
    Ok(())
}

fn run_sweep(args: &SweepArgs) -> Result<(), Failure> {
    let grid = match (&args.eps_range, args.eps.is_empty()) {
        (Some(range), _) => {
            let v = parse_numbers(range, 3)?;
            sweep::eps_grid(v[0], v[1], v[2])?
        }
        (None, false) => {
            let mut g = args.eps.clone();
            g.sort_by(f64::total_cmp);
            g.dedup();
            g
        }
        (None, true) => return Err(usage("one of --eps or --eps-range is required".into())),
    };
    let sources = args
        .methods
        .iter()
        .map(|m| m.parse::<Source>())
        .collect::<Result<Vec<_>, _>>()?;
    let result = sweep::sweep(&grid, args.levels, args.scheme.pairing(), &sources);
    for d in &result.diagnostics {
        eprintln!("{d}");
    }
    let path = args.out.clone().unwrap_or_else(|| PathBuf::from(if args.json { "sweep.json" } else { "sweep.csv" }));
    let mut w = create(&path)?;
    if args.json {
        writeln!(w, "{}", result.to_json()?)?;
    } else {
        result.write_csv(&mut w)?;
    }
    w.flush()?;
    if grid.len() == 1 {
        print_point(&result)?;
    }
    eprintln!("{} rows ({} failed) written to {}", result.rows.len(), result.failures(), path.display());
    if result.success_fraction() < 0.95 {
        return Err(Failure { code: 3, message: format!("{} of {} rows failed", result.failures(), result.rows.len()) });
    }
    Ok(())
}

fn run_branch(args: &BranchArgs) -> Result<(), Failure> {
    let pair: Vec<usize> = args
        .pair
        .split(',')
        .map(|p| p.trim().parse())
        .collect::<Result<_, _>>()
        .map_err(|_| usage(format!("bad pair {:?}", args.pair)))?;
    if pair.len() != 2 {
        return Err(usage(format!("bad pair {:?}", args.pair)));
    }
    let range = parse_numbers(&args.eps_range, 2)?;
    let scheme = args.scheme.pairing().ok_or_else(|| usage("branch needs an explicit mixing scheme".into()))?;
    let report = sweep::branch((pair[0], pair[1]), scheme, range[0], range[1])?;
    let text = serde_json::to_string_pretty(&report)?;
    println!("{text}");
    if let Some(path) = &args.out {
        let mut w = create(path)?;
        writeln!(w, "{text}")?;
        w.flush()?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    if let Some(jobs) = cli.jobs {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(jobs.max(1)).build_global() {
            eprintln!("ptsym: {e}");
            return ExitCode::from(1);
        }
    }
    let result = match &cli.command {
        Command::Table1(out) => table1(out),
        Command::Table2(out) => table2(out),
        Command::Sweep(args) => run_sweep(args),
        Command::Branch(args) => run_branch(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("ptsym: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
