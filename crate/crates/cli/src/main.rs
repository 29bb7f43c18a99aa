use std::fs::File;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand, ValueEnum};
use mvop_core::commutant::{analyze, analyze_exact};
use mvop_core::diffops::build_operators;
use mvop_core::mvop::generate;
use mvop_core::quadrature::MAX_FOURIER_DEGREE;
use mvop_core::spherical::sym_power_psi0;
use mvop_core::verify;
use mvop_core::weight::{domain_boundary, measure_constants, WeightSpec};
use mvop_core::Error;

#[derive(Parser)]
#[command(name = "mvop", version, about = "Matrix-valued orthogonal polynomials for the SU(n+1) group case")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Polynomial weight W_pol, scalar density P and prefactor as JSON.
    Weight(Common),
    /// Matrix of degree-zero spherical functions on the torus as JSON.
    Psi0(Common),
    /// Boundary samples of the orthogonality domain as CSV.
    Domain(Common),
    /// Measure constants (normalization, volume, Selberg values) as JSON.
    Constants(Common),
    /// The differential operators D+ and D- as JSON.
    Operators(Common),
    /// Generates the family Q_d up to the given total degree.
    Generate(Common),
    /// Numerical and exact commutant of the weight.
    Commutant(Common),
    /// Runs the acceptance checks, plus family checks for the given (n, k).
    Verify(Common),
}

#[derive(Clone, Copy, ValueEnum, PartialEq, Eq)]
enum Format {
    Json,
    Csv,
}

#[derive(Args, Clone)]
struct Common {
    #[arg(long, default_value_t = 2)]
    n: usize,
    #[arg(long, default_value_t = 1)]
    k: u32,
    #[arg(long, default_value_t = 2)]
    max_degree: u32,
    /// Largest Fourier degree handled by the floating grid.
    #[arg(long, default_value_t = MAX_FOURIER_DEGREE)]
    grid_cap: usize,
    /// Samples per edge for `domain`.
    #[arg(long, default_value_t = 64)]
    resolution: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output file; standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

enum Failure {
    Usage(String),
    Check,
    Other(anyhow::Error),
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        match e.downcast_ref::<Error>() {
            Some(Error::Range(_) | Error::Unsupported(_) | Error::GridOverflow { .. }) => Failure::Usage(e.to_string()),
            _ => Failure::Other(e),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::from(anyhow::Error::new(e))
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Other(e.into())
    }
}

fn usage(msg: impl Into<String>) -> Failure {
    Failure::Usage(msg.into())
}

fn validate(cmd: &str, c: &Common) -> Result<(), Failure> {
    let max_n = match cmd {
        "generate" | "verify" | "domain" => 3,
        _ => 6,
    };
    if c.n == 0 || c.n > max_n {
        return Err(usage(format!("{cmd}: --n must be in 1..={max_n}")));
    }
    if cmd == "operators" && c.k > 1 {
        return Err(usage("operators: --k must be 0 or 1"));
    }
    Ok(())
}

fn sink(out: &Option<PathBuf>) -> anyhow::Result<Box<dyn Write>> {
    Ok(match out {
        Some(p) => Box::new(File::create(p).with_context(|| format!("creating {}", p.display()))?),
        None => Box::new(io::stdout().lock()),
    })
}

fn write_json(out: &Option<PathBuf>, v: &serde_json::Value) -> Result<(), Failure> {
    let mut w = sink(out)?;
    serde_json::to_writer_pretty(&mut w, v).map_err(anyhow::Error::from)?;
    writeln!(w)?;
    Ok(())
}

fn write_csv(out: &Option<PathBuf>, header: &[String], rows: &[Vec<String>]) -> Result<(), Failure> {
    let mut w = csv::Writer::from_writer(sink(out)?);
    w.write_record(header).map_err(anyhow::Error::from)?;
    for r in rows {
        w.write_record(r).map_err(anyhow::Error::from)?;
    }
    w.flush()?;
    Ok(())
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Weight(c) => {
            validate("weight", &c)?;
            write_json(&c.out, &WeightSpec::new(c.n, c.k)?.to_json())
        }
        Command::Psi0(c) => {
            validate("psi0", &c)?;
            let m = sym_power_psi0(c.n, c.k)?;
            let entries: Vec<Vec<serde_json::Value>> = (0..m.rows())
                .map(|i| (0..m.cols()).map(|j| m.get(i, j).to_json()).collect())
                .collect();
            let pretty: Vec<Vec<String>> =
                (0..m.rows()).map(|i| (0..m.cols()).map(|j| m.get(i, j).to_string_pretty()).collect()).collect();
            write_json(&c.out, &serde_json::json!({ "n": c.n, "k": c.k, "entries": entries, "pretty": pretty }))
        }
        Command::Domain(c) => {
            validate("domain", &c)?;
            if c.resolution < 2 {
                return Err(usage("domain: --resolution must be at least 2"));
            }
            let pts = domain_boundary(c.n, c.resolution);
            let mut header: Vec<String> = (1..=c.n).map(|i| format!("b{i}")).collect();
            header.extend((1..=c.n).map(|i| format!("x{i}")));
            let rows: Vec<Vec<String>> = pts
                .iter()
                .map(|p| p.alcove.iter().chain(&p.coords).map(|x| format!("{x:.12}")).collect())
                .collect();
            write_csv(&c.out, &header, &rows)
        }
        Command::Constants(c) => {
            validate("constants", &c)?;
            write_json(&c.out, &measure_constants(c.n).to_json())
        }
        Command::Operators(c) => {
            validate("operators", &c)?;
            write_json(&c.out, &build_operators(c.n, c.k)?.to_json())
        }
        Command::Generate(c) => {
            validate("generate", &c)?;
            let f = generate(c.n, c.k, c.max_degree)?;
            match c.format {
                Format::Json => write_json(&c.out, &f.to_json()),
                Format::Csv => {
                    let header: Vec<String> =
                        ["d", "column", "label", "gamma_plus", "gamma_minus", "H", "H_expected"].map(String::from).to_vec();
                    write_csv(&c.out, &header, &f.table_rows())
                }
            }
        }
        Command::Commutant(c) => {
            validate("commutant", &c)?;
            let w = WeightSpec::new(c.n, c.k)?.w_pol;
            let size = w.shape().0;
            let report = analyze(&w, 4 * size * size, c.seed)?;
            let exact = analyze_exact(&w);
            let mut v = report.to_json();
            v["exact"] = serde_json::json!({
                "dim_AW": exact.dim_aw,
                "dim_script_AW": exact.dim_script_aw,
                "star_invariant": exact.star_invariant,
            });
            v["n"] = c.n.into();
            v["k"] = c.k.into();
            write_json(&c.out, &v)
        }
        Command::Verify(c) => {
            validate("verify", &c)?;
            let mut results = verify::run_all(c.seed);
            results.push(verify::family_checks(c.n, c.k, c.max_degree, c.grid_cap));
            if let Some(path) = &c.out {
                let v: Vec<serde_json::Value> = results.iter().map(|r| r.to_json()).collect();
                write_json(&Some(path.clone()), &serde_json::Value::Array(v))?;
            }
            let mut stdout = io::stdout().lock();
            for r in &results {
                writeln!(stdout, "{}", r.line())?;
                for d in &r.details {
                    writeln!(stdout, "        {d}")?;
                }
            }
            let failed = results.iter().filter(|r| !r.passed).count();
            writeln!(stdout, "{} of {} checks passed", results.len() - failed, results.len())?;
            if failed > 0 {
                return Err(Failure::Check);
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Check) => ExitCode::from(1),
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            eprintln!("run `mvop --help` for usage");
            ExitCode::from(2)
        }
        Err(Failure::Other(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
