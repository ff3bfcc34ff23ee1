use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use containment::extremal::FamilyParams;
use containment::io::read_polygon;
use containment_cli::region::{self, RegionConfig, Which};
use containment_cli::verify::{self, Suite, VerifyConfig};
use containment_cli::{analyze, generate, CliError, CliResult};

/// Asymmetry, containment and diameter-width computations for convex polygons.
#[derive(Parser)]
#[command(name = "containment", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Measure s, τ, α, γ and D/w of a polygon file.
    Analyze {
        input: PathBuf,
        /// Gauge polygon for D/w; defaults to K ∩ (−K) after centering.
        #[arg(long)]
        gauge: Option<PathBuf>,
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Build a member of a generated family.
    Generate {
        family: Family,
        #[arg(long)]
        s: Option<f64>,
        #[arg(long)]
        t: Option<f64>,
        #[arg(long)]
        tau: Option<f64>,
        #[arg(long)]
        nu: Option<f64>,
        #[arg(long)]
        lambda: Option<f64>,
        #[arg(long)]
        rho: Option<f64>,
        /// Polygon file; sidecars go next to it. Without it, one JSON
        /// document goes to standard output.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Sample a region as CSV or JSON rows.
    Region {
        which: Which,
        #[arg(long, default_value_t = 100)]
        grid: usize,
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
    },
    /// Run a verification suite and print a JSON report.
    Verify {
        suite: Suite,
        #[arg(long, default_value_t = 200)]
        samples: usize,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Family {
    GoldenHouse,
    #[value(name = "k-s")]
    KS,
    FTransform,
    Heptagon,
    ExtremalFor,
    CLambda,
    DwWitness,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

fn need(v: Option<f64>, flag: &str, family: &str) -> CliResult<f64> {
    v.ok_or_else(|| CliError::Usage(format!("{family} needs --{flag}")))
}

struct Params {
    s: Option<f64>,
    t: Option<f64>,
    tau: Option<f64>,
    nu: Option<f64>,
    lambda: Option<f64>,
    rho: Option<f64>,
}

fn family_params(family: Family, p: &Params) -> CliResult<FamilyParams> {
    Ok(match family {
        Family::GoldenHouse => FamilyParams::GoldenHouse,
        Family::KS => FamilyParams::KS {
            s: need(p.s, "s", "k-s")?,
        },
        Family::FTransform => FamilyParams::FTransform {
            s: need(p.s, "s", "f-transform")?,
            t: need(p.t, "t", "f-transform")?,
        },
        Family::Heptagon => FamilyParams::Heptagon {
            tau: need(p.tau, "tau", "heptagon")?,
            nu: need(p.nu, "nu", "heptagon")?,
        },
        Family::ExtremalFor => FamilyParams::ExtremalFor {
            s: need(p.s, "s", "extremal-for")?,
            tau: need(p.tau, "tau", "extremal-for")?,
        },
        Family::CLambda => FamilyParams::CLambda {
            s: need(p.s, "s", "c-lambda")?,
            lambda: need(p.lambda, "lambda", "c-lambda")?,
        },
        Family::DwWitness => FamilyParams::DwWitness {
            s: need(p.s, "s", "dw-witness")?,
            rho: need(p.rho, "rho", "dw-witness")?,
        },
    })
}

fn sink(out: Option<&Path>) -> CliResult<Box<dyn Write>> {
    Ok(match out {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn emit(out: Option<&Path>, text: &str) -> CliResult<()> {
    let mut w = sink(out)?;
    writeln!(w, "{text}")?;
    w.flush()?;
    Ok(())
}

fn run(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Analyze {
            input,
            gauge,
            tol,
            out,
        } => {
            let k = read_polygon(&input)?;
            let c = gauge.map(read_polygon).transpose()?;
            let report = analyze::analyze(&k, c.as_ref(), tol)?;
            emit(out.as_deref(), &serde_json::to_string_pretty(&report)?)?;
            let pc = report.gauge.pseudo_complete.is_pseudo_complete;
            if !report.region.tau_in_region || (pc && !report.region.dw_in_region) {
                return Err(CliError::Violation(format!(
                    "(s, tau) = ({}, {}), D/w = {} outside the region",
                    report.s, report.tau, report.gauge.dw
                )));
            }
            Ok(())
        }
        Command::Generate {
            family,
            s,
            t,
            tau,
            nu,
            lambda,
            rho,
            out,
        } => {
            let params = family_params(
                family,
                &Params {
                    s,
                    t,
                    tau,
                    nu,
                    lambda,
                    rho,
                },
            )?;
            let g = generate::generate(params)?;
            match out {
                Some(path) => {
                    for p in generate::write_outputs(&g, &path)? {
                        eprintln!("wrote {}", p.display());
                    }
                }
                None => emit(None, &generate::to_json(&g)?)?,
            }
            Ok(())
        }
        Command::Region {
            which,
            grid,
            samples,
            seed,
            tol,
            out,
            format,
        } => {
            let cfg = RegionConfig {
                which,
                grid,
                samples,
                seed,
                tol,
            };
            let result = region::run(&cfg)?;
            let w = sink(out.as_deref())?;
            match format {
                Format::Csv => region::write_csv(&result.rows, w)?,
                Format::Json => region::write_json(&result.rows, w)?,
            }
            if result.violations.is_empty() {
                return Ok(());
            }
            let dir = out
                .as_deref()
                .and_then(Path::parent)
                .filter(|d| !d.as_os_str().is_empty())
                .map(Path::to_path_buf)
                .unwrap_or_else(|| PathBuf::from("."));
            let dumped = region::dump_violations(&result.violations, &dir)?;
            Err(CliError::Violation(format!(
                "{} samples outside the region; details in {}",
                dumped.len(),
                dumped
                    .iter()
                    .map(|p| p.display().to_string())
                    .collect::<Vec<_>>()
                    .join(", ")
            )))
        }
        Command::Verify {
            suite,
            samples,
            seed,
            out,
        } => {
            let report = verify::run(suite, &VerifyConfig { samples, seed });
            emit(out.as_deref(), &serde_json::to_string_pretty(&report)?)?;
            let failed = report.checks.iter().filter(|c| !c.pass).count();
            if failed > 0 {
                return Err(CliError::Violation(format!("{failed} checks failed")));
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("containment: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
