//! `hbcycle`: compute, verify and export Lorenz cycles.
//!
//! Exit codes: 0 success, 1 numerical failure, 2 I/O or configuration error.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use hbcycle::continuation::{self, ContinuationSchedule, SectionRule};
use hbcycle::newton::NewtonConfig;
use hbcycle::solution::{self, Provenance, SolutionFile, DEFAULT_SAMPLES};
use hbcycle::taylor::{self, TaylorConfig};
use hbcycle::{Error, LorenzParams};

#[derive(Parser)]
#[command(
    name = "hbcycle",
    version,
    about = "Harmonic-balance cycles of the Lorenz system"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the continuation and write a solution file.
    Solve(SolveArgs),
    /// Integrate a stored cycle over one period in extended precision.
    Verify(VerifyArgs),
    /// Write coefficient tables, a sampled trajectory or an SVG plot.
    Export(ExportArgs),
}

#[derive(Args)]
struct SolveArgs {
    /// Harmonic counts of the continuation, comma separated.
    #[arg(long, value_delimiter = ',', default_value = "5,10,15,20,25,30,35")]
    h_schedule: Vec<usize>,
    /// Newton stopping tolerance on the residual max-norm.
    #[arg(long, default_value_t = 1e-8)]
    tol: f64,
    #[arg(long, default_value_t = 200)]
    max_iter: usize,
    #[arg(long, default_value_t = 10.0)]
    sigma: f64,
    #[arg(long, default_value_t = 28.0)]
    r: f64,
    #[arg(long, default_value_t = 8.0 / 3.0)]
    b: f64,
    /// Value of x3(0); defaults to r - 1.
    #[arg(long)]
    anchor: Option<f64>,
    #[arg(long, short, default_value = "cycle.json")]
    output: PathBuf,
    /// Start from the built-in guess as given instead of its symmetric part.
    #[arg(long)]
    no_symmetry: bool,
    /// Keep the phase Newton converges to instead of the section crossing.
    #[arg(long)]
    keep_phase: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum ReportFormat {
    Text,
    Json,
}

#[derive(Args)]
struct VerifyArgs {
    file: PathBuf,
    #[arg(long, default_value_t = 1e-25)]
    series_tol: f64,
    /// Fewest roundtrip digits accepted for exit code 0.
    #[arg(long, default_value_t = 7)]
    min_digits: u32,
    #[arg(long, value_enum, default_value = "text")]
    format: ReportFormat,
}

#[derive(Clone, Copy, ValueEnum)]
enum ExportFormat {
    CsvTables,
    TrajectoryCsv,
    Svg,
}

#[derive(Args)]
struct ExportArgs {
    file: PathBuf,
    #[arg(long, value_enum)]
    format: ExportFormat,
    /// Output file, or directory for csv-tables. Standard output if omitted
    /// (current directory for csv-tables).
    #[arg(long, short)]
    output: Option<PathBuf>,
    #[arg(long, default_value_t = DEFAULT_SAMPLES)]
    samples: usize,
}

struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Config(_) | Error::Parse(_) | Error::Dimension { .. } => 2,
            _ => 1,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

fn io_failure(path: &Path, e: std::io::Error) -> Failure {
    Failure {
        code: 2,
        message: format!("{}: {e}", path.display()),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Solve(args) => solve(args),
        Command::Verify(args) => verify(args),
        Command::Export(args) => export(args),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn solve(args: SolveArgs) -> Result<u8, Failure> {
    let params = LorenzParams {
        sigma: args.sigma,
        r: args.r,
        b: args.b,
    };
    params.validate()?;
    let anchor = args.anchor.unwrap_or(params.equilibrium_height());
    let schedule = ContinuationSchedule {
        steps: args.h_schedule,
        newton: NewtonConfig {
            tol: args.tol,
            max_iter: args.max_iter,
            ..Default::default()
        },
        symmetric_start: !args.no_symmetry,
        section: if args.keep_phase {
            SectionRule::AsSolved
        } else {
            SectionRule::Downward
        },
    };
    schedule.validate()?;
    let guess = continuation::initial_guess(schedule.steps[0])?;
    let result = continuation::run_with_anchor(&params, anchor, &schedule, &guess)?;
    let sol = &result.solution;
    let last = result.reports.last().expect("schedule is non-empty");

    println!("{:>4} {:>6} {:>12}", "h", "iters", "residual");
    for rep in &result.reports {
        println!(
            "{:>4} {:>6} {:>12.3e}",
            rep.h, rep.iterations, rep.final_residual_norm
        );
    }
    let x0 = sol.initial_state();
    println!("T     = {:.9}  ({})", sol.period(), sol.period());
    println!("omega = {}", sol.omega);
    println!("x(0)  = ({:.9}, {:.9}, {:.9})", x0[0], x0[1], x0[2]);
    println!("residual max-norm = {:.3e}", last.final_residual_norm);

    let provenance = Provenance::now(
        schedule.steps.clone(),
        result.reports.iter().map(|r| r.iterations).collect(),
        schedule.newton.tol,
        last.final_residual_norm,
    );
    let file = SolutionFile::new(sol, params, anchor, Some(provenance));
    fs::write(&args.output, file.to_json()).map_err(|e| io_failure(&args.output, e))?;
    println!("wrote {}", args.output.display());
    Ok(0)
}

fn read_solution(path: &Path) -> Result<SolutionFile, Failure> {
    let text = fs::read_to_string(path).map_err(|e| io_failure(path, e))?;
    SolutionFile::from_json(&text).map_err(|e| Failure {
        code: 2,
        message: format!("{}: {e}", path.display()),
    })
}

fn verify(args: VerifyArgs) -> Result<u8, Failure> {
    let file = read_solution(&args.file)?;
    let cfg = TaylorConfig {
        series_tol: args.series_tol,
        ..Default::default()
    };
    let rep = taylor::verify_cycle(&file.solution(), &file.params, &cfg)?;
    match args.format {
        ReportFormat::Json => {
            println!(
                "{}",
                serde_json::to_string_pretty(&rep).expect("report serializes")
            )
        }
        ReportFormat::Text => {
            println!("period T = {}", rep.period);
            println!("{:<10} {:>22} {:>22}", "", "X(0)", "X(T)");
            for k in 0..3 {
                println!(
                    "{:<10} {:>22.15} {:>22.15}",
                    format!("x{}", k + 1),
                    rep.initial_state[k],
                    rep.final_state[k]
                );
            }
            println!(
                "{:<10} {:>10} {:>8} {:>6}",
                "check", "error", "digits", "steps"
            );
            println!(
                "{:<10} {:>10.3e} {:>8} {:>6}",
                "roundtrip", rep.roundtrip_error, rep.digits_roundtrip, rep.forward.steps
            );
            println!(
                "{:<10} {:>10.3e} {:>8} {:>6}",
                "reverse", rep.reverse_error, rep.digits_reverse, rep.backward.steps
            );
        }
    }
    if rep.digits_roundtrip >= args.min_digits {
        Ok(0)
    } else {
        eprintln!(
            "roundtrip agreement {} digits is below the floor of {}",
            rep.digits_roundtrip, args.min_digits
        );
        Ok(1)
    }
}

fn write_output(path: Option<&Path>, text: &str) -> Result<(), Failure> {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| io_failure(p, e)),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn export(args: ExportArgs) -> Result<u8, Failure> {
    let file = read_solution(&args.file)?;
    let sol = file.solution();
    match args.format {
        ExportFormat::CsvTables => {
            let dir = args.output.unwrap_or_else(|| PathBuf::from("."));
            fs::create_dir_all(&dir).map_err(|e| io_failure(&dir, e))?;
            for k in 0..3 {
                let path = dir.join(format!("x{}_amplitudes.csv", k + 1));
                fs::write(&path, solution::amplitude_table_csv(&sol, k))
                    .map_err(|e| io_failure(&path, e))?;
            }
        }
        ExportFormat::TrajectoryCsv => {
            let csv = solution::trajectory_csv(&sol, args.samples)?;
            write_output(args.output.as_deref(), &csv)?;
        }
        ExportFormat::Svg => {
            let svg = solution::projection_svg(&sol, args.samples)?;
            write_output(args.output.as_deref(), &svg)?;
        }
    }
    Ok(0)
}
