use std::io::Read;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use selfsim_cli::export::{export_csv, export_svg};
use selfsim_cli::run::draws_curves;
use selfsim_cli::{parse_spec, run, CliError, Command, Result};

#[derive(Parser)]
#[command(name = "selfsim", version, about = "Verify and integrate self-similar surfaces H = alpha<N,x> + lambda")]
struct Cli {
    #[command(subcommand)]
    command: Sub,

    /// Job file (JSON); `-` reads standard input.
    #[arg(long, global = true)]
    spec: Option<PathBuf>,

    /// Pass/fail threshold on the largest residual.
    #[arg(long, global = true, default_value_t = 1e-8)]
    tol: f64,

    /// Artifact path. The report always goes to standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Artifact format; defaults to the extension of --out, else json.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,

    /// Include wall-clock time in the report (makes it non-reproducible).
    #[arg(long, global = true)]
    timing: bool,
}

#[derive(Subcommand, Clone, Copy)]
enum Sub {
    /// Residual of a surface on a parameter grid.
    Verify,
    /// Integrate the arc-length profile equation.
    Ode,
    /// Integrate the graph form z = f(x).
    GraphOde,
    /// Coefficients of the ruled-surface polynomial along a directrix.
    RuledCoeffs,
    /// Residual and separation diagnostics of z = f(x) + g(y).
    TranslationCheck,
    /// Tabulate a quantity over a grid of constants.
    Sweep,
}

impl Sub {
    fn command(self) -> Command {
        match self {
            Sub::Verify => Command::Verify,
            Sub::Ode => Command::Ode,
            Sub::GraphOde => Command::GraphOde,
            Sub::RuledCoeffs => Command::RuledCoeffs,
            Sub::TranslationCheck => Command::TranslationCheck,
            Sub::Sweep => Command::Sweep,
        }
    }
}

#[derive(ValueEnum, Clone, Copy, PartialEq, Eq, Debug)]
enum Format {
    Csv,
    Svg,
    Json,
}

fn resolve_format(cli: &Cli) -> Format {
    if let Some(f) = cli.format {
        return f;
    }
    let ext = cli.out.as_deref().and_then(Path::extension).and_then(|e| e.to_str());
    match ext {
        Some("csv") => Format::Csv,
        Some("svg") => Format::Svg,
        _ => Format::Json,
    }
}

fn configure_threads() -> Result<()> {
    let Ok(raw) = std::env::var("SELFSIM_THREADS") else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| CliError::Usage(format!("SELFSIM_THREADS must be a positive integer, got `{raw}`")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Usage(format!("cannot configure {n} threads: {e}")))
}

fn read_spec(path: &Path) -> Result<String> {
    if path == Path::new("-") {
        let mut s = String::new();
        std::io::stdin().read_to_string(&mut s).map_err(|e| CliError::io(path, e))?;
        Ok(s)
    } else {
        std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))
    }
}

fn execute(cli: &Cli) -> Result<bool> {
    configure_threads()?;
    let command = cli.command.command();
    let format = resolve_format(cli);
    if format != Format::Json && cli.out.is_none() {
        return Err(CliError::Usage(format!("--format {format:?} needs --out").to_lowercase()));
    }
    if format == Format::Svg && !draws_curves(command) {
        return Err(CliError::Usage(format!("`{}` has no curves to draw as svg", command.name())));
    }
    let spec_path = cli
        .spec
        .as_deref()
        .ok_or_else(|| CliError::Usage("--spec <file> is required".into()))?;
    let job = parse_spec(&read_spec(spec_path)?, Some(command))?;

    let started = Instant::now();
    let mut outcome = run(&job, cli.tol)?;
    if cli.timing {
        outcome.report.wall_time_s = Some(started.elapsed().as_secs_f64());
    }
    if let Some(out) = &cli.out {
        outcome.report.artifact = Some(out.display().to_string());
        match format {
            Format::Csv => export_csv(&outcome.table, out)?,
            Format::Svg => export_svg(&outcome.polylines, out)?,
            Format::Json => {
                let text = serde_json::to_string_pretty(&outcome.report).expect("report serializes");
                std::fs::write(out, text + "\n").map_err(|e| CliError::io(out, e))?;
            }
        }
    }
    println!("{}", serde_json::to_string_pretty(&outcome.report).expect("report serializes"));
    Ok(outcome.report.pass)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("selfsim: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
