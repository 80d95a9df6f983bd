use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use bialg_cli::input::parse_input;
use bialg_cli::pipeline::{parse_stages, run_pipeline, subcommand_stages};
use clap::{Args, Parser, Subcommand};

#[derive(Parser)]
#[command(name = "bialg", version, about = "Verify realizations of bialgebras of right-invariant operators")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Coalgebra axioms, the free bialgebra T(F) and the lifted operators.
    Verify(RunArgs),
    /// Relation kernels and the coideal check.
    Relations(RunArgs),
    /// The antipode operators Y(l) and their checks.
    Antipode(RunArgs),
    /// Closure of the relations under the antipode and the Hopf quotient checks.
    Closure(RunArgs),
    /// Every stage.
    Report(RunArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Realization description file (TOML).
    #[arg(long)]
    input: PathBuf,
    /// Relation degree bound d.
    #[arg(long)]
    max_degree: Option<usize>,
    /// Tensor truncation degree N of T(F).
    #[arg(long)]
    truncation: Option<usize>,
    /// Maximum number of closure stages.
    #[arg(long)]
    max_stages: Option<usize>,
    /// Also write the document and the results to this file.
    #[arg(long)]
    emit: Option<PathBuf>,
    /// Comma-separated stages to run instead of the subcommand's default set.
    #[arg(long)]
    stages: Option<String>,
}

fn input_error(msg: impl std::fmt::Display) -> ExitCode {
    eprintln!("error: {msg}");
    ExitCode::from(2)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (name, args) = match &cli.command {
        Command::Verify(a) => ("verify", a),
        Command::Relations(a) => ("relations", a),
        Command::Antipode(a) => ("antipode", a),
        Command::Closure(a) => ("closure", a),
        Command::Report(a) => ("report", a),
    };
    let stages = match &args.stages {
        Some(list) => match parse_stages(list) {
            Ok(s) => s,
            Err(e) => return input_error(e),
        },
        None => subcommand_stages(name),
    };
    let text = match std::fs::read_to_string(&args.input) {
        Ok(t) => t,
        Err(e) => return input_error(format!("{}: {e}", args.input.display())),
    };
    let doc = match parse_input(&text).and_then(|d| d.with_overrides(args.truncation, args.max_degree, args.max_stages))
    {
        Ok(d) => d,
        Err(e) => return input_error(e),
    };
    let report = run_pipeline(&doc, &stages);
    // A closed pipe (e.g. `| head`) is not an error worth a panic.
    let _ = write!(std::io::stdout().lock(), "{report}");
    if let Some(path) = &args.emit {
        if let Err(e) = std::fs::write(path, &report.emitted) {
            eprintln!("error: {}: {e}", path.display());
            return ExitCode::from(1);
        }
    }
    ExitCode::from(report.exit_code() as u8)
}
