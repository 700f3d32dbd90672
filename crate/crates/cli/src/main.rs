use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use geophase::verification::{verify, Tier};
use geophase_cli::config::Format;
use geophase_cli::{output, run_experiment, threads, CliError, ExperimentConfig};

#[derive(Parser)]
#[command(name = "geophase", version, about = "Geometric phases for continuous spectra")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum TierArg {
    Fast,
    Full,
}

#[derive(Subcommand)]
enum Command {
    /// Run the experiment described by a TOML config.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Overrides `output.path`; without either, results go to stdout.
        #[arg(long)]
        output: Option<PathBuf>,
        /// Overrides `output.format`.
        #[arg(long, value_enum)]
        format: Option<FormatArg>,
    },
    /// Run the acceptance checks.
    Verify {
        #[arg(long, value_enum, default_value = "fast")]
        tier: TierArg,
    },
}

fn run(config: PathBuf, output_path: Option<PathBuf>, format: Option<FormatArg>) -> Result<(), CliError> {
    let config = ExperimentConfig::load(&config)?;
    let format = match format {
        Some(FormatArg::Csv) => Format::Csv,
        Some(FormatArg::Json) => Format::Json,
        None => config.output.format,
    };
    let destination = output_path.or_else(|| config.output.path.clone());
    let record = run_experiment(&config)?;
    let body = output::render(&record, format)?;
    let summary = format!(
        "{}: {} rows, {} skipped, digest {}",
        record.experiment,
        record.rows.len(),
        record.skipped_k.len(),
        record.config_digest
    );
    match destination {
        Some(path) => {
            output::write(&path, &body)?;
            println!("{summary}, written to {}", path.display());
        }
        None => {
            print!("{body}");
            eprintln!("{summary}");
        }
    }
    if record.passed() {
        Ok(())
    } else {
        Err(CliError::Verification("one or more criteria failed".into()))
    }
}

fn verify_command(tier: TierArg) -> Result<(), CliError> {
    let tier = match tier {
        TierArg::Fast => Tier::Fast,
        TierArg::Full => Tier::Full,
    };
    let report = verify(tier);
    for c in &report.criteria {
        println!("{}", c.line());
    }
    let determinism = geophase_cli::determinism_check();
    println!("{}", determinism.line());
    let failed = report.criteria.iter().filter(|c| !c.passed).count() + usize::from(!determinism.passed);
    if failed == 0 {
        println!("verify: all criteria passed");
        Ok(())
    } else {
        Err(CliError::Verification(format!("{failed} criteria failed")))
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = threads::configure_from_env().and_then(|_| match cli.command {
        Command::Run { config, output, format } => run(config, output, format),
        Command::Verify { tier } => verify_command(tier),
    });
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("geophase: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
