use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use limitrank_cli::{load_session, resolve_target, run_command, CliError, Command, Format, Options};

/// Builds limit groups and checks rank growth in their index-p normal subgroups.
#[derive(Parser)]
#[command(name = "limitrank", version)]
struct Args {
    command: Command,
    /// Catalog fixture, or a binding from the `-f` file.
    target: Option<String>,
    /// Prime index; repeatable. Defaults to 2.
    #[arg(short = 'p', value_name = "P")]
    primes: Vec<u64>,
    /// Kernel label for `subgroup`.
    #[arg(long, value_name = "K")]
    hom: Option<usize>,
    #[arg(long, default_value_t = limitrank_core::selftest::DEFAULT_SEED)]
    seed: u64,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// DSL file (`.lg`) with group bindings.
    #[arg(short = 'f', value_name = "FILE")]
    file: Option<PathBuf>,
}

fn run(args: &Args) -> Result<(String, u8), CliError> {
    let session = args.file.as_deref().map(load_session).transpose()?;
    let target = match args.command {
        Command::Selftest => None,
        _ => Some(resolve_target(session.as_ref(), args.target.as_deref())?),
    };
    let opts = Options {
        primes: args.primes.clone(),
        hom: args.hom,
        seed: args.seed,
    };
    let report = run_command(args.command, target.as_ref(), &opts)?;
    Ok((report.render(args.format), report.exit_code()))
}

fn main() -> ExitCode {
    let args = Args::parse();
    match run(&args) {
        Ok((out, code)) => {
            let mut stdout = std::io::stdout().lock();
            let _ = stdout.write_all(out.as_bytes());
            ExitCode::from(code)
        }
        Err(e) => {
            eprintln!("limitrank: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
