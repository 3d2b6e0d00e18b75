use std::process::ExitCode;

use clap::Parser;
use persinv_cli::args::Cli;
use persinv_cli::{run, CliError, RunOptions};

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            // --help and --version
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let _ = e.print();
            let err = CliError::Config(e.kind().to_string());
            eprintln!("{}", err.record());
            return ExitCode::from(err.exit_code() as u8);
        }
    };
    match execute(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", e.record());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn execute(cli: &Cli) -> Result<(), CliError> {
    let (command, args) = cli.command.parts();
    if let Some(n) = args.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Config(format!("thread pool: {e}")))?;
    }
    let config = args.to_config(command)?;
    let options = RunOptions {
        cache_dir: args.cache_dir(&config),
    };
    let report = run(&config, &options)?;
    for path in &report.written {
        println!("{}", path.display());
    }
    if let Some(c) = &report.compare {
        println!(
            "compare: {} checks, {} failed, {} skipped",
            c.checks, c.failed, c.skipped
        );
        if c.failed > 0 {
            return Err(CliError::ChecksFailed(c.failed));
        }
    }
    Ok(())
}
