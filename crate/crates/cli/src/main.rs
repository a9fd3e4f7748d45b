mod args;
mod bench;
mod commands;
mod output;
mod route;
mod selftest;

use std::fs;
use std::io::Write;
use std::process::ExitCode;
use std::time::Instant;

use clap::error::ErrorKind;
use clap::Parser;

use args::{BenchKind, Cli, Command, OutputFormat};
use commands::Ctx;
use output::{CliError, Report, Timings};

fn wants_json() -> bool {
    let args: Vec<String> = std::env::args().collect();
    args.iter().any(|a| a == "--format=json") || args.windows(2).any(|w| w[0] == "--format" && w[1] == "json")
}

fn execute(cli: &Cli) -> Result<Report, CliError> {
    if let Some(t) = cli.opts.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
            .map_err(|e| CliError::usage(format!("thread pool: {e}")))?;
    }
    match &cli.command {
        Command::Selftest => selftest::run(cli.opts.seed),
        Command::Bench {
            kind: BenchKind::Fgdp { n, trials },
        } => bench::fgdp(&cli.opts, *n, *trials),
        Command::Bench { kind } => bench::run(&Ctx::new(cli.opts.clone())?, kind),
        cmd => commands::run(&Ctx::new(cli.opts.clone())?, cmd),
    }
}

fn emit(cli: &Cli, text: &str) -> Result<(), CliError> {
    match &cli.opts.out {
        Some(path) => fs::write(path, text).map_err(|e| CliError {
            kind: "io".into(),
            message: format!("{}: {e}", path.display()),
        }),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())?;
            out.flush()?;
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => e.exit(),
        Err(e) if wants_json() => {
            let rendered = e.render().to_string();
            let first = rendered.lines().next().unwrap_or_default();
            let err = CliError::usage(first.trim_start_matches("error: "));
            print!("{}", err.render(OutputFormat::Json));
            return ExitCode::from(2);
        }
        Err(e) => e.exit(),
    };
    let format = cli.opts.format;
    let start = Instant::now();
    let outcome = execute(&cli).and_then(|mut rep| {
        if cli.opts.timings {
            rep.timings = Some(Timings {
                total_ms: start.elapsed().as_secs_f64() * 1e3,
                phases_ms: std::mem::take(&mut rep.phases_ms),
            });
        }
        emit(&cli, &rep.render(format))?;
        Ok(rep.exit_code())
    });
    match outcome {
        Ok(code) => ExitCode::from(code as u8),
        Err(err) => {
            let text = err.render(format);
            match format {
                OutputFormat::Json => print!("{text}"),
                OutputFormat::Text => eprint!("{text}"),
            }
            ExitCode::from(2)
        }
    }
}
