mod args;
mod bench;
mod commands;
mod failure;
mod report;

use std::io::{self, BufWriter, Write};
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;

use args::{Cli, Command};
use failure::{CliResult, Failure, EXIT_USAGE};

fn run(cli: &Cli, out: &mut dyn Write) -> CliResult<()> {
    let common = &cli.common;
    match &cli.command {
        Command::Validate => commands::validate(common, out),
        Command::Spectral => commands::spectral_cmd(common, out),
        Command::Exact(ep) => commands::exact(common, *ep, out),
        Command::Push(ep) => commands::push(common, *ep, out),
        Command::Query(q) => commands::query(common, q, out),
        Command::Bench(b) => bench::bench(common, b, out),
        Command::Table1(t) => bench::table1(common, t, out),
        Command::Cache(c) => commands::cache(common, c, out),
        Command::Probe(p) => commands::probe(common, p, out),
    }
}

fn main() -> ExitCode {
    let stdout = io::stdout();
    let mut out = BufWriter::new(stdout.lock());
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let failure = Failure::usage("usage", e.render().to_string().trim_end().to_string());
            let _ = report::emit(&mut out, &failure.report());
            let _ = out.flush();
            return ExitCode::from(EXIT_USAGE);
        }
    };
    let status = match run(&cli, &mut out) {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            let _ = report::emit(&mut out, &failure.report());
            eprintln!("error: {failure}");
            ExitCode::from(failure.exit_code())
        }
    };
    if let Err(e) = out.flush() {
        eprintln!("error: cannot write output: {e}");
        return ExitCode::from(failure::EXIT_FAILURE);
    }
    status
}
