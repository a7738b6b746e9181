use std::process::ExitCode;

use clap::{CommandFactory, Parser};
use seshadri_lab::commands::{run, Cli};
use seshadri_lab::{emit, USAGE_EXIT};

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { USAGE_EXIT } else { 0 });
        }
    };
    let failure = match run(&cli.command) {
        Ok(outcome) => match emit(&outcome.config, &outcome.report) {
            Ok(()) => return ExitCode::from(outcome.status.code()),
            Err(e) => e,
        },
        Err(e) => e,
    };
    eprintln!("error: {failure}");
    if failure.code() == USAGE_EXIT {
        let mut cmd = Cli::command();
        cmd.build();
        let sub = cmd.find_subcommand_mut(cli.command.name()).map(|c| c.render_usage());
        if let Some(usage) = sub {
            eprintln!("\n{usage}\n\nFor more information, try '--help'.");
        }
    }
    ExitCode::from(failure.code())
}
