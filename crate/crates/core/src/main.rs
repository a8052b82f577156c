use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;

use hypflow::io::{self, Cli};
use hypflow::Error;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => return fail(&Error::Config(io::clap_reason(&e))),
    };
    let config = match io::resolve(&cli) {
        Ok(c) => c,
        Err(e) => return fail(&e),
    };
    match io::execute(&config) {
        Ok(outcome) => {
            let last = outcome
                .trajectory
                .rows
                .last()
                .expect("trajectories have at least one row");
            println!(
                "{}: t = {}, steps = {}, sup|H - mean H| = {:e}, output in {}",
                outcome.manifest.termination,
                last.t,
                outcome.trajectory.steps,
                last.sup_dev,
                config.out.display()
            );
            ExitCode::SUCCESS
        }
        Err(e) => fail(&e),
    }
}

fn fail(e: &Error) -> ExitCode {
    eprintln!("error: {e}");
    ExitCode::from(e.exit_code() as u8)
}
