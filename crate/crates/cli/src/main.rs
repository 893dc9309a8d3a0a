use std::io::{self, Write};
use std::process::ExitCode;

use clap::Parser;
use quatlat_cli::{apply_env, run, self_check, Cli};

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.jobs {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: --jobs {n}: {e}");
            return ExitCode::from(2);
        }
    }
    if let Err(e) = apply_env() {
        eprintln!("error: {e}");
        return ExitCode::from(e.exit_code());
    }
    if let Err(e) = self_check() {
        eprintln!("error: catalog self-check failed: {e}");
        return ExitCode::from(1);
    }
    match run(&cli) {
        Ok(outcome) => {
            let mut out = io::stdout().lock();
            if outcome.report.write_tsv(&mut out).and_then(|_| out.flush()).is_err() {
                return ExitCode::from(2);
            }
            if outcome.mismatches > 0 {
                eprintln!("{} mismatching rows", outcome.mismatches);
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
