use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use densework::{execute, Cli, CliError, Report};

fn emit(report: &Report) -> Result<(), CliError> {
    match &report.out {
        Some(path) => {
            std::fs::write(path, &report.document)
                .map_err(|e| CliError::Other(anyhow::anyhow!("writing {}: {e}", path.display())))?;
            println!("{}", report.summary);
        }
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(report.document.as_bytes())
                .and_then(|_| out.flush())
                .map_err(|e| CliError::Other(e.into()))?;
            eprintln!("{}", report.summary);
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = execute(cli).and_then(|report| {
        emit(&report)?;
        if report.violations.is_empty() {
            Ok(())
        } else {
            for v in &report.violations {
                eprintln!("violation: {v}");
            }
            Err(CliError::Invariant(format!("{} check(s) failed", report.violations.len())))
        }
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(e.exit_code())
        }
    }
}
