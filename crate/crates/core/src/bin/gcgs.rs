use std::process::ExitCode;

use gcgs_core::cli::{exit_code, parse_config, run, CliError, EXIT_FAILURE};

fn main() -> ExitCode {
    let cfg = match parse_config(std::env::args_os()) {
        Ok(cfg) => cfg,
        Err(CliError::Usage(e)) => e.exit(),
        Err(e) => {
            eprintln!("gcgs: {:#}", anyhow::Error::from(e));
            return ExitCode::from(EXIT_FAILURE as u8);
        }
    };
    match run(&cfg) {
        Ok(summary) => {
            eprintln!(
                "gcgs: {} after {} iterations, objective {:.10e}, gap {:.3e}",
                summary.termination, summary.iterations, summary.final_objective, summary.final_gap
            );
            ExitCode::from(exit_code(summary.termination, cfg.strict) as u8)
        }
        Err(e) => {
            eprintln!("gcgs: {:#}", anyhow::Error::from(e));
            ExitCode::from(EXIT_FAILURE as u8)
        }
    }
}
