use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use seqguess_cli::{
    load_report, run_job, verify_report, JobSpec, Overrides, RunError, RunReport, RunSettings,
};

#[derive(Parser)]
#[command(
    name = "seqguess",
    version,
    about = "Guess summation formulas for polynomial sequences"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Structured,
}

#[derive(Subcommand)]
enum Command {
    /// Search for formulas matching the polynomials in a job file.
    Guess {
        jobfile: String,
        /// Comma-separated triangle ids, replacing the job's factors.
        #[arg(long)]
        factors: Option<String>,
        #[arg(long)]
        num_rows: Option<usize>,
        /// Comma-separated slope magnitudes, e.g. 0,1,3.
        #[arg(long, allow_hyphen_values = true)]
        index_multiples: Option<String>,
        /// "(u,l);(u,l)" per tuple, tuples separated by '|'.
        #[arg(long, allow_hyphen_values = true)]
        offset_pairs: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        j0: Option<i64>,
        #[arg(long)]
        user_guess: Option<String>,
        /// clear_lcm, by_j_factorial, by_i_factorial or by_both.
        #[arg(long)]
        normalize: Option<String>,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
        /// Look up unrecognized remainder sequences online.
        #[arg(long)]
        oeis: bool,
        /// Re-verify the formulas of a structured report instead of searching.
        #[arg(long)]
        verify_only: Option<String>,
        #[arg(long)]
        budget_ms: Option<u64>,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let Command::Guess {
        jobfile,
        factors,
        num_rows,
        index_multiples,
        offset_pairs,
        j0,
        user_guess,
        normalize,
        format,
        oeis,
        verify_only,
        budget_ms,
    } = cli.command;
    let overrides = Overrides {
        factors,
        num_rows,
        index_multiples,
        offset_pairs,
        j0,
        user_guess,
        normalize,
        budget_ms,
    };
    let result = (|| -> Result<RunReport, RunError> {
        let mut job = JobSpec::load(&jobfile)?;
        overrides.apply(&mut job)?;
        match &verify_only {
            Some(path) => verify_report(&job, &load_report(path)?),
            None => run_job(&job, &RunSettings { oeis }),
        }
    })();
    match result {
        Ok(report) => {
            match format {
                Format::Text => print!("{}", report.to_text()),
                Format::Structured => {
                    print!("{}", report.to_structured());
                    for w in &report.warnings {
                        eprintln!("warning: {w}");
                    }
                }
            }
            ExitCode::from(report.status.exit_code() as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
