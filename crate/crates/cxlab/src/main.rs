use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Parser, Subcommand};
use cxlab_core::cxcli::{parse_scenario, run, RunOptions, Scenario};

#[derive(Parser)]
#[command(name = "cxlab", version, about = "Complexity testing for modules over graded Artinian algebras")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run every task of a scenario and print the report.
    Run {
        file: PathBuf,
        /// Resolution length for tasks that do not set `maxdeg`.
        #[arg(long)]
        max_degree: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Emit the JSON report instead of text.
        #[arg(long)]
        json: bool,
        /// Write the report to a file instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Parse and validate a scenario without running it.
    Check { file: PathBuf },
}

fn load(file: &PathBuf) -> anyhow::Result<Result<Scenario, String>> {
    let text = std::fs::read_to_string(file).with_context(|| format!("reading {}", file.display()))?;
    Ok(parse_scenario(&text).map_err(|e| format!("{}:{e}", file.display())))
}

fn main() -> ExitCode {
    match real_main() {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn real_main() -> anyhow::Result<ExitCode> {
    let cli = Cli::parse();
    match cli.command {
        Command::Check { file } => match load(&file)? {
            Ok(s) => {
                println!("{}: ok, {} task(s)", file.display(), s.tasks().count());
                Ok(ExitCode::SUCCESS)
            }
            Err(e) => {
                eprintln!("{e}");
                Ok(ExitCode::from(2))
            }
        },
        Command::Run {
            file,
            max_degree,
            seed,
            json,
            out,
        } => {
            let scenario = match load(&file)? {
                Ok(s) => s,
                Err(e) => {
                    eprintln!("{e}");
                    return Ok(ExitCode::from(2));
                }
            };
            let report = run(&scenario, RunOptions { max_degree, seed });
            let rendered = if json { report.to_json() } else { report.to_text() };
            match out {
                Some(path) => std::fs::write(&path, rendered).with_context(|| format!("writing {}", path.display()))?,
                None => print!("{rendered}"),
            }
            Ok(if report.success() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            })
        }
    }
}
