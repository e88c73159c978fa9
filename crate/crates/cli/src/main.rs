use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use iprep::{EXIT_ASSERTION, EXIT_SCHEMA};

#[derive(Parser)]
#[command(name = "iprep", about = "Run eigenstate-preparation experiments from JSON configs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment and write its artifacts and report.json.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Overrides the config's output_dir.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Worker threads for the parallel parts.
        #[arg(long)]
        threads: Option<usize>,
    },
    /// Check a config without running it.
    Validate {
        #[arg(long)]
        config: PathBuf,
    },
    /// Print experiment names, required fields and parameter defaults.
    List,
}

fn code(c: i32) -> ExitCode {
    ExitCode::from(c as u8)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return code(if e.use_stderr() { EXIT_SCHEMA } else { 0 });
        }
    };
    match cli.command {
        Command::List => {
            print!("{}", iprep::list());
            ExitCode::SUCCESS
        }
        Command::Validate { config } => match iprep::load(&config) {
            Ok(v) => {
                println!("ok: {}", v.config.experiment.name());
                ExitCode::SUCCESS
            }
            Err(e) => {
                eprintln!("schema error: {e}");
                code(EXIT_SCHEMA)
            }
        },
        Command::Run { config, out, threads } => {
            let v = match iprep::load(&config) {
                Ok(v) => v,
                Err(e) => {
                    eprintln!("schema error: {e}");
                    return code(EXIT_SCHEMA);
                }
            };
            if let Some(k) = threads {
                if k == 0 {
                    eprintln!("schema error: --threads must be >= 1");
                    return code(EXIT_SCHEMA);
                }
                if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(k).build_global() {
                    eprintln!("warning: thread pool already set: {e}");
                }
            }
            let dir = iprep::output_dir(&v, out.as_deref());
            match iprep::run(&v, &dir) {
                Ok(report) => {
                    for a in &report.assertions {
                        println!("{} {}: {}", if a.passed { "PASS" } else { "FAIL" }, a.name, a.detail);
                    }
                    println!("report: {}", dir.join("report.json").display());
                    if report.passed {
                        ExitCode::SUCCESS
                    } else {
                        code(EXIT_ASSERTION)
                    }
                }
                Err(e) => {
                    eprintln!("error: {e:#}");
                    code(iprep::exit_code(&e))
                }
            }
        }
    }
}
