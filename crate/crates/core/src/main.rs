use std::path::PathBuf;
use std::process::ExitCode;

use boundinfo::cli::{run, Command, Fixtures, Format, RunConfig};
use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(name = "boundinfo", version, about = "Bound information tables, measures, protocols and checks")]
struct Args {
    #[command(subcommand)]
    command: Cmd,
    /// text, json or csv
    #[arg(long, global = true, default_value = "text")]
    format: Format,
    #[arg(long, global = true, default_value_t = 1e-9)]
    tolerance: f64,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[arg(long = "search-budget", global = true, default_value_t = 10_000)]
    search_budget: u64,
    /// Write the output here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Print a reference table.
    Tables { name: String },
    /// Entropies and secrecy measures of a table (default smolin).
    Measures { name: Option<String> },
    /// Run a protocol and check its checkpoints.
    Protocol { name: String },
    /// Run every acceptance criterion.
    Verify {
        /// Replace a reference table, as NAME=PATH to a distribution JSON file.
        #[arg(long = "fixture", value_name = "NAME=PATH")]
        fixtures: Vec<String>,
    },
    /// Export a table, `smolin-state`, or `<protocol>-transcript`.
    Export { target: String },
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter("BOUNDINFO_LOG")).init();
    let args = Args::parse();
    let mut fixtures = Fixtures::default();
    let (command, target) = match args.command {
        Cmd::Tables { name } => (Command::Tables, Some(name)),
        Cmd::Measures { name } => (Command::Measures, name),
        Cmd::Protocol { name } => (Command::Protocol, Some(name)),
        Cmd::Export { target } => (Command::Export, Some(target)),
        Cmd::Verify { fixtures: specs } => {
            for spec in specs {
                let Some((name, path)) = spec.split_once('=') else {
                    eprintln!("error: --fixture expects NAME=PATH, got {spec}");
                    return ExitCode::from(2);
                };
                if let Err(e) = fixtures.load(name, path.as_ref()) {
                    eprintln!("error: {e}");
                    return ExitCode::from(2);
                }
            }
            (Command::Verify, None)
        }
    };
    let cfg = RunConfig {
        command,
        target,
        format: args.format,
        tolerance: args.tolerance,
        seed: args.seed,
        search_budget: args.search_budget,
        out: args.out,
    };
    match run(&cfg, &fixtures) {
        Ok(report) => {
            if cfg.out.is_none() {
                print!("{}", report.output);
            }
            if report.pass {
                ExitCode::SUCCESS
            } else {
                ExitCode::FAILURE
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
