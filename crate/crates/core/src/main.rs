use std::io::Read;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use entropy_lab::cli::scenario::{RawOptions, MAX_N_LIMIT};
use entropy_lab::cli::{builtin_text, parse_scenario, render, run, Format, RunConfig, BUILTINS};

const USAGE_ERROR: u8 = 2;

#[derive(Parser)]
#[command(name = "entropy-lab", version, about = "Exact entropy computations for endomorphisms of abelian groups")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario file (`-` reads standard input).
    Run {
        file: String,
        #[command(flatten)]
        flags: RunFlags,
    },
    /// Run a built-in scenario.
    Builtin {
        name: String,
        args: Vec<String>,
        #[command(flatten)]
        flags: RunFlags,
        /// Print the scenario JSON instead of running it.
        #[arg(long)]
        print: bool,
    },
    /// List the built-in scenarios.
    ListBuiltins,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Table,
    Json,
}

#[derive(Args)]
struct RunFlags {
    #[arg(long, value_enum, default_value = "table")]
    format: FormatArg,
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..=MAX_N_LIMIT as u64))]
    max_n: Option<u64>,
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..=MAX_N_LIMIT as u64))]
    stability_window: Option<u64>,
    /// Cross-check every growth-table index against brute-force enumeration.
    #[arg(long)]
    verify_oracle: bool,
    /// Include per-task wall-clock time in the report.
    #[arg(long)]
    timing: bool,
}

fn usage_error(msg: impl std::fmt::Display) -> ExitCode {
    eprintln!("error: {msg}");
    ExitCode::from(USAGE_ERROR)
}

fn max_n_cap() -> Result<Option<usize>, String> {
    match std::env::var("ENTROPY_LAB_MAX_N") {
        Err(_) => Ok(None),
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n >= 1 => Ok(Some(n)),
            _ => Err(format!("ENTROPY_LAB_MAX_N must be a positive integer, got {v:?}")),
        },
    }
}

fn execute(text: &str, flags: &RunFlags) -> ExitCode {
    if let (Some(n), Some(w)) = (flags.max_n, flags.stability_window) {
        if w > n {
            return usage_error(format!("--stability-window {w} exceeds --max-n {n}"));
        }
    }
    let max_n_cap = match max_n_cap() {
        Ok(c) => c,
        Err(e) => return usage_error(e),
    };
    let scenario = match parse_scenario(text) {
        Ok(s) => s,
        Err(e) => return usage_error(e),
    };
    let cfg = RunConfig {
        overrides: RawOptions {
            max_n: flags.max_n.map(|n| n as usize),
            stability_window: flags.stability_window.map(|w| w as usize),
            max_m: None,
        },
        max_n_cap,
        verify_oracle: flags.verify_oracle,
        timing: flags.timing,
    };
    let report = run(&scenario, &cfg);
    let format = match flags.format {
        FormatArg::Table => Format::Table,
        FormatArg::Json => Format::Json,
    };
    let out = render(&report, format);
    if format == Format::Json {
        println!("{out}");
    } else {
        print!("{out}");
    }
    if report.all_ok() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Run { file, flags } => {
            let text = if file == "-" {
                let mut s = String::new();
                std::io::stdin().read_to_string(&mut s).map(|_| s)
            } else {
                std::fs::read_to_string(&file)
            };
            match text {
                Ok(text) => execute(&text, &flags),
                Err(e) => usage_error(format!("{file}: {e}")),
            }
        }
        Command::Builtin { name, args, flags, print } => match builtin_text(&name, &args) {
            Ok(text) if print => {
                print!("{text}");
                ExitCode::SUCCESS
            }
            Ok(text) => execute(&text, &flags),
            Err(e) => usage_error(e),
        },
        Command::ListBuiltins => {
            for (name, synopsis, about) in BUILTINS {
                let head = format!("{name} {synopsis}");
                println!("{:<26}{about}", head.trim_end());
            }
            ExitCode::SUCCESS
        }
    }
}
