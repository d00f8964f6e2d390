//! `fisher-bohm`: runs corpus configurations and writes JSON/CSV results.
//!
//! Exit status: 0 all checks pass, 1 a bound chain or identity is violated,
//! 2 configuration error, 3 numerical failure.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use fisher_bohm::error::Error;
use fisher_bohm::exec::Exec;
use fisher_bohm::report::{
    parse_values, run_corpus, run_sweep, write_bounds_vs_param, write_json, write_outputs,
    CorpusResult, RunConfig, RunMode, Status, EXIT_CONFIG, EXIT_NUMERICAL,
};

#[derive(Parser, Debug)]
#[command(
    name = "fisher-bohm",
    version,
    about = "Bohmian / Fisher-information bound checks on 1D wavefunctions"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Static checks: moments, identities and the bound chain for every state.
    Verify {
        #[arg(long)]
        config: PathBuf,
        /// Output directory (defaults to `output.directory` of the config).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Overrides every random seed in the config.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Static checks plus time evolution (and trajectories when configured).
    Evolve {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Repeats `verify` for each value of one dotted config key.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        /// Dotted key, e.g. `grid.n_points` or `states.sigma`.
        #[arg(long)]
        param: String,
        /// Comma-separated values.
        #[arg(long)]
        values: String,
        #[arg(long)]
        out: PathBuf,
    },
}

fn exit_code_for(e: &Error) -> i32 {
    if e.is_numerical() {
        EXIT_NUMERICAL
    } else {
        EXIT_CONFIG
    }
}

fn report(result: &CorpusResult) {
    for r in &result.records {
        match (&r.status, &r.error) {
            (Status::Ok, _) => {
                let chain = if r.chain_ok() {
                    "chain ok"
                } else {
                    "CHAIN VIOLATED"
                };
                let ids = if r.violation() && r.chain_ok() {
                    ", IDENTITY VIOLATED"
                } else {
                    ""
                };
                println!("{}: {chain}{ids}", r.id);
            }
            (_, Some(e)) => println!("{}: error: {}", r.id, e.message),
            (_, None) => println!("{}: error", r.id),
        }
    }
    let s = &result.summary;
    println!(
        "{} states, {} ok, {} errored, {} chain violations, {} identity violations (exit {})",
        s.n_states, s.n_ok, s.n_errored, s.n_chain_violations, s.n_identity_violations, s.exit_code
    );
}

fn corpus(
    config: &Path,
    out: Option<&Path>,
    seed: Option<u64>,
    mode: RunMode,
) -> Result<i32, Error> {
    let mut cfg = RunConfig::from_path(config)?;
    if let Some(s) = seed {
        cfg = cfg.with_seed(s);
    }
    let result = run_corpus(&cfg, mode)?;
    let dir = out
        .map(Path::to_path_buf)
        .unwrap_or_else(|| cfg.output.directory.clone());
    write_outputs(&result, &cfg, &dir)?;
    report(&result);
    Ok(result.exit_code())
}

fn sweep(config: &Path, param: &str, values: &str, out: &Path) -> Result<i32, Error> {
    let text = fs::read_to_string(config)
        .map_err(|e| Error::Config(format!("{}: {e}", config.display())))?;
    let raw: serde_json::Value = serde_json::from_str(&text)
        .map_err(|e| Error::Config(format!("{}: {e}", config.display())))?;
    let values = parse_values(values)?;
    let result = run_sweep(&raw, param, &values, None, Exec::default())?;
    fs::create_dir_all(out)
        .map_err(|e| Error::Config(format!("output directory {}: {e}", out.display())))?;
    write_json(&result, &out.join("sweep.json"))?;
    write_bounds_vs_param(&result.runs, &out.join("bounds_vs_param.csv"))?;
    for run in &result.runs {
        if let Some(p) = &run.sweep {
            println!("{param} = {}", p.value);
        }
        report(run);
    }
    Ok(result.exit_code)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Verify { config, out, seed } => {
            corpus(config, out.as_deref(), *seed, RunMode::Verify)
        }
        Command::Evolve { config, out } => corpus(config, Some(out), None, RunMode::Evolve),
        Command::Sweep {
            config,
            param,
            values,
            out,
        } => sweep(config, param, values, out),
    };
    let code = outcome.unwrap_or_else(|e| {
        eprintln!("error: {e}");
        exit_code_for(&e)
    });
    ExitCode::from(code as u8)
}
