use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use pursuit_cli::commands::{self, node_budget_from_env};
use pursuit_cli::{CliError, Purpose, RunOptions};

#[derive(Parser)]
#[command(name = "pursuit", version, about = "Pursuit-evasion among moving obstacles")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Copy)]
struct Common {
    /// Replace the scenario seed (and every derived obstacle seed).
    #[arg(long)]
    seed: Option<u64>,
    /// Test every obstacle instead of using the spatial hash.
    #[arg(long)]
    no_spatial_hash: bool,
}

impl From<Common> for RunOptions {
    fn from(c: Common) -> Self {
        RunOptions {
            seed: c.seed,
            no_spatial_hash: c.no_spatial_hash,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Simulate one scenario and write its CSV, JSON and SVG artifacts.
    Run {
        /// Scenario file, or the name of a bundled scenario (fig_a .. fig_d).
        scenario: String,
        #[arg(long, default_value = ".")]
        out: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Exact upper and lower game values for partition levels 0..=n-max.
    ValueTable {
        scenario: String,
        #[arg(long, default_value_t = 3)]
        n_max: u32,
        /// Write `<name>.values.csv` here instead of printing the table.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Run every scenario listed in a manifest (`bundled` for the shipped one).
    Batch {
        manifest: PathBuf,
        #[arg(long, default_value = ".")]
        out: PathBuf,
        /// Worker threads.
        #[arg(long, default_value_t = 1)]
        parallel: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Print a scenario in canonical form with explicit random seeds.
    DumpScenario {
        scenario: String,
        /// Write `<name>.toml` here instead of printing it.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
    },
}

fn write_file(path: PathBuf, body: &str) -> Result<(), CliError> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    }
    fs::write(&path, body).map_err(|e| CliError::io(&path, e))
}

fn print(body: &str) -> Result<(), CliError> {
    std::io::stdout()
        .write_all(body.as_bytes())
        .map_err(|e| CliError::io("<stdout>", e))
}

fn dispatch(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Run { scenario, out, common } => {
            let a = commands::run(&scenario, &out, common.into())?;
            let d = a.record.separations();
            println!(
                "{}: {} steps, distance {:.6} -> {:.6}, payoff {}, capture {}",
                a.name,
                a.record.steps(),
                d[0],
                d[d.len() - 1],
                a.record.final_payoff,
                a.record.capture_time.map_or("none".into(), |t| t.to_string()),
            );
            for name in a.file_names() {
                println!("wrote {}", out.join(name).display());
            }
            Ok(())
        }
        Command::ValueTable {
            scenario,
            n_max,
            out,
            seed,
        } => {
            let budget = node_budget_from_env()?;
            let loaded = commands::load(&scenario, Purpose::ValueTable)?;
            let s = commands::build_scenario(&loaded, RunOptions { seed, no_spatial_hash: false })?;
            let table = commands::value_table(&s, n_max, budget)?;
            match out {
                Some(dir) => write_file(dir.join(format!("{}.values.csv", loaded.name)), &table.to_csv())?,
                None => print(&table.to_csv())?,
            }
            if table.gap_nonincreasing() {
                eprintln!("gap nonincreasing in n: yes");
            } else {
                eprintln!("gap nonincreasing in n: NO");
            }
            Ok(())
        }
        Command::Batch {
            manifest,
            out,
            parallel,
            common,
        } => {
            if parallel == 0 {
                return Err(CliError::Usage("--parallel must be at least 1".into()));
            }
            let summary = commands::batch(&manifest, &out, common.into(), parallel)?;
            print(&summary.to_csv(true))?;
            let failed = summary.failed();
            if failed > 0 {
                let code = summary
                    .rows
                    .iter()
                    .find_map(|r| match r.status {
                        pursuit_cli::RunStatus::Failed { code, .. } => Some(code),
                        _ => None,
                    })
                    .unwrap_or(1);
                return Err(CliError::BatchFailed {
                    failed,
                    total: summary.rows.len(),
                    code,
                });
            }
            Ok(())
        }
        Command::DumpScenario { scenario, out, seed } => {
            let loaded = commands::load(&scenario, Purpose::Simulation)?;
            let text = commands::dump(&loaded, RunOptions { seed, no_spatial_hash: false })?;
            match out {
                Some(dir) => write_file(dir.join(format!("{}.toml", loaded.name)), &text),
                None => print(&text),
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            if let Some(hint) = e.hint() {
                eprintln!("hint: {hint}");
            }
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
