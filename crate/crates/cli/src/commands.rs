use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use pursuit_core::game::InformationOrder;
use pursuit_core::geometry::distance;
use pursuit_core::{simulate, simulate_until_capture, DiscreteGame, GameRecord, PayoffKind, Scenario};
use rayon::prelude::*;
use serde::Deserialize;

use crate::artifacts::{self, format_sig9};
use crate::bundled;
use crate::error::CliError;
use crate::scenario_file::{ParseError, Purpose, ScenarioFile, MAX_SEED};

pub const NODE_BUDGET_VAR: &str = "PURSUIT_NODE_BUDGET";

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct RunOptions {
    pub seed: Option<u64>,
    pub no_spatial_hash: bool,
}

/// A scenario file read from disk or from the bundled set.
#[derive(Debug, Clone)]
pub struct Loaded {
    pub name: String,
    pub file: ScenarioFile,
}

/// Reads `source` as a path, falling back to a bundled scenario name.
pub fn load(source: &str, purpose: Purpose) -> Result<Loaded, CliError> {
    let path = Path::new(source);
    let (text, stem) = if path.exists() {
        let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        let stem = path.file_stem().map_or("scenario".into(), |s| s.to_string_lossy().into_owned());
        (text, stem)
    } else if let Some(text) = bundled::scenario(source) {
        (text.to_string(), source.to_string())
    } else {
        return Err(CliError::io(
            path,
            std::io::Error::new(std::io::ErrorKind::NotFound, "no such file or bundled scenario"),
        ));
    };
    parse_loaded(&text, source, stem, purpose)
}

fn parse_loaded(text: &str, source: &str, stem: String, purpose: Purpose) -> Result<Loaded, CliError> {
    let file = ScenarioFile::parse(text, purpose).map_err(|error| CliError::Parse {
        source_name: source.to_string(),
        error,
    })?;
    let name = file.name.clone().unwrap_or(stem);
    Ok(Loaded { name, file })
}

fn check_seed(seed: Option<u64>) -> Result<(), CliError> {
    match seed {
        Some(s) if s > MAX_SEED => Err(CliError::Usage(format!("--seed must be at most {MAX_SEED}"))),
        _ => Ok(()),
    }
}

pub fn build_scenario(loaded: &Loaded, options: RunOptions) -> Result<Scenario, CliError> {
    check_seed(options.seed)?;
    let mut scenario = loaded.file.to_scenario(options.seed)?;
    if options.no_spatial_hash {
        scenario.use_spatial_hash = false;
    }
    Ok(scenario)
}

/// Everything one run produces, rendered but not yet written.
#[derive(Debug, Clone)]
pub struct RunArtifacts {
    pub name: String,
    pub scenario: Scenario,
    pub record: GameRecord,
    pub csv: String,
    pub metadata: String,
    pub svg: String,
}

impl RunArtifacts {
    pub fn file_names(&self) -> [String; 3] {
        [
            format!("{}.csv", self.name),
            format!("{}.json", self.name),
            format!("{}.svg", self.name),
        ]
    }

    pub fn write(&self, dir: &Path) -> Result<Vec<PathBuf>, CliError> {
        fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
        let names = self.file_names();
        let mut written = Vec::new();
        for (name, body) in names.iter().zip([&self.csv, &self.metadata, &self.svg]) {
            let path = dir.join(name);
            fs::write(&path, body).map_err(|e| CliError::io(&path, e))?;
            written.push(path);
        }
        Ok(written)
    }
}

/// Simulates a scenario; capture payoffs run until capture or the horizon.
pub fn simulate_scenario(scenario: &Scenario) -> Result<GameRecord, CliError> {
    Ok(match scenario.payoff {
        PayoffKind::CaptureTime { .. } => simulate_until_capture(scenario, scenario.horizon)?,
        _ => simulate(scenario)?,
    })
}

pub fn execute(loaded: &Loaded, options: RunOptions) -> Result<RunArtifacts, CliError> {
    let scenario = build_scenario(loaded, options)?;
    let record = simulate_scenario(&scenario)?;
    let meta = artifacts::metadata(&loaded.name, &scenario, &record);
    Ok(RunArtifacts {
        name: loaded.name.clone(),
        csv: artifacts::trajectory_csv(&record),
        metadata: artifacts::metadata_text(&meta),
        svg: artifacts::svg(&scenario, &record, &loaded.file.output_settings()),
        scenario,
        record,
    })
}

pub fn run(source: &str, out_dir: &Path, options: RunOptions) -> Result<RunArtifacts, CliError> {
    let loaded = load(source, Purpose::Simulation)?;
    let artifacts = execute(&loaded, options)?;
    artifacts.write(out_dir)?;
    Ok(artifacts)
}

/// Node budget from the environment, or the library default.
pub fn node_budget_from_env() -> Result<u64, CliError> {
    match std::env::var(NODE_BUDGET_VAR) {
        Ok(v) => v
            .trim()
            .parse::<u64>()
            .ok()
            .filter(|&b| b > 0)
            .ok_or_else(|| CliError::Usage(format!("{NODE_BUDGET_VAR} must be a positive integer, got {v:?}"))),
        Err(_) => Ok(pursuit_core::game::DEFAULT_NODE_BUDGET),
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ValueRow {
    pub n: u32,
    pub upper_value: f64,
    pub lower_value: f64,
    pub gap: f64,
    pub nodes: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ValueTable {
    pub rows: Vec<ValueRow>,
}

impl ValueTable {
    /// Gap never grows from one level to the next (1e-9 slack).
    pub fn gap_nonincreasing(&self) -> bool {
        self.rows.windows(2).all(|w| w[1].gap <= w[0].gap + 1e-9)
    }

    pub fn to_csv(&self) -> String {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(Vec::new());
        w.write_record(["n", "upper_value", "lower_value", "gap", "gap_nonincreasing", "nodes"])
            .expect("in-memory write");
        let mut ok = true;
        for (i, r) in self.rows.iter().enumerate() {
            if i > 0 {
                ok &= r.gap <= self.rows[i - 1].gap + 1e-9;
            }
            w.write_record([
                r.n.to_string(),
                format_sig9(r.upper_value),
                format_sig9(r.lower_value),
                format_sig9(r.gap),
                ok.to_string(),
                r.nodes.to_string(),
            ])
            .expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("ascii output")
    }
}

pub fn value_table(scenario: &Scenario, n_max: u32, node_budget: u64) -> Result<ValueTable, CliError> {
    let pursuer_spec = scenario.pursuer_spec()?;
    let evader_spec = scenario.evader_spec()?;
    let mut rows = Vec::new();
    for n in 0..=n_max {
        let game = DiscreteGame::new(
            pursuer_spec,
            evader_spec,
            &scenario.obstacles,
            scenario.horizon,
            n,
            scenario.delta_alpha,
            scenario.payoff,
        )
        .with_node_budget(node_budget);
        let (upper_value, upper_nodes) = game.value(InformationOrder::Upper, scenario.pursuer_start, scenario.evader_start)?;
        let (lower_value, lower_nodes) = game.value(InformationOrder::Lower, scenario.pursuer_start, scenario.evader_start)?;
        let gap = if upper_value == lower_value { 0.0 } else { upper_value - lower_value };
        rows.push(ValueRow {
            n,
            upper_value,
            lower_value,
            gap,
            nodes: upper_nodes + lower_nodes,
        });
    }
    Ok(ValueTable { rows })
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct Manifest {
    #[serde(default)]
    scenarios: Vec<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum RunStatus {
    Ok {
        final_payoff: f64,
        capture_time: Option<f64>,
        final_distance: f64,
        initial_distance: f64,
    },
    Failed {
        message: String,
        code: i32,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub entry: String,
    pub name: String,
    pub status: RunStatus,
    pub wall_time: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BatchSummary {
    pub rows: Vec<SummaryRow>,
}

impl BatchSummary {
    pub const HEADER: [&'static str; 6] = ["name", "status", "final_payoff", "capture_time", "wall_time_s", "error"];

    pub fn failed(&self) -> usize {
        self.rows.iter().filter(|r| matches!(r.status, RunStatus::Failed { .. })).count()
    }

    /// Summary table; `with_wall_time = false` blanks the timing column.
    pub fn to_csv(&self, with_wall_time: bool) -> String {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(Vec::new());
        w.write_record(Self::HEADER).expect("in-memory write");
        for r in &self.rows {
            let time = if with_wall_time { format!("{:.6}", r.wall_time) } else { String::new() };
            let fields = match &r.status {
                RunStatus::Ok {
                    final_payoff,
                    capture_time,
                    ..
                } => [
                    r.name.clone(),
                    "ok".into(),
                    format_sig9(*final_payoff),
                    capture_time.map(format_sig9).unwrap_or_default(),
                    time,
                    String::new(),
                ],
                RunStatus::Failed { message, .. } => [
                    r.name.clone(),
                    "failed".into(),
                    String::new(),
                    String::new(),
                    time,
                    message.clone(),
                ],
            };
            w.write_record(fields).expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 output")
    }
}

fn resolve_entry(base: &Path, entry: &str) -> Result<Loaded, CliError> {
    let path = base.join(entry);
    if path.exists() {
        load(&path.to_string_lossy(), Purpose::Simulation)
    } else {
        load(entry, Purpose::Simulation)
    }
}

fn batch_one(base: &Path, entry: &str, out_dir: &Path, options: RunOptions) -> SummaryRow {
    let start = Instant::now();
    let mut name = Path::new(entry)
        .file_stem()
        .map_or_else(|| entry.to_string(), |s| s.to_string_lossy().into_owned());
    let result = resolve_entry(base, entry).and_then(|loaded| {
        name = loaded.name.clone();
        let artifacts = execute(&loaded, options)?;
        artifacts.write(out_dir)?;
        Ok(artifacts)
    });
    let status = match result {
        Ok(a) => {
            let d = a.record.separations();
            RunStatus::Ok {
                final_payoff: a.record.final_payoff,
                capture_time: a.record.capture_time,
                final_distance: d[d.len() - 1],
                initial_distance: distance(a.scenario.pursuer_start, a.scenario.evader_start),
            }
        }
        Err(e) => RunStatus::Failed {
            message: e.to_string(),
            code: e.exit_code(),
        },
    };
    SummaryRow {
        entry: entry.to_string(),
        name,
        status,
        wall_time: start.elapsed().as_secs_f64(),
    }
}

pub fn parse_manifest(text: &str, source: &str) -> Result<Vec<String>, CliError> {
    toml::from_str::<Manifest>(text).map(|m| m.scenarios).map_err(|e| CliError::Parse {
        source_name: source.to_string(),
        error: ParseError::at(text, e.span().map_or(0, |s| s.start), e.message().trim_end()),
    })
}

/// Runs every manifest entry; `parallel` > 1 uses that many worker threads.
/// Rows keep manifest order either way.
pub fn batch(manifest: &Path, out_dir: &Path, options: RunOptions, parallel: usize) -> Result<BatchSummary, CliError> {
    check_seed(options.seed)?;
    let (text, base) = if manifest.exists() {
        let text = fs::read_to_string(manifest).map_err(|e| CliError::io(manifest, e))?;
        (text, manifest.parent().map(Path::to_path_buf).unwrap_or_default())
    } else if manifest == Path::new("bundled") {
        (bundled::MANIFEST.to_string(), PathBuf::new())
    } else {
        return Err(CliError::io(
            manifest,
            std::io::Error::new(std::io::ErrorKind::NotFound, "no such manifest"),
        ));
    };
    let entries = parse_manifest(&text, &manifest.to_string_lossy())?;
    fs::create_dir_all(out_dir).map_err(|e| CliError::io(out_dir, e))?;

    let rows: Vec<SummaryRow> = if parallel > 1 {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(parallel)
            .build()
            .map_err(|e| CliError::Usage(format!("cannot start {parallel} worker threads: {e}")))?;
        pool.install(|| {
            entries
                .par_iter()
                .map(|e| batch_one(&base, e, out_dir, options))
                .collect()
        })
    } else {
        entries.iter().map(|e| batch_one(&base, e, out_dir, options)).collect()
    };

    let mut seen = std::collections::BTreeSet::new();
    let rows = rows
        .into_iter()
        .map(|mut r| {
            if !seen.insert(r.name.clone()) && matches!(r.status, RunStatus::Ok { .. }) {
                r.status = RunStatus::Failed {
                    message: format!("duplicate run name `{}` overwrote earlier artifacts", r.name),
                    code: 2,
                };
            }
            r
        })
        .collect();
    let summary = BatchSummary { rows };
    let path = out_dir.join("summary.csv");
    fs::write(&path, summary.to_csv(true)).map_err(|e| CliError::io(&path, e))?;
    Ok(summary)
}

/// Canonical TOML for a scenario, with every random seed written out.
pub fn dump(loaded: &Loaded, options: RunOptions) -> Result<String, CliError> {
    let scenario = build_scenario(loaded, options)?;
    Ok(ScenarioFile::from_scenario(Some(loaded.name.clone()), &scenario, loaded.file.output.clone()).to_toml())
}
