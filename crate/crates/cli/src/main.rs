//! `hitroute`: run scenarios, compare routing strategies, import SUMO files.
//!
//! Exit status is 0 on success, 1 for usage errors and 2 for input errors.
//! Progress goes to standard error; results go to files.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};
use hitroute_core::experiment::{comparison_row, run_all, run_strategy, COMPARISON_HEADER};
use hitroute_core::scenario::grid::{grid_scenario, GridParams};
use hitroute_core::scenario::{
    import_sumo_net, import_sumo_routes, serialize_native, write_metrics, write_tripinfo, InlineNetwork, NetworkSource,
    Scenario, DEFAULT_HORIZON,
};
use hitroute_core::{write_comparison, Error, ScenarioConfig, Strategy};

#[derive(Parser)]
#[command(name = "hitroute", version, about = "Fuzzy route assignment experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate a scenario under one strategy; writes tripinfo.csv and metrics.csv.
    Run {
        #[arg(long)]
        scenario: PathBuf,
        /// dijkstra, hit1, hit1-pso, hit2 or hit2-pso.
        #[arg(long)]
        strategy: Strategy,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Steps to simulate [default: the scenario's horizon, 3600 if unset].
        #[arg(long)]
        horizon: Option<u64>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Simulate every strategy on the same demand; writes comparison.csv.
    Compare {
        #[arg(long)]
        scenario: PathBuf,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long)]
        horizon: Option<u64>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Convert a SUMO network (and optional routes) into a native scenario.
    Import {
        #[arg(long)]
        net: PathBuf,
        #[arg(long)]
        routes: Option<PathBuf>,
        /// Scenario file to write.
        #[arg(long)]
        out: PathBuf,
    },
    /// Write the 8x8 grid benchmark scenario.
    Grid {
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
}

/// Failure of a command with its exit status.
struct Failure(u8, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure(2, e.to_string())
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure(2, format!("cannot read {}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> Result<(), Failure> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| Failure(2, format!("cannot create {}: {e}", dir.display())))?;
    }
    fs::write(path, text).map_err(|e| Failure(2, format!("cannot write {}: {e}", path.display())))
}

fn load(path: &Path) -> Result<Scenario, Failure> {
    eprintln!("loading {}", path.display());
    Ok(ScenarioConfig::load(path)?)
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map_or_else(|| "undefined".to_string(), |x| format!("{x:.3}"))
}

fn run(scenario: &Path, strategy: Strategy, seed: u64, horizon: Option<u64>, out: &Path) -> Result<(), Failure> {
    let sc = load(scenario)?;
    let horizon = horizon.unwrap_or(sc.config.horizon);
    eprintln!("running {strategy} (seed {seed}, horizon {horizon})");
    let started = Instant::now();
    let output = run_strategy(&sc, strategy, seed, horizon)?;
    for (id, reason) in &output.stranded {
        eprintln!("warning: vehicle {id} stranded: {reason}");
    }
    let mean = output.mean_average_travel_time();
    write(&out.join("tripinfo.csv"), &write_tripinfo(&output.records))?;
    write(&out.join("metrics.csv"), &write_metrics(&output.series, mean))?;
    eprintln!(
        "{strategy}: mean average travel time {} s, arrived {}, unfinished {} ({:.1?})",
        fmt_opt(mean),
        output.arrived(),
        output.unfinished(),
        started.elapsed()
    );
    Ok(())
}

fn compare(scenario: &Path, seed: u64, horizon: Option<u64>, out: &Path) -> Result<(), Failure> {
    let sc = load(scenario)?;
    let horizon = horizon.unwrap_or(sc.config.horizon);
    eprintln!(
        "comparing {} strategies (seed {seed}, horizon {horizon})",
        Strategy::ALL.len()
    );
    let started = Instant::now();
    let rows: Vec<_> = run_all(&sc, seed, horizon)?
        .iter()
        .map(|(st, o)| comparison_row(&sc, *st, o))
        .collect();
    write(&out.join("comparison.csv"), &write_comparison(&rows))?;
    eprintln!("{COMPARISON_HEADER}");
    for r in &rows {
        eprintln!(
            "{},{},{},{},{}",
            r.strategy,
            fmt_opt(r.mean_avg_travel_time),
            r.arrived,
            r.unfinished,
            fmt_opt(r.altered_route_fraction)
        );
    }
    eprintln!("done in {:.1?}", started.elapsed());
    Ok(())
}

fn import(net: &Path, routes: Option<&Path>, out: &Path) -> Result<(), Failure> {
    let imported = import_sumo_net(&read(net)?)?;
    eprintln!(
        "network: {} junctions, {} edges, {} connections ({} elements ignored)",
        imported.value.node_count(),
        imported.value.edge_count(),
        imported.value.connection_count(),
        imported.ignored
    );
    let demands = match routes {
        Some(p) => {
            let r = import_sumo_routes(&read(p)?)?;
            eprintln!("routes: {} vehicles ({} elements ignored)", r.value.len(), r.ignored);
            r.value
        }
        None => Vec::new(),
    };
    let cfg = ScenarioConfig {
        network: NetworkSource::Inline(InlineNetwork::from_network(&imported.value)),
        demands,
        demand_events: Vec::new(),
        hierarchy: None,
        pso: Default::default(),
        simulation: Default::default(),
        horizon: DEFAULT_HORIZON,
    };
    // Fails on demands naming edges the network lacks.
    cfg.clone().resolve(Path::new("."))?;
    write(out, &serialize_native(&cfg))?;
    eprintln!("wrote {}", out.display());
    Ok(())
}

fn grid(seed: u64, out: &Path) -> Result<(), Failure> {
    let cfg = grid_scenario(&GridParams::default(), seed);
    write(out, &serialize_native(&cfg))?;
    eprintln!("wrote {} ({} vehicles)", out.display(), cfg.demands.len());
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let result = match &cli.command {
        Command::Run {
            scenario,
            strategy,
            seed,
            horizon,
            out,
        } => run(scenario, *strategy, *seed, *horizon, out),
        Command::Compare {
            scenario,
            seed,
            horizon,
            out,
        } => compare(scenario, *seed, *horizon, out),
        Command::Import { net, routes, out } => import(net, routes.as_deref(), out),
        Command::Grid { seed, out } => grid(*seed, out),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure(code, msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(code)
        }
    }
}
