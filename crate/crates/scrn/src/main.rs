//! Command-line front end for the supply-chain network simulator.

use clap::{Parser, Subcommand};
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use scrn::config::{parse_config, ScenarioConfig};
use scrn::error::Result;
use scrn::experiment::{
    default_rho_grid, run_figure3_sweep, run_scenario, run_table1, CellResult,
};
use scrn::network::build_network;
use scrn::output::{dump_network, emit_results, OutputFormat};
use std::io::Write;
use std::path::PathBuf;

#[derive(Parser)]
#[command(
    name = "scrn",
    version,
    about = "Three-tier supply-chain random network simulator"
)]
struct Cli {
    /// Master seed (overrides the scenario file and suite default).
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Replications per cell (overrides the scenario file and suite default).
    #[arg(long, global = true)]
    reps: Option<usize>,

    /// Output file (stdout when omitted).
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Output format for result grids.
    #[arg(long, global = true, value_parser = ["csv", "json"], default_value = "csv")]
    format: String,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a single scenario file and emit one summary row.
    Run {
        /// Scenario file (flat key = value format).
        config: PathBuf,
    },
    /// Run the Table 1 suite: 9 distribution pairs per case.
    Table1 {
        /// Which case to run: a (random, mean 2), b (ordered, mean 2),
        /// c (mean 4), d (mean 8), or all.
        #[arg(long, value_parser = ["a", "b", "c", "d", "all"], default_value = "all")]
        case: String,
    },
    /// Run the Figure 3 horizontal-link sweep over ρ.
    Figure3 {
        /// Comma-separated ρ grid in [0, 1] (default 0,0.1,…,1).
        #[arg(long)]
        grid: Option<String>,
    },
    /// Build one network sample from a scenario file and dump its edge list.
    DumpNetwork {
        /// Scenario file (flat key = value format).
        config: PathBuf,
    },
}

fn apply_overrides(cfg: &mut ScenarioConfig, cli: &Cli) {
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    if let Some(reps) = cli.reps {
        cfg.replications = reps;
    }
}

fn output_writer(cli: &Cli) -> Result<Box<dyn Write>> {
    Ok(match &cli.out {
        Some(path) => Box::new(std::io::BufWriter::new(std::fs::File::create(path)?)),
        None => Box::new(std::io::stdout().lock()),
    })
}

fn parse_grid(spec: &str) -> Result<Vec<f64>> {
    spec.split(',')
        .map(|s| {
            s.trim().parse::<f64>().map_err(|e| {
                scrn::ScrnError::ConfigInvalid(format!("bad grid value `{s}`: {e}"))
            })
        })
        .collect()
}

fn run(cli: &Cli) -> Result<()> {
    let format = match cli.format.as_str() {
        "json" => OutputFormat::Json,
        _ => OutputFormat::Csv,
    };
    match &cli.command {
        Command::Run { config } => {
            let mut cfg = parse_config(config)?;
            apply_overrides(&mut cfg, cli);
            cfg.validate()?;
            let stats = run_scenario(&cfg)?;
            let rows = vec![CellResult {
                case: "custom".to_string(),
                wholesaler_dist: cfg.wholesaler_dist,
                retailer_dist: cfg.retailer_dist,
                retailer_mean: cfg.retailer_mean_in_degree,
                rho: cfg.rho,
                stats,
            }];
            emit_results(&rows, format, &mut output_writer(cli)?)?;
        }
        Command::Table1 { case } => {
            let mut base = ScenarioConfig::default();
            apply_overrides(&mut base, cli);
            let cases: Vec<char> = if case == "all" {
                vec!['a', 'b', 'c', 'd']
            } else {
                case.chars().collect()
            };
            let rows = run_table1(&base, &cases)?;
            emit_results(&rows, format, &mut output_writer(cli)?)?;
        }
        Command::Figure3 { grid } => {
            let mut base = ScenarioConfig::default();
            apply_overrides(&mut base, cli);
            let grid = match grid {
                Some(spec) => parse_grid(spec)?,
                None => default_rho_grid(),
            };
            let rows = run_figure3_sweep(&base, &grid)?;
            emit_results(&rows, format, &mut output_writer(cli)?)?;
        }
        Command::DumpNetwork { config } => {
            let mut cfg = parse_config(config)?;
            apply_overrides(&mut cfg, cli);
            cfg.validate()?;
            let mut rng = ChaCha12Rng::seed_from_u64(cfg.seed);
            let (network, _) = build_network(&cfg, &mut rng)?;
            dump_network(&network, &mut output_writer(cli)?)?;
        }
    }
    Ok(())
}

fn main() {
    let cli = Cli::parse();
    if let Err(err) = run(&cli) {
        eprintln!("error: {err}");
        std::process::exit(1);
    }
}
