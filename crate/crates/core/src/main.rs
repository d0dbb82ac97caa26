use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use equilab::config::{parse_config, parse_descriptor, ExperimentConfig};
use equilab::measures::Registry;
use equilab::relationships::{default_catalog, CatalogEntry};
use equilab::{pipeline, Error};

const LONG_VERSION: &str = concat!(
    env!("CARGO_PKG_VERSION"),
    "\ngrid archive version: 1\ncalibration archive version: 1"
);

#[derive(Parser)]
#[command(name = "equilab", version, long_version = LONG_VERSION, about = "Equitability analysis of measures of dependence")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Calibrate, build grids, analyze and render in one go
    Run(StageArgs),
    /// Calibrate noise levels on the R² grid
    Calibrate(StageArgs),
    /// Build the Monte Carlo score grid of each statistic
    Grid(StageArgs),
    /// Write tables and summary.json from existing grids
    Analyze(StageArgs),
    /// Write SVG figures from existing grids
    Render(StageArgs),
    /// Print the function catalog as JSON
    Catalog,
}

#[derive(Args)]
struct StageArgs {
    /// Experiment config (TOML, or JSON with a .json extension)
    #[arg(short, long)]
    config: PathBuf,
    /// Worker threads (default: logical cores)
    #[arg(long)]
    threads: Option<usize>,
    /// Output directory, overriding the config
    #[arg(long)]
    out: Option<PathBuf>,
    /// Statistic key such as `kraskov_mi[k=4]`; replaces the config's list. Repeatable.
    #[arg(long)]
    statistic: Vec<String>,
}

enum Failure {
    Config(Error),
    Runtime(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Config { .. }
            | Error::ConfigParse { .. }
            | Error::UnknownStatistic(_)
            | Error::UnknownFunction(_)
            | Error::InvalidParameter { .. } => Failure::Config(e),
            other => Failure::Runtime(other),
        }
    }
}

fn load(args: &StageArgs) -> Result<ExperimentConfig, Failure> {
    // an unreadable config file is a config problem too
    let mut cfg = parse_config(&args.config).map_err(Failure::Config)?;
    if let Some(out) = &args.out {
        cfg.output_dir = out.clone();
    }
    if !args.statistic.is_empty() {
        cfg.statistics = args
            .statistic
            .iter()
            .map(|s| parse_descriptor(s))
            .collect::<Result<_, _>>()?;
        cfg.validate(&Registry::default())?;
    }
    Ok(cfg)
}

fn execute(command: Command) -> Result<(), Failure> {
    let args = match command {
        Command::Catalog => {
            let entries: Vec<CatalogEntry> = default_catalog().iter().map(CatalogEntry::from).collect();
            println!("{}", serde_json::to_string_pretty(&entries).map_err(Error::from)?);
            return Ok(());
        }
        Command::Run(ref a)
        | Command::Calibrate(ref a)
        | Command::Grid(ref a)
        | Command::Analyze(ref a)
        | Command::Render(ref a) => a,
    };
    let cfg = load(args)?;
    let registry = Registry::default();
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(n) = args.threads {
        if n == 0 {
            return Err(Failure::Config(Error::Config {
                field: "threads".into(),
                reason: "must be at least 1".into(),
            }));
        }
        pool = pool.num_threads(n);
    }
    let pool = pool
        .build()
        .map_err(|e| Failure::Runtime(Error::InvalidGrid(format!("thread pool: {e}"))))?;
    let written = pool.install(|| -> equilab::Result<Vec<PathBuf>> {
        match command {
            Command::Run(_) => pipeline::run(&cfg, &registry),
            Command::Calibrate(_) => Ok(vec![
                pipeline::calibrate(&cfg).map(|_| pipeline::calibration_path(&cfg))?
            ]),
            Command::Grid(_) => cfg
                .statistics
                .iter()
                .map(|s| pipeline::grid(&cfg, &registry, s).map(|_| pipeline::grid_path(&cfg, s)))
                .collect(),
            Command::Analyze(_) => pipeline::analyze(&cfg, &registry),
            Command::Render(_) => pipeline::render(&cfg, &registry),
            Command::Catalog => unreachable!(),
        }
    })?;
    for path in written {
        println!("{}", path.display());
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
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
    match execute(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Config(e)) => {
            eprintln!("config error: {e}");
            ExitCode::from(1)
        }
        Err(Failure::Runtime(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
