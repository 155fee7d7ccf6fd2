mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use survnet_core::{DedupMode, MapOptions};

#[derive(Parser, Debug)]
#[command(name = "survnet", version, about = "Exact survivability analysis for source/sink networks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct MapArgs {
    /// Sub-topology equivalence used for deduplication.
    #[arg(long, default_value = "structural", value_parser = parse_mode)]
    pub mode: DedupMode,
    /// Let connectivity pass through a generator that has several links.
    #[arg(long)]
    pub source_transit: bool,
}

impl MapArgs {
    pub fn options(&self) -> MapOptions {
        MapOptions { mode: self.mode, source_transit: self.source_transit }
    }
}

fn parse_mode(s: &str) -> Result<DedupMode, String> {
    s.parse()
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Print the links-only representation.
    Transform {
        input: PathBuf,
        /// Write a Graphviz rendering here.
        #[arg(long)]
        dot: Option<PathBuf>,
        /// Show weights divided by total demand.
        #[arg(long)]
        normalize: bool,
    },
    /// Print load groups and the generators each load sees.
    Groups {
        input: PathBuf,
        /// `group`/`sink` lines instead of the table.
        #[arg(long)]
        machine: bool,
        #[arg(long)]
        source_transit: bool,
    },
    /// Map the network onto sub-topologies.
    Map {
        input: PathBuf,
        #[command(flatten)]
        map: MapArgs,
        /// Write manifest.txt and one DOT file per sub-topology here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Build scenario databases for every distinct sub-topology.
    Builddb {
        input: PathBuf,
        #[command(flatten)]
        map: MapArgs,
        #[arg(long)]
        out: PathBuf,
        /// Refuse sub-topologies with more elements than this.
        #[arg(long, default_value_t = survnet_core::scenario::DEFAULT_MAX_M)]
        max_m: usize,
        /// Also write a CSV dump of each database.
        #[arg(long)]
        csv: bool,
    },
    /// Survival verdicts for a fault combination, answered from the databases.
    Query {
        input: PathBuf,
        #[command(flatten)]
        map: MapArgs,
        /// Faulty element names, comma separated (e.g. H1,VB28).
        #[arg(long, value_delimiter = ',', default_value = "")]
        faults: Vec<String>,
        /// Only these sinks.
        #[arg(long, value_delimiter = ',')]
        sink: Vec<u32>,
        /// Read databases from here instead of building them.
        #[arg(long)]
        db: Option<PathBuf>,
    },
    /// Survival probabilities under independent element availability.
    Analyze {
        input: PathBuf,
        #[command(flatten)]
        map: MapArgs,
        /// Uniform availability of every element.
        #[arg(long, conflicts_with = "availability_file")]
        availability: Option<f64>,
        /// Lines of `<element> <availability>`; unlisted elements use --availability or 1.
        #[arg(long)]
        availability_file: Option<PathBuf>,
        #[arg(long, value_delimiter = ',')]
        sink: Vec<u32>,
        #[arg(long)]
        db: Option<PathBuf>,
    },
    /// Scenario-count summary.
    Report {
        input: PathBuf,
        #[command(flatten)]
        map: MapArgs,
    },
    /// Cross-check database lookups against a direct search on the full network.
    Verify {
        input: Option<PathBuf>,
        #[command(flatten)]
        map: MapArgs,
        /// Refuse networks with more elements than this.
        #[arg(long, default_value_t = 16)]
        max_elements: usize,
        /// Also check this many random networks.
        #[arg(long, default_value_t = 0)]
        random: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long)]
        db: Option<PathBuf>,
    },
}

#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Data(anyhow::Error),
    Mismatch(String),
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Data(e)
    }
}

impl From<survnet_core::Error> for Failure {
    fn from(e: survnet_core::Error) -> Self {
        Failure::Data(e.into())
    }
}

fn configure_threads() -> Result<(), Failure> {
    let Ok(value) = std::env::var("SURVNET_THREADS") else { return Ok(()) };
    let threads: usize = value
        .trim()
        .parse()
        .map_err(|_| Failure::Usage(format!("SURVNET_THREADS must be a number, got '{value}'")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| Failure::Usage(e.to_string()))
}

fn run(cli: Cli) -> Result<(), Failure> {
    configure_threads()?;
    match cli.command {
        Command::Transform { input, dot, normalize } => commands::transform(&input, dot.as_deref(), normalize),
        Command::Groups { input, machine, source_transit } => commands::groups(&input, machine, source_transit),
        Command::Map { input, map, out } => commands::map(&input, &map, out.as_deref()),
        Command::Builddb { input, map, out, max_m, csv } => commands::builddb(&input, &map, &out, max_m, csv),
        Command::Query { input, map, faults, sink, db } => commands::query(&input, &map, &faults, &sink, db.as_deref()),
        Command::Analyze { input, map, availability, availability_file, sink, db } => {
            commands::analyze(&input, &map, availability, availability_file.as_deref(), &sink, db.as_deref())
        }
        Command::Report { input, map } => commands::report(&input, &map),
        Command::Verify { input, map, max_elements, random, seed, db } => {
            commands::verify(input.as_deref(), &map, max_elements, random, seed, db.as_deref())
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Data(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
        Err(Failure::Mismatch(msg)) => {
            eprintln!("{msg}");
            ExitCode::from(3)
        }
    }
}
