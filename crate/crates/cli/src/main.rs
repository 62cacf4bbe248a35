use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context as _;
use clap::{Args as ClapArgs, Parser, Subcommand};
use pi_ocrs_cli::claims::{self, Status, VerifyOptions};
use pi_ocrs_cli::config::{ExperimentConfig, Format, Settings};
use pi_ocrs_cli::corpus::{self, Corpus};
use pi_ocrs_cli::{dump, experiments};

/// Experiments and claim checks for online contention resolution under pairwise independence.
#[derive(Debug, Parser)]
#[command(name = "pi-ocrs", version)]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, ClapArgs)]
struct Global {
    /// Seed of every random stream
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Monte Carlo trials, for experiments that sample
    #[arg(long, global = true)]
    trials: Option<u64>,
    /// Output file; stdout when absent
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_parser = ["csv", "json"])]
    format: Option<String>,
    /// `key = value` file; flags override it
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Root of the fixture corpus
    #[arg(long, global = true)]
    fixtures: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run the acceptance criteria and print one row per criterion
    Verify {
        /// Divide every Monte Carlo budget by this factor; rows can then only be inconclusive
        #[arg(long)]
        reduced: Option<u64>,
        /// Extra distribution files that must be pairwise independent
        #[arg(long = "dist")]
        dists: Vec<PathBuf>,
        /// Only these criteria
        #[arg(long = "only")]
        only: Vec<u8>,
    },
    /// Run one named experiment and emit its claim table
    Run {
        #[arg(value_parser = experiment_names())]
        name: String,
        #[command(flatten)]
        params: ParamFlags,
    },
    /// Print a constructed distribution in the text format
    DumpDist {
        #[arg(value_parser = dump::CONSTRUCTORS.iter().map(|(c, _)| *c).collect::<Vec<_>>())]
        ctor: String,
        #[arg(allow_negative_numbers = true)]
        params: Vec<String>,
    },
    /// List the registered experiments with their defaults
    List,
}

fn experiment_names() -> Vec<&'static str> {
    experiments::EXPERIMENTS.iter().map(|e| e.name).collect()
}

#[derive(Debug, ClapArgs)]
struct ParamFlags {
    #[arg(long)]
    b: Option<String>,
    #[arg(long)]
    k: Option<String>,
    #[arg(long)]
    eps: Option<String>,
    #[arg(long)]
    n: Option<String>,
    #[arg(long)]
    t: Option<String>,
    #[arg(long)]
    tmax: Option<String>,
}

impl ParamFlags {
    fn entries(&self) -> [(&'static str, &Option<String>); 6] {
        [("b", &self.b), ("k", &self.k), ("eps", &self.eps), ("n", &self.n), ("t", &self.t), ("tmax", &self.tmax)]
    }
}

fn settings(global: &Global, params: Option<&ParamFlags>) -> anyhow::Result<Settings> {
    let file = match &global.config {
        Some(path) => {
            let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            Settings::parse(&text).with_context(|| format!("in {}", path.display()))?
        }
        None => Settings::default(),
    };
    let mut flags = Settings { seed: global.seed, out: global.out.clone(), ..Settings::default() };
    if let Some(format) = &global.format {
        flags.format = Some(format.parse::<Format>()?);
    }
    if let Some(trials) = global.trials {
        flags.set("trials", &trials.to_string())?;
    }
    for (key, value) in params.map(|p| p.entries()).into_iter().flatten() {
        if let Some(value) = value {
            flags.set(key, value)?;
        }
    }
    Ok(file.overlay(flags))
}

/// Per-criterion tables of `verify --out <path>` go to `<path>.criteria/`.
fn criteria_dir(path: &std::path::Path) -> PathBuf {
    let mut name = path.file_name().map(|n| n.to_os_string()).unwrap_or_default();
    name.push(".criteria");
    path.with_file_name(name)
}

fn emit(text: &str, out: Option<&PathBuf>) -> anyhow::Result<()> {
    match out {
        Some(path) => {
            if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
                fs::create_dir_all(parent)?;
            }
            fs::write(path, text).with_context(|| format!("writing {}", path.display()))
        }
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run(cli: Cli) -> anyhow::Result<bool> {
    let corpus = Corpus::new(cli.global.fixtures.clone().unwrap_or_else(corpus::default_root));
    match &cli.command {
        Command::Run { name, params } => {
            let config = ExperimentConfig::new(name, settings(&cli.global, Some(params))?);
            let table = experiments::run_experiment(&config, &corpus)?;
            match &config.out {
                Some(path) => table.write(config.format, path)?,
                None => print!("{}", table.render(config.format)?),
            }
            for row in table.failing() {
                eprintln!("failing: {} = {} not {}", row.item, row.estimate, row.bound);
            }
            Ok(table.passed())
        }
        Command::Verify { reduced, dists, only } => {
            let settings = settings(&cli.global, None)?;
            if settings.params.keys().next().is_some() {
                anyhow::bail!("verify runs every criterion at its pinned parameters; remove experiment parameters");
            }
            let opts = VerifyOptions { reduced: *reduced, extra_dists: dists.clone(), ..VerifyOptions::new(settings.seed.unwrap_or(0), corpus) };
            let rows = claims::verify_only(&opts, only);
            let format = settings.format.unwrap_or_default();
            let text = match format {
                Format::Csv => claims::summary_csv(&rows)?,
                Format::Json => claims::summary_json(&rows)?,
            };
            emit(&text, settings.out.as_ref())?;
            if let Some(path) = &settings.out {
                let dir = criteria_dir(path);
                for row in &rows {
                    for (index, table) in row.tables.iter().enumerate() {
                        let name = format!("{:02}-{index:02}-{}.{format}", row.id, table.experiment);
                        table.write(format, &dir.join(name))?;
                    }
                }
            }
            Ok(rows.iter().all(|r| r.status == Status::Pass))
        }
        Command::DumpDist { ctor, params } => {
            emit(&dump::dump(ctor, params)?, cli.global.out.as_ref())?;
            Ok(true)
        }
        Command::List => {
            for e in experiments::EXPERIMENTS {
                let defaults: Vec<String> = e.defaults.iter().map(|(k, v)| format!("{k}={v}")).collect();
                println!("{:<20} {}\n{:<20} defaults: {}", e.name, e.claim, "", defaults.join(" "));
            }
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
