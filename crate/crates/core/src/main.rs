use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};

use torsiongen::constructions::Family;
use torsiongen::genus::decompose;
use torsiongen::mcg::{build_actions, ActionTable, Variant};
use torsiongen::sweep::{
    cmd_estimate, cmd_genus, cmd_mcg, cmd_mcg_sweep, cmd_sweep, cmd_sympl, cmd_verify, Cache, CommandError,
    EstimatorResult, RunOptions, Sampler, SweepReport,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Parser)]
#[command(name = "torsiongen", version, about = "Fixed-order generating sets: constructions and verifiers")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Json, global = true)]
    format: Format,
    /// Worker threads (default: one per core).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Result cache directory (TORSIONGEN_CACHE takes precedence).
    #[arg(long, global = true)]
    cache_dir: Option<PathBuf>,
    /// Record wall-clock time per cell; reports are then no longer reproducible.
    #[arg(long, global = true)]
    timings: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Verify one family at one (k, n).
    Verify {
        family: Family,
        k: Option<usize>,
        n: Option<usize>,
        #[arg(long = "k")]
        k_flag: Option<usize>,
        #[arg(long = "n")]
        n_flag: Option<usize>,
    },
    /// Verify a family over a (k, n) grid.
    Sweep {
        family: Family,
        /// Smallest k.
        #[arg(long, default_value_t = 3)]
        k: usize,
        /// Largest k (default: --k).
        #[arg(long)]
        k_max: Option<usize>,
        /// Smallest n (default: the family's floor for each k).
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        n_max: usize,
    },
    /// Monte Carlo estimate of the probability that two random order-k elements generate.
    Estimate {
        #[arg(long)]
        k: usize,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 1000)]
        trials: u64,
        #[arg(long, default_value = "max_disjoint_k_cycles")]
        sampler: String,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
    /// Mapping-class pipeline for (k, g), or a grid with --k-max / --g-max.
    Mcg {
        k: Option<u32>,
        g: Option<u64>,
        variant: Option<Variant>,
        #[arg(long = "k")]
        k_flag: Option<u32>,
        #[arg(long = "g")]
        g_flag: Option<u64>,
        #[arg(long = "variant")]
        variant_flag: Option<Variant>,
        #[arg(long)]
        k_max: Option<u32>,
        #[arg(long)]
        g_max: Option<u64>,
        /// Also write the action table as JSON to this path.
        #[arg(long)]
        table: Option<PathBuf>,
    },
    /// Genus arithmetic checks for k..=k-max, or the decomposition of --g.
    Genus {
        #[arg(long)]
        k: u64,
        #[arg(long)]
        k_max: Option<u64>,
        #[arg(long)]
        g: Option<u64>,
    },
    /// Rotation matrix order (with --k), or generation of Sp(2g, p) by Humphries transvections.
    Sympl {
        #[arg(long)]
        g: usize,
        #[arg(long)]
        k: Option<u64>,
        #[arg(long, default_value_t = 2)]
        p: u8,
    },
}

/// A usage or domain problem: exit code 2.
struct Domain(anyhow::Error);

impl From<CommandError> for Domain {
    fn from(e: CommandError) -> Self {
        Domain(e.into())
    }
}

impl From<anyhow::Error> for Domain {
    fn from(e: anyhow::Error) -> Self {
        Domain(e)
    }
}

fn positional<T>(pos: Option<T>, flag: Option<T>, name: &str) -> Result<T, Domain> {
    pos.or(flag).ok_or_else(|| Domain(anyhow!("missing {name}")))
}

fn emit_report(report: &SweepReport, format: Format) -> bool {
    match format {
        Format::Json => print!("{}", report.to_json()),
        Format::Csv => print!("{}", report.to_csv()),
    }
    report.all_expected()
}

fn emit_estimate(r: &EstimatorResult, format: Format) -> Result<()> {
    match format {
        Format::Json => println!("{}", serde_json::to_string_pretty(r)?),
        Format::Csv => {
            let mut w = csv::Writer::from_writer(std::io::stdout());
            w.write_record(["k", "n", "sampler", "trials", "successes", "estimate", "ci_low", "ci_high", "seed"])?;
            w.write_record([
                r.k.to_string(),
                r.n.to_string(),
                r.sampler.to_string(),
                r.trials.to_string(),
                r.successes.to_string(),
                r.estimate.to_string(),
                r.interval.0.to_string(),
                r.interval.1.to_string(),
                r.seed.to_string(),
            ])?;
            w.flush()?;
        }
    }
    Ok(())
}

/// `Ok(true)` when every check matched its expectation.
fn run(cli: Cli) -> Result<bool, Domain> {
    let cache = Cache::resolve(cli.cache_dir.as_deref()).context("opening the cache directory")?;
    let opts = RunOptions {
        timings: cli.timings,
        jobs: cli.jobs.unwrap_or(0),
        cache,
    };
    let format = cli.format;
    match cli.command {
        Command::Verify {
            family,
            k,
            n,
            k_flag,
            n_flag,
        } => {
            let k = positional(k, k_flag, "k")?;
            let n = positional(n, n_flag, "n")?;
            Ok(emit_report(&cmd_verify(family, k, n, &opts)?, format))
        }
        Command::Sweep {
            family,
            k,
            k_max,
            n,
            n_max,
        } => {
            let (report, stats) = cmd_sweep(family, k..=k_max.unwrap_or(k), n, n_max, &opts)?;
            if opts.cache.is_some() {
                eprintln!(
                    "cache: {} hit(s), {} miss(es), {} spot-checked, {} mismatch(es)",
                    stats.hits, stats.misses, stats.spot_checked, stats.mismatches
                );
            }
            Ok(emit_report(&report, format))
        }
        Command::Estimate {
            k,
            n,
            trials,
            sampler,
            seed,
        } => {
            let sampler: Sampler = sampler.parse().map_err(|e: torsiongen::sweep::EstimateError| Domain(e.into()))?;
            let r = cmd_estimate(k, n, trials, sampler, seed).map_err(|e| Domain(e.into()))?;
            emit_estimate(&r, format)?;
            Ok(true)
        }
        Command::Mcg {
            k,
            g,
            variant,
            k_flag,
            g_flag,
            variant_flag,
            k_max,
            g_max,
            table,
        } => {
            let k = positional(k, k_flag, "k")?;
            let g = positional(g, g_flag, "g")?;
            let variant = variant.or(variant_flag).unwrap_or(Variant::Four);
            if k_max.is_some() || g_max.is_some() {
                let report = cmd_mcg_sweep(variant, k..=k_max.unwrap_or(k), g..=g_max.unwrap_or(g), &opts)?;
                return Ok(emit_report(&report, format));
            }
            let report = cmd_mcg(k, g, variant, &opts)?;
            if let Some(path) = table {
                let dec = decompose(u64::from(k), g, variant == Variant::Three && k == 7)
                    .ok_or_else(|| anyhow!("genus {g} has no decomposition for k={k}"))?;
                let set = build_actions(k, &dec, variant).map_err(|e| Domain(e.into()))?;
                std::fs::write(&path, ActionTable::from_set(&set).to_json() + "\n")
                    .with_context(|| format!("writing {}", path.display()))?;
            }
            Ok(emit_report(&report, format))
        }
        Command::Genus { k, k_max, g } => Ok(emit_report(&cmd_genus(k..=k_max.unwrap_or(k), g, &opts)?, format)),
        Command::Sympl { g, k, p } => Ok(emit_report(&cmd_sympl(g, k, p, &opts)?, format)),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Domain(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
