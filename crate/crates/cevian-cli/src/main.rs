//! `cevian` — batch front end for iterated Cevian subdivision.
//!
//! Every command writes one deterministic artifact (CSV, JSON or PGM) to
//! `--out` or stdout, stamped with the full run configuration. Randomized
//! commands require an explicit `--seed`. Errors leave one machine-readable
//! JSON line on stderr and a nonzero exit status.

use std::fmt::Display;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use cevian::density::{approximate_with, verify};
use cevian::dynamics::{
    cdf_bounds, enumerate_generation, flatness_stats, histogram, sample_walks_par, theta_grid,
    HistogramGrid, GENERATOR_NAME,
};
use cevian::geometry::{subdivide, CenterStrategy};
use cevian::io::{
    write_cdf_csv, write_histogram_csv, write_histogram_pgm, write_triples_csv, Provenance,
};
use cevian::maps::{self_similar_indices, similarity_classes, solve_all_self_similar};
use cevian::simplex::AngleTriple;

#[derive(Parser)]
#[command(
    name = "cevian",
    version,
    about = "Iterated Cevian subdivision of triangles: subdivision, density certificates, \
             limiting-distribution statistics",
    after_help = "Angle triples are comma-separated radians (see --degrees). \
                  Outputs embed the full run configuration; identical configurations \
                  produce byte-identical files."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
    Pgm,
}

#[derive(Args)]
struct StartArgs {
    /// Center strategy: centroid | incenter | gergonne | lemoine | weighted:p0,p1,p2
    #[arg(long, value_parser = CenterStrategy::from_str)]
    strategy: CenterStrategy,
    /// Start triangle as three comma-separated angles
    #[arg(long)]
    start: String,
    /// Interpret input angles as degrees
    #[arg(long)]
    degrees: bool,
}

#[derive(Subcommand)]
enum Command {
    /// One subdivision step: the six daughters of a triangle
    Subdivide {
        #[command(flatten)]
        tri: StartArgs,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Density certificate: a map word landing within epsilon of the target
    Density {
        /// Start triangle (must be nondegenerate)
        #[arg(long)]
        start: String,
        /// Target triangle (degenerate allowed)
        #[arg(long)]
        target: String,
        #[arg(long)]
        epsilon: f64,
        /// Keep the full a-priori-depth word instead of the shortest prefix
        #[arg(long)]
        no_early_exit: bool,
        #[arg(long)]
        degrees: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// All 6^n daughters of the n-th generation (n <= 9)
    Enumerate {
        #[command(flatten)]
        tri: StartArgs,
        #[arg(long)]
        n: u32,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Monte-Carlo sample of m n-th generation daughters
    Sample {
        #[command(flatten)]
        tri: StartArgs,
        #[arg(long)]
        n: u32,
        #[arg(long)]
        m: u64,
        #[arg(long)]
        seed: u64,
        /// Worker threads; worker w samples from seed + w
        #[arg(long, default_value_t = 1)]
        workers: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Triangular histogram over the embedded simplex (CSV or PGM)
    Hist {
        #[command(flatten)]
        tri: StartArgs,
        #[arg(long)]
        n: u32,
        #[arg(long)]
        bins: usize,
        /// Samples to draw (with --seed); omit with --exhaustive
        #[arg(long)]
        m: Option<u64>,
        #[arg(long)]
        seed: Option<u64>,
        /// Histogram the full 6^n generation instead of sampling (n <= 9)
        #[arg(long, conflicts_with_all = ["m", "seed", "workers"])]
        exhaustive: bool,
        #[arg(long, default_value_t = 1)]
        workers: usize,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
        /// Raster width for --format pgm
        #[arg(long, default_value_t = 512)]
        pgm_width: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Min-angle CDF bounds from all 6^n region images (n <= 8)
    Cdf {
        #[arg(long)]
        n: u32,
        /// Number of theta grid points on [0, pi/3]
        #[arg(long, default_value_t = 512)]
        grid: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// The triangles similar to one of their own daughters
    Selfsim {
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Fraction of sampled daughters with max angle above pi - delta
    Flatness {
        #[command(flatten)]
        tri: StartArgs,
        #[arg(long)]
        n: u32,
        #[arg(long)]
        m: u64,
        #[arg(long)]
        delta: f64,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

struct CliError(String);

impl<E: Display> From<E> for CliError {
    fn from(e: E) -> Self {
        CliError(e.to_string())
    }
}

fn parse_triple(text: &str, degrees: bool) -> Result<AngleTriple, CliError> {
    if degrees {
        let parts: Vec<f64> = text
            .split(',')
            .map(|p| p.trim().parse::<f64>())
            .collect::<Result<_, _>>()
            .map_err(|_| CliError(format!("cannot parse angle triple from {text:?}")))?;
        if parts.len() != 3 {
            return Err(CliError(format!("cannot parse angle triple from {text:?}")));
        }
        Ok(AngleTriple::new(
            parts[0].to_radians(),
            parts[1].to_radians(),
            parts[2].to_radians(),
        )?)
    } else {
        Ok(text.parse::<AngleTriple>()?)
    }
}

fn open_sink(out: &Option<PathBuf>) -> Result<Box<dyn Write>, CliError> {
    Ok(match out {
        Some(path) => Box::new(BufWriter::new(File::create(path)?)),
        None => Box::new(std::io::stdout().lock()),
    })
}

fn triple_json(t: &AngleTriple) -> serde_json::Value {
    json!(t.coords())
}

fn run(cli: Cli) -> Result<ExitCode, CliError> {
    match cli.command {
        Command::Subdivide { tri, format, out } => {
            let start = parse_triple(&tri.start, tri.degrees)?;
            let daughters = subdivide(tri.strategy, &start)?;
            let prov = Provenance {
                strategy: Some(tri.strategy.to_string()),
                start: Some(start),
                ..Default::default()
            };
            let mut w = open_sink(&out)?;
            match format {
                Format::Csv => write_triples_csv(&mut w, &daughters, &prov)?,
                Format::Json => {
                    let doc = json!({
                        "config": {
                            "command": "subdivide",
                            "strategy": tri.strategy.to_string(),
                            "start": triple_json(&start),
                        },
                        "daughters": daughters.iter().map(triple_json).collect::<Vec<_>>(),
                    });
                    writeln!(w, "{}", serde_json::to_string_pretty(&doc)?)?;
                }
                Format::Pgm => return Err(CliError("subdivide has no pgm form".into())),
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Density { start, target, epsilon, no_early_exit, degrees, out } => {
            let start = parse_triple(&start, degrees)?;
            let target = parse_triple(&target, degrees)?;
            let cert = approximate_with(&start, &target, epsilon, !no_early_exit)?;
            let ok = verify(&cert);
            let doc = json!({
                "config": {
                    "command": "density",
                    "start": triple_json(&cert.start),
                    "target": triple_json(&cert.target),
                    "epsilon": epsilon,
                    "early_exit": !no_early_exit,
                },
                "certificate": cert,
                "verified": ok,
            });
            let mut w = open_sink(&out)?;
            writeln!(w, "{}", serde_json::to_string_pretty(&doc)?)?;
            Ok(if ok { ExitCode::SUCCESS } else { ExitCode::FAILURE })
        }
        Command::Enumerate { tri, n, out } => {
            let start = parse_triple(&tri.start, tri.degrees)?;
            let triples = enumerate_generation(&start, tri.strategy, n)?;
            let prov = Provenance {
                strategy: Some(tri.strategy.to_string()),
                start: Some(start),
                n: Some(n),
                ..Default::default()
            };
            let mut w = open_sink(&out)?;
            write_triples_csv(&mut w, &triples, &prov)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Sample { tri, n, m, seed, workers, out } => {
            let start = parse_triple(&tri.start, tri.degrees)?;
            let triples = sample_walks_par(&start, tri.strategy, n, m, seed, workers)?;
            let prov = Provenance {
                strategy: Some(tri.strategy.to_string()),
                start: Some(start),
                n: Some(n),
                m: Some(m),
                seed: Some(seed),
                generator: Some(GENERATOR_NAME.to_owned()),
                ..Default::default()
            };
            let mut w = open_sink(&out)?;
            write_triples_csv(&mut w, &triples, &prov)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Hist { tri, n, bins, m, seed, exhaustive, workers, format, pgm_width, out } => {
            if bins == 0 {
                return Err(CliError("--bins must be at least 1".into()));
            }
            let start = parse_triple(&tri.start, tri.degrees)?;
            let (grid, m_used, seed_used) = if exhaustive {
                let mut grid = HistogramGrid::new(bins);
                let triples = enumerate_generation(&start, tri.strategy, n)?;
                for t in &triples {
                    grid.accumulate(t);
                }
                (grid, None, None)
            } else {
                let m = m.ok_or(CliError("hist needs --m (or --exhaustive)".into()))?;
                let seed = seed.ok_or(CliError("hist needs an explicit --seed".into()))?;
                let samples = sample_walks_par(&start, tri.strategy, n, m, seed, workers)?;
                (histogram(&samples, bins), Some(m), Some(seed))
            };
            let prov = Provenance {
                strategy: Some(tri.strategy.to_string()),
                start: Some(start),
                n: Some(n),
                m: m_used,
                seed: seed_used,
                generator: seed_used.map(|_| GENERATOR_NAME.to_owned()),
                bins: Some(bins),
            };
            let mut w = open_sink(&out)?;
            match format {
                Format::Csv => write_histogram_csv(&mut w, &grid, &prov)?,
                Format::Pgm => write_histogram_pgm(&mut w, &grid, &prov, pgm_width)?,
                Format::Json => return Err(CliError("hist emits csv or pgm".into())),
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Cdf { n, grid, out } => {
            if grid < 2 {
                return Err(CliError("--grid needs at least 2 points".into()));
            }
            let bounds = cdf_bounds(n, &theta_grid(grid))?;
            let prov = Provenance { n: Some(n), ..Default::default() };
            let mut w = open_sink(&out)?;
            write_cdf_csv(&mut w, &bounds, &prov)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Selfsim { out } => {
            let solutions = solve_all_self_similar();
            let classes = similarity_classes(&solutions);
            let doc = json!({
                "config": { "command": "selfsim" },
                "classes": classes.iter().map(|c| json!({
                    "triple": c,
                    "self_similar_indices": self_similar_indices(
                        &AngleTriple::new(c[0], c[1], c[2]).expect("class triple"),
                        1e-9,
                    ).iter().map(|i| i.get()).collect::<Vec<_>>(),
                })).collect::<Vec<_>>(),
                "witnesses": solutions.iter().map(|s| json!({
                    "index": s.index.get(),
                    "permutation": s.permutation.0,
                    "triple": triple_json(&s.triple),
                })).collect::<Vec<_>>(),
            });
            let mut w = open_sink(&out)?;
            writeln!(w, "{}", serde_json::to_string_pretty(&doc)?)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Flatness { tri, n, m, delta, seed, out } => {
            let start = parse_triple(&tri.start, tri.degrees)?;
            let fraction = flatness_stats(&start, tri.strategy, n, m, delta, seed)?;
            let doc = json!({
                "config": {
                    "command": "flatness",
                    "strategy": tri.strategy.to_string(),
                    "start": triple_json(&start),
                    "n": n,
                    "m": m,
                    "delta": delta,
                    "seed": seed,
                    "generator": GENERATOR_NAME,
                },
                "flat_fraction": fraction,
            });
            let mut w = open_sink(&out)?;
            writeln!(w, "{}", serde_json::to_string_pretty(&doc)?)?;
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(CliError(msg)) => {
            eprintln!("{}", json!({ "error": msg }));
            ExitCode::FAILURE
        }
    }
}
