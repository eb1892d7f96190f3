use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use batmap::bench::{bench_run, BenchMode};
use batmap::intersect::DEFAULT_TILE_SIZE;
use batmap::io::{
    generate, parse_fimi, read_collection, write_collection, write_fimi, write_supports,
};
use batmap::{
    build_collection, build_vertical, count_pair, mine_pairs_detailed, CollectionConfig, Error,
    MineConfig,
};
use clap::{Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(name = "batmap", version, about = "Exact pair counting with batmaps")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a synthetic transaction database in FIMI format.
    Gen {
        #[arg(long)]
        items: usize,
        #[arg(long)]
        density: f64,
        /// Stop once the total number of item occurrences reaches this.
        #[arg(long)]
        total: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Build one batmap per item of a FIMI file and save the collection.
    Build {
        #[arg(short, long)]
        input: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = batmap::params::DEFAULT_R_MIN)]
        rmin: usize,
        #[arg(long)]
        maxloop: Option<u32>,
    },
    /// Count the support of every frequent pair in a FIMI file.
    Mine {
        #[arg(short, long)]
        input: PathBuf,
        #[arg(long, default_value_t = 1)]
        minsup: usize,
        #[arg(long, default_value_t = 1)]
        pair_threshold: u64,
        #[arg(long, default_value_t = DEFAULT_TILE_SIZE)]
        tile_size: usize,
        #[arg(long, default_value_t = 1)]
        threads: usize,
        /// Report every pair of frequent items, zero supports included.
        #[arg(long)]
        emit_all: bool,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Intersection size of two sets stored in a collection file.
    Intersect {
        #[arg(short, long)]
        input: PathBuf,
        #[arg(long)]
        a: u64,
        #[arg(long)]
        b: u64,
    },
    /// Time a workload and print a JSON report.
    Bench {
        mode: Mode,
        /// Elements per set (swar, merge).
        #[arg(long, default_value_t = 1 << 20)]
        size: usize,
        #[arg(long, default_value_t = 1.0 / 16.0)]
        density: f64,
        /// Distinct items (pipeline).
        #[arg(long, default_value_t = 256)]
        items: usize,
        /// Total instance size (pipeline).
        #[arg(long, default_value_t = 1_000_000)]
        total: usize,
        #[arg(long, default_value_t = DEFAULT_TILE_SIZE)]
        tile_size: usize,
        #[arg(long, default_value_t = 1)]
        threads: usize,
        #[arg(long, default_value_t = 10)]
        reps: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Swar,
    Merge,
    Pipeline,
}

fn open(path: &Path) -> Result<BufReader<File>, Error> {
    Ok(BufReader::new(File::open(path)?))
}

fn create(path: &Path) -> Result<BufWriter<File>, Error> {
    Ok(BufWriter::new(File::create(path)?))
}

fn run(command: Command) -> Result<(), Error> {
    match command {
        Command::Gen {
            items,
            density,
            total,
            seed,
            output,
        } => {
            let db = generate(items, density, total, seed)?;
            let mut sink = create(&output)?;
            write_fimi(&db, &mut sink)?;
            sink.flush()?;
            eprintln!(
                "{} transactions, {} occurrences",
                db.n_transactions(),
                db.total_size()
            );
        }
        Command::Build {
            input,
            output,
            seed,
            rmin,
            maxloop,
        } => {
            let db = parse_fimi(open(&input)?)?;
            let vertical = build_vertical(&db);
            let config = CollectionConfig {
                seed,
                r_min: rmin,
                max_loop: maxloop,
                memory_budget: None,
            };
            let built = build_collection(&vertical, db.labels(), config)?;
            let mut sink = create(&output)?;
            write_collection(&built.collection, &mut sink)?;
            sink.flush()?;
            eprintln!(
                "{} batmaps, {} bytes, {} failed insertions",
                built.collection.len(),
                built.collection.byte_size(),
                built.failures.len()
            );
        }
        Command::Mine {
            input,
            minsup,
            pair_threshold,
            tile_size,
            threads,
            emit_all,
            seed,
            output,
        } => {
            let db = parse_fimi(open(&input)?)?;
            let config = MineConfig {
                minsup,
                pair_threshold,
                tile_size,
                workers: threads,
                collection: CollectionConfig {
                    seed,
                    ..Default::default()
                },
                emit_all,
            };
            let outcome = mine_pairs_detailed(&db, &config)?;
            let mut sink = create(&output)?;
            write_supports(&outcome.table, &mut sink)?;
            sink.flush()?;
            eprintln!(
                "{} pairs, {} failed insertions, {} corrections",
                outcome.table.len(),
                outcome.failures,
                outcome.corrections
            );
        }
        Command::Intersect { input, a, b } => {
            let collection = read_collection(open(&input)?)?;
            let find = |id: u64| {
                collection.position_of_id(id).ok_or_else(|| {
                    Error::InvalidArgument(format!("item {id} is not in the collection"))
                })
            };
            let (pa, pb) = (find(a)?, find(b)?);
            let n = count_pair(&collection.batmaps()[pa], &collection.batmaps()[pb])?;
            println!("{n}");
        }
        Command::Bench {
            mode,
            size,
            density,
            items,
            total,
            tile_size,
            threads,
            reps,
            seed,
        } => {
            let mode = match mode {
                Mode::Swar => BenchMode::Swar {
                    set_size: size,
                    density,
                },
                Mode::Merge => BenchMode::Merge {
                    set_size: size,
                    density,
                },
                Mode::Pipeline => BenchMode::Pipeline {
                    items,
                    density,
                    total,
                    tile_size,
                },
            };
            let report = bench_run(mode, threads, reps, seed)?;
            let json = serde_json::to_string_pretty(&report)
                .map_err(|e| Error::InvalidArgument(format!("report serialization: {e}")))?;
            println!("{json}");
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
