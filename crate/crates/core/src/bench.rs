//! Benchmark harness. Rates are always derived from measured wall times and
//! exact byte and element counts of the workload.

use std::thread;
use std::time::Instant;

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::baselines::merge_count;
use crate::batmap::{build_batmap, BatMap, BuildConfig};
use crate::error::{Error, Result};
use crate::intersect::count_pair;
use crate::io::generate;
use crate::mining::{mine_pairs_detailed, CollectionConfig, MineConfig, StageTimes};
use crate::params::{table_range, UniverseParams, DEFAULT_R_MIN};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "mode", rename_all = "lowercase")]
pub enum BenchMode {
    /// Word-parallel comparison of two batmaps built from random sets.
    Swar { set_size: usize, density: f64 },
    /// Two-finger count over two random sorted arrays.
    Merge { set_size: usize, density: f64 },
    /// Full mining run on a synthetic instance.
    Pipeline {
        items: usize,
        density: f64,
        total: usize,
        tile_size: usize,
    },
}

#[derive(Debug, Clone, Serialize)]
pub struct BenchReport {
    pub operation: &'static str,
    pub input: BenchMode,
    pub threads: usize,
    pub repetitions: usize,
    pub median_seconds: f64,
    /// Bytes one thread reads per repetition.
    pub bytes_per_rep: u64,
    /// Set elements one thread handles per repetition.
    pub elements_per_rep: u64,
    pub bytes_per_second: f64,
    pub elements_per_second: f64,
    /// Workload output (intersection size or pair count), for cross-checks.
    pub result: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub stages: Option<StageTimes>,
}

impl BenchReport {
    fn from_times(
        operation: &'static str,
        input: BenchMode,
        threads: usize,
        mut times: Vec<f64>,
        bytes_per_rep: u64,
        elements_per_rep: u64,
        result: u64,
    ) -> Self {
        times.sort_by(f64::total_cmp);
        let median_seconds = median(&times);
        let scale = threads as f64 / median_seconds.max(f64::MIN_POSITIVE);
        Self {
            operation,
            input,
            threads,
            repetitions: times.len(),
            median_seconds,
            bytes_per_rep,
            elements_per_rep,
            bytes_per_second: bytes_per_rep as f64 * scale,
            elements_per_second: elements_per_rep as f64 * scale,
            result,
            stages: None,
        }
    }
}

fn median(sorted: &[f64]) -> f64 {
    match sorted.len() {
        0 => 0.0,
        n if n % 2 == 1 => sorted[n / 2],
        n => 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]),
    }
}

/// `size` distinct random values below `universe`, ascending.
pub fn random_sorted_set(rng: &mut ChaCha8Rng, universe: usize, size: usize) -> Vec<u32> {
    let mut v: Vec<u32> = sample(rng, universe, size)
        .into_iter()
        .map(|x| x as u32)
        .collect();
    v.sort_unstable();
    v
}

fn universe_for(set_size: usize, density: f64) -> Result<usize> {
    if set_size == 0 || !(density > 0.0 && density <= 1.0) {
        return Err(Error::InvalidArgument(format!(
            "need a positive set size and density in (0, 1], got {set_size} and {density}"
        )));
    }
    let universe = (set_size as f64 / density).ceil() as usize;
    if universe > u32::MAX as usize {
        return Err(Error::InvalidArgument("universe exceeds 32-bit ids".into()));
    }
    Ok(universe.max(set_size))
}

/// Two batmaps over random same-size sets, sharing one layout.
pub fn batmap_pair(set_size: usize, density: f64, seed: u64) -> Result<(BatMap, BatMap)> {
    let universe = universe_for(set_size, density)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let a = random_sorted_set(&mut rng, universe, set_size);
    let b = random_sorted_set(&mut rng, universe, set_size);
    let params = UniverseParams::derive(universe as u64 - 1, seed);
    let perms = params.permutations();
    let r = table_range(set_size, &params, DEFAULT_R_MIN);
    let config = BuildConfig {
        r,
        r0: r,
        max_loop: None,
    };
    Ok((
        build_batmap(&a, &params, &perms, config)?.batmap,
        build_batmap(&b, &params, &perms, config)?.batmap,
    ))
}

/// Runs `work` on `threads` threads at once, `reps` times; returns wall
/// times and the last result.
fn timed<F>(threads: usize, reps: usize, work: F) -> (Vec<f64>, u64)
where
    F: Fn() -> u64 + Sync,
{
    let mut times = Vec::with_capacity(reps);
    let mut result = 0;
    for _ in 0..reps {
        let clock = Instant::now();
        result = if threads == 1 {
            work()
        } else {
            thread::scope(|s| {
                let handles: Vec<_> = (0..threads).map(|_| s.spawn(&work)).collect();
                handles
                    .into_iter()
                    .map(|h| h.join().expect("bench worker"))
                    .last()
                    .unwrap_or(0)
            })
        };
        times.push(clock.elapsed().as_secs_f64());
    }
    (times, result)
}

pub fn bench_run(
    mode: BenchMode,
    threads: usize,
    repetitions: usize,
    seed: u64,
) -> Result<BenchReport> {
    if threads == 0 || repetitions == 0 {
        return Err(Error::InvalidArgument(
            "threads and repetitions must be positive".into(),
        ));
    }
    match mode {
        BenchMode::Swar { set_size, density } => {
            let (a, b) = batmap_pair(set_size, density, seed)?;
            let (times, result) = timed(threads, repetitions, || count_pair(&a, &b).unwrap_or(0));
            Ok(BenchReport::from_times(
                "batmap word compare",
                mode,
                threads,
                times,
                a.byte_len().max(b.byte_len()) as u64,
                (a.live_count() + b.live_count()) as u64,
                result,
            ))
        }
        BenchMode::Merge { set_size, density } => {
            let universe = universe_for(set_size, density)?;
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let a = random_sorted_set(&mut rng, universe, set_size);
            let b = random_sorted_set(&mut rng, universe, set_size);
            let (times, result) = timed(threads, repetitions, || merge_count(&a, &b) as u64);
            Ok(BenchReport::from_times(
                "sorted merge count",
                mode,
                threads,
                times,
                8 * set_size as u64,
                2 * set_size as u64,
                result,
            ))
        }
        BenchMode::Pipeline {
            items,
            density,
            total,
            tile_size,
        } => {
            let db = generate(items, density, total, seed)?;
            let config = MineConfig {
                tile_size,
                workers: threads,
                collection: CollectionConfig {
                    seed,
                    ..Default::default()
                },
                ..Default::default()
            };
            let mut times = Vec::with_capacity(repetitions);
            let mut last = None;
            for _ in 0..repetitions {
                let clock = Instant::now();
                let out = mine_pairs_detailed(&db, &config)?;
                times.push(clock.elapsed().as_secs_f64());
                last = Some(out);
            }
            let out = last.expect("at least one repetition");
            // one thread count of work for the whole pool, so divide it back out
            let mut report = BenchReport::from_times(
                "frequent pair mining",
                mode,
                1,
                times,
                out.collection_bytes,
                db.total_size() as u64,
                out.table.len() as u64,
            );
            report.threads = threads;
            report.stages = Some(out.times);
            Ok(report)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn swar_and_merge_agree_on_counts() {
        let swar = bench_run(
            BenchMode::Swar {
                set_size: 5000,
                density: 0.1,
            },
            1,
            3,
            4,
        )
        .unwrap();
        let merge = bench_run(
            BenchMode::Merge {
                set_size: 5000,
                density: 0.1,
            },
            1,
            3,
            4,
        )
        .unwrap();
        // same seed, same sets; no failures expected at this size
        assert_eq!(swar.result, merge.result);
        assert_eq!(swar.repetitions, 3);
        assert!(swar.bytes_per_second > 0.0 && merge.elements_per_second > 0.0);
    }

    #[test]
    fn threads_do_not_change_results() {
        let one = bench_run(
            BenchMode::Merge {
                set_size: 2000,
                density: 0.2,
            },
            1,
            2,
            1,
        )
        .unwrap();
        let four = bench_run(
            BenchMode::Merge {
                set_size: 2000,
                density: 0.2,
            },
            4,
            2,
            1,
        )
        .unwrap();
        assert_eq!(one.result, four.result);
        let one = bench_run(
            BenchMode::Swar {
                set_size: 2000,
                density: 0.2,
            },
            1,
            2,
            1,
        )
        .unwrap();
        let four = bench_run(
            BenchMode::Swar {
                set_size: 2000,
                density: 0.2,
            },
            4,
            2,
            1,
        )
        .unwrap();
        assert_eq!(one.result, four.result);
    }

    #[test]
    fn rates_follow_from_times() {
        let r = bench_run(
            BenchMode::Merge {
                set_size: 1000,
                density: 0.5,
            },
            2,
            5,
            0,
        )
        .unwrap();
        let expected = 2.0 * r.elements_per_rep as f64 / r.median_seconds;
        assert!((r.elements_per_second - expected).abs() <= 1e-9 * expected);
    }

    #[test]
    fn pipeline_reports_stages() {
        let mode = BenchMode::Pipeline {
            items: 20,
            density: 0.2,
            total: 2000,
            tile_size: 16,
        };
        let r = bench_run(mode, 2, 1, 0).unwrap();
        assert!(r.stages.is_some());
        assert_eq!(r.threads, 2);
        assert!(r.elements_per_rep >= 2000);
    }

    #[test]
    fn median_of_even_and_odd() {
        assert_eq!(median(&[1.0, 2.0, 9.0]), 2.0);
        assert_eq!(median(&[1.0, 2.0, 4.0, 9.0]), 3.0);
    }

    #[test]
    fn rejects_bad_sizes() {
        assert!(bench_run(
            BenchMode::Merge {
                set_size: 0,
                density: 0.5
            },
            1,
            1,
            0
        )
        .is_err());
        assert!(bench_run(
            BenchMode::Swar {
                set_size: 10,
                density: 0.0
            },
            1,
            1,
            0
        )
        .is_err());
        assert!(bench_run(
            BenchMode::Merge {
                set_size: 10,
                density: 0.5
            },
            0,
            1,
            0
        )
        .is_err());
    }
}
