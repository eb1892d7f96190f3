//! Intersection counting between batmaps.
//!
//! Two batmaps of one collection are compared word by word. The larger one
//! is scanned in full; each of its superblocks lines up with superblock
//! `g mod (r_small / r0)` of the smaller one, so the pairing is a plain
//! zip over contiguous word runs.

use std::collections::BTreeMap;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::mpsc;
use std::thread;

use crate::batmap::BatMap;
use crate::error::{Error, Result};
use crate::mining::BatMapCollection;

const HIGH_BITS: u32 = 0x8080_8080;
const LOW_ONES: u32 = 0x0101_0101;

/// Batmaps per side of a micro-tile.
pub const MICRO_TILE: usize = 16;
/// Words per batmap per staging step.
pub const SLICE_WORDS: usize = 16;
pub const DEFAULT_TILE_SIZE: usize = 2048;

/// Number of byte lanes where the low 7 bits agree and at least one of the
/// two indicator bits is set. Branch-free.
#[inline(always)]
pub fn swar_compare(x: u32, y: u32) -> u32 {
    let p = ((x ^ y) | HIGH_BITS).wrapping_sub(LOW_ONES);
    let p = (p ^ 0xFFFF_FFFF) & ((x | y) & HIGH_BITS);
    ((p >> 7) + (p >> 15) + (p >> 23) + (p >> 31)) & 7
}

/// Maps a byte index of a batmap with range `r_large` onto the batmap with
/// range `r_small`, keeping the table and offset inside the superblock.
pub fn align_position(p: usize, r_small: usize, r_large: usize, r0: usize) -> usize {
    debug_assert!(r0 <= r_small && r_small <= r_large);
    let superblock = 3 * r0;
    let group = p / superblock;
    let offset = p % superblock;
    superblock * (group % (r_small / r0)) + offset
}

#[inline]
fn zip_count(large: &[u32], small: &[u32]) -> u32 {
    large
        .iter()
        .zip(small)
        .map(|(&x, &y)| swar_compare(x, y))
        .sum()
}

#[inline]
fn slice_count(large: &[u32; SLICE_WORDS], small: &[u32; SLICE_WORDS]) -> u32 {
    let mut total = 0;
    for lane in 0..SLICE_WORDS {
        total += swar_compare(large[lane], small[lane]);
    }
    total
}

/// Sum of `swar_compare` over words `start..end` of `large`, each paired with
/// its aligned word in `small`.
///
/// Superblock `g` of the larger batmap pairs with superblock
/// `g mod (r_small / r0)` at the same offset, which for word index `w` is
/// simply word `w mod small.len()`.
#[inline]
fn count_span(large: &[u32], small: &[u32], start: usize, end: usize) -> u32 {
    let mut total = 0;
    let mut pos = start;
    while pos < end {
        let aligned = pos % small.len();
        let len = (end - pos).min(small.len() - aligned);
        total += zip_count(&large[pos..pos + len], &small[aligned..aligned + len]);
        pos += len;
    }
    total
}

fn ordered<'a>(a: &'a BatMap, b: &'a BatMap) -> (&'a BatMap, &'a BatMap) {
    if a.range() >= b.range() {
        (a, b)
    } else {
        (b, a)
    }
}

/// Number of elements stored in both batmaps. Argument order is irrelevant.
pub fn count_pair(a: &BatMap, b: &BatMap) -> Result<u64> {
    if a.layout_key() != b.layout_key() {
        return Err(Error::Mismatch(format!(
            "layouts {:?} and {:?}",
            a.layout_key(),
            b.layout_key()
        )));
    }
    Ok(count_pair_unchecked(a, b))
}

pub(crate) fn count_pair_unchecked(a: &BatMap, b: &BatMap) -> u64 {
    let (large, small) = ordered(a, b);
    // each chunk stays far below u32 overflow
    large
        .words()
        .chunks(small.words().len())
        .map(|chunk| u64::from(zip_count(chunk, small.words())))
        .sum()
}

/// Staging state of one batmap pair inside a micro-tile.
struct PairCursor<'a> {
    large: &'a [u32],
    small: &'a [u32],
    /// Word of `small` aligned with the current slice start.
    aligned: usize,
    cell: usize,
}

impl PairCursor<'_> {
    /// Counts the slice of `large` starting at word `w`; slices must be
    /// visited in order.
    #[inline]
    fn step(&mut self, w: usize) -> u32 {
        if w >= self.large.len() {
            return 0;
        }
        let end = w + SLICE_WORDS;
        let n = if end <= self.large.len() && self.aligned + SLICE_WORDS <= self.small.len() {
            let large = self.large[w..end].try_into().expect("slice length");
            let small = self.small[self.aligned..self.aligned + SLICE_WORDS]
                .try_into()
                .expect("slice length");
            slice_count(large, small)
        } else {
            count_span(self.large, self.small, w, end.min(self.large.len()))
        };
        self.aligned += SLICE_WORDS;
        if self.aligned >= self.small.len() {
            self.aligned = end % self.small.len();
        }
        n
    }
}

/// One `k x k` block of the all-pairs count matrix, rows `p*k..` against
/// columns `q*k..` in size-sorted order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TileResult {
    pub p: usize,
    pub q: usize,
    pub k: usize,
    pub rows: usize,
    pub cols: usize,
    /// Row-major `rows x cols`. On diagonal tiles only `j > i` is filled.
    pub counts: Vec<u32>,
}

impl TileResult {
    pub fn get(&self, i: usize, j: usize) -> u32 {
        self.counts[i * self.cols + j]
    }

    pub fn get_mut(&mut self, i: usize, j: usize) -> &mut u32 {
        &mut self.counts[i * self.cols + j]
    }

    pub fn is_diagonal(&self) -> bool {
        self.p == self.q
    }

    /// Iterates `(row, col, count)` over the meaningful cells, in sorted
    /// collection coordinates.
    pub fn cells(&self) -> impl Iterator<Item = (usize, usize, u32)> + '_ {
        let (row0, col0) = (self.p * self.k, self.q * self.k);
        (0..self.rows).flat_map(move |i| {
            let first = if self.is_diagonal() { i + 1 } else { 0 };
            (first..self.cols).map(move |j| (row0 + i, col0 + j, self.get(i, j)))
        })
    }
}

/// Counts tile `(p, q)` with edge `k`. Work is staged in 16 x 16 batmap
/// micro-tiles, advancing 16 words per batmap per step.
pub fn count_tile(
    collection: &BatMapCollection,
    p: usize,
    q: usize,
    k: usize,
) -> Result<TileResult> {
    let n = collection.len();
    if k == 0 || p > q || q * k >= n {
        return Err(Error::InvalidArgument(format!(
            "tile ({p}, {q}) with k = {k} is outside {n} batmaps"
        )));
    }
    let batmaps = collection.batmaps();
    let row_range = p * k..(p * k + k).min(n);
    let col_range = q * k..(q * k + k).min(n);
    let rows = row_range.len();
    let cols = col_range.len();
    let diagonal = p == q;
    let mut counts = vec![0u32; rows * cols];
    let mut pairs: Vec<PairCursor> = Vec::with_capacity(MICRO_TILE * MICRO_TILE);

    for bi in (0..rows).step_by(MICRO_TILE) {
        let bi_end = (bi + MICRO_TILE).min(rows);
        for bj in (0..cols).step_by(MICRO_TILE) {
            let bj_end = (bj + MICRO_TILE).min(cols);
            if diagonal && bj_end <= bi + 1 {
                continue;
            }
            pairs.clear();
            for i in bi..bi_end {
                let j_start = if diagonal { bj.max(i + 1) } else { bj };
                for j in j_start..bj_end {
                    let (large, small) =
                        ordered(&batmaps[row_range.start + i], &batmaps[col_range.start + j]);
                    pairs.push(PairCursor {
                        large: large.words(),
                        small: small.words(),
                        aligned: 0,
                        cell: i * cols + j,
                    });
                }
            }
            let widest = pairs.iter().map(|c| c.large.len()).max().unwrap_or(0);
            for w in (0..widest).step_by(SLICE_WORDS) {
                for cursor in pairs.iter_mut() {
                    counts[cursor.cell] += cursor.step(w);
                }
            }
        }
    }

    Ok(TileResult {
        p,
        q,
        k,
        rows,
        cols,
        counts,
    })
}

/// Tile coordinates `(p, q)` with `p <= q`, lexicographic.
pub fn tile_coordinates(n: usize, k: usize) -> Vec<(usize, usize)> {
    let tiles = n.div_ceil(k);
    (0..tiles)
        .flat_map(|p| (p..tiles).map(move |q| (p, q)))
        .collect()
}

/// Counts every tile with `p <= q` on `workers` threads and hands each one
/// to `sink` in lexicographic `(p, q)` order.
pub fn for_each_tile<F>(
    collection: &BatMapCollection,
    k: usize,
    workers: usize,
    mut sink: F,
) -> Result<()>
where
    F: FnMut(TileResult) -> Result<()>,
{
    if k < MICRO_TILE {
        return Err(Error::InvalidArgument(format!(
            "tile size {k} is below {MICRO_TILE}"
        )));
    }
    if workers == 0 {
        return Err(Error::InvalidArgument(
            "worker count must be positive".into(),
        ));
    }
    let coords = tile_coordinates(collection.len(), k);
    if workers == 1 || coords.len() <= 1 {
        for &(p, q) in &coords {
            sink(count_tile(collection, p, q, k)?)?;
        }
        return Ok(());
    }

    let next = AtomicUsize::new(0);
    thread::scope(|scope| {
        let (tx, rx) = mpsc::channel::<(usize, Result<TileResult>)>();
        for _ in 0..workers.min(coords.len()) {
            let tx = tx.clone();
            let next = &next;
            let coords = &coords;
            scope.spawn(move || loop {
                let idx = next.fetch_add(1, Ordering::Relaxed);
                let Some(&(p, q)) = coords.get(idx) else {
                    break;
                };
                if tx.send((idx, count_tile(collection, p, q, k))).is_err() {
                    break;
                }
            });
        }
        drop(tx);

        let mut pending = BTreeMap::new();
        let mut emit = 0;
        for (idx, tile) in rx {
            pending.insert(idx, tile);
            while let Some(tile) = pending.remove(&emit) {
                if let Err(e) = tile.and_then(&mut sink) {
                    // stop handing out work; running tiles finish and are dropped
                    next.store(coords.len(), Ordering::Relaxed);
                    return Err(e);
                }
                emit += 1;
            }
        }
        Ok(())
    })
}

/// Every tile with `p <= q`, in lexicographic order.
pub fn count_all(
    collection: &BatMapCollection,
    k: usize,
    workers: usize,
) -> Result<Vec<TileResult>> {
    let mut out = Vec::new();
    for_each_tile(collection, k, workers, |tile| {
        out.push(tile);
        Ok(())
    })?;
    Ok(out)
}
