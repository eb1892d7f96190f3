//! Comparison points for batmap counting: sorted-list merging, dense
//! bitmaps, and brute-force pair supports used as test oracles.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::mining::{PairSupportTable, TransactionDB, VerticalIndex};

/// Strictly increasing list of transaction ids.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SortedList(Vec<u32>);

impl SortedList {
    pub fn new(values: Vec<u32>) -> Result<Self> {
        if let Some(i) = values.windows(2).position(|w| w[0] >= w[1]) {
            return Err(Error::InvalidArgument(format!(
                "list is not strictly increasing at index {}",
                i + 1
            )));
        }
        Ok(Self(values))
    }

    pub fn as_slice(&self) -> &[u32] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn intersect_count(&self, other: &SortedList) -> usize {
        merge_count(&self.0, &other.0)
    }
}

/// `|a ∩ b|` by a two-finger scan. Both inputs must be strictly increasing;
/// use [`SortedList`] for a checked entry point.
pub fn merge_count(a: &[u32], b: &[u32]) -> usize {
    let (mut i, mut j, mut count) = (0, 0, 0);
    while i < a.len() && j < b.len() {
        let (x, y) = (a[i], b[j]);
        if x < y {
            i += 1;
        } else if y < x {
            j += 1;
        } else {
            count += 1;
            i += 1;
            j += 1;
        }
    }
    count
}

/// One bit per transaction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DenseBitmap {
    blocks: Vec<u64>,
    len: usize,
}

impl DenseBitmap {
    pub fn new(len: usize) -> Self {
        Self {
            blocks: vec![0; len.div_ceil(64)],
            len,
        }
    }

    pub fn from_ids(len: usize, ids: &[u32]) -> Result<Self> {
        let mut bitmap = Self::new(len);
        for &id in ids {
            if id as usize >= len {
                return Err(Error::InvalidArgument(format!(
                    "id {id} beyond bitmap length {len}"
                )));
            }
            bitmap.blocks[id as usize / 64] |= 1 << (id % 64);
        }
        Ok(bitmap)
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn count_ones(&self) -> usize {
        self.blocks.iter().map(|b| b.count_ones() as usize).sum()
    }
}

pub fn bitmap_count(a: &DenseBitmap, b: &DenseBitmap) -> Result<usize> {
    if a.len != b.len {
        return Err(Error::InvalidArgument(format!(
            "bitmap lengths differ: {} vs {}",
            a.len, b.len
        )));
    }
    Ok(a.blocks
        .iter()
        .zip(&b.blocks)
        .map(|(x, y)| (x & y).count_ones() as usize)
        .sum())
}

/// Support of every item pair with nonzero support, by merging tidlists.
/// Items are identified by their index in `v`.
pub fn oracle_pair_supports(v: &VerticalIndex) -> PairSupportTable {
    let mut entries = Vec::new();
    for a in 0..v.n_items() {
        for b in a + 1..v.n_items() {
            let n = merge_count(&v.tidlists[a], &v.tidlists[b]);
            if n > 0 {
                entries.push((a as u64, b as u64, n as u64));
            }
        }
    }
    PairSupportTable { entries }
}

/// Second oracle: counts item pairs transaction by transaction. Keys are
/// the database's item labels.
pub fn horizontal_pair_supports(db: &TransactionDB) -> PairSupportTable {
    let mut counts: HashMap<(u32, u32), u64> = HashMap::new();
    for t in db.transactions() {
        for (x, &a) in t.iter().enumerate() {
            for &b in &t[x + 1..] {
                *counts.entry((a, b)).or_default() += 1;
            }
        }
    }
    let labels = db.labels();
    PairSupportTable::from_unordered(
        counts
            .into_iter()
            .map(|((a, b), n)| (labels[a as usize], labels[b as usize], n))
            .collect(),
    )
}
