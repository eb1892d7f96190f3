//! Frequent pair mining over batmaps.
//!
//! Transactions are inverted into tidlists, infrequent items dropped, and
//! one batmap built per remaining item (storing transaction ids). Items are
//! ordered by tidlist size so that tiles group batmaps of similar width.
//! Insertions that fail are not retried; instead every pair that lost a
//! transaction gets it back from a per-tile correction list.

use std::collections::{BTreeMap, BTreeSet};

use crate::batmap::{build_batmap, BatMap, BuildConfig};
use crate::error::{Error, Result};
use crate::intersect::{self, TileResult, DEFAULT_TILE_SIZE};
use crate::params::{table_range, Permutations, UniverseParams, DEFAULT_R_MIN};

/// Transactions over dense item ids, with the original label of each id.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct TransactionDB {
    transactions: Vec<Vec<u32>>,
    labels: Vec<u64>,
}

impl TransactionDB {
    /// Items of each transaction are sorted and deduplicated. Every id must
    /// be below `labels.len()`.
    pub fn new(mut transactions: Vec<Vec<u32>>, labels: Vec<u64>) -> Result<Self> {
        let n_items = labels.len();
        for (b, t) in transactions.iter_mut().enumerate() {
            t.sort_unstable();
            t.dedup();
            if let Some(&last) = t.last() {
                if last as usize >= n_items {
                    return Err(Error::InvalidArgument(format!(
                        "transaction {b} uses item {last}, only {n_items} items declared"
                    )));
                }
            }
        }
        Ok(Self {
            transactions,
            labels,
        })
    }

    /// Transactions over arbitrary labels; labels get dense ids in ascending
    /// order.
    pub fn from_labelled(raw: Vec<Vec<u64>>) -> Result<Self> {
        let labels: Vec<u64> = raw
            .iter()
            .flatten()
            .copied()
            .collect::<BTreeSet<u64>>()
            .into_iter()
            .collect();
        let transactions = raw
            .into_iter()
            .map(|items| {
                items
                    .into_iter()
                    .map(|l| labels.binary_search(&l).expect("label collected above") as u32)
                    .collect()
            })
            .collect();
        Self::new(transactions, labels)
    }

    /// Items labelled by their own ids.
    pub fn with_items(transactions: Vec<Vec<u32>>, n_items: usize) -> Result<Self> {
        Self::new(transactions, (0..n_items as u64).collect())
    }

    pub fn transactions(&self) -> &[Vec<u32>] {
        &self.transactions
    }

    pub fn labels(&self) -> &[u64] {
        &self.labels
    }

    pub fn n_items(&self) -> usize {
        self.labels.len()
    }

    pub fn n_transactions(&self) -> usize {
        self.transactions.len()
    }

    pub fn total_size(&self) -> usize {
        self.transactions.iter().map(Vec::len).sum()
    }
}

/// Per item, the ascending ids of the transactions containing it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VerticalIndex {
    pub tidlists: Vec<Vec<u32>>,
    pub n_transactions: usize,
}

impl VerticalIndex {
    pub fn n_items(&self) -> usize {
        self.tidlists.len()
    }

    pub fn total_size(&self) -> usize {
        self.tidlists.iter().map(Vec::len).sum()
    }

    /// Transpose back to item lists per transaction.
    pub fn horizontal(&self) -> Vec<Vec<u32>> {
        let mut rows = vec![Vec::new(); self.n_transactions];
        for (item, tids) in self.tidlists.iter().enumerate() {
            for &b in tids {
                rows[b as usize].push(item as u32);
            }
        }
        rows
    }
}

pub fn build_vertical(db: &TransactionDB) -> VerticalIndex {
    let mut tidlists = vec![Vec::new(); db.n_items()];
    for (b, items) in db.transactions().iter().enumerate() {
        for &i in items {
            tidlists[i as usize].push(b as u32);
        }
    }
    VerticalIndex {
        tidlists,
        n_transactions: db.n_transactions(),
    }
}

/// Result of dropping infrequent items: the surviving tidlists under new
/// dense ids, and `kept[new] = old`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FilteredIndex {
    pub index: VerticalIndex,
    pub kept: Vec<u32>,
}

pub fn filter_items(v: &VerticalIndex, minsup: usize) -> Result<FilteredIndex> {
    if minsup == 0 {
        return Err(Error::InvalidArgument("minsup must be at least 1".into()));
    }
    let kept: Vec<u32> = (0..v.n_items() as u32)
        .filter(|&i| v.tidlists[i as usize].len() >= minsup)
        .collect();
    let tidlists = kept
        .iter()
        .map(|&i| v.tidlists[i as usize].clone())
        .collect();
    Ok(FilteredIndex {
        index: VerticalIndex {
            tidlists,
            n_transactions: v.n_transactions,
        },
        kept,
    })
}

/// All batmaps of one mining instance, in ascending size order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BatMapCollection {
    params: UniverseParams,
    perms: Permutations,
    r0: usize,
    /// External id per sorted position (what files and CLI users see).
    item_ids: Vec<u64>,
    set_sizes: Vec<usize>,
    batmaps: Vec<BatMap>,
}

impl BatMapCollection {
    /// Assembles a collection from parts in sorted order. Used by the file
    /// reader; checks the structural invariants.
    pub fn from_parts(
        params: UniverseParams,
        r0: usize,
        item_ids: Vec<u64>,
        set_sizes: Vec<usize>,
        batmaps: Vec<BatMap>,
    ) -> Result<Self> {
        let n = batmaps.len();
        if item_ids.len() != n || set_sizes.len() != n {
            return Err(Error::InvalidArgument(
                "collection parts differ in length".into(),
            ));
        }
        if batmaps.iter().any(|b| b.superblock_range() != r0) {
            return Err(Error::InvalidArgument("batmaps disagree on r0".into()));
        }
        if batmaps.windows(2).any(|w| w[0].range() > w[1].range()) {
            return Err(Error::InvalidArgument(
                "batmaps are not sorted by width".into(),
            ));
        }
        Ok(Self {
            perms: params.permutations(),
            params,
            r0,
            item_ids,
            set_sizes,
            batmaps,
        })
    }

    pub fn params(&self) -> &UniverseParams {
        &self.params
    }

    pub fn permutations(&self) -> &Permutations {
        &self.perms
    }

    pub fn r0(&self) -> usize {
        self.r0
    }

    pub fn len(&self) -> usize {
        self.batmaps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.batmaps.is_empty()
    }

    pub fn batmaps(&self) -> &[BatMap] {
        &self.batmaps
    }

    pub fn item_ids(&self) -> &[u64] {
        &self.item_ids
    }

    pub fn set_sizes(&self) -> &[usize] {
        &self.set_sizes
    }

    pub fn position_of_id(&self, id: u64) -> Option<usize> {
        self.item_ids.iter().position(|&x| x == id)
    }

    /// Total entry bytes, `sum of 3 * r_i`.
    pub fn byte_size(&self) -> u64 {
        self.batmaps.iter().map(|b| b.byte_len() as u64).sum()
    }
}

#[derive(Debug, Clone, Copy)]
pub struct CollectionConfig {
    pub seed: u64,
    pub r_min: usize,
    pub max_loop: Option<u32>,
    /// Upper bound on `sum of 3 * r_i`, checked before anything is built.
    pub memory_budget: Option<u64>,
}

impl Default for CollectionConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            r_min: DEFAULT_R_MIN,
            max_loop: None,
            memory_budget: None,
        }
    }
}

/// A failed insertion: transaction `tid` is missing from item `item`'s
/// batmap (index-space item id).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Failure {
    pub item: u32,
    pub tid: u32,
}

#[derive(Debug, Clone)]
pub struct CollectionBuild {
    pub collection: BatMapCollection,
    /// `order[pos]` is the input item stored at sorted position `pos`.
    pub order: Vec<u32>,
    /// Inverse of `order`.
    pub rank: Vec<u32>,
    pub failures: Vec<Failure>,
    pub move_count: u64,
}

/// Builds one batmap per tidlist. `item_ids[i]` is the external id recorded
/// for item `i`.
pub fn build_collection(
    v: &VerticalIndex,
    item_ids: &[u64],
    config: CollectionConfig,
) -> Result<CollectionBuild> {
    if item_ids.len() != v.n_items() {
        return Err(Error::InvalidArgument(
            "one external id per item is required".into(),
        ));
    }
    if !config.r_min.is_power_of_two() || config.r_min < 4 {
        return Err(Error::InvalidArgument(format!(
            "r_min must be a power of two >= 4, got {}",
            config.r_min
        )));
    }
    let max_id = v.n_transactions.saturating_sub(1) as u64;
    let params = UniverseParams::derive(max_id, config.seed);
    let perms = params.permutations();

    let mut order: Vec<u32> = (0..v.n_items() as u32).collect();
    order.sort_by_key(|&i| (v.tidlists[i as usize].len(), i));
    let mut rank = vec![0u32; order.len()];
    for (pos, &i) in order.iter().enumerate() {
        rank[i as usize] = pos as u32;
    }

    let ranges: Vec<usize> = order
        .iter()
        .map(|&i| table_range(v.tidlists[i as usize].len(), &params, config.r_min))
        .collect();
    let required: u64 = ranges.iter().map(|&r| 3 * r as u64).sum();
    if let Some(budget) = config.memory_budget {
        if required > budget {
            return Err(Error::Resource { required, budget });
        }
    }
    let r0 = ranges.iter().copied().min().unwrap_or(config.r_min);

    let mut batmaps = Vec::with_capacity(order.len());
    let mut failures = Vec::new();
    let mut move_count = 0;
    for (&item, &r) in order.iter().zip(&ranges) {
        let out = build_batmap(
            &v.tidlists[item as usize],
            &params,
            &perms,
            BuildConfig {
                r,
                r0,
                max_loop: config.max_loop,
            },
        )?;
        failures.extend(out.failed.iter().map(|&tid| Failure { item, tid }));
        move_count += out.move_count;
        batmaps.push(out.batmap);
    }

    let collection = BatMapCollection {
        params,
        perms,
        r0,
        item_ids: order.iter().map(|&i| item_ids[i as usize]).collect(),
        set_sizes: order
            .iter()
            .map(|&i| v.tidlists[i as usize].len())
            .collect(),
        batmaps,
    };
    Ok(CollectionBuild {
        collection,
        order,
        rank,
        failures,
        move_count,
    })
}

/// A transaction to add back to a pair, in sorted collection coordinates
/// (`a < c`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Correction {
    pub a: u32,
    pub c: u32,
    pub tid: u32,
}

/// Failed insertions and the per-tile corrections derived from them.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct FallbackLedger {
    pub failures: Vec<Failure>,
    /// Keyed by tile `(p, q)`; each list is sorted and duplicate-free.
    pub tiles: BTreeMap<(usize, usize), Vec<Correction>>,
}

impl FallbackLedger {
    pub fn corrections(&self, p: usize, q: usize) -> &[Correction] {
        self.tiles.get(&(p, q)).map_or(&[], Vec::as_slice)
    }

    pub fn correction_count(&self) -> usize {
        self.tiles.values().map(Vec::len).sum()
    }
}

/// For every failure of transaction `b` in item `a` and every other item
/// `c` of `b`, records `(min, max, b)` in sorted coordinates under tile
/// `(min / k, max / k)`. `rank` maps input items to sorted positions.
pub fn build_corrections(
    failures: &[Failure],
    v: &VerticalIndex,
    k: usize,
    rank: &[u32],
) -> FallbackLedger {
    let mut tiles: BTreeMap<(usize, usize), Vec<Correction>> = BTreeMap::new();
    if !failures.is_empty() {
        let mut by_tid: BTreeMap<u32, Vec<u32>> = BTreeMap::new();
        for f in failures {
            by_tid.entry(f.tid).or_default().push(f.item);
        }
        let mut members: BTreeMap<u32, Vec<u32>> =
            by_tid.keys().map(|&b| (b, Vec::new())).collect();
        for (item, tids) in v.tidlists.iter().enumerate() {
            for b in tids {
                if let Some(list) = members.get_mut(b) {
                    list.push(item as u32);
                }
            }
        }
        for (b, failed_items) in &by_tid {
            for &a in failed_items {
                let ra = rank[a as usize];
                for &c in &members[b] {
                    if c == a {
                        continue;
                    }
                    let rc = rank[c as usize];
                    let (lo, hi) = (ra.min(rc), ra.max(rc));
                    tiles
                        .entry((lo as usize / k, hi as usize / k))
                        .or_default()
                        .push(Correction {
                            a: lo,
                            c: hi,
                            tid: *b,
                        });
                }
            }
        }
        for list in tiles.values_mut() {
            list.sort_unstable();
            list.dedup();
        }
    }
    FallbackLedger {
        failures: failures.to_vec(),
        tiles,
    }
}

/// Adds the tile's corrections into its counts.
pub fn apply_corrections(tile: &mut TileResult, ledger: &FallbackLedger) {
    let (row0, col0) = (tile.p * tile.k, tile.q * tile.k);
    for corr in ledger.corrections(tile.p, tile.q) {
        *tile.get_mut(corr.a as usize - row0, corr.c as usize - col0) += 1;
    }
}

/// Pairs with their support, keyed by original item labels (`item_a < item_b`).
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct PairSupportTable {
    pub entries: Vec<(u64, u64, u64)>,
}

impl PairSupportTable {
    /// Normalizes each pair to `a < b` and sorts.
    pub fn from_unordered(mut entries: Vec<(u64, u64, u64)>) -> Self {
        for e in &mut entries {
            if e.0 > e.1 {
                std::mem::swap(&mut e.0, &mut e.1);
            }
        }
        entries.sort_unstable();
        Self { entries }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, a: u64, b: u64) -> Option<u64> {
        let key = (a.min(b), a.max(b));
        self.entries
            .binary_search_by(|e| (e.0, e.1).cmp(&key))
            .ok()
            .map(|i| self.entries[i].2)
    }

    /// Keeps entries with support at least `threshold`.
    pub fn thresholded(&self, threshold: u64) -> Self {
        Self {
            entries: self
                .entries
                .iter()
                .copied()
                .filter(|e| e.2 >= threshold)
                .collect(),
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct MineConfig {
    pub minsup: usize,
    pub pair_threshold: u64,
    pub tile_size: usize,
    pub workers: usize,
    pub collection: CollectionConfig,
    /// Report every pair of frequent items, including zero support,
    /// instead of thresholding.
    pub emit_all: bool,
}

impl Default for MineConfig {
    fn default() -> Self {
        Self {
            minsup: 1,
            pair_threshold: 1,
            tile_size: DEFAULT_TILE_SIZE,
            workers: 1,
            collection: CollectionConfig::default(),
            emit_all: false,
        }
    }
}

/// Wall time of each pipeline stage, in seconds.
#[derive(Debug, Clone, Copy, Default, PartialEq, serde::Serialize)]
pub struct StageTimes {
    pub vertical: f64,
    pub build: f64,
    pub corrections: f64,
    pub count: f64,
}

#[derive(Debug, Clone)]
pub struct MineOutcome {
    pub table: PairSupportTable,
    pub failures: usize,
    pub corrections: usize,
    pub collection_bytes: u64,
    pub times: StageTimes,
}

pub fn mine_pairs(db: &TransactionDB, config: &MineConfig) -> Result<PairSupportTable> {
    mine_pairs_detailed(db, config).map(|o| o.table)
}

pub fn mine_pairs_detailed(db: &TransactionDB, config: &MineConfig) -> Result<MineOutcome> {
    use std::time::Instant;

    if config.pair_threshold == 0 {
        return Err(Error::InvalidArgument(
            "pair threshold must be at least 1".into(),
        ));
    }
    let mut times = StageTimes::default();

    let clock = Instant::now();
    let filtered = filter_items(&build_vertical(db), config.minsup)?;
    times.vertical = clock.elapsed().as_secs_f64();

    let clock = Instant::now();
    let labels: Vec<u64> = filtered
        .kept
        .iter()
        .map(|&i| db.labels()[i as usize])
        .collect();
    let built = build_collection(&filtered.index, &labels, config.collection)?;
    let collection = &built.collection;
    times.build = clock.elapsed().as_secs_f64();

    let clock = Instant::now();
    let ledger = build_corrections(
        &built.failures,
        &filtered.index,
        config.tile_size,
        &built.rank,
    );
    times.corrections = clock.elapsed().as_secs_f64();

    let clock = Instant::now();
    let threshold = if config.emit_all {
        0
    } else {
        config.pair_threshold
    };
    let ids = collection.item_ids();
    let mut entries = Vec::new();
    intersect::for_each_tile(collection, config.tile_size, config.workers, |mut tile| {
        apply_corrections(&mut tile, &ledger);
        entries.extend(
            tile.cells()
                .filter(|&(_, _, n)| u64::from(n) >= threshold)
                .map(|(i, j, n)| (ids[i], ids[j], u64::from(n))),
        );
        Ok(())
    })?;
    times.count = clock.elapsed().as_secs_f64();

    Ok(MineOutcome {
        table: PairSupportTable::from_unordered(entries),
        failures: built.failures.len(),
        corrections: ledger.correction_count(),
        collection_bytes: collection.byte_size(),
        times,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::baselines::oracle_pair_supports;

    fn db(rows: &[&[u32]], n_items: usize) -> TransactionDB {
        TransactionDB::with_items(rows.iter().map(|r| r.to_vec()).collect(), n_items).unwrap()
    }

    #[test]
    fn vertical_examples() {
        let v = build_vertical(&db(&[&[0, 1], &[1]], 2));
        assert_eq!(v.tidlists, vec![vec![0], vec![0, 1]]);
        let empty = build_vertical(&db(&[], 3));
        assert!(empty.tidlists.iter().all(Vec::is_empty));
        assert_eq!(empty.n_transactions, 0);
    }

    #[test]
    fn transaction_db_validates() {
        assert!(TransactionDB::with_items(vec![vec![3]], 3).is_err());
        let d = TransactionDB::with_items(vec![vec![2, 0, 2]], 3).unwrap();
        assert_eq!(d.transactions()[0], vec![0, 2]);
        assert_eq!(d.total_size(), 2);
    }

    #[test]
    fn filter_examples() {
        let v = VerticalIndex {
            tidlists: vec![vec![0, 1, 2, 3, 4], vec![0, 1], vec![0, 1, 2, 3, 4, 5, 6]],
            n_transactions: 7,
        };
        let f = filter_items(&v, 3).unwrap();
        assert_eq!(f.kept, vec![0, 2]);
        assert_eq!(f.index.tidlists[1].len(), 7);
        let all = filter_items(&v, 1).unwrap();
        assert_eq!(all.index, v);
        assert!(filter_items(&v, 0).is_err());
    }

    #[test]
    fn collection_order_and_sizes() {
        let v = VerticalIndex {
            tidlists: vec![(0..9).collect(), (0..3).collect(), (0..6).collect()],
            n_transactions: 9,
        };
        let built = build_collection(&v, &[10, 11, 12], CollectionConfig::default()).unwrap();
        let c = &built.collection;
        assert_eq!(built.order, vec![1, 2, 0]);
        assert_eq!(c.item_ids(), &[11, 12, 10]);
        assert_eq!(built.rank[0], 2);
        let stored: usize = c.batmaps().iter().map(|b| b.live_count()).sum();
        assert_eq!(stored + built.failures.len(), 18);
    }

    #[test]
    fn single_item_collection() {
        let v = VerticalIndex {
            tidlists: vec![(0..100).collect()],
            n_transactions: 100,
        };
        let built = build_collection(
            &v,
            &[0],
            CollectionConfig {
                seed: 3,
                ..Default::default()
            },
        )
        .unwrap();
        assert_eq!(built.collection.batmaps()[0].range(), 256);
        assert_eq!(built.collection.r0(), 256);
        assert!(built.failures.is_empty());
    }

    #[test]
    fn memory_budget_enforced() {
        let d = db(&[&[0, 1], &[0, 1], &[1]], 2);
        let config = MineConfig {
            collection: CollectionConfig {
                memory_budget: Some(100),
                ..Default::default()
            },
            ..Default::default()
        };
        assert!(matches!(
            mine_pairs(&d, &config),
            Err(Error::Resource {
                required: 384,
                budget: 100
            })
        ));
    }

    #[test]
    fn correction_triples() {
        // items 0..4 all in transaction 0; item 1 failed there.
        let v = VerticalIndex {
            tidlists: vec![vec![0], vec![0], vec![0, 1], vec![0, 1, 2]],
            n_transactions: 3,
        };
        let built = build_collection(&v, &[0, 1, 2, 3], CollectionConfig::default()).unwrap();
        let rank = &built.rank;
        let fails = [Failure { item: 1, tid: 0 }];
        let ledger = build_corrections(&fails, &v, 16, rank);
        let got = ledger.corrections(0, 0);
        assert_eq!(got.len(), 3);
        assert!(got.iter().all(|t| t.tid == 0));
        let r1 = rank[1];
        for other in [0u32, 2, 3] {
            let ro = rank[other as usize];
            assert!(got.contains(&Correction {
                a: r1.min(ro),
                c: r1.max(ro),
                tid: 0
            }));
        }

        // both endpoints failed for the same transaction: one triple.
        let fails = [Failure { item: 1, tid: 0 }, Failure { item: 2, tid: 0 }];
        let ledger = build_corrections(&fails, &v, 16, rank);
        assert_eq!(ledger.correction_count(), 5);
    }

    #[test]
    fn corrections_land_in_right_tile() {
        let n = 40;
        let v = VerticalIndex {
            tidlists: (0..n).map(|i| (0..=i as u32).collect()).collect(),
            n_transactions: n,
        };
        let ids: Vec<u64> = (0..n as u64).collect();
        let built = build_collection(&v, &ids, CollectionConfig::default()).unwrap();
        let fails = [Failure { item: 39, tid: 0 }];
        let ledger = build_corrections(&fails, &v, 16, &built.rank);
        for (&(p, q), list) in &ledger.tiles {
            assert!(p <= q);
            for t in list {
                assert_eq!((t.a as usize / 16, t.c as usize / 16), (p, q));
            }
        }
        assert_eq!(ledger.correction_count(), 39);
    }

    #[test]
    fn mine_small_example() {
        let d = db(&[&[0, 1], &[0, 1], &[1]], 2);
        let config = MineConfig {
            pair_threshold: 2,
            tile_size: 16,
            ..Default::default()
        };
        let table = mine_pairs(&d, &config).unwrap();
        assert_eq!(table.entries, vec![(0, 1, 2)]);
        let config = MineConfig {
            pair_threshold: 4,
            ..config
        };
        assert!(mine_pairs(&d, &config).unwrap().is_empty());
    }

    #[test]
    fn emit_all_includes_zero_pairs() {
        let d = db(&[&[0, 1], &[2]], 3);
        let config = MineConfig {
            tile_size: 16,
            emit_all: true,
            ..Default::default()
        };
        let table = mine_pairs(&d, &config).unwrap();
        assert_eq!(table.entries, vec![(0, 1, 1), (0, 2, 0), (1, 2, 0)]);
    }

    #[test]
    fn labels_pass_through() {
        let d =
            TransactionDB::new(vec![vec![0, 1], vec![0, 1], vec![1, 2]], vec![70, 9, 500]).unwrap();
        let config = MineConfig {
            tile_size: 16,
            ..Default::default()
        };
        let table = mine_pairs(&d, &config).unwrap();
        assert_eq!(table.entries, vec![(9, 70, 2), (9, 500, 1)]);
    }

    #[test]
    fn minsup_filters_but_keeps_supports() {
        let d = db(&[&[0, 1, 2], &[0, 1], &[0], &[1, 3]], 4);
        let all = mine_pairs(
            &d,
            &MineConfig {
                tile_size: 16,
                ..Default::default()
            },
        )
        .unwrap();
        let filtered = mine_pairs(
            &d,
            &MineConfig {
                minsup: 3,
                tile_size: 16,
                ..Default::default()
            },
        )
        .unwrap();
        assert_eq!(filtered.entries, vec![(0, 1, 2)]);
        assert_eq!(all.get(0, 1), Some(2));
    }

    #[test]
    fn forced_failures_are_corrected() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        let rows: Vec<Vec<u32>> = (0..400)
            .map(|_| (0..30).filter(|_| rng.random_bool(0.3)).collect())
            .collect();
        let d = TransactionDB::with_items(rows, 30).unwrap();
        let oracle = oracle_pair_supports(&build_vertical(&d));
        for max_loop in [Some(0), Some(1), None] {
            let config = MineConfig {
                tile_size: 16,
                collection: CollectionConfig {
                    seed: 9,
                    max_loop,
                    ..Default::default()
                },
                ..Default::default()
            };
            let out = mine_pairs_detailed(&d, &config).unwrap();
            if max_loop == Some(0) {
                assert_eq!(out.failures, d.total_size());
            }
            assert_eq!(out.table, oracle);
        }
    }
}
