//! BatMap: sets stored in two of three hash-addressed tables, one byte per
//! slot, so that the size of any pairwise intersection can be counted by a
//! fixed, branch-free word-by-word comparison.
//!
//! The crate covers construction ([`batmap`]), counting ([`intersect`]),
//! frequent pair mining with exact fallback corrections ([`mining`]),
//! reference baselines ([`baselines`]), file formats ([`io`]) and a
//! benchmark harness ([`bench`]).

pub mod baselines;
pub mod batmap;
pub mod bench;
pub mod error;
pub mod intersect;
pub mod io;
pub mod mining;
pub mod params;

pub use batmap::{build_batmap, BatMap, BuildConfig, BuildOutcome};
pub use error::{Error, FormatError, Result};
pub use intersect::{count_all, count_pair, count_tile, swar_compare, TileResult};
pub use mining::{
    build_collection, build_vertical, mine_pairs, mine_pairs_detailed, BatMapCollection,
    CollectionConfig, MineConfig, PairSupportTable, TransactionDB, VerticalIndex,
};
pub use params::{table_range, MixingPermutation, Permutations, UniverseParams};
