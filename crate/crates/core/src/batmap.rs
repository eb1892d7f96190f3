//! Construction of a single batmap.
//!
//! Every element is placed in two of three tables by a cuckoo procedure
//! that walks the tables in the cyclic order 1, 2, 3, 1, ... Placement runs
//! on an uncompressed shadow array of element indices; only after the
//! whole set has settled are slots encoded into bytes.
//!
//! Byte layout for a batmap with table range `r` inside a collection whose
//! smallest range is `r0`: `r / r0` superblocks of `3 * r0` bytes, each
//! holding `r0` slots of table 1, then table 2, then table 3.

use crate::error::{Error, Result};
use crate::params::{Permutations, UniverseParams};

/// Entry byte of a vacant slot.
pub const NULL_ENTRY: u8 = 0x7F;
pub const NULL_WORD: u32 = 0x7F7F_7F7F;

const VACANT: u32 = u32::MAX;

/// Byte index of the slot for permuted value `v` in table `t` (1-based).
#[inline]
pub fn slot_position(r: usize, r0: usize, t: u8, v: u64) -> usize {
    debug_assert!(r0 <= r && r.is_multiple_of(r0));
    let in_range = (v as usize) & (r - 1);
    3 * r0 * (in_range / r0) + (usize::from(t) - 1) * r0 + (in_range & (r0 - 1))
}

/// Indicator bit for a copy in table `t_self` whose sibling lives in
/// `t_other`: set iff the sibling's table immediately precedes this one in
/// the cycle 1 -> 2 -> 3 -> 1.
pub fn indicator_bit(t_self: u8, t_other: u8) -> Result<u8> {
    if !(1..=3).contains(&t_self) || !(1..=3).contains(&t_other) || t_self == t_other {
        return Err(Error::InvalidArgument(format!(
            "indicator bit needs two distinct tables in 1..=3, got ({t_self}, {t_other})"
        )));
    }
    Ok(u8::from((t_self + 3 - t_other) % 3 == 1))
}

pub fn encode_entry(code: u8, bit: u8) -> Result<u8> {
    if code > 126 {
        return Err(Error::InvalidArgument(format!(
            "code {code} is reserved or out of range"
        )));
    }
    if bit > 1 {
        return Err(Error::InvalidArgument(format!("indicator bit {bit}")));
    }
    Ok((bit << 7) | code)
}

/// Working state of the cuckoo procedure: three tables of `r` slots each,
/// holding indices into a caller-owned element list.
#[derive(Debug, Clone)]
pub struct CuckooTables {
    r: usize,
    slots: Vec<u32>,
    moves: u64,
}

impl CuckooTables {
    pub fn new(r: usize) -> Self {
        Self {
            r,
            slots: vec![VACANT; 3 * r],
            moves: 0,
        }
    }

    pub fn range(&self) -> usize {
        self.r
    }

    /// Occupant of slot `pos` of table `t` (0-based table index).
    pub fn occupant(&self, t: usize, pos: usize) -> Option<u32> {
        let v = self.slots[t * self.r + pos];
        (v != VACANT).then_some(v)
    }

    /// Number of swaps so far that evicted an occupant.
    pub fn moves(&self) -> u64 {
        self.moves
    }

    /// Inserts one copy of element `x`. `positions[e][t]` is the slot of
    /// element `e` in table `t` (0-based). Returns `None` once a vacant slot
    /// absorbs the nestless element, or the element still nestless after
    /// `max_loop` rounds.
    pub fn insert(&mut self, positions: &[[u32; 3]], x: u32, max_loop: u32) -> Option<u32> {
        let mut nestless = x;
        for _ in 0..max_loop {
            for t in 0..3 {
                let slot = t * self.r + positions[nestless as usize][t] as usize;
                std::mem::swap(&mut nestless, &mut self.slots[slot]);
                if nestless == VACANT {
                    return None;
                }
                self.moves += 1;
            }
        }
        Some(nestless)
    }

    /// Clears every copy of `x`.
    pub fn remove(&mut self, positions: &[[u32; 3]], x: u32) {
        for t in 0..3 {
            let slot = t * self.r + positions[x as usize][t] as usize;
            if self.slots[slot] == x {
                self.slots[slot] = VACANT;
            }
        }
    }

    /// Tables (0-based) currently holding a copy of `x`.
    pub fn tables_of(&self, positions: &[[u32; 3]], x: u32) -> impl Iterator<Item = usize> + '_ {
        let pos = positions[x as usize];
        (0..3).filter(move |&t| self.slots[t * self.r + pos[t] as usize] == x)
    }
}

/// One set's compressed three-table byte array.
///
/// Entries are kept as little-endian 32-bit words: byte `i` of the layout is
/// lane `i % 4` of word `i / 4`, lane 0 in the low byte.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BatMap {
    r: usize,
    r0: usize,
    shift: u32,
    seed: u64,
    words: Vec<u32>,
    live_count: usize,
}

impl BatMap {
    /// Reassembles a batmap from its layout bytes, e.g. after reading a file.
    pub fn from_bytes(params: &UniverseParams, r: usize, r0: usize, bytes: &[u8]) -> Result<Self> {
        check_ranges(params, r, r0)?;
        if bytes.len() != 3 * r {
            return Err(Error::InvalidArgument(format!(
                "expected {} entry bytes for r = {r}, got {}",
                3 * r,
                bytes.len()
            )));
        }
        let words: Vec<u32> = bytes
            .chunks_exact(4)
            .map(|c| u32::from_le_bytes([c[0], c[1], c[2], c[3]]))
            .collect();
        let live_slots = bytes.iter().filter(|&&b| b != NULL_ENTRY).count();
        if live_slots % 2 != 0 || bytes.iter().any(|&b| b & 0x7F == 0x7F && b != NULL_ENTRY) {
            return Err(Error::InvalidArgument(
                "entry bytes are not a valid batmap".into(),
            ));
        }
        Ok(Self {
            r,
            r0,
            shift: params.shift,
            seed: params.seed,
            words,
            live_count: live_slots / 2,
        })
    }

    pub fn empty(params: &UniverseParams, r: usize, r0: usize) -> Result<Self> {
        check_ranges(params, r, r0)?;
        Ok(Self {
            r,
            r0,
            shift: params.shift,
            seed: params.seed,
            words: vec![NULL_WORD; 3 * r / 4],
            live_count: 0,
        })
    }

    pub fn range(&self) -> usize {
        self.r
    }

    pub fn superblock_range(&self) -> usize {
        self.r0
    }

    pub fn live_count(&self) -> usize {
        self.live_count
    }

    pub fn words(&self) -> &[u32] {
        &self.words
    }

    pub fn byte_len(&self) -> usize {
        3 * self.r
    }

    #[inline]
    pub fn entry(&self, index: usize) -> u8 {
        (self.words[index / 4] >> (8 * (index % 4))) as u8
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        self.words.iter().flat_map(|w| w.to_le_bytes()).collect()
    }

    fn set_entry(&mut self, index: usize, byte: u8) {
        let lane = 8 * (index % 4);
        let w = &mut self.words[index / 4];
        *w = (*w & !(0xFF << lane)) | (u32::from(byte) << lane);
    }

    pub(crate) fn layout_key(&self) -> (usize, u32, u64) {
        (self.r0, self.shift, self.seed)
    }

    /// Whether `x` is stored. Debug aid; checks the three designated slots.
    pub fn contains(&self, params: &UniverseParams, perms: &Permutations, x: u64) -> bool {
        if x >= params.universe {
            return false;
        }
        (1..=3u8).any(|t| {
            let v = perms.table(t).apply(x);
            let entry = self.entry(slot_position(self.r, self.r0, t, v));
            entry != NULL_ENTRY && entry & 0x7F == params.code_of(v)
        })
    }
}

fn check_ranges(params: &UniverseParams, r: usize, r0: usize) -> Result<()> {
    if !r.is_power_of_two() || !r0.is_power_of_two() || r0 < 4 || !r.is_multiple_of(r0) {
        return Err(Error::InvalidArgument(format!(
            "table ranges must be powers of two with 4 <= r0 <= r (r = {r}, r0 = {r0})"
        )));
    }
    if r < 1 << params.shift {
        return Err(Error::InvalidArgument(format!(
            "table range {r} is below 2^s = {}",
            1u64 << params.shift
        )));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BuildOutcome {
    pub batmap: BatMap,
    /// Elements that could not be placed, ascending.
    pub failed: Vec<u32>,
    pub move_count: u64,
}

#[derive(Debug, Clone, Copy)]
pub struct BuildConfig {
    pub r: usize,
    pub r0: usize,
    /// Cuckoo rounds per insertion; `None` picks the default for `r`.
    pub max_loop: Option<u32>,
}

/// Builds the batmap for `set` (distinct elements, each below `U`).
/// Elements are inserted in ascending order.
pub fn build_batmap(
    set: &[u32],
    params: &UniverseParams,
    perms: &Permutations,
    config: BuildConfig,
) -> Result<BuildOutcome> {
    let BuildConfig { r, r0, max_loop } = config;
    check_ranges(params, r, r0)?;
    let max_loop = max_loop.unwrap_or_else(|| crate::params::default_max_loop(r));

    let mut elements = set.to_vec();
    elements.sort_unstable();
    if elements.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::InvalidArgument(
            "set elements must be distinct".into(),
        ));
    }
    if let Some(&last) = elements.last() {
        if u64::from(last) >= params.universe {
            return Err(Error::OutOfDomain {
                value: u64::from(last),
                universe: params.universe,
            });
        }
    }

    let mask = (r - 1) as u64;
    let permuted: Vec<[u64; 3]> = elements
        .iter()
        .map(|&x| perms.apply_all(u64::from(x)))
        .collect();
    let positions: Vec<[u32; 3]> = permuted
        .iter()
        .map(|v| v.map(|p| (p & mask) as u32))
        .collect();

    let mut tables = CuckooTables::new(r);
    let mut failed = vec![false; elements.len()];
    for x in 0..elements.len() as u32 {
        for _copy in 0..2 {
            if failed[x as usize] {
                break;
            }
            if let Some(nestless) = tables.insert(&positions, x, max_loop) {
                fail_cascade(&mut tables, &positions, &mut failed, x, nestless, max_loop);
            }
        }
    }

    let mut batmap = BatMap::empty(params, r, r0)?;
    let mut live_slots = 0usize;
    for t in 0..3usize {
        for pos in 0..r {
            let Some(e) = tables.occupant(t, pos) else {
                continue;
            };
            let other = tables
                .tables_of(&positions, e)
                .find(|&o| o != t)
                .expect("stored element has a second copy");
            let bit = indicator_bit(t as u8 + 1, other as u8 + 1)?;
            let code = params.code_of(permuted[e as usize][t]);
            let index = slot_position(r, r0, t as u8 + 1, pos as u64);
            batmap.set_entry(index, encode_entry(code, bit)?);
            live_slots += 1;
        }
    }
    debug_assert_eq!(live_slots % 2, 0);
    batmap.live_count = live_slots / 2;

    let failed: Vec<u32> = failed
        .iter()
        .zip(&elements)
        .filter_map(|(&f, &x)| f.then_some(x))
        .collect();
    Ok(BuildOutcome {
        batmap,
        failed,
        move_count: tables.moves(),
    })
}

/// Drops `x` entirely, then re-places whatever it left nestless. An element
/// that fails during re-placement is dropped the same way.
fn fail_cascade(
    tables: &mut CuckooTables,
    positions: &[[u32; 3]],
    failed: &mut [bool],
    x: u32,
    nestless: u32,
    max_loop: u32,
) {
    let mut victim = x;
    let mut pending = nestless;
    loop {
        tables.remove(positions, victim);
        failed[victim as usize] = true;
        if pending == victim {
            return;
        }
        match tables.insert(positions, pending, max_loop) {
            None => return,
            Some(next) => {
                victim = pending;
                pending = next;
            }
        }
    }
}
