//! Binary collection file.
//!
//! ```text
//! "BMAP" | version: u8 = 1 | seed | max_id | s | r0 | n_items
//! n_items x (original_item_id | set_size | r_i | payload_offset)
//! payload: batmap entry bytes, concatenated
//! ```
//! Every integer after the version byte is a little-endian u64. Payload
//! offsets are relative to the start of the payload.

use std::io::{Read, Write};

use crate::batmap::BatMap;
use crate::error::{Error, FormatError, Result};
use crate::mining::BatMapCollection;
use crate::params::UniverseParams;

pub const MAGIC: [u8; 4] = *b"BMAP";
pub const VERSION: u8 = 1;

pub fn write_collection<W: Write>(collection: &BatMapCollection, mut sink: W) -> Result<()> {
    let params = collection.params();
    sink.write_all(&MAGIC)?;
    sink.write_all(&[VERSION])?;
    for v in [
        params.seed,
        params.max_id,
        u64::from(params.shift),
        collection.r0() as u64,
        collection.len() as u64,
    ] {
        sink.write_all(&v.to_le_bytes())?;
    }
    let mut offset = 0u64;
    for ((id, size), batmap) in collection
        .item_ids()
        .iter()
        .zip(collection.set_sizes())
        .zip(collection.batmaps())
    {
        for v in [*id, *size as u64, batmap.range() as u64, offset] {
            sink.write_all(&v.to_le_bytes())?;
        }
        offset += batmap.byte_len() as u64;
    }
    for batmap in collection.batmaps() {
        sink.write_all(&batmap.to_bytes())?;
    }
    sink.flush()?;
    Ok(())
}

fn read_u64<R: Read>(source: &mut R, what: &'static str) -> Result<u64> {
    let mut buf = [0u8; 8];
    read_exact(source, &mut buf, what)?;
    Ok(u64::from_le_bytes(buf))
}

fn read_exact<R: Read>(source: &mut R, buf: &mut [u8], what: &'static str) -> Result<()> {
    source.read_exact(buf).map_err(|e| match e.kind() {
        std::io::ErrorKind::UnexpectedEof => FormatError::Truncated(what).into(),
        _ => Error::Io(e),
    })
}

fn inconsistent(msg: impl Into<String>) -> Error {
    FormatError::Inconsistent(msg.into()).into()
}

pub fn read_collection<R: Read>(mut source: R) -> Result<BatMapCollection> {
    let mut magic = [0u8; 4];
    read_exact(&mut source, &mut magic, "magic")?;
    if magic != MAGIC {
        return Err(FormatError::BadMagic(magic).into());
    }
    let mut version = [0u8; 1];
    read_exact(&mut source, &mut version, "version")?;
    if version[0] != VERSION {
        return Err(FormatError::UnsupportedVersion(version[0]).into());
    }
    let seed = read_u64(&mut source, "header")?;
    let max_id = read_u64(&mut source, "header")?;
    let shift = read_u64(&mut source, "header")?;
    let r0 = read_u64(&mut source, "header")? as usize;
    let n_items = read_u64(&mut source, "header")? as usize;

    let params = UniverseParams::derive(max_id, seed);
    if u64::from(params.shift) != shift {
        return Err(inconsistent(format!(
            "shift {shift} does not match max_id {max_id} (expected {})",
            params.shift
        )));
    }

    let mut records = Vec::with_capacity(n_items.min(1 << 20));
    for _ in 0..n_items {
        let id = read_u64(&mut source, "item records")?;
        let size = read_u64(&mut source, "item records")? as usize;
        let r = read_u64(&mut source, "item records")? as usize;
        let offset = read_u64(&mut source, "item records")?;
        records.push((id, size, r, offset));
    }

    let mut expected_offset = 0u64;
    let mut batmaps = Vec::with_capacity(records.len());
    for &(id, _, r, offset) in &records {
        if offset != expected_offset {
            return Err(inconsistent(format!(
                "item {id}: payload offset {offset}, expected {expected_offset}"
            )));
        }
        if !r.is_power_of_two() || r > 1 << 40 {
            return Err(inconsistent(format!(
                "item {id}: table range {r} is not a power of two"
            )));
        }
        let mut bytes = vec![0u8; 3 * r];
        read_exact(&mut source, &mut bytes, "payload")?;
        let batmap = BatMap::from_bytes(&params, r, r0, &bytes)
            .map_err(|e| inconsistent(format!("item {id}: {e}")))?;
        batmaps.push(batmap);
        expected_offset += 3 * r as u64;
    }
    let mut probe = [0u8; 1];
    if source.read(&mut probe)? != 0 {
        return Err(inconsistent("trailing bytes after payload"));
    }

    let item_ids = records.iter().map(|r| r.0).collect();
    let set_sizes = records.iter().map(|r| r.1).collect();
    BatMapCollection::from_parts(params, r0, item_ids, set_sizes, batmaps)
        .map_err(|e| inconsistent(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mining::{build_collection, CollectionConfig, VerticalIndex};

    fn sample() -> BatMapCollection {
        let v = VerticalIndex {
            tidlists: vec![vec![0, 2, 4], vec![1], vec![0, 1, 2, 3, 4]],
            n_transactions: 5,
        };
        build_collection(&v, &[100, 200, 300], CollectionConfig::default())
            .unwrap()
            .collection
    }

    fn to_bytes(c: &BatMapCollection) -> Vec<u8> {
        let mut out = Vec::new();
        write_collection(c, &mut out).unwrap();
        out
    }

    #[test]
    fn empty_collection_is_header_only() {
        let v = VerticalIndex {
            tidlists: vec![],
            n_transactions: 0,
        };
        let c = build_collection(&v, &[], CollectionConfig::default())
            .unwrap()
            .collection;
        let bytes = to_bytes(&c);
        assert_eq!(bytes.len(), 5 + 5 * 8);
        assert_eq!(read_collection(bytes.as_slice()).unwrap(), c);
    }

    #[test]
    fn single_item_payload() {
        let v = VerticalIndex {
            tidlists: vec![vec![0, 1]],
            n_transactions: 2,
        };
        let c = build_collection(&v, &[7], CollectionConfig::default())
            .unwrap()
            .collection;
        let bytes = to_bytes(&c);
        assert_eq!(bytes.len(), 5 + 5 * 8 + 4 * 8 + 3 * c.r0());
    }

    #[test]
    fn header_layout() {
        let c = sample();
        let bytes = to_bytes(&c);
        assert_eq!(&bytes[..5], b"BMAP\x01");
        assert_eq!(u64::from_le_bytes(bytes[13..21].try_into().unwrap()), 4);
        assert_eq!(u64::from_le_bytes(bytes[37..45].try_into().unwrap()), 3);
        // first record: smallest set, id 200
        assert_eq!(u64::from_le_bytes(bytes[45..53].try_into().unwrap()), 200);
        assert_eq!(read_collection(bytes.as_slice()).unwrap(), c);
    }

    #[test]
    fn structured_errors() {
        let bytes = to_bytes(&sample());

        let mut bad = bytes.clone();
        bad[0] = b'X';
        assert!(matches!(
            read_collection(bad.as_slice()),
            Err(Error::Format(FormatError::BadMagic(_)))
        ));

        let mut bad = bytes.clone();
        bad[4] = 2;
        assert!(matches!(
            read_collection(bad.as_slice()),
            Err(Error::Format(FormatError::UnsupportedVersion(2)))
        ));

        for cut in [3, 10, 60, bytes.len() - 1] {
            assert!(matches!(
                read_collection(&bytes[..cut]),
                Err(Error::Format(FormatError::Truncated(_)))
            ));
        }

        let mut bad = bytes.clone();
        bad.push(0);
        assert!(matches!(
            read_collection(bad.as_slice()),
            Err(Error::Format(FormatError::Inconsistent(_)))
        ));

        let mut bad = bytes.clone();
        bad[21] ^= 1; // shift field
        assert!(matches!(
            read_collection(bad.as_slice()),
            Err(Error::Format(FormatError::Inconsistent(_)))
        ));
    }
}
