use std::io::{Read, Write};

use crate::error::{Error, Result};
use crate::mining::PairSupportTable;

const HEADER: [&str; 3] = ["item_a", "item_b", "support"];

/// CSV with header `item_a,item_b,support`, rows sorted by `(item_a, item_b)`.
pub fn write_supports<W: Write>(table: &PairSupportTable, sink: W) -> Result<()> {
    let mut entries = table.entries.clone();
    entries.sort_unstable();
    let mut writer = csv::Writer::from_writer(sink);
    writer.write_record(HEADER)?;
    for (a, b, n) in entries {
        writer.serialize((a, b, n))?;
    }
    writer.flush()?;
    Ok(())
}

pub fn read_supports<R: Read>(source: R) -> Result<PairSupportTable> {
    let mut reader = csv::Reader::from_reader(source);
    if reader.headers()?.iter().ne(HEADER) {
        return Err(Error::Parse {
            line: 1,
            message: "expected header item_a,item_b,support".into(),
        });
    }
    let entries = reader
        .deserialize::<(u64, u64, u64)>()
        .collect::<std::result::Result<Vec<_>, _>>()?;
    Ok(PairSupportTable::from_unordered(entries))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn render(table: &PairSupportTable) -> String {
        let mut out = Vec::new();
        write_supports(table, &mut out).unwrap();
        String::from_utf8(out).unwrap()
    }

    #[test]
    fn examples() {
        assert_eq!(
            render(&PairSupportTable::default()),
            "item_a,item_b,support\n"
        );
        let t = PairSupportTable {
            entries: vec![(0, 1, 2)],
        };
        assert_eq!(render(&t), "item_a,item_b,support\n0,1,2\n");
    }

    #[test]
    fn rows_sorted() {
        let t = PairSupportTable {
            entries: vec![(3, 4, 1), (0, 9, 5)],
        };
        assert_eq!(render(&t), "item_a,item_b,support\n0,9,5\n3,4,1\n");
    }

    #[test]
    fn rejects_wrong_header() {
        assert!(read_supports("a,b,c\n1,2,3\n".as_bytes()).is_err());
        assert!(read_supports("item_a,item_b,support\n1,x,3\n".as_bytes()).is_err());
    }
}
