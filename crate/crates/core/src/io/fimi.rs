use std::io::{BufRead, Write};

use crate::error::{Error, Result};
use crate::mining::TransactionDB;

/// Reads the FIMI text format: one transaction per line, items as
/// whitespace-separated non-negative integers. Item labels are mapped to
/// dense ids in ascending label order.
pub fn parse_fimi<R: BufRead>(reader: R) -> Result<TransactionDB> {
    let mut raw: Vec<Vec<u64>> = Vec::new();
    for (n, line) in reader.lines().enumerate() {
        let line = line?;
        let items = line
            .split_whitespace()
            .map(|tok| {
                tok.parse::<u64>().map_err(|_| Error::Parse {
                    line: n + 1,
                    message: format!("expected a non-negative integer, found {tok:?}"),
                })
            })
            .collect::<Result<Vec<u64>>>()?;
        raw.push(items);
    }

    TransactionDB::from_labelled(raw)
}

/// Writes one line per transaction with item labels in ascending order.
pub fn write_fimi<W: Write>(db: &TransactionDB, mut sink: W) -> Result<()> {
    let labels = db.labels();
    for t in db.transactions() {
        let mut items: Vec<u64> = t.iter().map(|&i| labels[i as usize]).collect();
        items.sort_unstable();
        let line: Vec<String> = items.iter().map(u64::to_string).collect();
        writeln!(sink, "{}", line.join(" "))?;
    }
    sink.flush()?;
    Ok(())
}
