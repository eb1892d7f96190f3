use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::mining::TransactionDB;

/// Synthetic instance: each transaction includes each of `n_items` items
/// independently with probability `density`; transactions are appended
/// until the total number of item occurrences reaches `target_total`.
pub fn generate(
    n_items: usize,
    density: f64,
    target_total: usize,
    seed: u64,
) -> Result<TransactionDB> {
    if n_items == 0 || target_total == 0 {
        return Err(Error::InvalidArgument(
            "item count and target total must be positive".into(),
        ));
    }
    if !(density > 0.0 && density <= 1.0) {
        return Err(Error::InvalidArgument(format!(
            "density must be in (0, 1], got {density}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut transactions = Vec::new();
    let mut total = 0;
    while total < target_total {
        let t: Vec<u32> = (0..n_items as u32)
            .filter(|_| rng.random_bool(density))
            .collect();
        total += t.len();
        transactions.push(t);
    }
    TransactionDB::with_items(transactions, n_items)
}

/// Like [`generate`] but with a separate inclusion probability per item and
/// a fixed number of transactions.
pub fn generate_weighted(
    probabilities: &[f64],
    n_transactions: usize,
    seed: u64,
) -> Result<TransactionDB> {
    if let Some(p) = probabilities.iter().find(|p| !(0.0..=1.0).contains(*p)) {
        return Err(Error::InvalidArgument(format!(
            "probability {p} outside [0, 1]"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let transactions = (0..n_transactions)
        .map(|_| {
            (0..probabilities.len() as u32)
                .filter(|&i| rng.random_bool(probabilities[i as usize]))
                .collect()
        })
        .collect();
    TransactionDB::with_items(transactions, probabilities.len())
}
