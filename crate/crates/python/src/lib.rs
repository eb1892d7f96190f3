//! Python bindings: universe parameters, word comparison, batmap
//! collections, pair mining and the FIMI / synthetic data helpers.

use std::fs::File;
use std::io::{BufReader, BufWriter, Write};

use batmap::baselines;
use batmap::io;
use batmap::params::DEFAULT_R_MIN;
use batmap::{
    BatMapCollection, CollectionConfig, Error, MineConfig, TransactionDB, UniverseParams,
};
use pyo3::exceptions::{PyIOError, PyKeyError, PyMemoryError, PyValueError};
use pyo3::prelude::*;

fn to_py(err: Error) -> PyErr {
    match err {
        Error::Io(e) => PyIOError::new_err(e.to_string()),
        e @ Error::Resource { .. } => PyMemoryError::new_err(e.to_string()),
        e => PyValueError::new_err(e.to_string()),
    }
}

fn labelled(transactions: Vec<Vec<u64>>) -> PyResult<TransactionDB> {
    TransactionDB::from_labelled(transactions).map_err(to_py)
}

fn to_labels(db: &TransactionDB) -> Vec<Vec<u64>> {
    let labels = db.labels();
    db.transactions()
        .iter()
        .map(|t| t.iter().map(|&i| labels[i as usize]).collect())
        .collect()
}

/// Universe parameters for ids `0..=max_id`: a dict with `shift`,
/// `universe` and `word_bits`.
#[pyfunction]
#[pyo3(signature = (max_id, seed = 0))]
fn derive_params(
    py: Python<'_>,
    max_id: u64,
    seed: u64,
) -> PyResult<Bound<'_, pyo3::types::PyDict>> {
    let p = UniverseParams::derive(max_id, seed);
    let d = pyo3::types::PyDict::new(py);
    d.set_item("max_id", p.max_id)?;
    d.set_item("shift", p.shift)?;
    d.set_item("universe", p.universe)?;
    d.set_item("word_bits", p.word_bits)?;
    d.set_item("seed", p.seed)?;
    Ok(d)
}

/// `pi_t(x)` for the collection universe of `(max_id, seed)`.
#[pyfunction]
#[pyo3(signature = (max_id, x, table = 1, seed = 0))]
fn permute(max_id: u64, x: u64, table: u8, seed: u64) -> PyResult<u64> {
    if !(1..=3).contains(&table) {
        return Err(PyValueError::new_err("table must be 1, 2 or 3"));
    }
    let params = UniverseParams::derive(max_id, seed);
    params.permutations().table(table).permute(x).map_err(to_py)
}

/// Matching byte lanes of two 32-bit batmap words.
#[pyfunction]
fn swar_compare(x: u32, y: u32) -> u32 {
    batmap::swar_compare(x, y)
}

/// Intersection size of two strictly increasing id lists.
#[pyfunction]
fn merge_count(a: Vec<u32>, b: Vec<u32>) -> PyResult<usize> {
    let a = baselines::SortedList::new(a).map_err(to_py)?;
    let b = baselines::SortedList::new(b).map_err(to_py)?;
    Ok(a.intersect_count(&b))
}

/// Transactions of a FIMI file, with the original item labels.
#[pyfunction]
fn read_fimi(path: &str) -> PyResult<Vec<Vec<u64>>> {
    let file = File::open(path).map_err(|e| PyIOError::new_err(e.to_string()))?;
    let db = io::parse_fimi(BufReader::new(file)).map_err(to_py)?;
    Ok(to_labels(&db))
}

#[pyfunction]
fn write_fimi(path: &str, transactions: Vec<Vec<u64>>) -> PyResult<()> {
    let db = labelled(transactions)?;
    let file = File::create(path).map_err(|e| PyIOError::new_err(e.to_string()))?;
    io::write_fimi(&db, BufWriter::new(file)).map_err(to_py)
}

/// Synthetic transactions: each of `n_items` items joins a transaction with
/// probability `density`, until `total` occurrences are reached.
#[pyfunction]
#[pyo3(signature = (n_items, density, total, seed = 0))]
fn generate(n_items: usize, density: f64, total: usize, seed: u64) -> PyResult<Vec<Vec<u64>>> {
    let db = io::generate(n_items, density, total, seed).map_err(to_py)?;
    Ok(to_labels(&db))
}

/// Supports of item pairs as `(item_a, item_b, support)` tuples sorted by
/// items, using batmaps.
#[pyfunction]
#[pyo3(signature = (transactions, minsup = 1, pair_threshold = 1, tile_size = batmap::intersect::DEFAULT_TILE_SIZE, threads = 1, emit_all = false, seed = 0, max_loop = None))]
#[allow(clippy::too_many_arguments)]
fn mine_pairs(
    transactions: Vec<Vec<u64>>,
    minsup: usize,
    pair_threshold: u64,
    tile_size: usize,
    threads: usize,
    emit_all: bool,
    seed: u64,
    max_loop: Option<u32>,
) -> PyResult<Vec<(u64, u64, u64)>> {
    let db = labelled(transactions)?;
    let config = MineConfig {
        minsup,
        pair_threshold,
        tile_size,
        workers: threads,
        collection: CollectionConfig {
            seed,
            max_loop,
            ..Default::default()
        },
        emit_all,
    };
    let table = batmap::mine_pairs(&db, &config).map_err(to_py)?;
    Ok(table.entries.clone())
}

/// Nonzero pair supports by direct enumeration of every transaction.
#[pyfunction]
fn pair_supports_reference(transactions: Vec<Vec<u64>>) -> PyResult<Vec<(u64, u64, u64)>> {
    let db = labelled(transactions)?;
    Ok(baselines::horizontal_pair_supports(&db).entries)
}

/// One batmap per item of a transaction list; each batmap stores the ids
/// of the transactions containing the item.
#[pyclass(name = "Collection", module = "pybatmap")]
struct PyCollection {
    inner: BatMapCollection,
    failures: usize,
}

#[pymethods]
impl PyCollection {
    #[staticmethod]
    #[pyo3(signature = (transactions, seed = 0, r_min = DEFAULT_R_MIN, max_loop = None))]
    fn build(
        transactions: Vec<Vec<u64>>,
        seed: u64,
        r_min: usize,
        max_loop: Option<u32>,
    ) -> PyResult<Self> {
        let db = labelled(transactions)?;
        let vertical = batmap::build_vertical(&db);
        let config = CollectionConfig {
            seed,
            r_min,
            max_loop,
            memory_budget: None,
        };
        let built = batmap::build_collection(&vertical, db.labels(), config).map_err(to_py)?;
        Ok(Self {
            inner: built.collection,
            failures: built.failures.len(),
        })
    }

    #[staticmethod]
    fn load(path: &str) -> PyResult<Self> {
        let file = File::open(path).map_err(|e| PyIOError::new_err(e.to_string()))?;
        let inner = io::read_collection(BufReader::new(file)).map_err(to_py)?;
        Ok(Self { inner, failures: 0 })
    }

    fn save(&self, path: &str) -> PyResult<()> {
        let file = File::create(path).map_err(|e| PyIOError::new_err(e.to_string()))?;
        let mut sink = BufWriter::new(file);
        io::write_collection(&self.inner, &mut sink).map_err(to_py)?;
        sink.flush().map_err(|e| PyIOError::new_err(e.to_string()))
    }

    /// Stored elements common to the batmaps of items `a` and `b`.
    fn count_pair(&self, a: u64, b: u64) -> PyResult<u64> {
        let find = |id: u64| {
            self.inner
                .position_of_id(id)
                .ok_or_else(|| PyKeyError::new_err(format!("item {id} is not in the collection")))
        };
        let batmaps = self.inner.batmaps();
        batmap::count_pair(&batmaps[find(a)?], &batmaps[find(b)?]).map_err(to_py)
    }

    /// Item labels in storage order (ascending set size).
    #[getter]
    fn item_ids(&self) -> Vec<u64> {
        self.inner.item_ids().to_vec()
    }

    #[getter]
    fn set_sizes(&self) -> Vec<usize> {
        self.inner.set_sizes().to_vec()
    }

    #[getter]
    fn byte_size(&self) -> u64 {
        self.inner.byte_size()
    }

    /// Insertions that failed during `build`; zero after `load`.
    #[getter]
    fn failures(&self) -> usize {
        self.failures
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }

    fn __repr__(&self) -> String {
        format!(
            "Collection(items={}, bytes={})",
            self.inner.len(),
            self.inner.byte_size()
        )
    }
}

#[pymodule]
fn pybatmap(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(derive_params, m)?)?;
    m.add_function(wrap_pyfunction!(permute, m)?)?;
    m.add_function(wrap_pyfunction!(swar_compare, m)?)?;
    m.add_function(wrap_pyfunction!(merge_count, m)?)?;
    m.add_function(wrap_pyfunction!(read_fimi, m)?)?;
    m.add_function(wrap_pyfunction!(write_fimi, m)?)?;
    m.add_function(wrap_pyfunction!(generate, m)?)?;
    m.add_function(wrap_pyfunction!(mine_pairs, m)?)?;
    m.add_function(wrap_pyfunction!(pair_supports_reference, m)?)?;
    m.add_class::<PyCollection>()?;
    Ok(())
}
