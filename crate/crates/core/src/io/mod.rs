//! File formats and data sources.

mod collection_file;
mod fimi;
mod supports;
mod synth;

pub use collection_file::{read_collection, write_collection, MAGIC, VERSION};
pub use fimi::{parse_fimi, write_fimi};
pub use supports::{read_supports, write_supports};
pub use synth::{generate, generate_weighted};
