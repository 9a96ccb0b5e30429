//! Shared fixtures for the benchmarks.

use lieverify::catalog::{default_catalog, CatalogEntry};

/// Hand-checked entries used as a small, stable workload.
pub const GOLDEN: [&str; 3] = ["A3.3^4", "A3.5^7", "A3.6^4"];

pub fn golden_entries() -> Vec<CatalogEntry> {
    let cat = default_catalog();
    GOLDEN.iter().map(|id| cat.get(id).expect("golden entry").clone()).collect()
}
