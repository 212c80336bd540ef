//! Shared inputs for the criterion benches.

use cuspflow_core::{parse_surface, IdealTriangulation, Metric};

/// Load one of the surfaces shipped in `fixtures/`.
pub fn fixture(name: &str) -> (IdealTriangulation, Metric) {
    let path = format!("{}/../../fixtures/{name}.surf", env!("CARGO_MANIFEST_DIR"));
    let text = std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{path}: {e}"));
    parse_surface(&text).unwrap_or_else(|e| panic!("{path}: {e}"))
}
