//! Fixtures shared by the benchmarks in `benches/`.

use std::fs;
use std::path::PathBuf;

use theta_guide::dimacs::parse_dimacs;
use theta_guide::Graph;

/// Bundled DIMACS instances, relative to the workspace root.
pub fn data_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data/dimacs")
}

/// The stable set instance behind a bundled clique benchmark, i.e. the
/// complement of the file's graph.
pub fn clique_instance(name: &str) -> Graph {
    let path = data_dir().join(format!("{name}.clq"));
    let text = fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    parse_dimacs(&text).expect("bundled instance parses").graph.complement()
}
