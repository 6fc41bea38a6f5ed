use std::path::Path;

use anyhow::{Context, Result};
use log::warn;
use theta_guide::dimacs::{load_weights, parse_dimacs};
use theta_guide::Graph;

/// Reads a DIMACS graph, optionally applies a weight sidecar, and optionally
/// complements it so that cliques become stable sets. Weights follow the
/// vertices through the complement.
pub fn load_graph(path: &Path, weights: Option<&Path>, complement: bool) -> Result<Graph> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let parsed = parse_dimacs(&text).with_context(|| format!("parsing {}", path.display()))?;
    for w in &parsed.warnings {
        warn!("{}: {w}", path.display());
    }
    let mut g = parsed.graph;
    if complement {
        g = g.complement();
    }
    if let Some(wpath) = weights {
        let text = std::fs::read_to_string(wpath).with_context(|| format!("reading {}", wpath.display()))?;
        g = load_weights(g, &text).with_context(|| format!("parsing {}", wpath.display()))?;
    }
    Ok(g)
}

/// File name without directory or extension.
pub fn instance_name(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string())
}
