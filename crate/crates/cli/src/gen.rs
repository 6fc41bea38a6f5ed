use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use clap::Args;
use theta_guide::dimacs::{write_dimacs, write_weights};
use theta_guide::random_graph;

#[derive(Debug, Args)]
pub struct GenArgs {
    #[arg(long)]
    pub n: usize,
    /// Fraction of the n(n-1)/2 possible edges, in [0, 1].
    #[arg(long)]
    pub density: f64,
    /// Draw integer vertex weights in 1..=100 and write a `.wts` sidecar.
    #[arg(long)]
    pub weighted: bool,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Output directory.
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
}

/// `g<n>d<ddd>` or `wg<n>d<ddd>`, with the density in hundredths.
pub fn instance_stem(n: usize, density: f64, weighted: bool) -> String {
    let prefix = if weighted { "wg" } else { "g" };
    format!("{prefix}{n}d{:03}", (density * 100.0).round() as u64)
}

/// Writes the graph (and sidecar) and returns the graph path.
pub fn generate(args: &GenArgs) -> Result<PathBuf> {
    let g = random_graph(args.n, args.density, args.weighted, args.seed)?;
    std::fs::create_dir_all(&args.out).with_context(|| format!("creating {}", args.out.display()))?;
    let stem = instance_stem(args.n, args.density, args.weighted);
    let header = format!(
        "random graph n={} density={} seed={} weighted={}",
        args.n, args.density, args.seed, args.weighted
    );
    let path = args.out.join(format!("{stem}.clq"));
    write(&path, &write_dimacs(&g, &[header.as_str()]))?;
    if args.weighted {
        write(&args.out.join(format!("{stem}.wts")), &write_weights(&g))?;
    }
    Ok(path)
}

fn write(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

pub fn run(args: GenArgs) -> Result<()> {
    let path = generate(&args)?;
    println!("{}", path.display());
    Ok(())
}
