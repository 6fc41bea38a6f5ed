//! Regenerates the DIMACS clique benchmark graphs under `data/dimacs/` from
//! their family definitions:
//!
//! * `hamming<b>-<d>`: binary words of length b, adjacent when their Hamming
//!   distance is at least d.
//! * `johnson<n>-<w>-<d>`: weight-w words of length n (w-subsets of n
//!   points, lexicographic order), adjacent at Hamming distance >= d.
//! * `MANN_a9`: clique form of the Steiner triple covering problem over the
//!   12 lines of the affine plane AG(2,3). Its complement has a triangle per
//!   line on that line's (line, point) vertices, and joins every (line,
//!   point) vertex to the vertex of its point.
//!
//! Usage: `cargo run -p theta-guide-core --example dimacs_families -- <out-dir>`

use std::path::PathBuf;

use theta_guide::dimacs::write_dimacs;
use theta_guide::Graph;

fn hamming(bits: u32, distance: u32) -> Graph {
    let n = 1usize << bits;
    let edges = (0..n)
        .flat_map(|a| (a + 1..n).map(move |b| (a, b)))
        .filter(|&(a, b)| (a ^ b).count_ones() >= distance);
    Graph::new(n, edges).unwrap()
}

fn subsets(n: usize, w: usize) -> Vec<u32> {
    let mut out: Vec<u32> = (0u32..1 << n).filter(|s| s.count_ones() as usize == w).collect();
    // Lexicographic order of the sorted element lists.
    out.sort_by_key(|&s| {
        (0..n)
            .filter(|&i| s & (1 << i) != 0)
            .collect::<Vec<_>>()
    });
    out
}

fn johnson(n: usize, w: usize, distance: u32) -> Graph {
    let words = subsets(n, w);
    let k = words.len();
    let edges = (0..k)
        .flat_map(|a| (a + 1..k).map(move |b| (a, b)))
        .filter(|&(a, b)| (words[a] ^ words[b]).count_ones() >= distance);
    Graph::new(k, edges).unwrap()
}

fn mann_a9() -> Graph {
    let points: Vec<(u8, u8)> = (0..3).flat_map(|x| (0..3).map(move |y| (x, y))).collect();
    let index = |p: (u8, u8)| (p.0 * 3 + p.1) as usize;
    let mut lines: Vec<[usize; 3]> = Vec::new();
    for (dx, dy) in [(0u8, 1u8), (1, 0), (1, 1), (1, 2)] {
        let mut seen = Vec::new();
        for &p in &points {
            let mut line: Vec<usize> = (0..3)
                .map(|t| index(((p.0 + t * dx) % 3, (p.1 + t * dy) % 3)))
                .collect();
            line.sort_unstable();
            if !seen.contains(&line) {
                seen.push(line.clone());
                lines.push([line[0], line[1], line[2]]);
            }
        }
    }
    assert_eq!(lines.len(), 12);
    let point_vertex = |p: usize| 36 + p;
    let mut stable_edges = Vec::new();
    for (l, line) in lines.iter().enumerate() {
        for a in 0..3 {
            stable_edges.push((3 * l + a, point_vertex(line[a])));
            for b in a + 1..3 {
                stable_edges.push((3 * l + a, 3 * l + b));
            }
        }
    }
    Graph::new(45, stable_edges).unwrap().complement()
}

fn main() {
    let out: PathBuf = std::env::args()
        .nth(1)
        .unwrap_or_else(|| "data/dimacs".into())
        .into();
    std::fs::create_dir_all(&out).unwrap();
    let instances = [
        ("hamming6-2", hamming(6, 2), "words of length 6, adjacent at Hamming distance >= 2"),
        ("hamming6-4", hamming(6, 4), "words of length 6, adjacent at Hamming distance >= 4"),
        ("johnson8-2-4", johnson(8, 2, 4), "weight-2 words of length 8, adjacent at distance >= 4"),
        ("johnson8-4-4", johnson(8, 4, 4), "weight-4 words of length 8, adjacent at distance >= 4"),
        ("MANN_a9", mann_a9(), "clique form of Steiner triple covering on AG(2,3)"),
    ];
    for (name, g, what) in instances {
        let header = format!("{name}: {what}");
        let text = write_dimacs(&g, &[header.as_str(), "regenerated by the dimacs_families example"]);
        let path = out.join(format!("{name}.clq"));
        std::fs::write(&path, text).unwrap();
        println!("{} n={} m={}", path.display(), g.n(), g.m());
    }
}
