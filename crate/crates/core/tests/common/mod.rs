//! Reference computations that share no code with the library.

#![allow(dead_code)]

use theta_guide::Graph;

fn neighbor_masks(g: &Graph) -> Vec<u32> {
    assert!(g.n() <= 24, "enumeration oracle is for small graphs");
    let mut masks = vec![0u32; g.n()];
    for &(a, b) in g.edges() {
        masks[a] |= 1 << b;
        masks[b] |= 1 << a;
    }
    masks
}

fn subset_weight(g: &Graph, set: u32) -> f64 {
    (0..g.n()).filter(|&v| set & (1 << v) != 0).map(|v| g.weight(v)).sum()
}

/// Maximum weight stable set value by enumerating every subset.
pub fn alpha(g: &Graph) -> f64 {
    let adj = neighbor_masks(g);
    let mut best = 0.0f64;
    for set in 0u32..(1 << g.n()) {
        let stable = (0..g.n()).all(|v| set & (1 << v) == 0 || adj[v] & set == 0);
        if stable {
            best = best.max(subset_weight(g, set));
        }
    }
    best
}

/// Maximum weight clique value by enumerating every subset.
pub fn omega(g: &Graph) -> f64 {
    let adj = neighbor_masks(g);
    let mut best = 0.0f64;
    for set in 0u32..(1 << g.n()) {
        let clique = (0..g.n()).all(|v| set & (1 << v) == 0 || (set & !(1 << v)) & !adj[v] == 0);
        if clique {
            best = best.max(subset_weight(g, set));
        }
    }
    best
}

/// Optimum of the edge LP `max w·x, x_i + x_j <= 1, 0 <= x <= 1`. Its
/// vertices are half-integral, so trying every `x ∈ {0, 1/2, 1}^n` suffices.
pub fn edge_lp(g: &Graph) -> f64 {
    let n = g.n();
    assert!(n <= 10);
    let mut x = vec![0u8; n]; // halves: 0, 1, 2
    let mut best = 0.0f64;
    loop {
        if g.edges().iter().all(|&(a, b)| x[a] + x[b] <= 2) {
            let v: f64 = (0..n).map(|i| g.weight(i) * x[i] as f64 / 2.0).sum();
            best = best.max(v);
        }
        let mut k = 0;
        while k < n && x[k] == 2 {
            x[k] = 0;
            k += 1;
        }
        if k == n {
            return best;
        }
        x[k] += 1;
    }
}

/// True when `members` (0-based) is a stable set of `g`.
pub fn is_stable(g: &Graph, members: &[usize]) -> bool {
    members
        .iter()
        .all(|&a| members.iter().all(|&b| a == b || !g.edges().contains(&(a.min(b), a.max(b)))))
}

/// True when `members` (0-based) is a clique of `g`.
pub fn is_clique(g: &Graph, members: &[usize]) -> bool {
    members
        .iter()
        .all(|&a| members.iter().all(|&b| a == b || g.edges().contains(&(a.min(b), a.max(b)))))
}

pub fn binomial(n: u64, k: u64) -> u64 {
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

pub fn data_dir() -> std::path::PathBuf {
    std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data/dimacs")
}
