//! Weighted undirected graphs, stable sets and the instance utilities around
//! them: complement, edge density, seeded random generation and an
//! exhaustive oracle for small graphs.
//!
//! Vertices are `0..n` inside the crate. The 1-based DIMACS labels only appear
//! in [`crate::dimacs`].

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

/// Largest vertex count accepted by [`brute_force_alpha`].
pub const BRUTE_FORCE_MAX_N: usize = 25;

#[derive(Debug, Error, PartialEq)]
pub enum GraphError {
    #[error("vertex {vertex} is outside 1..={n}")]
    VertexOutOfRange { vertex: usize, n: usize },
    #[error("self-loop on vertex {0}")]
    SelfLoop(usize),
    #[error("weight {weight} of vertex {vertex} is negative or not finite")]
    InvalidWeight { vertex: usize, weight: f64 },
    #[error("weight vector has length {got}, expected {expected}")]
    WeightLength { got: usize, expected: usize },
    #[error("edge density needs at least two vertices, got {0}")]
    DensityUndefined(usize),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("brute force is limited to {BRUTE_FORCE_MAX_N} vertices, graph has {0}")]
    TooLarge(usize),
}

/// Simple undirected graph with nonnegative vertex weights.
///
/// Edges are stored once as `(i, j)` with `i < j`, sorted, without duplicates.
#[derive(Debug, Clone, PartialEq)]
pub struct Graph {
    n: usize,
    edges: Vec<(usize, usize)>,
    adjacency: Vec<Vec<usize>>,
    weights: Vec<f64>,
}

impl Graph {
    /// Builds a unit-weight graph. Duplicate edges (in either orientation)
    /// collapse to one.
    pub fn new<I>(n: usize, edges: I) -> Result<Self, GraphError>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let mut canonical = Vec::new();
        for (a, b) in edges {
            for v in [a, b] {
                if v >= n {
                    return Err(GraphError::VertexOutOfRange { vertex: v + 1, n });
                }
            }
            if a == b {
                return Err(GraphError::SelfLoop(a + 1));
            }
            canonical.push((a.min(b), a.max(b)));
        }
        canonical.sort_unstable();
        canonical.dedup();
        Ok(Self::from_canonical(n, canonical, vec![1.0; n]))
    }

    /// Graph on `n` vertices without edges.
    pub fn empty(n: usize) -> Self {
        Self::from_canonical(n, Vec::new(), vec![1.0; n])
    }

    /// Complete graph K_n.
    pub fn complete(n: usize) -> Self {
        let edges = (0..n)
            .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
            .collect();
        Self::from_canonical(n, edges, vec![1.0; n])
    }

    /// Cycle C_n (n >= 3).
    pub fn cycle(n: usize) -> Self {
        assert!(n >= 3, "a cycle needs at least three vertices");
        let edges = (0..n).map(|i| (i, (i + 1) % n));
        Self::new(n, edges).expect("cycle edges are in range")
    }

    fn from_canonical(n: usize, edges: Vec<(usize, usize)>, weights: Vec<f64>) -> Self {
        let mut adjacency = vec![Vec::new(); n];
        for &(i, j) in &edges {
            adjacency[i].push(j);
            adjacency[j].push(i);
        }
        for list in &mut adjacency {
            list.sort_unstable();
        }
        Graph {
            n,
            edges,
            adjacency,
            weights,
        }
    }

    /// Replaces the weight vector.
    pub fn with_weights(mut self, weights: Vec<f64>) -> Result<Self, GraphError> {
        if weights.len() != self.n {
            return Err(GraphError::WeightLength {
                got: weights.len(),
                expected: self.n,
            });
        }
        for (v, &w) in weights.iter().enumerate() {
            if !(w.is_finite() && w >= 0.0) {
                return Err(GraphError::InvalidWeight {
                    vertex: v + 1,
                    weight: w,
                });
            }
        }
        self.weights = weights;
        Ok(self)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adjacency[v]
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn weight(&self, v: usize) -> f64 {
        self.weights[v]
    }

    pub fn total_weight(&self) -> f64 {
        self.weights.iter().sum()
    }

    pub fn max_weight(&self) -> f64 {
        self.weights.iter().copied().fold(0.0, f64::max)
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        a != b && self.adjacency[a].binary_search(&b).is_ok()
    }

    /// True when every weight is a whole number, which makes integer flooring
    /// of relaxation bounds valid.
    pub fn has_integer_weights(&self) -> bool {
        self.weights.iter().all(|w| w.fract() == 0.0)
    }

    /// True when the vertex set carries no internal edge.
    pub fn is_stable(&self, members: &[usize]) -> bool {
        members.iter().enumerate().all(|(k, &a)| {
            a < self.n && members[k + 1..].iter().all(|&b| a != b && !self.has_edge(a, b))
        })
    }

    /// Packages `members` as a [`StableSet`], or `None` when an edge joins two
    /// of them.
    pub fn stable_set(&self, members: &[usize]) -> Option<StableSet> {
        if !self.is_stable(members) {
            return None;
        }
        let mut members = members.to_vec();
        members.sort_unstable();
        let value = members.iter().map(|&v| self.weights[v]).sum();
        Some(StableSet { members, value })
    }

    /// Complement graph on the same vertices and weights.
    pub fn complement(&self) -> Graph {
        let mut edges = Vec::with_capacity(self.n * self.n.saturating_sub(1) / 2 - self.m());
        for i in 0..self.n {
            let mut present = self.adjacency[i].iter().peekable();
            for j in i + 1..self.n {
                while present.next_if(|&&k| k < j).is_some() {}
                if present.peek() == Some(&&j) {
                    continue;
                }
                edges.push((i, j));
            }
        }
        Self::from_canonical(self.n, edges, self.weights.clone())
    }

    /// `m / (n(n-1)/2)`.
    pub fn edge_density(&self) -> Result<f64, GraphError> {
        if self.n < 2 {
            return Err(GraphError::DensityUndefined(self.n));
        }
        Ok(self.m() as f64 / pair_count(self.n) as f64)
    }
}

pub(crate) fn pair_count(n: usize) -> usize {
    n * n.saturating_sub(1) / 2
}

/// A set of pairwise non-adjacent vertices and its total weight.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct StableSet {
    /// Sorted, 0-based.
    pub members: Vec<usize>,
    pub value: f64,
}

impl StableSet {
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }
}

/// Uniform random graph with exactly `round(density * n(n-1)/2)` edges.
///
/// Weighted graphs get integer weights drawn uniformly from `1..=100`. The
/// output depends only on the arguments.
pub fn random_graph(
    n: usize,
    density: f64,
    weighted: bool,
    seed: u64,
) -> Result<Graph, GraphError> {
    if n < 2 {
        return Err(GraphError::InvalidParameter(format!(
            "random graphs need n >= 2, got {n}"
        )));
    }
    if !(0.0..=1.0).contains(&density) {
        return Err(GraphError::InvalidParameter(format!(
            "density must lie in [0, 1], got {density}"
        )));
    }
    let pairs = pair_count(n);
    let m = ((density * pairs as f64).round() as usize).min(pairs);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut picked = index::sample(&mut rng, pairs, m).into_vec();
    picked.sort_unstable();
    let edges = picked.into_iter().map(|k| unrank_pair(n, k)).collect();
    let weights = if weighted {
        (0..n).map(|_| rng.random_range(1..=100u32) as f64).collect()
    } else {
        vec![1.0; n]
    };
    Ok(Graph::from_canonical(n, edges, weights))
}

/// Maps `k` in `0..n(n-1)/2` to the k-th pair `(i, j)`, `i < j`, in
/// lexicographic order.
fn unrank_pair(n: usize, mut k: usize) -> (usize, usize) {
    let mut i = 0;
    loop {
        let row = n - 1 - i;
        if k < row {
            return (i, i + 1 + k);
        }
        k -= row;
        i += 1;
    }
}

/// Maximum-weight stable set by exhaustive branching (include / exclude the
/// lowest candidate vertex) over bitmasks. Limited to
/// [`BRUTE_FORCE_MAX_N`] vertices.
pub fn brute_force_alpha(g: &Graph) -> Result<StableSet, GraphError> {
    if g.n() > BRUTE_FORCE_MAX_N {
        return Err(GraphError::TooLarge(g.n()));
    }
    let closed: Vec<u32> = (0..g.n())
        .map(|v| {
            g.neighbors(v)
                .iter()
                .fold(1u32 << v, |mask, &u| mask | (1 << u))
        })
        .collect();
    let mut search = Exhaustive {
        closed: &closed,
        weights: g.weights(),
        best_value: -1.0,
        best_mask: 0,
    };
    let all = if g.n() == 32 { u32::MAX } else { (1u32 << g.n()) - 1 };
    search.run(all, 0, 0.0);
    let members = (0..g.n())
        .filter(|&v| search.best_mask & (1 << v) != 0)
        .collect();
    Ok(StableSet {
        members,
        value: search.best_value.max(0.0),
    })
}

struct Exhaustive<'a> {
    closed: &'a [u32],
    weights: &'a [f64],
    best_value: f64,
    best_mask: u32,
}

impl Exhaustive<'_> {
    fn run(&mut self, candidates: u32, chosen: u32, value: f64) {
        if candidates == 0 {
            if value > self.best_value {
                self.best_value = value;
                self.best_mask = chosen;
            }
            return;
        }
        let remaining: f64 = mask_iter(candidates).map(|v| self.weights[v]).sum();
        if value + remaining <= self.best_value {
            return;
        }
        let v = candidates.trailing_zeros() as usize;
        self.run(
            candidates & !self.closed[v],
            chosen | (1 << v),
            value + self.weights[v],
        );
        self.run(candidates & !(1 << v), chosen, value);
    }
}

fn mask_iter(mut mask: u32) -> impl Iterator<Item = usize> {
    std::iter::from_fn(move || {
        if mask == 0 {
            return None;
        }
        let v = mask.trailing_zeros() as usize;
        mask &= mask - 1;
        Some(v)
    })
}
