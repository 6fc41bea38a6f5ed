use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{CpModel, Domain, Propagation, SearchState};
use crate::graph::StableSet;
use crate::ipm::ThetaScores;

/// A variable order with a suggested value per variable. LDS counts a
/// discrepancy whenever it takes the other value.
#[derive(Debug, Clone, PartialEq)]
pub struct HeuristicPath {
    pub order: Vec<usize>,
    /// Indexed by variable, not by position in `order`.
    pub values: Vec<u8>,
    pub source_scores: ThetaScores,
}

impl HeuristicPath {
    /// Index order with every variable suggested at 1, for searches without
    /// a relaxation.
    pub fn identity(n: usize) -> Self {
        HeuristicPath {
            order: (0..n).collect(),
            values: vec![1; n],
            source_scores: ThetaScores::uniform(n, 1.0, f64::NAN),
        }
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }
}

fn closeness(s: f64) -> f64 {
    s.max(1.0 - s)
}

/// Builds a path from fractional scores: most decided variables first, each
/// suggested at its rounded value (ties at 0.5 round to 1).
///
/// Scores are first divided by the largest score. On vertex-transitive
/// graphs every vertex scores `θ/n`, often well below 0.5, although each one
/// lies in some maximum stable set; rescaling keeps those suggested at 1.
///
/// The randomized variant draws the next variable among the remaining ones
/// with probability proportional to its closeness to an integer.
pub fn compute_heuristic(
    model: &CpModel,
    scores: &ThetaScores,
    randomized: bool,
    seed: u64,
) -> HeuristicPath {
    let n = model.graph().n();
    assert_eq!(scores.score.len(), n, "one score per vertex");
    let top = scores.score.iter().fold(0.0f64, |m, &v| m.max(v));
    let s: Vec<f64> = if top > 0.0 {
        scores.score.iter().map(|&v| v / top).collect()
    } else {
        scores.score.clone()
    };
    let values = s.iter().map(|&v| u8::from(v >= 0.5)).collect();
    let weight: Vec<f64> = s.iter().map(|&v| closeness(v)).collect();

    let order = if randomized && top > 0.0 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut remaining: Vec<usize> = (0..n).collect();
        let mut order = Vec::with_capacity(n);
        while !remaining.is_empty() {
            let total: f64 = remaining.iter().map(|&v| weight[v]).sum();
            let mut r = rng.random::<f64>() * total;
            let mut pick = remaining.len() - 1;
            for (k, &v) in remaining.iter().enumerate() {
                if r < weight[v] {
                    pick = k;
                    break;
                }
                r -= weight[v];
            }
            order.push(remaining.remove(pick));
        }
        order
    } else {
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| weight[b].total_cmp(&weight[a]).then(a.cmp(&b)));
        order
    };
    HeuristicPath {
        order,
        values,
        source_scores: scores.clone(),
    }
}

/// Follows `path` without backtracking. Variables already fixed by
/// propagation are skipped; a suggestion that fails falls through to the
/// other value.
pub(super) fn descend(model: &CpModel, path: &HeuristicPath) -> StableSet {
    let mut st = SearchState::new(model);
    for &var in &path.order {
        if st.domain(var) != Domain::BOTH {
            continue;
        }
        let suggested = path.values[var];
        if st.assign(var, suggested) == Propagation::Conflict {
            st.undo();
            st.assign(var, 1 - suggested);
        }
    }
    st.current_set()
}

/// Runs `n` dives along randomized paths seeded `seed, seed + 1, ...` and
/// returns the best stable set with the path that produced it. Ties go to the
/// earliest dive.
pub fn heuristic_dive(model: &CpModel, scores: &ThetaScores, seed: u64) -> (StableSet, HeuristicPath) {
    let n = model.graph().n();
    let mut best: Option<(StableSet, HeuristicPath)> = None;
    for k in 0..n as u64 {
        let path = compute_heuristic(model, scores, true, seed.wrapping_add(k));
        let set = descend(model, &path);
        if best.as_ref().map_or(true, |(b, _)| set.value > b.value) {
            best = Some((set, path));
        }
    }
    best.unwrap_or_else(|| {
        let path = compute_heuristic(model, scores, false, seed);
        (descend(model, &path), path)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Graph;

    fn scores(s: &[f64]) -> ThetaScores {
        ThetaScores {
            theta: s.iter().sum(),
            score: s.to_vec(),
            raw: s.to_vec(),
        }
    }

    #[test]
    fn deterministic_order_by_closeness() {
        let model = CpModel::new(Graph::empty(3));
        let path = compute_heuristic(&model, &scores(&[1.0, 0.0, 0.6]), false, 0);
        assert_eq!(path.order, vec![0, 1, 2]);
        assert_eq!(path.values, vec![1, 0, 1]);
    }

    #[test]
    fn ties_keep_index_order() {
        let model = CpModel::new(Graph::empty(4));
        let path = compute_heuristic(&model, &scores(&[1.0; 4]), false, 0);
        assert_eq!(path.order, vec![0, 1, 2, 3]);
        assert_eq!(path.values, vec![1; 4]);
        let path = compute_heuristic(&model, &scores(&[0.5, 1.0, 0.2, 0.5]), false, 0);
        assert_eq!(path.order, vec![1, 2, 0, 3]);
        assert_eq!(path.values, vec![1, 1, 0, 1]);
    }

    #[test]
    fn uniform_low_scores_are_rescaled() {
        let model = CpModel::new(Graph::cycle(5));
        let path = compute_heuristic(&model, &scores(&[0.4472136; 5]), false, 0);
        assert_eq!(path.values, vec![1; 5]);
        let path = compute_heuristic(&model, &scores(&[0.4, 0.1, 0.2, 0.4, 0.0]), false, 0);
        assert_eq!(path.values, vec![1, 0, 1, 1, 0]);
        assert_eq!(path.order, vec![0, 3, 4, 1, 2]);
    }

    #[test]
    fn all_zero_scores_fall_back_to_index_order() {
        let model = CpModel::new(Graph::empty(4));
        let path = compute_heuristic(&model, &scores(&[0.0; 4]), true, 3);
        assert_eq!(path.order, vec![0, 1, 2, 3]);
        assert_eq!(path.values, vec![0; 4]);
    }

    #[test]
    fn randomized_is_a_seeded_permutation() {
        let model = CpModel::new(Graph::empty(3));
        let s = scores(&[0.9, 0.9, 0.1]);
        let a = compute_heuristic(&model, &s, true, 7);
        let b = compute_heuristic(&model, &s, true, 7);
        assert_eq!(a, b);
        let mut sorted = a.order.clone();
        sorted.sort_unstable();
        assert_eq!(sorted, vec![0, 1, 2]);

        let model = CpModel::new(Graph::empty(30));
        let s = scores(&(0..30).map(|i| i as f64 / 30.0).collect::<Vec<_>>());
        let orders: Vec<_> = (0..5).map(|seed| compute_heuristic(&model, &s, true, seed).order).collect();
        assert!(orders.windows(2).any(|w| w[0] != w[1]));
    }

    #[test]
    fn dives_on_trivial_graphs() {
        let model = CpModel::new(Graph::empty(3));
        for seed in 0..4 {
            assert_eq!(heuristic_dive(&model, &scores(&[1.0; 3]), seed).0.value, 3.0);
        }
        let model = CpModel::new(Graph::complete(3));
        let (set, _) = heuristic_dive(&model, &scores(&[1.0 / 3.0; 3]), 0);
        assert_eq!(set.value, 1.0);
    }

    #[test]
    fn cycle_five_dives() {
        let model = CpModel::new(Graph::cycle(5));
        let s = scores(&[0.4472136; 5]);
        let values: Vec<f64> = (0..5)
            .map(|k| descend(&model, &compute_heuristic(&model, &s, true, k)).value)
            .collect();
        assert!(values.iter().all(|&v| v >= 1.0));
        assert!(values.contains(&2.0));
        assert_eq!(heuristic_dive(&model, &s, 0).0.value, 2.0);
    }

    #[test]
    fn dive_path_reproduces_the_dive() {
        let g = crate::graph::random_graph(20, 0.3, true, 5).unwrap();
        let model = CpModel::new(g);
        let s = scores(&[0.5; 20]);
        let (set, path) = heuristic_dive(&model, &s, 11);
        assert_eq!(descend(&model, &path), set);
        assert!(model.graph().is_stable(&set.members));
    }
}
