use crate::graph::StableSet;

use super::{
    record_leaf, Clock, CpModel, Domain, HeuristicPath, Propagation, SearchLimits, SearchOutcome,
    SearchState, Stop,
};

struct Lds<'m, 'p> {
    st: SearchState<'m>,
    path: &'p HeuristicPath,
    clock: Clock,
    backtracks: u64,
    stop: Option<Stop>,
    wave: usize,
    /// Set when some deviation was left out of the current wave for lack of
    /// budget, i.e. a later wave has leaves of its own.
    deeper: bool,
    best_discrepancy: Option<usize>,
    leaves: Vec<u64>,
}

impl Lds<'_, '_> {
    /// Explores the subtree below the current node using exactly `k` more
    /// deviations.
    fn node(&mut self, k: usize) {
        if self.clock.tick() {
            self.stop = Some(Stop::Timeout);
            return;
        }
        let Some(&var) = self
            .path
            .order
            .iter()
            .find(|&&v| self.st.domain(v) == Domain::BOTH)
        else {
            if k == 0 {
                self.leaves[self.wave] += 1;
                if record_leaf(&mut self.st) {
                    self.best_discrepancy = Some(self.wave);
                    if self.st.incumbent_is_optimal() {
                        self.stop = Some(Stop::Proven);
                    }
                }
            }
            return;
        };
        let suggested = self.path.values[var];
        let tried = self.branch(var, suggested, k);
        if self.stop.is_some() {
            return;
        }
        if k == 0 {
            self.deeper = true;
            return;
        }
        if tried {
            self.backtracks += 1;
        }
        self.branch(var, 1 - suggested, k - 1);
    }

    /// Returns false when the branch was skipped for lack of decisions to
    /// spend the budget on; that subtree belongs to an earlier wave.
    fn branch(&mut self, var: usize, value: u8, k: usize) -> bool {
        let mut tried = true;
        match self.st.assign(var, value) {
            Propagation::Consistent if k > self.st.free_count() => tried = false,
            Propagation::Consistent => self.node(k),
            Propagation::PruneOptimal => self.stop = Some(Stop::Proven),
            Propagation::PruneBound | Propagation::Conflict => {}
        }
        self.st.undo();
        tried
    }
}

/// Limited discrepancy search along `path`. Wave `k` visits exactly the
/// leaves reached by deviating from the suggested value at `k` decisions.
/// Waves run `0..=max_discrepancy` (`None` means no limit) and stop early
/// once a wave leaves no deviation unexplored.
///
/// `initial` seeds the incumbent, typically with the dive result; it is
/// credited to wave 0.
pub fn lds_search(
    model: &CpModel,
    path: &HeuristicPath,
    max_discrepancy: Option<usize>,
    initial: Option<StableSet>,
    limits: &SearchLimits,
) -> SearchOutcome {
    let n = model.graph().n();
    assert_eq!(path.len(), n, "path must cover every variable");
    let mut st = SearchState::new(model);
    if !limits.propagate {
        st = st.without_propagation();
    }
    let mut best_discrepancy = None;
    if let Some(set) = initial {
        if st.offer(set) {
            best_discrepancy = Some(0);
        }
    }
    let mut lds = Lds {
        st,
        path,
        clock: Clock::new(limits.time_limit),
        backtracks: 0,
        stop: None,
        wave: 0,
        deeper: false,
        best_discrepancy,
        leaves: Vec::new(),
    };
    if lds.st.incumbent_is_optimal() {
        lds.stop = Some(Stop::Proven);
    }

    let last = max_discrepancy.unwrap_or(n).min(n);
    let mut complete = false;
    let mut k = 0;
    while lds.stop.is_none() && k <= last {
        lds.wave = k;
        lds.deeper = false;
        lds.leaves.push(0);
        lds.node(k);
        if lds.stop.is_none() && !lds.deeper {
            complete = true;
            break;
        }
        k += 1;
    }
    SearchOutcome {
        best: lds.st.incumbent().cloned(),
        backtracks: lds.backtracks,
        nodes: lds.clock.nodes,
        complete,
        proven: complete || lds.stop == Some(Stop::Proven),
        timed_out: lds.stop == Some(Stop::Timeout),
        best_discrepancy: lds.best_discrepancy,
        leaves_per_wave: lds.leaves,
        elapsed: lds.clock.start.elapsed(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{brute_force_alpha, random_graph, Graph};

    fn binomial(n: u64, k: u64) -> u64 {
        (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
    }

    #[test]
    fn budget_zero_follows_the_path() {
        let model = CpModel::new(Graph::empty(6));
        let out = lds_search(&model, &HeuristicPath::identity(6), Some(0), None, &SearchLimits::default());
        assert_eq!(out.best_value(), Some(6.0));
        assert_eq!(out.backtracks, 0);
        assert_eq!(out.best_discrepancy, Some(0));
        assert!(!out.complete);
    }

    #[test]
    fn bound_proves_the_first_leaf() {
        let model = CpModel::new(Graph::empty(6)).with_upper_bound(6.0);
        let out = lds_search(&model, &HeuristicPath::identity(6), None, None, &SearchLimits::default());
        assert!(out.proven);
        assert_eq!(out.backtracks, 0);
        assert_eq!(out.leaves_per_wave, vec![1]);
    }

    #[test]
    fn waves_partition_the_assignment_space() {
        for n in 2..=10 {
            let g = random_graph(n, 0.3, false, n as u64).unwrap();
            let model = CpModel::new(g);
            let limits = SearchLimits {
                propagate: false,
                ..SearchLimits::default()
            };
            let out = lds_search(&model, &HeuristicPath::identity(n), None, None, &limits);
            let expected: Vec<u64> = (0..=n as u64).map(|k| binomial(n as u64, k)).collect();
            assert_eq!(out.leaves_per_wave, expected, "n = {n}");
            assert_eq!(out.leaves_per_wave.iter().sum::<u64>(), 1 << n);
            assert!(out.complete);
        }
    }

    #[test]
    fn full_budget_matches_brute_force() {
        for seed in 0..24 {
            let density = 0.05 + 0.04 * seed as f64;
            let g = random_graph(13, density, seed % 3 == 0, 100 + seed).unwrap();
            let expected = brute_force_alpha(&g).unwrap().value;
            let model = CpModel::new(g);
            let out = lds_search(&model, &HeuristicPath::identity(13), None, None, &SearchLimits::default());
            assert!(out.complete, "seed {seed}");
            assert_eq!(out.best_value(), Some(expected), "seed {seed}");
        }
    }

    #[test]
    fn cut_off_budget_is_not_complete() {
        // The path suggests 0 everywhere, so wave 0 ends in the empty set and
        // a single deviation reaches one vertex.
        let model = CpModel::new(Graph::empty(4));
        let mut path = HeuristicPath::identity(4);
        path.values = vec![0; 4];
        let out = lds_search(&model, &path, Some(1), None, &SearchLimits::default());
        assert_eq!(out.best_value(), Some(1.0));
        assert_eq!(out.best_discrepancy, Some(1));
        assert!(!out.complete && !out.proven);
    }

    #[test]
    fn initial_incumbent_is_credited_to_wave_zero() {
        let g = Graph::cycle(5);
        let seed_set = g.stable_set(&[0, 2]).unwrap();
        let model = CpModel::new(g);
        let out = lds_search(&model, &HeuristicPath::identity(5), None, Some(seed_set), &SearchLimits::default());
        assert_eq!(out.best_value(), Some(2.0));
        assert_eq!(out.best_discrepancy, Some(0));
        assert!(out.complete);
    }
}
