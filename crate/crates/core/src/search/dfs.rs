use super::{record_leaf, Clock, CpModel, Domain, Propagation, SearchLimits, SearchOutcome, SearchState, Stop};

struct Dfs<'m> {
    st: SearchState<'m>,
    clock: Clock,
    backtracks: u64,
    stop: Option<Stop>,
}

impl Dfs<'_> {
    fn node(&mut self) {
        if self.clock.tick() {
            self.stop = Some(Stop::Timeout);
            return;
        }
        let Some(var) = self.st.domains().iter().position(|&d| d == Domain::BOTH) else {
            if record_leaf(&mut self.st) && self.st.incumbent_is_optimal() {
                self.stop = Some(Stop::Proven);
            }
            return;
        };
        for value in [1u8, 0] {
            if value == 0 {
                // Back at this choice point to take the other branch.
                self.backtracks += 1;
            }
            match self.st.assign(var, value) {
                Propagation::Consistent => self.node(),
                Propagation::PruneOptimal => self.stop = Some(Stop::Proven),
                Propagation::PruneBound | Propagation::Conflict => {}
            }
            self.st.undo();
            if self.stop.is_some() {
                return;
            }
        }
    }
}

/// Depth-first search in index order, value 1 before 0, with chronological
/// backtracking. Uses the model's upper bound when it has one.
pub fn dfs_search(model: &CpModel, limits: &SearchLimits) -> SearchOutcome {
    let mut st = SearchState::new(model);
    if !limits.propagate {
        st = st.without_propagation();
    }
    let mut dfs = Dfs {
        st,
        clock: Clock::new(limits.time_limit),
        backtracks: 0,
        stop: None,
    };
    dfs.node();
    let complete = dfs.stop.is_none();
    SearchOutcome {
        best: dfs.st.incumbent().cloned(),
        backtracks: dfs.backtracks,
        nodes: dfs.clock.nodes,
        complete,
        proven: complete || dfs.stop == Some(Stop::Proven),
        timed_out: dfs.stop == Some(Stop::Timeout),
        best_discrepancy: None,
        leaves_per_wave: Vec::new(),
        elapsed: dfs.clock.start.elapsed(),
    }
}
