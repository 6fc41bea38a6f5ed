//! Domains, propagation and the undo trail of the binary stable-set model.

use crate::graph::StableSet;

use super::CpModel;

/// Domain of a 0/1 variable as a bit set: bit 0 = value 0, bit 1 = value 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Domain(u8);

impl Domain {
    pub const EMPTY: Domain = Domain(0);
    pub const ZERO: Domain = Domain(0b01);
    pub const ONE: Domain = Domain(0b10);
    pub const BOTH: Domain = Domain(0b11);

    pub fn contains(self, value: u8) -> bool {
        self.0 & (1 << value) != 0
    }

    pub fn is_fixed(self) -> bool {
        self == Domain::ZERO || self == Domain::ONE
    }

    fn without(self, value: u8) -> Domain {
        Domain(self.0 & !(1 << value))
    }
}

/// Result of applying one branching decision.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Propagation {
    Consistent,
    /// The node cannot beat the incumbent.
    PruneBound,
    /// The incumbent already meets the relaxation bound: search is over.
    PruneOptimal,
    /// Some domain became empty.
    Conflict,
}

#[derive(Debug, Clone, Copy)]
struct Level {
    trail_len: usize,
    fixed_weight: f64,
    free_weight: f64,
    free_count: usize,
}

/// Mutable search node: domains plus the chronological trail that restores
/// them. `fixed_weight + free_weight` bounds every completion of the node.
#[derive(Debug, Clone)]
pub struct SearchState<'m> {
    model: &'m CpModel,
    domains: Vec<Domain>,
    trail: Vec<(usize, Domain)>,
    levels: Vec<Level>,
    fixed_weight: f64,
    free_weight: f64,
    free_count: usize,
    incumbent: Option<StableSet>,
    /// Off only for tests that enumerate the raw assignment tree.
    propagate: bool,
    #[cfg(debug_assertions)]
    hashes: Vec<u64>,
}

impl<'m> SearchState<'m> {
    pub fn new(model: &'m CpModel) -> Self {
        let n = model.graph().n();
        SearchState {
            model,
            domains: vec![Domain::BOTH; n],
            trail: Vec::with_capacity(n * 4),
            levels: Vec::with_capacity(n),
            fixed_weight: 0.0,
            free_weight: model.graph().total_weight(),
            free_count: n,
            incumbent: None,
            propagate: true,
            #[cfg(debug_assertions)]
            hashes: Vec::with_capacity(n),
        }
    }

    /// Disables neighbor removal and bound pruning, leaving a plain
    /// enumeration of all 0/1 assignments.
    pub fn without_propagation(mut self) -> Self {
        self.propagate = false;
        self
    }

    pub fn propagation_enabled(&self) -> bool {
        self.propagate
    }

    pub fn model(&self) -> &'m CpModel {
        self.model
    }

    pub fn domain(&self, var: usize) -> Domain {
        self.domains[var]
    }

    pub fn domains(&self) -> &[Domain] {
        &self.domains
    }

    pub fn fixed_weight(&self) -> f64 {
        self.fixed_weight
    }

    pub fn free_weight(&self) -> f64 {
        self.free_weight
    }

    /// Number of variables whose domain is still `{0, 1}`.
    pub fn free_count(&self) -> usize {
        self.free_count
    }

    pub fn depth(&self) -> usize {
        self.levels.len()
    }

    pub fn incumbent(&self) -> Option<&StableSet> {
        self.incumbent.as_ref()
    }

    pub fn incumbent_value(&self) -> Option<f64> {
        self.incumbent.as_ref().map(|s| s.value)
    }

    /// Offers a candidate; kept if it beats the incumbent. Returns whether it
    /// was kept.
    pub fn offer(&mut self, candidate: StableSet) -> bool {
        debug_assert!(self.model.graph().is_stable(&candidate.members));
        if self.incumbent_value().is_some_and(|v| candidate.value <= v) {
            return false;
        }
        self.incumbent = Some(candidate);
        true
    }

    /// True once the incumbent reaches the relaxation bound.
    pub fn incumbent_is_optimal(&self) -> bool {
        match (self.model.bound_target(), self.incumbent_value()) {
            (Some(target), Some(v)) => v >= target,
            _ => false,
        }
    }

    /// Variables currently fixed to 1, which always form a stable set when
    /// propagation is on.
    pub fn current_set(&self) -> StableSet {
        let members: Vec<usize> = (0..self.domains.len())
            .filter(|&v| self.domains[v] == Domain::ONE)
            .collect();
        StableSet {
            value: self.fixed_weight,
            members,
        }
    }

    pub fn is_leaf(&self) -> bool {
        self.free_count == 0
    }

    /// Fixes `var` to `value` and propagates. The decision is recorded on the
    /// trail whatever the outcome; the caller undoes it with [`Self::undo`].
    pub fn assign(&mut self, var: usize, value: u8) -> Propagation {
        debug_assert!(self.domains[var].contains(value), "value not in domain");
        #[cfg(debug_assertions)]
        self.hashes.push(self.domain_hash());
        self.levels.push(Level {
            trail_len: self.trail.len(),
            fixed_weight: self.fixed_weight,
            free_weight: self.free_weight,
            free_count: self.free_count,
        });

        let g = self.model.graph();
        let w = g.weight(var);
        let was_free = self.domains[var] == Domain::BOTH;
        self.set(var, if value == 1 { Domain::ONE } else { Domain::ZERO });
        if was_free {
            self.free_weight -= w;
            self.free_count -= 1;
        }
        if value == 1 {
            self.fixed_weight += w;
            if self.propagate {
                for &u in g.neighbors(var) {
                    let d = self.domains[u];
                    if !d.contains(1) {
                        continue;
                    }
                    let reduced = d.without(1);
                    self.set(u, reduced);
                    if reduced == Domain::EMPTY {
                        return Propagation::Conflict;
                    }
                    self.free_weight -= g.weight(u);
                    self.free_count -= 1;
                }
            }
        }

        if !self.propagate {
            return Propagation::Consistent;
        }
        if self.incumbent_is_optimal() {
            return Propagation::PruneOptimal;
        }
        match self.incumbent_value() {
            Some(best) if self.fixed_weight + self.free_weight <= best => Propagation::PruneBound,
            _ => Propagation::Consistent,
        }
    }

    fn set(&mut self, var: usize, d: Domain) {
        self.trail.push((var, self.domains[var]));
        self.domains[var] = d;
    }

    /// Retracts the most recent decision and everything it propagated.
    pub fn undo(&mut self) {
        let level = self.levels.pop().expect("undo without a decision");
        while self.trail.len() > level.trail_len {
            let (var, old) = self.trail.pop().unwrap();
            self.domains[var] = old;
        }
        self.fixed_weight = level.fixed_weight;
        self.free_weight = level.free_weight;
        self.free_count = level.free_count;
        #[cfg(debug_assertions)]
        {
            let before = self.hashes.pop().unwrap();
            debug_assert_eq!(before, self.domain_hash(), "trail did not restore domains");
        }
    }

    /// FNV-1a over the domain bytes.
    pub fn domain_hash(&self) -> u64 {
        self.domains.iter().fold(0xcbf2_9ce4_8422_2325u64, |h, d| {
            (h ^ d.0 as u64).wrapping_mul(0x0000_0100_0000_01b3)
        })
    }
}
