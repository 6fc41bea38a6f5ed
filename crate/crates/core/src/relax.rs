//! Semidefinite relaxations in the form
//!
//! ```text
//! max tr(C X)  s.t.  tr(A_j X) (<= | =) b_j,  X ⪰ 0
//! ```
//!
//! Three builders produce [`SdpProblem`]s: the two theta formulations for the
//! stable set problem ([`build_theta1`], [`build_theta3`]) and the generic
//! lifting of a binary linear model ([`lift`]), fed by [`binarize`] when the
//! original variables have larger finite domains.

use std::fmt::Write as _;

use nalgebra::DMatrix;
use thiserror::Error;

use crate::graph::Graph;

#[derive(Debug, Error, PartialEq)]
pub enum RelaxError {
    #[error("domain of variable {0} is empty")]
    EmptyDomain(usize),
    #[error("vertex {vertex} has negative weight {weight}")]
    NegativeWeight { vertex: usize, weight: f64 },
    #[error("constraint {index} has {got} coefficients, model has {expected} variables")]
    CoefficientLength {
        index: usize,
        got: usize,
        expected: usize,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    /// `tr(A X) <= b`
    Le,
    /// `tr(A X) = b`
    Eq,
}

/// Symmetric matrix stored as upper-triangle entries `(row, col, value)`,
/// `row <= col`. An off-diagonal entry stands for both `(row, col)` and
/// `(col, row)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseSym {
    dim: usize,
    entries: Vec<(usize, usize, f64)>,
}

impl SparseSym {
    pub fn new(dim: usize) -> Self {
        SparseSym {
            dim,
            entries: Vec::new(),
        }
    }

    /// Adds `value` at `(i, j)` and, off the diagonal, at `(j, i)`.
    pub fn add(&mut self, i: usize, j: usize, value: f64) {
        assert!(i < self.dim && j < self.dim, "entry ({i}, {j}) outside dim {}", self.dim);
        let (r, c) = (i.min(j), i.max(j));
        match self.entries.iter_mut().find(|e| e.0 == r && e.1 == c) {
            Some(e) => e.2 += value,
            None => self.entries.push((r, c, value)),
        }
    }

    pub fn with(mut self, i: usize, j: usize, value: f64) -> Self {
        self.add(i, j, value);
        self
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entries(&self) -> &[(usize, usize, f64)] {
        &self.entries
    }

    /// Entries of the full matrix, both triangles.
    pub fn full_entries(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        self.entries.iter().flat_map(|&(r, c, v)| {
            let mirror = (r != c).then_some((c, r, v));
            std::iter::once((r, c, v)).chain(mirror)
        })
    }

    /// `tr(A M)` for any square `M` (not necessarily symmetric).
    pub fn trace_with(&self, m: &DMatrix<f64>) -> f64 {
        self.full_entries().map(|(p, q, v)| v * m[(q, p)]).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.full_entries().map(|(_, _, v)| v * v).sum::<f64>().sqrt()
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let mut out = DMatrix::zeros(self.dim, self.dim);
        for (p, q, v) in self.full_entries() {
            out[(p, q)] += v;
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SdpConstraint {
    pub matrix: SparseSym,
    pub sense: Sense,
    pub rhs: f64,
}

/// Which construction produced a problem, and where each model variable sits
/// on the diagonal of the matrix variable.
#[derive(Debug, Clone, PartialEq)]
pub enum LabelMap {
    /// No variable mapping (hand-built problems).
    Absent,
    /// `X̃` of size n; variable i at diagonal entry i.
    Theta3 { weights: Vec<f64> },
    /// `X` of size n+1; variable i at diagonal entry i+1.
    Theta1,
    /// Lifted binary model; binary variable k at diagonal entry k+1.
    Lifted,
}

impl LabelMap {
    /// Diagonal index holding model variable `var`.
    pub fn diagonal_index(&self, var: usize) -> Option<usize> {
        match self {
            LabelMap::Absent => None,
            LabelMap::Theta3 { .. } => Some(var),
            LabelMap::Theta1 | LabelMap::Lifted => Some(var + 1),
        }
    }
}

/// Standard-form SDP with a maximization objective.
#[derive(Debug, Clone, PartialEq)]
pub struct SdpProblem {
    pub dim: usize,
    pub cost: DMatrix<f64>,
    pub constraints: Vec<SdpConstraint>,
    pub labels: LabelMap,
}

impl SdpProblem {
    pub fn new(cost: DMatrix<f64>) -> Self {
        assert!(cost.is_square(), "cost matrix must be square");
        SdpProblem {
            dim: cost.nrows(),
            cost,
            constraints: Vec::new(),
            labels: LabelMap::Absent,
        }
    }

    pub fn push(&mut self, matrix: SparseSym, sense: Sense, rhs: f64) {
        assert_eq!(matrix.dim(), self.dim, "constraint dimension mismatch");
        self.constraints.push(SdpConstraint { matrix, sense, rhs });
    }

    pub fn num_constraints(&self) -> usize {
        self.constraints.len()
    }

    pub fn num_inequalities(&self) -> usize {
        self.constraints
            .iter()
            .filter(|c| c.sense == Sense::Le)
            .count()
    }

    /// Writes the problem in SDPA sparse format (see [`write_sdpa`]).
    pub fn to_sdpa(&self) -> String {
        write_sdpa(self)
    }
}

/// A 0/1 linear model: `max objective·d` s.t. `a·d (<= | =) b`, `d ∈ {0,1}^N`.
#[derive(Debug, Clone, PartialEq)]
pub struct BinaryModel {
    pub names: Vec<String>,
    pub constraints: Vec<LinearConstraint>,
    pub objective: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LinearConstraint {
    pub coefficients: Vec<f64>,
    pub sense: Sense,
    pub rhs: f64,
}

impl BinaryModel {
    pub fn num_vars(&self) -> usize {
        self.names.len()
    }

    /// Native stable-set model: one binary per vertex, `x_i + x_j <= 1` per
    /// edge, objective the vertex weights.
    pub fn stable_set(g: &Graph) -> Self {
        let n = g.n();
        let constraints = g
            .edges()
            .iter()
            .map(|&(i, j)| {
                let mut coefficients = vec![0.0; n];
                coefficients[i] = 1.0;
                coefficients[j] = 1.0;
                LinearConstraint {
                    coefficients,
                    sense: Sense::Le,
                    rhs: 1.0,
                }
            })
            .collect();
        BinaryModel {
            names: (1..=n).map(|i| format!("x{i}")).collect(),
            constraints,
            objective: g.weights().to_vec(),
        }
    }
}

/// Recovers `(original variable, domain value)` from a binary index.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelMap {
    pairs: Vec<(usize, i64)>,
}

impl ChannelMap {
    pub fn get(&self, binary: usize) -> Option<(usize, i64)> {
        self.pairs.get(binary).copied()
    }

    /// Binary index encoding `var = value`.
    pub fn index_of(&self, var: usize, value: i64) -> Option<usize> {
        self.pairs.iter().position(|&p| p == (var, value))
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }
}

/// One binary `x_ij` per `(variable i, value j ∈ D_i)`, with an exactly-one
/// row per original variable. The objective starts at zero.
pub fn binarize(domains: &[Vec<i64>]) -> Result<(BinaryModel, ChannelMap), RelaxError> {
    let mut pairs = Vec::new();
    let mut spans = Vec::with_capacity(domains.len());
    for (i, domain) in domains.iter().enumerate() {
        let mut values = domain.clone();
        values.sort_unstable();
        values.dedup();
        if values.is_empty() {
            return Err(RelaxError::EmptyDomain(i));
        }
        let start = pairs.len();
        pairs.extend(values.into_iter().map(|v| (i, v)));
        spans.push(start..pairs.len());
    }
    let total = pairs.len();
    let constraints = spans
        .into_iter()
        .map(|span| {
            let mut coefficients = vec![0.0; total];
            coefficients[span].fill(1.0);
            LinearConstraint {
                coefficients,
                sense: Sense::Eq,
                rhs: 1.0,
            }
        })
        .collect();
    let names = pairs
        .iter()
        .map(|&(i, v)| format!("x{}_{}", i + 1, v))
        .collect();
    let model = BinaryModel {
        names,
        constraints,
        objective: vec![0.0; total],
    };
    Ok((model, ChannelMap { pairs }))
}

/// Lifts a binary model to an SDP over `X = (1, dᵀ)ᵀ(1, dᵀ)` of size N+1.
///
/// Constraint order: `X_00 = 1`, then `X_ii = X_0i` for each variable, then
/// the model's linear rows. A linear row `a·d ~ b` becomes
/// `Σ a_i (X_ii + X_0i) / 2 ~ b`.
pub fn lift(model: &BinaryModel) -> Result<SdpProblem, RelaxError> {
    let n = model.num_vars();
    for (index, c) in model.constraints.iter().enumerate() {
        if c.coefficients.len() != n {
            return Err(RelaxError::CoefficientLength {
                index,
                got: c.coefficients.len(),
                expected: n,
            });
        }
    }
    let dim = n + 1;
    let mut cost = DMatrix::zeros(dim, dim);
    for (i, &w) in model.objective.iter().enumerate() {
        cost[(i + 1, i + 1)] = w;
    }
    let mut p = SdpProblem::new(cost);
    push_homogenizing(&mut p, n);
    for c in &model.constraints {
        let mut a = SparseSym::new(dim);
        for (i, &coef) in c.coefficients.iter().enumerate() {
            if coef != 0.0 {
                a.add(i + 1, i + 1, coef / 2.0);
                a.add(0, i + 1, coef / 4.0);
            }
        }
        p.push(a, c.sense, c.rhs);
    }
    p.labels = LabelMap::Lifted;
    Ok(p)
}

/// `X_00 = 1` and `X_ii = X_0i` for `i = 1..=n`.
fn push_homogenizing(p: &mut SdpProblem, n: usize) {
    let dim = n + 1;
    p.push(SparseSym::new(dim).with(0, 0, 1.0), Sense::Eq, 1.0);
    for i in 1..=n {
        let a = SparseSym::new(dim).with(i, i, 1.0).with(0, i, -0.5);
        p.push(a, Sense::Eq, 0.0);
    }
}

/// Theta over the `(n+1) × (n+1)` matrix: `max Σ w_i X_ii` with
/// `X_00 = 1`, `X_ii = X_0i` and `X_ij = 0` on edges.
pub fn build_theta1(g: &Graph) -> SdpProblem {
    let n = g.n();
    let dim = n + 1;
    let mut cost = DMatrix::zeros(dim, dim);
    for (i, &w) in g.weights().iter().enumerate() {
        cost[(i + 1, i + 1)] = w;
    }
    let mut p = SdpProblem::new(cost);
    push_homogenizing(&mut p, n);
    for &(i, j) in g.edges() {
        p.push(SparseSym::new(dim).with(i + 1, j + 1, 0.5), Sense::Eq, 0.0);
    }
    p.labels = LabelMap::Theta1;
    p
}

/// Theta over the `n × n` matrix `X̃`: `max tr(U X̃)` with `tr X̃ = 1` and
/// `X̃_ij = 0` on edges, where `U_ij = sqrt(w_i w_j)`.
pub fn build_theta3(g: &Graph) -> Result<SdpProblem, RelaxError> {
    let n = g.n();
    if let Some((v, &w)) = g.weights().iter().enumerate().find(|(_, &w)| w < 0.0) {
        return Err(RelaxError::NegativeWeight {
            vertex: v + 1,
            weight: w,
        });
    }
    let roots: Vec<f64> = g.weights().iter().map(|w| w.sqrt()).collect();
    let cost = DMatrix::from_fn(n, n, |i, j| roots[i] * roots[j]);
    let mut p = SdpProblem::new(cost);
    let mut trace = SparseSym::new(n);
    for i in 0..n {
        trace.add(i, i, 1.0);
    }
    p.push(trace, Sense::Eq, 1.0);
    for &(i, j) in g.edges() {
        p.push(SparseSym::new(n).with(i, j, 0.5), Sense::Eq, 0.0);
    }
    p.labels = LabelMap::Theta3 {
        weights: g.weights().to_vec(),
    };
    Ok(p)
}

/// SDPA sparse text.
///
/// The problem maps onto SDPA's dual form (`max F0•Y s.t. Fj•Y = cj`,
/// `Y ⪰ 0`) with `F0 = C`, `Fj = A_j`, `cj = b_j`. Inequalities get a slack
/// in a trailing diagonal block (negative block size). Entry lines are
/// `<matrix> <block> <i> <j> <value>`, 1-based, upper triangle.
pub fn write_sdpa(p: &SdpProblem) -> String {
    let slacks = p.num_inequalities();
    let mut out = String::new();
    let _ = writeln!(out, "\"theta-guide SDP: max tr(C X)\"");
    let _ = writeln!(out, "{}", p.num_constraints());
    let _ = writeln!(out, "{}", if slacks > 0 { 2 } else { 1 });
    if slacks > 0 {
        let _ = writeln!(out, "{} -{}", p.dim, slacks);
    } else {
        let _ = writeln!(out, "{}", p.dim);
    }
    let rhs: Vec<String> = p.constraints.iter().map(|c| format!("{}", c.rhs)).collect();
    let _ = writeln!(out, "{}", rhs.join(" "));
    for i in 0..p.dim {
        for j in i..p.dim {
            let v = p.cost[(i, j)];
            if v != 0.0 {
                let _ = writeln!(out, "0 1 {} {} {}", i + 1, j + 1, v);
            }
        }
    }
    let mut slack = 0;
    for (k, c) in p.constraints.iter().enumerate() {
        let mut entries = c.matrix.entries().to_vec();
        entries.sort_by_key(|&(r, col, _)| (r, col));
        for (r, col, v) in entries {
            if v != 0.0 {
                let _ = writeln!(out, "{} 1 {} {} {}", k + 1, r + 1, col + 1, v);
            }
        }
        if c.sense == Sense::Le {
            slack += 1;
            let _ = writeln!(out, "{} 2 {} {} 1", k + 1, slack, slack);
        }
    }
    out
}
