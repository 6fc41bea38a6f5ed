//! Primal-dual interior-point solver for [`SdpProblem`]s.
//!
//! Infeasible path-following with the HKM search direction and a Mehrotra
//! predictor-corrector. Each iteration forms the dense Schur complement
//! `M_ij = tr(A_i X A_j Z⁻¹)` and factors it with [`DenseCholesky`].
//! Inequality rows carry a slack variable in a diagonal (LP) block, so the
//! iterates are `(X, s)` primal and `(y, Z, z)` dual:
//!
//! ```text
//! primal  max tr(C X)  s.t.  tr(A_j X) + s_j = b_j,   X ⪰ 0, s ≥ 0
//! dual    min bᵀy      s.t.  Σ y_j A_j − C = Z ⪰ 0,  z_j = y_j ≥ 0
//! ```
//!
//! `s_j` exists only for `≤` rows.

mod cholesky;
mod scores;

pub use cholesky::{DenseCholesky, PivotCollapse};
pub use scores::{extract_scores, ScoreError, ThetaScores};

use nalgebra::{DMatrix, SymmetricEigen};

use crate::relax::{Sense, SdpProblem};

/// Pivot threshold used on the first Schur matrix, which equals the Gram
/// matrix of the constraints; a collapse there means linear dependence.
const DEPENDENCE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveOptions {
    /// Relative duality gap target.
    pub gap_tol: f64,
    /// Relative primal and dual infeasibility target.
    pub feas_tol: f64,
    pub max_iter: usize,
    /// Fraction-to-boundary factor for the step length.
    pub step_fraction: f64,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            gap_tol: 1e-6,
            feas_tol: 1e-8,
            max_iter: 100,
            step_fraction: 0.98,
        }
    }
}

impl SolveOptions {
    pub fn new(gap_tol: f64, max_iter: usize) -> Self {
        SolveOptions {
            gap_tol,
            max_iter,
            ..Default::default()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SdpStatus {
    Optimal,
    MaxIterations,
    NumericalFailure,
}

/// Per-iteration progress, as streamed to a trace callback.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IterationStats {
    pub iteration: usize,
    pub primal_value: f64,
    pub dual_value: f64,
    pub relative_gap: f64,
    pub primal_infeasibility: f64,
    pub dual_infeasibility: f64,
    pub mu: f64,
    pub primal_step: f64,
    pub dual_step: f64,
}

impl IterationStats {
    pub const CSV_HEADER: &'static str =
        "iteration,primal_value,dual_value,relative_gap,primal_infeasibility,dual_infeasibility,mu,primal_step,dual_step";

    pub fn csv_row(&self) -> String {
        format!(
            "{},{:e},{:e},{:e},{:e},{:e},{:e},{},{}",
            self.iteration,
            self.primal_value,
            self.dual_value,
            self.relative_gap,
            self.primal_infeasibility,
            self.dual_infeasibility,
            self.mu,
            self.primal_step,
            self.dual_step
        )
    }
}

/// Final iterate with its certificates.
///
/// `z` is recomputed as `Σ y_j A_j − C`, so dual feasibility is exact and
/// PSD-ness of `z` is the dual certificate.
#[derive(Debug, Clone)]
pub struct SdpSolution {
    pub x: DMatrix<f64>,
    /// Primal slacks of the `≤` rows, in constraint order.
    pub slack: Vec<f64>,
    pub y: Vec<f64>,
    pub z: DMatrix<f64>,
    pub primal_value: f64,
    pub dual_value: f64,
    pub iterations: usize,
    pub status: SdpStatus,
    pub diagnostic: Option<String>,
    inequality_rows: Vec<usize>,
}

impl SdpSolution {
    /// `|primal − dual| / (1 + |primal|)`.
    pub fn relative_gap(&self) -> f64 {
        (self.primal_value - self.dual_value).abs() / (1.0 + self.primal_value.abs())
    }

    /// `tr(A_j X) − b_j` per constraint.
    pub fn residuals(&self, p: &SdpProblem) -> Vec<f64> {
        p.constraints
            .iter()
            .map(|c| c.matrix.trace_with(&self.x) - c.rhs)
            .collect()
    }

    /// Largest violation scaled by `1 + |b_j|`; inequalities only count when
    /// exceeded.
    pub fn max_scaled_violation(&self, p: &SdpProblem) -> f64 {
        p.constraints
            .iter()
            .zip(self.residuals(p))
            .map(|(c, r)| {
                let v = match c.sense {
                    Sense::Eq => r.abs(),
                    Sense::Le => r.max(0.0),
                };
                v / (1.0 + c.rhs.abs())
            })
            .fold(0.0, f64::max)
    }

    pub fn min_eigenvalue_x(&self) -> f64 {
        min_eigenvalue(&self.x)
    }

    pub fn min_eigenvalue_z(&self) -> f64 {
        let lp = self.slack_duals().fold(f64::INFINITY, f64::min);
        min_eigenvalue(&self.z).min(lp)
    }

    /// Dual variables of the `≤` rows; their sign is the LP-block certificate.
    fn slack_duals(&self) -> impl Iterator<Item = f64> + '_ {
        self.inequality_rows.iter().map(|&j| self.y[j])
    }
}

impl SdpSolution {
    #[allow(clippy::too_many_arguments)]
    fn assemble(
        p: &SdpProblem,
        x: DMatrix<f64>,
        slack: Vec<f64>,
        y: Vec<f64>,
        iterations: usize,
        status: SdpStatus,
        diagnostic: Option<String>,
    ) -> Self {
        let mut z = adjoint(p, &y);
        z -= &p.cost;
        symmetrize(&mut z);
        let primal_value = p.cost.dot(&x);
        let dual_value = p.constraints.iter().zip(&y).map(|(c, y)| c.rhs * y).sum();
        SdpSolution {
            x,
            slack,
            y,
            z,
            primal_value,
            dual_value,
            iterations,
            status,
            diagnostic,
            inequality_rows: inequality_rows(p),
        }
    }
}

fn inequality_rows(p: &SdpProblem) -> Vec<usize> {
    p.constraints
        .iter()
        .enumerate()
        .filter(|(_, c)| c.sense == Sense::Le)
        .map(|(j, _)| j)
        .collect()
}

pub fn min_eigenvalue(m: &DMatrix<f64>) -> f64 {
    if m.nrows() == 0 {
        return f64::INFINITY;
    }
    SymmetricEigen::new(m.clone())
        .eigenvalues
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min)
}

/// `Σ y_j A_j` (matrix block only).
fn adjoint(p: &SdpProblem, y: &[f64]) -> DMatrix<f64> {
    let mut out = DMatrix::zeros(p.dim, p.dim);
    for (c, &yj) in p.constraints.iter().zip(y) {
        if yj != 0.0 {
            for (r, s, v) in c.matrix.full_entries() {
                out[(r, s)] += yj * v;
            }
        }
    }
    out
}

fn symmetrize(m: &mut DMatrix<f64>) {
    let n = m.nrows();
    for i in 0..n {
        for j in i + 1..n {
            let v = 0.5 * (m[(i, j)] + m[(j, i)]);
            m[(i, j)] = v;
            m[(j, i)] = v;
        }
    }
}

/// Largest `α` with `x + α dx ⪰ 0`, given `x ≻ 0` (infinite when `dx ⪰ 0`
/// along every direction).
fn max_psd_step(x: &DMatrix<f64>, dx: &DMatrix<f64>) -> f64 {
    let Some(chol) = x.clone().cholesky() else {
        return 0.0;
    };
    let l = chol.l();
    let Some(half) = l.solve_lower_triangular(dx) else {
        return 0.0;
    };
    let Some(mut scaled) = l.solve_lower_triangular(&half.transpose()) else {
        return 0.0;
    };
    symmetrize(&mut scaled);
    let lambda = min_eigenvalue(&scaled);
    if lambda >= 0.0 {
        f64::INFINITY
    } else {
        -1.0 / lambda
    }
}

fn max_lp_step(v: &[f64], dv: &[f64]) -> f64 {
    v.iter()
        .zip(dv)
        .filter(|(_, &d)| d < 0.0)
        .map(|(&x, &d)| -x / d)
        .fold(f64::INFINITY, f64::min)
}

/// Constraint data laid out for the Schur complement.
struct Rows {
    full: Vec<Vec<(usize, usize, f64)>>,
    /// LP-block index of each row's slack.
    slack_of: Vec<Option<usize>>,
    dense: Vec<bool>,
    b: Vec<f64>,
}

impl Rows {
    fn new(p: &SdpProblem) -> Self {
        let full: Vec<Vec<_>> = p
            .constraints
            .iter()
            .map(|c| c.matrix.full_entries().collect())
            .collect();
        let mut next = 0;
        let slack_of = p
            .constraints
            .iter()
            .map(|c| {
                (c.sense == Sense::Le).then(|| {
                    next += 1;
                    next - 1
                })
            })
            .collect();
        let total: usize = full.iter().map(Vec::len).sum();
        let cube = (p.dim * p.dim * p.dim) as f64;
        let dense = full
            .iter()
            .map(|e| (e.len() * total) as f64 > cube)
            .collect();
        Rows {
            full,
            slack_of,
            dense,
            b: p.constraints.iter().map(|c| c.rhs).collect(),
        }
    }

    fn len(&self) -> usize {
        self.full.len()
    }

    /// `tr(A_j M)` for each row (matrix block only).
    fn apply(&self, m: &DMatrix<f64>) -> Vec<f64> {
        self.full
            .iter()
            .map(|e| e.iter().map(|&(p, q, v)| v * m[(q, p)]).sum())
            .collect()
    }

    fn schur(&self, x: &DMatrix<f64>, zinv: &DMatrix<f64>, lp_ratio: &[f64]) -> Vec<f64> {
        let m = self.len();
        let dim = x.nrows();
        let mut out = vec![0.0; m * m];
        for i in (0..m).filter(|&i| self.dense[i]) {
            let mut ax = DMatrix::zeros(dim, dim);
            for &(p, q, u) in &self.full[i] {
                for c in 0..dim {
                    ax[(p, c)] += u * x[(q, c)];
                }
            }
            let k = zinv * ax;
            for j in 0..m {
                let v: f64 = self.full[j].iter().map(|&(r, t, v)| v * k[(t, r)]).sum();
                out[i * m + j] = v;
                out[j * m + i] = v;
            }
        }
        for i in (0..m).filter(|&i| !self.dense[i]) {
            let ai = &self.full[i];
            for j in (i..m).filter(|&j| !self.dense[j]) {
                let mut v = 0.0;
                for &(p, q, u) in ai {
                    for &(r, t, w) in &self.full[j] {
                        v += u * w * x[(q, r)] * zinv[(t, p)];
                    }
                }
                out[i * m + j] = v;
                out[j * m + i] = v;
            }
        }
        for (j, slack) in self.slack_of.iter().enumerate() {
            if let Some(l) = *slack {
                out[j * m + j] += lp_ratio[l];
            }
        }
        out
    }
}

struct Direction {
    dx: DMatrix<f64>,
    ds: Vec<f64>,
    dy: Vec<f64>,
    dz: DMatrix<f64>,
    dzl: Vec<f64>,
}

struct State {
    x: DMatrix<f64>,
    s: Vec<f64>,
    y: Vec<f64>,
    z: DMatrix<f64>,
    zl: Vec<f64>,
}

/// Solves `p` to the tolerances in `opts`.
pub fn solve(p: &SdpProblem, opts: &SolveOptions) -> SdpSolution {
    solve_with_trace(p, opts, |_| {})
}

/// Like [`solve`], calling `trace` once per iteration before the step.
pub fn solve_with_trace<F>(p: &SdpProblem, opts: &SolveOptions, mut trace: F) -> SdpSolution
where
    F: FnMut(&IterationStats),
{
    let dim = p.dim;
    let rows = Rows::new(p);
    let m = rows.len();
    let k = p.num_inequalities();
    if dim == 0 {
        return SdpSolution::assemble(
            p,
            DMatrix::zeros(0, 0),
            vec![0.0; k],
            vec![0.0; m],
            0,
            SdpStatus::NumericalFailure,
            Some("empty matrix variable".into()),
        );
    }

    let tau = 1.0
        + rows.b.iter().fold(0.0f64, |a, b| a.max(b.abs()))
        + p.constraints
            .iter()
            .fold(0.0f64, |a, c| a.max(c.matrix.frobenius_norm()));
    let mut st = State {
        x: DMatrix::identity(dim, dim) * tau,
        s: vec![tau; k],
        y: vec![0.0; m],
        z: DMatrix::identity(dim, dim) * tau,
        zl: vec![tau; k],
    };
    let c_norm = p.cost.norm();
    let n_total = (dim + k) as f64;
    let mut last_steps = (0.0, 0.0);

    for iter in 0..=opts.max_iter {
        // Residuals.
        let ax = rows.apply(&st.x);
        let fp: Vec<f64> = (0..m)
            .map(|j| rows.b[j] - ax[j] - rows.slack_of[j].map_or(0.0, |l| st.s[l]))
            .collect();
        let mut fd = adjoint(p, &st.y);
        fd -= &p.cost;
        fd -= &st.z;
        symmetrize(&mut fd);
        let fdl: Vec<f64> = slack_rows(&rows)
            .map(|(j, l)| st.y[j] - st.zl[l])
            .collect();

        let pobj = p.cost.dot(&st.x);
        let dobj: f64 = rows.b.iter().zip(&st.y).map(|(b, y)| b * y).sum();
        let complementarity = st.x.dot(&st.z) + dot(&st.s, &st.zl);
        let mu = complementarity / n_total;
        let scale = 1.0 + pobj.abs();
        let rel_gap = (dobj - pobj).abs().max(complementarity.abs()) / scale;
        let pinf = fp
            .iter()
            .zip(&rows.b)
            .map(|(r, b)| r.abs() / (1.0 + b.abs()))
            .fold(0.0, f64::max);
        let dinf = (fd.norm_squared() + dot(&fdl, &fdl)).sqrt() / (1.0 + c_norm);
        let stats = IterationStats {
            iteration: iter,
            primal_value: pobj,
            dual_value: dobj,
            relative_gap: rel_gap,
            primal_infeasibility: pinf,
            dual_infeasibility: dinf,
            mu,
            primal_step: last_steps.0,
            dual_step: last_steps.1,
        };
        log::trace!(
            "ipm iter {iter}: pobj {pobj:.9e} dobj {dobj:.9e} gap {rel_gap:.2e} pinf {pinf:.2e} dinf {dinf:.2e}"
        );
        trace(&stats);

        if rel_gap <= opts.gap_tol && pinf <= opts.feas_tol && dinf <= opts.feas_tol {
            return finish(p, st, iter, SdpStatus::Optimal, None);
        }
        if iter == opts.max_iter {
            break;
        }
        if !(pobj.is_finite() && dobj.is_finite()) {
            return finish(
                p,
                st,
                iter,
                SdpStatus::NumericalFailure,
                Some("iterates became non-finite".into()),
            );
        }

        let Some(zchol) = st.z.clone().cholesky() else {
            return finish(
                p,
                st,
                iter,
                SdpStatus::NumericalFailure,
                Some("dual slack lost positive definiteness".into()),
            );
        };
        let zinv = zchol.inverse();
        let lp_ratio: Vec<f64> = st.s.iter().zip(&st.zl).map(|(s, z)| s / z).collect();
        let schur = rows.schur(&st.x, &zinv, &lp_ratio);
        let factored = if iter == 0 {
            DenseCholesky::factor(&schur, m, DEPENDENCE_TOL)
        } else {
            factor_regularized(schur, m)
        };
        let chol = match factored {
            Ok(c) => c,
            Err(collapse) => {
                let why = if iter == 0 {
                    format!(
                        "constraint {} is linearly dependent on earlier constraints (Schur pivot {:.3e})",
                        collapse.index + 1,
                        collapse.pivot
                    )
                } else {
                    format!(
                        "Schur complement not positive definite at row {} (pivot {:.3e}, iteration {iter})",
                        collapse.index + 1,
                        collapse.pivot
                    )
                };
                return finish(p, st, iter, SdpStatus::NumericalFailure, Some(why));
            }
        };

        let ident = DMatrix::<f64>::identity(dim, dim);
        // Predictor (affine scaling).
        let zero = DMatrix::zeros(dim, dim);
        let lp_zero = vec![0.0; k];
        let pred = direction(&rows, &st, &zinv, &chol, &fd, &fdl, &zero, &lp_zero);
        let (ap, ad) = step_lengths(&st, &pred, 1.0);
        let mut x_aff = &st.x + &pred.dx * ap;
        let z_aff = &st.z + &pred.dz * ad;
        let s_aff: Vec<f64> = st.s.iter().zip(&pred.ds).map(|(s, d)| s + ap * d).collect();
        let zl_aff: Vec<f64> = st.zl.iter().zip(&pred.dzl).map(|(z, d)| z + ad * d).collect();
        symmetrize(&mut x_aff);
        let mu_aff = (x_aff.dot(&z_aff) + dot(&s_aff, &zl_aff)) / n_total;
        let sigma = if mu > 0.0 {
            (mu_aff / mu).clamp(0.0, 1.0).powi(3)
        } else {
            0.0
        };

        // Corrector.
        let r = &ident * (sigma * mu) - &pred.dx * &pred.dz;
        let r_lp: Vec<f64> = pred
            .ds
            .iter()
            .zip(&pred.dzl)
            .map(|(ds, dz)| sigma * mu - ds * dz)
            .collect();
        let corr = direction(&rows, &st, &zinv, &chol, &fd, &fdl, &r, &r_lp);
        let (ap, ad) = step_lengths(&st, &corr, opts.step_fraction);
        if ap <= 0.0 && ad <= 0.0 {
            return finish(
                p,
                st,
                iter,
                SdpStatus::NumericalFailure,
                Some("zero step length".into()),
            );
        }
        st.x += &corr.dx * ap;
        symmetrize(&mut st.x);
        for (s, d) in st.s.iter_mut().zip(&corr.ds) {
            *s += ap * d;
        }
        for (y, d) in st.y.iter_mut().zip(&corr.dy) {
            *y += ad * d;
        }
        st.z += &corr.dz * ad;
        symmetrize(&mut st.z);
        for (z, d) in st.zl.iter_mut().zip(&corr.dzl) {
            *z += ad * d;
        }
        last_steps = (ap, ad);
    }
    finish(p, st, opts.max_iter, SdpStatus::MaxIterations, None)
}

/// Factors the Schur matrix, retrying with growing diagonal shifts (relative
/// to the largest diagonal entry) when it has lost definiteness to rounding.
fn factor_regularized(mut schur: Vec<f64>, m: usize) -> Result<DenseCholesky, PivotCollapse> {
    let mut err = match DenseCholesky::factor(&schur, m, 0.0) {
        Ok(c) => return Ok(c),
        Err(e) => e,
    };
    let max_diag = (0..m).map(|i| schur[i * m + i].abs()).fold(0.0, f64::max);
    let mut applied = 0.0;
    for rel in [1e-14, 1e-12, 1e-10] {
        let shift = rel * max_diag - applied;
        for i in 0..m {
            schur[i * m + i] += shift;
        }
        applied += shift;
        match DenseCholesky::factor(&schur, m, 0.0) {
            Ok(c) => {
                log::debug!("Schur complement regularized with relative shift {rel:e}");
                return Ok(c);
            }
            Err(e) => err = e,
        }
    }
    Err(err)
}

fn finish(
    p: &SdpProblem,
    st: State,
    iterations: usize,
    status: SdpStatus,
    diagnostic: Option<String>,
) -> SdpSolution {
    if let Some(d) = &diagnostic {
        log::info!("ipm stopped: {d}");
    }
    SdpSolution::assemble(p, st.x, st.s, st.y, iterations, status, diagnostic)
}

fn slack_rows(rows: &Rows) -> impl Iterator<Item = (usize, usize)> + '_ {
    rows.slack_of
        .iter()
        .enumerate()
        .filter_map(|(j, l)| l.map(|l| (j, l)))
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// HKM direction for the complementarity target `r` (matrix block) and
/// `r_lp` (slack block).
#[allow(clippy::too_many_arguments)]
fn direction(
    rows: &Rows,
    st: &State,
    zinv: &DMatrix<f64>,
    chol: &DenseCholesky,
    fd: &DMatrix<f64>,
    fdl: &[f64],
    r: &DMatrix<f64>,
    r_lp: &[f64],
) -> Direction {
    // rhs_j = tr(A_j (R − X Fd) Z⁻¹) − b_j + (r_l − s_l fd_l) / z_l
    let t = (r - &st.x * fd) * zinv;
    let mut rhs = rows.apply(&t);
    for (j, rj) in rhs.iter_mut().enumerate() {
        *rj -= rows.b[j];
        if let Some(l) = rows.slack_of[j] {
            *rj += (r_lp[l] - st.s[l] * fdl[l]) / st.zl[l];
        }
    }
    chol.solve_in_place(&mut rhs);
    let dy = rhs;

    let mut dz = DMatrix::zeros(st.x.nrows(), st.x.nrows());
    for (e, &d) in rows.full.iter().zip(&dy) {
        for &(p, q, v) in e {
            dz[(p, q)] += d * v;
        }
    }
    dz += fd;
    symmetrize(&mut dz);
    let mut dx = (r - &st.x * &dz) * zinv - &st.x;
    symmetrize(&mut dx);

    let mut dzl = vec![0.0; st.zl.len()];
    let mut ds = vec![0.0; st.s.len()];
    for (j, l) in slack_rows(rows) {
        dzl[l] = dy[j] + fdl[l];
        ds[l] = (r_lp[l] - st.s[l] * dzl[l]) / st.zl[l] - st.s[l];
    }
    Direction { dx, ds, dy, dz, dzl }
}

fn step_lengths(st: &State, d: &Direction, fraction: f64) -> (f64, f64) {
    let primal = max_psd_step(&st.x, &d.dx).min(max_lp_step(&st.s, &d.ds));
    let dual = max_psd_step(&st.z, &d.dz).min(max_lp_step(&st.zl, &d.dzl));
    ((fraction * primal).min(1.0), (fraction * dual).min(1.0))
}
