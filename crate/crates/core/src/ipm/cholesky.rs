//! Dense Cholesky factorization for the Schur complement system.
//!
//! Row-major lower triangle; every inner loop is a contiguous dot product.

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PivotCollapse {
    pub index: usize,
    pub pivot: f64,
}

/// `L Lᵀ = A` for a symmetric positive definite `A` (row-major, `n × n`).
#[derive(Debug, Clone)]
pub struct DenseCholesky {
    n: usize,
    l: Vec<f64>,
}

impl DenseCholesky {
    /// Factors `a`, reading only its lower triangle. A pivot at or below
    /// `rel_tol * max(diag)` counts as collapse.
    pub fn factor(a: &[f64], n: usize, rel_tol: f64) -> Result<Self, PivotCollapse> {
        assert_eq!(a.len(), n * n);
        let scale = (0..n).map(|i| a[i * n + i].abs()).fold(0.0, f64::max);
        let threshold = rel_tol * scale.max(f64::MIN_POSITIVE);
        let mut l = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..=i {
                let (row_i, row_j) = if i == j {
                    let r = &l[i * n..i * n + j];
                    (r, r)
                } else {
                    let (head, tail) = l.split_at(i * n);
                    (&tail[..j], &head[j * n..j * n + j])
                };
                let s = a[i * n + j] - dot(row_i, row_j);
                if i == j {
                    if !(s > threshold) {
                        return Err(PivotCollapse { index: i, pivot: s });
                    }
                    l[i * n + i] = s.sqrt();
                } else {
                    l[i * n + j] = s / l[j * n + j];
                }
            }
        }
        Ok(DenseCholesky { n, l })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// Solves `A x = b` in place.
    pub fn solve_in_place(&self, b: &mut [f64]) {
        let n = self.n;
        assert_eq!(b.len(), n);
        for i in 0..n {
            let s = b[i] - dot(&self.l[i * n..i * n + i], &b[..i]);
            b[i] = s / self.l[i * n + i];
        }
        for i in (0..n).rev() {
            let mut s = b[i];
            for k in i + 1..n {
                s -= self.l[k * n + i] * b[k];
            }
            b[i] = s / self.l[i * n + i];
        }
    }
}

#[inline]
fn dot(a: &[f64], b: &[f64]) -> f64 {
    let mut acc = [0.0f64; 4];
    let chunks = a.len() / 4;
    for c in 0..chunks {
        let k = c * 4;
        acc[0] += a[k] * b[k];
        acc[1] += a[k + 1] * b[k + 1];
        acc[2] += a[k + 2] * b[k + 2];
        acc[3] += a[k + 3] * b[k + 3];
    }
    let mut s = (acc[0] + acc[1]) + (acc[2] + acc[3]);
    for k in chunks * 4..a.len() {
        s += a[k] * b[k];
    }
    s
}
