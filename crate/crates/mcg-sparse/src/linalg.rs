//! Dense linear algebra sized for this crate's needs.
//!
//! Matrices here are small (dictionaries of a few hundred columns, Gram
//! blocks of order at most ~20), so the routines favor robustness and
//! bit-for-bit determinism over asymptotic cleverness: a cyclic Jacobi
//! sweep for symmetric eigenvalues and a Cholesky factorization with a
//! ridge fallback for SPD solves.

use crate::error::{Error, Result};

/// Column-major dense matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Mat {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Mat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Mat {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    /// Build from a column-major buffer. Panics if `data.len() != rows * cols`.
    pub fn from_col_major(rows: usize, cols: usize, data: Vec<f64>) -> Self {
        assert_eq!(data.len(), rows * cols, "buffer size mismatch");
        Mat { rows, cols, data }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Mat::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn col(&self, j: usize) -> &[f64] {
        &self.data[j * self.rows..(j + 1) * self.rows]
    }

    pub fn col_mut(&mut self, j: usize) -> &mut [f64] {
        &mut self.data[j * self.rows..(j + 1) * self.rows]
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    /// `self * v` for a vector `v` of length `cols`.
    pub fn mul_vec(&self, v: &[f64]) -> Vec<f64> {
        assert_eq!(v.len(), self.cols, "mul_vec length mismatch");
        let mut out = vec![0.0; self.rows];
        for j in 0..self.cols {
            let c = self.col(j);
            let vj = v[j];
            if vj != 0.0 {
                for i in 0..self.rows {
                    out[i] += c[i] * vj;
                }
            }
        }
        out
    }

    /// `self^T * v` for a vector `v` of length `rows`.
    pub fn mul_transpose_vec(&self, v: &[f64]) -> Vec<f64> {
        assert_eq!(v.len(), self.rows, "mul_transpose_vec length mismatch");
        (0..self.cols).map(|j| dot(self.col(j), v)).collect()
    }

    /// Gram matrix `self^T * self` (cols x cols, symmetric).
    pub fn gram(&self) -> Mat {
        let k = self.cols;
        let mut g = Mat::zeros(k, k);
        for j in 0..k {
            for i in 0..=j {
                let v = dot(self.col(i), self.col(j));
                g[(i, j)] = v;
                g[(j, i)] = v;
            }
        }
        g
    }
}

impl std::ops::Index<(usize, usize)> for Mat {
    type Output = f64;
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[j * self.rows + i]
    }
}

impl std::ops::IndexMut<(usize, usize)> for Mat {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[j * self.rows + i]
    }
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm2(v: &[f64]) -> f64 {
    dot(v, v).sqrt()
}

/// Eigenvalues of a symmetric matrix, ascending, via cyclic Jacobi rotations.
///
/// Converges quadratically for the small orders used here; the sweep limit is
/// generous so failure indicates a genuinely pathological input.
pub fn sym_eigenvalues(a: &Mat) -> Result<Vec<f64>> {
    if a.rows() != a.cols() {
        return Err(Error::dim(format!(
            "sym_eigenvalues needs a square matrix, got {}x{}",
            a.rows(),
            a.cols()
        )));
    }
    let n = a.rows();
    if n == 0 {
        return Ok(Vec::new());
    }
    if n == 1 {
        return Ok(vec![a[(0, 0)]]);
    }
    let mut m = a.clone();
    let scale: f64 = (0..n)
        .map(|j| m.col(j).iter().map(|x| x.abs()).fold(0.0, f64::max))
        .fold(0.0, f64::max)
        .max(1.0);
    let tol = 1e-14 * scale;
    const MAX_SWEEPS: usize = 100;
    for _ in 0..MAX_SWEEPS {
        let mut off = 0.0f64;
        for q in 1..n {
            for p in 0..q {
                off = off.max(m[(p, q)].abs());
            }
        }
        if off <= tol {
            let mut eigs: Vec<f64> = (0..n).map(|i| m[(i, i)]).collect();
            eigs.sort_by(|x, y| x.partial_cmp(y).expect("eigenvalue is NaN"));
            return Ok(eigs);
        }
        for q in 1..n {
            for p in 0..q {
                let apq = m[(p, q)];
                if apq.abs() <= tol * 1e-2 {
                    continue;
                }
                let app = m[(p, p)];
                let aqq = m[(q, q)];
                // rotation angle: theta = (aqq - app) / (2 apq)
                let theta = (aqq - app) / (2.0 * apq);
                let t = if theta >= 0.0 {
                    1.0 / (theta + (1.0 + theta * theta).sqrt())
                } else {
                    -1.0 / (-theta + (1.0 + theta * theta).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                for i in 0..n {
                    if i != p && i != q {
                        let aip = m[(i, p)];
                        let aiq = m[(i, q)];
                        let new_ip = c * aip - s * aiq;
                        let new_iq = s * aip + c * aiq;
                        m[(i, p)] = new_ip;
                        m[(p, i)] = new_ip;
                        m[(i, q)] = new_iq;
                        m[(q, i)] = new_iq;
                    }
                }
                m[(p, p)] = app - t * apq;
                m[(q, q)] = aqq + t * apq;
                m[(p, q)] = 0.0;
                m[(q, p)] = 0.0;
            }
        }
    }
    Err(Error::numerical(format!(
        "Jacobi eigenvalue iteration did not converge for a {n}x{n} matrix"
    )))
}

/// Smallest eigenvalue of a symmetric matrix.
pub fn min_sym_eigenvalue(a: &Mat) -> Result<f64> {
    let eigs = sym_eigenvalues(a)?;
    eigs.first()
        .copied()
        .ok_or_else(|| Error::numerical("empty matrix has no eigenvalues"))
}

/// Solve `A x = b` for symmetric positive definite `A` via Cholesky.
///
/// If the factorization stalls on a non-positive pivot, retries once with a
/// small ridge (`1e-12 * trace(A) / n`) added to the diagonal; the IRLS
/// iterations this serves treat near-singular systems as damped rather than
/// fatal.
pub fn solve_spd(a: &Mat, b: &[f64]) -> Result<Vec<f64>> {
    if a.rows() != a.cols() {
        return Err(Error::dim(format!(
            "solve_spd needs a square matrix, got {}x{}",
            a.rows(),
            a.cols()
        )));
    }
    if b.len() != a.rows() {
        return Err(Error::dim(format!(
            "solve_spd rhs length {} does not match matrix order {}",
            b.len(),
            a.rows()
        )));
    }
    match cholesky_solve(a, b) {
        Some(x) => Ok(x),
        None => {
            let n = a.rows();
            let trace: f64 = (0..n).map(|i| a[(i, i)]).sum();
            let ridge = 1e-12 * trace.abs().max(f64::MIN_POSITIVE) / n as f64;
            let mut regularized = a.clone();
            for i in 0..n {
                regularized[(i, i)] += ridge;
            }
            cholesky_solve(&regularized, b).ok_or_else(|| {
                Error::numerical("Cholesky failed even with ridge regularization")
            })
        }
    }
}

fn cholesky_solve(a: &Mat, b: &[f64]) -> Option<Vec<f64>> {
    let n = a.rows();
    // lower-triangular factor, column-major
    let mut l = Mat::zeros(n, n);
    for j in 0..n {
        let mut d = a[(j, j)];
        for k in 0..j {
            d -= l[(j, k)] * l[(j, k)];
        }
        if !(d > 0.0) || !d.is_finite() {
            return None;
        }
        let dj = d.sqrt();
        l[(j, j)] = dj;
        for i in (j + 1)..n {
            let mut v = a[(i, j)];
            for k in 0..j {
                v -= l[(i, k)] * l[(j, k)];
            }
            l[(i, j)] = v / dj;
        }
    }
    // forward substitution: L z = b
    let mut z = vec![0.0; n];
    for i in 0..n {
        let mut v = b[i];
        for k in 0..i {
            v -= l[(i, k)] * z[k];
        }
        z[i] = v / l[(i, i)];
    }
    // back substitution: L^T x = z
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let mut v = z[i];
        for k in (i + 1)..n {
            v -= l[(k, i)] * x[k];
        }
        x[i] = v / l[(i, i)];
    }
    if x.iter().all(|v| v.is_finite()) {
        Some(x)
    } else {
        None
    }
}
