//! Small dense linear algebra: just enough for the state-space filter,
//! least-squares regressions and the embedding code. Matrices here are tiny
//! (state dimensions, regressor counts), so plain row-major `Vec<f64>`
//! storage with straightforward loops is the right tool.

use alloc::vec;
use alloc::vec::Vec;

/// Row-major dense matrix.
#[derive(Clone, Debug, PartialEq)]
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

    pub fn identity(n: usize) -> Self {
        let mut m = Mat::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn from_rows(rows: &[&[f64]]) -> Self {
        let r = rows.len();
        let c = if r == 0 { 0 } else { rows[0].len() };
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            assert_eq!(row.len(), c, "ragged rows");
            data.extend_from_slice(row);
        }
        Mat { rows: r, cols: c, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, r: usize) -> &[f64] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn row_mut(&mut self, r: usize) -> &mut [f64] {
        &mut self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn matmul(&self, other: &Mat) -> Mat {
        assert_eq!(self.cols, other.rows, "shape mismatch");
        let mut out = Mat::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == 0.0 {
                    continue;
                }
                for j in 0..other.cols {
                    out[(i, j)] += a * other[(k, j)];
                }
            }
        }
        out
    }

    pub fn transpose(&self) -> Mat {
        let mut out = Mat::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[(j, i)] = self[(i, j)];
            }
        }
        out
    }

    pub fn add(&self, other: &Mat) -> Mat {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let mut out = self.clone();
        for (a, b) in out.data.iter_mut().zip(&other.data) {
            *a += b;
        }
        out
    }

    pub fn max_abs_diff(&self, other: &Mat) -> f64 {
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| libm::fabs(a - b))
            .fold(0.0, f64::max)
    }
}

impl core::ops::Index<(usize, usize)> for Mat {
    type Output = f64;
    fn index(&self, (r, c): (usize, usize)) -> &f64 {
        &self.data[r * self.cols + c]
    }
}

impl core::ops::IndexMut<(usize, usize)> for Mat {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut f64 {
        &mut self.data[r * self.cols + c]
    }
}

/// Solves `a x = b` by Gaussian elimination with partial pivoting.
/// Returns `None` when the system is singular to working precision.
pub fn solve(a: &Mat, b: &[f64]) -> Option<Vec<f64>> {
    assert_eq!(a.rows(), a.cols(), "solve: matrix must be square");
    assert_eq!(a.rows(), b.len(), "solve: rhs length mismatch");
    let n = a.rows();
    let mut m = a.clone();
    let mut x: Vec<f64> = b.to_vec();

    for col in 0..n {
        let mut pivot = col;
        let mut best = libm::fabs(m[(col, col)]);
        for r in col + 1..n {
            let v = libm::fabs(m[(r, col)]);
            if v > best {
                best = v;
                pivot = r;
            }
        }
        if best < 1e-13 {
            return None;
        }
        if pivot != col {
            for j in 0..n {
                let tmp = m[(col, j)];
                m[(col, j)] = m[(pivot, j)];
                m[(pivot, j)] = tmp;
            }
            x.swap(col, pivot);
        }
        let diag = m[(col, col)];
        for r in col + 1..n {
            let factor = m[(r, col)] / diag;
            if factor == 0.0 {
                continue;
            }
            for j in col..n {
                let v = m[(col, j)];
                m[(r, j)] -= factor * v;
            }
            x[r] -= factor * x[col];
        }
    }
    for col in (0..n).rev() {
        let mut v = x[col];
        for j in col + 1..n {
            v -= m[(col, j)] * x[j];
        }
        x[col] = v / m[(col, col)];
    }
    Some(x)
}

/// Ordinary least squares for `y ≈ X beta` via the normal equations.
///
/// Returns the coefficient vector, or `Err(cols)` naming the column indices
/// that make the design rank-deficient.
pub fn least_squares(x_cols: &[&[f64]], y: &[f64]) -> Result<Vec<f64>, Vec<usize>> {
    let k = x_cols.len();
    if k == 0 {
        return Ok(Vec::new());
    }
    let n = y.len();
    for col in x_cols {
        assert_eq!(col.len(), n, "least_squares: column length mismatch");
    }
    let mut xtx = Mat::zeros(k, k);
    let mut xty = vec![0.0; k];
    for i in 0..k {
        for j in i..k {
            let mut s = 0.0;
            for t in 0..n {
                s += x_cols[i][t] * x_cols[j][t];
            }
            xtx[(i, j)] = s;
            xtx[(j, i)] = s;
        }
        let mut s = 0.0;
        for t in 0..n {
            s += x_cols[i][t] * y[t];
        }
        xty[i] = s;
    }
    // Scale-aware singularity check via Cholesky-style elimination: a pivot
    // collapsing relative to its column norm marks the offending columns.
    match solve_spd_checked(&xtx) {
        Ok(factor) => Ok(apply_cholesky_solve(&factor, &xty)),
        Err(bad) => Err(bad),
    }
}

/// Cholesky factorization of a symmetric positive definite matrix; on
/// rank-deficiency returns the column indices whose pivots collapsed.
fn solve_spd_checked(a: &Mat) -> Result<Mat, Vec<usize>> {
    let n = a.rows();
    let mut l = Mat::zeros(n, n);
    let mut bad = Vec::new();
    for i in 0..n {
        for j in 0..=i {
            let mut s = a[(i, j)];
            for p in 0..j {
                s -= l[(i, p)] * l[(j, p)];
            }
            if i == j {
                let tol = 1e-10 * (1.0 + libm::fabs(a[(i, i)]));
                if s <= tol {
                    bad.push(i);
                    l[(i, i)] = 1.0; // keep factoring to catch every bad column
                } else {
                    l[(i, i)] = libm::sqrt(s);
                }
            } else {
                l[(i, j)] = s / l[(j, j)];
            }
        }
    }
    if bad.is_empty() {
        Ok(l)
    } else {
        Err(bad)
    }
}

fn apply_cholesky_solve(l: &Mat, b: &[f64]) -> Vec<f64> {
    let n = l.rows();
    let mut y = b.to_vec();
    for i in 0..n {
        for j in 0..i {
            y[i] -= l[(i, j)] * y[j];
        }
        y[i] /= l[(i, i)];
    }
    for i in (0..n).rev() {
        for j in i + 1..n {
            y[i] -= l[(j, i)] * y[j];
        }
        y[i] /= l[(i, i)];
    }
    y
}
