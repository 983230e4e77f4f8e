//! Dense row-major matrices with the handful of factorizations the rest of
//! the crate needs: products, Cholesky solves for symmetric positive-definite
//! systems, and Householder-QR least squares.

use std::fmt;

use crate::error::{Error, Result};

/// Symmetry tolerance for [`cholesky_solve`].
pub const SYMMETRY_TOL: f64 = 1e-10;

/// Dense matrix of finite `f64` values stored row-major.
#[derive(Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    /// Builds a matrix from row-major data, rejecting empty shapes and
    /// non-finite entries.
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::EmptyMatrix);
        }
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "{} entries for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        if let Some(pos) = data.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite {
                row: pos / cols,
                col: pos % cols,
            });
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::DimensionMismatch("rows of unequal length".into()));
        }
        Self::new(r, c, rows.concat())
    }

    /// Single-column matrix.
    pub fn column_vector(values: &[f64]) -> Result<Self> {
        Self::new(values.len(), 1, values.to_vec())
    }

    /// Builds a matrix from column slices.
    pub fn from_columns(columns: &[Vec<f64>]) -> Result<Self> {
        let c = columns.len();
        let r = columns.first().map_or(0, Vec::len);
        if columns.iter().any(|col| col.len() != r) {
            return Err(Error::DimensionMismatch("columns of unequal length".into()));
        }
        let mut data = vec![0.0; r * c];
        for (j, col) in columns.iter().enumerate() {
            for (i, v) in col.iter().enumerate() {
                data[i * c + j] = *v;
            }
        }
        Self::new(r, c, data)
    }

    /// Zero matrix. Panics on an empty shape.
    pub fn zeros(rows: usize, cols: usize) -> Self {
        assert!(rows > 0 && cols > 0, "empty matrix shape");
        Self {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = 1.0;
        }
        m
    }

    /// Fills a matrix from `f(row, col)`. Panics if `f` yields a non-finite
    /// value or the shape is empty.
    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self::new(rows, cols, data).expect("from_fn produced an invalid matrix")
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.data
    }

    pub fn transpose(&self) -> Matrix {
        Matrix::from_fn(self.cols, self.rows, |i, j| self.get(j, i))
    }

    /// Selects columns by index, in the given order.
    pub fn select_columns(&self, idx: &[usize]) -> Result<Matrix> {
        if let Some(&bad) = idx.iter().find(|&&j| j >= self.cols) {
            return Err(Error::DimensionMismatch(format!(
                "column {bad} out of range for {} columns",
                self.cols
            )));
        }
        let mut data = Vec::with_capacity(self.rows * idx.len());
        for i in 0..self.rows {
            data.extend(idx.iter().map(|&j| self.get(i, j)));
        }
        Matrix::new(self.rows, idx.len(), data)
    }

    /// Selects rows by index, in the given order.
    pub fn select_rows(&self, idx: &[usize]) -> Result<Matrix> {
        if let Some(&bad) = idx.iter().find(|&&i| i >= self.rows) {
            return Err(Error::DimensionMismatch(format!(
                "row {bad} out of range for {} rows",
                self.rows
            )));
        }
        let mut data = Vec::with_capacity(idx.len() * self.cols);
        for &i in idx {
            data.extend_from_slice(self.row(i));
        }
        Matrix::new(idx.len(), self.cols, data)
    }

    /// Prepends a column of ones.
    pub fn with_intercept(&self) -> Matrix {
        Matrix::from_fn(self.rows, self.cols + 1, |i, j| {
            if j == 0 {
                1.0
            } else {
                self.get(i, j - 1)
            }
        })
    }

    pub fn sub(&self, other: &Matrix) -> Result<Matrix> {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn add(&self, other: &Matrix) -> Result<Matrix> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn scale(&self, s: f64) -> Matrix {
        Matrix::from_fn(self.rows, self.cols, |i, j| self.get(i, j) * s)
    }

    fn zip_with(&self, other: &Matrix, f: impl Fn(f64, f64) -> f64) -> Result<Matrix> {
        if self.shape() != other.shape() {
            return Err(Error::DimensionMismatch(format!(
                "{:?} vs {:?}",
                self.shape(),
                other.shape()
            )));
        }
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(&a, &b)| f(a, b))
            .collect();
        Matrix::new(self.rows, self.cols, data)
    }

    /// Largest absolute entry.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn frobenius_sq(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum()
    }

    pub fn trace(&self) -> f64 {
        (0..self.rows.min(self.cols)).map(|i| self.get(i, i)).sum()
    }

    pub fn column_means(&self) -> Vec<f64> {
        let n = self.rows as f64;
        (0..self.cols)
            .map(|j| (0..self.rows).map(|i| self.get(i, j)).sum::<f64>() / n)
            .collect()
    }
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            writeln!(f, "  {:?}", self.row(i))?;
        }
        write!(f, "]")
    }
}

/// Matrix product `a * b`.
pub fn matmul(a: &Matrix, b: &Matrix) -> Result<Matrix> {
    if a.cols != b.rows {
        return Err(Error::DimensionMismatch(format!(
            "cannot multiply {}x{} by {}x{}",
            a.rows, a.cols, b.rows, b.cols
        )));
    }
    let mut out = vec![0.0; a.rows * b.cols];
    for i in 0..a.rows {
        let out_row = &mut out[i * b.cols..(i + 1) * b.cols];
        for k in 0..a.cols {
            let aik = a.get(i, k);
            if aik == 0.0 {
                continue;
            }
            for (o, &bkj) in out_row.iter_mut().zip(b.row(k)) {
                *o += aik * bkj;
            }
        }
    }
    Matrix::new(a.rows, b.cols, out)
}

/// `aᵀ b` without materializing the transpose.
pub fn matmul_tn(a: &Matrix, b: &Matrix) -> Result<Matrix> {
    if a.rows != b.rows {
        return Err(Error::DimensionMismatch(format!(
            "cannot form aᵀb for {}x{} and {}x{}",
            a.rows, a.cols, b.rows, b.cols
        )));
    }
    let mut out = vec![0.0; a.cols * b.cols];
    for r in 0..a.rows {
        let arow = a.row(r);
        let brow = b.row(r);
        for (i, &ai) in arow.iter().enumerate() {
            if ai == 0.0 {
                continue;
            }
            let out_row = &mut out[i * b.cols..(i + 1) * b.cols];
            for (o, &bj) in out_row.iter_mut().zip(brow) {
                *o += ai * bj;
            }
        }
    }
    Matrix::new(a.cols, b.cols, out)
}

/// Lower-triangular Cholesky factor `L` with `a = L Lᵀ`.
pub fn cholesky(a: &Matrix) -> Result<Matrix> {
    let n = a.rows;
    if a.cols != n {
        return Err(Error::DimensionMismatch(format!(
            "cholesky needs a square matrix, got {}x{}",
            a.rows, a.cols
        )));
    }
    for i in 0..n {
        for j in (i + 1)..n {
            let gap = (a.get(i, j) - a.get(j, i)).abs();
            let scale = a.get(i, j).abs().max(a.get(j, i).abs()).max(1.0);
            if gap > SYMMETRY_TOL * scale {
                return Err(Error::NotSymmetric { row: i, col: j, gap });
            }
        }
    }
    let mut l = vec![0.0; n * n];
    for j in 0..n {
        let mut d = a.get(j, j);
        for k in 0..j {
            d -= l[j * n + k] * l[j * n + k];
        }
        if !(d > 0.0) || !d.is_finite() {
            return Err(Error::NotPositiveDefinite { pivot: j, value: d });
        }
        let djj = d.sqrt();
        l[j * n + j] = djj;
        for i in (j + 1)..n {
            let mut s = a.get(i, j);
            for k in 0..j {
                s -= l[i * n + k] * l[j * n + k];
            }
            l[i * n + j] = s / djj;
        }
    }
    Matrix::new(n, n, l)
}

/// Solves `a x = b` for symmetric positive-definite `a`.
pub fn cholesky_solve(a: &Matrix, b: &Matrix) -> Result<Matrix> {
    if a.rows != b.rows {
        return Err(Error::DimensionMismatch(format!(
            "lhs has {} rows, rhs has {}",
            a.rows, b.rows
        )));
    }
    let l = cholesky(a)?;
    let n = a.rows;
    let m = b.cols;
    let mut x = b.data.clone();
    for c in 0..m {
        // forward: L z = b
        for i in 0..n {
            let mut s = x[i * m + c];
            for k in 0..i {
                s -= l.get(i, k) * x[k * m + c];
            }
            x[i * m + c] = s / l.get(i, i);
        }
        // back: Lᵀ x = z
        for i in (0..n).rev() {
            let mut s = x[i * m + c];
            for k in (i + 1)..n {
                s -= l.get(k, i) * x[k * m + c];
            }
            x[i * m + c] = s / l.get(i, i);
        }
    }
    Matrix::new(n, m, x)
}

/// Inverse of a symmetric positive-definite matrix.
pub fn spd_inverse(a: &Matrix) -> Result<Matrix> {
    cholesky_solve(a, &Matrix::identity(a.rows))
}

/// Relative size below which a Householder pivot marks a column as
/// collinear with its predecessors.
const RANK_TOL: f64 = 1e-10;

/// Minimizes `‖y − x B‖_F` by Householder QR.
///
/// Fails with [`Error::RankDeficient`] naming the first column whose
/// diagonal of `R` is negligible relative to that column's norm.
pub fn least_squares(x: &Matrix, y: &Matrix) -> Result<Matrix> {
    if x.rows != y.rows {
        return Err(Error::DimensionMismatch(format!(
            "design has {} rows, response has {}",
            x.rows, y.rows
        )));
    }
    let (n, p) = x.shape();
    if n < p {
        return Err(Error::DimensionMismatch(format!(
            "underdetermined system: {n} rows for {p} columns"
        )));
    }
    let k = y.cols;
    // column-major working copies
    let mut a: Vec<Vec<f64>> = (0..p).map(|j| x.column(j)).collect();
    let mut qty: Vec<Vec<f64>> = (0..k).map(|j| y.column(j)).collect();
    let col_norms: Vec<f64> = a.iter().map(|c| norm2(c)).collect();

    for j in 0..p {
        let alpha = norm2(&a[j][j..]);
        if col_norms[j] == 0.0 || alpha <= RANK_TOL * col_norms[j] {
            return Err(Error::RankDeficient { column: j });
        }
        let sign = if a[j][j] >= 0.0 { 1.0 } else { -1.0 };
        let mut v: Vec<f64> = a[j][j..].to_vec();
        v[0] += sign * alpha;
        let vnorm_sq: f64 = v.iter().map(|t| t * t).sum();
        let reflect = |col: &mut [f64]| {
            let dot: f64 = v.iter().zip(col.iter()).map(|(a, b)| a * b).sum();
            let f = 2.0 * dot / vnorm_sq;
            for (c, vi) in col.iter_mut().zip(&v) {
                *c -= f * vi;
            }
        };
        for col in a.iter_mut().skip(j) {
            reflect(&mut col[j..]);
        }
        for col in qty.iter_mut() {
            reflect(&mut col[j..]);
        }
    }

    // back substitution R B = Qᵀ y (top p rows)
    let mut b = vec![0.0; p * k];
    for c in 0..k {
        for i in (0..p).rev() {
            let mut s = qty[c][i];
            for jj in (i + 1)..p {
                s -= a[jj][i] * b[jj * k + c];
            }
            b[i * k + c] = s / a[i][i];
        }
    }
    Matrix::new(p, k, b)
}

pub(crate) fn norm2(v: &[f64]) -> f64 {
    // scaled to avoid overflow on large entries
    let scale = v.iter().fold(0.0f64, |m, t| m.max(t.abs()));
    if scale == 0.0 {
        return 0.0;
    }
    let s: f64 = v.iter().map(|t| (t / scale) * (t / scale)).sum();
    scale * s.sqrt()
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random(rng: &mut ChaCha8Rng, r: usize, c: usize) -> Matrix {
        Matrix::from_fn(r, c, |_, _| rng.gen_range(-1.0..1.0))
    }

    fn random_spd(rng: &mut ChaCha8Rng, n: usize) -> Matrix {
        let m = random(rng, n, n);
        matmul_tn(&m, &m).unwrap().add(&Matrix::identity(n)).unwrap()
    }

    fn max_diff(a: &Matrix, b: &Matrix) -> f64 {
        a.sub(b).unwrap().max_abs()
    }

    // inverse via cofactor expansion, only for small n
    fn det(m: &[Vec<f64>]) -> f64 {
        let n = m.len();
        if n == 1 {
            return m[0][0];
        }
        (0..n)
            .map(|c| {
                let minor: Vec<Vec<f64>> = m[1..]
                    .iter()
                    .map(|row| {
                        row.iter()
                            .enumerate()
                            .filter(|(j, _)| *j != c)
                            .map(|(_, v)| *v)
                            .collect()
                    })
                    .collect();
                let sign = if c % 2 == 0 { 1.0 } else { -1.0 };
                sign * m[0][c] * det(&minor)
            })
            .sum()
    }

    fn adjugate_inverse(a: &Matrix) -> Matrix {
        let n = a.rows();
        let rows: Vec<Vec<f64>> = (0..n).map(|i| a.row(i).to_vec()).collect();
        let d = det(&rows);
        Matrix::from_fn(n, n, |i, j| {
            // (i, j) of inverse = cofactor(j, i) / det
            let minor: Vec<Vec<f64>> = rows
                .iter()
                .enumerate()
                .filter(|(r, _)| *r != j)
                .map(|(_, row)| {
                    row.iter()
                        .enumerate()
                        .filter(|(c, _)| *c != i)
                        .map(|(_, v)| *v)
                        .collect()
                })
                .collect();
            let sign = if (i + j) % 2 == 0 { 1.0 } else { -1.0 };
            sign * det(&minor) / d
        })
    }

    #[test]
    fn rejects_non_finite_and_empty() {
        assert!(matches!(
            Matrix::new(1, 2, vec![1.0, f64::NAN]),
            Err(Error::NonFinite { row: 0, col: 1 })
        ));
        assert_eq!(Matrix::new(0, 2, vec![]), Err(Error::EmptyMatrix));
        assert!(Matrix::new(2, 2, vec![1.0; 3]).is_err());
    }

    #[test]
    fn matmul_identity_and_hand_product() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let a = random(&mut rng, 3, 4);
        assert_eq!(matmul(&Matrix::identity(3), &a).unwrap(), a);
        let a = Matrix::from_rows(&[vec![1.0, 2.0], vec![3.0, 4.0]]).unwrap();
        let b = Matrix::from_rows(&[vec![0.0], vec![1.0]]).unwrap();
        assert_eq!(
            matmul(&a, &b).unwrap(),
            Matrix::from_rows(&[vec![2.0], vec![4.0]]).unwrap()
        );
        assert!(matches!(matmul(&a, &a.transpose().select_rows(&[0]).unwrap()), Err(Error::DimensionMismatch(_))));
    }

    #[test]
    fn matmul_matches_triple_loop() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let a = random(&mut rng, 4, 3);
        let b = random(&mut rng, 3, 2);
        let c = matmul(&a, &b).unwrap();
        for i in 0..4 {
            for j in 0..2 {
                let mut s = 0.0;
                for k in 0..3 {
                    s += a.get(i, k) * b.get(k, j);
                }
                assert!((c.get(i, j) - s).abs() <= 1e-12);
            }
        }
        let ctn = matmul_tn(&a.transpose(), &b).unwrap();
        assert!(max_diff(&c, &ctn) <= 1e-12);
    }

    #[test]
    fn cholesky_solve_examples() {
        let b = Matrix::from_rows(&[vec![1.5], vec![-2.0]]).unwrap();
        assert_eq!(cholesky_solve(&Matrix::identity(2), &b).unwrap(), b);
        let a = Matrix::from_rows(&[vec![2.0, 0.0], vec![0.0, 4.0]]).unwrap();
        let rhs = Matrix::from_rows(&[vec![2.0], vec![8.0]]).unwrap();
        let want = Matrix::from_rows(&[vec![1.0], vec![2.0]]).unwrap();
        assert!(max_diff(&cholesky_solve(&a, &rhs).unwrap(), &want) <= 1e-15);
    }

    #[test]
    fn cholesky_solve_matches_adjugate_inverse() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let a = random_spd(&mut rng, 5);
        let b = random(&mut rng, 5, 2);
        let x = cholesky_solve(&a, &b).unwrap();
        let oracle = matmul(&adjugate_inverse(&a), &b).unwrap();
        assert!(max_diff(&x, &oracle) <= 1e-9);
        let resid = matmul(&a, &x).unwrap().sub(&b).unwrap().max_abs();
        assert!(resid <= 1e-8 * b.max_abs());
    }

    #[test]
    fn cholesky_failures_are_distinct() {
        let a = Matrix::from_rows(&[vec![1.0, 2.0], vec![2.0, 1.0]]).unwrap();
        assert!(matches!(
            cholesky_solve(&a, &Matrix::identity(2)),
            Err(Error::NotPositiveDefinite { pivot: 1, .. })
        ));
        let a = Matrix::from_rows(&[vec![1.0, 0.5], vec![0.4, 1.0]]).unwrap();
        assert!(matches!(
            cholesky_solve(&a, &Matrix::identity(2)),
            Err(Error::NotSymmetric { .. })
        ));
        assert!(matches!(
            cholesky_solve(&Matrix::identity(2), &Matrix::identity(3)),
            Err(Error::DimensionMismatch(_))
        ));
    }

    #[test]
    fn least_squares_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        // square invertible
        let x = random(&mut rng, 3, 3);
        let y = random(&mut rng, 3, 2);
        let b = least_squares(&x, &y).unwrap();
        assert!(max_diff(&matmul(&x, &b).unwrap(), &y) <= 1e-10);
        // consistent overdetermined
        let x = random(&mut rng, 9, 3);
        let b0 = random(&mut rng, 3, 2);
        let y = matmul(&x, &b0).unwrap();
        assert!(max_diff(&least_squares(&x, &y).unwrap(), &b0) <= 1e-10);
        // normal equations oracle
        let x = random(&mut rng, 8, 3);
        let y = random(&mut rng, 8, 2);
        let b = least_squares(&x, &y).unwrap();
        let oracle =
            cholesky_solve(&matmul_tn(&x, &x).unwrap(), &matmul_tn(&x, &y).unwrap()).unwrap();
        assert!(max_diff(&b, &oracle) <= 1e-9);
    }

    #[test]
    fn least_squares_detects_collinearity() {
        let x = Matrix::from_columns(&[
            vec![1.0, 2.0, 3.0, 4.0],
            vec![1.0, 0.0, 1.0, 0.0],
            vec![2.0, 4.0, 6.0, 8.0],
        ])
        .unwrap();
        let y = Matrix::column_vector(&[1.0, 2.0, 0.0, 1.0]).unwrap();
        assert_eq!(least_squares(&x, &y), Err(Error::RankDeficient { column: 2 }));
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(64))]

            #[test]
            fn matmul_is_associative(seed in any::<u64>(), n in 1usize..5, m in 1usize..5, k in 1usize..5, l in 1usize..5) {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let a = random(&mut rng, n, m);
                let b = random(&mut rng, m, k);
                let c = random(&mut rng, k, l);
                let left = matmul(&matmul(&a, &b).unwrap(), &c).unwrap();
                let right = matmul(&a, &matmul(&b, &c).unwrap()).unwrap();
                prop_assert!(max_diff(&left, &right) <= 1e-9 * left.max_abs().max(1.0));
            }

            #[test]
            fn cholesky_roundtrip(seed in any::<u64>(), n in 1usize..7) {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let a = random_spd(&mut rng, n);
                let v = random(&mut rng, n, 1);
                let x = cholesky_solve(&a, &matmul(&a, &v).unwrap()).unwrap();
                prop_assert!(max_diff(&x, &v) <= 1e-9);
            }

            #[test]
            fn residuals_orthogonal_to_span(seed in any::<u64>(), n in 4usize..12, p in 1usize..4) {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let x = random(&mut rng, n, p);
                let y = random(&mut rng, n, 2);
                let b = least_squares(&x, &y).unwrap();
                let r = y.sub(&matmul(&x, &b).unwrap()).unwrap();
                let xtr = matmul_tn(&x, &r).unwrap().max_abs();
                let xty = matmul_tn(&x, &y).unwrap().max_abs();
                prop_assert!(xtr <= 1e-8 * xty.max(1e-300));
            }
        }
    }
}
