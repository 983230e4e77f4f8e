//! Elastic-net regularization paths by cyclic coordinate descent.
//!
//! The objective for `N` observations, `p` predictors and `K` responses is
//!
//! ```text
//! (1/2N) ‖Y − 1 b0ᵀ − X B‖²_F + λ Σ_j [ (1 − α)/2 ‖B_j‖² + α ‖B_j‖ ]
//! ```
//!
//! where `B_j` is predictor `j`'s coefficient row across responses. With
//! `K = 1` the row norm is an absolute value and this is the ordinary
//! elastic net; with `K > 1` the row norm couples responses so a predictor
//! is selected or dropped for all of them at once.
//!
//! Predictors are used exactly as given. Callers standardize beforehand.

use crate::error::{Error, Result};
use crate::linalg::{dot, norm2, Matrix};

/// Solver settings.
#[derive(Debug, Clone, PartialEq)]
pub struct EnetConfig {
    /// Mixing between ridge (0) and lasso (1).
    pub alpha: f64,
    pub nlambda: usize,
    /// Smallest lambda as a fraction of λ_max. `None` picks 1e-4 when
    /// `N > p` and 1e-2 otherwise.
    pub lambda_min_ratio: Option<f64>,
    /// Convergence threshold on `max_j c_j ‖Δ B_j‖²` over one sweep.
    pub tol: f64,
    /// Cap on coordinate sweeps per lambda.
    pub max_iter: usize,
    pub fit_intercept: bool,
    /// Iterate on the nonzero set between full sweeps.
    pub active_set: bool,
}

impl Default for EnetConfig {
    fn default() -> Self {
        Self {
            alpha: 0.5,
            nlambda: 100,
            lambda_min_ratio: None,
            tol: 1e-7,
            max_iter: 100_000,
            fit_intercept: true,
            active_set: true,
        }
    }
}

impl EnetConfig {
    pub fn lambda_min_ratio_for(&self, n: usize, p: usize) -> f64 {
        self.lambda_min_ratio
            .unwrap_or(if n > p { 1e-4 } else { 1e-2 })
    }

    fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.alpha) {
            return Err(Error::InvalidArgument(format!(
                "alpha must lie in [0, 1], got {}",
                self.alpha
            )));
        }
        if let Some(r) = self.lambda_min_ratio {
            if !(r > 0.0 && r < 1.0) {
                return Err(Error::InvalidArgument(format!(
                    "lambda_min_ratio must lie in (0, 1), got {r}"
                )));
            }
        }
        if !(self.tol > 0.0) {
            return Err(Error::InvalidArgument("tol must be positive".into()));
        }
        if self.max_iter == 0 {
            return Err(Error::InvalidArgument("max_iter must be positive".into()));
        }
        Ok(())
    }
}

/// Solutions along a decreasing lambda grid.
#[derive(Debug, Clone, PartialEq)]
pub struct EnetPath {
    pub lambdas: Vec<f64>,
    /// `p × K` coefficients per lambda.
    pub coefs: Vec<Matrix>,
    /// `K` intercepts per lambda.
    pub intercepts: Vec<Vec<f64>>,
    pub dev_ratio: Vec<f64>,
    /// Predictors with a nonzero coefficient row, per lambda.
    pub nonzero: Vec<usize>,
    /// Coordinate sweeps spent per lambda.
    pub sweeps: Vec<usize>,
}

impl EnetPath {
    pub fn len(&self) -> usize {
        self.lambdas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lambdas.is_empty()
    }

    /// Fitted values `1 b0ᵀ + X B` at path index `i`.
    pub fn predict(&self, i: usize, x: &Matrix) -> Result<Matrix> {
        predict(x, &self.coefs[i], &self.intercepts[i])
    }

    /// Whether predictor `j` has an all-zero coefficient row at index `i`.
    pub fn is_dropped(&self, i: usize, j: usize) -> bool {
        self.coefs[i].row(j).iter().all(|&v| v == 0.0)
    }
}

/// `1 b0ᵀ + X B`.
pub fn predict(x: &Matrix, b: &Matrix, b0: &[f64]) -> Result<Matrix> {
    if b.cols() != b0.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} intercepts for {} responses",
            b0.len(),
            b.cols()
        )));
    }
    let xb = crate::linalg::matmul(x, b)?;
    Ok(Matrix::from_fn(xb.rows(), xb.cols(), |i, k| xb.get(i, k) + b0[k]))
}

/// `sign(z) · max(|z| − γ, 0)`.
#[inline]
pub fn soft_threshold(z: f64, gamma: f64) -> f64 {
    debug_assert!(gamma >= 0.0);
    if z > gamma {
        z - gamma
    } else if z < -gamma {
        z + gamma
    } else {
        0.0
    }
}

/// `(1 − γ/‖u‖)₊ · u`.
pub fn group_soft_threshold(u: &[f64], gamma: f64) -> Vec<f64> {
    let mut out = u.to_vec();
    group_shrink_in_place(&mut out, gamma);
    out
}

fn group_shrink_in_place(u: &mut [f64], gamma: f64) {
    let norm = norm2(u);
    if norm <= gamma {
        u.iter_mut().for_each(|v| *v = 0.0);
    } else {
        let f = 1.0 - gamma / norm;
        u.iter_mut().for_each(|v| *v *= f);
    }
}

fn check_dims(x: &Matrix, y: &Matrix) -> Result<()> {
    if x.rows() != y.rows() {
        return Err(Error::DimensionMismatch(format!(
            "x has {} rows, y has {}",
            x.rows(),
            y.rows()
        )));
    }
    Ok(())
}

/// Penalized objective value for coefficients `b` (`p × K`) and intercepts
/// `b0`.
pub fn objective(
    x: &Matrix,
    y: &Matrix,
    b: &Matrix,
    b0: &[f64],
    lambda: f64,
    alpha: f64,
) -> Result<f64> {
    check_dims(x, y)?;
    if b.rows() != x.cols() || b.cols() != y.cols() {
        return Err(Error::DimensionMismatch(format!(
            "coefficients are {}x{}, expected {}x{}",
            b.rows(),
            b.cols(),
            x.cols(),
            y.cols()
        )));
    }
    let fitted = predict(x, b, b0)?;
    let rss = y.sub(&fitted)?.frobenius_sq();
    Ok(rss / (2.0 * x.rows() as f64) + lambda * penalty(b, alpha))
}

fn penalty(b: &Matrix, alpha: f64) -> f64 {
    (0..b.rows())
        .map(|j| {
            let row = b.row(j);
            let sq: f64 = row.iter().map(|v| v * v).sum();
            (1.0 - alpha) / 2.0 * sq + alpha * norm2(row)
        })
        .sum()
}

/// Smallest lambda at which the all-zero coefficient matrix is optimal:
/// `max_j ‖x_jᵀ y‖ / (N α)`. `y` is expected centered.
pub fn compute_lambda_max(x: &Matrix, y: &Matrix, alpha: f64) -> Result<f64> {
    check_dims(x, y)?;
    if alpha == 0.0 {
        return Err(Error::RidgeNeedsGrid);
    }
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(Error::InvalidArgument(format!("alpha = {alpha}")));
    }
    let xc: Vec<Vec<f64>> = (0..x.cols()).map(|j| x.column(j)).collect();
    let yc: Vec<Vec<f64>> = (0..y.cols()).map(|k| y.column(k)).collect();
    Ok(max_null_gradient(&xc, &yc) / alpha)
}

fn max_null_gradient(xcols: &[Vec<f64>], ycols: &[Vec<f64>]) -> f64 {
    let n = ycols[0].len() as f64;
    let mut g = vec![0.0; ycols.len()];
    xcols
        .iter()
        .map(|xj| {
            for (gk, yk) in g.iter_mut().zip(ycols) {
                *gk = dot(xj, yk) / n;
            }
            norm2(&g)
        })
        .fold(0.0, f64::max)
}

/// Geometric grid from `lambda_max` down to `lambda_max · lambda_min_ratio`.
pub fn make_lambda_path(lambda_max: f64, nlambda: usize, lambda_min_ratio: f64) -> Result<Vec<f64>> {
    if !(lambda_max > 0.0) || !lambda_max.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "lambda_max must be positive, got {lambda_max}"
        )));
    }
    if nlambda < 2 {
        return Err(Error::InvalidArgument("nlambda must be at least 2".into()));
    }
    if !(lambda_min_ratio > 0.0 && lambda_min_ratio < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "lambda_min_ratio must lie in (0, 1), got {lambda_min_ratio}"
        )));
    }
    let step = lambda_min_ratio.ln() / (nlambda - 1) as f64;
    let mut path: Vec<f64> = (0..nlambda)
        .map(|i| lambda_max * (step * i as f64).exp())
        .collect();
    path[0] = lambda_max;
    path[nlambda - 1] = lambda_max * lambda_min_ratio;
    Ok(path)
}

/// Cyclic coordinate descent state for one design and response block.
///
/// Exposed so callers can drive individual sweeps; the path functions are
/// the usual entry points.
#[derive(Debug, Clone)]
pub struct CoordinateDescent {
    n: usize,
    k: usize,
    alpha: f64,
    // predictor columns, centered when an intercept is fitted
    xcols: Vec<Vec<f64>>,
    x_means: Vec<f64>,
    y_means: Vec<f64>,
    ycols: Vec<Vec<f64>>,
    // x_jᵀ x_j / N
    c: Vec<f64>,
    // per response, length N
    resid: Vec<Vec<f64>>,
    // per predictor, length K
    beta: Vec<Vec<f64>>,
    scratch: Vec<f64>,
}

impl CoordinateDescent {
    pub fn new(x: &Matrix, y: &Matrix, alpha: f64, fit_intercept: bool) -> Result<Self> {
        check_dims(x, y)?;
        let n = x.rows();
        let (p, k) = (x.cols(), y.cols());
        let mut xcols: Vec<Vec<f64>> = (0..p).map(|j| x.column(j)).collect();
        let mut ycols: Vec<Vec<f64>> = (0..k).map(|j| y.column(j)).collect();
        let (x_means, y_means) = if fit_intercept {
            (center(&mut xcols), center(&mut ycols))
        } else {
            (vec![0.0; p], vec![0.0; k])
        };
        let c = xcols.iter().map(|xj| dot(xj, xj) / n as f64).collect();
        Ok(Self {
            n,
            k,
            alpha,
            resid: ycols.clone(),
            ycols,
            xcols,
            x_means,
            y_means,
            c,
            beta: vec![vec![0.0; k]; p],
            scratch: vec![0.0; k],
        })
    }

    pub fn n_predictors(&self) -> usize {
        self.xcols.len()
    }

    /// `max_j ‖(1/N) x_jᵀ y‖` on the (centered) working data.
    pub fn null_gradient_max(&self) -> f64 {
        max_null_gradient(&self.xcols, &self.ycols)
    }

    fn update(&mut self, j: usize, lambda: f64) -> f64 {
        let cj = self.c[j];
        if cj == 0.0 {
            return 0.0;
        }
        let inv_n = 1.0 / self.n as f64;
        let xj = &self.xcols[j];
        let old = &self.beta[j];
        for kk in 0..self.k {
            self.scratch[kk] = dot(xj, &self.resid[kk]) * inv_n + cj * old[kk];
        }
        let l1 = lambda * self.alpha;
        let denom = cj + lambda * (1.0 - self.alpha);
        if self.k == 1 {
            self.scratch[0] = soft_threshold(self.scratch[0], l1) / denom;
        } else {
            group_shrink_in_place(&mut self.scratch, l1);
            self.scratch.iter_mut().for_each(|v| *v /= denom);
        }
        let mut change = 0.0;
        for kk in 0..self.k {
            let delta = self.scratch[kk] - self.beta[j][kk];
            if delta != 0.0 {
                for (r, xv) in self.resid[kk].iter_mut().zip(xj) {
                    *r -= delta * xv;
                }
                change += delta * delta;
                self.beta[j][kk] = self.scratch[kk];
            }
        }
        cj * change
    }

    /// One pass over all predictors. Returns `max_j c_j ‖Δ B_j‖²`.
    pub fn sweep(&mut self, lambda: f64) -> f64 {
        (0..self.xcols.len())
            .map(|j| self.update(j, lambda))
            .fold(0.0, f64::max)
    }

    /// One pass over predictors whose coefficient row is currently nonzero.
    pub fn sweep_active(&mut self, lambda: f64) -> f64 {
        let mut worst = 0.0f64;
        for j in 0..self.xcols.len() {
            if self.beta[j].iter().any(|&v| v != 0.0) {
                worst = worst.max(self.update(j, lambda));
            }
        }
        worst
    }

    /// Largest violation of the optimality conditions at `lambda`.
    pub fn kkt_violation(&self, lambda: f64) -> f64 {
        let inv_n = 1.0 / self.n as f64;
        let mut g = vec![0.0; self.k];
        let mut worst = 0.0f64;
        for (xj, bj) in self.xcols.iter().zip(&self.beta) {
            for (gk, rk) in g.iter_mut().zip(&self.resid) {
                *gk = dot(xj, rk) * inv_n;
            }
            worst = worst.max(row_violation(&g, bj, lambda, self.alpha));
        }
        worst
    }

    /// Penalized objective of the current iterate (intercept at its optimum).
    pub fn objective(&self, lambda: f64) -> f64 {
        let rss: f64 = self.resid.iter().flat_map(|r| r.iter()).map(|v| v * v).sum();
        let pen: f64 = self
            .beta
            .iter()
            .map(|row| {
                let sq: f64 = row.iter().map(|v| v * v).sum();
                (1.0 - self.alpha) / 2.0 * sq + self.alpha * norm2(row)
            })
            .sum();
        rss / (2.0 * self.n as f64) + lambda * pen
    }

    pub fn reset(&mut self) {
        self.resid = self.ycols.clone();
        self.beta.iter_mut().for_each(|r| r.iter_mut().for_each(|v| *v = 0.0));
    }

    /// Runs sweeps at `lambda` until the sweep metric drops to `tol` and the
    /// optimality conditions hold to [`KKT_GUARD`]. Returns the sweep count.
    pub fn solve(&mut self, lambda: f64, tol: f64, max_iter: usize, active_set: bool) -> Option<usize> {
        let mut sweeps = 0;
        let mut tol = tol;
        loop {
            let change = self.sweep(lambda);
            sweeps += 1;
            if change <= tol {
                if self.kkt_violation(lambda) <= KKT_GUARD {
                    return Some(sweeps);
                }
                // metric converged but the certificate has not; tighten
                tol *= 1e-2;
                if sweeps >= max_iter {
                    return None;
                }
                continue;
            }
            if sweeps >= max_iter {
                return None;
            }
            if active_set {
                loop {
                    let change = self.sweep_active(lambda);
                    sweeps += 1;
                    if change <= tol {
                        break;
                    }
                    if sweeps >= max_iter {
                        return None;
                    }
                }
            }
        }
    }

    pub fn coefficients(&self) -> Matrix {
        Matrix::from_fn(self.beta.len(), self.k, |j, kk| self.beta[j][kk])
    }

    pub fn intercepts(&self) -> Vec<f64> {
        (0..self.k)
            .map(|kk| {
                self.y_means[kk]
                    - self
                        .x_means
                        .iter()
                        .zip(&self.beta)
                        .map(|(m, b)| m * b[kk])
                        .sum::<f64>()
            })
            .collect()
    }

    fn nonzero_rows(&self) -> usize {
        self.beta.iter().filter(|r| r.iter().any(|&v| v != 0.0)).count()
    }
}

/// KKT tolerance every returned path solution satisfies.
pub const KKT_GUARD: f64 = 1e-8;

fn center(cols: &mut [Vec<f64>]) -> Vec<f64> {
    cols.iter_mut()
        .map(|c| {
            let m = c.iter().sum::<f64>() / c.len() as f64;
            c.iter_mut().for_each(|v| *v -= m);
            m
        })
        .collect()
}

fn row_violation(g: &[f64], b: &[f64], lambda: f64, alpha: f64) -> f64 {
    let bnorm = norm2(b);
    if bnorm == 0.0 {
        (norm2(g) - lambda * alpha).max(0.0)
    } else {
        let r: Vec<f64> = g
            .iter()
            .zip(b)
            .map(|(gk, bk)| gk - lambda * (1.0 - alpha) * bk - lambda * alpha * bk / bnorm)
            .collect();
        norm2(&r)
    }
}

/// Single-response path on the automatic grid.
pub fn fit_gaussian_path(x: &Matrix, y: &[f64], config: &EnetConfig) -> Result<EnetPath> {
    fit_mgaussian_path(x, &Matrix::column_vector(y)?, config)
}

/// Single-response path on a caller-supplied grid.
pub fn fit_gaussian_path_on_grid(
    x: &Matrix,
    y: &[f64],
    config: &EnetConfig,
    lambdas: &[f64],
) -> Result<EnetPath> {
    fit_mgaussian_path_on_grid(x, &Matrix::column_vector(y)?, config, lambdas)
}

/// Multi-response path on the automatic grid from λ_max down to
/// `λ_max · lambda_min_ratio`.
pub fn fit_mgaussian_path(x: &Matrix, y: &Matrix, config: &EnetConfig) -> Result<EnetPath> {
    config.validate()?;
    let lambdas = lambda_grid(x, y, config)?;
    fit_mgaussian_path_on_grid(x, y, config, &lambdas)
}

/// The automatic grid [`fit_mgaussian_path`] uses for this data.
pub fn lambda_grid(x: &Matrix, y: &Matrix, config: &EnetConfig) -> Result<Vec<f64>> {
    config.validate()?;
    if config.alpha == 0.0 {
        return Err(Error::RidgeNeedsGrid);
    }
    let solver = CoordinateDescent::new(x, y, config.alpha, config.fit_intercept)?;
    let lmax = solver.null_gradient_max() / config.alpha;
    if !(lmax > 0.0) {
        return Err(Error::InvalidArgument(
            "responses are uncorrelated with every predictor; λ_max is zero".into(),
        ));
    }
    make_lambda_path(
        lmax,
        config.nlambda,
        config.lambda_min_ratio_for(x.rows(), x.cols()),
    )
}

/// Multi-response path on a caller-supplied, strictly decreasing grid of
/// nonnegative lambdas. Each lambda is warm-started from the previous one.
pub fn fit_mgaussian_path_on_grid(
    x: &Matrix,
    y: &Matrix,
    config: &EnetConfig,
    lambdas: &[f64],
) -> Result<EnetPath> {
    config.validate()?;
    check_dims(x, y)?;
    if lambdas.is_empty() {
        return Err(Error::InvalidArgument("empty lambda grid".into()));
    }
    if lambdas.iter().any(|l| !(*l >= 0.0) || !l.is_finite()) {
        return Err(Error::InvalidArgument("lambdas must be finite and >= 0".into()));
    }
    if lambdas.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::InvalidArgument("lambda grid must be strictly decreasing".into()));
    }
    let mut solver = CoordinateDescent::new(x, y, config.alpha, config.fit_intercept)?;
    let null_max = solver.null_gradient_max();
    let lmax = if config.alpha > 0.0 {
        null_max / config.alpha
    } else {
        f64::INFINITY
    };

    let k = y.cols();
    let mut path = EnetPath {
        lambdas: lambdas.to_vec(),
        coefs: Vec::with_capacity(lambdas.len()),
        intercepts: Vec::with_capacity(lambdas.len()),
        dev_ratio: Vec::with_capacity(lambdas.len()),
        nonzero: Vec::with_capacity(lambdas.len()),
        sweeps: Vec::with_capacity(lambdas.len()),
    };
    for (idx, &lambda) in lambdas.iter().enumerate() {
        let sweeps = if lambda >= lmax {
            // zero is optimal here; skip iterations so the path head is exact
            solver.reset();
            0
        } else {
            solver
                .solve(lambda, config.tol, config.max_iter, config.active_set)
                .ok_or(Error::MaxIterations {
                    lambda_index: idx,
                    iterations: config.max_iter,
                })?
        };
        path.coefs.push(solver.coefficients());
        path.intercepts.push(solver.intercepts());
        path.nonzero.push(solver.nonzero_rows());
        path.sweeps.push(sweeps);
    }
    debug_assert_eq!(path.intercepts[0].len(), k);
    path.dev_ratio = deviance_explained(&path, x, y)?;
    Ok(path)
}

/// Fraction of deviance explained, `1 − RSS(λ)/TSS`, for every path point.
pub fn deviance_explained(path: &EnetPath, x: &Matrix, y: &Matrix) -> Result<Vec<f64>> {
    check_dims(x, y)?;
    let means = y.column_means();
    let tss: f64 = (0..y.rows())
        .flat_map(|i| (0..y.cols()).map(move |k| (i, k)))
        .map(|(i, k)| (y.get(i, k) - means[k]).powi(2))
        .sum();
    if !(tss > 0.0) {
        return Err(Error::ZeroTotalVariance);
    }
    (0..path.len())
        .map(|i| {
            let rss = y.sub(&path.predict(i, x)?)?.frobenius_sq();
            Ok(1.0 - rss / tss)
        })
        .collect()
}

/// Outcome of [`kkt_check`].
#[derive(Debug, Clone, PartialEq)]
pub struct KktReport {
    pub max_violation: f64,
    /// Predictors whose violation exceeds the tolerance.
    pub violating: Vec<usize>,
}

impl KktReport {
    pub fn passed(&self) -> bool {
        self.violating.is_empty()
    }
}

/// Checks the optimality conditions of a candidate solution.
///
/// Zero rows must have `‖(1/N) x_jᵀ r‖ ≤ λα + tol`; nonzero rows must have
/// `‖(1/N) x_jᵀ r − λ(1−α) B_j − λα B_j/‖B_j‖‖ ≤ tol`, with `r` the residual
/// matrix. Panics if the shapes do not conform.
pub fn kkt_check(
    x: &Matrix,
    y: &Matrix,
    b: &Matrix,
    b0: &[f64],
    lambda: f64,
    alpha: f64,
    tol: f64,
) -> KktReport {
    let fitted = predict(x, b, b0).expect("conformable coefficients");
    let r = y.sub(&fitted).expect("conformable responses");
    let n = x.rows() as f64;
    let mut max_violation = 0.0f64;
    let mut violating = Vec::new();
    let mut g = vec![0.0; y.cols()];
    for j in 0..x.cols() {
        for (k, gk) in g.iter_mut().enumerate() {
            *gk = (0..x.rows()).map(|i| x.get(i, j) * r.get(i, k)).sum::<f64>() / n;
        }
        let v = row_violation(&g, b.row(j), lambda, alpha);
        max_violation = max_violation.max(v);
        if v > tol {
            violating.push(j);
        }
    }
    KktReport {
        max_violation,
        violating,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{cholesky_solve, matmul, matmul_tn};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn gauss(rng: &mut ChaCha8Rng) -> f64 {
        // Box-Muller
        let u1: f64 = rng.gen_range(f64::EPSILON..1.0);
        let u2: f64 = rng.gen();
        (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
    }

    fn standardized(rng: &mut ChaCha8Rng, n: usize, p: usize) -> Matrix {
        let cols: Vec<Vec<f64>> = (0..p)
            .map(|_| {
                let c: Vec<f64> = (0..n).map(|_| gauss(rng)).collect();
                let (m, sd) = crate::dataprep::mean_sd(&c);
                c.iter().map(|v| (v - m) / sd).collect()
            })
            .collect();
        Matrix::from_columns(&cols).unwrap()
    }

    fn instance(seed: u64, n: usize, p: usize, k: usize) -> (Matrix, Matrix) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x = standardized(&mut rng, n, p);
        let b = Matrix::from_fn(p, k, |_, _| if rng.gen_bool(0.5) { gauss(&mut rng) } else { 0.0 });
        let xb = matmul(&x, &b).unwrap();
        let y = Matrix::from_fn(n, k, |i, kk| xb.get(i, kk) + 0.5 * gauss(&mut rng) + 1.0);
        (x, y)
    }

    #[test]
    fn thresholds() {
        assert_eq!(soft_threshold(2.0, 1.0), 1.0);
        assert_eq!(soft_threshold(-0.5, 1.0), 0.0);
        assert_eq!(soft_threshold(3.0, 0.0), 3.0);
        assert_eq!(soft_threshold(-3.0, 1.0), -2.0);
        assert_eq!(group_soft_threshold(&[3.0, 4.0], 5.0), vec![0.0, 0.0]);
        assert_eq!(group_soft_threshold(&[3.0, 4.0], 0.0), vec![3.0, 4.0]);
        assert_eq!(group_soft_threshold(&[6.0, 8.0], 5.0), vec![3.0, 4.0]);
    }

    #[test]
    fn objective_examples() {
        let (x, y) = instance(1, 4, 2, 2);
        let means = y.column_means();
        let zero = Matrix::zeros(2, 2);
        let centered_ss: f64 = (0..4)
            .flat_map(|i| (0..2).map(move |k| (i, k)))
            .map(|(i, k)| (y.get(i, k) - means[k]).powi(2))
            .sum();
        let v = objective(&x, &y, &zero, &means, 0.7, 0.5).unwrap();
        assert!((v - centered_ss / 8.0).abs() < 1e-14);

        // lambda = 0 at OLS
        let z = x.with_intercept();
        let coef = crate::linalg::least_squares(&z, &y).unwrap();
        let b = coef.select_rows(&[1, 2]).unwrap();
        let b0 = coef.row(0).to_vec();
        let rss = y.sub(&predict(&x, &b, &b0).unwrap()).unwrap().frobenius_sq();
        assert!((objective(&x, &y, &b, &b0, 0.0, 0.5).unwrap() - rss / 8.0).abs() < 1e-14);

        // term-by-term summation
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let b = Matrix::from_fn(2, 2, |_, _| gauss(&mut rng));
        let b0 = vec![0.3, -0.2];
        let (lambda, alpha) = (0.37, 0.25);
        let mut loss = 0.0;
        for i in 0..4 {
            for k in 0..2 {
                let mut f = b0[k];
                for j in 0..2 {
                    f += x.get(i, j) * b.get(j, k);
                }
                loss += (y.get(i, k) - f).powi(2);
            }
        }
        let mut pen = 0.0;
        for j in 0..2 {
            let sq = b.get(j, 0).powi(2) + b.get(j, 1).powi(2);
            pen += (1.0 - alpha) / 2.0 * sq + alpha * sq.sqrt();
        }
        let oracle = loss / 8.0 + lambda * pen;
        assert!((objective(&x, &y, &b, &b0, lambda, alpha).unwrap() - oracle).abs() < 1e-12);
        assert!(objective(&x, &y, &Matrix::zeros(3, 2), &b0, 0.1, 0.5).is_err());
    }

    #[test]
    fn lambda_max_examples() {
        // y orthogonal to every column
        let x = Matrix::from_columns(&[vec![1.0, -1.0, 1.0, -1.0]]).unwrap();
        let y = Matrix::column_vector(&[1.0, 1.0, -1.0, -1.0]).unwrap();
        assert_eq!(compute_lambda_max(&x, &y, 0.5).unwrap(), 0.0);

        let (x, y) = instance(2, 10, 3, 2);
        let yc = Matrix::from_fn(10, 2, |i, k| y.get(i, k) - y.column_means()[k]);
        let half = compute_lambda_max(&x, &yc, 0.5).unwrap();
        let one = compute_lambda_max(&x, &yc, 1.0).unwrap();
        assert!((half - 2.0 * one).abs() <= 1e-14 * half);
        let mut oracle = 0.0f64;
        for j in 0..3 {
            let mut sq = 0.0;
            for k in 0..2 {
                let s: f64 = (0..10).map(|i| x.get(i, j) * yc.get(i, k)).sum::<f64>() / 10.0;
                sq += s * s;
            }
            oracle = oracle.max(sq.sqrt());
        }
        assert!((one - oracle).abs() < 1e-12);
        assert_eq!(compute_lambda_max(&x, &yc, 0.0), Err(Error::RidgeNeedsGrid));
    }

    #[test]
    fn lambda_path_examples() {
        assert_eq!(make_lambda_path(1.0, 2, 0.01).unwrap(), vec![1.0, 0.01]);
        let p = make_lambda_path(1.0, 3, 0.01).unwrap();
        assert_eq!(p[0], 1.0);
        assert!((p[1] - 0.1).abs() < 1e-15);
        assert_eq!(p[2], 0.01);
        let base = make_lambda_path(0.033, 10, 1e-3).unwrap();
        let scaled = make_lambda_path(0.033 * 7.5, 10, 1e-3).unwrap();
        for (a, b) in base.iter().zip(&scaled) {
            assert!((a * 7.5 - b).abs() <= 1e-14 * b);
        }
        assert!(base.windows(2).all(|w| w[1] < w[0]));
        assert!(make_lambda_path(0.0, 3, 0.1).is_err());
        assert!(make_lambda_path(1.0, 1, 0.1).is_err());
    }

    #[test]
    fn path_head_is_exactly_zero() {
        let (x, y) = instance(3, 20, 4, 2);
        let path = fit_mgaussian_path(&x, &y, &EnetConfig::default()).unwrap();
        assert!(path.coefs[0].as_slice().iter().all(|&v| v == 0.0));
        assert_eq!(path.nonzero[0], 0);
        assert!(path.dev_ratio[0].abs() < 1e-12);
        let single = fit_mgaussian_path_on_grid(&x, &y, &EnetConfig::default(), &path.lambdas[..1]).unwrap();
        assert!(single.coefs[0].as_slice().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn ridge_matches_closed_form() {
        let (x, y) = instance(4, 30, 5, 1);
        let lambda = 0.3;
        let cfg = EnetConfig {
            alpha: 0.0,
            fit_intercept: false,
            ..Default::default()
        };
        let yv = y.column(0);
        let yc: Vec<f64> = yv.iter().map(|v| v - yv.iter().sum::<f64>() / 30.0).collect();
        let path = fit_gaussian_path_on_grid(&x, &yc, &cfg, &[lambda]).unwrap();
        let n = 30.0;
        let gram = matmul_tn(&x, &x).unwrap().scale(1.0 / n).add(&Matrix::identity(5).scale(lambda)).unwrap();
        let rhs = matmul_tn(&x, &Matrix::column_vector(&yc).unwrap()).unwrap().scale(1.0 / n);
        let oracle = cholesky_solve(&gram, &rhs).unwrap();
        assert!(path.coefs[0].sub(&oracle).unwrap().max_abs() < 1e-6);
    }

    #[test]
    fn orthonormal_lasso_is_soft_threshold() {
        // columns with xᵀx/N = I
        let n = 8;
        let h = [
            [1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0],
            [1.0, -1.0, 1.0, -1.0, 1.0, -1.0, 1.0, -1.0],
            [1.0, 1.0, -1.0, -1.0, 1.0, 1.0, -1.0, -1.0],
            [1.0, -1.0, -1.0, 1.0, 1.0, -1.0, -1.0, 1.0],
        ];
        let x = Matrix::from_columns(&h[1..].iter().map(|r| r.to_vec()).collect::<Vec<_>>()).unwrap();
        let y: Vec<f64> = (0..n).map(|i| (i as f64 * 0.7).sin() * 2.0).collect();
        let cfg = EnetConfig {
            alpha: 1.0,
            fit_intercept: false,
            ..Default::default()
        };
        let lambda = 0.25;
        let path = fit_gaussian_path_on_grid(&x, &y, &cfg, &[lambda]).unwrap();
        for j in 0..3 {
            let z: f64 = (0..n).map(|i| x.get(i, j) * y[i]).sum::<f64>() / n as f64;
            assert!((path.coefs[0].get(j, 0) - soft_threshold(z, lambda)).abs() < 1e-8);
        }
    }

    #[test]
    fn single_response_reduction_is_exact() {
        let (x, y) = instance(5, 25, 4, 1);
        let cfg = EnetConfig::default();
        let a = fit_gaussian_path(&x, &y.column(0), &cfg).unwrap();
        let b = fit_mgaussian_path(&x, &y, &cfg).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn path_solutions_pass_kkt_and_dev_ratio_monotone() {
        for (seed, k) in [(6, 1), (7, 2), (8, 3)] {
            let (x, y) = instance(seed, 30, 6, k);
            let cfg = EnetConfig::default();
            let path = fit_mgaussian_path(&x, &y, &cfg).unwrap();
            for i in 0..path.len() {
                let rep = kkt_check(&x, &y, &path.coefs[i], &path.intercepts[i], path.lambdas[i], cfg.alpha, 1e-6);
                assert!(rep.passed(), "lambda {i}: {rep:?}");
                assert!(path.nonzero[i] <= 6);
            }
            assert!(path.dev_ratio.windows(2).all(|w| w[1] >= w[0] - 1e-8));
        }
    }

    #[test]
    fn kkt_check_examples() {
        let (x, y) = instance(10, 20, 3, 2);
        let cfg = EnetConfig::default();
        let path = fit_mgaussian_path(&x, &y, &cfg).unwrap();
        let means = y.column_means();
        let zero = Matrix::zeros(3, 2);
        assert!(kkt_check(&x, &y, &zero, &means, path.lambdas[0] * 1.5, 0.5, 1e-10).passed());

        let z = x.with_intercept();
        let coef = crate::linalg::least_squares(&z, &y).unwrap();
        let b = coef.select_rows(&[1, 2, 3]).unwrap();
        assert!(kkt_check(&x, &y, &b, coef.row(0), 0.0, 0.5, 1e-10).passed());

        let i = path.len() / 2;
        let sol = &path.coefs[i];
        let j = (0..3).find(|&j| sol.row(j).iter().any(|&v| v != 0.0)).unwrap();
        let bumped = Matrix::from_fn(3, 2, |r, c| sol.get(r, c) + if r == j && c == 0 { 0.1 } else { 0.0 });
        let rep = kkt_check(&x, &y, &bumped, &path.intercepts[i], path.lambdas[i], 0.5, 1e-6);
        assert!(rep.violating.contains(&j));
    }

    #[test]
    fn deviance_examples() {
        let (x, _) = instance(11, 15, 3, 1);
        // exactly linear response
        let y = Matrix::from_fn(15, 2, |i, k| 1.0 + x.get(i, 0) * (k as f64 + 1.0) - x.get(i, 2));
        let cfg = EnetConfig {
            lambda_min_ratio: Some(1e-9),
            tol: 1e-14,
            ..Default::default()
        };
        let path = fit_mgaussian_path(&x, &y, &cfg).unwrap();
        assert_eq!(path.dev_ratio[0], 0.0);
        assert!((path.dev_ratio.last().unwrap() - 1.0).abs() < 1e-8);

        let (x, y) = instance(12, 6, 2, 2);
        let path = fit_mgaussian_path(&x, &y, &EnetConfig { nlambda: 5, ..Default::default() }).unwrap();
        let dev = deviance_explained(&path, &x, &y).unwrap();
        let means = y.column_means();
        for i in 0..path.len() {
            let mut rss = 0.0;
            let mut tss = 0.0;
            for r in 0..6 {
                for k in 0..2 {
                    let mut f = path.intercepts[i][k];
                    for j in 0..2 {
                        f += x.get(r, j) * path.coefs[i].get(j, k);
                    }
                    rss += (y.get(r, k) - f).powi(2);
                    tss += (y.get(r, k) - means[k]).powi(2);
                }
            }
            assert!((dev[i] - (1.0 - rss / tss)).abs() < 1e-12);
        }
        let flat = Matrix::from_fn(6, 2, |_, _| 2.0);
        assert_eq!(deviance_explained(&path, &x, &flat), Err(Error::ZeroTotalVariance));
    }

    #[test]
    fn objective_never_increases_per_sweep() {
        for (seed, k) in [(13, 1), (14, 2), (15, 3)] {
            let (x, y) = instance(seed, 25, 6, k);
            let lmax = lambda_grid(&x, &y, &EnetConfig::default()).unwrap()[0];
            let mut cd = CoordinateDescent::new(&x, &y, 0.5, true).unwrap();
            for lambda in [lmax * 0.5, lmax * 0.1, lmax * 0.01] {
                let mut prev = cd.objective(lambda);
                for _ in 0..50 {
                    cd.sweep(lambda);
                    let cur = cd.objective(lambda);
                    assert!(cur <= prev + 1e-12 * prev.abs());
                    prev = cur;
                }
            }
        }
    }

    #[test]
    fn warm_and_cold_starts_agree() {
        let (x, y) = instance(16, 30, 5, 2);
        let cfg = EnetConfig::default();
        let path = fit_mgaussian_path(&x, &y, &cfg).unwrap();
        for i in [3, 20, 50, 99] {
            let cold = fit_mgaussian_path_on_grid(&x, &y, &cfg, &[path.lambdas[i]]).unwrap();
            assert!(cold.coefs[0].sub(&path.coefs[i]).unwrap().max_abs() < 1e-6);
        }
    }

    #[test]
    fn active_set_matches_plain_sweeps() {
        let (x, y) = instance(17, 30, 6, 2);
        let tight = EnetConfig {
            tol: 1e-16,
            ..Default::default()
        };
        let a = fit_mgaussian_path(&x, &y, &tight).unwrap();
        let b = fit_mgaussian_path(&x, &y, &EnetConfig { active_set: false, ..tight }).unwrap();
        for i in 0..a.len() {
            assert!(a.coefs[i].sub(&b.coefs[i]).unwrap().max_abs() < 1e-8);
        }
    }

    #[test]
    fn smallest_problem_runs() {
        let x = Matrix::from_columns(&[vec![-1.0, 0.0, 1.0]]).unwrap();
        let y = [0.5, 1.0, 2.0];
        let path = fit_gaussian_path(&x, &y, &EnetConfig::default()).unwrap();
        assert_eq!(path.len(), 100);
        assert!(path.coefs.last().unwrap().get(0, 0) > 0.0);
    }

    #[test]
    fn max_iter_reports_lambda_index() {
        let (x, y) = instance(18, 30, 6, 2);
        let cfg = EnetConfig {
            max_iter: 1,
            ..Default::default()
        };
        assert!(matches!(
            fit_mgaussian_path(&x, &y, &cfg),
            Err(Error::MaxIterations { lambda_index: 1, .. })
        ));
    }
}
