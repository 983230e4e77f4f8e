//! K-fold cross-validation over a shared lambda grid.

use rayon::prelude::*;

use crate::enet::{fit_mgaussian_path_on_grid, lambda_grid, EnetConfig};
use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::rng::SplitMix64;

pub const DEFAULT_FOLDS: usize = 10;

/// Fold label for every observation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FoldAssignment {
    pub folds: Vec<usize>,
    pub k: usize,
    pub seed: u64,
}

impl FoldAssignment {
    pub fn n(&self) -> usize {
        self.folds.len()
    }

    pub fn sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.k];
        for &f in &self.folds {
            sizes[f] += 1;
        }
        sizes
    }

    /// `(training rows, held-out rows)` for fold `f`, each ascending.
    pub fn split(&self, f: usize) -> (Vec<usize>, Vec<usize>) {
        (0..self.n()).partition(|&i| self.folds[i] != f)
    }
}

/// Shuffles `0..n` with [`SplitMix64`] seeded by `seed` and deals the
/// permutation round-robin: the observation at shuffled position `i` goes to
/// fold `i mod k`.
pub fn make_folds(n: usize, k: usize, seed: u64) -> Result<FoldAssignment> {
    if k < 2 || k > n {
        return Err(Error::InvalidArgument(format!(
            "fold count must satisfy 2 <= k <= n, got k = {k}, n = {n}"
        )));
    }
    let mut perm: Vec<usize> = (0..n).collect();
    SplitMix64::new(seed).shuffle(&mut perm);
    let mut folds = vec![0; n];
    for (pos, &obs) in perm.iter().enumerate() {
        folds[obs] = pos % k;
    }
    Ok(FoldAssignment { folds, k, seed })
}

/// Cross-validation curve and the two selection rules.
#[derive(Debug, Clone, PartialEq)]
pub struct CvResult {
    pub lambdas: Vec<f64>,
    pub mean_error: Vec<f64>,
    pub se_error: Vec<f64>,
    pub lambda_min: f64,
    pub lambda_1se: f64,
    pub index_min: usize,
    pub index_1se: usize,
    /// Held-out error of every fold at every lambda (`k` rows).
    pub fold_errors: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum LambdaRule {
    #[default]
    Min,
    OneSe,
}

impl CvResult {
    pub fn select(&self, rule: LambdaRule) -> (usize, f64) {
        match rule {
            LambdaRule::Min => (self.index_min, self.lambda_min),
            LambdaRule::OneSe => (self.index_1se, self.lambda_1se),
        }
    }
}

/// Cross-validates on the automatic grid of the full data.
pub fn cross_validate(
    x: &Matrix,
    y: &Matrix,
    config: &EnetConfig,
    folds: &FoldAssignment,
) -> Result<CvResult> {
    let lambdas = lambda_grid(x, y, config)?;
    cross_validate_on_grid(x, y, config, folds, &lambdas)
}

/// Cross-validates on a given grid.
///
/// Each fold refits on its training rows with the same grid and scores the
/// held-out rows by the mean over observations of the squared error summed
/// across responses. The curve is the size-weighted mean of fold errors
/// (equal to the mean over all observations), and its standard error is
/// `sqrt(Σ_f n_f (e_f − ē)² / N / (k − 1))`.
pub fn cross_validate_on_grid(
    x: &Matrix,
    y: &Matrix,
    config: &EnetConfig,
    folds: &FoldAssignment,
    lambdas: &[f64],
) -> Result<CvResult> {
    if x.rows() != y.rows() || folds.n() != x.rows() {
        return Err(Error::DimensionMismatch(format!(
            "x has {} rows, y has {}, folds cover {}",
            x.rows(),
            y.rows(),
            folds.n()
        )));
    }
    let sizes = folds.sizes();
    if sizes.contains(&0) {
        return Err(Error::InvalidArgument("every fold needs at least one observation".into()));
    }

    // folds run in parallel; results come back in fold order
    let fold_errors = (0..folds.k)
        .into_par_iter()
        .map(|f| fold_error(x, y, config, folds, f, lambdas))
        .collect::<Result<Vec<Vec<f64>>>>()?;

    let n = x.rows() as f64;
    let k = folds.k as f64;
    let nl = lambdas.len();
    let mut mean_error = vec![0.0; nl];
    let mut se_error = vec![0.0; nl];
    for l in 0..nl {
        let mean = fold_errors
            .iter()
            .zip(&sizes)
            .map(|(e, &s)| s as f64 * e[l])
            .sum::<f64>()
            / n;
        let var = fold_errors
            .iter()
            .zip(&sizes)
            .map(|(e, &s)| s as f64 * (e[l] - mean).powi(2))
            .sum::<f64>()
            / n
            / (k - 1.0);
        mean_error[l] = mean;
        se_error[l] = var.sqrt();
    }

    let (index_min, index_1se) = select_indices(&mean_error, &se_error);
    Ok(CvResult {
        lambdas: lambdas.to_vec(),
        lambda_min: lambdas[index_min],
        lambda_1se: lambdas[index_1se],
        mean_error,
        se_error,
        index_min,
        index_1se,
        fold_errors,
    })
}

/// Minimum of the curve (ties go to the larger lambda, i.e. the earlier
/// index) and the earliest index within one standard error of it.
fn select_indices(mean: &[f64], se: &[f64]) -> (usize, usize) {
    let mut best = 0;
    for (i, &m) in mean.iter().enumerate() {
        if m < mean[best] {
            best = i;
        }
    }
    let bound = mean[best] + se[best];
    let one_se = mean.iter().position(|&m| m <= bound).unwrap_or(best);
    (best, one_se)
}

fn fold_error(
    x: &Matrix,
    y: &Matrix,
    config: &EnetConfig,
    folds: &FoldAssignment,
    f: usize,
    lambdas: &[f64],
) -> Result<Vec<f64>> {
    let (train, test) = folds.split(f);
    let xt = x.select_rows(&train)?;
    for j in 0..xt.cols() {
        let first = xt.get(0, j);
        if (0..xt.rows()).all(|i| xt.get(i, j) == first) {
            return Err(Error::ConstantInFold { fold: f, column: j });
        }
    }
    let yt = y.select_rows(&train)?;
    let path = fit_mgaussian_path_on_grid(&xt, &yt, config, lambdas)?;
    let xh = x.select_rows(&test)?;
    let yh = y.select_rows(&test)?;
    (0..path.len())
        .map(|l| {
            let pred = path.predict(l, &xh)?;
            Ok(yh.sub(&pred)?.frobenius_sq() / test.len() as f64)
        })
        .collect()
}
