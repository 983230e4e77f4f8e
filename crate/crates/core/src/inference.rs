//! Multivariate multiple regression and the tests built on it: per-term
//! MANOVA with Pillai's trace, univariate follow-up fits, variance inflation
//! factors, Pearson correlation and residual listings.

use crate::dist::{f_sf, t_sf};
use crate::error::{Error, Result};
use crate::linalg::{cholesky_solve, least_squares, matmul, matmul_tn, spd_inverse, Matrix};

/// Ordinary least-squares fit of `K` responses on a shared design with an
/// intercept.
#[derive(Debug, Clone, PartialEq)]
pub struct MlmFit {
    /// `(p + 1) × K`; row 0 holds the intercepts.
    pub coef: Matrix,
    pub fitted: Matrix,
    pub residuals: Matrix,
    /// `residualsᵀ residuals`.
    pub e_matrix: Matrix,
    pub df_error: usize,
    /// `(ZᵀZ)⁻¹` for the design `Z = [1, X]`.
    pub xtx_inv: Matrix,
    pub predictor_names: Vec<String>,
    pub response_names: Vec<String>,
    /// Responses as fitted; kept for R² and TSS.
    pub y: Matrix,
}

impl MlmFit {
    pub fn n(&self) -> usize {
        self.fitted.rows()
    }

    pub fn n_predictors(&self) -> usize {
        self.coef.rows() - 1
    }

    pub fn n_responses(&self) -> usize {
        self.coef.cols()
    }
}

/// Fits with default names `x1..xp` and `y1..yK`.
pub fn fit_mlm(x: &Matrix, y: &Matrix) -> Result<MlmFit> {
    let pn = (1..=x.cols()).map(|j| format!("x{j}")).collect();
    let rn = (1..=y.cols()).map(|k| format!("y{k}")).collect();
    fit_mlm_named(x, y, pn, rn)
}

pub fn fit_mlm_named(
    x: &Matrix,
    y: &Matrix,
    predictor_names: Vec<String>,
    response_names: Vec<String>,
) -> Result<MlmFit> {
    if x.rows() != y.rows() {
        return Err(Error::DimensionMismatch(format!(
            "x has {} rows, y has {}",
            x.rows(),
            y.rows()
        )));
    }
    if predictor_names.len() != x.cols() || response_names.len() != y.cols() {
        return Err(Error::DimensionMismatch("name count does not match columns".into()));
    }
    let n = x.rows();
    let p = x.cols();
    if n <= p + 1 {
        return Err(Error::TooFewRows {
            needed: p + 2,
            found: n,
        });
    }
    let z = x.with_intercept();
    // column 0 is the intercept; report predictor columns by their own index
    let coef = least_squares(&z, y).map_err(|e| match e {
        Error::RankDeficient { column } if column > 0 => {
            Error::PerfectCollinearity(predictor_names[column - 1].clone())
        }
        other => other,
    })?;
    let fitted = matmul(&z, &coef)?;
    let residuals = y.sub(&fitted)?;
    let e_matrix = symmetrize(&matmul_tn(&residuals, &residuals)?);
    let xtx_inv = spd_inverse(&matmul_tn(&z, &z)?)?;
    Ok(MlmFit {
        coef,
        fitted,
        residuals,
        e_matrix,
        df_error: n - p - 1,
        xtx_inv,
        predictor_names,
        response_names,
        y: y.clone(),
    })
}

fn symmetrize(a: &Matrix) -> Matrix {
    Matrix::from_fn(a.rows(), a.cols(), |i, j| 0.5 * (a.get(i, j) + a.get(j, i)))
}

/// One line of the multivariate test table.
#[derive(Debug, Clone, PartialEq)]
pub struct ManovaRow {
    pub term: String,
    pub df: usize,
    pub pillai: f64,
    pub approx_f: f64,
    pub num_df: usize,
    pub den_df: usize,
    pub p_value: f64,
}

/// Tests each predictor's coefficient row jointly across responses, given
/// all other predictors.
///
/// With `B_j` the row and `c_jj` its diagonal entry of `(ZᵀZ)⁻¹`, the
/// hypothesis matrix is `H = B_jᵀ B_j / c_jj` and Pillai's trace is
/// `V = tr(H (H + E)⁻¹)`. Single-df terms transform exactly:
/// `F = V/(1 − V) · (df_error − K + 1)/K` on `(K, df_error − K + 1)`.
pub fn manova_table(fit: &MlmFit) -> Result<Vec<ManovaRow>> {
    let k = fit.n_responses();
    let p = fit.n_predictors();
    if p == 0 {
        return Err(Error::InvalidArgument("no predictor terms to test".into()));
    }
    if fit.df_error < k {
        return Err(Error::InvalidArgument(format!(
            "{} error df is too few for {k} responses",
            fit.df_error
        )));
    }
    let den_df = fit.df_error - k + 1;
    (1..=p)
        .map(|j| {
            let b = fit.coef.row(j);
            let c = fit.xtx_inv.get(j, j);
            let h = Matrix::from_fn(k, k, |r, s| b[r] * b[s] / c);
            let he = h.add(&fit.e_matrix)?;
            // tr(H (H+E)⁻¹) = tr((H+E)⁻¹ H) since both are symmetric
            let pillai = cholesky_solve(&he, &h)?.trace();
            let approx_f = if pillai >= 1.0 {
                f64::INFINITY
            } else {
                (pillai / (1.0 - pillai)) * den_df as f64 / k as f64
            };
            let p_value = f_sf(approx_f.max(0.0), k, den_df)?.value;
            Ok(ManovaRow {
                term: fit.predictor_names[j - 1].clone(),
                df: 1,
                pillai,
                approx_f: approx_f.max(0.0),
                num_df: k,
                den_df,
                p_value,
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct CoefRow {
    pub name: String,
    pub estimate: f64,
    pub std_error: f64,
    pub t: f64,
    pub p: f64,
}

/// Per-response OLS summary.
#[derive(Debug, Clone, PartialEq)]
pub struct UnivariateSummary {
    pub response: String,
    /// Intercept first, then predictors.
    pub coefs: Vec<CoefRow>,
    pub f_stat: f64,
    pub df1: usize,
    pub df2: usize,
    pub f_p: f64,
    pub r2: f64,
    pub r2_adj: f64,
    /// Residual standard error.
    pub sigma: f64,
}

/// `R² = F·df1 / (F·df1 + df2)`, the inverse of the overall F identity.
pub fn r2_from_f(f: f64, df1: usize, df2: usize) -> f64 {
    let num = f * df1 as f64;
    num / (num + df2 as f64)
}

/// `1 − (1 − R²)(N − 1)/(N − p − 1)`.
pub fn adjusted_r2(r2: f64, n: usize, p: usize) -> f64 {
    1.0 - (1.0 - r2) * (n as f64 - 1.0) / (n as f64 - p as f64 - 1.0)
}

/// `(R²/p) / ((1 − R²)/(N − p − 1))`.
pub fn f_from_r2(r2: f64, n: usize, p: usize) -> f64 {
    (r2 / p as f64) / ((1.0 - r2) / (n as f64 - p as f64 - 1.0))
}

pub fn univariate_summary(fit: &MlmFit, response: usize) -> Result<UnivariateSummary> {
    let k = fit.n_responses();
    if response >= k {
        return Err(Error::InvalidArgument(format!(
            "response index {response} out of range for {k} responses"
        )));
    }
    let n = fit.n();
    let p = fit.n_predictors();
    let df = fit.df_error;
    let resid = fit.residuals.column(response);
    let rss: f64 = resid.iter().map(|r| r * r).sum();
    let yk = fit.y.column(response);
    let mean = yk.iter().sum::<f64>() / n as f64;
    let tss: f64 = yk.iter().map(|v| (v - mean).powi(2)).sum();
    if rss <= f64::EPSILON * tss.max(f64::MIN_POSITIVE) * n as f64 || rss == 0.0 {
        return Err(Error::PerfectFit);
    }
    if !(tss > 0.0) {
        return Err(Error::ZeroTotalVariance);
    }
    let sigma2 = rss / df as f64;
    let names = std::iter::once("(Intercept)".to_string()).chain(fit.predictor_names.iter().cloned());
    let coefs = names
        .enumerate()
        .map(|(j, name)| {
            let estimate = fit.coef.get(j, response);
            let std_error = (sigma2 * fit.xtx_inv.get(j, j)).sqrt();
            let t = estimate / std_error;
            Ok(CoefRow {
                name,
                estimate,
                std_error,
                t,
                p: t_sf(t, df)?.value,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let r2 = 1.0 - rss / tss;
    let (f_stat, f_p) = if p > 0 {
        let f = f_from_r2(r2, n, p);
        (f, f_sf(f, p, df)?.value)
    } else {
        (0.0, 1.0)
    };
    Ok(UnivariateSummary {
        response: fit.response_names[response].clone(),
        coefs,
        f_stat,
        df1: p,
        df2: df,
        f_p,
        r2,
        r2_adj: adjusted_r2(r2, n, p),
        sigma: sigma2.sqrt(),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct VifEntry {
    pub name: String,
    pub r2_aux: f64,
    pub vif: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VifReport {
    pub entries: Vec<VifEntry>,
}

/// Threshold on `1 − R²` below which a predictor counts as perfectly
/// explained by the others.
const COLLINEARITY_TOL: f64 = 1e-12;

pub fn vif(x: &Matrix) -> Result<VifReport> {
    let names: Vec<String> = (1..=x.cols()).map(|j| format!("x{j}")).collect();
    vif_named(x, &names)
}

/// `1/(1 − R²_j)` from regressing each column on the others with an
/// intercept.
pub fn vif_named(x: &Matrix, names: &[String]) -> Result<VifReport> {
    let p = x.cols();
    if p < 2 {
        return Err(Error::InvalidArgument("vif needs at least two predictors".into()));
    }
    if names.len() != p {
        return Err(Error::DimensionMismatch("name count does not match columns".into()));
    }
    let entries = (0..p)
        .map(|j| {
            let others: Vec<usize> = (0..p).filter(|&c| c != j).collect();
            let design = x.select_columns(&others)?.with_intercept();
            let target = x.select_columns(&[j])?;
            let b = least_squares(&design, &target).map_err(|e| match e {
                Error::RankDeficient { .. } => Error::PerfectCollinearity(names[j].clone()),
                other => other,
            })?;
            let resid = target.sub(&matmul(&design, &b)?)?;
            let rss = resid.frobenius_sq();
            let col = target.column(0);
            let mean = col.iter().sum::<f64>() / col.len() as f64;
            let tss: f64 = col.iter().map(|v| (v - mean).powi(2)).sum();
            if !(tss > 0.0) {
                return Err(Error::ConstantColumn(names[j].clone()));
            }
            let one_minus = rss / tss;
            if one_minus <= COLLINEARITY_TOL {
                return Err(Error::PerfectCollinearity(names[j].clone()));
            }
            Ok(VifEntry {
                name: names[j].clone(),
                r2_aux: 1.0 - one_minus,
                vif: 1.0 / one_minus,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(VifReport { entries })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Correlation {
    pub r: f64,
    pub t: f64,
    pub p: f64,
}

/// Pearson correlation with its t statistic on `N − 2` df.
///
/// `|r| = 1` (to 1e-12) has no finite t and is reported as
/// [`Error::PerfectCorrelation`] carrying `r`.
pub fn pearson(a: &[f64], b: &[f64]) -> Result<Correlation> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch(format!(
            "vectors of length {} and {}",
            a.len(),
            b.len()
        )));
    }
    let n = a.len();
    if n < 3 {
        return Err(Error::TooFewRows { needed: 3, found: n });
    }
    let ma = a.iter().sum::<f64>() / n as f64;
    let mb = b.iter().sum::<f64>() / n as f64;
    let (mut sab, mut saa, mut sbb) = (0.0, 0.0, 0.0);
    for (x, y) in a.iter().zip(b) {
        let (da, db) = (x - ma, y - mb);
        sab += da * db;
        saa += da * da;
        sbb += db * db;
    }
    if saa == 0.0 || sbb == 0.0 {
        return Err(Error::ConstantColumn(
            if saa == 0.0 { "first argument" } else { "second argument" }.into(),
        ));
    }
    let r = (sab / (saa.sqrt() * sbb.sqrt())).clamp(-1.0, 1.0);
    if 1.0 - r.abs() <= 1e-12 {
        return Err(Error::PerfectCorrelation(r));
    }
    let df = n - 2;
    let t = r * (df as f64 / (1.0 - r * r)).sqrt();
    Ok(Correlation {
        r,
        t,
        p: t_sf(t, df)?.value,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResidualRecord {
    pub response: String,
    pub fitted: f64,
    pub residual: f64,
}

/// Fitted/residual pairs, observation-major.
pub fn residual_diagnostics(fit: &MlmFit) -> Vec<ResidualRecord> {
    let mut out = Vec::with_capacity(fit.n() * fit.n_responses());
    for i in 0..fit.n() {
        for (k, name) in fit.response_names.iter().enumerate() {
            out.push(ResidualRecord {
                response: name.clone(),
                fitted: fit.fitted.get(i, k),
                residual: fit.residuals.get(i, k),
            });
        }
    }
    out
}
