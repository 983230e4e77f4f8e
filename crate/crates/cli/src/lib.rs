//! Pipeline commands behind the `mvenet` binary.
//!
//! Every command reads the raw CSV and the subset config, standardizes the
//! columns it needs and writes its outputs into the output directory.
//! Failures carry the process exit code: 2 for input problems, 3 for solver
//! or cross-validation failures, 4 for inference failures.

pub mod format;

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use mvenet::cv::{cross_validate, make_folds, CvResult, LambdaRule, DEFAULT_FOLDS};
use mvenet::dataprep::{
    load_csv, select_columns, select_variables, standardize, CsvOptions, RawTable, Role,
    StandardizedMatrix, SubsetConfig,
};
use mvenet::enet::{fit_mgaussian_path, EnetConfig, EnetPath};
use mvenet::inference::{
    fit_mlm_named, manova_table, pearson, residual_diagnostics, univariate_summary, vif_named,
    MlmFit,
};
use mvenet::{Error, ErrorClass};

use format::{aligned, full, sci6, stars, Tsv};

pub const EXIT_INPUT: i32 = 2;
pub const EXIT_SOLVER: i32 = 3;
pub const EXIT_INFERENCE: i32 = 4;

/// Settings shared by all pipeline commands.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub input: PathBuf,
    pub subsets: PathBuf,
    pub alpha: f64,
    pub nlambda: usize,
    pub lambda_min_ratio: Option<f64>,
    pub folds: usize,
    pub seed: u64,
    pub rule: LambdaRule,
    pub out: PathBuf,
    /// Explicit reduced predictor set for `mlm`.
    pub predictors: Option<Vec<String>>,
}

impl RunConfig {
    pub fn new(input: impl Into<PathBuf>, subsets: impl Into<PathBuf>, out: impl Into<PathBuf>) -> Self {
        let d = EnetConfig::default();
        Self {
            input: input.into(),
            subsets: subsets.into(),
            alpha: d.alpha,
            nlambda: d.nlambda,
            lambda_min_ratio: d.lambda_min_ratio,
            folds: DEFAULT_FOLDS,
            seed: 1,
            rule: LambdaRule::Min,
            out: out.into(),
            predictors: None,
        }
    }

    pub fn enet_config(&self) -> EnetConfig {
        EnetConfig {
            alpha: self.alpha,
            nlambda: self.nlambda,
            lambda_min_ratio: self.lambda_min_ratio,
            ..EnetConfig::default()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl std::error::Error for Failure {}

#[derive(Debug, Clone, Copy)]
enum Stage {
    Prep,
    Enet,
    Mlm,
}

impl Stage {
    fn fail(self, e: Error) -> Failure {
        let code = match (e.class(), self) {
            (ErrorClass::Input, _) | (_, Stage::Prep) => EXIT_INPUT,
            (_, Stage::Enet) => EXIT_SOLVER,
            (_, Stage::Mlm) => EXIT_INFERENCE,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

fn input_failure(message: String) -> Failure {
    Failure {
        code: EXIT_INPUT,
        message,
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| input_failure(format!("{}: {e}", path.display())))
}

fn write(out: &Path, name: &str, text: String) -> Result<(), Failure> {
    fs::create_dir_all(out).map_err(|e| input_failure(format!("{}: {e}", out.display())))?;
    let path = out.join(name);
    fs::write(&path, text).map_err(|e| input_failure(format!("{}: {e}", path.display())))
}

fn load(cfg: &RunConfig) -> Result<(RawTable, SubsetConfig), Failure> {
    let csv = read(&cfg.input)?;
    let table = load_csv(csv.as_bytes(), &CsvOptions::default())
        .map_err(|e| input_failure(format!("{}: {e}", cfg.input.display())))?;
    let subsets = SubsetConfig::parse(&read(&cfg.subsets)?)
        .map_err(|e| input_failure(format!("{}: {e}", cfg.subsets.display())))?;
    Ok((table, subsets))
}

/// Standardized responses and predictors as tagged in the subset config.
struct ModelData {
    x: StandardizedMatrix,
    y: StandardizedMatrix,
}

fn model_data(table: &RawTable, subsets: &SubsetConfig) -> Result<ModelData, Failure> {
    let responses = subsets.tagged(Role::Response);
    let predictors = subsets.tagged(Role::Predictor);
    if responses.is_empty() || predictors.is_empty() {
        return Err(input_failure(
            "subset config must tag at least one response and one predictor".into(),
        ));
    }
    let prep = |names: &[String]| {
        select_columns(table, names)
            .and_then(|t| standardize(&t))
            .map_err(|e| Stage::Prep.fail(e))
    };
    Ok(ModelData {
        y: prep(&responses)?,
        x: prep(&predictors)?,
    })
}

/// Writes `<group>.tsv` and `<group>_scaling.tsv` for every group.
pub fn cmd_prep(cfg: &RunConfig) -> Result<String, Failure> {
    let (table, subsets) = load(cfg)?;
    let mut log = String::new();
    for group in &subsets.groups {
        let s = select_variables(&table, &subsets, &group.name)
            .and_then(|t| standardize(&t))
            .map_err(|e| Stage::Prep.fail(e))?;
        let mut data = Tsv::new(&s.names);
        for i in 0..s.matrix.rows() {
            let row: Vec<String> = s.matrix.row(i).iter().map(|&v| full(v)).collect();
            data.row(&row);
        }
        write(&cfg.out, &format!("{}.tsv", group.name), data.into_string())?;
        let mut scaling = Tsv::new(&["column", "mean", "sd"]);
        for ((name, &m), &sd) in s.names.iter().zip(&s.means).zip(&s.sds) {
            scaling.row(&[name.clone(), full(m), full(sd)]);
        }
        write(&cfg.out, &format!("{}_scaling.tsv", group.name), scaling.into_string())?;
        log.push_str(&format!(
            "{}: {} rows x {} columns\n",
            group.name,
            s.matrix.rows(),
            s.matrix.cols()
        ));
    }
    Ok(log)
}

fn run_cv(cfg: &RunConfig, data: &ModelData) -> Result<CvResult, Failure> {
    let folds = make_folds(data.x.matrix.rows(), cfg.folds, cfg.seed).map_err(|e| Stage::Enet.fail(e))?;
    cross_validate(&data.x.matrix, &data.y.matrix, &cfg.enet_config(), &folds)
        .map_err(|e| Stage::Enet.fail(e))
}

fn write_cv(cfg: &RunConfig, cv: &CvResult) -> Result<String, Failure> {
    let mut t = Tsv::new(&["lambda", "mean_error", "se_error"]);
    for ((&l, &m), &s) in cv.lambdas.iter().zip(&cv.mean_error).zip(&cv.se_error) {
        t.row(&[full(l), full(m), full(s)]);
    }
    write(&cfg.out, "cv.tsv", t.into_string())?;
    Ok(format!(
        "lambda.min={}\nlambda.1se={}\n",
        full(cv.lambda_min),
        full(cv.lambda_1se)
    ))
}

/// Writes `cv.tsv` and reports both selected lambdas.
pub fn cmd_cv(cfg: &RunConfig) -> Result<String, Failure> {
    let (table, subsets) = load(cfg)?;
    let data = model_data(&table, &subsets)?;
    let cv = run_cv(cfg, &data)?;
    write_cv(cfg, &cv)
}

/// File name of the coefficient table at `lambda`.
pub fn coef_file_name(lambda: f64) -> String {
    format!("coef_{}.tsv", sci6(lambda))
}

/// Fits the path, cross-validates for the selected lambda and writes
/// `path.tsv`, `cv.tsv`, the coefficient table and `selected.tsv`.
pub fn cmd_enet(cfg: &RunConfig) -> Result<String, Failure> {
    let (table, subsets) = load(cfg)?;
    let data = model_data(&table, &subsets)?;
    let path = fit_mgaussian_path(&data.x.matrix, &data.y.matrix, &cfg.enet_config())
        .map_err(|e| Stage::Enet.fail(e))?;

    let mut t = Tsv::new(&["lambda", "dev_ratio", "nonzero"]);
    for i in 0..path.len() {
        t.row(&[
            full(path.lambdas[i]),
            full(path.dev_ratio[i]),
            path.nonzero[i].to_string(),
        ]);
    }
    write(&cfg.out, "path.tsv", t.into_string())?;

    let cv = run_cv(cfg, &data)?;
    let mut log = write_cv(cfg, &cv)?;
    let (index, lambda) = cv.select(cfg.rule);
    log.push_str(&coef_report(cfg, &data, &path, index, lambda)?);
    Ok(log)
}

fn coef_report(
    cfg: &RunConfig,
    data: &ModelData,
    path: &EnetPath,
    index: usize,
    lambda: f64,
) -> Result<String, Failure> {
    let mut header = vec!["predictor".to_string()];
    header.extend(data.y.names.iter().cloned());
    let mut rows = vec![{
        let mut r = vec!["(Intercept)".to_string()];
        r.extend(path.intercepts[index].iter().map(|&v| sci6(v)));
        r
    }];
    let mut kept = Tsv::new(&["predictor"]);
    for (j, name) in data.x.names.iter().enumerate() {
        let mut r = vec![name.clone()];
        if path.is_dropped(index, j) {
            r.extend(data.y.names.iter().map(|_| "removed".to_string()));
        } else {
            r.extend(path.coefs[index].row(j).iter().map(|&v| sci6(v)));
            kept.row(&[name.as_str()]);
        }
        rows.push(r);
    }
    let mut t = Tsv::new(&header);
    for r in &rows {
        t.row(r);
    }
    write(&cfg.out, &coef_file_name(lambda), t.into_string())?;
    write(&cfg.out, "selected.tsv", kept.into_string())?;
    Ok(format!(
        "\nelastic net coefficients at lambda = {}\n{}",
        sci6(lambda),
        aligned(&header, &rows)
    ))
}

fn reduced_predictors(cfg: &RunConfig, data: &ModelData) -> Result<Vec<String>, Failure> {
    if let Some(p) = &cfg.predictors {
        return Ok(p.clone());
    }
    let selected = cfg.out.join("selected.tsv");
    if selected.exists() {
        let names: Vec<String> = read(&selected)?
            .lines()
            .skip(1)
            .map(str::trim)
            .filter(|l| !l.is_empty())
            .map(String::from)
            .collect();
        return Ok(names);
    }
    Ok(data.x.names.clone())
}

/// Multivariate refit on the reduced predictor set with MANOVA, univariate
/// follow-ups, VIF, residuals and the response correlation.
pub fn cmd_mlm(cfg: &RunConfig) -> Result<String, Failure> {
    let (table, subsets) = load(cfg)?;
    let data = model_data(&table, &subsets)?;
    let names = reduced_predictors(cfg, &data)?;
    if names.is_empty() {
        return Err(input_failure("reduced predictor set is empty".into()));
    }
    let x = data.x.columns(&names).map_err(|e| Stage::Prep.fail(e))?;
    let fit = fit_mlm_named(&x, &data.y.matrix, names.clone(), data.y.names.clone())
        .map_err(|e| Stage::Mlm.fail(e))?;
    let mut log = String::new();
    log.push_str(&manova_report(cfg, &fit)?);
    log.push_str(&univariate_report(cfg, &fit)?);
    log.push_str(&vif_report(cfg, &x, &names)?);

    let mut r = Tsv::new(&["response", "fitted", "residual"]);
    for rec in residual_diagnostics(&fit) {
        r.row(&[rec.response, full(rec.fitted), full(rec.residual)]);
    }
    write(&cfg.out, "residuals.tsv", r.into_string())?;

    let k = fit.n_responses();
    for a in 0..k {
        for b in a + 1..k {
            let c = pearson(&fit.y.column(a), &fit.y.column(b)).map_err(|e| Stage::Mlm.fail(e))?;
            let label = if k == 2 {
                String::new()
            } else {
                format!("[{},{}]", fit.response_names[a], fit.response_names[b])
            };
            log.push_str(&format!("pearson{label} r={} p={}\n", full(c.r), full(c.p)));
        }
    }
    Ok(log)
}

fn manova_report(cfg: &RunConfig, fit: &MlmFit) -> Result<String, Failure> {
    let rows = manova_table(fit).map_err(|e| Stage::Mlm.fail(e))?;
    let header = ["term", "df", "pillai", "approx_f", "num_df", "den_df", "p", "stars"];
    let mut t = Tsv::new(&header);
    let mut display = Vec::new();
    for m in &rows {
        let cells = |f: fn(f64) -> String| {
            vec![
                m.term.clone(),
                m.df.to_string(),
                f(m.pillai),
                f(m.approx_f),
                m.num_df.to_string(),
                m.den_df.to_string(),
                f(m.p_value),
                stars(m.p_value).to_string(),
            ]
        };
        t.row(&cells(full));
        display.push(cells(sci6));
    }
    write(&cfg.out, "manova.tsv", t.into_string())?;
    let header: Vec<String> = header.iter().map(|s| s.to_string()).collect();
    Ok(format!("\nMANOVA (Pillai)\n{}", aligned(&header, &display)))
}

fn univariate_report(cfg: &RunConfig, fit: &MlmFit) -> Result<String, Failure> {
    let header = ["term", "estimate", "std_error", "t", "p", "stars"];
    let mut log = String::new();
    for k in 0..fit.n_responses() {
        let s = univariate_summary(fit, k).map_err(|e| Stage::Mlm.fail(e))?;
        let mut t = Tsv::new(&header);
        let mut display = Vec::new();
        for c in &s.coefs {
            let cells = |f: fn(f64) -> String| {
                vec![
                    c.name.clone(),
                    f(c.estimate),
                    f(c.std_error),
                    f(c.t),
                    f(c.p),
                    stars(c.p).to_string(),
                ]
            };
            t.row(&cells(full));
            display.push(cells(sci6));
        }
        t.footer(&format!(
            "F({},{})={} R2={} R2adj={}",
            s.df1,
            s.df2,
            full(s.f_stat),
            full(s.r2),
            full(s.r2_adj)
        ));
        write(&cfg.out, &format!("uni_{}.tsv", s.response), t.into_string())?;
        let header: Vec<String> = header.iter().map(|s| s.to_string()).collect();
        log.push_str(&format!(
            "\n{}\n{}F({},{}) = {:.4}, p = {}, R2 = {:.4}, adjusted R2 = {:.4}\n",
            s.response,
            aligned(&header, &display),
            s.df1,
            s.df2,
            s.f_stat,
            sci6(s.f_p),
            s.r2,
            s.r2_adj
        ));
    }
    Ok(log)
}

fn vif_report(cfg: &RunConfig, x: &mvenet::Matrix, names: &[String]) -> Result<String, Failure> {
    if names.len() < 2 {
        write(&cfg.out, "vif.tsv", Tsv::new(&["predictor", "r2_aux", "vif"]).into_string())?;
        return Ok(String::new());
    }
    let report = vif_named(x, names).map_err(|e| Stage::Mlm.fail(e))?;
    let mut t = Tsv::new(&["predictor", "r2_aux", "vif"]);
    let mut display = Vec::new();
    for e in &report.entries {
        t.row(&[e.name.clone(), full(e.r2_aux), full(e.vif)]);
        display.push(vec![e.name.clone(), format!("{:.4}", e.r2_aux), format!("{:.2}", e.vif)]);
    }
    write(&cfg.out, "vif.tsv", t.into_string())?;
    let header = vec!["predictor".to_string(), "r2_aux".into(), "vif".into()];
    Ok(format!("\nvariance inflation\n{}", aligned(&header, &display)))
}

/// `prep`, `enet` and `mlm` in sequence.
pub fn cmd_report(cfg: &RunConfig) -> Result<String, Failure> {
    let mut log = cmd_prep(cfg)?;
    log.push_str(&cmd_enet(cfg)?);
    let mut mlm_cfg = cfg.clone();
    if mlm_cfg.predictors.is_none() {
        let selected = read(&cfg.out.join("selected.tsv"))?;
        mlm_cfg.predictors = Some(selected.lines().skip(1).map(String::from).collect());
    }
    log.push_str(&cmd_mlm(&mlm_cfg)?);
    Ok(log)
}

/// Writes `demo.csv` and `demo.subsets`.
pub fn cmd_demo(out: &Path, rows: usize, seed: u64) -> Result<String, Failure> {
    let table = mvenet::synth::demo_table(rows, seed).map_err(|e| Stage::Prep.fail(e))?;
    write(out, "demo.csv", mvenet::synth::to_csv(&table))?;
    write(out, "demo.subsets", mvenet::synth::demo_subsets())?;
    Ok(format!("wrote {rows} rows to {}\n", out.join("demo.csv").display()))
}
