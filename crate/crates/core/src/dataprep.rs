//! Table ingestion, variable-subset selection and z-score standardization.

use std::collections::HashSet;
use std::io::Read;

use crate::error::{Error, Result};
use crate::linalg::Matrix;

/// Numeric table with optional missing cells, as read from CSV.
#[derive(Debug, Clone, PartialEq)]
pub struct RawTable {
    names: Vec<String>,
    rows: Vec<Vec<Option<f64>>>,
}

impl RawTable {
    pub fn new(names: Vec<String>, rows: Vec<Vec<Option<f64>>>) -> Result<Self> {
        check_names(&names)?;
        if rows.is_empty() {
            return Err(Error::NoRows);
        }
        for (i, row) in rows.iter().enumerate() {
            if row.len() != names.len() {
                return Err(Error::RaggedRow {
                    row: i + 1,
                    expected: names.len(),
                    found: row.len(),
                });
            }
        }
        Ok(Self { names, rows })
    }

    /// Builds a fully observed table from columns.
    pub fn from_columns(names: Vec<String>, columns: &[Vec<f64>]) -> Result<Self> {
        if names.len() != columns.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} names for {} columns",
                names.len(),
                columns.len()
            )));
        }
        let n = columns.first().map_or(0, Vec::len);
        if columns.iter().any(|c| c.len() != n) {
            return Err(Error::DimensionMismatch("columns of unequal length".into()));
        }
        let rows = (0..n)
            .map(|i| columns.iter().map(|c| Some(c[i])).collect())
            .collect();
        Self::new(names, rows)
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn rows(&self) -> &[Vec<Option<f64>>] {
        &self.rows
    }

    pub fn n_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn n_cols(&self) -> usize {
        self.names.len()
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn column(&self, j: usize) -> Vec<Option<f64>> {
        self.rows.iter().map(|r| r[j]).collect()
    }
}

fn check_names(names: &[String]) -> Result<()> {
    let mut seen = HashSet::new();
    for (j, name) in names.iter().enumerate() {
        if name.trim().is_empty() {
            return Err(Error::EmptyHeader(j));
        }
        if !seen.insert(name.as_str()) {
            return Err(Error::DuplicateHeader(name.clone()));
        }
    }
    Ok(())
}

#[derive(Debug, Clone)]
pub struct CsvOptions {
    pub delimiter: u8,
    /// Cells equal to any of these (after trimming) are missing.
    pub missing_tokens: Vec<String>,
}

impl Default for CsvOptions {
    fn default() -> Self {
        Self {
            delimiter: b',',
            missing_tokens: vec!["NA".to_string(), String::new()],
        }
    }
}

/// Parses a headed CSV stream into a [`RawTable`].
///
/// Row numbers in errors are 1-based data-row indices (the header is not
/// counted).
pub fn load_csv<R: Read>(source: R, options: &CsvOptions) -> Result<RawTable> {
    let mut reader = csv::ReaderBuilder::new()
        .delimiter(options.delimiter)
        .has_headers(true)
        .flexible(true)
        .from_reader(source);
    let names: Vec<String> = reader
        .headers()
        .map_err(|e| Error::Csv(e.to_string()))?
        .iter()
        .map(|h| h.trim().to_string())
        .collect();
    check_names(&names)?;

    let mut rows = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let record = record.map_err(|e| Error::Csv(e.to_string()))?;
        let row_no = i + 1;
        if record.len() != names.len() {
            return Err(Error::RaggedRow {
                row: row_no,
                expected: names.len(),
                found: record.len(),
            });
        }
        let row = record
            .iter()
            .zip(&names)
            .map(|(cell, name)| parse_cell(cell, options, row_no, name))
            .collect::<Result<Vec<_>>>()?;
        rows.push(row);
    }
    RawTable::new(names, rows)
}

fn parse_cell(cell: &str, options: &CsvOptions, row: usize, column: &str) -> Result<Option<f64>> {
    let t = cell.trim();
    if options.missing_tokens.iter().any(|m| m == t) {
        return Ok(None);
    }
    match t.parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(Some(v)),
        _ => Err(Error::BadCell {
            row,
            column: column.to_string(),
            value: cell.to_string(),
        }),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Role {
    Response,
    Predictor,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ColumnSpec {
    pub name: String,
    pub role: Option<Role>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Group {
    pub name: String,
    pub columns: Vec<ColumnSpec>,
}

/// Named variable groups with optional response/predictor tags.
///
/// The text form has one statement per line:
///
/// ```text
/// # comment
/// role = response          # applies to the bindings that follow
/// health.column = yll_communicable
/// role = predictor
/// demographic.column = fertility
/// role = none              # later bindings are untagged
/// food.column = meat_kcal
/// ```
///
/// Groups appear in order of first mention; columns keep file order.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SubsetConfig {
    pub groups: Vec<Group>,
}

impl SubsetConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let mut config = SubsetConfig::default();
        let mut role = None;
        for (i, raw) in text.lines().enumerate() {
            let line_no = i + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let syntax = |message: &str| Error::SubsetSyntax {
                line: line_no,
                message: message.to_string(),
            };
            let (lhs, rhs) = line
                .split_once('=')
                .ok_or_else(|| syntax("expected '<key> = <value>'"))?;
            let (lhs, rhs) = (lhs.trim(), rhs.trim());
            if lhs == "role" {
                role = match rhs {
                    "response" => Some(Role::Response),
                    "predictor" => Some(Role::Predictor),
                    "none" => None,
                    _ => return Err(syntax("role must be response, predictor or none")),
                };
                continue;
            }
            let group = lhs
                .strip_suffix(".column")
                .ok_or_else(|| syntax("expected '<group>.column = <name>' or 'role = ...'"))?;
            if group.is_empty()
                || !group
                    .chars()
                    .all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-')
            {
                return Err(syntax("group names use letters, digits, '_' and '-'"));
            }
            if rhs.is_empty() {
                return Err(syntax("empty column name"));
            }
            config.bind(group, rhs, role).map_err(|m| syntax(&m))?;
        }
        Ok(config)
    }

    fn bind(&mut self, group: &str, column: &str, role: Option<Role>) -> std::result::Result<(), String> {
        let idx = match self.groups.iter().position(|g| g.name == group) {
            Some(i) => i,
            None => {
                self.groups.push(Group {
                    name: group.to_string(),
                    columns: Vec::new(),
                });
                self.groups.len() - 1
            }
        };
        let g = &mut self.groups[idx];
        if g.columns.iter().any(|c| c.name == column) {
            return Err(format!("column '{column}' listed twice in group '{group}'"));
        }
        g.columns.push(ColumnSpec {
            name: column.to_string(),
            role,
        });
        Ok(())
    }

    pub fn group(&self, name: &str) -> Result<&Group> {
        self.groups
            .iter()
            .find(|g| g.name == name)
            .ok_or_else(|| Error::UnknownGroup(name.to_string()))
    }

    /// Column names tagged with `role`, in group then column order.
    pub fn tagged(&self, role: Role) -> Vec<String> {
        self.groups
            .iter()
            .flat_map(|g| g.columns.iter())
            .filter(|c| c.role == Some(role))
            .map(|c| c.name.clone())
            .collect()
    }
}

/// Columns of `group`, in config order.
pub fn select_variables(table: &RawTable, config: &SubsetConfig, group: &str) -> Result<RawTable> {
    let g = config.group(group)?;
    let names: Vec<String> = g.columns.iter().map(|c| c.name.clone()).collect();
    select_columns(table, &names)
}

/// Columns by name, in the given order. Lists every unknown name on failure.
pub fn select_columns(table: &RawTable, names: &[String]) -> Result<RawTable> {
    let idx: Vec<Option<usize>> = names.iter().map(|n| table.column_index(n)).collect();
    let missing: Vec<String> = names
        .iter()
        .zip(&idx)
        .filter(|(_, i)| i.is_none())
        .map(|(n, _)| n.clone())
        .collect();
    if !missing.is_empty() {
        return Err(Error::UnknownColumns(missing));
    }
    let idx: Vec<usize> = idx.into_iter().flatten().collect();
    let rows = table
        .rows
        .iter()
        .map(|r| idx.iter().map(|&j| r[j]).collect())
        .collect();
    RawTable::new(names.to_vec(), rows)
}

/// Column-wise z-scores with the centering and scaling that produced them.
#[derive(Debug, Clone, PartialEq)]
pub struct StandardizedMatrix {
    pub matrix: Matrix,
    pub means: Vec<f64>,
    /// Sample standard deviations (divisor N − 1).
    pub sds: Vec<f64>,
    pub names: Vec<String>,
}

impl StandardizedMatrix {
    /// Standardized columns by name, in the given order.
    pub fn columns(&self, names: &[String]) -> Result<Matrix> {
        let idx = self.indices(names)?;
        self.matrix.select_columns(&idx)
    }

    pub fn indices(&self, names: &[String]) -> Result<Vec<usize>> {
        let mut missing = Vec::new();
        let mut idx = Vec::new();
        for n in names {
            match self.names.iter().position(|m| m == n) {
                Some(j) => idx.push(j),
                None => missing.push(n.clone()),
            }
        }
        if missing.is_empty() {
            Ok(idx)
        } else {
            Err(Error::UnknownColumns(missing))
        }
    }

    /// Undoes the z-scoring.
    pub fn destandardize(&self) -> Matrix {
        Matrix::from_fn(self.matrix.rows(), self.matrix.cols(), |i, j| {
            self.matrix.get(i, j) * self.sds[j] + self.means[j]
        })
    }
}

/// Mean and sample standard deviation (divisor N − 1).
pub fn mean_sd(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let ss: f64 = values.iter().map(|v| (v - mean) * (v - mean)).sum();
    (mean, (ss / (n - 1.0)).sqrt())
}

/// Centers and scales every column to mean 0 and sample SD 1.
pub fn standardize(table: &RawTable) -> Result<StandardizedMatrix> {
    let n = table.n_rows();
    if n < 2 {
        return Err(Error::TooFewRows { needed: 2, found: n });
    }
    let mut columns = Vec::with_capacity(table.n_cols());
    let mut means = Vec::with_capacity(table.n_cols());
    let mut sds = Vec::with_capacity(table.n_cols());
    for (j, name) in table.names.iter().enumerate() {
        let col = table
            .rows
            .iter()
            .enumerate()
            .map(|(i, r)| {
                r[j].ok_or_else(|| Error::MissingValue {
                    row: i + 1,
                    column: name.clone(),
                })
            })
            .collect::<Result<Vec<f64>>>()?;
        if col.iter().all(|&v| v == col[0]) {
            return Err(Error::ConstantColumn(name.clone()));
        }
        let (mean, sd) = mean_sd(&col);
        if !(sd > 0.0) {
            return Err(Error::ConstantColumn(name.clone()));
        }
        columns.push(col.iter().map(|v| (v - mean) / sd).collect::<Vec<_>>());
        means.push(mean);
        sds.push(sd);
    }
    Ok(StandardizedMatrix {
        matrix: Matrix::from_columns(&columns)?,
        means,
        sds,
        names: table.names.clone(),
    })
}
