//! Typed tabular datasets.
//!
//! A [`Dataset`] pairs a [`Schema`] with its rows and keeps an immutable
//! copy of the rows as they were loaded (the *clean shadow*). Corruption
//! never touches the shadow; it produces new datasets whose rows carry an
//! `origin` index back into the shadow so ground truth stays recoverable
//! even after rows are duplicated.

mod io;
mod rules;

use std::collections::HashMap;
use std::fmt;
use std::path::PathBuf;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::{Error, Result};

pub use io::{load_dataset, save_dataset, LoadOptions};
pub use rules::{detect_error_rates, parse_fd_rules, BoundRule, ErrorRates, FdRule};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum Cell {
    Numeric(f64),
    Categorical(String),
    Missing,
}

impl Cell {
    pub fn is_missing(&self) -> bool {
        matches!(self, Cell::Missing)
    }

    pub fn as_f64(&self) -> Option<f64> {
        match self {
            Cell::Numeric(v) => Some(*v),
            _ => None,
        }
    }

    pub fn as_str(&self) -> Option<&str> {
        match self {
            Cell::Categorical(s) => Some(s),
            _ => None,
        }
    }

    /// Hashable identity of the cell value; `None` for missing cells.
    pub fn key(&self) -> Option<CellKey> {
        match self {
            Cell::Numeric(v) => {
                let v = if *v == 0.0 { 0.0 } else { *v };
                Some(CellKey::Num(v.to_bits()))
            }
            Cell::Categorical(s) => Some(CellKey::Cat(s.clone())),
            Cell::Missing => None,
        }
    }
}

impl fmt::Display for Cell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Cell::Numeric(v) => write!(f, "{v}"),
            Cell::Categorical(s) => f.write_str(s),
            Cell::Missing => Ok(()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CellKey {
    Num(u64),
    Cat(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ColumnKind {
    Numeric,
    Categorical,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ColumnRole {
    Feature,
    Target,
    EntityKey,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Column {
    pub name: String,
    pub kind: ColumnKind,
    pub role: ColumnRole,
}

impl Column {
    pub fn new(name: impl Into<String>, kind: ColumnKind, role: ColumnRole) -> Self {
        Column {
            name: name.into(),
            kind,
            role,
        }
    }
}

/// Column layout plus the class vocabulary of a categorical target.
///
/// `classes` lists target labels in first-seen order; label indices used
/// throughout the crate index into it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Schema {
    columns: Vec<Column>,
    classes: Vec<String>,
}

impl Schema {
    pub fn new(columns: Vec<Column>) -> Result<Self> {
        let schema = Schema {
            columns,
            classes: Vec::new(),
        };
        schema.validate()?;
        Ok(schema)
    }

    pub fn with_classes(mut self, classes: Vec<String>) -> Result<Self> {
        if self.target_column().kind != ColumnKind::Categorical && !classes.is_empty() {
            return Err(Error::Schema(
                "class labels given for a numeric target".into(),
            ));
        }
        self.classes = classes;
        Ok(self)
    }

    fn validate(&self) -> Result<()> {
        let mut seen = HashMap::new();
        for (i, c) in self.columns.iter().enumerate() {
            if c.name.is_empty() {
                return Err(Error::Schema(format!("column {i} has an empty name")));
            }
            if seen.insert(c.name.as_str(), i).is_some() {
                return Err(Error::Schema(format!("duplicate column name `{}`", c.name)));
            }
        }
        let targets = self
            .columns
            .iter()
            .filter(|c| c.role == ColumnRole::Target)
            .count();
        if targets != 1 {
            return Err(Error::Schema(format!(
                "expected exactly one target column, found {targets}"
            )));
        }
        if self.n_features() == 0 {
            return Err(Error::Schema("no feature columns".into()));
        }
        Ok(())
    }

    pub fn columns(&self) -> &[Column] {
        &self.columns
    }

    pub fn arity(&self) -> usize {
        self.columns.len()
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c.name == name)
    }

    pub fn require(&self, name: &str) -> Result<usize> {
        self.index_of(name)
            .ok_or_else(|| Error::Binding(format!("unknown column `{name}`")))
    }

    pub fn target_index(&self) -> usize {
        self.columns
            .iter()
            .position(|c| c.role == ColumnRole::Target)
            .expect("validated schema has a target")
    }

    pub fn target_column(&self) -> &Column {
        &self.columns[self.target_index()]
    }

    pub fn feature_indices(&self) -> Vec<usize> {
        self.columns
            .iter()
            .enumerate()
            .filter(|(_, c)| c.role == ColumnRole::Feature)
            .map(|(i, _)| i)
            .collect()
    }

    /// Number of feature columns.
    pub fn n_features(&self) -> usize {
        self.columns
            .iter()
            .filter(|c| c.role == ColumnRole::Feature)
            .count()
    }

    /// Number of distinct target labels (zero for a numeric target).
    pub fn n_classes(&self) -> usize {
        self.classes.len()
    }

    pub fn classes(&self) -> &[String] {
        &self.classes
    }

    pub fn class_index(&self, label: &str) -> Option<usize> {
        self.classes.iter().position(|c| c == label)
    }

    pub fn has_categorical_target(&self) -> bool {
        self.target_column().kind == ColumnKind::Categorical
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Record {
    pub cells: Vec<Cell>,
}

impl Record {
    pub fn new(cells: Vec<Cell>) -> Self {
        Record { cells }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Provenance {
    pub source: Option<PathBuf>,
    pub content_hash: String,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Dataset {
    schema: Arc<Schema>,
    rows: Vec<Record>,
    clean_shadow: Arc<Vec<Record>>,
    origin: Vec<usize>,
    provenance: Provenance,
}

impl Dataset {
    /// Builds a dataset from in-memory rows. The rows become the clean
    /// shadow. Class labels are derived from the data in first-seen order
    /// when the schema does not list them.
    pub fn new(schema: Schema, rows: Vec<Record>) -> Result<Self> {
        Self::with_source(schema, rows, None)
    }

    pub(crate) fn with_source(
        mut schema: Schema,
        rows: Vec<Record>,
        source: Option<PathBuf>,
    ) -> Result<Self> {
        for (i, r) in rows.iter().enumerate() {
            check_record(&schema, r).map_err(|e| match e {
                Error::Schema(m) => Error::Schema(format!("row {i}: {m}")),
                other => other,
            })?;
        }
        if schema.has_categorical_target() {
            let t = schema.target_index();
            let mut classes = schema.classes.clone();
            for r in &rows {
                if let Cell::Categorical(s) = &r.cells[t] {
                    if !classes.contains(s) {
                        classes.push(s.clone());
                    }
                }
            }
            schema.classes = classes;
        }
        let origin = (0..rows.len()).collect();
        let mut d = Dataset {
            schema: Arc::new(schema),
            clean_shadow: Arc::new(rows.clone()),
            rows,
            origin,
            provenance: Provenance {
                source,
                content_hash: String::new(),
            },
        };
        d.provenance.content_hash = d.content_hash();
        Ok(d)
    }

    /// A dataset with new rows that shares this one's schema, shadow and
    /// provenance. `origin[i]` names the shadow row that row `i` derives
    /// from.
    pub fn derive(&self, rows: Vec<Record>, origin: Vec<usize>) -> Result<Self> {
        if rows.len() != origin.len() {
            return Err(Error::Schema("rows and origin differ in length".into()));
        }
        for r in &rows {
            check_record(&self.schema, r)?;
        }
        if let Some(&o) = origin.iter().find(|&&o| o >= self.clean_shadow.len()) {
            return Err(Error::Schema(format!("origin {o} outside the clean shadow")));
        }
        Ok(Dataset {
            schema: Arc::clone(&self.schema),
            rows,
            clean_shadow: Arc::clone(&self.clean_shadow),
            origin,
            provenance: self.provenance.clone(),
        })
    }

    /// Rows at `indices`, in that order.
    pub fn select(&self, indices: &[usize]) -> Dataset {
        Dataset {
            schema: Arc::clone(&self.schema),
            rows: indices.iter().map(|&i| self.rows[i].clone()).collect(),
            clean_shadow: Arc::clone(&self.clean_shadow),
            origin: indices.iter().map(|&i| self.origin[i]).collect(),
            provenance: self.provenance.clone(),
        }
    }

    pub fn schema(&self) -> &Schema {
        &self.schema
    }

    pub fn rows(&self) -> &[Record] {
        &self.rows
    }

    pub fn clean_shadow(&self) -> &[Record] {
        &self.clean_shadow
    }

    pub fn origin(&self) -> &[usize] {
        &self.origin
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn cell(&self, row: usize, col: usize) -> &Cell {
        &self.rows[row].cells[col]
    }

    /// Class index of the (possibly corrupted) target of `row`.
    pub fn label(&self, row: usize) -> Result<usize> {
        label_of(&self.schema, &self.rows[row])
    }

    /// Class index of `row`'s target in the clean shadow.
    pub fn clean_label(&self, row: usize) -> Result<usize> {
        label_of(&self.schema, &self.clean_shadow[self.origin[row]])
    }

    pub fn labels(&self) -> Result<Vec<usize>> {
        (0..self.len()).map(|i| self.label(i)).collect()
    }

    pub fn clean_labels(&self) -> Result<Vec<usize>> {
        (0..self.len()).map(|i| self.clean_label(i)).collect()
    }

    pub fn target_value(&self, row: usize) -> Result<f64> {
        numeric_target(&self.schema, &self.rows[row])
    }

    pub fn clean_target_value(&self, row: usize) -> Result<f64> {
        numeric_target(&self.schema, &self.clean_shadow[self.origin[row]])
    }

    /// Distinct non-missing values of `col` in the clean shadow, first-seen
    /// order.
    pub fn clean_domain(&self, col: usize) -> Vec<Cell> {
        let mut seen = std::collections::HashSet::new();
        let mut out = Vec::new();
        for r in self.clean_shadow.iter() {
            if let Some(k) = r.cells[col].key() {
                if seen.insert(k) {
                    out.push(r.cells[col].clone());
                }
            }
        }
        out
    }

    pub fn missing_cells(&self) -> usize {
        self.rows
            .iter()
            .flat_map(|r| r.cells.iter())
            .filter(|c| c.is_missing())
            .count()
    }

    /// Canonical delimited text: header row, `,` delimiter, trimmed tokens,
    /// shortest round-trip numbers, empty fields for missing cells.
    pub fn canonical_text(&self) -> String {
        io::to_delimited(self, b',')
    }

    /// SHA-256 of [`Dataset::canonical_text`] as lowercase hex.
    pub fn content_hash(&self) -> String {
        hex::encode(Sha256::digest(self.canonical_text().as_bytes()))
    }
}

fn check_record(schema: &Schema, r: &Record) -> Result<()> {
    if r.cells.len() != schema.arity() {
        return Err(Error::Schema(format!(
            "record has {} cells, schema has {} columns",
            r.cells.len(),
            schema.arity()
        )));
    }
    for (c, col) in r.cells.iter().zip(schema.columns()) {
        match (c, col.kind) {
            (Cell::Missing, _) => {}
            (Cell::Numeric(v), ColumnKind::Numeric) if v.is_finite() => {}
            (Cell::Categorical(s), ColumnKind::Categorical) if !s.is_empty() => {}
            _ => {
                return Err(Error::Schema(format!(
                    "cell {c:?} does not fit column `{}`",
                    col.name
                )))
            }
        }
    }
    Ok(())
}

fn label_of(schema: &Schema, r: &Record) -> Result<usize> {
    let t = schema.target_index();
    match &r.cells[t] {
        Cell::Categorical(s) => schema
            .class_index(s)
            .ok_or_else(|| Error::Schema(format!("unknown class label `{s}`"))),
        Cell::Missing => Err(Error::Schema("target label is missing".into())),
        Cell::Numeric(_) => Err(Error::Unsupported(
            "class labels requested from a numeric target".into(),
        )),
    }
}

fn numeric_target(schema: &Schema, r: &Record) -> Result<f64> {
    match &r.cells[schema.target_index()] {
        Cell::Numeric(v) => Ok(*v),
        Cell::Missing => Err(Error::Schema("target value is missing".into())),
        Cell::Categorical(_) => Err(Error::Unsupported(
            "numeric target requested from a categorical column".into(),
        )),
    }
}
