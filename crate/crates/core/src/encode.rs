//! Feature encodings shared by the algorithms.
//!
//! [`FeatureEncoder`] maps feature cells to dense vectors for the
//! distance-based and gradient-based methods. Numeric features are min-max
//! scaled to `[0, 1]` on the fitting data. A categorical feature becomes a
//! one-hot block scaled by `1/sqrt(2)`, so two different categories sit at
//! squared distance 1 and the Euclidean distance equals the overlap
//! distance. Each block carries an extra slot for categories unseen at fit
//! time.
//!
//! [`Discretizer`] maps features to small integer levels for the Bayes
//! classifiers: equal-width bins for numeric features, category indices for
//! categorical ones.

use serde::{Deserialize, Serialize};

use crate::dataset::{Cell, ColumnKind, Dataset, Record};
use crate::{Error, Result};

const ONE_HOT: f64 = std::f64::consts::FRAC_1_SQRT_2;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
enum Encoding {
    Numeric { min: f64, max: f64 },
    Categorical { categories: Vec<String> },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FeatureEncoder {
    columns: Vec<(usize, Encoding)>,
    width: usize,
}

impl FeatureEncoder {
    pub fn fit(d: &Dataset) -> FeatureEncoder {
        let schema = d.schema();
        let mut width = 0;
        let columns = schema
            .feature_indices()
            .into_iter()
            .map(|c| {
                let enc = match schema.columns()[c].kind {
                    ColumnKind::Numeric => {
                        let (min, max) = d
                            .rows()
                            .iter()
                            .filter_map(|r| r.cells[c].as_f64())
                            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
                                (lo.min(v), hi.max(v))
                            });
                        width += 1;
                        if min.is_finite() {
                            Encoding::Numeric { min, max }
                        } else {
                            Encoding::Numeric { min: 0.0, max: 0.0 }
                        }
                    }
                    ColumnKind::Categorical => {
                        let mut categories: Vec<String> = Vec::new();
                        for r in d.rows() {
                            if let Some(s) = r.cells[c].as_str() {
                                if !categories.iter().any(|k| k == s) {
                                    categories.push(s.to_string());
                                }
                            }
                        }
                        width += categories.len() + 1;
                        Encoding::Categorical { categories }
                    }
                };
                (c, enc)
            })
            .collect();
        FeatureEncoder { columns, width }
    }

    /// Length of the encoded vectors.
    pub fn width(&self) -> usize {
        self.width
    }

    pub fn encode(&self, r: &Record) -> Result<Vec<f64>> {
        let mut out = Vec::with_capacity(self.width);
        for (c, enc) in &self.columns {
            match (enc, &r.cells[*c]) {
                (_, Cell::Missing) => {
                    return Err(Error::Schema(format!(
                        "column {c} is missing at encode time; impute first"
                    )))
                }
                (Encoding::Numeric { min, max }, Cell::Numeric(v)) => {
                    let span = max - min;
                    out.push(if span > 0.0 { (v - min) / span } else { 0.0 });
                }
                (Encoding::Categorical { categories }, Cell::Categorical(s)) => {
                    let hit = categories.iter().position(|k| k == s).unwrap_or(categories.len());
                    out.extend((0..=categories.len()).map(|i| if i == hit { ONE_HOT } else { 0.0 }));
                }
                (_, other) => {
                    return Err(Error::Schema(format!("cell {other:?} does not fit column {c}")))
                }
            }
        }
        Ok(out)
    }

    pub fn encode_all(&self, d: &Dataset) -> Result<Vec<Vec<f64>>> {
        d.rows().iter().map(|r| self.encode(r)).collect()
    }
}

pub fn squared_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

pub fn distance(a: &[f64], b: &[f64]) -> f64 {
    squared_distance(a, b).sqrt()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
enum Levels {
    Binned { min: f64, width: f64, bins: usize },
    Categories(Vec<String>),
}

/// Maps feature cells to discrete levels.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Discretizer {
    columns: Vec<(usize, Levels)>,
}

impl Discretizer {
    /// With `bins = None` a numeric feature is a type error.
    pub fn fit(d: &Dataset, bins: Option<usize>) -> Result<Discretizer> {
        let schema = d.schema();
        let mut columns = Vec::new();
        for c in schema.feature_indices() {
            let col = &schema.columns()[c];
            let levels = match (col.kind, bins) {
                (ColumnKind::Numeric, None) => {
                    return Err(Error::FeatureType(format!(
                        "feature `{}` is numeric; discretize it first",
                        col.name
                    )))
                }
                (ColumnKind::Numeric, Some(0)) => {
                    return Err(Error::Parameter("bin count must be positive".into()))
                }
                (ColumnKind::Numeric, Some(bins)) => {
                    let (min, max) = d
                        .rows()
                        .iter()
                        .filter_map(|r| r.cells[c].as_f64())
                        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
                            (lo.min(v), hi.max(v))
                        });
                    if min.is_finite() && max > min {
                        Levels::Binned {
                            min,
                            width: (max - min) / bins as f64,
                            bins,
                        }
                    } else {
                        Levels::Binned {
                            min: 0.0,
                            width: 0.0,
                            bins: 1,
                        }
                    }
                }
                (ColumnKind::Categorical, _) => {
                    let mut cats: Vec<String> = Vec::new();
                    for r in d.rows() {
                        if let Some(s) = r.cells[c].as_str() {
                            if !cats.iter().any(|k| k == s) {
                                cats.push(s.to_string());
                            }
                        }
                    }
                    Levels::Categories(cats)
                }
            };
            columns.push((c, levels));
        }
        Ok(Discretizer { columns })
    }

    pub fn n_features(&self) -> usize {
        self.columns.len()
    }

    /// Number of levels of feature `j`; categorical features get one extra
    /// level for values unseen at fit time.
    pub fn levels(&self, j: usize) -> usize {
        match &self.columns[j].1 {
            Levels::Binned { bins, .. } => *bins,
            Levels::Categories(c) => c.len() + 1,
        }
    }

    pub fn transform(&self, r: &Record) -> Result<Vec<usize>> {
        self.columns
            .iter()
            .map(|(c, lv)| match (lv, &r.cells[*c]) {
                (_, Cell::Missing) => Err(Error::Schema(format!(
                    "column {c} is missing at discretize time; impute first"
                ))),
                (Levels::Binned { min, width, bins }, Cell::Numeric(v)) => {
                    if *width == 0.0 {
                        Ok(0)
                    } else {
                        let b = ((v - min) / width).floor();
                        Ok((b.max(0.0) as usize).min(bins - 1))
                    }
                }
                (Levels::Categories(cats), Cell::Categorical(s)) => {
                    Ok(cats.iter().position(|k| k == s).unwrap_or(cats.len()))
                }
                (_, other) => Err(Error::Schema(format!("cell {other:?} does not fit column {c}"))),
            })
            .collect()
    }
}
