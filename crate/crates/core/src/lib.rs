//! Dirty-data impact benchmarking.
//!
//! The crate injects missing, inconsistent and conflicting values into
//! tabular datasets, runs sixteen classical classification, clustering and
//! regression algorithms over the corrupted copies, and summarises how much
//! each algorithm degrades through two robustness metrics: *sensibility*
//! (total variation of a measure across an error-rate grid) and the
//! *keeping point* (the last error rate before the measure drops by more
//! than a tolerance).
//!
//! Module map:
//!
//! * [`dataset`] typed tables, schema inference, functional-dependency rules
//!   and error-rate detection.
//! * [`corruption`] seeded error injection and mean/mode imputation.
//! * [`classify`], [`cluster`], [`regress`] the algorithms.
//! * [`evaluate`] accuracy measures, cluster matching and k-fold evaluation.
//! * [`robustness`] sensibility, keeping point, rate sweeps and the
//!   algorithm-selection guideline engine.

pub mod classify;
pub mod cluster;
pub mod corruption;
pub mod dataset;
pub mod encode;
mod error;
pub mod evaluate;
pub mod regress;
pub mod robustness;
pub mod seed;
pub mod synthetic;

pub use error::{Error, Result};

#[cfg(test)]
pub(crate) mod testutil {
    use crate::dataset::{Cell, Column, ColumnKind, ColumnRole, Dataset, Record, Schema};

    fn feature_columns(width: usize) -> Vec<Column> {
        (0..width)
            .map(|j| Column::new(format!("x{j}"), ColumnKind::Numeric, ColumnRole::Feature))
            .collect()
    }

    /// Numeric features with a categorical target.
    pub fn labelled(xs: &[Vec<f64>], labels: &[&str]) -> Dataset {
        let mut cols = feature_columns(xs[0].len());
        cols.push(Column::new("y", ColumnKind::Categorical, ColumnRole::Target));
        let rows = xs
            .iter()
            .zip(labels)
            .map(|(x, l)| {
                let mut cells: Vec<Cell> = x.iter().map(|&v| Cell::Numeric(v)).collect();
                cells.push(Cell::Categorical(l.to_string()));
                Record::new(cells)
            })
            .collect();
        Dataset::new(Schema::new(cols).unwrap(), rows).unwrap()
    }

    /// Numeric features with a numeric target.
    pub fn numeric(xs: &[Vec<f64>], ys: &[f64]) -> Dataset {
        let mut cols = feature_columns(xs[0].len());
        cols.push(Column::new("y", ColumnKind::Numeric, ColumnRole::Target));
        let rows = xs
            .iter()
            .zip(ys)
            .map(|(x, &y)| {
                let mut cells: Vec<Cell> = x.iter().map(|&v| Cell::Numeric(v)).collect();
                cells.push(Cell::Numeric(y));
                Record::new(cells)
            })
            .collect();
        Dataset::new(Schema::new(cols).unwrap(), rows).unwrap()
    }
}
