//! Clustering algorithms.
//!
//! All methods work on [`FeatureEncoder`] vectors, the same encoding the
//! KNN classifier uses, and expect imputed data. Each algorithm has a
//! dataset-level entry point returning a [`Clustering`] and a vector-level
//! function that exposes its internal state.

pub mod birch;
pub mod clarans;
pub mod cure;
pub mod dbscan;
pub mod kmeans;
pub mod linkage;
pub mod lvq;

use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::dataset::Dataset;
use crate::encode::{squared_distance, FeatureEncoder};
use crate::{Error, Result};

pub use birch::{birch, BirchParams};
pub use clarans::{clarans, ClaransParams};
pub use cure::{cure, CureParams};
pub use dbscan::{dbscan, default_eps, DbscanParams};
pub use kmeans::{kmeans, KMeansParams};
pub use lvq::{lvq, LvqParams};

/// Cluster index per row; `None` marks noise.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Clustering {
    assignments: Vec<Option<usize>>,
    n_clusters: usize,
}

impl Clustering {
    pub fn new(assignments: Vec<Option<usize>>, n_clusters: usize) -> Result<Self> {
        if let Some(&Some(c)) = assignments.iter().find(|a| a.is_some_and(|c| c >= n_clusters)) {
            return Err(Error::Parameter(format!(
                "cluster index {c} outside 0..{n_clusters}"
            )));
        }
        if n_clusters == 0 && assignments.iter().any(Option::is_some) {
            return Err(Error::Parameter("no clusters but rows assigned".into()));
        }
        Ok(Clustering {
            assignments,
            n_clusters,
        })
    }

    pub(crate) fn from_dense(assignments: Vec<usize>, n_clusters: usize) -> Self {
        debug_assert!(assignments.iter().all(|&c| c < n_clusters));
        Clustering {
            assignments: assignments.into_iter().map(Some).collect(),
            n_clusters,
        }
    }

    pub fn assignments(&self) -> &[Option<usize>] {
        &self.assignments
    }

    pub fn n_clusters(&self) -> usize {
        self.n_clusters
    }

    pub fn len(&self) -> usize {
        self.assignments.len()
    }

    pub fn is_empty(&self) -> bool {
        self.assignments.is_empty()
    }

    pub fn noise_count(&self) -> usize {
        self.assignments.iter().filter(|a| a.is_none()).count()
    }

    /// `row,cluster` lines with a header; noise is written as `-1`.
    pub fn to_delimited(&self, delimiter: char) -> String {
        let mut out = format!("row{delimiter}cluster\n");
        for (i, a) in self.assignments.iter().enumerate() {
            let c = a.map(|c| c as i64).unwrap_or(-1);
            let _ = writeln!(out, "{i}{delimiter}{c}");
        }
        out
    }

    pub fn save(&self, path: impl AsRef<Path>, delimiter: char) -> Result<()> {
        let path = path.as_ref();
        std::fs::write(path, self.to_delimited(delimiter)).map_err(|e| Error::io(path, e))
    }
}

pub(crate) fn encode(d: &Dataset) -> Result<Vec<Vec<f64>>> {
    if d.is_empty() {
        return Err(Error::EmptyInput("clustering input has no rows".into()));
    }
    FeatureEncoder::fit(d).encode_all(d)
}

pub(crate) fn check_k(k: usize, n: usize) -> Result<()> {
    if k == 0 {
        return Err(Error::Parameter("K must be at least 1".into()));
    }
    if k > n {
        return Err(Error::Parameter(format!("K = {k} exceeds the {n} rows")));
    }
    Ok(())
}

/// Index of the nearest centre; ties go to the lowest index.
pub(crate) fn nearest(x: &[f64], centres: &[Vec<f64>]) -> (usize, f64) {
    let mut best = (0, f64::INFINITY);
    for (j, c) in centres.iter().enumerate() {
        let d = squared_distance(x, c);
        if d < best.1 {
            best = (j, d);
        }
    }
    best
}

pub(crate) fn mean(points: &[&Vec<f64>]) -> Vec<f64> {
    let w = points[0].len();
    let mut m = vec![0.0; w];
    for p in points {
        for (a, v) in m.iter_mut().zip(p.iter()) {
            *a += v;
        }
    }
    m.iter_mut().for_each(|a| *a /= points.len() as f64);
    m
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn export_marks_noise() {
        let c = Clustering::new(vec![Some(0), None, Some(1)], 2).unwrap();
        assert_eq!(c.to_delimited(','), "row,cluster\n0,0\n1,-1\n2,1\n");
        assert_eq!(c.noise_count(), 1);
        assert!(Clustering::new(vec![Some(2)], 2).is_err());
    }
}
