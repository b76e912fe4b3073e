//! k-nearest-neighbour voting on encoded feature vectors.
//!
//! Distances are Euclidean on [`FeatureEncoder`] output. Equal distances are
//! ordered by training-row index and vote ties go to the lowest class index,
//! so predictions are fully deterministic.

use serde::{Deserialize, Serialize};

use super::{majority, require_classes};
use crate::dataset::{Dataset, Record};
use crate::encode::{squared_distance, FeatureEncoder};
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct KnnParams {
    pub k: usize,
}

impl Default for KnnParams {
    fn default() -> Self {
        KnnParams { k: 5 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KnnModel {
    encoder: FeatureEncoder,
    points: Vec<Vec<f64>>,
    labels: Vec<usize>,
    n_classes: usize,
    k: usize,
}

impl KnnModel {
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn predict(&self, r: &Record) -> Result<usize> {
        let q = self.encoder.encode(r)?;
        Ok(knn_vote(&self.points, &self.labels, self.n_classes, &q, self.k))
    }
}

pub fn train_knn(train: &Dataset, k: usize) -> Result<KnnModel> {
    require_classes(train)?;
    if k == 0 {
        return Err(Error::Parameter("k must be at least 1".into()));
    }
    if k > train.len() {
        return Err(Error::Parameter(format!(
            "k = {k} exceeds the {} training rows",
            train.len()
        )));
    }
    let encoder = FeatureEncoder::fit(train);
    Ok(KnnModel {
        points: encoder.encode_all(train)?,
        labels: train.labels()?,
        n_classes: train.schema().n_classes(),
        encoder,
        k,
    })
}

/// Trains on `train` and classifies one query record.
pub fn knn_classify(train: &Dataset, query: &Record, k: usize) -> Result<usize> {
    train_knn(train, k)?.predict(query)
}

/// Majority label among the `k` points nearest to `query`.
pub fn knn_vote(
    points: &[Vec<f64>],
    labels: &[usize],
    n_classes: usize,
    query: &[f64],
    k: usize,
) -> usize {
    let mut dist: Vec<(f64, usize)> = points
        .iter()
        .enumerate()
        .map(|(i, p)| (squared_distance(p, query), i))
        .collect();
    let k = k.min(dist.len());
    let order = |a: &(f64, usize), b: &(f64, usize)| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1));
    if k < dist.len() {
        dist.select_nth_unstable_by(k - 1, order);
    }
    let mut votes = vec![0; n_classes.max(1)];
    for &(_, i) in &dist[..k] {
        votes[labels[i]] += 1;
    }
    majority(&votes)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testutil::labelled;

    #[test]
    fn one_neighbour_recalls_training_points() {
        let xs = vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![0.0, 1.0], vec![1.0, 1.0]];
        let d = labelled(&xs, &["a", "b", "c", "d"]);
        let m = train_knn(&d, 1).unwrap();
        for (i, r) in d.rows().iter().enumerate() {
            assert_eq!(m.predict(r).unwrap(), i);
        }
    }

    #[test]
    fn k_bounds() {
        let d = labelled(&[vec![0.0], vec![1.0]], &["a", "b"]);
        assert!(matches!(train_knn(&d, 0), Err(Error::Parameter(_))));
        assert!(matches!(train_knn(&d, 3), Err(Error::Parameter(_))));
    }

    #[test]
    fn distance_ties_prefer_earlier_rows() {
        // query at 0 is equidistant from rows 0 and 1; k = 1 takes row 0
        let points = vec![vec![-1.0], vec![1.0]];
        assert_eq!(knn_vote(&points, &[1, 0], 2, &[0.0], 1), 1);
        // two-way vote tie goes to the lower class index
        assert_eq!(knn_vote(&points, &[1, 0], 2, &[0.0], 2), 0);
    }
}
