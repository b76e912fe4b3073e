//! Naive Bayes over discretized features with additive smoothing.

use serde::{Deserialize, Serialize};

use super::{argmax, require_classes};
use crate::dataset::{Dataset, Record};
use crate::encode::Discretizer;
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NaiveBayesParams {
    /// Laplace pseudo-count added to every cell of every table.
    pub smoothing: f64,
    /// Equal-width bins for numeric features.
    pub bins: Option<usize>,
}

impl Default for NaiveBayesParams {
    fn default() -> Self {
        NaiveBayesParams {
            smoothing: 1.0,
            bins: Some(10),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NaiveBayes {
    discretizer: Discretizer,
    log_prior: Vec<f64>,
    /// `[feature][class][level]`
    log_cond: Vec<Vec<Vec<f64>>>,
}

impl NaiveBayes {
    /// `P(class | record)`, normalised.
    pub fn posterior(&self, r: &Record) -> Result<Vec<f64>> {
        let levels = self.discretizer.transform(r)?;
        let mut log_p = self.log_prior.clone();
        for (c, lp) in log_p.iter_mut().enumerate() {
            for (j, &v) in levels.iter().enumerate() {
                *lp += self.log_cond[j][c][v];
            }
        }
        let max = log_p.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let mut p: Vec<f64> = log_p.iter().map(|l| (l - max).exp()).collect();
        let z: f64 = p.iter().sum();
        p.iter_mut().for_each(|x| *x /= z);
        Ok(p)
    }

    /// `P(level | class)` table of feature `j`, one row per class.
    pub fn conditional(&self, j: usize) -> Vec<Vec<f64>> {
        self.log_cond[j]
            .iter()
            .map(|row| row.iter().map(|l| l.exp()).collect())
            .collect()
    }

    pub fn prior(&self) -> Vec<f64> {
        self.log_prior.iter().map(|l| l.exp()).collect()
    }

    pub fn predict(&self, r: &Record) -> Result<usize> {
        Ok(argmax(&self.posterior(r)?))
    }
}

pub fn train_naive_bayes(train: &Dataset, params: &NaiveBayesParams) -> Result<NaiveBayes> {
    require_classes(train)?;
    if !(params.smoothing > 0.0) {
        return Err(Error::Parameter("smoothing must be positive".into()));
    }
    let alpha = params.smoothing;
    let discretizer = Discretizer::fit(train, params.bins)?;
    let nc = train.schema().n_classes();
    let labels = train.labels()?;
    let levels: Vec<Vec<usize>> = train
        .rows()
        .iter()
        .map(|r| discretizer.transform(r))
        .collect::<Result<_>>()?;

    let mut class_n = vec![0usize; nc];
    for &y in &labels {
        class_n[y] += 1;
    }
    let n = labels.len() as f64;
    let log_prior = class_n
        .iter()
        .map(|&c| ((c as f64 + alpha) / (n + alpha * nc as f64)).ln())
        .collect();

    let mut log_cond = Vec::with_capacity(discretizer.n_features());
    for j in 0..discretizer.n_features() {
        let lj = discretizer.levels(j);
        let mut counts = vec![vec![0usize; lj]; nc];
        for (lv, &y) in levels.iter().zip(&labels) {
            counts[y][lv[j]] += 1;
        }
        log_cond.push(
            counts
                .iter()
                .zip(&class_n)
                .map(|(row, &cn)| {
                    row.iter()
                        .map(|&c| ((c as f64 + alpha) / (cn as f64 + alpha * lj as f64)).ln())
                        .collect()
                })
                .collect(),
        );
    }
    Ok(NaiveBayes {
        discretizer,
        log_prior,
        log_cond,
    })
}

pub fn nb_classify(model: &NaiveBayes, query: &Record) -> Result<usize> {
    model.predict(query)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::{Cell, Column, ColumnKind, ColumnRole, Schema};
    use crate::testutil::labelled;

    #[test]
    fn tables_sum_to_one() {
        let xs: Vec<Vec<f64>> = (0..30).map(|i| vec![i as f64, (i % 7) as f64]).collect();
        let ys: Vec<&str> = (0..30).map(|i| ["a", "b", "c"][i % 3]).collect();
        let m = train_naive_bayes(&labelled(&xs, &ys), &NaiveBayesParams::default()).unwrap();
        assert!((m.prior().iter().sum::<f64>() - 1.0).abs() < 1e-9);
        for j in 0..2 {
            for row in m.conditional(j) {
                assert!((row.iter().sum::<f64>() - 1.0).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn matches_hand_computed_posterior() {
        let schema = Schema::new(vec![
            Column::new("w", ColumnKind::Categorical, ColumnRole::Feature),
            Column::new("y", ColumnKind::Categorical, ColumnRole::Target),
        ])
        .unwrap();
        let rows = [("sun", "no"), ("sun", "no"), ("rain", "yes"), ("sun", "yes")]
            .iter()
            .map(|(w, y)| {
                Record::new(vec![Cell::Categorical(w.to_string()), Cell::Categorical(y.to_string())])
            })
            .collect();
        let d = Dataset::new(schema, rows).unwrap();
        let m = train_naive_bayes(&d, &NaiveBayesParams::default()).unwrap();
        // levels: sun, rain, unseen
        // P(no) = 3/6, P(yes) = 3/6
        // P(sun|no) = 3/5, P(sun|yes) = 2/5
        let p = m.posterior(&d.rows()[0]).unwrap();
        assert!((p[0] - 0.6).abs() < 1e-12);
        assert_eq!(m.predict(&d.rows()[0]).unwrap(), 0);
        assert_eq!(m.predict(&d.rows()[2]).unwrap(), 1);
    }

    #[test]
    fn numeric_features_need_bins() {
        let d = labelled(&[vec![0.0], vec![1.0]], &["a", "b"]);
        let p = NaiveBayesParams {
            bins: None,
            ..NaiveBayesParams::default()
        };
        assert!(matches!(train_naive_bayes(&d, &p), Err(Error::FeatureType(_))));
    }
}
