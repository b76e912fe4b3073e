//! Classification algorithms.
//!
//! Every trainer takes a [`Dataset`] with a categorical target and no
//! missing feature cells (impute first) and returns a model that predicts
//! class indices into the schema's class list.

pub mod bayes_net;
pub mod forest;
pub mod impurity;
pub mod knn;
pub mod logistic;
pub mod naive_bayes;
pub mod tree;

use serde::{Deserialize, Serialize};

use crate::dataset::{Cell, ColumnKind, Dataset, Record};
use crate::{Error, Result};

pub use bayes_net::{bn_classify, train_bayes_net, train_bayesian_network, BayesNet, BayesNetParams};
pub use forest::{rf_classify, train_random_forest, ForestParams, RandomForest};
pub use impurity::Criterion;
pub use knn::{knn_classify, knn_vote, train_knn, KnnModel, KnnParams};
pub use logistic::{logistic_classify, train_logistic, Logistic, LogisticParams};
pub use naive_bayes::{nb_classify, train_naive_bayes, NaiveBayes, NaiveBayesParams};
pub use tree::{train_decision_tree, DecisionTree, TreeParams};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum ClassifierModel {
    DecisionTree(DecisionTree),
    Knn(KnnModel),
    NaiveBayes(NaiveBayes),
    BayesNet(BayesNet),
    Logistic(Logistic),
    RandomForest(RandomForest),
}

impl ClassifierModel {
    pub fn predict(&self, r: &Record) -> Result<usize> {
        match self {
            ClassifierModel::DecisionTree(m) => m.predict(r),
            ClassifierModel::Knn(m) => m.predict(r),
            ClassifierModel::NaiveBayes(m) => m.predict(r),
            ClassifierModel::BayesNet(m) => m.predict(r),
            ClassifierModel::Logistic(m) => m.predict(r),
            ClassifierModel::RandomForest(m) => m.predict(r),
        }
    }

    pub fn predict_all(&self, d: &Dataset) -> Result<Vec<usize>> {
        d.rows().iter().map(|r| self.predict(r)).collect()
    }
}

/// Index of the largest count; ties go to the lowest index.
pub(crate) fn majority(counts: &[usize]) -> usize {
    let mut best = 0;
    for (i, &c) in counts.iter().enumerate() {
        if c > counts[best] {
            best = i;
        }
    }
    best
}

/// Index of the largest score; ties go to the lowest index.
pub(crate) fn argmax(scores: &[f64]) -> usize {
    let mut best = 0;
    for (i, &s) in scores.iter().enumerate() {
        if s > scores[best] {
            best = i;
        }
    }
    best
}

pub(crate) fn require_classes(d: &Dataset) -> Result<()> {
    if !d.schema().has_categorical_target() {
        return Err(Error::Unsupported(
            "classification needs a categorical target".into(),
        ));
    }
    if d.is_empty() {
        return Err(Error::EmptyInput("training set has no rows".into()));
    }
    Ok(())
}

/// Column-major copy of a training set's features and labels.
pub(crate) struct Prepared {
    pub columns: Vec<(usize, tree::Feature)>,
    pub labels: Vec<usize>,
    pub n_classes: usize,
}

impl Prepared {
    pub fn new(d: &Dataset) -> Result<Prepared> {
        require_classes(d)?;
        let schema = d.schema();
        let mut columns = Vec::new();
        for c in schema.feature_indices() {
            let missing = || {
                Error::Schema(format!(
                    "feature `{}` has missing cells; impute first",
                    schema.columns()[c].name
                ))
            };
            let feature = match schema.columns()[c].kind {
                ColumnKind::Numeric => tree::Feature::Num(
                    d.rows()
                        .iter()
                        .map(|r| r.cells[c].as_f64().ok_or_else(missing))
                        .collect::<Result<_>>()?,
                ),
                ColumnKind::Categorical => {
                    let mut names: Vec<String> = Vec::new();
                    let mut codes = Vec::with_capacity(d.len());
                    for r in d.rows() {
                        let Cell::Categorical(s) = &r.cells[c] else {
                            return Err(missing());
                        };
                        let code = match names.iter().position(|n| n == s) {
                            Some(k) => k,
                            None => {
                                names.push(s.clone());
                                names.len() - 1
                            }
                        };
                        codes.push(code as u32);
                    }
                    tree::Feature::Cat { codes, names }
                }
            };
            columns.push((c, feature));
        }
        Ok(Prepared {
            columns,
            labels: d.labels()?,
            n_classes: schema.n_classes(),
        })
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn class_counts(&self, rows: &[usize]) -> Vec<usize> {
        let mut counts = vec![0; self.n_classes];
        for &i in rows {
            counts[self.labels[i]] += 1;
        }
        counts
    }

    pub fn goes_left(&self, feature: usize, test: &tree::SplitTest, row: usize) -> bool {
        match (&self.columns[feature].1, test) {
            (tree::Feature::Num(v), tree::SplitTest::LessEq(t)) => v[row] <= *t,
            (tree::Feature::Cat { codes, names }, tree::SplitTest::Equals(s)) => {
                names[codes[row] as usize] == *s
            }
            _ => unreachable!("split test matches its feature kind"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ties_go_low() {
        assert_eq!(majority(&[2, 3, 3]), 1);
        assert_eq!(majority(&[0, 0]), 0);
        assert_eq!(argmax(&[0.5, 0.5]), 0);
    }
}
