//! The sixteen algorithms behind one identifier and one parameter enum.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::classify::{
    train_bayes_net, train_decision_tree, train_knn, train_logistic, train_naive_bayes,
    train_random_forest, BayesNetParams, ClassifierModel, ForestParams, KnnParams, LogisticParams,
    NaiveBayesParams, TreeParams,
};
use crate::cluster::{
    birch, clarans, cure, dbscan, kmeans, lvq, BirchParams, ClaransParams, Clustering, CureParams,
    DbscanParams, KMeansParams, LvqParams,
};
use crate::dataset::Dataset;
use crate::regress::{
    fit_least_squares, fit_maximum_likelihood, fit_polynomial, fit_stepwise, Fitted, MleParams,
    StepwiseParams,
};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Task {
    Classification,
    Clustering,
    Regression,
}

impl Task {
    pub fn as_str(self) -> &'static str {
        match self {
            Task::Classification => "classification",
            Task::Clustering => "clustering",
            Task::Regression => "regression",
        }
    }
}

impl fmt::Display for Task {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Task {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        [Task::Classification, Task::Clustering, Task::Regression]
            .into_iter()
            .find(|t| t.as_str() == s)
            .ok_or_else(|| Error::Config(format!("unknown task `{s}`")))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Algorithm {
    DecisionTree,
    Knn,
    NaiveBayes,
    BayesNet,
    Logistic,
    RandomForest,
    #[serde(rename = "kmeans")]
    KMeans,
    Lvq,
    Clarans,
    Dbscan,
    Birch,
    Cure,
    LeastSquares,
    MaximumLikelihood,
    Polynomial,
    Stepwise,
}

impl Algorithm {
    pub const ALL: [Algorithm; 16] = [
        Algorithm::DecisionTree,
        Algorithm::Knn,
        Algorithm::NaiveBayes,
        Algorithm::BayesNet,
        Algorithm::Logistic,
        Algorithm::RandomForest,
        Algorithm::KMeans,
        Algorithm::Lvq,
        Algorithm::Clarans,
        Algorithm::Dbscan,
        Algorithm::Birch,
        Algorithm::Cure,
        Algorithm::LeastSquares,
        Algorithm::MaximumLikelihood,
        Algorithm::Polynomial,
        Algorithm::Stepwise,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Algorithm::DecisionTree => "decision_tree",
            Algorithm::Knn => "knn",
            Algorithm::NaiveBayes => "naive_bayes",
            Algorithm::BayesNet => "bayes_net",
            Algorithm::Logistic => "logistic",
            Algorithm::RandomForest => "random_forest",
            Algorithm::KMeans => "kmeans",
            Algorithm::Lvq => "lvq",
            Algorithm::Clarans => "clarans",
            Algorithm::Dbscan => "dbscan",
            Algorithm::Birch => "birch",
            Algorithm::Cure => "cure",
            Algorithm::LeastSquares => "least_squares",
            Algorithm::MaximumLikelihood => "maximum_likelihood",
            Algorithm::Polynomial => "polynomial",
            Algorithm::Stepwise => "stepwise",
        }
    }

    /// Name used in report tables.
    pub fn title(self) -> &'static str {
        match self {
            Algorithm::DecisionTree => "Decision Tree",
            Algorithm::Knn => "KNN",
            Algorithm::NaiveBayes => "Naive Bayes",
            Algorithm::BayesNet => "Bayesian Network",
            Algorithm::Logistic => "Logistic Regression",
            Algorithm::RandomForest => "Random Forests",
            Algorithm::KMeans => "K-Means",
            Algorithm::Lvq => "LVQ",
            Algorithm::Clarans => "CLARANS",
            Algorithm::Dbscan => "DBSCAN",
            Algorithm::Birch => "BIRCH",
            Algorithm::Cure => "CURE",
            Algorithm::LeastSquares => "Least Square",
            Algorithm::MaximumLikelihood => "Maximum Likelihood",
            Algorithm::Polynomial => "Polynomial Regression",
            Algorithm::Stepwise => "Stepwise Regression",
        }
    }

    pub fn task(self) -> Task {
        use Algorithm::*;
        match self {
            DecisionTree | Knn | NaiveBayes | BayesNet | Logistic | RandomForest => Task::Classification,
            KMeans | Lvq | Clarans | Dbscan | Birch | Cure => Task::Clustering,
            LeastSquares | MaximumLikelihood | Polynomial | Stepwise => Task::Regression,
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Algorithm::ALL
            .into_iter()
            .find(|a| a.as_str() == s)
            .ok_or_else(|| Error::Config(format!("unknown algorithm `{s}`")))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LinearParams {
    /// Retry a singular system with a small ridge term instead of failing.
    pub ridge_fallback: bool,
}

impl Default for LinearParams {
    fn default() -> Self {
        LinearParams {
            ridge_fallback: true,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PolynomialParams {
    pub degree: usize,
    pub ridge_fallback: bool,
}

impl Default for PolynomialParams {
    fn default() -> Self {
        PolynomialParams {
            degree: 3,
            ridge_fallback: true,
        }
    }
}

/// An algorithm with its hyperparameters. Serialized with the algorithm
/// identifier under `name` next to the parameters.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "snake_case")]
pub enum AlgorithmSpec {
    DecisionTree(TreeParams),
    Knn(KnnParams),
    NaiveBayes(NaiveBayesParams),
    BayesNet(BayesNetParams),
    Logistic(LogisticParams),
    RandomForest(ForestParams),
    #[serde(rename = "kmeans")]
    KMeans(KMeansParams),
    Lvq(LvqParams),
    Clarans(ClaransParams),
    Dbscan(DbscanParams),
    Birch(BirchParams),
    Cure(CureParams),
    LeastSquares(LinearParams),
    MaximumLikelihood(MleParams),
    Polynomial(PolynomialParams),
    Stepwise(StepwiseParams),
}

impl AlgorithmSpec {
    pub fn default_for(a: Algorithm) -> AlgorithmSpec {
        match a {
            Algorithm::DecisionTree => AlgorithmSpec::DecisionTree(Default::default()),
            Algorithm::Knn => AlgorithmSpec::Knn(Default::default()),
            Algorithm::NaiveBayes => AlgorithmSpec::NaiveBayes(Default::default()),
            Algorithm::BayesNet => AlgorithmSpec::BayesNet(Default::default()),
            Algorithm::Logistic => AlgorithmSpec::Logistic(Default::default()),
            Algorithm::RandomForest => AlgorithmSpec::RandomForest(Default::default()),
            Algorithm::KMeans => AlgorithmSpec::KMeans(Default::default()),
            Algorithm::Lvq => AlgorithmSpec::Lvq(Default::default()),
            Algorithm::Clarans => AlgorithmSpec::Clarans(Default::default()),
            Algorithm::Dbscan => AlgorithmSpec::Dbscan(Default::default()),
            Algorithm::Birch => AlgorithmSpec::Birch(Default::default()),
            Algorithm::Cure => AlgorithmSpec::Cure(Default::default()),
            Algorithm::LeastSquares => AlgorithmSpec::LeastSquares(Default::default()),
            Algorithm::MaximumLikelihood => AlgorithmSpec::MaximumLikelihood(Default::default()),
            Algorithm::Polynomial => AlgorithmSpec::Polynomial(Default::default()),
            Algorithm::Stepwise => AlgorithmSpec::Stepwise(Default::default()),
        }
    }

    pub fn algorithm(&self) -> Algorithm {
        match self {
            AlgorithmSpec::DecisionTree(_) => Algorithm::DecisionTree,
            AlgorithmSpec::Knn(_) => Algorithm::Knn,
            AlgorithmSpec::NaiveBayes(_) => Algorithm::NaiveBayes,
            AlgorithmSpec::BayesNet(_) => Algorithm::BayesNet,
            AlgorithmSpec::Logistic(_) => Algorithm::Logistic,
            AlgorithmSpec::RandomForest(_) => Algorithm::RandomForest,
            AlgorithmSpec::KMeans(_) => Algorithm::KMeans,
            AlgorithmSpec::Lvq(_) => Algorithm::Lvq,
            AlgorithmSpec::Clarans(_) => Algorithm::Clarans,
            AlgorithmSpec::Dbscan(_) => Algorithm::Dbscan,
            AlgorithmSpec::Birch(_) => Algorithm::Birch,
            AlgorithmSpec::Cure(_) => Algorithm::Cure,
            AlgorithmSpec::LeastSquares(_) => Algorithm::LeastSquares,
            AlgorithmSpec::MaximumLikelihood(_) => Algorithm::MaximumLikelihood,
            AlgorithmSpec::Polynomial(_) => Algorithm::Polynomial,
            AlgorithmSpec::Stepwise(_) => Algorithm::Stepwise,
        }
    }

    pub fn task(&self) -> Task {
        self.algorithm().task()
    }

    /// Checks parameter ranges that do not depend on the data.
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::Config(format!("{}: {m}", self.algorithm())));
        match self {
            AlgorithmSpec::DecisionTree(p) => p.validate().or_else(|e| bad(&e.to_string())),
            AlgorithmSpec::RandomForest(p) if p.n_trees == 0 => bad("n_trees must be at least 1"),
            AlgorithmSpec::Knn(p) if p.k == 0 => bad("k must be at least 1"),
            AlgorithmSpec::Logistic(p) if !(p.lr > 0.0) => bad("lr must be positive"),
            AlgorithmSpec::Dbscan(p) if p.min_pts == 0 => bad("min_pts must be at least 1"),
            AlgorithmSpec::Dbscan(DbscanParams { eps: Some(e), .. }) if !(*e > 0.0) => {
                bad("eps must be positive")
            }
            AlgorithmSpec::Birch(p) if !(p.threshold > 0.0) => bad("threshold must be positive"),
            AlgorithmSpec::Cure(p) if !(p.shrink > 0.0 && p.shrink <= 1.0) => {
                bad("shrink must lie in (0, 1]")
            }
            AlgorithmSpec::Polynomial(p) if p.degree == 0 => bad("degree must be at least 1"),
            AlgorithmSpec::Stepwise(p)
                if !(0.0 < p.alpha_in && p.alpha_in <= p.alpha_out && p.alpha_out < 1.0) =>
            {
                bad("needs 0 < alpha_in <= alpha_out < 1")
            }
            _ => Ok(()),
        }
    }

    pub(crate) fn train_classifier(&self, train: &Dataset, seed: u64) -> Result<ClassifierModel> {
        Ok(match self {
            AlgorithmSpec::DecisionTree(p) => ClassifierModel::DecisionTree(train_decision_tree(train, p)?),
            AlgorithmSpec::Knn(p) => ClassifierModel::Knn(train_knn(train, p.k.min(train.len()))?),
            AlgorithmSpec::NaiveBayes(p) => ClassifierModel::NaiveBayes(train_naive_bayes(train, p)?),
            AlgorithmSpec::BayesNet(p) => ClassifierModel::BayesNet(train_bayes_net(train, p)?),
            AlgorithmSpec::Logistic(p) => ClassifierModel::Logistic(train_logistic(train, p)?),
            AlgorithmSpec::RandomForest(p) => {
                ClassifierModel::RandomForest(train_random_forest(train, p, seed)?)
            }
            other => {
                return Err(Error::Unsupported(format!(
                    "{} is not a classifier",
                    other.algorithm()
                )))
            }
        })
    }

    pub(crate) fn fit_regression(&self, train: &Dataset) -> Result<Fitted> {
        match self {
            AlgorithmSpec::LeastSquares(p) => fit_least_squares(train, p.ridge_fallback),
            AlgorithmSpec::MaximumLikelihood(p) => fit_maximum_likelihood(train, p),
            AlgorithmSpec::Polynomial(p) => fit_polynomial(train, p.degree, p.ridge_fallback),
            AlgorithmSpec::Stepwise(p) => fit_stepwise(train, p),
            other => Err(Error::Unsupported(format!(
                "{} is not a regression method",
                other.algorithm()
            ))),
        }
    }

    /// Clusters `d` into `n_c` groups unless the parameters say otherwise.
    /// `eps` is the DBSCAN radius used when the parameters leave it open.
    pub(crate) fn cluster(&self, d: &Dataset, n_c: usize, eps: Option<f64>, seed: u64) -> Result<Clustering> {
        match self {
            AlgorithmSpec::KMeans(p) => kmeans(d, p.k.unwrap_or(n_c), seed, p),
            AlgorithmSpec::Lvq(p) => lvq(d, p, seed),
            AlgorithmSpec::Clarans(p) => clarans(d, p.k.unwrap_or(n_c), p, seed),
            AlgorithmSpec::Dbscan(p) => {
                let eps = p
                    .eps
                    .or(eps)
                    .ok_or_else(|| Error::Parameter("DBSCAN radius not resolved".into()))?;
                dbscan(d, eps, p.min_pts)
            }
            AlgorithmSpec::Birch(p) => birch(d, p.k.unwrap_or(n_c), p),
            AlgorithmSpec::Cure(p) => cure(d, p.k.unwrap_or(n_c), p, seed),
            other => Err(Error::Unsupported(format!(
                "{} is not a clustering method",
                other.algorithm()
            ))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_round_trip() {
        for a in Algorithm::ALL {
            assert_eq!(a.as_str().parse::<Algorithm>().unwrap(), a);
            assert_eq!(AlgorithmSpec::default_for(a).algorithm(), a);
        }
        assert_eq!(Algorithm::ALL.iter().filter(|a| a.task() == Task::Clustering).count(), 6);
    }

    #[test]
    fn spec_serializes_with_name_tag() {
        let s = AlgorithmSpec::Knn(KnnParams { k: 3 });
        let v = serde_json::to_value(&s).unwrap();
        assert_eq!(v, serde_json::json!({"name": "knn", "k": 3}));
        let back: AlgorithmSpec = serde_json::from_value(serde_json::json!({"name": "kmeans"})).unwrap();
        assert_eq!(back, AlgorithmSpec::default_for(Algorithm::KMeans));
        let bad = serde_json::from_value::<AlgorithmSpec>(serde_json::json!({"name": "knn", "kk": 3}));
        assert!(bad.is_err());
    }
}
