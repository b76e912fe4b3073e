//! Random forests of [`DecisionTree`]s with bootstrap rows and per-split
//! random feature subsets. Trees train in parallel; tree `i` draws from
//! its own seed derived from the forest seed, so results do not depend on
//! the thread count.

use rand::Rng as _;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::tree::{grow_tree, DecisionTree, TreeParams};
use super::{majority, Prepared};
use crate::dataset::{Dataset, Record};
use crate::seed;
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ForestParams {
    pub n_trees: usize,
    /// Fraction of features tried at each split; `None` means
    /// `sqrt(n) / n`.
    pub feat_frac: Option<f64>,
    pub bootstrap: bool,
    pub tree: TreeParams,
}

impl Default for ForestParams {
    fn default() -> Self {
        ForestParams {
            n_trees: 50,
            feat_frac: None,
            bootstrap: true,
            tree: TreeParams::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RandomForest {
    trees: Vec<DecisionTree>,
    seeds: Vec<u64>,
    n_classes: usize,
}

impl RandomForest {
    pub fn trees(&self) -> &[DecisionTree] {
        &self.trees
    }

    /// Seed used by each tree for its bootstrap and feature draws.
    pub fn tree_seeds(&self) -> &[u64] {
        &self.seeds
    }

    pub fn predict(&self, r: &Record) -> Result<usize> {
        let mut votes = vec![0; self.n_classes.max(1)];
        for t in &self.trees {
            votes[t.predict(r)?] += 1;
        }
        Ok(majority(&votes))
    }
}

pub fn train_random_forest(train: &Dataset, params: &ForestParams, seed: u64) -> Result<RandomForest> {
    params.tree.validate()?;
    if params.n_trees == 0 {
        return Err(Error::Parameter("n_trees must be at least 1".into()));
    }
    let data = Prepared::new(train)?;
    let n_feat = data.columns.len();
    let frac = params.feat_frac.unwrap_or(1.0 / (n_feat as f64).sqrt());
    if !(frac > 0.0 && frac <= 1.0) {
        return Err(Error::Parameter("feat_frac must lie in (0, 1]".into()));
    }
    let k = ((frac * n_feat as f64).ceil() as usize).clamp(1, n_feat);
    let n = data.len();
    let seeds: Vec<u64> = (0..params.n_trees as u64)
        .map(|i| seed::child(seed, "tree", i))
        .collect();
    let trees = seeds
        .par_iter()
        .map(|&s| {
            let mut rng = seed::rng(s);
            let rows: Vec<usize> = if params.bootstrap {
                (0..n).map(|_| rng.random_range(0..n)).collect()
            } else {
                (0..n).collect()
            };
            grow_tree(&data, rows, &params.tree, Some((k, &mut rng)))
        })
        .collect();
    Ok(RandomForest {
        trees,
        seeds,
        n_classes: data.n_classes,
    })
}

pub fn rf_classify(model: &RandomForest, query: &Record) -> Result<usize> {
    model.predict(query)
}
