//! Bayesian network classifier with a structure learned by MDL hill
//! climbing.
//!
//! Nodes are the discretized features plus the class. The search starts
//! from the empty graph and repeatedly applies the single edge addition or
//! removal that lowers the description length most, keeping the graph
//! acyclic and every node within `max_parents`. The score of a node is
//! `b * (r - 1) * q - LL` in bits, where `r` is the node's level count,
//! `q` the number of parent configurations, `LL` the maximum-likelihood
//! log-likelihood and `b = log2(N) / 2`. Inference uses Laplace-smoothed
//! conditional tables.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{argmax, require_classes};
use crate::dataset::{Dataset, Record};
use crate::encode::Discretizer;
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BayesNetParams {
    pub max_parents: usize,
    pub bins: Option<usize>,
    pub smoothing: f64,
}

impl Default for BayesNetParams {
    fn default() -> Self {
        BayesNetParams {
            max_parents: 2,
            bins: Some(10),
            smoothing: 1.0,
        }
    }
}

/// Discrete observations, one row per record, and the level count of each
/// variable.
#[derive(Clone, Debug)]
pub struct DiscreteData {
    pub rows: Vec<Vec<usize>>,
    pub cardinality: Vec<usize>,
}

impl DiscreteData {
    fn config(&self, row: &[usize], parents: &[usize]) -> usize {
        parents
            .iter()
            .fold(0, |acc, &p| acc * self.cardinality[p] + row[p])
    }

    /// Per parent configuration, the counts of each level of `node`.
    fn family_counts(&self, node: usize, parents: &[usize]) -> BTreeMap<usize, Vec<usize>> {
        let mut table: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for row in &self.rows {
            let cfg = self.config(row, parents);
            table
                .entry(cfg)
                .or_insert_with(|| vec![0; self.cardinality[node]])[row[node]] += 1;
        }
        table
    }

    /// MDL cost in bits of `node` given `parents`.
    pub fn family_cost(&self, node: usize, parents: &[usize]) -> f64 {
        let n = self.rows.len() as f64;
        let b = 0.5 * n.log2();
        let q: f64 = parents.iter().map(|&p| self.cardinality[p] as f64).product();
        let params = (self.cardinality[node] as f64 - 1.0) * q;
        let mut ll = 0.0;
        for counts in self.family_counts(node, parents).values() {
            let nij: usize = counts.iter().sum();
            for &c in counts.iter().filter(|&&c| c > 0) {
                ll += c as f64 * (c as f64 / nij as f64).log2();
            }
        }
        b * params - ll
    }
}

/// Total MDL cost of a structure.
pub fn mdl_cost(data: &DiscreteData, parents: &[Vec<usize>]) -> f64 {
    parents
        .iter()
        .enumerate()
        .map(|(i, p)| data.family_cost(i, p))
        .sum()
}

fn reaches(parents: &[Vec<usize>], from: usize, to: usize) -> bool {
    // walk parent links upward from `to`; `from` reaching `to` means `from`
    // is an ancestor of `to`
    let mut stack = vec![to];
    let mut seen = vec![false; parents.len()];
    while let Some(v) = stack.pop() {
        if v == from {
            return true;
        }
        if !std::mem::replace(&mut seen[v], true) {
            stack.extend(&parents[v]);
        }
    }
    false
}

/// Greedy search over edge additions and removals from the empty graph.
pub fn learn_structure(data: &DiscreteData, max_parents: usize) -> Vec<Vec<usize>> {
    let n = data.cardinality.len();
    let mut parents: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut cache: BTreeMap<(usize, Vec<usize>), f64> = BTreeMap::new();
    let mut cost = |node: usize, ps: &[usize]| -> f64 {
        *cache
            .entry((node, ps.to_vec()))
            .or_insert_with(|| data.family_cost(node, ps))
    };
    loop {
        let mut best: Option<(f64, usize, Vec<usize>)> = None;
        for to in 0..n {
            let current = cost(to, &parents[to]);
            for from in 0..n {
                if from == to {
                    continue;
                }
                let mut next = parents[to].clone();
                if let Some(pos) = next.iter().position(|&p| p == from) {
                    next.remove(pos);
                } else {
                    // adding from -> to closes a cycle when `to` is already
                    // an ancestor of `from`
                    if next.len() >= max_parents || reaches(&parents, to, from) {
                        continue;
                    }
                    next.push(from);
                    next.sort_unstable();
                }
                let delta = cost(to, &next) - current;
                if delta < -1e-9 && best.as_ref().is_none_or(|b| delta < b.0) {
                    best = Some((delta, to, next));
                }
            }
        }
        match best {
            Some((_, to, next)) => parents[to] = next,
            None => return parents,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BayesNet {
    discretizer: Discretizer,
    cardinality: Vec<usize>,
    parents: Vec<Vec<usize>>,
    /// Per node, smoothed `P(level | parent configuration)` for observed
    /// configurations; unobserved ones fall back to uniform.
    tables: Vec<BTreeMap<usize, Vec<f64>>>,
}

impl BayesNet {
    /// Parent lists; the class is the last node.
    pub fn parents(&self) -> &[Vec<usize>] {
        &self.parents
    }

    fn log_joint(&self, x: &[usize]) -> f64 {
        let mut lp = 0.0;
        for (node, ps) in self.parents.iter().enumerate() {
            let cfg = ps.iter().fold(0, |acc, &p| acc * self.cardinality[p] + x[p]);
            lp += match self.tables[node].get(&cfg) {
                Some(t) => t[x[node]].ln(),
                None => -(self.cardinality[node] as f64).ln(),
            };
        }
        lp
    }

    pub fn predict(&self, r: &Record) -> Result<usize> {
        let mut x = self.discretizer.transform(r)?;
        let class = x.len();
        x.push(0);
        let nc = self.cardinality[class];
        let scores: Vec<f64> = (0..nc)
            .map(|y| {
                x[class] = y;
                self.log_joint(&x)
            })
            .collect();
        Ok(argmax(&scores))
    }
}

pub fn train_bayes_net(train: &Dataset, params: &BayesNetParams) -> Result<BayesNet> {
    require_classes(train)?;
    if !(params.smoothing > 0.0) {
        return Err(Error::Parameter("smoothing must be positive".into()));
    }
    let discretizer = Discretizer::fit(train, params.bins)?;
    let labels = train.labels()?;
    let mut cardinality: Vec<usize> = (0..discretizer.n_features())
        .map(|j| discretizer.levels(j))
        .collect();
    cardinality.push(train.schema().n_classes());
    let rows = train
        .rows()
        .iter()
        .zip(&labels)
        .map(|(r, &y)| {
            let mut x = discretizer.transform(r)?;
            x.push(y);
            Ok(x)
        })
        .collect::<Result<Vec<_>>>()?;
    let data = DiscreteData { rows, cardinality };
    let parents = learn_structure(&data, params.max_parents);
    let tables = parents
        .iter()
        .enumerate()
        .map(|(node, ps)| {
            let r = data.cardinality[node] as f64;
            data.family_counts(node, ps)
                .into_iter()
                .map(|(cfg, counts)| {
                    let nij: usize = counts.iter().sum();
                    let probs = counts
                        .iter()
                        .map(|&c| (c as f64 + params.smoothing) / (nij as f64 + params.smoothing * r))
                        .collect();
                    (cfg, probs)
                })
                .collect()
        })
        .collect();
    Ok(BayesNet {
        discretizer,
        cardinality: data.cardinality,
        parents,
        tables,
    })
}

/// Alias of [`train_bayes_net`].
pub fn train_bayesian_network(train: &Dataset, params: &BayesNetParams) -> Result<BayesNet> {
    train_bayes_net(train, params)
}

pub fn bn_classify(model: &BayesNet, query: &Record) -> Result<usize> {
    model.predict(query)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::{Cell, Column, ColumnKind, ColumnRole, Schema};

    fn categorical(rows: &[(&str, &str, &str)]) -> Dataset {
        let schema = Schema::new(vec![
            Column::new("a", ColumnKind::Categorical, ColumnRole::Feature),
            Column::new("b", ColumnKind::Categorical, ColumnRole::Feature),
            Column::new("y", ColumnKind::Categorical, ColumnRole::Target),
        ])
        .unwrap();
        let recs = rows
            .iter()
            .map(|(a, b, y)| {
                Record::new(
                    [a, b, y]
                        .iter()
                        .map(|s| Cell::Categorical(s.to_string()))
                        .collect(),
                )
            })
            .collect();
        Dataset::new(schema, recs).unwrap()
    }

    #[test]
    fn deterministic_dependency_is_learned() {
        let mut rows = Vec::new();
        for i in 0..30 {
            let a = ["p", "q", "r"][i % 3];
            let b = ["u", "v"][(i / 3) % 2];
            let y = ["P", "Q", "R"][i % 3];
            rows.push((a, b, y));
        }
        let d = categorical(&rows);
        let m = train_bayes_net(&d, &BayesNetParams::default()).unwrap();
        let (a, y) = (0, 2);
        assert!(m.parents()[y].contains(&a) || m.parents()[a].contains(&y));
        for (i, r) in d.rows().iter().enumerate() {
            assert_eq!(m.predict(r).unwrap(), d.label(i).unwrap());
        }
    }

    #[test]
    fn search_result_is_acyclic_and_bounded() {
        let mut rows = Vec::new();
        for i in 0..40 {
            rows.push((["p", "q"][i % 2], ["u", "v"][(i / 2) % 2], ["P", "Q"][(i + i / 2) % 2]));
        }
        let d = categorical(&rows);
        let m = train_bayes_net(&d, &BayesNetParams { max_parents: 1, ..Default::default() }).unwrap();
        let ps = m.parents();
        for (v, p) in ps.iter().enumerate() {
            assert!(p.len() <= 1);
            for &u in p {
                assert!(!reaches(ps, v, u), "cycle through {u} -> {v}");
            }
        }
    }

    #[test]
    fn cost_matches_closed_form() {
        // one binary node with no parents, counts 3 and 1
        let data = DiscreteData {
            rows: vec![vec![0], vec![0], vec![0], vec![1]],
            cardinality: vec![2],
        };
        let ll = 3.0 * (0.75f64).log2() + (0.25f64).log2();
        let expected = 0.5 * 4f64.log2() * 1.0 - ll;
        assert!((mdl_cost(&data, &[vec![]]) - expected).abs() < 1e-12);
    }

    #[test]
    fn numeric_features_need_bins() {
        let d = crate::testutil::labelled(&[vec![0.0], vec![1.0]], &["a", "b"]);
        let p = BayesNetParams {
            bins: None,
            ..BayesNetParams::default()
        };
        assert!(matches!(train_bayes_net(&d, &p), Err(Error::FeatureType(_))));
    }
}
