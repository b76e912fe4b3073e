//! Binary decision trees grown greedily on an impurity criterion.
//!
//! Numeric features split at midpoints between consecutive distinct values
//! (`x <= t` goes left). Categorical features split one category against
//! the rest.

use serde::{Deserialize, Serialize};

use super::impurity::Criterion;
use super::{majority, Prepared};
use crate::dataset::{Cell, Dataset, Record};
use crate::seed::Rng;
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TreeParams {
    pub criterion: Criterion,
    pub max_depth: usize,
    pub min_samples_leaf: usize,
}

impl Default for TreeParams {
    fn default() -> Self {
        TreeParams {
            criterion: Criterion::Gini,
            max_depth: 25,
            min_samples_leaf: 2,
        }
    }
}

impl TreeParams {
    pub fn validate(&self) -> Result<()> {
        if self.min_samples_leaf == 0 {
            return Err(Error::Parameter("min_samples_leaf must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum SplitTest {
    LessEq(f64),
    Equals(String),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum Node {
    Leaf {
        label: usize,
        counts: Vec<usize>,
    },
    Split {
        column: usize,
        test: SplitTest,
        left: usize,
        right: usize,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecisionTree {
    nodes: Vec<Node>,
    n_classes: usize,
}

impl DecisionTree {
    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn root(&self) -> &Node {
        &self.nodes[0]
    }

    pub fn n_leaves(&self) -> usize {
        self.nodes
            .iter()
            .filter(|n| matches!(n, Node::Leaf { .. }))
            .count()
    }

    pub fn depth(&self) -> usize {
        fn walk(nodes: &[Node], i: usize) -> usize {
            match &nodes[i] {
                Node::Leaf { .. } => 0,
                Node::Split { left, right, .. } => 1 + walk(nodes, *left).max(walk(nodes, *right)),
            }
        }
        walk(&self.nodes, 0)
    }

    pub fn predict(&self, r: &Record) -> Result<usize> {
        let mut i = 0;
        loop {
            match &self.nodes[i] {
                Node::Leaf { label, .. } => return Ok(*label),
                Node::Split {
                    column,
                    test,
                    left,
                    right,
                } => {
                    let go_left = match (test, &r.cells[*column]) {
                        (SplitTest::LessEq(t), Cell::Numeric(v)) => v <= t,
                        (SplitTest::Equals(c), Cell::Categorical(s)) => s == c,
                        (_, Cell::Missing) => {
                            return Err(Error::Schema(format!(
                                "column {column} is missing at predict time; impute first"
                            )))
                        }
                        (_, other) => {
                            return Err(Error::Schema(format!(
                                "cell {other:?} does not fit split on column {column}"
                            )))
                        }
                    };
                    i = if go_left { *left } else { *right };
                }
            }
        }
    }
}

pub fn train_decision_tree(train: &Dataset, params: &TreeParams) -> Result<DecisionTree> {
    params.validate()?;
    let data = Prepared::new(train)?;
    let rows: Vec<usize> = (0..data.len()).collect();
    Ok(grow_tree(&data, rows, params, None))
}

/// `subset` restricts each split to a random choice of `k` features.
pub(crate) fn grow_tree(
    data: &Prepared,
    rows: Vec<usize>,
    params: &TreeParams,
    subset: Option<(usize, &mut Rng)>,
) -> DecisionTree {
    let mut g = Grower {
        data,
        params,
        subset,
        nodes: Vec::new(),
    };
    g.grow(rows, 0);
    DecisionTree {
        nodes: g.nodes,
        n_classes: data.n_classes,
    }
}

struct Grower<'a, 'r> {
    data: &'a Prepared,
    params: &'a TreeParams,
    subset: Option<(usize, &'r mut Rng)>,
    nodes: Vec<Node>,
}

struct Candidate {
    improvement: f64,
    feature: usize,
    test: SplitTest,
}

impl Grower<'_, '_> {
    fn grow(&mut self, rows: Vec<usize>, depth: usize) -> usize {
        let counts = self.data.class_counts(&rows);
        let id = self.nodes.len();
        self.nodes.push(Node::Leaf {
            label: majority(&counts),
            counts: counts.clone(),
        });
        let pure = counts.iter().filter(|&&c| c > 0).count() <= 1;
        if pure
            || depth >= self.params.max_depth
            || rows.len() < 2 * self.params.min_samples_leaf
        {
            return id;
        }
        let Some(best) = self.best_split(&rows, &counts) else {
            return id;
        };
        let (l, r): (Vec<usize>, Vec<usize>) = rows
            .iter()
            .partition(|&&i| self.data.goes_left(best.feature, &best.test, i));
        let column = self.data.columns[best.feature].0;
        let left = self.grow(l, depth + 1);
        let right = self.grow(r, depth + 1);
        self.nodes[id] = Node::Split {
            column,
            test: best.test,
            left,
            right,
        };
        id
    }

    fn features(&mut self) -> Vec<usize> {
        let n = self.data.columns.len();
        match &mut self.subset {
            Some((k, rng)) if *k < n => {
                let mut f = rand::seq::index::sample(*rng, n, *k).into_vec();
                f.sort_unstable();
                f
            }
            _ => (0..n).collect(),
        }
    }

    fn best_split(&mut self, rows: &[usize], parent: &[usize]) -> Option<Candidate> {
        let min_leaf = self.params.min_samples_leaf;
        let crit = self.params.criterion;
        let mut best: Option<Candidate> = None;
        let mut offer = |c: Candidate| {
            if best.as_ref().is_none_or(|b| c.improvement > b.improvement) {
                best = Some(c);
            }
        };
        for f in self.features() {
            match &self.data.columns[f].1 {
                Feature::Num(values) => {
                    let mut order = rows.to_vec();
                    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
                    let mut left = vec![0; parent.len()];
                    for p in 0..order.len() - 1 {
                        left[self.data.labels[order[p]]] += 1;
                        let (a, b) = (values[order[p]], values[order[p + 1]]);
                        let nl = p + 1;
                        if a == b || nl < min_leaf || order.len() - nl < min_leaf {
                            continue;
                        }
                        let right: Vec<usize> = parent.iter().zip(&left).map(|(t, l)| t - l).collect();
                        let mut t = a + (b - a) / 2.0;
                        if t >= b {
                            t = a;
                        }
                        offer(Candidate {
                            improvement: crit.improvement(parent, &left, &right),
                            feature: f,
                            test: SplitTest::LessEq(t),
                        });
                    }
                }
                Feature::Cat { codes, names } => {
                    let mut per_code = vec![vec![0usize; parent.len()]; names.len()];
                    for &i in rows {
                        per_code[codes[i] as usize][self.data.labels[i]] += 1;
                    }
                    for (code, left) in per_code.iter().enumerate() {
                        let nl: usize = left.iter().sum();
                        if nl < min_leaf || rows.len() - nl < min_leaf {
                            continue;
                        }
                        let right: Vec<usize> = parent.iter().zip(left).map(|(t, l)| t - l).collect();
                        offer(Candidate {
                            improvement: crit.improvement(parent, left, &right),
                            feature: f,
                            test: SplitTest::Equals(names[code].clone()),
                        });
                    }
                }
            }
        }
        best
    }
}

pub(crate) enum Feature {
    Num(Vec<f64>),
    Cat { codes: Vec<u32>, names: Vec<String> },
}
