//! BIRCH: a clustering-feature (CF) tree built in one pass, followed by
//! single-linkage merging of the leaf entries down to K groups. Rows are
//! then assigned to the nearest group centroid.
//!
//! A CF summarises a set of points as `(n, LS, SS)`: count, linear sum and
//! sum of squared norms. A leaf entry absorbs a point when the merged
//! entry's radius stays within `threshold`. A node holding more than
//! `branching` entries splits around its two farthest entries.

use serde::{Deserialize, Serialize};

use super::linkage::single_linkage;
use super::{encode, nearest, Clustering};
use crate::dataset::Dataset;
use crate::encode::squared_distance;
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BirchParams {
    /// Cluster count used by the evaluation harness; `None` means the
    /// number of classes.
    pub k: Option<usize>,
    pub branching: usize,
    pub threshold: f64,
}

impl Default for BirchParams {
    fn default() -> Self {
        BirchParams {
            k: None,
            branching: 50,
            threshold: 0.05,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Cf {
    pub n: usize,
    pub ls: Vec<f64>,
    pub ss: f64,
}

impl Cf {
    pub fn point(x: &[f64]) -> Cf {
        Cf {
            n: 1,
            ls: x.to_vec(),
            ss: x.iter().map(|v| v * v).sum(),
        }
    }

    pub fn add(&mut self, other: &Cf) {
        self.n += other.n;
        for (a, b) in self.ls.iter_mut().zip(&other.ls) {
            *a += b;
        }
        self.ss += other.ss;
    }

    pub fn merged(&self, other: &Cf) -> Cf {
        let mut m = self.clone();
        m.add(other);
        m
    }

    pub fn centroid(&self) -> Vec<f64> {
        self.ls.iter().map(|v| v / self.n as f64).collect()
    }

    /// Root-mean-square distance of the members to the centroid.
    pub fn radius(&self) -> f64 {
        let n = self.n as f64;
        let c2: f64 = self.ls.iter().map(|v| (v / n) * (v / n)).sum();
        (self.ss / n - c2).max(0.0).sqrt()
    }
}

#[derive(Clone, Debug)]
enum Node {
    Leaf(Vec<Cf>),
    Inner(Vec<(Cf, Node)>),
}

fn summary(node: &Node) -> Cf {
    let mut it: Box<dyn Iterator<Item = &Cf>> = match node {
        Node::Leaf(e) => Box::new(e.iter()),
        Node::Inner(c) => Box::new(c.iter().map(|(cf, _)| cf)),
    };
    let mut total = it.next().expect("nodes are never empty").clone();
    for cf in it {
        total.add(cf);
    }
    total
}

fn closest(centroids: impl Iterator<Item = Vec<f64>>, x: &[f64]) -> usize {
    let mut best = (0, f64::INFINITY);
    for (i, c) in centroids.enumerate() {
        let d = squared_distance(&c, x);
        if d < best.1 {
            best = (i, d);
        }
    }
    best.0
}

/// Splits `items` around the farthest pair of centroids; returns the
/// second group.
fn split<T>(items: &mut Vec<T>, cf: impl Fn(&T) -> &Cf) -> Vec<T> {
    let cents: Vec<Vec<f64>> = items.iter().map(|t| cf(t).centroid()).collect();
    let mut seeds = (0, 1, -1.0);
    for i in 0..cents.len() {
        for j in i + 1..cents.len() {
            let d = squared_distance(&cents[i], &cents[j]);
            if d > seeds.2 {
                seeds = (i, j, d);
            }
        }
    }
    let (a, b, _) = seeds;
    let mut keep = Vec::new();
    let mut moved = Vec::new();
    for (i, t) in items.drain(..).enumerate() {
        let to_b = i == b
            || (i != a && squared_distance(&cents[i], &cents[b]) < squared_distance(&cents[i], &cents[a]));
        if to_b {
            moved.push(t);
        } else {
            keep.push(t);
        }
    }
    *items = keep;
    moved
}

fn insert(node: &mut Node, x: &Cf, p: &BirchParams) -> Option<Node> {
    match node {
        Node::Leaf(entries) => {
            let target = closest(entries.iter().map(Cf::centroid), &x.ls);
            let merged = entries[target].merged(x);
            if merged.radius() <= p.threshold {
                entries[target] = merged;
            } else {
                entries.push(x.clone());
            }
            (entries.len() > p.branching).then(|| Node::Leaf(split(entries, |e| e)))
        }
        Node::Inner(children) => {
            let target = closest(children.iter().map(|(cf, _)| cf.centroid()), &x.ls);
            let sibling = insert(&mut children[target].1, x, p);
            children[target].0 = summary(&children[target].1);
            if let Some(s) = sibling {
                children.push((summary(&s), s));
            }
            (children.len() > p.branching).then(|| Node::Inner(split(children, |c| &c.0)))
        }
    }
}

#[derive(Clone, Debug)]
pub struct CfTree {
    root: Node,
}

impl CfTree {
    pub fn build(points: &[Vec<f64>], params: &BirchParams) -> Result<CfTree> {
        if !(params.threshold > 0.0) {
            return Err(Error::Parameter("threshold must be positive".into()));
        }
        if params.branching < 2 {
            return Err(Error::Parameter("branching must be at least 2".into()));
        }
        let first = points
            .first()
            .ok_or_else(|| Error::EmptyInput("no points".into()))?;
        let mut root = Node::Leaf(vec![Cf::point(first)]);
        for x in &points[1..] {
            if let Some(sibling) = insert(&mut root, &Cf::point(x), params) {
                let old = std::mem::replace(&mut root, Node::Leaf(Vec::new()));
                root = Node::Inner(vec![(summary(&old), old), (summary(&sibling), sibling)]);
            }
        }
        Ok(CfTree { root })
    }

    /// Leaf entries in tree order.
    pub fn leaf_entries(&self) -> Vec<Cf> {
        fn walk(n: &Node, out: &mut Vec<Cf>) {
            match n {
                Node::Leaf(e) => out.extend(e.iter().cloned()),
                Node::Inner(c) => c.iter().for_each(|(_, child)| walk(child, out)),
            }
        }
        let mut out = Vec::new();
        walk(&self.root, &mut out);
        out
    }

    /// Every CF stored in the tree, inner summaries included.
    pub fn all_features(&self) -> Vec<Cf> {
        fn walk(n: &Node, out: &mut Vec<Cf>) {
            match n {
                Node::Leaf(e) => out.extend(e.iter().cloned()),
                Node::Inner(c) => {
                    for (cf, child) in c {
                        out.push(cf.clone());
                        walk(child, out);
                    }
                }
            }
        }
        let mut out = Vec::new();
        walk(&self.root, &mut out);
        out
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BirchResult {
    pub assignments: Vec<usize>,
    pub centroids: Vec<Vec<f64>>,
    pub leaf_entries: usize,
}

pub fn birch(d: &Dataset, k: usize, params: &BirchParams) -> Result<Clustering> {
    let points = encode(d)?;
    let r = birch_points(&points, k, params)?;
    Ok(Clustering::from_dense(r.assignments, k))
}

pub fn birch_points(points: &[Vec<f64>], k: usize, params: &BirchParams) -> Result<BirchResult> {
    if k == 0 {
        return Err(Error::Parameter("K must be at least 1".into()));
    }
    let tree = CfTree::build(points, params)?;
    let entries = tree.leaf_entries();
    if k > entries.len() {
        return Err(Error::Parameter(format!(
            "K = {k} exceeds the {} leaf entries; lower the threshold",
            entries.len()
        )));
    }
    let cents: Vec<Vec<f64>> = entries.iter().map(Cf::centroid).collect();
    let groups = single_linkage(&cents, k);
    let mut merged: Vec<Option<Cf>> = vec![None; k];
    for (cf, &g) in entries.iter().zip(&groups) {
        match &mut merged[g] {
            Some(m) => m.add(cf),
            slot => *slot = Some(cf.clone()),
        }
    }
    let centroids: Vec<Vec<f64>> = merged
        .into_iter()
        .map(|m| m.expect("every group has an entry").centroid())
        .collect();
    Ok(BirchResult {
        assignments: points.iter().map(|p| nearest(p, &centroids).0).collect(),
        centroids,
        leaf_entries: entries.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cluster::kmeans::{kmeans_points, KMeansParams};
    use proptest::prelude::*;

    #[test]
    fn cf_addition_is_componentwise() {
        let a = Cf { n: 2, ls: vec![1.0, 2.0], ss: 3.0 };
        let b = Cf { n: 3, ls: vec![0.5, -1.0], ss: 4.0 };
        assert_eq!(a.merged(&b), Cf { n: 5, ls: vec![1.5, 1.0], ss: 7.0 });
    }

    #[test]
    fn huge_threshold_gives_one_entry() {
        let pts: Vec<Vec<f64>> = (0..30).map(|i| vec![i as f64 / 30.0, 0.5]).collect();
        let p = BirchParams { threshold: 100.0, ..Default::default() };
        let r = birch_points(&pts, 1, &p).unwrap();
        assert_eq!(r.leaf_entries, 1);
        assert!(r.assignments.iter().all(|&a| a == 0));
        assert!(birch_points(&pts, 2, &p).is_err());
    }

    #[test]
    fn far_blobs_match_kmeans() {
        let mut pts = Vec::new();
        for i in 0..25 {
            let t = (i % 5) as f64 * 0.02;
            let u = (i / 5) as f64 * 0.02;
            pts.push(vec![0.1 + t, 0.1 + u]);
            pts.push(vec![0.8 + t, 0.7 + u]);
        }
        let b = birch_points(&pts, 2, &BirchParams { branching: 4, threshold: 0.03, k: None }).unwrap();
        let k = kmeans_points(&pts, 2, 0, &KMeansParams::default()).unwrap();
        for i in 0..pts.len() {
            for j in 0..pts.len() {
                assert_eq!(b.assignments[i] == b.assignments[j], k.assignments[i] == k.assignments[j]);
            }
        }
    }

    proptest! {
        #[test]
        fn tree_features_are_consistent(
            pts in prop::collection::vec(prop::collection::vec(0.0f64..1.0, 3), 1..120),
            branching in 2usize..6,
            threshold in 0.01f64..0.3,
        ) {
            let tree = CfTree::build(&pts, &BirchParams { branching, threshold, k: None }).unwrap();
            let entries = tree.leaf_entries();
            prop_assert_eq!(entries.iter().map(|e| e.n).sum::<usize>(), pts.len());
            for cf in tree.all_features() {
                let ls2: f64 = cf.ls.iter().map(|v| v * v).sum();
                prop_assert!(cf.ss >= ls2 / cf.n as f64 - 1e-9);
            }
        }
    }
}
