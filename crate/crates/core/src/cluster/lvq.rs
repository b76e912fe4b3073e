//! Learning vector quantization (LVQ1).
//!
//! Prototypes start at seeded random rows, one per class first, then extra
//! rows of any class. Each step draws a random row and moves the nearest
//! prototype toward it when their labels agree and away otherwise. A row's
//! cluster is the index of its nearest final prototype.

use rand::Rng as _;
use serde::{Deserialize, Serialize};

use super::{encode, nearest, Clustering};
use crate::classify::require_classes;
use crate::dataset::Dataset;
use crate::seed;
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LvqParams {
    /// Prototype count; `None` means one per class.
    pub prototypes: Option<usize>,
    pub learning_rate: f64,
    pub iters: usize,
}

impl Default for LvqParams {
    fn default() -> Self {
        LvqParams {
            prototypes: None,
            learning_rate: 0.1,
            iters: 1000,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct LvqResult {
    pub assignments: Vec<usize>,
    pub prototypes: Vec<Vec<f64>>,
    pub prototype_labels: Vec<usize>,
}

pub fn lvq(d: &Dataset, params: &LvqParams, seed: u64) -> Result<Clustering> {
    require_classes(d)?;
    let points = encode(d)?;
    let labels = d.labels()?;
    let n_c = d.schema().n_classes();
    let q = params.prototypes.unwrap_or(n_c);
    let r = lvq_points(&points, &labels, n_c, q, params, seed)?;
    Ok(Clustering::from_dense(r.assignments, q))
}

pub fn lvq_points(
    points: &[Vec<f64>],
    labels: &[usize],
    n_classes: usize,
    q: usize,
    params: &LvqParams,
    seed: u64,
) -> Result<LvqResult> {
    if q < n_classes {
        return Err(Error::Parameter(format!(
            "{q} prototypes cannot represent {n_classes} classes"
        )));
    }
    if q > points.len() {
        return Err(Error::Parameter(format!("{q} prototypes exceed the {} rows", points.len())));
    }
    if !(params.learning_rate >= 0.0) {
        return Err(Error::Parameter("learning rate must be non-negative".into()));
    }
    let mut rng = seed::rng(seed);
    let mut chosen: Vec<usize> = Vec::with_capacity(q);
    for c in 0..n_classes {
        let rows: Vec<usize> = (0..points.len()).filter(|&i| labels[i] == c).collect();
        if !rows.is_empty() {
            chosen.push(rows[rng.random_range(0..rows.len())]);
        }
    }
    while chosen.len() < q {
        let i = rng.random_range(0..points.len());
        if !chosen.contains(&i) {
            chosen.push(i);
        }
    }
    let mut protos: Vec<Vec<f64>> = chosen.iter().map(|&i| points[i].clone()).collect();
    let proto_labels: Vec<usize> = chosen.iter().map(|&i| labels[i]).collect();
    let lr = params.learning_rate;
    for _ in 0..params.iters {
        let i = rng.random_range(0..points.len());
        let (j, _) = nearest(&points[i], &protos);
        let sign = if proto_labels[j] == labels[i] { 1.0 } else { -1.0 };
        for (p, x) in protos[j].iter_mut().zip(&points[i]) {
            *p += sign * lr * (x - *p);
        }
    }
    Ok(LvqResult {
        assignments: points.iter().map(|p| nearest(p, &protos).0).collect(),
        prototypes: protos,
        prototype_labels: proto_labels,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn blobs() -> (Vec<Vec<f64>>, Vec<usize>) {
        let mut pts = Vec::new();
        let mut labels = Vec::new();
        for i in 0..20 {
            let t = i as f64 * 0.01;
            pts.push(vec![0.1 + t, 0.1]);
            labels.push(0);
            pts.push(vec![0.9 - t, 0.9]);
            labels.push(1);
        }
        (pts, labels)
    }

    #[test]
    fn zero_rate_keeps_initial_prototypes() {
        let (pts, labels) = blobs();
        let p = LvqParams { learning_rate: 0.0, ..LvqParams::default() };
        let r = lvq_points(&pts, &labels, 2, 2, &p, 4).unwrap();
        for proto in &r.prototypes {
            assert!(pts.contains(proto));
        }
        for (x, &a) in pts.iter().zip(&r.assignments) {
            assert_eq!(a, nearest(x, &r.prototypes).0);
        }
    }

    #[test]
    fn separated_blobs_follow_labels() {
        let (pts, labels) = blobs();
        let r = lvq_points(&pts, &labels, 2, 2, &LvqParams::default(), 9).unwrap();
        // oracle: nearest true class centroid
        let centroids = [vec![0.195, 0.1], vec![0.805, 0.9]];
        for (x, &a) in pts.iter().zip(&r.assignments) {
            assert_eq!(r.prototype_labels[a], nearest(x, &centroids).0);
        }
    }

    #[test]
    fn too_few_prototypes() {
        let (pts, labels) = blobs();
        assert!(matches!(
            lvq_points(&pts, &labels, 2, 1, &LvqParams::default(), 0),
            Err(Error::Parameter(_))
        ));
    }
}
