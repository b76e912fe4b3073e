//! CURE: single-linkage clustering of a random sample, then a few
//! well-scattered representatives per cluster shrunk toward the cluster
//! centroid. Every row joins the cluster of its nearest representative.

use serde::{Deserialize, Serialize};

use super::linkage::single_linkage;
use super::{encode, mean, Clustering};
use crate::dataset::Dataset;
use crate::encode::squared_distance;
use crate::seed;
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CureParams {
    /// Cluster count used by the evaluation harness; `None` means the
    /// number of classes.
    pub k: Option<usize>,
    pub n_rep: usize,
    pub shrink: f64,
    pub sample_frac: f64,
}

impl Default for CureParams {
    fn default() -> Self {
        CureParams {
            k: None,
            n_rep: 5,
            shrink: 0.3,
            sample_frac: 0.25,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CureResult {
    pub assignments: Vec<usize>,
    /// Shrunk representatives per cluster.
    pub representatives: Vec<Vec<Vec<f64>>>,
    pub sample: Vec<usize>,
}

pub fn cure(d: &Dataset, k: usize, params: &CureParams, seed: u64) -> Result<Clustering> {
    let points = encode(d)?;
    let r = cure_points(&points, k, params, seed)?;
    Ok(Clustering::from_dense(r.assignments, k))
}

/// Greedy farthest-first choice of up to `n` members, starting from the
/// member farthest from `centre`.
fn scattered(members: &[&Vec<f64>], centre: &[f64], n: usize) -> Vec<usize> {
    let mut chosen: Vec<usize> = Vec::new();
    while chosen.len() < n.min(members.len()) {
        let mut best = (usize::MAX, f64::NEG_INFINITY);
        for (i, m) in members.iter().enumerate() {
            if chosen.contains(&i) {
                continue;
            }
            let score = if chosen.is_empty() {
                squared_distance(m, centre)
            } else {
                chosen
                    .iter()
                    .map(|&c| squared_distance(m, members[c]))
                    .fold(f64::INFINITY, f64::min)
            };
            if score > best.1 {
                best = (i, score);
            }
        }
        chosen.push(best.0);
    }
    chosen
}

pub fn cure_points(points: &[Vec<f64>], k: usize, params: &CureParams, seed: u64) -> Result<CureResult> {
    if k == 0 {
        return Err(Error::Parameter("K must be at least 1".into()));
    }
    if params.n_rep == 0 {
        return Err(Error::Parameter("n_rep must be at least 1".into()));
    }
    if !(params.shrink > 0.0 && params.shrink <= 1.0) {
        return Err(Error::Parameter("shrink must lie in (0, 1]".into()));
    }
    if !(params.sample_frac > 0.0 && params.sample_frac <= 1.0) {
        return Err(Error::Parameter("sample_frac must lie in (0, 1]".into()));
    }
    let n = points.len();
    let m = ((params.sample_frac * n as f64).round() as usize).min(n);
    if m < k {
        return Err(Error::Parameter(format!("sample of {m} rows is smaller than K = {k}")));
    }
    let mut rng = seed::rng(seed);
    let mut sample = rand::seq::index::sample(&mut rng, n, m).into_vec();
    sample.sort_unstable();
    let sampled: Vec<Vec<f64>> = sample.iter().map(|&i| points[i].clone()).collect();
    let groups = single_linkage(&sampled, k);

    let mut representatives = Vec::with_capacity(k);
    for g in 0..k {
        let members: Vec<&Vec<f64>> = sampled
            .iter()
            .zip(&groups)
            .filter(|(_, &l)| l == g)
            .map(|(p, _)| p)
            .collect();
        let centre = mean(&members);
        let reps: Vec<Vec<f64>> = scattered(&members, &centre, params.n_rep)
            .into_iter()
            .map(|i| {
                members[i]
                    .iter()
                    .zip(&centre)
                    .map(|(r, c)| r + params.shrink * (c - r))
                    .collect()
            })
            .collect();
        representatives.push(reps);
    }

    let assignments = points
        .iter()
        .map(|p| {
            let mut best = (0, f64::INFINITY);
            for (g, reps) in representatives.iter().enumerate() {
                for r in reps {
                    let d = squared_distance(p, r);
                    if d < best.1 {
                        best = (g, d);
                    }
                }
            }
            best.0
        })
        .collect();
    Ok(CureResult {
        assignments,
        representatives,
        sample,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cluster::nearest;

    fn pts() -> Vec<Vec<f64>> {
        (0..40)
            .map(|i| {
                let base = if i % 2 == 0 { 0.1 } else { 0.7 };
                vec![base + (i % 7) as f64 * 0.02, base + (i % 5) as f64 * 0.03]
            })
            .collect()
    }

    #[test]
    fn full_shrink_is_centroid_assignment() {
        let p = pts();
        let params = CureParams { n_rep: 1, shrink: 1.0, sample_frac: 0.5, k: None };
        let r = cure_points(&p, 2, &params, 8).unwrap();
        // direct computation: MIN-linkage groups of the sample, their means,
        // nearest-mean assignment
        let sampled: Vec<Vec<f64>> = r.sample.iter().map(|&i| p[i].clone()).collect();
        let groups = single_linkage(&sampled, 2);
        let cents: Vec<Vec<f64>> = (0..2)
            .map(|g| {
                let m: Vec<&Vec<f64>> = sampled.iter().zip(&groups).filter(|(_, &l)| l == g).map(|(x, _)| x).collect();
                mean(&m)
            })
            .collect();
        for (x, &a) in p.iter().zip(&r.assignments) {
            assert_eq!(a, nearest(x, &cents).0);
        }
    }

    #[test]
    fn seeded_runs_repeat() {
        let p = pts();
        let a = cure_points(&p, 2, &CureParams::default(), 3).unwrap();
        assert_eq!(a, cure_points(&p, 2, &CureParams::default(), 3).unwrap());
    }

    #[test]
    fn sample_must_cover_k() {
        let p = pts();
        let params = CureParams { sample_frac: 0.05, ..Default::default() };
        assert!(matches!(cure_points(&p, 3, &params, 0), Err(Error::Parameter(_))));
    }
}
