//! CLARANS randomized medoid search.
//!
//! A local search starts from random medoids and tries random single swaps
//! of a medoid for a non-medoid. A swap is kept when it lowers the cost,
//! the sum of distances from each point to its nearest medoid, and the
//! neighbour counter then restarts. The search ends after `max_neighbor`
//! failed tries in a row. The best of `num_local` searches wins.

use rand::Rng as _;
use serde::{Deserialize, Serialize};

use super::{check_k, encode, Clustering};
use crate::dataset::Dataset;
use crate::encode::distance;
use crate::seed;
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ClaransParams {
    /// Cluster count used by the evaluation harness; `None` means the
    /// number of classes.
    pub k: Option<usize>,
    pub num_local: usize,
    pub max_neighbor: usize,
}

impl Default for ClaransParams {
    fn default() -> Self {
        ClaransParams {
            k: None,
            num_local: 2,
            max_neighbor: 250,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ClaransResult {
    pub medoids: Vec<usize>,
    pub assignments: Vec<usize>,
    pub cost: f64,
    /// Cost after each accepted swap, per local search.
    pub traces: Vec<Vec<f64>>,
}

pub fn clarans(d: &Dataset, k: usize, params: &ClaransParams, seed: u64) -> Result<Clustering> {
    let points = encode(d)?;
    let r = clarans_points(&points, k, params, seed)?;
    Ok(Clustering::from_dense(r.assignments, k))
}

pub fn medoid_cost(points: &[Vec<f64>], medoids: &[usize]) -> f64 {
    points
        .iter()
        .map(|p| {
            medoids
                .iter()
                .map(|&m| distance(p, &points[m]))
                .fold(f64::INFINITY, f64::min)
        })
        .sum()
}

fn assign(points: &[Vec<f64>], medoids: &[usize]) -> Vec<usize> {
    points
        .iter()
        .map(|p| {
            let mut best = (0, f64::INFINITY);
            for (j, &m) in medoids.iter().enumerate() {
                let d = distance(p, &points[m]);
                if d < best.1 {
                    best = (j, d);
                }
            }
            best.0
        })
        .collect()
}

pub fn clarans_points(
    points: &[Vec<f64>],
    k: usize,
    params: &ClaransParams,
    seed: u64,
) -> Result<ClaransResult> {
    check_k(k, points.len())?;
    if params.num_local == 0 {
        return Err(Error::Parameter("num_local must be at least 1".into()));
    }
    let n = points.len();
    let mut best: Option<(Vec<usize>, f64)> = None;
    let mut traces = Vec::with_capacity(params.num_local);
    for local in 0..params.num_local as u64 {
        let mut rng = seed::rng(seed::child(seed, "clarans", local));
        let mut medoids = rand::seq::index::sample(&mut rng, n, k).into_vec();
        let mut cost = medoid_cost(points, &medoids);
        let mut trace = vec![cost];
        let mut tries = 0;
        while n > k && tries < params.max_neighbor {
            let slot = rng.random_range(0..k);
            let candidate = loop {
                let c = rng.random_range(0..n);
                if !medoids.contains(&c) {
                    break c;
                }
            };
            let old = std::mem::replace(&mut medoids[slot], candidate);
            let c = medoid_cost(points, &medoids);
            if c < cost {
                cost = c;
                trace.push(c);
                tries = 0;
            } else {
                medoids[slot] = old;
                tries += 1;
            }
        }
        traces.push(trace);
        if best.as_ref().is_none_or(|b| cost < b.1) {
            best = Some((medoids, cost));
        }
    }
    let (medoids, cost) = best.expect("num_local >= 1");
    Ok(ClaransResult {
        assignments: assign(points, &medoids),
        medoids,
        cost,
        traces,
    })
}
