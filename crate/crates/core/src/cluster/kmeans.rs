//! Lloyd's k-means with seeded restarts.
//!
//! Each restart starts from K distinct data points. When there are at most
//! `n_init` possible starting sets, every set is tried. A cluster that loses
//! all its points takes over the point farthest from its own centroid.

use serde::{Deserialize, Serialize};

use super::{check_k, encode, mean, nearest, Clustering};
use crate::dataset::Dataset;
use crate::encode::squared_distance;
use crate::seed;
use crate::Result;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct KMeansParams {
    /// Cluster count used by the evaluation harness; `None` means the
    /// number of classes.
    pub k: Option<usize>,
    pub max_iters: usize,
    pub n_init: usize,
}

impl Default for KMeansParams {
    fn default() -> Self {
        KMeansParams {
            k: None,
            max_iters: 100,
            n_init: 10,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct KMeansResult {
    pub assignments: Vec<usize>,
    pub centroids: Vec<Vec<f64>>,
    pub sse: f64,
    /// SSE after every update step of the winning restart.
    pub sse_trace: Vec<f64>,
}

pub fn kmeans(d: &Dataset, k: usize, seed: u64, params: &KMeansParams) -> Result<Clustering> {
    let points = encode(d)?;
    let r = kmeans_points(&points, k, seed, params)?;
    Ok(Clustering::from_dense(r.assignments, k))
}

pub fn sse(points: &[Vec<f64>], assignments: &[usize], centroids: &[Vec<f64>]) -> f64 {
    points
        .iter()
        .zip(assignments)
        .map(|(p, &a)| squared_distance(p, &centroids[a]))
        .sum()
}

pub fn kmeans_points(
    points: &[Vec<f64>],
    k: usize,
    seed: u64,
    params: &KMeansParams,
) -> Result<KMeansResult> {
    check_k(k, points.len())?;
    let starts = initial_sets(points.len(), k, seed, params.n_init.max(1));
    let mut best: Option<KMeansResult> = None;
    for start in starts {
        let r = lloyd(points, start, params.max_iters);
        if best.as_ref().is_none_or(|b| r.sse < b.sse) {
            best = Some(r);
        }
    }
    Ok(best.expect("at least one restart"))
}

fn binomial_at_most(n: usize, k: usize, cap: usize) -> bool {
    let k = k.min(n - k);
    let mut c: u128 = 1;
    for i in 0..k {
        c = c * (n - i) as u128 / (i + 1) as u128;
        if c > cap as u128 {
            return false;
        }
    }
    true
}

fn initial_sets(n: usize, k: usize, seed: u64, n_init: usize) -> Vec<Vec<usize>> {
    if binomial_at_most(n, k, n_init) {
        let mut sets = Vec::new();
        let mut cur: Vec<usize> = (0..k).collect();
        loop {
            sets.push(cur.clone());
            let Some(i) = (0..k).rev().find(|&i| cur[i] < n - k + i) else {
                return sets;
            };
            cur[i] += 1;
            for j in i + 1..k {
                cur[j] = cur[j - 1] + 1;
            }
        }
    }
    (0..n_init as u64)
        .map(|r| {
            let mut rng = seed::rng(seed::child(seed, "kmeans-init", r));
            rand::seq::index::sample(&mut rng, n, k).into_vec()
        })
        .collect()
}

fn lloyd(points: &[Vec<f64>], start: Vec<usize>, max_iters: usize) -> KMeansResult {
    let k = start.len();
    let mut centroids: Vec<Vec<f64>> = start.iter().map(|&i| points[i].clone()).collect();
    let mut assignments: Vec<usize> = points.iter().map(|p| nearest(p, &centroids).0).collect();
    let mut trace = Vec::new();
    for it in 0..max_iters.max(1) {
        if it > 0 {
            let next: Vec<usize> = points.iter().map(|p| nearest(p, &centroids).0).collect();
            if next == assignments {
                break;
            }
            assignments = next;
        }
        reseed_empty(points, &mut assignments, &centroids, k);
        centroids = (0..k)
            .map(|c| {
                let members: Vec<&Vec<f64>> = points
                    .iter()
                    .zip(&assignments)
                    .filter(|(_, &a)| a == c)
                    .map(|(p, _)| p)
                    .collect();
                mean(&members)
            })
            .collect();
        trace.push(sse(points, &assignments, &centroids));
    }
    KMeansResult {
        sse: sse(points, &assignments, &centroids),
        assignments,
        centroids,
        sse_trace: trace,
    }
}

fn reseed_empty(points: &[Vec<f64>], assignments: &mut [usize], centroids: &[Vec<f64>], k: usize) {
    loop {
        let mut sizes = vec![0usize; k];
        for &a in assignments.iter() {
            sizes[a] += 1;
        }
        let Some(empty) = sizes.iter().position(|&s| s == 0) else {
            return;
        };
        let far = (0..points.len())
            .filter(|&i| sizes[assignments[i]] > 1)
            .max_by(|&a, &b| {
                let da = squared_distance(&points[a], &centroids[assignments[a]]);
                let db = squared_distance(&points[b], &centroids[assignments[b]]);
                da.total_cmp(&db).then(b.cmp(&a))
            })
            .expect("k <= n leaves a cluster with two points");
        assignments[far] = empty;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn line(xs: &[f64]) -> Vec<Vec<f64>> {
        xs.iter().map(|&x| vec![x]).collect()
    }

    #[test]
    fn two_pairs() {
        let r = kmeans_points(&line(&[0.0, 1.0, 9.0, 10.0]), 2, 1, &KMeansParams::default()).unwrap();
        assert_eq!(r.assignments[0], r.assignments[1]);
        assert_eq!(r.assignments[2], r.assignments[3]);
        assert_ne!(r.assignments[0], r.assignments[2]);
        let mut c: Vec<f64> = r.centroids.iter().map(|c| c[0]).collect();
        c.sort_by(f64::total_cmp);
        assert_eq!(c, vec![0.5, 9.5]);
        assert_eq!(r.sse, 1.0);
    }

    #[test]
    fn k_equals_n_gives_zero_sse() {
        let r = kmeans_points(&line(&[3.0, 1.0, 4.0, 1.5, 9.0]), 5, 2, &KMeansParams::default()).unwrap();
        assert_eq!(r.sse, 0.0);
    }

    #[test]
    fn parameter_checks() {
        let p = line(&[1.0, 2.0]);
        assert!(kmeans_points(&p, 0, 0, &KMeansParams::default()).is_err());
        assert!(kmeans_points(&p, 3, 0, &KMeansParams::default()).is_err());
    }

    #[test]
    fn enumerates_small_start_sets() {
        assert_eq!(initial_sets(4, 2, 0, 10).len(), 6);
        assert_eq!(initial_sets(20, 3, 0, 10).len(), 10);
    }

    proptest! {
        #[test]
        fn trace_is_non_increasing(
            pts in prop::collection::vec(prop::collection::vec(0.0f64..1.0, 2), 3..40),
            k in 1usize..4,
            seed in 0u64..100,
        ) {
            prop_assume!(k <= pts.len());
            let params = KMeansParams { max_iters: 100, n_init: 1, k: None };
            let r = kmeans_points(&pts, k, seed, &params).unwrap();
            for w in r.sse_trace.windows(2) {
                prop_assert!(w[1] <= w[0] + 1e-12);
            }
            prop_assert_eq!(r, kmeans_points(&pts, k, seed, &params).unwrap());
        }
    }
}
