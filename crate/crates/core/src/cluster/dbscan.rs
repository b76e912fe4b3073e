//! Density-based clustering (DBSCAN).
//!
//! A point is a core point when at least `min_pts` points, itself included,
//! lie within `eps`. Core points within `eps` of each other share a
//! cluster. A non-core point within `eps` of a core point joins the lowest
//! numbered such cluster; every other point is noise.

use serde::{Deserialize, Serialize};

use super::{encode, Clustering};
use crate::dataset::Dataset;
use crate::encode::{distance, squared_distance};
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DbscanParams {
    /// Neighbourhood radius; `None` derives it from the clean data with
    /// [`default_eps`].
    pub eps: Option<f64>,
    pub min_pts: usize,
}

impl Default for DbscanParams {
    fn default() -> Self {
        DbscanParams {
            eps: None,
            min_pts: 4,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct DbscanResult {
    pub assignments: Vec<Option<usize>>,
    pub core: Vec<bool>,
    pub n_clusters: usize,
}

pub fn dbscan(d: &Dataset, eps: f64, min_pts: usize) -> Result<Clustering> {
    let points = encode(d)?;
    let r = dbscan_points(&points, eps, min_pts)?;
    Clustering::new(r.assignments, r.n_clusters)
}

/// 90th percentile (linear interpolation) of each point's distance to its
/// `min_pts`-th nearest other point.
pub fn default_eps(points: &[Vec<f64>], min_pts: usize) -> Result<f64> {
    if points.len() < 2 {
        return Err(Error::Parameter("eps needs at least two points".into()));
    }
    let kth = min_pts.clamp(1, points.len() - 1);
    let mut knn: Vec<f64> = points
        .iter()
        .enumerate()
        .map(|(i, p)| {
            let mut d: Vec<f64> = points
                .iter()
                .enumerate()
                .filter(|(j, _)| *j != i)
                .map(|(_, q)| distance(p, q))
                .collect();
            d.select_nth_unstable_by(kth - 1, f64::total_cmp);
            d[kth - 1]
        })
        .collect();
    knn.sort_by(f64::total_cmp);
    let pos = 0.9 * (knn.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    let eps = knn[lo] + (knn[hi] - knn[lo]) * (pos - lo as f64);
    // identical points would give a zero radius
    Ok(if eps > 0.0 { eps } else { f64::MIN_POSITIVE })
}

pub fn dbscan_points(points: &[Vec<f64>], eps: f64, min_pts: usize) -> Result<DbscanResult> {
    if !(eps > 0.0) || !eps.is_finite() {
        return Err(Error::Parameter(format!("eps must be positive, got {eps}")));
    }
    if min_pts == 0 {
        return Err(Error::Parameter("min_pts must be at least 1".into()));
    }
    let n = points.len();
    let eps2 = eps * eps;
    let neighbours: Vec<Vec<usize>> = (0..n)
        .map(|i| {
            (0..n)
                .filter(|&j| squared_distance(&points[i], &points[j]) <= eps2)
                .collect()
        })
        .collect();
    let core: Vec<bool> = neighbours.iter().map(|v| v.len() >= min_pts).collect();
    let mut assignments: Vec<Option<usize>> = vec![None; n];
    let mut n_clusters = 0;
    for start in 0..n {
        if !core[start] || assignments[start].is_some() {
            continue;
        }
        let id = n_clusters;
        n_clusters += 1;
        assignments[start] = Some(id);
        let mut stack = vec![start];
        while let Some(v) = stack.pop() {
            for &u in &neighbours[v] {
                if core[u] && assignments[u].is_none() {
                    assignments[u] = Some(id);
                    stack.push(u);
                }
            }
        }
    }
    for i in 0..n {
        if !core[i] {
            assignments[i] = neighbours[i]
                .iter()
                .filter(|&&j| core[j])
                .filter_map(|&j| assignments[j])
                .min();
        }
    }
    Ok(DbscanResult {
        assignments,
        core,
        n_clusters,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn blobs() -> Vec<Vec<f64>> {
        let mut pts = Vec::new();
        for i in 0..10 {
            pts.push(vec![0.01 * i as f64, 0.0]);
            pts.push(vec![5.0 + 0.01 * i as f64, 5.0]);
        }
        pts
    }

    #[test]
    fn far_blobs_are_two_clusters() {
        let r = dbscan_points(&blobs(), 0.05, 4).unwrap();
        assert_eq!(r.n_clusters, 2);
        assert!(r.assignments.iter().all(Option::is_some));
        assert_eq!(r.assignments[0], r.assignments[2]);
        assert_ne!(r.assignments[0], r.assignments[1]);
    }

    #[test]
    fn tiny_radius_is_all_noise() {
        let r = dbscan_points(&blobs(), 0.001, 2).unwrap();
        assert_eq!(r.n_clusters, 0);
        assert!(r.assignments.iter().all(Option::is_none));
    }

    #[test]
    fn border_point_joins_lowest_cluster() {
        // the point at 0.6 reaches a core point of each group but has only
        // three neighbours itself
        let pts: Vec<Vec<f64>> = [0.0, 0.1, 0.2, 0.3, 0.6, 0.9, 1.0, 1.1, 1.2]
            .iter()
            .map(|&x| vec![x])
            .collect();
        let r = dbscan_points(&pts, 0.35, 4).unwrap();
        assert!(!r.core[4]);
        assert_eq!(r.n_clusters, 2);
        assert_eq!(r.assignments[4], Some(0));
        assert_eq!(r.assignments[8], Some(1));
    }

    #[test]
    fn bad_parameters() {
        assert!(dbscan_points(&blobs(), 0.0, 4).is_err());
        assert!(dbscan_points(&blobs(), 0.1, 0).is_err());
    }

    #[test]
    fn eps_percentile() {
        let pts: Vec<Vec<f64>> = (0..11).map(|i| vec![i as f64]).collect();
        // 1st-NN distance is 1 for every point
        assert_eq!(default_eps(&pts, 1).unwrap(), 1.0);
    }

    proptest! {
        #[test]
        fn core_set_survives_shuffling(
            pts in prop::collection::vec(prop::collection::vec(0.0f64..1.0, 2), 2..30),
            rot in 0usize..30,
        ) {
            let r = dbscan_points(&pts, 0.2, 3).unwrap();
            let n = pts.len();
            let k = rot % n;
            let mut shifted = pts.clone();
            shifted.rotate_left(k);
            let s = dbscan_points(&shifted, 0.2, 3).unwrap();
            prop_assert_eq!(r.n_clusters, s.n_clusters);
            for i in 0..n {
                prop_assert_eq!(r.core[(i + k) % n], s.core[i]);
            }
            // same partition of the core points
            for i in 0..n {
                for j in 0..n {
                    let (a, b) = ((i + k) % n, (j + k) % n);
                    if r.core[a] && r.core[b] {
                        prop_assert_eq!(r.assignments[a] == r.assignments[b], s.assignments[i] == s.assignments[j]);
                    }
                }
            }
        }
    }
}
