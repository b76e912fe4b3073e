//! Mapping cluster indices to class labels.
//!
//! With as many clusters as classes, clusters map one-to-one onto classes
//! so that total agreement is maximal: by trying every permutation for up
//! to eight classes, and with the Hungarian method beyond that. With a
//! different cluster count each cluster takes its most frequent class.
//! Noise rows get label `n_c`, which no class matches.

use crate::cluster::Clustering;
use crate::{Error, Result};

pub fn contingency(c: &Clustering, truth: &[usize], n_c: usize) -> Vec<Vec<usize>> {
    let mut m = vec![vec![0; n_c]; c.n_clusters()];
    for (a, &t) in c.assignments().iter().zip(truth) {
        if let Some(k) = a {
            m[*k][t] += 1;
        }
    }
    m
}

/// Cluster-to-class map maximizing total agreement; ties go to the
/// lexicographically first permutation.
fn best_permutation(m: &[Vec<usize>]) -> Vec<usize> {
    let n = m.len();
    let mut perm: Vec<usize> = (0..n).collect();
    let mut best = perm.clone();
    let score = |p: &[usize]| p.iter().enumerate().map(|(k, &c)| m[k][c]).sum::<usize>();
    let mut best_score = score(&perm);
    // lexicographic next-permutation
    loop {
        let Some(i) = (0..n.saturating_sub(1)).rev().find(|&i| perm[i] < perm[i + 1]) else {
            return best;
        };
        let j = (i + 1..n).rev().find(|&j| perm[j] > perm[i]).expect("successor exists");
        perm.swap(i, j);
        perm[i + 1..].reverse();
        let s = score(&perm);
        if s > best_score {
            best_score = s;
            best = perm.clone();
        }
    }
}

/// Minimum-cost perfect assignment of rows to columns of a square matrix.
pub fn hungarian(cost: &[Vec<f64>]) -> Vec<usize> {
    let n = cost.len();
    let inf = f64::INFINITY;
    let mut u = vec![0.0; n + 1];
    let mut v = vec![0.0; n + 1];
    let mut p = vec![0usize; n + 1];
    let mut way = vec![0usize; n + 1];
    for i in 1..=n {
        p[0] = i;
        let mut j0 = 0;
        let mut minv = vec![inf; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[j0] = true;
            let i0 = p[j0];
            let mut delta = inf;
            let mut j1 = 0;
            for j in 1..=n {
                if !used[j] {
                    let cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
                    if cur < minv[j] {
                        minv[j] = cur;
                        way[j] = j0;
                    }
                    if minv[j] < delta {
                        delta = minv[j];
                        j1 = j;
                    }
                }
            }
            for j in 0..=n {
                if used[j] {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if p[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    let mut assignment = vec![0; n];
    for j in 1..=n {
        if p[j] > 0 {
            assignment[p[j] - 1] = j - 1;
        }
    }
    assignment
}

/// Class label per row after mapping clusters onto classes.
pub fn match_clusters(c: &Clustering, truth: &[usize], n_c: usize) -> Result<Vec<usize>> {
    if truth.len() != c.len() {
        return Err(Error::Parameter(format!(
            "{} true labels for {} clustered rows",
            truth.len(),
            c.len()
        )));
    }
    if truth.iter().any(|&t| t >= n_c) {
        return Err(Error::Parameter("true label outside the class range".into()));
    }
    let m = contingency(c, truth, n_c);
    let map: Vec<usize> = if c.n_clusters() == n_c && n_c <= 8 {
        best_permutation(&m)
    } else if c.n_clusters() == n_c {
        let cost: Vec<Vec<f64>> = m
            .iter()
            .map(|row| row.iter().map(|&x| -(x as f64)).collect())
            .collect();
        hungarian(&cost)
    } else {
        m.iter().map(|row| crate::classify::majority(row)).collect()
    };
    Ok(c.assignments()
        .iter()
        .map(|a| a.map_or(n_c, |k| map[k]))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn agreement(pred: &[usize], truth: &[usize]) -> usize {
        pred.iter().zip(truth).filter(|(a, b)| a == b).count()
    }

    #[test]
    fn permuted_clusters_match_perfectly() {
        let truth = vec![0, 0, 1, 1, 2, 2];
        let c = Clustering::new(vec![Some(2), Some(2), Some(0), Some(0), Some(1), Some(1)], 3).unwrap();
        assert_eq!(match_clusters(&c, &truth, 3).unwrap(), truth);
    }

    #[test]
    fn one_cluster_on_two_classes() {
        let truth = vec![0, 1, 0, 1];
        let c = Clustering::new(vec![Some(0); 4], 1).unwrap();
        assert_eq!(agreement(&match_clusters(&c, &truth, 2).unwrap(), &truth), 2);
    }

    #[test]
    fn noise_is_never_right() {
        let c = Clustering::new(vec![None, Some(0)], 1).unwrap();
        assert_eq!(match_clusters(&c, &[0, 0], 1).unwrap(), vec![1, 0]);
    }

    proptest! {
        #[test]
        fn hungarian_matches_permutations(
            m in prop::collection::vec(prop::collection::vec(0usize..20, 6), 6)
        ) {
            let by_perm = best_permutation(&m);
            let cost: Vec<Vec<f64>> = m.iter().map(|r| r.iter().map(|&x| -(x as f64)).collect()).collect();
            let by_hungarian = hungarian(&cost);
            let score = |p: &[usize]| p.iter().enumerate().map(|(k, &c)| m[k][c]).sum::<usize>();
            prop_assert_eq!(score(&by_perm), score(&by_hungarian));
            let mut seen = by_hungarian.clone();
            seen.sort_unstable();
            prop_assert_eq!(seen, (0..6).collect::<Vec<_>>());
        }

        #[test]
        fn invariant_under_relabelling(
            rows in prop::collection::vec((0usize..3, 0usize..3), 1..40),
            shift in 1usize..3,
        ) {
            let truth: Vec<usize> = rows.iter().map(|r| r.1).collect();
            let a = Clustering::new(rows.iter().map(|r| Some(r.0)).collect(), 3).unwrap();
            let b = Clustering::new(rows.iter().map(|r| Some((r.0 + shift) % 3)).collect(), 3).unwrap();
            prop_assert_eq!(
                agreement(&match_clusters(&a, &truth, 3).unwrap(), &truth),
                agreement(&match_clusters(&b, &truth, 3).unwrap(), &truth)
            );
        }
    }
}
