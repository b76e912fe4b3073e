//! Single-linkage (MIN) agglomeration.
//!
//! Merging the closest pair of groups until `k` remain is the same as
//! deleting the `k - 1` heaviest edges of a minimum spanning tree, which is
//! how it is computed here.

use crate::encode::distance;

/// Group label per point, numbered by first appearance.
pub fn single_linkage(points: &[Vec<f64>], k: usize) -> Vec<usize> {
    let n = points.len();
    if n == 0 {
        return Vec::new();
    }
    let k = k.clamp(1, n);
    let mut in_tree = vec![false; n];
    let mut best = vec![f64::INFINITY; n];
    let mut link = vec![0usize; n];
    let mut edges: Vec<(f64, usize, usize)> = Vec::with_capacity(n - 1);
    let mut v = 0;
    in_tree[0] = true;
    for _ in 1..n {
        for u in 0..n {
            if !in_tree[u] {
                let d = distance(&points[v], &points[u]);
                if d < best[u] {
                    best[u] = d;
                    link[u] = v;
                }
            }
        }
        let mut next = usize::MAX;
        for u in 0..n {
            if !in_tree[u] && (next == usize::MAX || best[u] < best[next]) {
                next = u;
            }
        }
        in_tree[next] = true;
        edges.push((best[next], link[next], next));
        v = next;
    }
    // heaviest first; later-added edges first among equals
    let mut order: Vec<usize> = (0..edges.len()).collect();
    order.sort_by(|&a, &b| edges[b].0.total_cmp(&edges[a].0).then(b.cmp(&a)));
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    for &e in &order[k - 1..] {
        let (_, a, b) = edges[e];
        let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
        if ra != rb {
            parent[ra.max(rb)] = ra.min(rb);
        }
    }
    let mut label_of_root = vec![usize::MAX; n];
    let mut next_label = 0;
    (0..n)
        .map(|i| {
            let r = find(&mut parent, i);
            if label_of_root[r] == usize::MAX {
                label_of_root[r] = next_label;
                next_label += 1;
            }
            label_of_root[r]
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Naive agglomeration: repeatedly merge the two groups with the
    /// smallest minimum pairwise distance.
    fn naive(points: &[Vec<f64>], k: usize) -> Vec<usize> {
        let mut groups: Vec<Vec<usize>> = (0..points.len()).map(|i| vec![i]).collect();
        while groups.len() > k {
            let mut best = (f64::INFINITY, 0, 0);
            for a in 0..groups.len() {
                for b in a + 1..groups.len() {
                    for &i in &groups[a] {
                        for &j in &groups[b] {
                            let d = distance(&points[i], &points[j]);
                            if d < best.0 {
                                best = (d, a, b);
                            }
                        }
                    }
                }
            }
            let merged = groups.remove(best.2);
            groups[best.1].extend(merged);
        }
        let mut labels = vec![0; points.len()];
        for (g, members) in groups.iter().enumerate() {
            for &i in members {
                labels[i] = g;
            }
        }
        labels
    }

    fn same_partition(a: &[usize], b: &[usize]) -> bool {
        (0..a.len()).all(|i| (0..a.len()).all(|j| (a[i] == a[j]) == (b[i] == b[j])))
    }

    #[test]
    fn matches_naive_merging() {
        let pts: Vec<Vec<f64>> = [0.0, 0.3, 1.7, 2.0, 2.2, 5.0, 9.1, 9.15]
            .iter()
            .enumerate()
            .map(|(i, &x)| vec![x, (i % 3) as f64 * 0.01])
            .collect();
        for k in 1..=pts.len() {
            assert!(same_partition(&single_linkage(&pts, k), &naive(&pts, k)), "k={k}");
        }
    }

    #[test]
    fn labels_in_first_seen_order() {
        let pts = vec![vec![10.0], vec![0.0], vec![10.1]];
        assert_eq!(single_linkage(&pts, 2), vec![0, 1, 0]);
    }
}
